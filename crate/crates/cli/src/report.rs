//! Tabular reports written as CSV or JSON with identical field names.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows in canonical order plus the overall verdict of any asserted checks.
#[derive(Clone, Debug)]
pub struct Report<R> {
    pub rows: Vec<R>,
    pub passed: bool,
    /// Free-form remarks, printed to stderr by the binary.
    pub notes: Vec<String>,
}

impl<R: Serialize> Report<R> {
    pub fn new(rows: Vec<R>, passed: bool) -> Self {
        Self {
            rows,
            passed,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn write_to(&self, format: Format, out: impl Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                for row in &self.rows {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &self.rows)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(format, &mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: u32,
        value: f64,
        bound: Option<f64>,
        pass: bool,
    }

    #[test]
    fn csv_and_json_shapes() {
        let r = Report::new(
            vec![
                Row {
                    n: 1,
                    value: 0.1,
                    bound: None,
                    pass: true,
                },
                Row {
                    n: 2,
                    value: 1e-20,
                    bound: Some(2.0),
                    pass: false,
                },
            ],
            false,
        );
        assert_eq!(
            r.render(Format::Csv).unwrap(),
            "n,value,bound,pass\n1,0.1,,true\n2,1e-20,2.0,false\n"
        );
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v[0]["bound"], serde_json::Value::Null);
        assert_eq!(v[1]["value"].as_f64(), Some(1e-20));
    }
}
