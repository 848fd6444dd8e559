//! Sample files: the resolution `N` on the first line, then `2^N` values in
//! cell order, one per line.

use std::path::Path;

use anyhow::{bail, Context, Result};
use dyadic::GridFunction;

pub fn parse_samples(text: &str) -> Result<GridFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, head) = lines.next().context("sample file is empty")?;
    let resolution: u32 = head
        .parse()
        .with_context(|| format!("first line must be the resolution, got {head:?}"))?;
    if resolution > 30 {
        bail!("resolution {resolution} is too large for a sample file");
    }
    let values = lines
        .map(|(i, l)| {
            l.parse::<f64>()
                .with_context(|| format!("line {i}: not a number: {l:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridFunction::new(resolution, values)?)
}

pub fn read_samples(path: &Path) -> Result<GridFunction> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_samples(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Inverse of [`parse_samples`].
pub fn format_samples(f: &GridFunction) -> String {
    let mut s = format!("{}\n", f.resolution());
    for v in f.values() {
        s.push_str(&format!("{v:?}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = GridFunction::from_fn(3, |c| c as f64 / 3.0 - 1.0);
        assert_eq!(parse_samples(&format_samples(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_samples("").is_err());
        assert!(parse_samples("x\n").is_err());
        assert!(parse_samples("2\n1\n2\n3\n").is_err());
        assert!(parse_samples("1\n1\nnan\n").is_err());
        assert!(parse_samples("1\n1\nabc\n").is_err());
        assert!(parse_samples("1\n\n1\n2\n\n").is_ok());
    }
}
