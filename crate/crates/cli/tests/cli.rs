use std::process::{Command, Output};

use dyadic_cli::families::random;
use dyadic_cli::input::format_samples;

fn dyadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn csv_and_json_carry_identical_values() {
    let csv_out = dyadic(&["kernels", "--resolution", "8", "--n-max", "6"]);
    let json_out = dyadic(&[
        "kernels",
        "--resolution",
        "8",
        "--n-max",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(csv_out.status.code(), Some(0));
    assert_eq!(json_out.status.code(), Some(0));
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(&stdout(&json_out)).unwrap();
    let text = stdout(&csv_out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), rows.len());
    assert_eq!(records.len(), 6);
    for (rec, obj) in records.iter().zip(&rows) {
        assert_eq!(header.len(), obj.len());
        for (field, cell) in header.iter().zip(rec) {
            let v = &obj[field];
            match v {
                serde_json::Value::Number(n) => {
                    assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{field}")
                }
                serde_json::Value::Bool(b) => assert_eq!(cell, b.to_string()),
                serde_json::Value::Null => assert_eq!(cell, ""),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "converge",
        "--family",
        "random",
        "--seed",
        "5",
        "--resolution",
        "9",
    ];
    let a = dyadic(&args);
    let b = dyadic(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = dyadic(&[
        "converge",
        "--family",
        "random",
        "--seed",
        "6",
        "--resolution",
        "9",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn diverge_exit_codes() {
    let ok = dyadic(&["diverge", "--alphas", "1,9", "--resolution", "19"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert_eq!(stdout(&ok).lines().count(), 3);

    // Condition (5) fails for (1, 3).
    let fail = dyadic(&["diverge", "--alphas", "1,3", "--resolution", "7"]);
    assert_eq!(fail.status.code(), Some(1));

    let small = dyadic(&["diverge", "--resolution", "20"]);
    assert_eq!(small.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&small.stderr).contains("N >= 21"));

    let unsorted = dyadic(&["diverge", "--alphas", "3,1"]);
    assert_eq!(unsorted.status.code(), Some(2));

    let gated = dyadic(&["diverge", "--alphas", "1", "--resolution", "25"]);
    assert_eq!(gated.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&gated.stderr).contains("memory gate"));
}

#[test]
fn usage_errors() {
    assert_eq!(dyadic(&["nonsense"]).status.code(), Some(2));
    assert_eq!(dyadic(&["converge", "--p", "1/2"]).status.code(), Some(2));
    assert_eq!(dyadic(&["diagnostics", "--p", "2"]).status.code(), Some(2));
    assert_eq!(dyadic(&["kernels", "--p", "abc"]).status.code(), Some(2));
    assert_eq!(
        dyadic(&["kernels", "--resolution", "6", "--n-max", "7"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sample_file_input_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.txt");
    std::fs::write(&input, format_samples(&random(6, 9))).unwrap();
    let out = dir.path().join("report.json");
    let o = dyadic(&[
        "converge",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);

    let mismatch = dyadic(&[
        "converge",
        "--input",
        input.to_str().unwrap(),
        "--resolution",
        "7",
    ]);
    assert_eq!(mismatch.status.code(), Some(2));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3\n1\n2\n").unwrap();
    assert_eq!(
        dyadic(&["converge", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn lemma2_and_diagnostics() {
    let l = dyadic(&["lemma2", "--resolution", "9"]);
    assert_eq!(l.status.code(), Some(0));
    assert_eq!(stdout(&l).lines().count(), 5);

    let d = dyadic(&["diagnostics", "--family", "zero", "--resolution", "4"]);
    assert_eq!(d.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&d.stderr).contains("undefined"));
    assert!(stdout(&d).lines().skip(1).all(|l| l.ends_with(",,,")));

    let a = dyadic(&["diagnostics", "--resolution", "6", "--format", "json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(rows
        .iter()
        .all(|r| r["log_mean_ratio"].as_f64().unwrap().is_finite()));
}
