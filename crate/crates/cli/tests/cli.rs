use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nclp_cli::report::CSV_HEADER;
use nclp_cli::{run, CliError, Comparison, ExperimentConfig, Format, Report, Row};

fn nclp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclp")).args(args).output().expect("spawn nclp")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn toml_cfg(body: &str) -> ExperimentConfig {
    toml::from_str(body).unwrap()
}

#[test]
fn nontriviality_passes_and_matches_log_n() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "nt.toml", "experiment = \"nontriviality\"\nseed = 3\np = 2.0\nsizes = [4, 16, 64]\n");
    let out = dir.path().join("nt.json");
    let res = nclp(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.passed);
    assert!(!report.rows.is_empty());
    for row in &report.rows {
        assert!(row.abs_err <= 1e-9, "{row:?}");
    }
    // ln 64 shows up among the expected values
    assert!(report.rows.iter().any(|r| (r.expected - 64f64.ln()).abs() < 1e-12));
}

#[test]
fn inequality_grid_passes_for_p2() {
    let report = run(&toml_cfg(
        "experiment = \"inequality-grid\"\nseed = 5\np = 2.0\ngrid = { lo = 1e-6, hi = 1e6, points = 400 }\n",
    ))
    .unwrap();
    assert!(report.passed, "{:?}", report.rows);
}

#[test]
fn failing_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "experiment = \"inequality-grid\"\nseed = 5\np = 1.25\ngrid = { lo = 1e-3, hi = 1e3, points = 200 }\n",
    );
    let res = nclp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    // the report is still written
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.starts_with(&CSV_HEADER.join(",")));
    assert!(stdout.contains(",false"));
}

#[test]
fn unknown_experiment_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", "experiment = \"frobnicate\"\nseed = 1\n");
    let res = nclp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(err.contains("unknown experiment `frobnicate`"), "{err}");
    assert!(err.contains("nontriviality"));
    assert!(res.stdout.is_empty());

    assert!(matches!(run(&toml_cfg("experiment = \"frobnicate\"\nseed = 1\n")), Err(CliError::UnknownExperiment(_))));
}

#[test]
fn experiment_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "o.toml", "experiment = \"frobnicate\"\nseed = 1\np = 2.0\nsizes = [4]\n");
    let res = nclp(&["run", "--config", cfg.to_str().unwrap(), "--experiment", "nontriviality"]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn invalid_parameters_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "experiment = \"norms\"\nseed = 1\np = 0.5\n",
        "experiment = \"norms\"\nseed = 1\ntrials = 0\n",
        "experiment = \"derivative-bound\"\nseed = 1\ntheta = 1.5\n",
        "experiment = \"derivative-bound\"\nseed = 1\ncouple = \"nope\"\n",
        "experiment = \"norms\"\nseed = 1\nbogus = 3\n",
        "experiment = \"centralizer-constants\"\nseed = 1\ncentralizer = { kind = \"lipschitz\" }\n",
        "experiment = \"norms\"\nseed = 1\nalgebra = { blocks = [] }\n",
        "seed = 1\n",
    ];
    for (i, body) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), body);
        let res = nclp(&["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(2), "case {i}: {body}");
        assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"), "case {i}");
    }
    let missing = nclp(&["run", "--config", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn empty_report_csv_is_header_only() {
    let report = Report::new(toml_cfg("experiment = \"norms\"\nseed = 0\n"), vec![], 0.0);
    assert!(report.passed);
    let bytes = report.payload(Format::Csv).unwrap();
    assert_eq!(String::from_utf8(bytes).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn json_round_trip() {
    let cfg = toml_cfg("experiment = \"kosaki\"\nseed = 6\np = 3.0\ntrials = 4\n");
    let mut report = run(&cfg).unwrap();
    report.rows.push(Row::new("extra", "x=1", 0.1 + 0.2, 0.3, 1e-15, Comparison::AbsWithin));
    report.rows.push(Row::report("note", "", 1.0 / 3.0));
    let text = report.payload(Format::Json).unwrap();
    let back: Report = serde_json::from_slice(&text).unwrap();
    assert_eq!(back, Report { wall_time_s: 0.0, ..report });
}

#[test]
fn csv_numbers_round_trip() {
    let report = run(&toml_cfg("experiment = \"norms\"\nseed = 11\nexponents = [1.5, 3.0]\ntrials = 5\n")).unwrap();
    let bytes = report.payload(Format::Csv).unwrap();
    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let recs: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(recs.len(), report.rows.len());
    for (rec, row) in recs.iter().zip(&report.rows) {
        assert_eq!(&rec[1], row.case);
        assert_eq!(rec[3].parse::<f64>().unwrap(), row.measured);
        assert_eq!(rec[4].parse::<f64>().unwrap(), row.expected);
        assert_eq!(&rec[9], row.pass.to_string());
    }
}

#[test]
fn same_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let body = "experiment = \"centralizer-constants\"\nseed = 42\np = 1.5\ntrials = 300\n\
                centralizer = { kind = \"omega_p\" }\n";
    let cfg = write(dir.path(), "c.toml", body);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let res = nclp(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let cfg = toml_cfg(body);
    let (x, y) = (run(&cfg).unwrap(), run(&cfg).unwrap());
    assert_eq!(x.payload(Format::Json).unwrap(), y.payload(Format::Json).unwrap());

    let other = toml_cfg(&body.replace("seed = 42", "seed = 43"));
    assert_ne!(run(&other).unwrap().payload(Format::Csv).unwrap(), x.payload(Format::Csv).unwrap());
}

#[test]
fn format_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.json",
        r#"{"experiment": "nontriviality", "seed": 1, "p": 3.0, "sizes": [8], "output": {"format": "json"}}"#,
    );
    let res = nclp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    assert!(serde_json::from_slice::<Report>(&res.stdout).is_ok());

    let res = nclp(&["run", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(String::from_utf8(res.stdout).unwrap().starts_with("experiment,case"));
}

#[test]
fn shipped_configs_parse_and_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert_eq!(seen, nclp_cli::config::EXPERIMENTS.len());
}
