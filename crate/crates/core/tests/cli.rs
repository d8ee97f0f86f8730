use std::path::Path;
use std::process::{Command, Output};

fn volscale(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volscale"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SOURCE_DATE_EPOCH", "1057017600")
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(volscale(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(volscale(dir.path(), &["dfa"]).status.code(), Some(2));
    let missing = volscale(dir.path(), &["dfa", "--input", "/nonexistent/x.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    let err = json(&dir.path().join("error.json"));
    assert_eq!(err["error"], "config");
}

#[test]
fn computation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tiny.csv");
    std::fs::write(&input, "# dt_minutes=1 session=09:30-11:30,13:00-15:00\nday,minute_of_day,volume\n2003-01-02,570,5\n2003-01-02,571,7\n").unwrap();
    let out = dir.path().join("out");
    let run = volscale(&out, &["dfa", "--input", input.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["failures"][0]["kind"], "series_too_short");
}

#[test]
fn ingest_aggregates_trades() {
    let dir = tempfile::tempdir().unwrap();
    let trades = dir.path().join("000001.csv");
    std::fs::write(
        &trades,
        "2003-01-02 09:25:00,500\n2003-01-02 09:30:10,100\n2003-01-02 09:30:50,200\n2003-01-02 14:59:59,50\n2003-01-03 10:00:00,-1\n2003-01-03 10:00:00,70\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = volscale(&out, &["ingest", "--input", trades.to_str().unwrap(), "--dt", "1,240"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let daily = std::fs::read_to_string(out.join("series/000001_dt240.csv")).unwrap();
    assert!(daily.contains("2003-01-02,570,350"));
    assert!(daily.contains("2003-01-03,570,70"));
    let report = json(&out.join("ingest_report.json"));
    assert_eq!(report[0]["record_errors"].as_array().unwrap().len(), 1);
    assert_eq!(report[0]["aggregations"][0][1]["discarded"], 1);
}

#[test]
fn cascade_spectrum_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    assert!(volscale(&data, &["synth", "--kind", "cascade", "--levels", "14"]).status.success());
    let out = dir.path().join("out");
    let input = data.join("synth/cascade.csv");
    let run = volscale(&out, &["mfdfa", "--input", input.to_str().unwrap(), "--grid", "dyadic", "--smin", "16"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let doc = json(&out.join("mfdfa/cascade_original.json"));
    let q = doc["result"]["q"].as_array().unwrap();
    let h = doc["result"]["h"].as_array().unwrap();
    let reference = volscale::synth::CascadeReference { p: 0.3 };
    for (q, h) in q.iter().zip(h) {
        let (q, h) = (q.as_f64().unwrap(), h.as_f64().unwrap());
        assert!((h - reference.h(q)).abs() < 0.05, "q={q} h={h}");
    }
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["timestamps"]["started"], "2003-07-01T00:00:00+00:00");
    assert!(manifest["notes"][0].as_str().unwrap().contains("adjusted variant skipped"));
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_volscale"))
        .args(["synth", "--kind", "iid", "--length", "2048"])
        .env("VOLSCALE_OUT", dir.path())
        .env("VOLSCALE_SEED", "11")
        .output()
        .unwrap();
    assert!(run.status.success());
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["seeds"][0], 11);
    let generator = json(&dir.path().join("synth/generator.json"));
    assert_eq!(generator["kind"], "iid");
}
