use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use ttower::db::{parse_jsonl, CurveDb};
use ttower::report::strip_timing;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ttower-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn ttower(args: &[&str], store: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttower")).args(args).env("TTOWER_DB", store).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_label_is_a_configuration_error() {
    let d = scratch("missing");
    let o = ttower(&["torsion", "999z9", "--field", "K"], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("999z9"));
}

#[test]
fn bad_field_is_a_configuration_error() {
    let d = scratch("badfield");
    let o = ttower(&["torsion", "121a1", "--field", "LAYER(4,1)"], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ingest_then_query() {
    let d = scratch("ingest");
    let store = d.join("store.jsonl");
    let input = d.join("new.jsonl");
    fs::write(&input, "{\"label\":\"37a1\",\"ainvs\":[0,0,1,-1,0],\"source\":\"test\"}\n").unwrap();
    let o = ttower(&["ingest", input.to_str().unwrap()], &store);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ingested 1 new"));
    let again = ttower(&["ingest", input.to_str().unwrap()], &store);
    assert!(stdout(&again).contains("ingested 0 new records (1 already present)"));
    let o = ttower(&["torsion", "37a1", "--field", "Zp:3"], &store);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("37a1 over"));
}

#[test]
fn ingest_rejects_singular_curve() {
    let d = scratch("singular");
    let input = d.join("bad.jsonl");
    fs::write(&input, "{\"label\":\"sing\",\"ainvs\":[0,0,0,0,0],\"source\":\"test\"}\n").unwrap();
    let o = ttower(&["ingest", input.to_str().unwrap()], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(3));
    assert!(!d.join("store.jsonl").exists());
}

#[test]
fn certificate_roundtrip_and_tamper() {
    let d = scratch("cert");
    let store = d.join("store.jsonl");
    let cert = d.join("c.json");
    let o = ttower(&["certify", "121a1", "11", "--field", "LAYER(5,1)", "--out", cert.to_str().unwrap()], &store);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(ttower(&["recheck", cert.to_str().unwrap()], &store).status.code(), Some(0));

    // A witness prime that does not split in the field must be rejected.
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["witnesses"][0]["q"] = json!(13);
    let bad = d.join("bad.json");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = ttower(&["recheck", bad.to_str().unwrap()], &store);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));

    // So must a certificate claiming a different curve.
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["curve_label"] = json!("121b1");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(ttower(&["recheck", bad.to_str().unwrap()], &store).status.code(), Some(1));
}

#[test]
fn certify_reports_rational_roots() {
    let d = scratch("rootlikely");
    // 32a2 has full rational 2-torsion, so X_2 has roots everywhere.
    let o = ttower(&["certify", "32a2", "2", "--field", "Q"], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("ROOT_LIKELY"));
}

#[test]
fn unknown_lemma_runs_nothing() {
    let d = scratch("unknown");
    let o = ttower(&["verify", "S9.nothing", "--json"], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lemmas"], json!([]));
    assert_eq!(v["summary"], json!({"pass": 0, "fail": 0, "indeterminate": 0}));
}

#[test]
fn single_lemma_passes_and_writes_report() {
    let d = scratch("single");
    let out = d.join("out");
    let o = ttower(&["verify", "S4.order25", "--out", out.to_str().unwrap()], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], "report/1");
    assert_eq!(v["lemmas"][0]["verdict"], "PASS");
}

#[test]
fn verify_needs_id_or_all() {
    let d = scratch("noid");
    assert_eq!(ttower(&["verify"], &d.join("store.jsonl")).status.code(), Some(3));
}

#[test]
fn divpoly_mod_q_degree() {
    let d = scratch("divpoly");
    let o = ttower(&["divpoly", "121a1", "5", "--mod", "7"], &d.join("store.jsonl"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# degree 12"));
}

#[test]
fn strip_timing_is_recursive() {
    let mut v = json!({"created": "x", "millis": 3, "lemmas": [{"millis": 9, "id": "a"}], "seed": 0});
    strip_timing(&mut v);
    assert_eq!(v, json!({"lemmas": [{"id": "a"}], "seed": 0}));
}

#[test]
fn db_rejects_conflicting_label() {
    let mut db = CurveDb::builtin();
    let n = db.len();
    let r121 = db.record("121a1").unwrap().clone();
    assert!(!db.insert(r121).unwrap());
    let other = parse_jsonl("{\"label\":\"121a1\",\"ainvs\":[0,0,1,-1,0],\"source\":\"x\"}").unwrap();
    assert!(db.insert(other[0].clone()).is_err());
    assert_eq!(db.len(), n);
    assert_eq!(db.require(&["121a1", "nope", "nada"]).unwrap_err().0, vec!["nope", "nada"]);
}
