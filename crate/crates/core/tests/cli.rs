use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use fdo_registry::service::cli;
use fdo_registry::service::seed;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(store: &Path, args: &[&str]) -> Run {
    let mut argv = vec!["--store".to_string(), store.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &BTreeMap::new(), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn seed_then_ops_on_contact() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    assert_eq!(run(&store, &["seed"]).code, 0);
    let r = run(&store, &["ops", "seed/contact"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.trim(), r#"["seed/get-primary-email"]"#);
    let r = run(&store, &["inheritance", "seed/ORCiD-URL"]);
    assert_eq!(r.out.trim(), r#"["seed/ORCiD-URL","seed/URL"]"#);
}

#[test]
fn seed_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    run(&store, &["seed"]);
    let once = fs::read(&store).unwrap();
    run(&store, &["seed"]);
    assert_eq!(once, fs::read(&store).unwrap());
}

#[test]
fn exec_and_plan() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    run(&store, &["seed"]);
    let before = fs::read(&store).unwrap();
    let r = run(
        &store,
        &["exec", "seed/get-primary-email", "--input", seed::TEST_ORCID_URL],
    );
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains(seed::TEST_EMAIL));
    assert_eq!(before, fs::read(&store).unwrap());
    let r = run(&store, &["plan", "seed/get-primary-email"]);
    assert!(r.out.contains(r#""stages":[[0],[1]]"#), "{}", r.out);
    let r = run(&store, &["exec", "seed/get-primary-email", "--input", "not a url"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("\"severity\": \"Error\""), "{}", r.err);
}

#[test]
fn validate_cyclic_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    let file = dir.path().join("cyclic-profile.json");
    fs::write(
        &file,
        r#"[
{"entityType":"TypeProfile","pid":"t/a","meta":{"name":"a"},"attributes":[],"policy":{"combinator":"All","allowAdditional":true},"parents":["t/b"]},
{"entityType":"TypeProfile","pid":"t/b","meta":{"name":"b"},"attributes":[],"policy":{"combinator":"All","allowAdditional":true},"parents":["t/a"]}
]"#,
    )
    .unwrap();
    let r = run(&store, &["validate", file.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("Circular inheritance detected"), "{}", r.err);
    assert!(r.out.is_empty());
    // validation never writes
    assert!(!store.exists());
    let r = run(&store, &["import", file.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(!store.exists());
}

#[test]
fn export_all_then_import_into_empty_store() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run(&a, &["seed"]);
    let export = run(&a, &["export", "--all"]);
    assert_eq!(export.code, 0);
    let file = dir.path().join("all.json");
    fs::write(&file, &export.out).unwrap();
    let r = run(&b, &["import", file.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(run(&b, &["export", "--all"]).out, export.out);
}

#[test]
fn usage_and_lookup_errors() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    assert_eq!(run(&store, &["frobnicate"]).code, 2);
    assert_eq!(run(&store, &["export"]).code, 2);
    assert_eq!(run(&store, &["import", "/nonexistent/file.json"]).code, 2);
    assert_eq!(run(&store, &["export", "seed/URL"]).code, 2);
    assert_eq!(run(&store, &["--marker", "", "seed"]).code, 2);
    let r = run(&store, &["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("exec"));
}

#[test]
fn delete_and_record_commands() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    run(&store, &["seed"]);
    let r = run(&store, &["delete", "seed/URL"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("seed/ORCiD-URL"));

    let record = dir.path().join("record.json");
    fs::write(
        &record,
        format!(
            r#"{{"seed/dateCreated":"2024-03-01","seed/contact":"{}","seed/checksum":{{"seed/hash":"9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08","seed/algorithm":"sha256"}}}}"#,
            seed::TEST_ORCID_URL
        ),
    )
    .unwrap();
    let path = record.to_str().unwrap();
    let r = run(&store, &["validate-record", path, "--profile", "seed/helmholtz-kip"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = run(&store, &["validate-record", path, "--profile", "seed/Checksum"]);
    assert_eq!(r.code, 1);
    let r = run(&store, &["record-ops", path]);
    assert!(r.out.contains("seed/get-primary-email"), "{}", r.out);
}

#[test]
fn environment_supplies_the_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("env-store.json");
    let env = BTreeMap::from([("FDO_STORE".to_string(), store.display().to_string())]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cli::run(["seed".to_string()], &env, &mut out, &mut err), 0);
    assert!(store.exists());
}
