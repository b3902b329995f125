use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn factors(v: &Value) -> Vec<u64> {
    v["value"].as_array().expect("computed value").iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn klein_four_worked_example() {
    let out = hasse(&["analyze", "--group", "klein4", "--stabilizer", "#1", "--stabilizer", "trivial", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["schema"], 1);
    let c = &r["cohomology"];
    assert_eq!(factors(&c["h1"]), [2]);
    assert_eq!(factors(&c["h2"]), [2]);
    assert!(factors(&c["sha2"]).is_empty());
    let hnp = c["sha2_hnp"]["value"].as_array().unwrap();
    assert!(hnp[0].as_array().unwrap().is_empty());
    assert_eq!(hnp[1], serde_json::json!([2]));
}

#[test]
fn klein_four_quadratic_pair() {
    let out = hasse(&["analyze", "-g", "klein4", "-s", "#1", "-s", "#2", "--json"]);
    let r = stdout_json(&out);
    assert!(factors(&r["cohomology"]["sha2"]).is_empty());
    assert_eq!(r["consistency"]["sha_orders_agree"]["value"], true);
}

#[test]
fn s4_from_permutations_criteria_only() {
    let g = r#"{"permutations": ["(1,2)", "(1,2,3,4)"], "degree": 4}"#;
    let out = hasse(&["analyze", "-g", g, "-s", "(1,2)", "-s", "(1,2,3,4)", "--criteria-only", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let k = &stdout_json(&out)["criteria"];
    assert_eq!(k["ker_e_order"], 1);
    assert_eq!(k["h2z_prime_order"], 2);
    assert_eq!(k["sha_order"], 2);
    assert_eq!(k["hnp_gate"]["value"], true);
}

#[test]
fn text_report_lists_the_sections() {
    let out = hasse(&["analyze", "-g", "cyclic(4)", "-s", "trivial"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["H^1(G, Lambda)", "Sha^2(Lambda)", "|Ker e|", "HNP gate"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(hasse(&["analyze", "-g", "nonsense(3)", "-s", "trivial"]).status.code(), Some(2));
    assert_eq!(hasse(&["analyze", "-g", "cyclic(4)", "-s", "#9"]).status.code(), Some(2));
    assert_eq!(hasse(&["analyze", "-g", "cyclic(4)", "-s", "trivial", "--family", "bogus"]).status.code(), Some(2));
    assert_eq!(hasse(&["analyze", "-g", "cyclic(18)", "-s", "trivial"]).status.code(), Some(3));
    assert_eq!(hasse(&["analyze", "-g", "cyclic(18)", "-s", "trivial", "--max-order", "18"]).status.code(), Some(0));
    assert_eq!(hasse(&["scan", "--groups", "bogus"]).status.code(), Some(2));
    assert_eq!(hasse(&["scan", "--orders", "9..3"]).status.code(), Some(2));
    assert_eq!(hasse(&["scan", "--group", "klein4", "--family", "explicit:[\"whole\"]"]).status.code(), Some(2));
}

#[test]
fn scan_exit_status_follows_findings() {
    let args = ["scan", "--mode", "criteria", "--group", "direct_product(cyclic(2),dihedral(4))"];
    assert_eq!(hasse(&args).status.code(), Some(0));
    let mut flagged = args.to_vec();
    flagged.push("--fail-on-found");
    let out = hasse(&flagged);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("derived-criterion-failure"));
    assert_eq!(hasse(&["scan-criteria", "--group", "dihedral(4)", "--fail-on-found"]).status.code(), Some(0));
}

#[test]
fn lattice_scan_json() {
    let out = hasse(&["scan-lattice", "--group", "klein4", "--json"]);
    let s = stdout_json(&out);
    assert_eq!(s["pairs"], 8);
    assert_eq!(s["findings"], serde_json::json!([]));
}

#[test]
fn catalog_lists_dihedral_four() {
    let out = hasse(&["catalog", "--orders", "8", "--json"]);
    let rows = stdout_json(&out);
    let d4 = rows.as_array().unwrap().iter().find(|r| r["spec"] == "dihedral(4)").expect("dihedral(4) listed");
    assert_eq!(d4["order"], 8);
    assert_eq!(d4["family"], "dihedral");
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["analyze", "-g", "klein4", "-s", "#1", "-s", "trivial", "--json", "--cache-dir", cache];
    let first = hasse(&args);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = hasse(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corrupt_cache_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["analyze", "-g", "cyclic(6)", "-s", "#2", "--json", "--cache-dir", cache];
    let fresh = hasse(&args);
    let entry = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    fs::write(&entry, "{ not json").unwrap();
    let again = hasse(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(fresh.stdout, again.stdout);
    assert!(String::from_utf8_lossy(&again.stderr).contains("corrupt cache entry"));
    // the bad entry was replaced
    assert_eq!(fs::read(&entry).unwrap(), fresh.stdout.strip_suffix(b"\n").unwrap());
}

#[test]
fn unwritable_cache_dir_still_answers() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    // a regular file where the directory should be cannot be created over
    let cache = blocker.join("cache");
    let out = hasse(&["analyze", "-g", "klein4", "-s", "#1", "--json", "--cache-dir", cache.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write cache entry"));
    assert_eq!(stdout_json(&out)["schema"], 1);
}

#[test]
fn dump_lattice_writes_action_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.json");
    let out = hasse(&["analyze", "-g", "klein4", "-s", "#1", "-s", "trivial", "--dump-lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dump: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dump["phnp"]["rank"], 5);
    assert_eq!(dump["hnp_summands"].as_array().unwrap().len(), 2);
}
