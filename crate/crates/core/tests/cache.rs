use std::fs;

use hasse_core::cache::{analyze_cached, cache_key, Cache, CacheStatus};
use hasse_core::input::{parse_group, parse_subgroup, FamilySpec};
use hasse_core::report::{AnalysisReport, AnalyzeOptions, VERSION};

#[test]
fn miss_then_hit_then_stale() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let g = parse_group("cyclic(4)").unwrap();
    let stabs = vec![parse_subgroup(&g.group, "#2").unwrap()];
    let opts = AnalyzeOptions::default();

    let (_, first, s1) = analyze_cached(Some(&cache), &g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
    let (_, second, s2) = analyze_cached(Some(&cache), &g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
    assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
    assert_eq!(first, second);

    // an entry written by another version is ignored and rewritten
    let key = cache_key(&g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
    let path = dir.path().join(format!("{key}.json"));
    fs::write(&path, first.replace(&format!("\"version\": \"{VERSION}\""), "\"version\": \"0.0.0-old\"")).unwrap();
    assert!(cache.load(&key).is_none());
    let (_, third, s3) = analyze_cached(Some(&cache), &g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
    assert_eq!(s3, CacheStatus::Miss);
    assert_eq!(third, first);
    assert_eq!(AnalysisReport::from_json(&fs::read_to_string(&path).unwrap()).unwrap().version, VERSION);
}

#[test]
fn keys_separate_inputs() {
    let g = parse_group("klein4").unwrap();
    let a = vec![parse_subgroup(&g.group, "#1").unwrap()];
    let b = vec![parse_subgroup(&g.group, "#2").unwrap()];
    let opts = AnalyzeOptions::default();
    let ka = cache_key(&g, &a, &FamilySpec::Cyclic, &opts).unwrap();
    assert_ne!(ka, cache_key(&g, &b, &FamilySpec::Cyclic, &opts).unwrap());
    assert_ne!(ka, cache_key(&g, &a, &FamilySpec::AllCyclic, &opts).unwrap());
    let crit = AnalyzeOptions { criteria_only: true, ..AnalyzeOptions::default() };
    assert_ne!(ka, cache_key(&g, &a, &FamilySpec::Cyclic, &crit).unwrap());
    assert_eq!(ka, cache_key(&g, &a, &FamilySpec::Cyclic, &opts).unwrap());
}

#[test]
fn timings_bypass_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let g = parse_group("cyclic(3)").unwrap();
    let stabs = vec![parse_subgroup(&g.group, "trivial").unwrap()];
    let opts = AnalyzeOptions { timings: true, ..AnalyzeOptions::default() };
    let (r, _, s) = analyze_cached(Some(&cache), &g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
    assert_eq!(s, CacheStatus::Bypassed);
    assert!(r.timings_ms.value().is_some());
    assert_eq!(fs::read_dir(dir.path()).map(|d| d.count()).unwrap_or(0), 0);
}
