mod common;

use std::fs;
use std::path::{Path, PathBuf};

use common::{run, run_rc1, RC1_FILES};
use echolab::pipeline::{
    cmd_ec, cmd_pcg, cmd_profile, cmd_restrict, cmd_spr, make_manifest, verify_manifest, verify_presence, EcArgs,
    Manifest, PcgArgs, ProfileArgs, RestrictArgs, SprArgs,
};
use echolab::profile::ProfileConfig;

fn small_runs(dir: &Path) {
    cmd_ec(
        &EcArgs {
            ns: vec![32, 48],
            seeds: 4,
            ..Default::default()
        },
        dir,
        None,
    )
    .unwrap();
    cmd_spr(
        &SprArgs {
            ns: vec![32],
            seeds: 3,
            kmax: 4,
            ..Default::default()
        },
        dir,
        None,
    )
    .unwrap();
    cmd_pcg(
        &PcgArgs {
            ns: vec![64, 96],
            seeds: 3,
            ..Default::default()
        },
        dir,
        None,
    )
    .unwrap();
    cmd_restrict(
        &RestrictArgs {
            ns: vec![128],
            seeds: 3,
            ..Default::default()
        },
        dir,
        None,
    )
    .unwrap();
    cmd_profile(
        &ProfileArgs {
            ns: vec![96],
            seeds: 3,
            seed_base: 0,
            pcg_csv: Some(dir.join("results/pcg_estimate.csv")),
            profile: ProfileConfig {
                qs: vec![2, 3],
                kmax_values: vec![4],
                rhos: vec![0.1],
                window: 8,
            },
            ..Default::default()
        },
        &dir.join("profile"),
        None,
    )
    .unwrap();
}

fn tree(dir: &Path) -> Manifest {
    make_manifest(dir, &[dir.to_path_buf()], "t", None).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    small_runs(a.path());
    small_runs(b.path());
    let (ma, mb) = (tree(a.path()), tree(b.path()));
    assert!(ma.files.len() >= 15, "{:?}", ma.files.keys());
    assert_eq!(ma.files, mb.files);
    // no timestamps or absolute paths leak into summaries
    let s = fs::read_to_string(a.path().join("results/ec_counter_summary.json")).unwrap();
    assert!(!s.contains(a.path().to_str().unwrap()));
}

#[test]
fn every_written_cell_is_finite() {
    let d = tempfile::tempdir().unwrap();
    small_runs(d.path());
    for (k, _) in tree(d.path()).files {
        if k.ends_with(".csv") {
            let text = fs::read_to_string(d.path().join(&k)).unwrap();
            for bad in ["NaN", "inf"] {
                assert!(!text.contains(bad), "{k} contains {bad}");
            }
            assert!(!text.contains('\r'));
        }
    }
}

#[test]
fn ec_default_run_has_500_rows() {
    let d = tempfile::tempdir().unwrap();
    let rep = cmd_ec(&EcArgs::default(), d.path(), None).unwrap();
    assert!(rep.failures.is_empty());
    let text = fs::read_to_string(d.path().join("results/ec_counter.csv")).unwrap();
    assert_eq!(text.lines().count(), 501);
    let seeds = fs::read_to_string(d.path().join("seeds.txt")).unwrap();
    assert_eq!(seeds.lines().count(), 100);
}

#[test]
fn manifest_flags_single_mutation() {
    let d = tempfile::tempdir().unwrap();
    small_runs(d.path());
    let before = tree(d.path());
    assert!(verify_manifest(d.path(), &before).ok());
    let victim = d.path().join("results/spr_trace.csv");
    let mut bytes = fs::read(&victim).unwrap();
    let last = bytes.len() - 2;
    bytes[last] ^= 1;
    fs::write(&victim, bytes).unwrap();
    let after = tree(d.path());
    let diff: Vec<_> = before
        .files
        .iter()
        .filter(|(k, v)| after.files.get(*k) != Some(*v))
        .map(|(k, _)| k.clone())
        .collect();
    assert_eq!(diff, ["results/spr_trace.csv"]);
    let rep = verify_manifest(d.path(), &before);
    assert_eq!(rep.mismatched, ["results/spr_trace.csv"]);
    assert!(rep.missing.is_empty());
    fs::remove_file(d.path().join("seeds.txt")).unwrap();
    let rep = verify_manifest(d.path(), &before);
    assert_eq!(rep.missing, ["seeds.txt"]);
}

#[test]
fn manifest_json_round_trips() {
    let d = tempfile::tempdir().unwrap();
    small_runs(d.path());
    let m = tree(d.path());
    let back = Manifest::from_json(&m.to_json().unwrap(), "t").unwrap();
    assert_eq!(back.files, m.files);
    let empty = tempfile::tempdir().unwrap();
    let e = tree(empty.path());
    assert!(e.files.is_empty());
    let v: serde_json::Value = serde_json::from_str(&e.to_json().unwrap()).unwrap();
    assert!(v.as_object().unwrap().is_empty());
}

#[test]
fn rc1_preset_emits_every_listed_file() {
    let d = tempfile::tempdir().unwrap();
    run_rc1(d.path()).unwrap();
    let required: Vec<String> = RC1_FILES.iter().map(|s| s.to_string()).collect();
    let rep = verify_presence(d.path(), &required);
    assert!(rep.all_present(), "{}", rep.render());
}

#[test]
fn bin_exit_codes() {
    assert_eq!(run(&["ec", "--n", "64", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_str().unwrap();
    // 64 bits at k=8 is short of 4·2^k bits per context, which is an error
    let o = run(&["pcg", "--n", "16", "--seeds", "2", "--k", "8", "--length-mult", "4", "--outdir", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error: insufficient data"));
}

#[test]
fn bin_manifest_and_verify() {
    let d = tempfile::tempdir().unwrap();
    run_rc1(d.path()).unwrap();
    let base = d.path().to_str().unwrap();
    let mpath: PathBuf = d.path().join("MANIFEST.json");
    let m = mpath.to_str().unwrap();
    let o = run(&["manifest", "--root", base, "--base", base, "--out", m, "--label", "rc1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(run(&["verify", "--manifest", m, "--base", base]).status.success());
    fs::write(d.path().join("results/ec_counter.csv"), "n\n").unwrap();
    let o = run(&["verify", "--manifest", m, "--base", base]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("results/ec_counter.csv"));

    let o = run(&["verify-presence", "--base", base, "seeds.txt", "seeds.txt", "nope.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.matches("seeds.txt").count(), 1);
    assert!(text.contains("MISS nope.csv"));
    assert!(text.contains("ALL ASSETS PRESENT: false"));
}
