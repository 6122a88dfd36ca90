#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_echolab");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn echolab")
}

/// The quick verification preset, in the order the commands are documented.
pub fn rc1_commands(out: &str) -> Vec<Vec<String>> {
    let cmds: [&[&str]; 4] = [
        &["ec", "--n", "64", "96", "--seeds", "5", "--gamma", "0.1", "--max-backtracks", "10000", "--outdir", out],
        &["spr", "--n", "64", "--seeds", "5", "--kmax", "6", "--simple-mode", "--outdir", out],
        &[
            "pcg", "--n", "64", "--seeds", "8", "--context-mode", "label-block", "--model", "kgram", "--k", "0",
            "2", "4", "--length-mult", "64", "--auto-strong-signal", "--warn-k-ratio", "16", "--auto-clamp-k",
            "--assert-nonneg-pcg", "0.0", "--outdir", out,
        ],
        &[
            "profile", "--n", "96", "--seeds", "5", "--context-mode", "label-block", "--length-mult", "32", "--q",
            "2", "3", "--kmax-values", "6", "--rho", "0.1", "0.2", "--out-data-dir", out, "--out-assets-dir", out,
        ],
    ];
    cmds.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
}

pub const RC1_FILES: &[&str] = &[
    "results/ec_counter.csv",
    "results/ec_counter_summary.json",
    "results/spr_trace.csv",
    "results/spr_trace_summary.json",
    "results/pcg_estimate.csv",
    "results/kgram_scale_vs_n.csv",
    "results/pcg_estimate_summary.json",
    "mass_by_qk.csv",
    "stability_by_rho.csv",
    "profile_summary.json",
    "seeds.txt",
];

/// Runs the preset into `dir`; returns the first failing command's stderr.
pub fn run_rc1(dir: &Path) -> Result<(), String> {
    let out = dir.to_str().unwrap();
    for cmd in rc1_commands(out) {
        let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let o = run(&args);
        if !o.status.success() {
            return Err(format!("{}: {}", cmd.join(" "), String::from_utf8_lossy(&o.stderr)));
        }
    }
    Ok(())
}
