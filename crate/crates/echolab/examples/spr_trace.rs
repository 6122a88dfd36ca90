//! k-gram log-loss on restriction-path parity histories, averaged over
//! seeds for each k.
//!
//! cargo run --release -p echolab --example spr_trace

use echolab::sources::{spr_experiment, HistoryParams};
use echolab::stats::summarize;

fn main() -> echolab::Result<()> {
    let base = HistoryParams::new(0.05, 0.06, 3, 0);
    let rows = spr_experiment(&[64, 96, 128], 50, 0, 8, 32, &base)?;
    println!("k\tmean\tsem");
    for k in 0..=8 {
        let v: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.logloss).collect();
        let s = summarize(&v);
        println!("{k}\t{:.4}\t{:.4}", s.mean, s.sem);
    }
    Ok(())
}
