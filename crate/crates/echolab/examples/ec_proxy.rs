//! Erasure proxy on lifted planted instances, summarized per n and status.
//!
//! cargo run --release -p echolab --example ec_proxy -- 20

use echolab::ec::{ec_aggregate, ec_experiment, EcConfig};

fn main() -> echolab::Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let ns = [64, 96, 128, 192, 256];
    let t = std::time::Instant::now();
    let rows = ec_experiment(&ns, seeds, 0, 0.1, &EcConfig::default())?;
    println!("{} runs in {:.1?}", rows.len(), t.elapsed());
    println!("n\tstatus\tcount\tmean_erasures\tmean_backtracks");
    for a in ec_aggregate(&rows) {
        println!(
            "{}\t{}\t{}\t{:.1}\t{:.1}",
            a.n, a.status, a.count, a.mean_erasures, a.mean_backtracks
        );
    }
    Ok(())
}
