//! Exact hypergeometric tails next to the Serfling, Hoeffding and Chvátal
//! bounds.

use echolab::stats::{
    chvatal_bound, hoeffding_bound, one_sided_tail, serfling_bound, two_sided_tail, HypergeoSpec, Side,
};

fn main() -> echolab::Result<()> {
    println!("m\tK\ts\teps\ttail\tserfling\thoeffding\tupper\tchvatal");
    for (m, k, s, eps) in [(100, 50, 20, 0.2), (500, 100, 250, 0.05), (400, 200, 40, 0.1), (60, 30, 59, 0.1)] {
        let spec = HypergeoSpec::new(m, k, s)?;
        println!(
            "{m}\t{k}\t{s}\t{eps}\t{:.3e}\t{:.3e}\t{:.3e}\t{:.3e}\t{:.3e}",
            two_sided_tail(&spec, eps),
            serfling_bound(&spec, eps),
            hoeffding_bound(&spec, eps),
            one_sided_tail(&spec, eps, Side::Upper),
            chvatal_bound(&spec, eps, Side::Upper)?
        );
    }
    Ok(())
}
