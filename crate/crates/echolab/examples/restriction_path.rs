//! Survival along the restriction path p = m^(-alpha/d): closed form
//! against Monte Carlo, then unfixed clauses and row-kernel weights on
//! small planted instances, where |C| stays searchable.

use echolab::restrictions::{path_rate, restriction_experiment, sample_rounds, survival_probability};

fn main() -> echolab::Result<()> {
    let (d, alpha) = (3, 1.0 / 3.0);
    println!("t*\tp\tclosed\tmonte_carlo");
    for (t, m) in [(4u64, 64usize), (16, 512), (64, 4096)] {
        let p = path_rate(m, alpha, d);
        let trials = 2000;
        let mut hit = 0;
        for s in 0..trials {
            let rho = sample_rounds(t as usize, d, p, s)?;
            hit += usize::from(rho.alive_count() > 0);
        }
        println!(
            "{t}\t{p:.4}\t{:.4}\t{:.4}",
            survival_probability(t, d, p),
            hit as f64 / trials as f64
        );
    }

    let rows = restriction_experiment(&[24, 48], 5, 0, 0.1, d, 0.5, 24)?;
    println!("\nn\tseed\talive\tunfixed\tmin_kernel_weight");
    for r in rows {
        let w = r.min_kernel_weight.map_or("-".to_string(), |w| w.to_string());
        println!("{}\t{}\t{}\t{}\t{w}", r.n, r.seed, r.alive_vars, r.unfixed_clauses);
    }
    Ok(())
}
