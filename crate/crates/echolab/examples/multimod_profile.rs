//! Mod-q mass and noise stability of label-block streams, correlated with
//! the per-symbol PCG rate of the same streams.

use std::collections::HashMap;

use echolab::coding::{KGuard, Model};
use echolab::profile::{corr_with_pcg, profile_experiment, ProfileConfig};
use echolab::sources::{pcg_experiment, topk_by_seed, LabelBlockParams, SourceSpec};

fn main() -> echolab::Result<()> {
    let ns = [256, 384, 512];
    let seeds = 40;
    let src = SourceSpec::LabelBlock(LabelBlockParams::STRONG);
    let cfg = ProfileConfig {
        qs: vec![2, 3, 5],
        kmax_values: vec![6],
        rhos: vec![0.1, 0.2],
        window: 8,
    };
    let (mass, stab) = profile_experiment(&ns, seeds, 41113, &src, &cfg)?;
    for q in [2, 3, 5] {
        let m: Vec<f64> = (1..=6)
            .map(|k| {
                let v: Vec<f64> = mass
                    .iter()
                    .filter(|r| r.q == q && r.k == k && r.n == 512)
                    .map(|r| r.value)
                    .collect();
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect();
        println!("q={q} cumulative mass at n=512: {m:.4?}");
    }

    let guard = KGuard {
        warn_ratio: 16.0,
        auto_clamp: true,
    };
    let models: Vec<Model> = [0, 2, 4, 8].map(Model::Kgram).to_vec();
    let pcg = pcg_experiment(&ns, seeds, 41113, &src, &models, true, &guard)?;
    let rates: HashMap<_, _> = topk_by_seed(&pcg)
        .into_iter()
        .map(|(n, s, v)| (("label-block".to_string(), n, s), v / (64 * n) as f64))
        .collect();
    for c in corr_with_pcg(&rates, &mass, &stab)? {
        println!("{:9} {:6} r={:+.3} count={}", c.metric, c.param, c.r, c.count);
    }
    Ok(())
}
