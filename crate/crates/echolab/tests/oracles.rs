//! Second implementations and Monte Carlo checks against the library.

use rand::Rng;

use echolab::coding::{elias_delta_len, elias_gamma_len, kgram_logloss, lz78_cost, lz78_reference, BitWriter, Lz78Config};
use echolab::ec::{dpll_ec, EcConfig, Status};
use echolab::fourier::{wht, MultilinearPoly};
use echolab::instances::{assignment_from_mask, gen_uniform_rhs_xor, lift_to_cnf, Formula, XorInstance};
use echolab::profile::{stream_stability, window_spectrum};
use echolab::restrictions::{
    apply_restriction, live_parity_bias_check, path_rate, product_restriction, row_kernel_min_weight,
    sample_restriction, sample_rounds, survival_probability, RestrictedXor, THRESHOLDS,
};
use echolab::rng::{coin, fair_bit, seeded};
use echolab::stats::{normal_two_sided_p, pearson_r, summarize};

/// Left kernel of the reduced rows by Gaussian elimination, then the
/// minimum weight over every nonzero combination of the basis.
fn kernel_min_weight_by_elimination(r: &RestrictedXor) -> Option<usize> {
    let rows: Vec<u64> = r
        .unfixed
        .iter()
        .map(|c| c.alive.iter().fold(0u64, |m, &v| m ^ (1u64 << v)))
        .collect();
    let k = rows.len();
    // augmented rows: (row value, identity tag)
    let mut aug: Vec<(u64, u64)> = rows.iter().enumerate().map(|(i, &v)| (v, 1u64 << i)).collect();
    let mut pivot_row = 0;
    for bit in 0..64 {
        let Some(p) = (pivot_row..k).find(|&i| aug[i].0 >> bit & 1 == 1) else {
            continue;
        };
        aug.swap(pivot_row, p);
        for i in 0..k {
            if i != pivot_row && aug[i].0 >> bit & 1 == 1 {
                aug[i].0 ^= aug[pivot_row].0;
                aug[i].1 ^= aug[pivot_row].1;
            }
        }
        pivot_row += 1;
    }
    let basis: Vec<u64> = aug[pivot_row..].iter().map(|a| a.1).collect();
    if basis.is_empty() {
        return None;
    }
    (1u64..1 << basis.len())
        .map(|c| {
            let mut v = 0;
            for (i, b) in basis.iter().enumerate() {
                if c >> i & 1 == 1 {
                    v ^= b;
                }
            }
            v.count_ones() as usize
        })
        .min()
}

#[test]
fn kernel_search_matches_elimination() {
    let mut nontrivial = 0;
    for seed in 0..300u64 {
        let x = gen_uniform_rhs_xor(10, 0.4, seed).unwrap();
        assert_eq!(x.m, 14);
        let s = [1.0, 0.7, 0.5][seed as usize % 3];
        let rho = product_restriction(10, s, seed + 1).unwrap();
        let r = apply_restriction(&x, &rho).unwrap();
        let got = row_kernel_min_weight(&r, 24).unwrap();
        let want = kernel_min_weight_by_elimination(&r);
        assert_eq!(got.as_ref().map(|w| w.weight), want, "seed {seed}");
        if let Some(w) = got {
            nontrivial += 1;
            assert_eq!(w.support.len(), w.weight);
            // the witness really is a dependency among the reduced rows
            let mut acc = 0u64;
            for &ci in &w.support {
                let u = r.unfixed.iter().find(|u| u.clause == ci).unwrap();
                acc ^= u.alive.iter().fold(0u64, |m, &v| m ^ (1u64 << v));
            }
            assert_eq!(acc, 0);
        }
    }
    assert!(nontrivial > 50);
}

#[test]
fn solver_unsat_agrees_with_enumeration() {
    let cfg = EcConfig {
        max_backtracks: 1 << 30,
        ..Default::default()
    };
    let (mut sat, mut unsat) = (0, 0);
    for seed in 0..400u64 {
        let n = 3 + (seed % 12) as usize;
        let x = gen_uniform_rhs_xor(n, 0.5, seed).unwrap();
        let c = lift_to_cnf(&x);
        let r = dpll_ec(&c, seed, &cfg).unwrap();
        let any = (0..1u64 << n).any(|m| x.satisfied_by(&assignment_from_mask(n, m)));
        match r.status {
            Status::Ok => {
                assert!(any);
                assert!(c.satisfied_by(r.assignment.as_ref().unwrap()));
                sat += 1;
            }
            Status::Unsat => {
                assert!(!any, "seed {seed}: solver says unsat");
                unsat += 1;
            }
            Status::Limit => panic!("cap reached at n={n}"),
        }
    }
    assert!(sat > 20 && unsat > 20, "sat {sat}, unsat {unsat}");
}

#[test]
fn uniform_rhs_is_unbiased() {
    let mut ones = [0u32; 22];
    for seed in 0..10_000u64 {
        let x = gen_uniform_rhs_xor(20, 0.1, seed).unwrap();
        for (i, c) in x.clauses.iter().enumerate() {
            ones[i] += u32::from(c.b);
        }
    }
    for o in ones {
        assert!((o as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }
}

#[test]
fn path_rate_and_alive_fraction() {
    let p = path_rate(1000, 1.0 / 3.0, 3);
    assert!((p - 1000f64.powf(-1.0 / 9.0)).abs() < 1e-12);
    assert!((p.powi(3) - 0.1).abs() < 1e-12);
    let rho = sample_restriction(100_000, 3, 1.0 / 3.0, 1000, 9).unwrap();
    let frac = rho.alive_count() as f64 / 1e5;
    assert!((frac - 0.1).abs() < 0.005, "{frac}");
}

#[test]
fn survival_matches_simulation() {
    let (t, d, p) = (50u64, 2u32, 0.5);
    assert!((survival_probability(t, d, p) - (1.0 - 0.75f64.powi(50))).abs() < 1e-15);
    let mut rng = seeded(3);
    let trials = 100_000;
    let hits = (0..trials)
        .filter(|_| (0..t).any(|_| (0..d).all(|_| coin(&mut rng, p))))
        .count();
    assert!((hits as f64 / trials as f64 - survival_probability(t, d, p)).abs() < 0.005);
}

#[test]
fn unfixed_fraction_matches_clause_survival() {
    let (n, d, alpha) = (300, 3, 1.0 / 3.0);
    let mut fracs = Vec::new();
    let mut m = 0;
    for seed in 0..200u64 {
        let x = echolab::instances::gen_balanced_xor(n, 0.1, seed).unwrap();
        m = x.m;
        let rho = sample_restriction(n, d, alpha, x.m, seed + 77).unwrap();
        fracs.push(apply_restriction(&x, &rho).unwrap().unfixed.len() as f64 / x.m as f64);
    }
    let q = path_rate(m, alpha, d).powi(d as i32);
    let want = 1.0 - (1.0 - q).powi(3);
    let s = summarize(&fracs);
    assert!((s.mean - want).abs() <= THRESHOLDS.sigmas * s.sem, "{} vs {want}", s.mean);
}

#[test]
fn rounds_compose_to_one_product_round() {
    // d rounds at p against one round at p^d: two-sample z-test on alive counts
    let (n, d, p) = (64, 3u32, 0.6);
    let draws = 10_000u64;
    let a: Vec<f64> = (0..draws)
        .map(|s| sample_rounds(n, d, p, s).unwrap().alive_count() as f64)
        .collect();
    let b: Vec<f64> = (0..draws)
        .map(|s| product_restriction(n, p.powi(d as i32), s + draws).unwrap().alive_count() as f64)
        .collect();
    let (sa, sb) = (summarize(&a), summarize(&b));
    let z = (sa.mean - sb.mean) / (sa.sem.powi(2) + sb.sem.powi(2)).sqrt();
    assert!(normal_two_sided_p(z) > THRESHOLDS.significance, "z = {z}");
}

#[test]
fn unfixed_scale_drift() {
    let (d, alpha) = (3u32, 1.0 / 3.0);
    let mut ratios = Vec::new();
    for j in 8..=14 {
        let target_m = 1usize << j;
        let n = (target_m as f64 / 1.1).round() as usize;
        let mut c = Vec::new();
        let mut m = 0;
        for seed in 0..20u64 {
            let x = echolab::instances::gen_balanced_xor(n, 0.1, seed).unwrap();
            m = x.m;
            let rho = sample_restriction(n, d, alpha, x.m, seed ^ 0xabc).unwrap();
            c.push(apply_restriction(&x, &rho).unwrap().unfixed.len() as f64);
        }
        ratios.push(summarize(&c).mean / (m as f64).powf(1.0 - alpha));
    }
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!((hi - lo) / hi < 0.25, "{ratios:?}");
}

#[test]
fn live_parity_is_unbiased() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let x: XorInstance = gen_uniform_rhs_xor(10, 0.4, seed).unwrap();
        let rho = product_restriction(10, 0.6, seed).unwrap();
        let r = apply_restriction(&x, &rho).unwrap();
        if let Some(w) = row_kernel_min_weight(&r, 24).unwrap() {
            let bias = live_parity_bias_check(&x, &rho, &w, 100_000, seed).unwrap();
            assert!(bias <= 0.01, "seed {seed}: {bias}");
            assert_eq!(live_parity_bias_check(&x, &rho, &w, 1, seed).unwrap(), 0.5);
            checked += 1;
            if checked == 5 {
                return;
            }
        }
    }
    panic!("too few nontrivial kernels");
}

#[test]
fn stab_matches_correlated_pairs() {
    let mut rng = seeded(11);
    for _ in 0..20 {
        let p = MultilinearPoly::from_coeffs((0..16).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        for rho in [0.2f64, -0.4, 0.9] {
            // Y flips each coordinate of X w.p. (1 − ρ)/2
            let flip: f64 = (1.0 - rho) / 2.0;
            let mut e = 0.0;
            for x in 0..16u64 {
                for f in 0..16u64 {
                    let k = f.count_ones() as i32;
                    let w = flip.powi(k) * (1.0 - flip).powi(4 - k) / 16.0;
                    e += w * p.eval(x) * p.eval(x ^ f);
                }
            }
            assert!((e - p.stab_rho(rho)).abs() < 1e-10);
        }
    }
}

/// Relative density f = 2^W·P[window] for integer window multiplicities.
fn density_poly(counts: &[u32]) -> MultilinearPoly {
    let total: u32 = counts.iter().sum();
    let f: Vec<f64> = counts
        .iter()
        .map(|&c| counts.len() as f64 * c as f64 / total as f64)
        .collect();
    wht(&f).unwrap()
}

fn stream_from_counts(counts: &[u32], w: usize) -> Vec<bool> {
    let mut x = Vec::new();
    for (pat, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            x.extend((0..w).map(|i| pat >> i & 1 == 1));
        }
    }
    x
}

#[test]
fn window_profile_equals_exact_transform() {
    let mut rng = seeded(21);
    for _ in 0..30 {
        let counts: Vec<u32> = (0..16).map(|_| rng.random_range(1..40)).collect();
        let x = stream_from_counts(&counts, 4);
        if x.len() < 64 * 4 {
            continue;
        }
        let f = density_poly(&counts);
        let s = window_spectrum(&x, 2, 4).unwrap();
        for k in 1..=4 {
            assert!((s.cumulative_mass(k) - f.mass_le_k(k)).abs() < 1e-9);
        }
        for rho in [0.1, 0.2, 0.5] {
            let est = stream_stability(&x, rho, 4, 4).unwrap();
            assert!((est - f.stab_rho(rho)).abs() < 1e-6);
        }
    }
}

#[test]
fn sampled_windows_match_transform_within_noise() {
    // i.i.d. windows drawn from a fixed density; plug-in mass is biased by
    // Σ_a (1 − ĉ_a²)/M, the rest is sampling noise
    let weights = [5u32, 1, 1, 3, 1, 8, 2, 1, 1, 2, 6, 1, 4, 1, 1, 2];
    let f = density_poly(&weights);
    let total: u32 = weights.iter().sum();
    let windows = 2000;
    let reps: Vec<Vec<f64>> = (0..200u64)
        .map(|seed| {
            let mut rng = seeded(seed);
            let mut x = Vec::with_capacity(windows * 4);
            for _ in 0..windows {
                let mut u = rng.random_range(0..total);
                let pat = weights.iter().position(|&w| if u < w { true } else { u -= w; false }).unwrap();
                x.extend((0..4).map(|i| pat >> i & 1 == 1));
            }
            let s = window_spectrum(&x, 2, 4).unwrap();
            (1..=4).map(|k| s.cumulative_mass(k)).collect()
        })
        .collect();
    for k in 1..=4 {
        let v: Vec<f64> = reps.iter().map(|r| r[k - 1]).collect();
        let s = summarize(&v);
        let bias: f64 = (1u64..16)
            .filter(|a| a.count_ones() as usize <= k)
            .map(|a| (1.0 - f.coeff(a).powi(2)) / windows as f64)
            .sum();
        let want = f.mass_le_k(k) + bias;
        assert!((s.mean - want).abs() <= 3.0 * s.sem, "k={k}: {} vs {want}", s.mean);
    }
}

#[test]
fn iid_mass_is_at_noise_floor() {
    // each |ĉ_a|² has mean 1/M on unbiased i.i.d. bits
    let windows = 4000;
    let chars_le = |k: usize| -> f64 { (1..=k).map(|j| binom(8, j)).sum() };
    let reps: Vec<Vec<f64>> = (0..60u64)
        .map(|seed| {
            let mut rng = seeded(1000 + seed);
            let x: Vec<bool> = (0..windows * 8).map(|_| fair_bit(&mut rng)).collect();
            let s = window_spectrum(&x, 2, 8).unwrap();
            (1..=6).map(|k| s.cumulative_mass(k)).collect()
        })
        .collect();
    for k in 1..=6 {
        let v: Vec<f64> = reps.iter().map(|r| r[k - 1]).collect();
        let s = summarize(&v);
        let want = chars_le(k) / windows as f64;
        assert!((s.mean - want).abs() <= 3.0 * s.sem, "k={k}: {} vs {want}", s.mean);
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn elias_lengths_match_closed_forms() {
    let mut w = BitWriter::new();
    for u in 1..=1_000_000u64 {
        let l = u.ilog2();
        assert_eq!(elias_gamma_len(u).unwrap(), 2 * l + 1);
        assert_eq!(elias_delta_len(u).unwrap(), l + 2 * (l + 1).ilog2() + 1);
        if u % 997 == 1 {
            let before = w.len();
            w.write_delta(u).unwrap();
            assert_eq!((w.len() - before) as u32, elias_delta_len(u).unwrap());
        }
    }
    assert_eq!(elias_delta_len(17).unwrap(), 9);
    assert!(elias_gamma_len(0).is_err() && elias_delta_len(0).is_err());
}

#[test]
fn lz78_matches_reference_on_structured_streams() {
    let mut rng = seeded(8);
    let mut streams: Vec<Vec<bool>> = vec![vec![], vec![false; 64], vec![true; 1000]];
    for len in [1usize, 2, 3, 7, 100, 4096] {
        streams.push((0..len).map(|i| i % 2 == 0).collect());
        streams.push((0..len).map(|i| (i / 3) % 2 == 1).collect());
    }
    while streams.len() < 1000 {
        let len = rng.random_range(0..2000);
        let bias = rng.random_range(0.0..1.0);
        streams.push((0..len).map(|_| coin(&mut rng, bias)).collect());
    }
    for x in &streams {
        for cfg in [Lz78Config::UNIFORM, Lz78Config::VLC] {
            assert_eq!(lz78_cost(x, &cfg), lz78_reference(x, &cfg));
        }
    }
    assert_eq!(lz78_cost(&[], &Lz78Config::UNIFORM), 0);
}

#[test]
fn kgram_loss_reference_points() {
    let mut rng = seeded(2);
    let x: Vec<bool> = (0..100_000).map(|_| fair_bit(&mut rng)).collect();
    let l = kgram_logloss(&x, 0).unwrap();
    assert!((0.99..=1.01).contains(&l));
    assert!(kgram_logloss(&vec![true; 1000], 0).unwrap() < 0.02);
    let alt: Vec<bool> = (0..20_000).map(|i| i % 2 == 0).collect();
    assert!(kgram_logloss(&alt, 1).unwrap() < 0.001);
}

#[test]
fn pearson_of_independent_columns() {
    let mut rng = seeded(4);
    let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    let ys: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    assert!(pearson_r(&xs, &ys).unwrap().abs() <= 0.03);
}
