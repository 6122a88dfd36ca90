//! Random restrictions along a d-round path, restricted 3XOR systems and the
//! minimum dependency weight of the surviving rows.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::instances::XorInstance;
use crate::rng::{coin, fair_bit, seeded, substream};

/// Fixed test levels for the statistical checks on restrictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub sigmas: f64,
    pub significance: f64,
}

pub const THRESHOLDS: Thresholds = Thresholds {
    sigmas: 3.0,
    significance: 1e-3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarState {
    Alive,
    Fixed(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub status: Vec<VarState>,
    pub d: u32,
    pub p: f64,
    pub seed: u64,
}

impl Restriction {
    pub fn n(&self) -> usize {
        self.status.len()
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.status[v] == VarState::Alive
    }

    pub fn alive_count(&self) -> usize {
        self.status.iter().filter(|s| **s == VarState::Alive).count()
    }

    /// Composed survival rate p^d.
    pub fn survival(&self) -> f64 {
        self.p.powi(self.d as i32)
    }

    pub fn all_alive(n: usize) -> Self {
        Restriction {
            status: vec![VarState::Alive; n],
            d: 1,
            p: 1.0,
            seed: 0,
        }
    }

    pub fn fixed_to(values: &[bool]) -> Self {
        Restriction {
            status: values.iter().map(|&b| VarState::Fixed(b)).collect(),
            d: 1,
            p: 0.0,
            seed: 0,
        }
    }
}

/// Per-round rate of the path: m^(-alpha/d), so that m·p^d = m^(1-alpha).
pub fn path_rate(m: usize, alpha: f64, d: u32) -> f64 {
    (m as f64).powf(-alpha / d as f64)
}

/// d explicit rounds at rate p. Every variable consumes d survival coins and
/// one value bit, so the stream layout does not depend on outcomes.
pub fn sample_rounds(n: usize, d: u32, p: f64, seed: u64) -> Result<Restriction> {
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("rate must lie in [0,1], got {p}")));
    }
    let mut rng = seeded(seed);
    let status = (0..n)
        .map(|_| {
            let mut alive = true;
            for _ in 0..d {
                alive &= coin(&mut rng, p);
            }
            let bit = fair_bit(&mut rng);
            if alive {
                VarState::Alive
            } else {
                VarState::Fixed(bit)
            }
        })
        .collect();
    Ok(Restriction { status, d, p, seed })
}

pub fn sample_restriction(n: usize, d: u32, alpha: f64, m: usize, seed: u64) -> Result<Restriction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if m < 2 {
        return Err(invalid("m must be at least 2"));
    }
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    sample_rounds(n, d, path_rate(m, alpha, d), seed)
}

/// Single product restriction keeping each variable with probability s.
pub fn product_restriction(n: usize, s: f64, seed: u64) -> Result<Restriction> {
    sample_rounds(n, 1, s, seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedClause {
    /// Index into the base instance's clause list.
    pub clause: usize,
    pub alive: Vec<usize>,
    /// b xor the fixed part of the clause.
    pub b: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedXor {
    pub base: XorInstance,
    pub rho: Restriction,
    pub unfixed: Vec<ReducedClause>,
    pub alive_vars: Vec<usize>,
    /// For every clause outside C: whether its constant value satisfies it.
    pub constants: Vec<(usize, bool)>,
}

impl RestrictedXor {
    pub fn unfixed_indices(&self) -> Vec<usize> {
        self.unfixed.iter().map(|r| r.clause).collect()
    }
}

pub fn apply_restriction(x: &XorInstance, rho: &Restriction) -> Result<RestrictedXor> {
    if rho.n() != x.n {
        return Err(Error::LengthMismatch {
            expected: x.n,
            got: rho.n(),
        });
    }
    let mut unfixed = Vec::new();
    let mut constants = Vec::new();
    for (ci, c) in x.clauses.iter().enumerate() {
        let mut alive = Vec::new();
        let mut b = c.b;
        for &v in &c.vars {
            match rho.status[v] {
                VarState::Alive => alive.push(v),
                VarState::Fixed(bit) => b ^= bit,
            }
        }
        if alive.is_empty() {
            // parity of the fixed values equals b exactly when b' = 0
            constants.push((ci, !b));
        } else {
            unfixed.push(ReducedClause {
                clause: ci,
                alive,
                b,
            });
        }
    }
    let alive_vars = (0..x.n).filter(|&v| rho.is_alive(v)).collect();
    Ok(RestrictedXor {
        base: x.clone(),
        rho: rho.clone(),
        unfixed,
        alive_vars,
        constants,
    })
}

/// 1 − (1 − p^d)^t, evaluated through log1p/expm1.
pub fn survival_probability(t_star: u64, d: u32, p: f64) -> f64 {
    if t_star == 0 {
        return 0.0;
    }
    let q = p.powi(d as i32);
    if q >= 1.0 {
        return 1.0;
    }
    -(t_star as f64 * (-q).ln_1p()).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelWitness {
    pub weight: usize,
    /// Clause indices of the base instance.
    pub support: Vec<usize>,
}

pub const MAX_KERNEL_ROWS: usize = 24;

/// Reduced rows of C as bitmasks over the alive columns that occur in C.
pub(crate) fn reduced_row_masks(x: &RestrictedXor) -> Vec<u128> {
    let mut cols: Vec<usize> = x.unfixed.iter().flat_map(|r| r.alive.iter().copied()).collect();
    cols.sort_unstable();
    cols.dedup();
    x.unfixed
        .iter()
        .map(|r| {
            r.alive.iter().fold(0u128, |acc, v| {
                acc | 1u128 << cols.binary_search(v).expect("column present")
            })
        })
        .collect()
}

/// Smallest nonzero μ over C with μᵀA_C = 0 on the alive columns, by
/// weight-ascending exhaustive search.
pub fn row_kernel_min_weight(x: &RestrictedXor, max_rows: usize) -> Result<Option<KernelWitness>> {
    let k = x.unfixed.len();
    if max_rows > MAX_KERNEL_ROWS {
        return Err(Error::SizeExceeded {
            got: max_rows,
            limit: MAX_KERNEL_ROWS,
        });
    }
    if k > max_rows {
        return Err(Error::SizeExceeded {
            got: k,
            limit: max_rows,
        });
    }
    let rows = reduced_row_masks(x);
    for w in 1..=k {
        let mut comb: u32 = (1u32 << w) - 1;
        let limit: u64 = 1u64 << k;
        while (comb as u64) < limit {
            let mut acc = 0u128;
            let mut bits = comb;
            while bits != 0 {
                acc ^= rows[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            if acc == 0 {
                let support = (0..k)
                    .filter(|i| comb >> i & 1 == 1)
                    .map(|i| x.unfixed[i].clause)
                    .collect();
                return Ok(Some(KernelWitness { weight: w, support }));
            }
            // next combination with the same popcount
            let c = comb & comb.wrapping_neg();
            let r = comb.wrapping_add(c);
            if r == 0 {
                break;
            }
            comb = (((r ^ comb) >> 2) / c) | r;
        }
    }
    Ok(None)
}

/// Resamples the whole RHS uniformly `samples` times for the fixed (A, ρ)
/// and returns |mean parity of b' over supp(μ) − 1/2|.
pub fn live_parity_bias_check(
    x: &XorInstance,
    rho: &Restriction,
    mu: &KernelWitness,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    if mu.support.is_empty() {
        return Err(invalid("kernel witness has empty support"));
    }
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    if rho.n() != x.n {
        return Err(Error::LengthMismatch {
            expected: x.n,
            got: rho.n(),
        });
    }
    let fixed_part: bool = mu
        .support
        .iter()
        .flat_map(|&ci| x.clauses[ci].vars)
        .filter_map(|v| match rho.status[v] {
            VarState::Fixed(b) => Some(b),
            VarState::Alive => None,
        })
        .fold(false, |a, b| a ^ b);
    let mut rng = substream(seed, 0x5eed);
    let mut sorted = mu.support.clone();
    sorted.sort_unstable();
    let mut ones = 0u64;
    for _ in 0..samples {
        // every clause gets a fresh bit; only the support matters for μᵀb
        let mut par = fixed_part;
        let mut next = 0usize;
        for ci in 0..x.clauses.len() {
            let bit = fair_bit(&mut rng);
            if next < sorted.len() && sorted[next] == ci {
                par ^= bit;
                next += 1;
            }
        }
        ones += u64::from(par);
    }
    Ok((ones as f64 / samples as f64 - 0.5).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionRow {
    pub n: usize,
    pub m: usize,
    pub d: u32,
    pub alpha: f64,
    pub p: f64,
    pub seed: u64,
    pub alive_vars: usize,
    pub unfixed_clauses: usize,
    /// None when the kernel is trivial or C is too large to search.
    pub min_kernel_weight: Option<usize>,
}

/// One row per (n, seed) on planted instances; the kernel search is skipped
/// when |C| exceeds `max_rows`.
pub fn restriction_experiment(
    ns: &[usize],
    seeds: u64,
    seed_base: u64,
    gamma: f64,
    d: u32,
    alpha: f64,
    max_rows: usize,
) -> Result<Vec<RestrictionRow>> {
    use rayon::prelude::*;
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |i| (n, seed_base + i)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let x = crate::instances::gen_balanced_xor(n, gamma, seed)?;
            let rho = sample_restriction(n, d, alpha, x.m, rand::Rng::random::<u64>(&mut substream(seed, 1)))?;
            let r = apply_restriction(&x, &rho)?;
            let w = if r.unfixed.len() <= max_rows {
                row_kernel_min_weight(&r, max_rows)?.map(|k| k.weight)
            } else {
                None
            };
            Ok(RestrictionRow {
                n,
                m: x.m,
                d,
                alpha,
                p: rho.p,
                seed,
                alive_vars: r.alive_vars.len(),
                unfixed_clauses: r.unfixed.len(),
                min_kernel_weight: w,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}
