//! Hypergeometric tails and their concentration bounds, Pearson correlation
//! and small aggregation helpers.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Population m with K marked items, sample of size s without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypergeoSpec {
    pub m: u64,
    pub k: u64,
    pub s: u64,
}

impl HypergeoSpec {
    pub fn new(m: u64, k: u64, s: u64) -> Result<Self> {
        if k > m || s > m {
            return Err(invalid(format!("invalid hypergeometric spec m={m} K={k} s={s}")));
        }
        Ok(HypergeoSpec { m, k, s })
    }

    pub fn support(&self) -> std::ops::RangeInclusive<u64> {
        self.s.saturating_sub(self.m - self.k)..=self.s.min(self.k)
    }

    pub fn mean(&self) -> f64 {
        self.s as f64 * self.k as f64 / self.m as f64
    }

    /// Marked fraction K/m.
    pub fn p(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

/// Probabilities over `spec.support()`, built from the ratio recurrence in
/// log space and normalized, which stays accurate for populations where
/// differences of ln Γ lose digits.
pub fn hypergeo_pmf_table(spec: &HypergeoSpec) -> Vec<f64> {
    let HypergeoSpec { m, k, s } = *spec;
    let lo = *spec.support().start();
    let hi = *spec.support().end();
    let mut logs = Vec::with_capacity((hi - lo + 1) as usize);
    let mut acc = 0.0f64;
    logs.push(0.0);
    for h in lo..hi {
        let num = (k - h) as f64 * (s - h) as f64;
        let den = (h + 1) as f64 * (m - k + h + 1 - s) as f64;
        acc += (num / den).ln();
        logs.push(acc);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

pub fn hypergeo_pmf(spec: &HypergeoSpec, h: u64) -> f64 {
    if !spec.support().contains(&h) {
        return 0.0;
    }
    hypergeo_pmf_table(spec)[(h - spec.support().start()) as usize]
}

fn tail_where(spec: &HypergeoSpec, keep: impl Fn(u64) -> bool) -> f64 {
    let lo = *spec.support().start();
    hypergeo_pmf_table(spec)
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(lo + *i as u64))
        .map(|(_, p)| p)
        .fold(0.0, |a, p| a + p)
        .min(1.0)
}

/// Pr[|H − EH| ≥ εs].
pub fn two_sided_tail(spec: &HypergeoSpec, eps: f64) -> f64 {
    let mu = spec.mean();
    let t = eps * spec.s as f64;
    tail_where(spec, |h| (h as f64 - mu).abs() >= t - 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// Pr[H ≥ (p+ε)s] or Pr[H ≤ (p−ε)s].
pub fn one_sided_tail(spec: &HypergeoSpec, eps: f64, side: Side) -> f64 {
    let s = spec.s as f64;
    let p = spec.p();
    tail_where(spec, |h| match side {
        Side::Upper => h as f64 >= (p + eps) * s - 1e-12,
        Side::Lower => h as f64 <= (p - eps) * s + 1e-12,
    })
}

pub fn serfling_bound(spec: &HypergeoSpec, eps: f64) -> f64 {
    let (m, s) = (spec.m as f64, spec.s as f64);
    2.0 * (-2.0 * eps * eps * s * m / (m - s + 1.0)).exp()
}

pub fn hoeffding_bound(spec: &HypergeoSpec, eps: f64) -> f64 {
    2.0 * (-2.0 * eps * eps * spec.s as f64).exp()
}

/// Binary KL divergence D(a‖p) in nats.
pub fn kl_bernoulli(a: f64, p: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    term(a, p) + term(1.0 - a, 1.0 - p)
}

pub fn chvatal_bound(spec: &HypergeoSpec, eps: f64, side: Side) -> Result<f64> {
    let p = spec.p();
    let ok = match side {
        Side::Upper => eps > 0.0 && eps < 1.0 - p,
        Side::Lower => eps > 0.0 && eps < p,
    };
    if !ok {
        return Err(invalid(format!("eps={eps} outside the range for p={p} ({side:?})")));
    }
    let a = match side {
        Side::Upper => p + eps,
        Side::Lower => p - eps,
    };
    Ok((-(spec.s as f64) * kl_bernoulli(a, p)).exp())
}

pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for fewer than two values.
    pub sd: f64,
    pub sem: f64,
}

pub fn summarize(v: &[f64]) -> Summary {
    let count = v.len();
    if count == 0 {
        return Summary {
            count,
            mean: 0.0,
            sd: 0.0,
            sem: 0.0,
        };
    }
    let mean = v.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    Summary {
        count,
        mean,
        sd,
        sem: sd / (count as f64).sqrt(),
    }
}

/// Total variation distance between two empirical samples.
pub fn empirical_tv<K: Hash + Eq>(a: &[K], b: &[K]) -> f64 {
    let mut mass: HashMap<&K, (f64, f64)> = HashMap::new();
    let (wa, wb) = (1.0 / a.len() as f64, 1.0 / b.len() as f64);
    for k in a {
        mass.entry(k).or_default().0 += wa;
    }
    for k in b {
        mass.entry(k).or_default().1 += wb;
    }
    0.5 * mass.values().map(|(p, q)| (p - q).abs()).sum::<f64>()
}

/// Two-sided normal tail Pr[|Z| ≥ z].
pub fn normal_two_sided_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}
