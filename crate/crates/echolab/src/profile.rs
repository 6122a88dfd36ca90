//! Multimode structure profile of a bitstream: empirical mod-q character
//! mass of its non-overlapping windows and spectral noise stability.
//!
//! Window w (bits b_0..b_{W−1}, b_i at stream offset i) gives the sample
//! ω_q^{⟨a,b⟩}; ĉ_a is the average over windows. For q = 2 these are the
//! Fourier coefficients of the relative density 2^W·P[window = x].

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sources::SourceSpec;
use crate::stats::pearson_r;

pub const DEFAULT_WINDOW: usize = 8;
pub const MIN_WINDOWS: usize = 64;
/// Largest q^W table the spectrum is computed on.
const MAX_TABLE: usize = 1 << 22;

/// Per-level sums Σ_{|supp a| = j} |ĉ_a|² for j = 0..=window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSpectrum {
    pub q: u32,
    pub window: usize,
    pub windows: usize,
    pub levels: Vec<f64>,
}

impl WindowSpectrum {
    /// Σ_{1≤|supp a|≤k} |ĉ_a|².
    pub fn cumulative_mass(&self, k: usize) -> f64 {
        self.levels[1..=k.min(self.window)].iter().fold(0.0, |a, v| a + v)
    }

    pub fn stability(&self, rho: f64, kmax: usize) -> f64 {
        self.levels[..=kmax.min(self.window)]
            .iter()
            .enumerate()
            .map(|(j, v)| rho.powi(j as i32) * v)
            .sum()
    }
}

fn check_stream(x: &[bool], window: usize) -> Result<()> {
    if window == 0 {
        return Err(invalid("window must be positive"));
    }
    if x.len() < MIN_WINDOWS * window {
        return Err(Error::InsufficientData(format!(
            "stream of {} bits is shorter than {} windows of {window}",
            x.len(),
            MIN_WINDOWS
        )));
    }
    Ok(())
}

pub fn window_spectrum(x: &[bool], q: u32, window: usize) -> Result<WindowSpectrum> {
    check_stream(x, window)?;
    if !(2..=7).contains(&q) {
        return Err(invalid(format!("q must lie in 2..=7, got {q}")));
    }
    let size = (q as usize)
        .checked_pow(window as u32)
        .filter(|&s| s <= MAX_TABLE)
        .ok_or(Error::SizeExceeded {
            got: window,
            limit: (MAX_TABLE as f64).log(q as f64) as usize,
        })?;
    let qq = q as usize;
    let windows = x.len() / window;
    // bit i of a window sits at digit i of the Z_q^W index
    let mut pow = vec![1usize; window];
    for i in 1..window {
        pow[i] = pow[i - 1] * qq;
    }
    let mut re = vec![0.0f64; size];
    let mut im = vec![0.0f64; size];
    let w = 1.0 / windows as f64;
    for chunk in x.chunks_exact(window) {
        let idx: usize = chunk
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| pow[i])
            .sum();
        re[idx] += w;
    }
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..qq)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / q as f64;
            (t.cos(), t.sin())
        })
        .unzip();
    // length-q DFT along every axis
    let mut buf_re = vec![0.0; qq];
    let mut buf_im = vec![0.0; qq];
    for &stride in &pow {
        for base in 0..size {
            if (base / stride) % qq != 0 {
                continue;
            }
            for a in 0..qq {
                let (mut sr, mut si) = (0.0, 0.0);
                for b in 0..qq {
                    let e = (a * b) % qq;
                    let (vr, vi) = (re[base + b * stride], im[base + b * stride]);
                    sr += vr * cos[e] - vi * sin[e];
                    si += vr * sin[e] + vi * cos[e];
                }
                buf_re[a] = sr;
                buf_im[a] = si;
            }
            for a in 0..qq {
                re[base + a * stride] = buf_re[a];
                im[base + a * stride] = buf_im[a];
            }
        }
    }
    let mut levels = vec![0.0; window + 1];
    for idx in 0..size {
        let mut supp = 0;
        let mut r = idx;
        while r > 0 {
            supp += usize::from(r % qq != 0);
            r /= qq;
        }
        levels[supp] += re[idx] * re[idx] + im[idx] * im[idx];
    }
    Ok(WindowSpectrum {
        q,
        window,
        windows,
        levels,
    })
}

/// Cumulative mass for k = 1..=kmax.
pub fn modq_mass_profile(x: &[bool], q: u32, kmax: usize, window: usize) -> Result<Vec<f64>> {
    if kmax > window {
        return Err(invalid(format!("kmax {kmax} exceeds window {window}")));
    }
    let s = window_spectrum(x, q, window)?;
    Ok((1..=kmax).map(|k| s.cumulative_mass(k)).collect())
}

/// Σ_{|a|≤kmax} ρ^{|a|} |ĉ_a|² over the q = 2 characters, ∅ included.
pub fn stream_stability(x: &[bool], rho: f64, kmax: usize, window: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [-1,1], got {rho}")));
    }
    if kmax > window {
        return Err(invalid(format!("kmax {kmax} exceeds window {window}")));
    }
    Ok(window_spectrum(x, 2, window)?.stability(rho, kmax))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRow {
    pub context: String,
    pub n: usize,
    pub seed: u64,
    pub q: u32,
    pub k: usize,
    pub degree_cap: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabRow {
    pub context: String,
    pub n: usize,
    pub seed: u64,
    pub rho: f64,
    pub metric: String,
    pub value: f64,
}

pub const MASS_METRIC: &str = "mass_cum";
pub const STAB_METRIC: &str = "stab";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileConfig {
    pub qs: Vec<u32>,
    pub kmax_values: Vec<usize>,
    pub rhos: Vec<f64>,
    pub window: usize,
}

/// Profiles the same streams the PCG runs use, so rows join on
/// (context, n, seed). Stability uses the largest degree cap.
pub fn profile_experiment(
    ns: &[usize],
    seeds: u64,
    seed_base: u64,
    source: &SourceSpec,
    cfg: &ProfileConfig,
) -> Result<(Vec<MassRow>, Vec<StabRow>)> {
    use rayon::prelude::*;
    let cap_max = *cfg
        .kmax_values
        .iter()
        .max()
        .ok_or_else(|| invalid("kmax_values is empty"))?;
    if cap_max > cfg.window {
        return Err(invalid("degree cap exceeds window"));
    }
    let context = source.mode().as_str().to_string();
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |i| (n, seed_base + i)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let s = source.generate(n, seed)?;
            let mut mass = Vec::new();
            let mut stab = Vec::new();
            for &q in &cfg.qs {
                let spec = window_spectrum(&s.x, q, cfg.window)?;
                for &cap in &cfg.kmax_values {
                    for k in 1..=cap {
                        mass.push(MassRow {
                            context: context.clone(),
                            n,
                            seed,
                            q,
                            k,
                            degree_cap: cap,
                            metric: MASS_METRIC.into(),
                            value: spec.cumulative_mass(k),
                        });
                    }
                }
            }
            let spec2 = window_spectrum(&s.x, 2, cfg.window)?;
            for &rho in &cfg.rhos {
                stab.push(StabRow {
                    context: context.clone(),
                    n,
                    seed,
                    rho,
                    metric: STAB_METRIC.into(),
                    value: spec2.stability(rho, cap_max),
                });
            }
            Ok((mass, stab))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut mass, mut stab) = (Vec::new(), Vec::new());
    for (m, s) in parts {
        mass.extend(m);
        stab.extend(s);
    }
    Ok((mass, stab))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrRow {
    pub metric: String,
    pub param: String,
    pub r: f64,
    pub count: usize,
}

pub type JoinKey = (String, usize, u64);

/// Pearson r between a per-(context, n, seed) PCG value and every profile
/// series. Mass series are keyed by (q, k) at the largest degree cap seen.
/// Series whose correlation is undefined are skipped.
pub fn corr_with_pcg(
    pcg: &HashMap<JoinKey, f64>,
    mass: &[MassRow],
    stab: &[StabRow],
) -> Result<Vec<CorrRow>> {
    let mut series: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    let mut cap: HashMap<u32, usize> = HashMap::new();
    for r in mass {
        let c = cap.entry(r.q).or_insert(0);
        *c = (*c).max(r.degree_cap);
    }
    for r in mass {
        if r.degree_cap != cap[&r.q] {
            continue;
        }
        if let Some(&p) = pcg.get(&(r.context.clone(), r.n, r.seed)) {
            series
                .entry((r.metric.clone(), format!("q{}_k{}", r.q, r.k)))
                .or_default()
                .push((p, r.value));
        }
    }
    for r in stab {
        if let Some(&p) = pcg.get(&(r.context.clone(), r.n, r.seed)) {
            series
                .entry((r.metric.clone(), format!("{}", r.rho)))
                .or_default()
                .push((p, r.value));
        }
    }
    if series.is_empty() {
        return Err(Error::InsufficientData("no profile row joins a PCG row".into()));
    }
    let mut out = Vec::new();
    for ((metric, param), pts) in series {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        match pearson_r(&xs, &ys) {
            Ok(r) => out.push(CorrRow {
                metric,
                param,
                r,
                count: xs.len(),
            }),
            Err(e) => log::warn!("skipping {metric}/{param}: {e}"),
        }
    }
    Ok(out)
}
