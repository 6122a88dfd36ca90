//! Exact multilinear Fourier analysis on the {±1} cube.
//!
//! Bit inputs map to the cube by x' = (−1)^x, so bit i of an input mask is
//! coordinate i and χ_S(x) = (−1)^{|S ∩ x|}.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::restrictions::{Restriction, VarState};

pub const MAX_ARITY: usize = 20;

/// Dense Fourier coefficients indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilinearPoly {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

#[inline]
pub fn chi(s: u64, x: u64) -> f64 {
    if (s & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly.
fn butterfly(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_mut(2 * h) {
            let (a, b) = chunk.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (u, w) = (*x, *y);
                *x = u + w;
                *y = u - w;
            }
        }
        h *= 2;
    }
}

fn arity_of(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(invalid(format!("length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_ARITY {
        return Err(Error::SizeExceeded {
            got: n,
            limit: MAX_ARITY,
        });
    }
    Ok(n)
}

/// Fourier coefficients of the function with `values[x] = f(x)`.
pub fn wht(values: &[f64]) -> Result<MultilinearPoly> {
    let n = arity_of(values.len())?;
    let mut coeffs = values.to_vec();
    butterfly(&mut coeffs);
    let scale = 1.0 / values.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(MultilinearPoly { n, coeffs })
}

impl MultilinearPoly {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        let n = arity_of(coeffs.len())?;
        Ok(MultilinearPoly { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        MultilinearPoly {
            n,
            coeffs: vec![0.0; 1 << n],
        }
    }

    pub fn character(n: usize, s: u64) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[s as usize] = 1.0;
        p
    }

    pub fn coeff(&self, s: u64) -> f64 {
        self.coeffs[s as usize]
    }

    /// Table of values over all 2^n inputs.
    pub fn values(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        butterfly(&mut v);
        v
    }

    pub fn eval(&self, x: u64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| c * chi(s as u64, x))
            .sum()
    }

    fn level_sum(&self, lo: u32, hi: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| (lo..=hi).contains(&s.count_ones()))
            .map(|(_, c)| c * c)
            .sum()
    }

    /// Σ_{1≤|S|≤k} coeff(S)².
    pub fn mass_le_k(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.level_sum(1, k as u32)
    }

    /// Σ_{|S|≤k} coeff(S)², level 0 included.
    pub fn mass_le_k_with_empty(&self, k: usize) -> f64 {
        self.level_sum(0, k as u32)
    }

    pub fn stab_rho(&self, rho: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| rho.powi(s.count_ones() as i32) * c * c)
            .sum()
    }

    /// Largest |S| with |coeff(S)| > tol.
    pub fn degree_tol(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.degree_tol(1e-12)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// y = A x ⊕ r over GF(2); row i of A is a bitmask over the n inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub n: usize,
    pub rows: Vec<u64>,
    pub offset: u64,
}

impl AffineMap {
    pub fn new(n: usize, rows: Vec<u64>, offset: u64) -> Result<Self> {
        if n > 63 || rows.len() > 63 {
            return Err(invalid("affine maps are limited to 63 inputs and outputs"));
        }
        if rows.iter().any(|r| r >> n != 0) {
            return Err(invalid("row mask exceeds input arity"));
        }
        if offset >> rows.len() != 0 {
            return Err(invalid("offset exceeds output arity"));
        }
        Ok(AffineMap { n, rows, offset })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn delta(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn is_permutation(&self) -> bool {
        self.m() == self.n
            && self.rows.iter().all(|r| r.count_ones() == 1)
            && self.rows.iter().fold(0u64, |a, r| a | r).count_ones() as usize == self.n
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(self.offset, |y, (i, r)| y ^ (u64::from((r & x).count_ones() % 2 == 1) << i))
    }

    /// J(S): symmetric difference of the row supports indexed by S.
    pub fn j(&self, s: u64) -> u64 {
        let mut acc = 0;
        let mut bits = s;
        while bits != 0 {
            acc ^= self.rows[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    /// M_k = max over |U| ≤ k of #{S : J(S) = U}.
    pub fn collision_multiplicity(&self, k: usize) -> usize {
        let mut count = std::collections::HashMap::new();
        for s in 0..1u64 << self.m() {
            let u = self.j(s);
            if u.count_ones() as usize <= k {
                *count.entry(u).or_insert(0usize) += 1;
            }
        }
        count.into_values().max().unwrap_or(0)
    }
}

/// q with q(x) = p(T(x)): coeff_q(U) = Σ_{J(S)=U} (−1)^{⟨S,r⟩} coeff_p(S).
pub fn affine_pullback(p: &MultilinearPoly, t: &AffineMap) -> Result<MultilinearPoly> {
    if p.n != t.m() {
        return Err(Error::LengthMismatch {
            expected: t.m(),
            got: p.n,
        });
    }
    if t.n > MAX_ARITY {
        return Err(Error::SizeExceeded {
            got: t.n,
            limit: MAX_ARITY,
        });
    }
    let mut q = MultilinearPoly::zero(t.n);
    for (s, &c) in p.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let s = s as u64;
        q.coeffs[t.j(s) as usize] += chi(s, t.offset) * c;
    }
    Ok(q)
}

/// Substitutes the fixed coordinates of ρ; alive coordinates keep their
/// index, so the result has the same arity.
pub fn restrict_poly(p: &MultilinearPoly, rho: &Restriction) -> Result<MultilinearPoly> {
    if rho.n() != p.n {
        return Err(Error::LengthMismatch {
            expected: p.n,
            got: rho.n(),
        });
    }
    let mut alive = 0u64;
    let mut ones = 0u64;
    for (i, st) in rho.status.iter().enumerate() {
        match st {
            VarState::Alive => alive |= 1 << i,
            VarState::Fixed(true) => ones |= 1 << i,
            VarState::Fixed(false) => {}
        }
    }
    Ok(restrict_masks(p, alive, ones))
}

/// Same as [`restrict_poly`] with ρ given as an alive mask and the mask of
/// coordinates fixed to bit 1.
pub fn restrict_masks(p: &MultilinearPoly, alive: u64, ones: u64) -> MultilinearPoly {
    let mut out = MultilinearPoly::zero(p.n);
    for (u, &c) in p.coeffs.iter().enumerate() {
        let u = u as u64;
        let fixed_part = u & !alive;
        out.coeffs[(u & alive) as usize] += chi(fixed_part, ones) * c;
    }
    out
}

/// Probability that Bin(t, s) ≤ d.
pub fn binomial_cdf(t: usize, s: f64, d: usize) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=t.min(d) {
        if j > 0 {
            binom = binom * (t - j + 1) as f64 / j as f64;
        }
        total += binom * s.powi(j as i32) * (1.0 - s).powi((t - j) as i32);
    }
    total.min(1.0)
}

/// Exact E_ρ|⟨p|ρ, χ_U(ρ)⟩| with U(ρ) the alive part of the first `t_star`
/// coordinates, against ‖p‖₂·Pr[|U| ≤ deg p]^{1/2}.
pub fn rand_index_parity_bound_check(p: &MultilinearPoly, t_star: usize, s: f64) -> Result<(f64, f64)> {
    if p.n > 8 {
        return Err(Error::SizeExceeded { got: p.n, limit: 8 });
    }
    if t_star > p.n {
        return Err(invalid("t_star exceeds arity"));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid("survival rate must lie in [0,1]"));
    }
    let n = p.n;
    let full = (1u64 << n) - 1;
    let parity = (1u64 << t_star) - 1;
    let mut lhs = 0.0;
    for alive in 0..=full {
        let k = alive.count_ones() as i32;
        let w_alive = s.powi(k) * (1.0 - s).powi(n as i32 - k);
        if w_alive == 0.0 {
            continue;
        }
        let dead = full & !alive;
        let n_dead = dead.count_ones();
        let w_fix = 1.0 / (1u64 << n_dead) as f64;
        // enumerate the submasks of the dead set as the coordinates fixed to 1
        let mut ones = dead;
        loop {
            let r = restrict_masks(p, alive, ones);
            lhs += w_alive * w_fix * r.coeff(alive & parity).abs();
            if ones == 0 {
                break;
            }
            ones = (ones - 1) & dead;
        }
    }
    let rhs = p.l2_norm() * binomial_cdf(t_star, s, p.degree()).sqrt();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn random_poly(n: usize, seed: u64) -> MultilinearPoly {
        let mut r = seeded(seed);
        MultilinearPoly::from_coeffs((0..1 << n).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn constant_and_character() {
        let p = wht(&[1.0; 8]).unwrap();
        assert_eq!(p.coeff(0), 1.0);
        assert!(p.coeffs[1..].iter().all(|c| *c == 0.0));
        let vals: Vec<f64> = (0..16).map(|x| chi(0b0110, x)).collect();
        let q = wht(&vals).unwrap();
        assert_eq!(q.coeff(0b0110), 1.0);
        assert_eq!(q.l2_norm(), 1.0);
    }

    #[test]
    fn round_trip() {
        let mut r = seeded(4);
        let vals: Vec<f64> = (0..64).map(|_| r.random_range(-3.0..3.0)).collect();
        let back = wht(&vals).unwrap().values();
        let err = vals.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10);
    }

    #[test]
    fn rejects_bad_length() {
        assert!(wht(&[1.0; 6]).is_err());
        assert!(wht(&[]).is_err());
    }

    #[test]
    fn mass_examples() {
        let c = MultilinearPoly::character(3, 0b011);
        assert_eq!(c.mass_le_k(1), 0.0);
        assert_eq!(c.mass_le_k(2), 1.0);
        let dictator = MultilinearPoly::character(3, 0b001);
        assert_eq!(dictator.mass_le_k(1), 1.0);
        let mut p = MultilinearPoly::zero(2);
        p.coeffs = vec![0.5, 0.5, 0.5, 0.5];
        assert_eq!(p.mass_le_k(2), 0.75);
        assert_eq!(p.mass_le_k_with_empty(2), 1.0);
        assert_eq!(p.mass_le_k(0), 0.0);
    }

    #[test]
    fn stab_endpoints() {
        let p = random_poly(5, 1);
        let mean_sq = p.values().iter().map(|v| v * v).sum::<f64>() / 32.0;
        assert!((p.stab_rho(1.0) - mean_sq).abs() < 1e-12);
        assert!((p.stab_rho(0.0) - p.coeff(0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn eval_matches_values() {
        let p = random_poly(4, 9);
        let v = p.values();
        for x in 0..16 {
            assert!((p.eval(x) - v[x as usize]).abs() < 1e-12);
        }
    }

    #[test]
    fn pullback_composes() {
        let t = AffineMap::new(4, vec![0b0011, 0b0110, 0b1000], 0b101).unwrap();
        assert_eq!(t.delta(), 2);
        assert!(!t.is_permutation());
        let p = random_poly(3, 2);
        let q = affine_pullback(&p, &t).unwrap();
        for x in 0..16 {
            assert!((q.eval(x) - p.eval(t.apply(x))).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_flag() {
        assert!(AffineMap::new(3, vec![0b010, 0b100, 0b001], 0).unwrap().is_permutation());
        assert!(!AffineMap::new(3, vec![0b010, 0b010, 0b001], 0).unwrap().is_permutation());
        assert!(AffineMap::new(2, vec![0b100], 0).is_err());
    }

    #[test]
    fn collision_count_for_repeated_rows() {
        // rows 0 and 1 coincide, so S={0,1} and S=∅ both map to U=∅
        let t = AffineMap::new(2, vec![0b01, 0b01, 0b10], 0).unwrap();
        assert_eq!(t.collision_multiplicity(0), 2);
        assert_eq!(t.collision_multiplicity(2), 2);
    }

    #[test]
    fn restrict_all_alive_is_identity() {
        let p = random_poly(4, 5);
        assert_eq!(restrict_poly(&p, &Restriction::all_alive(4)).unwrap(), p);
    }

    #[test]
    fn restrict_fixes_values() {
        let p = random_poly(3, 6);
        // fix x2 to bit 1, i.e. x2' = −1
        let r = restrict_masks(&p, 0b011, 0b100);
        for x in 0..4u64 {
            assert!((r.eval(x) - p.eval(x | 0b100)).abs() < 1e-12);
        }
    }

    #[test]
    fn rand_index_examples() {
        let p = MultilinearPoly::character(3, 0b111);
        let (l, r) = rand_index_parity_bound_check(&p, 3, 1.0).unwrap();
        assert!((l - 1.0).abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
        // with nothing alive the inner product is p at the fixed point
        let q = random_poly(3, 8);
        let (l, r) = rand_index_parity_bound_check(&q, 2, 0.0).unwrap();
        let mean_abs = q.values().iter().map(|v| v.abs()).sum::<f64>() / 8.0;
        assert!((l - mean_abs).abs() < 1e-12);
        assert!(l <= r + 1e-12);
    }

    #[test]
    fn binomial_cdf_sums() {
        assert!((binomial_cdf(5, 0.3, 5) - 1.0).abs() < 1e-12);
        assert!((binomial_cdf(4, 0.5, 0) - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(binomial_cdf(3, 0.0, 0), 1.0);
    }
}
