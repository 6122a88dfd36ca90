//! Balanced-window 3XOR instances and the four-clause lift to 3SAT.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{fair_bit, seeded, LabRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XorClause {
    /// Sorted, pairwise distinct variable indices.
    pub vars: [usize; 3],
    pub b: bool,
}

impl XorClause {
    pub fn parity(&self, a: &[bool]) -> bool {
        a[self.vars[0]] ^ a[self.vars[1]] ^ a[self.vars[2]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorInstance {
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub seed: u64,
    pub clauses: Vec<XorClause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<Vec<bool>>,
}

/// CNF over variables `1..=n` with DIMACS-style signed literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub n: usize,
    pub clauses: Vec<Vec<i32>>,
}

/// Clause count of the balanced window, rounded half up.
pub fn balanced_m(n: usize, gamma: f64) -> usize {
    ((1.0 + gamma) * n as f64 + 0.5).floor() as usize
}

fn check_window(n: usize, gamma: f64) -> Result<()> {
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    Ok(())
}

/// Uniform unordered triple of distinct indices, by rejection.
pub(crate) fn sample_triple(rng: &mut LabRng, n: usize) -> [usize; 3] {
    loop {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let k = rng.random_range(0..n);
        if i != j && j != k && i != k {
            let mut t = [i, j, k];
            t.sort_unstable();
            return t;
        }
    }
}

/// Planted instance: the hidden assignment is drawn first and every RHS is
/// set to its parity on the clause.
pub fn gen_balanced_xor(n: usize, gamma: f64, seed: u64) -> Result<XorInstance> {
    check_window(n, gamma)?;
    let m = balanced_m(n, gamma);
    let mut rng = seeded(seed);
    let hidden: Vec<bool> = (0..n).map(|_| fair_bit(&mut rng)).collect();
    let clauses = (0..m)
        .map(|_| {
            let vars = sample_triple(&mut rng, n);
            let b = hidden[vars[0]] ^ hidden[vars[1]] ^ hidden[vars[2]];
            XorClause { vars, b }
        })
        .collect();
    Ok(XorInstance {
        n,
        m,
        gamma,
        seed,
        clauses,
        hidden: Some(hidden),
    })
}

/// Same incidence model with an i.i.d. unbiased RHS and no hidden assignment.
pub fn gen_uniform_rhs_xor(n: usize, gamma: f64, seed: u64) -> Result<XorInstance> {
    check_window(n, gamma)?;
    let m = balanced_m(n, gamma);
    let mut rng = seeded(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = sample_triple(&mut rng, n);
            XorClause {
                vars,
                b: fair_bit(&mut rng),
            }
        })
        .collect();
    Ok(XorInstance {
        n,
        m,
        gamma,
        seed,
        clauses,
        hidden: None,
    })
}

/// Four clauses per parity constraint, sign patterns in lexicographic order
/// (negation of i, j, k as the bits of 0..8). A clause with sign pattern s is
/// falsified only by the assignment equal to s, so it is kept exactly when
/// that assignment has the wrong parity.
pub fn lift_to_cnf(x: &XorInstance) -> CnfInstance {
    let mut clauses = Vec::with_capacity(4 * x.clauses.len());
    for c in &x.clauses {
        for pattern in 0u8..8 {
            let neg = [pattern & 4 != 0, pattern & 2 != 0, pattern & 1 != 0];
            let forbidden_parity = neg[0] ^ neg[1] ^ neg[2];
            if forbidden_parity == c.b {
                continue;
            }
            let clause = c
                .vars
                .iter()
                .zip(neg)
                .map(|(&v, ng)| {
                    let lit = v as i32 + 1;
                    if ng {
                        -lit
                    } else {
                        lit
                    }
                })
                .collect();
            clauses.push(clause);
        }
    }
    CnfInstance { n: x.n, clauses }
}

pub trait Formula {
    fn num_vars(&self) -> usize;
    fn satisfied_by(&self, a: &[bool]) -> bool;
}

impl Formula for XorInstance {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn satisfied_by(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.parity(a) == c.b)
    }
}

impl Formula for CnfInstance {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn satisfied_by(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|cl| {
            cl.iter().any(|&l| {
                let v = a[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

pub fn check_assignment<F: Formula + ?Sized>(f: &F, a: &[bool]) -> Result<bool> {
    if a.len() != f.num_vars() {
        return Err(Error::LengthMismatch {
            expected: f.num_vars(),
            got: a.len(),
        });
    }
    Ok(f.satisfied_by(a))
}

/// Assignment with bit i of `mask` as variable i; used by exhaustive checks.
pub fn assignment_from_mask(n: usize, mask: u64) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

impl CnfInstance {
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for cl in &self.clauses {
            for l in cl {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads `p cnf` files; `c` comment lines are skipped and clauses may span
    /// lines.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(Error::Parse(format!("bad header: {line}")));
                }
                let n = f[2].parse().map_err(|_| Error::Parse(line.into()))?;
                let m = f[3].parse().map_err(|_| Error::Parse(line.into()))?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| Error::Parse("clause before header".into()))?;
            for tok in line.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal {tok:?}")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else if l.unsigned_abs() as usize > n {
                    return Err(Error::Parse(format!("literal {l} exceeds n={n}")));
                } else {
                    cur.push(l);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| Error::Parse("missing header".into()))?;
        if !cur.is_empty() {
            clauses.push(cur);
        }
        if clauses.len() != m {
            return Err(Error::Parse(format!(
                "header declares {m} clauses, found {}",
                clauses.len()
            )));
        }
        Ok(CnfInstance { n, clauses })
    }
}

impl XorInstance {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Sorted clause list; two instances with equal keys are the same system.
    pub fn canonical_key(&self) -> Vec<XorClause> {
        let mut c = self.clauses.clone();
        c.sort_unstable();
        c
    }
}
