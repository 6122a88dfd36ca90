//! Erasure-counting DPLL: unit propagation, chronological backtracking and a
//! trail whose pops are the erasure proxy.

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instances::CnfInstance;
use crate::rng::{fair_bit, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Limit,
    Unsat,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Limit => "limit",
            Status::Unsat => "unsat",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EcConfig {
    pub max_backtracks: u64,
    pub count_decisions_as_erasure: bool,
    /// Seeded variable order and polarity; off means lowest index, false first.
    pub randomize_order: bool,
}

impl Default for EcConfig {
    fn default() -> Self {
        EcConfig {
            max_backtracks: 20_000,
            count_decisions_as_erasure: true,
            randomize_order: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcRunResult {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub status: Status,
    pub erasures: u64,
    pub decisions: u64,
    pub backtracks: u64,
    pub propagations: u64,
    /// Popped propagated entries.
    pub propagated_pops: u64,
    /// Popped decision entries (fresh or flipped), counted whether or not
    /// they add to `erasures`.
    pub decision_pops: u64,
    pub assignment: Option<Vec<bool>>,
}

#[derive(Clone, Copy)]
struct TrailEntry {
    var: usize,
    decision: bool,
    flipped: bool,
}

struct Solver {
    n: usize,
    clauses: Vec<Vec<i32>>,
    occ: Vec<Vec<usize>>,
    /// 0 unassigned, 1 true, -1 false.
    value: Vec<i8>,
    n_true: Vec<u32>,
    n_false: Vec<u32>,
    trail: Vec<TrailEntry>,
    qhead: usize,
    propagations: u64,
}

#[inline]
fn lit_index(l: i32) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

impl Solver {
    fn new(n: usize, clauses: Vec<Vec<i32>>) -> Self {
        let mut occ = vec![Vec::new(); 2 * n];
        for (ci, cl) in clauses.iter().enumerate() {
            for &l in cl {
                occ[lit_index(l)].push(ci);
            }
        }
        let k = clauses.len();
        Solver {
            n,
            clauses,
            occ,
            value: vec![0; n + 1],
            n_true: vec![0; k],
            n_false: vec![0; k],
            trail: Vec::with_capacity(n),
            qhead: 0,
            propagations: 0,
        }
    }

    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, var: usize, val: bool, decision: bool, flipped: bool) {
        debug_assert_eq!(self.value[var], 0);
        self.value[var] = if val { 1 } else { -1 };
        let pos = var as i32;
        let (t, f) = if val { (pos, -pos) } else { (-pos, pos) };
        for &c in &self.occ[lit_index(t)] {
            self.n_true[c] += 1;
        }
        for &c in &self.occ[lit_index(f)] {
            self.n_false[c] += 1;
        }
        self.trail.push(TrailEntry {
            var,
            decision,
            flipped,
        });
    }

    fn unassign(&mut self, var: usize) {
        let val = self.value[var] > 0;
        self.value[var] = 0;
        let pos = var as i32;
        let (t, f) = if val { (pos, -pos) } else { (-pos, pos) };
        for &c in &self.occ[lit_index(t)] {
            self.n_true[c] -= 1;
        }
        for &c in &self.occ[lit_index(f)] {
            self.n_false[c] -= 1;
        }
    }

    /// Checks every clause that is not yet satisfied; used once at the root
    /// so that input unit clauses are enqueued.
    fn root_units(&mut self) -> bool {
        for c in 0..self.clauses.len() {
            if self.n_true[c] > 0 {
                continue;
            }
            let len = self.clauses[c].len() as u32;
            if self.n_false[c] == len {
                return false;
            }
            if self.n_false[c] + 1 == len {
                let l = self.unassigned_lit(c);
                self.assign(l.unsigned_abs() as usize, l > 0, false, false);
                self.propagations += 1;
            }
        }
        true
    }

    fn unassigned_lit(&self, c: usize) -> i32 {
        *self.clauses[c]
            .iter()
            .find(|&&l| self.lit_value(l) == 0)
            .expect("unit clause has an unassigned literal")
    }

    /// Propagates to fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let var = self.trail[self.qhead].var;
            self.qhead += 1;
            let pos = var as i32;
            let falsified = if self.value[var] > 0 { -pos } else { pos };
            let watch = lit_index(falsified);
            for idx in 0..self.occ[watch].len() {
                let c = self.occ[watch][idx];
                if self.n_true[c] > 0 {
                    continue;
                }
                let len = self.clauses[c].len() as u32;
                if self.n_false[c] == len {
                    return false;
                }
                if self.n_false[c] + 1 == len {
                    let l = self.unassigned_lit(c);
                    self.assign(l.unsigned_abs() as usize, l > 0, false, false);
                    self.propagations += 1;
                }
            }
        }
        true
    }
}

/// Duplicate literals removed, tautologies dropped. `None` if some clause is
/// empty.
fn normalize(c: &CnfInstance) -> Option<Vec<Vec<i32>>> {
    let mut out = Vec::with_capacity(c.clauses.len());
    for cl in &c.clauses {
        let mut lits = cl.clone();
        lits.sort_unstable_by_key(|l| (l.unsigned_abs(), *l));
        lits.dedup();
        if lits.is_empty() {
            return None;
        }
        if lits.windows(2).any(|w| w[0] == -w[1]) {
            continue;
        }
        out.push(lits);
    }
    Some(out)
}

pub fn dpll_ec(c: &CnfInstance, seed: u64, cfg: &EcConfig) -> Result<EcRunResult> {
    if cfg.max_backtracks < 1 {
        return Err(invalid("max_backtracks must be at least 1"));
    }
    let mut res = EcRunResult {
        n: c.n,
        m: c.clauses.len(),
        seed,
        status: Status::Unsat,
        erasures: 0,
        decisions: 0,
        backtracks: 0,
        propagations: 0,
        propagated_pops: 0,
        decision_pops: 0,
        assignment: None,
    };
    let Some(clauses) = normalize(c) else {
        return Ok(res);
    };
    let mut s = Solver::new(c.n, clauses);

    let (order, polarity): (Vec<usize>, Vec<bool>) = if cfg.randomize_order {
        let mut rng = seeded(seed);
        let mut order: Vec<usize> = (1..=c.n).collect();
        order.shuffle(&mut rng);
        let pol = (0..=c.n).map(|_| fair_bit(&mut rng)).collect();
        (order, pol)
    } else {
        ((1..=c.n).collect(), vec![false; c.n + 1])
    };
    let mut cursor = 0usize;

    let mut ok = s.root_units() && s.propagate();
    loop {
        if ok {
            // Variables before `cursor` in the order are all assigned: they
            // were assigned when the cursor passed them and backtracking only
            // pops entries above the decision it returns to.
            while cursor < order.len() && s.value[order[cursor]] != 0 {
                cursor += 1;
            }
            if cursor == order.len() {
                res.status = Status::Ok;
                res.assignment = Some((1..=s.n).map(|v| s.value[v] > 0).collect());
                break;
            }
            let var = order[cursor];
            res.decisions += 1;
            s.assign(var, polarity[var], true, false);
            ok = s.propagate();
            continue;
        }
        let Some(pos) = s.trail.iter().rposition(|e| e.decision && !e.flipped) else {
            res.status = Status::Unsat;
            break;
        };
        if res.backtracks == cfg.max_backtracks {
            res.status = Status::Limit;
            break;
        }
        res.backtracks += 1;
        let target = s.trail[pos];
        while s.trail.len() > pos {
            let e = s.trail.pop().unwrap();
            s.unassign(e.var);
            if e.decision {
                res.decision_pops += 1;
            } else {
                res.propagated_pops += 1;
            }
        }
        s.qhead = s.trail.len();
        let old = polarity[target.var];
        s.assign(target.var, !old, true, true);
        // the cursor only needs to move back to the first unassigned variable
        cursor = order
            .iter()
            .position(|&v| s.value[v] == 0)
            .unwrap_or(order.len());
        ok = s.propagate();
    }
    res.propagations = s.propagations;
    res.erasures = res.propagated_pops
        + if cfg.count_decisions_as_erasure {
            res.decision_pops
        } else {
            0
        };
    Ok(res)
}

/// One row per (n, seed) of lifted hidden-assignment instances, sorted by
/// (n, seed). Seeds run `seed_base .. seed_base + seeds`; `m` is the 3XOR
/// clause count.
pub fn ec_experiment(
    ns: &[usize],
    seeds: u64,
    seed_base: u64,
    gamma: f64,
    cfg: &EcConfig,
) -> Result<Vec<EcRunResult>> {
    use rayon::prelude::*;
    if ns.is_empty() {
        return Err(invalid("ns must be nonempty"));
    }
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |i| (n, seed_base + i)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let x = crate::instances::gen_balanced_xor(n, gamma, seed)?;
            let c = crate::instances::lift_to_cnf(&x);
            let mut r = dpll_ec(&c, seed, cfg)?;
            r.m = x.m;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcAggregate {
    pub n: usize,
    pub status: Status,
    pub count: usize,
    pub mean_erasures: f64,
    pub mean_decisions: f64,
    pub mean_backtracks: f64,
    pub mean_propagations: f64,
}

/// Per-n means split by status; statuses with no runs are omitted.
pub fn ec_aggregate(rows: &[EcRunResult]) -> Vec<EcAggregate> {
    let mut groups: std::collections::BTreeMap<(usize, Status), Vec<&EcRunResult>> =
        Default::default();
    for r in rows {
        groups.entry((r.n, r.status)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, status), rs)| {
            let k = rs.len() as f64;
            let mean = |f: fn(&EcRunResult) -> u64| rs.iter().map(|r| f(r) as f64).sum::<f64>() / k;
            EcAggregate {
                n,
                status,
                count: rs.len(),
                mean_erasures: mean(|r| r.erasures),
                mean_decisions: mean(|r| r.decisions),
                mean_backtracks: mean(|r| r.backtracks),
                mean_propagations: mean(|r| r.propagations),
            }
        })
        .collect()
}
