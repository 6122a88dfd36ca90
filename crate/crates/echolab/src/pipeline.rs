//! Experiment commands that write CSV, JSON summaries and seed lists, plus
//! the SHA-256 manifest and presence checks.
//!
//! Every command is deterministic in its config: no timestamps, sorted
//! rows, fixed float formatting.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coding::{KGuard, Model};
use crate::ec::{ec_aggregate, ec_experiment, EcConfig, Status};
use crate::error::{invalid, Error, Result};
use crate::profile::{corr_with_pcg, profile_experiment, CorrRow, JoinKey, MassRow, ProfileConfig, StabRow};
use crate::restrictions::restriction_experiment;
use crate::sources::{
    kgram_scale_vs_n, pcg_experiment, spr_experiment, HistoryParams, LabelBlockParams, PcgRow,
    SideParams, SourceSpec,
};
use crate::stats::summarize;

pub const TOOL: &str = "echolab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    Ok(())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Header is written even for zero rows. Rejects NaN and infinite cells.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    let mut rd = csv::ReaderBuilder::new().from_reader(bytes.as_slice());
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(invalid(format!(
                "{}: row {} has {} fields, header has {}",
                path.display(),
                i + 1,
                rec.len(),
                header.len()
            )));
        }
        if let Some(c) = rec.iter().position(|c| matches!(c, "NaN" | "inf" | "-inf")) {
            return Err(invalid(format!(
                "{}: non-finite value in row {}, column {}",
                path.display(),
                i + 1,
                header[c]
            )));
        }
    }
    write_bytes(path, &bytes)
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rd = csv::Reader::from_reader(f);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_bytes(path, s.as_bytes())
}

pub fn write_seeds(path: &Path, seeds: impl IntoIterator<Item = u64>) -> Result<()> {
    let s: String = seeds.into_iter().map(|s| format!("{s}\n")).collect();
    write_bytes(path, s.as_bytes())
}

#[derive(Serialize)]
struct Summary<'a, C: Serialize, A: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    rows: usize,
    aggregates: A,
}

/// Files written and failed `--assert-*` checks.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl RunReport {
    fn csv<T: Serialize>(&mut self, path: PathBuf, header: &[&str], rows: &[T]) -> Result<()> {
        write_csv(&path, header, rows)?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        write_json(&path, value)?;
        self.written.push(path);
        Ok(())
    }

    fn seeds(&mut self, path: PathBuf, seed_base: u64, seeds: u64) -> Result<()> {
        write_seeds(&path, seed_base..seed_base + seeds)?;
        self.written.push(path);
        Ok(())
    }
}

fn results_dir(outdir: &Path) -> PathBuf {
    outdir.join("results")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcArgs {
    pub ns: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub gamma: f64,
    pub max_backtracks: u64,
    pub count_decisions_as_erasure: bool,
    pub randomize_order: bool,
}

impl Default for EcArgs {
    fn default() -> Self {
        EcArgs {
            ns: vec![64, 96, 128, 192, 256],
            seeds: 100,
            seed_base: 0,
            gamma: 0.1,
            max_backtracks: 20_000,
            count_decisions_as_erasure: true,
            randomize_order: false,
        }
    }
}

#[derive(Serialize)]
struct EcCsvRow {
    n: usize,
    m: usize,
    seed: u64,
    status: Status,
    erasures: u64,
    decisions: u64,
    backtracks: u64,
    propagations: u64,
}

pub const EC_HEADER: &[&str] = &[
    "n", "m", "seed", "status", "erasures", "decisions", "backtracks", "propagations",
];

/// `results/ec_counter.csv`, the summary and `seeds.txt`. Fails the run when
/// an ok assignment does not verify.
pub fn cmd_ec(args: &EcArgs, outdir: &Path, json_out: Option<&Path>) -> Result<RunReport> {
    let cfg = EcConfig {
        max_backtracks: args.max_backtracks,
        count_decisions_as_erasure: args.count_decisions_as_erasure,
        randomize_order: args.randomize_order,
    };
    let rows = ec_experiment(&args.ns, args.seeds, args.seed_base, args.gamma, &cfg)?;
    let mut rep = RunReport::default();
    for r in &rows {
        if r.status != Status::Ok {
            continue;
        }
        let x = crate::instances::gen_balanced_xor(r.n, args.gamma, r.seed)?;
        let ok = match &r.assignment {
            Some(a) => crate::instances::check_assignment(&x, a)?,
            None => false,
        };
        if !ok {
            rep.failures
                .push(format!("n={} seed={}: ok assignment does not verify", r.n, r.seed));
        }
    }
    let csv_rows: Vec<EcCsvRow> = rows
        .iter()
        .map(|r| EcCsvRow {
            n: r.n,
            m: r.m,
            seed: r.seed,
            status: r.status,
            erasures: r.erasures,
            decisions: r.decisions,
            backtracks: r.backtracks,
            propagations: r.propagations,
        })
        .collect();
    let res = results_dir(outdir);
    rep.csv(res.join("ec_counter.csv"), EC_HEADER, &csv_rows)?;
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "ec",
        config: args,
        rows: rows.len(),
        aggregates: ec_aggregate(&rows),
    };
    let json = json_out.map_or_else(|| res.join("ec_counter_summary.json"), Path::to_path_buf);
    rep.json(json, &summary)?;
    rep.seeds(outdir.join("seeds.txt"), args.seed_base, args.seeds)?;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SprArgs {
    pub ns: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub kmax: usize,
    pub length_mult: usize,
    pub history: HistoryParams,
}

impl Default for SprArgs {
    fn default() -> Self {
        SprArgs {
            ns: vec![64, 96, 128],
            seeds: 50,
            seed_base: 0,
            kmax: 8,
            length_mult: 32,
            history: HistoryParams::new(0.05, 0.06, 3, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossAggregate {
    pub n: usize,
    pub k: usize,
    pub mean: f64,
    pub sd: f64,
    pub sem: f64,
    pub count: usize,
}

pub const SPR_HEADER: &[&str] = &["n", "seed", "k", "logloss"];

pub fn cmd_spr(args: &SprArgs, outdir: &Path, json_out: Option<&Path>) -> Result<RunReport> {
    let rows = spr_experiment(
        &args.ns,
        args.seeds,
        args.seed_base,
        args.kmax,
        args.length_mult,
        &args.history,
    )?;
    let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for r in &rows {
        groups.entry((r.n, r.k)).or_default().push(r.logloss);
    }
    let aggs: Vec<LossAggregate> = groups
        .into_iter()
        .map(|((n, k), v)| {
            let s = summarize(&v);
            LossAggregate {
                n,
                k,
                mean: s.mean,
                sd: s.sd,
                sem: s.sem,
                count: s.count,
            }
        })
        .collect();
    let mut rep = RunReport::default();
    let res = results_dir(outdir);
    rep.csv(res.join("spr_trace.csv"), SPR_HEADER, &rows)?;
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "spr",
        config: args,
        rows: rows.len(),
        aggregates: aggs,
    };
    let json = json_out.map_or_else(|| res.join("spr_trace_summary.json"), Path::to_path_buf);
    rep.json(json, &summary)?;
    rep.seeds(outdir.join("seeds.txt"), args.seed_base, args.seeds)?;
    Ok(rep)
}

/// Source parameters, possibly several values per axis. Label-block zips
/// p0 with p1 and crosses the pairs with label_p; side crosses epsilon with
/// p_run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "context_mode", rename_all = "kebab-case")]
pub enum SourceGrid {
    LabelBlock {
        label_p: Vec<f64>,
        p0: Vec<f64>,
        p1: Vec<f64>,
        length_mult: usize,
    },
    Side {
        epsilon: Vec<f64>,
        p_run: Vec<f64>,
        max_run: usize,
        length_mult: usize,
    },
}

impl SourceGrid {
    pub fn strong(length_mult: usize) -> Self {
        let s = LabelBlockParams::STRONG;
        SourceGrid::LabelBlock {
            label_p: vec![s.label_p],
            p0: vec![s.p0],
            p1: vec![s.p1],
            length_mult,
        }
    }

    pub fn length_mult(&self) -> usize {
        match self {
            SourceGrid::LabelBlock { length_mult, .. } | SourceGrid::Side { length_mult, .. } => {
                *length_mult
            }
        }
    }

    /// Grid points with their directory tags, in a fixed order.
    pub fn points(&self) -> Result<Vec<(String, SourceSpec)>> {
        let mut out = Vec::new();
        match self {
            SourceGrid::LabelBlock {
                label_p,
                p0,
                p1,
                length_mult,
            } => {
                if p0.len() != p1.len() {
                    return Err(Error::LengthMismatch {
                        expected: p0.len(),
                        got: p1.len(),
                    });
                }
                for &lp in label_p {
                    for (&a, &b) in p0.iter().zip(p1) {
                        out.push((
                            format!("lp{lp}-p{a}-{b}"),
                            SourceSpec::LabelBlock(LabelBlockParams {
                                label_p: lp,
                                p0: a,
                                p1: b,
                                length_mult: *length_mult,
                            }),
                        ));
                    }
                }
            }
            SourceGrid::Side {
                epsilon,
                p_run,
                max_run,
                length_mult,
            } => {
                for &pr in p_run {
                    for &e in epsilon {
                        out.push((
                            format!("eps{e}-prun{pr}"),
                            SourceSpec::Side(SideParams {
                                epsilon: e,
                                p_run: pr,
                                max_run: *max_run,
                                length_mult: *length_mult,
                            }),
                        ));
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(invalid("source grid is empty"));
        }
        Ok(out)
    }
}

/// Output directory for one grid point; single-point grids write in place.
fn point_dir(base: &Path, tag: &str, points: usize) -> PathBuf {
    if points == 1 {
        base.to_path_buf()
    } else {
        base.join(tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcgArgs {
    pub ns: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub source: SourceGrid,
    pub models: Vec<Model>,
    pub clamp_nonneg: bool,
    pub warn_k_ratio: f64,
    pub auto_clamp_k: bool,
    /// Tolerance: fail the run when a row's pcg_bits falls below −tol.
    pub assert_nonneg: Option<f64>,
}

impl Default for PcgArgs {
    fn default() -> Self {
        PcgArgs {
            ns: vec![64, 96, 128, 160],
            seeds: 40,
            seed_base: 0,
            source: SourceGrid::strong(64),
            models: [0, 2, 4, 8].map(Model::Kgram).to_vec(),
            clamp_nonneg: false,
            warn_k_ratio: 16.0,
            auto_clamp_k: false,
            assert_nonneg: None,
        }
    }
}

pub const PCG_HEADER: &[&str] = &[
    "n", "seed", "context_mode", "model", "k", "mdl_bits", "cmdl_bits", "pcg_bits", "clamped",
];
pub const SCALE_HEADER: &[&str] = &["n", "mean_pcg_topk", "std_pcg_topk", "sem_pcg_topk", "count"];

#[derive(Serialize)]
struct PcgPointSummary {
    tag: String,
    source: SourceSpec,
    rows: usize,
    negative_rows: usize,
    clamped_rows: usize,
    scale: Vec<crate::sources::ScaleRow>,
}

/// Per grid point: `pcg_estimate.csv` and `kgram_scale_vs_n.csv` (top-k
/// over every model in the run). One summary covers the whole grid.
pub fn cmd_pcg(args: &PcgArgs, outdir: &Path, json_out: Option<&Path>) -> Result<RunReport> {
    let guard = KGuard {
        warn_ratio: args.warn_k_ratio,
        auto_clamp: args.auto_clamp_k,
    };
    let points = args.source.points()?;
    let res = results_dir(outdir);
    let mut rep = RunReport::default();
    let mut per_point = Vec::new();
    let mut total = 0;
    for (tag, spec) in &points {
        let rows = pcg_experiment(
            &args.ns,
            args.seeds,
            args.seed_base,
            spec,
            &args.models,
            args.clamp_nonneg,
            &guard,
        )?;
        if let Some(tol) = args.assert_nonneg {
            for r in rows.iter().filter(|r| r.pcg_bits < -tol) {
                rep.failures.push(format!(
                    "{tag}: n={} seed={} model={} k={} pcg_bits={} below -{tol}",
                    r.n,
                    r.seed,
                    r.model,
                    r.k.map_or_else(|| "-".into(), |k| k.to_string()),
                    r.pcg_bits
                ));
            }
        }
        let dir = point_dir(&res, tag, points.len());
        rep.csv(dir.join("pcg_estimate.csv"), PCG_HEADER, &rows)?;
        let scale = kgram_scale_vs_n(&rows);
        rep.csv(dir.join("kgram_scale_vs_n.csv"), SCALE_HEADER, &scale)?;
        total += rows.len();
        per_point.push(PcgPointSummary {
            tag: tag.clone(),
            source: *spec,
            rows: rows.len(),
            negative_rows: rows.iter().filter(|r| r.pcg_bits < 0.0).count(),
            clamped_rows: rows.iter().filter(|r| r.clamped == 1).count(),
            scale,
        });
    }
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "pcg",
        config: args,
        rows: total,
        aggregates: per_point,
    };
    let json = json_out.map_or_else(|| res.join("pcg_estimate_summary.json"), Path::to_path_buf);
    rep.json(json, &summary)?;
    rep.seeds(outdir.join("seeds.txt"), args.seed_base, args.seeds)?;
    Ok(rep)
}

/// A `pcg_estimate.csv` row as read back for the correlation join.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PcgRecord {
    pub n: usize,
    pub seed: u64,
    pub context_mode: String,
    pub model: String,
    pub k: Option<usize>,
    pub mdl_bits: f64,
    pub cmdl_bits: f64,
    pub pcg_bits: f64,
    pub clamped: u8,
}

impl From<&PcgRow> for PcgRecord {
    fn from(r: &PcgRow) -> Self {
        PcgRecord {
            n: r.n,
            seed: r.seed,
            context_mode: r.context_mode.to_string(),
            model: r.model.to_string(),
            k: r.k,
            mdl_bits: r.mdl_bits,
            cmdl_bits: r.cmdl_bits,
            pcg_bits: r.pcg_bits,
            clamped: r.clamped,
        }
    }
}

/// Top-k PCG rate (bits per symbol, L = length_mult·n) per (context, n, seed).
pub fn pcg_rates(
    rows: &[PcgRecord],
    length_mult: usize,
    context: Option<&str>,
) -> Result<HashMap<JoinKey, f64>> {
    if length_mult == 0 {
        return Err(invalid("length_mult must be positive"));
    }
    let mut best: HashMap<JoinKey, f64> = HashMap::new();
    for r in rows {
        if context.is_some_and(|c| c != r.context_mode) {
            continue;
        }
        let rate = r.pcg_bits / (length_mult * r.n) as f64;
        let e = best
            .entry((r.context_mode.clone(), r.n, r.seed))
            .or_insert(f64::NEG_INFINITY);
        *e = e.max(rate);
    }
    Ok(best)
}

pub const MASS_HEADER: &[&str] = &["context", "n", "seed", "q", "k", "degree_cap", "metric", "value"];
pub const STAB_HEADER: &[&str] = &["context", "n", "seed", "rho", "metric", "value"];
pub const CORR_HEADER: &[&str] = &["metric", "param", "r", "count"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileArgs {
    pub ns: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub source: SourceGrid,
    pub profile: ProfileConfig,
    /// PCG table to correlate with; its rows are assumed to come from the
    /// same streams (same source, seeds and length multiplier).
    #[serde(skip)]
    pub pcg_csv: Option<PathBuf>,
    pub context_for_corr: Option<String>,
}

impl Default for ProfileArgs {
    fn default() -> Self {
        ProfileArgs {
            ns: vec![256, 384, 512, 768, 1024],
            seeds: 60,
            seed_base: 41113,
            source: SourceGrid::strong(64),
            profile: ProfileConfig {
                qs: vec![2, 3, 5],
                kmax_values: vec![6],
                rhos: vec![0.1, 0.2],
                window: crate::profile::DEFAULT_WINDOW,
            },
            pcg_csv: None,
            context_for_corr: None,
        }
    }
}

#[derive(Serialize)]
struct MassAggregate {
    tag: String,
    q: u32,
    k: usize,
    n: usize,
    mean: f64,
    sd: f64,
    count: usize,
}

/// Writes `mass_by_qk.csv` and `stability_by_rho.csv` directly under
/// `data_dir` (one subdirectory per grid point), plus `corr_with_pcg.csv`
/// when a PCG table is given.
pub fn cmd_profile(args: &ProfileArgs, data_dir: &Path, json_out: Option<&Path>) -> Result<RunReport> {
    let points = args.source.points()?;
    let pcg_rows: Option<Vec<PcgRecord>> = args.pcg_csv.as_deref().map(read_csv).transpose()?;
    let mut rep = RunReport::default();
    let mut aggs = Vec::new();
    let mut total = 0;
    for (tag, spec) in &points {
        let (mass, stab) = profile_experiment(&args.ns, args.seeds, args.seed_base, spec, &args.profile)?;
        let dir = point_dir(data_dir, tag, points.len());
        rep.csv(dir.join("mass_by_qk.csv"), MASS_HEADER, &mass)?;
        rep.csv(dir.join("stability_by_rho.csv"), STAB_HEADER, &stab)?;
        total += mass.len() + stab.len();
        let cap = args.profile.kmax_values.iter().copied().max().unwrap_or(0);
        let mut groups: BTreeMap<(u32, usize, usize), Vec<f64>> = BTreeMap::new();
        for r in mass.iter().filter(|r| r.degree_cap == cap) {
            groups.entry((r.q, r.k, r.n)).or_default().push(r.value);
        }
        aggs.extend(groups.into_iter().map(|((q, k, n), v)| {
            let s = summarize(&v);
            MassAggregate {
                tag: tag.clone(),
                q,
                k,
                n,
                mean: s.mean,
                sd: s.sd,
                count: s.count,
            }
        }));
        if let Some(rows) = &pcg_rows {
            let ctx = args.context_for_corr.as_deref();
            let rates = pcg_rates(rows, args.source.length_mult(), ctx)?;
            let corr = corr_with_pcg(&rates, &mass, &stab)?;
            rep.csv(dir.join("corr_with_pcg.csv"), CORR_HEADER, &corr)?;
        }
    }
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "profile",
        config: args,
        rows: total,
        aggregates: aggs,
    };
    let json = json_out.map_or_else(|| data_dir.join("profile_summary.json"), Path::to_path_buf);
    rep.json(json, &summary)?;
    rep.seeds(data_dir.join("seeds.txt"), args.seed_base, args.seeds)?;
    Ok(rep)
}

/// Correlation from existing CSVs: PCG rate against every profile series.
pub fn cmd_corr(
    pcg_csv: &Path,
    mass_csv: &Path,
    stab_csv: &Path,
    length_mult: usize,
    context: Option<&str>,
    out: &Path,
) -> Result<(RunReport, Vec<CorrRow>)> {
    let pcg: Vec<PcgRecord> = read_csv(pcg_csv)?;
    let mass: Vec<MassRow> = read_csv(mass_csv)?;
    let stab: Vec<StabRow> = read_csv(stab_csv)?;
    let rates = pcg_rates(&pcg, length_mult, context)?;
    let corr = corr_with_pcg(&rates, &mass, &stab)?;
    let mut rep = RunReport::default();
    rep.csv(out.to_path_buf(), CORR_HEADER, &corr)?;
    Ok((rep, corr))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictArgs {
    pub ns: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub gamma: f64,
    pub d: u32,
    pub alpha: f64,
    pub max_rows: usize,
}

impl Default for RestrictArgs {
    fn default() -> Self {
        RestrictArgs {
            ns: vec![256, 512, 1024],
            seeds: 20,
            seed_base: 0,
            gamma: 0.1,
            d: 3,
            alpha: 1.0 / 3.0,
            max_rows: crate::restrictions::MAX_KERNEL_ROWS,
        }
    }
}

pub const RESTRICT_HEADER: &[&str] = &[
    "n", "m", "d", "alpha", "p", "seed", "alive_vars", "unfixed_clauses", "min_kernel_weight",
];

pub fn cmd_restrict(args: &RestrictArgs, outdir: &Path, json_out: Option<&Path>) -> Result<RunReport> {
    let rows = restriction_experiment(
        &args.ns,
        args.seeds,
        args.seed_base,
        args.gamma,
        args.d,
        args.alpha,
        args.max_rows,
    )?;
    let mut by_n: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in &rows {
        let e = by_n.entry(r.n).or_default();
        e.0.push(r.alive_vars as f64);
        e.1.push(r.unfixed_clauses as f64);
    }
    let aggs: Vec<serde_json::Value> = by_n
        .into_iter()
        .map(|(n, (a, u))| {
            serde_json::json!({
                "n": n,
                "mean_alive_vars": summarize(&a).mean,
                "mean_unfixed_clauses": summarize(&u).mean,
            })
        })
        .collect();
    let mut rep = RunReport::default();
    let res = results_dir(outdir);
    rep.csv(res.join("restriction.csv"), RESTRICT_HEADER, &rows)?;
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "restrict",
        config: args,
        rows: rows.len(),
        aggregates: aggs,
    };
    let json = json_out.map_or_else(|| res.join("restriction_summary.json"), Path::to_path_buf);
    rep.json(json, &summary)?;
    rep.seeds(outdir.join("seeds.txt"), args.seed_base, args.seeds)?;
    Ok(rep)
}

/// Flat map from relative path (forward slashes) to SHA-256 hex. Files that
/// could not be read carry an `error: ...` value and are listed in `errors`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub label: String,
    pub files: BTreeMap<String, String>,
    pub errors: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn rel_key(base: &Path, p: &Path) -> Result<String> {
    let rel = p.strip_prefix(base).map_err(|_| {
        invalid(format!("{} is not under {}", p.display(), base.display()))
    })?;
    Ok(rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/"))
}

/// Hashes every file under `roots` (files or directories), keyed relative
/// to `base`. `skip` excludes a path, typically the manifest itself.
pub fn make_manifest(base: &Path, roots: &[PathBuf], label: &str, skip: Option<&Path>) -> Result<Manifest> {
    let mut m = Manifest {
        label: label.to_string(),
        ..Default::default()
    };
    let skip = skip.map(|s| base.join(s));
    for root in roots {
        let root = base.join(root);
        if !root.exists() {
            return Err(Error::io(&root, std::io::ErrorKind::NotFound.into()));
        }
        for entry in walkdir::WalkDir::new(&root).sort_by_file_name() {
            let entry = entry.map_err(|e| invalid(e.to_string()))?;
            if !entry.file_type().is_file() || skip.as_deref() == Some(entry.path()) {
                continue;
            }
            let key = rel_key(base, entry.path())?;
            let value = match fs::read(entry.path()) {
                Ok(b) => sha256_hex(&b),
                Err(e) => {
                    m.errors.push(format!("{key}: {e}"));
                    format!("error: {e}")
                }
            };
            m.files.insert(key, value);
        }
    }
    Ok(m)
}

impl Manifest {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.files)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, label: &str) -> Result<Self> {
        Ok(Manifest {
            label: label.to_string(),
            files: serde_json::from_str(text)?,
            errors: Vec::new(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_bytes(path, self.to_json()?.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checked: usize,
    pub missing: Vec<String>,
    pub mismatched: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.mismatched.is_empty()
    }
}

pub fn verify_manifest(base: &Path, m: &Manifest) -> VerifyReport {
    let mut rep = VerifyReport::default();
    for (key, want) in &m.files {
        rep.checked += 1;
        match fs::read(base.join(key)) {
            Ok(b) if sha256_hex(&b) == *want => {}
            Ok(_) => rep.mismatched.push(key.clone()),
            Err(_) => rep.missing.push(key.clone()),
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresenceReport {
    /// Deduplicated paths in first-seen order, with presence.
    pub entries: Vec<(String, bool)>,
}

impl PresenceReport {
    pub fn all_present(&self) -> bool {
        self.entries.iter().all(|(_, ok)| *ok)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (p, ok) in &self.entries {
            s.push_str(if *ok { "OK   " } else { "MISS " });
            s.push_str(p);
            s.push('\n');
        }
        s.push_str(&format!("ALL ASSETS PRESENT: {}\n", self.all_present()));
        s
    }
}

/// Checks existence only; nothing is recomputed.
pub fn verify_presence(base: &Path, required: &[String]) -> PresenceReport {
    let mut seen = BTreeSet::new();
    let entries = required
        .iter()
        .filter(|p| seen.insert(p.as_str()))
        .map(|p| (p.clone(), base.join(p).is_file()))
        .collect();
    PresenceReport { entries }
}
