use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use echolab::coding::{ContextMode, Lz78Config, Model};
use echolab::pipeline::{self, RunReport, SourceGrid};
use echolab::profile::{ProfileConfig, DEFAULT_WINDOW};
use echolab::sources::{HistoryParams, LabelBlockParams};

#[derive(Parser)]
#[command(name = "echolab", version, about = "XOR-SAT lifts, erasure-counting DPLL, restriction paths, Fourier profiles and compression gaps")]
struct Cli {
    /// Log progress at info level.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long = "n", num_args = 1.., required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, default_value = "label-block")]
    context_mode: ContextMode,
    /// Stream length is length-mult · n.
    #[arg(long)]
    length_mult: Option<usize>,
    #[arg(long, num_args = 1..)]
    label_p: Vec<f64>,
    #[arg(long, num_args = 1..)]
    p0: Vec<f64>,
    #[arg(long, num_args = 1..)]
    p1: Vec<f64>,
    /// Fill unset label-block parameters with label_p=0.03, p0=0.35, p1=0.65.
    #[arg(long)]
    auto_strong_signal: bool,
    #[arg(long, num_args = 1..)]
    epsilon: Vec<f64>,
    #[arg(long, num_args = 1..)]
    p_run: Vec<f64>,
    #[arg(long, default_value_t = 128)]
    max_run: usize,
}

impl SourceArgs {
    fn grid(&self, default_mult: usize) -> SourceGrid {
        let length_mult = self.length_mult.unwrap_or(default_mult);
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        // unset label parameters take the strong-signal values whether or
        // not the flag is given
        let s = LabelBlockParams::STRONG;
        match self.context_mode {
            ContextMode::LabelBlock => SourceGrid::LabelBlock {
                label_p: or(&self.label_p, s.label_p),
                p0: or(&self.p0, s.p0),
                p1: or(&self.p1, s.p1),
                length_mult,
            },
            ContextMode::Side => SourceGrid::Side {
                epsilon: or(&self.epsilon, 0.06),
                p_run: or(&self.p_run, 0.08),
                max_run: self.max_run,
                length_mult,
            },
        }
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, default_value = "artifacts")]
    outdir: PathBuf,
    /// Summary path; defaults to <outdir>/results/<name>_summary.json.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Erasure-counting DPLL on lifted hidden-assignment instances.
    Ec {
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 20_000)]
        max_backtracks: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        count_decisions_as_erasure: u8,
        #[arg(long)]
        randomize_order: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// k-gram log-loss on restriction-path parity histories.
    Spr {
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, default_value_t = 32)]
        length_mult: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.06)]
        p_hist: f64,
        #[arg(long, default_value_t = 3)]
        max_lag: usize,
        #[arg(long, default_value_t = 3)]
        round_len: usize,
        /// Fixed lag set; drawn per seed when absent.
        #[arg(long, num_args = 1..)]
        lags: Vec<usize>,
        /// Accepted for command-line compatibility; the generator has one mode.
        #[arg(long)]
        simple_mode: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compression gap between plain and context-conditioned code lengths.
    Pcg {
        #[command(flatten)]
        seeds: SeedArgs,
        #[command(flatten)]
        source: SourceArgs,
        /// kgram, lz or lz78.
        #[arg(long, num_args = 1.., default_value = "kgram")]
        model: Vec<String>,
        #[arg(long, num_args = 1.., default_values_t = [0usize, 2, 4, 8])]
        k: Vec<usize>,
        /// Price LZ78 pointers with Elias gamma instead of ceil(log2 |D|).
        #[arg(long)]
        lz_varindex: bool,
        #[arg(long, default_value_t = 16.0)]
        warn_k_ratio: f64,
        #[arg(long)]
        auto_clamp_k: bool,
        #[arg(long)]
        clamp_nonneg_pcg: bool,
        /// Exit nonzero when any row's pcg_bits falls below −TOL.
        #[arg(long)]
        assert_nonneg_pcg: Option<f64>,
        #[arg(long, hide = true)]
        plot_all_k: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mod-q character mass and noise stability of the PCG streams.
    Profile {
        #[command(flatten)]
        seeds: SeedArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, num_args = 1.., default_values_t = [2u32, 3, 5])]
        q: Vec<u32>,
        #[arg(long, num_args = 1.., default_values_t = [6usize])]
        kmax_values: Vec<usize>,
        #[arg(long, num_args = 1.., default_values_t = [0.1f64, 0.2])]
        rho: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long)]
        pcg_csv: Option<PathBuf>,
        #[arg(long)]
        context_for_corr: Option<String>,
        #[arg(long, alias = "outdir", default_value = "artifacts/results")]
        out_data_dir: PathBuf,
        #[arg(long, hide = true)]
        out_assets_dir: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Pearson r between PCG rate and profile metrics from existing CSVs.
    Corr {
        #[arg(long)]
        pcg_csv: PathBuf,
        #[arg(long)]
        mass_csv: PathBuf,
        #[arg(long)]
        stab_csv: PathBuf,
        /// Length multiplier of the PCG run, used for the per-symbol rate.
        #[arg(long, default_value_t = 64)]
        length_mult: usize,
        #[arg(long)]
        context_for_corr: Option<String>,
        #[arg(long, default_value = "artifacts/results/corr_with_pcg.csv")]
        out: PathBuf,
    },
    /// Restriction-path survival and row-kernel weights.
    Restrict {
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = echolab::restrictions::MAX_KERNEL_ROWS)]
        max_rows: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SHA-256 manifest over files and directories.
    Manifest {
        #[arg(long = "root", num_args = 1.., required = true)]
        roots: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        base: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        label: String,
    },
    /// Recompute digests and compare with a manifest.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = ".")]
        base: PathBuf,
    },
    /// Check that the listed files exist.
    VerifyPresence {
        #[arg(long, default_value = ".")]
        base: PathBuf,
        /// File with one path per line.
        #[arg(long)]
        list: Option<PathBuf>,
        paths: Vec<String>,
    },
}

fn models(names: &[String], ks: &[usize], varindex: bool) -> echolab::Result<Vec<Model>> {
    let lz = if varindex { Lz78Config::VLC } else { Lz78Config::UNIFORM };
    let mut out = Vec::new();
    for name in names {
        match name.as_str() {
            "kgram" => out.extend(ks.iter().map(|&k| Model::Kgram(k))),
            "lz" | "lz78" => out.push(Model::Lz(lz)),
            other => {
                return Err(echolab::Error::InvalidArgument(format!("unknown model {other:?}")))
            }
        }
    }
    Ok(out)
}

fn run(cmd: Cmd) -> echolab::Result<RunReport> {
    match cmd {
        Cmd::Ec {
            seeds,
            gamma,
            max_backtracks,
            count_decisions_as_erasure,
            randomize_order,
            out,
        } => {
            let args = pipeline::EcArgs {
                ns: seeds.ns,
                seeds: seeds.seeds,
                seed_base: seeds.seed_base,
                gamma,
                max_backtracks,
                count_decisions_as_erasure: count_decisions_as_erasure == 1,
                randomize_order,
            };
            pipeline::cmd_ec(&args, &out.outdir, out.json_out.as_deref())
        }
        Cmd::Spr {
            seeds,
            kmax,
            length_mult,
            eps,
            p_hist,
            max_lag,
            round_len,
            lags,
            simple_mode: _,
            out,
        } => {
            let history = HistoryParams {
                round_len,
                lags: (!lags.is_empty()).then_some(lags),
                ..HistoryParams::new(eps, p_hist, max_lag, 0)
            };
            let args = pipeline::SprArgs {
                ns: seeds.ns,
                seeds: seeds.seeds,
                seed_base: seeds.seed_base,
                kmax,
                length_mult,
                history,
            };
            pipeline::cmd_spr(&args, &out.outdir, out.json_out.as_deref())
        }
        Cmd::Pcg {
            seeds,
            source,
            model,
            k,
            lz_varindex,
            warn_k_ratio,
            auto_clamp_k,
            clamp_nonneg_pcg,
            assert_nonneg_pcg,
            plot_all_k: _,
            out,
        } => {
            let args = pipeline::PcgArgs {
                ns: seeds.ns,
                seeds: seeds.seeds,
                seed_base: seeds.seed_base,
                source: source.grid(64),
                models: models(&model, &k, lz_varindex)?,
                clamp_nonneg: clamp_nonneg_pcg,
                warn_k_ratio,
                auto_clamp_k,
                assert_nonneg: assert_nonneg_pcg,
            };
            pipeline::cmd_pcg(&args, &out.outdir, out.json_out.as_deref())
        }
        Cmd::Profile {
            seeds,
            source,
            q,
            kmax_values,
            rho,
            window,
            pcg_csv,
            context_for_corr,
            out_data_dir,
            out_assets_dir: _,
            json_out,
        } => {
            let args = pipeline::ProfileArgs {
                ns: seeds.ns,
                seeds: seeds.seeds,
                seed_base: seeds.seed_base,
                source: source.grid(64),
                profile: ProfileConfig {
                    qs: q,
                    kmax_values,
                    rhos: rho,
                    window,
                },
                pcg_csv,
                context_for_corr,
            };
            pipeline::cmd_profile(&args, &out_data_dir, json_out.as_deref())
        }
        Cmd::Corr {
            pcg_csv,
            mass_csv,
            stab_csv,
            length_mult,
            context_for_corr,
            out,
        } => {
            let (rep, rows) = pipeline::cmd_corr(
                &pcg_csv,
                &mass_csv,
                &stab_csv,
                length_mult,
                context_for_corr.as_deref(),
                &out,
            )?;
            for r in rows {
                println!("{} {} r={:.4} count={}", r.metric, r.param, r.r, r.count);
            }
            Ok(rep)
        }
        Cmd::Restrict {
            seeds,
            gamma,
            d,
            alpha,
            max_rows,
            out,
        } => {
            let args = pipeline::RestrictArgs {
                ns: seeds.ns,
                seeds: seeds.seeds,
                seed_base: seeds.seed_base,
                gamma,
                d,
                alpha,
                max_rows,
            };
            pipeline::cmd_restrict(&args, &out.outdir, out.json_out.as_deref())
        }
        Cmd::Manifest {
            roots,
            base,
            out,
            label,
        } => {
            let skip = out.strip_prefix(&base).ok().map(Path::to_path_buf);
            let m = pipeline::make_manifest(&base, &roots, &label, skip.as_deref())?;
            m.write(&out)?;
            println!("{} files -> {}", m.files.len(), out.display());
            Ok(RunReport {
                written: vec![out],
                failures: m.errors,
            })
        }
        Cmd::Verify { manifest, base } => {
            let text = std::fs::read_to_string(&manifest)
                .map_err(|e| echolab::Error::InvalidArgument(format!("{}: {e}", manifest.display())))?;
            let m = pipeline::Manifest::from_json(&text, "")?;
            let rep = pipeline::verify_manifest(&base, &m);
            let mut failures: Vec<String> =
                rep.missing.iter().map(|p| format!("missing: {p}")).collect();
            failures.extend(rep.mismatched.iter().map(|p| format!("digest mismatch: {p}")));
            if failures.is_empty() {
                println!("{} files verified", rep.checked);
            }
            Ok(RunReport {
                written: Vec::new(),
                failures,
            })
        }
        Cmd::VerifyPresence { base, list, mut paths } => {
            if let Some(list) = list {
                let text = std::fs::read_to_string(&list)
                    .map_err(|e| echolab::Error::InvalidArgument(format!("{}: {e}", list.display())))?;
                paths.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
            }
            let rep = pipeline::verify_presence(&base, &paths);
            print!("{}", rep.render());
            let failures = rep
                .entries
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(p, _)| format!("missing: {p}"))
                .collect();
            Ok(RunReport {
                written: Vec::new(),
                failures,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.cmd) {
        Ok(rep) => {
            for p in &rep.written {
                log::info!("wrote {}", p.display());
            }
            if rep.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &rep.failures {
                    eprintln!("{f}");
                }
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
