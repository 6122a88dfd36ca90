//! Compression gap on label-block and side-context streams: top-k PCG per
//! n for k-gram models, then the VLC LZ78 surrogate.

use echolab::coding::{KGuard, Lz78Config, Model};
use echolab::sources::{kgram_scale_vs_n, pcg_experiment, LabelBlockParams, SideParams, SourceSpec};

fn print_scale(title: &str, rows: &[echolab::sources::PcgRow]) {
    println!("{title}");
    for s in kgram_scale_vs_n(rows) {
        println!("  n={:4}  mean={:8.1}  sem={:6.1}", s.n, s.mean_pcg_topk, s.sem_pcg_topk);
    }
}

fn main() -> echolab::Result<()> {
    let guard = KGuard {
        warn_ratio: 16.0,
        auto_clamp: true,
    };
    let ks: Vec<Model> = [0, 2, 4, 8].map(Model::Kgram).to_vec();
    let ns = [96, 160, 256];

    let label = SourceSpec::LabelBlock(LabelBlockParams::STRONG);
    print_scale("label-block kgram", &pcg_experiment(&ns, 20, 0, &label, &ks, true, &guard)?);

    let side = SourceSpec::Side(SideParams {
        epsilon: 0.06,
        p_run: 0.08,
        max_run: 128,
        length_mult: 32,
    });
    print_scale("side kgram", &pcg_experiment(&ns, 20, 0, &side, &ks, true, &guard)?);

    let long = SourceSpec::LabelBlock(LabelBlockParams {
        length_mult: 128,
        ..LabelBlockParams::STRONG
    });
    let vlc = [Model::Lz(Lz78Config::VLC)];
    print_scale("label-block lz78-vlc", &pcg_experiment(&ns, 20, 0, &long, &vlc, false, &guard)?);
    Ok(())
}
