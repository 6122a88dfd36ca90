//! Runs a small EC job into a temporary directory, hashes the outputs,
//! then shows verification catching a one-byte change.

use echolab::pipeline::{cmd_ec, make_manifest, verify_manifest, verify_presence, EcArgs};

fn main() -> echolab::Result<()> {
    let dir = std::env::temp_dir().join("echolab-manifest-demo");
    let _ = std::fs::remove_dir_all(&dir);
    let args = EcArgs {
        ns: vec![32, 48],
        seeds: 4,
        ..Default::default()
    };
    let rep = cmd_ec(&args, &dir, None)?;
    for p in &rep.written {
        println!("wrote {}", p.display());
    }
    let m = make_manifest(&dir, &[".".into()], "demo", None)?;
    print!("{}", m.to_json()?);
    println!("fresh: {:?}", verify_manifest(&dir, &m));

    let csv = dir.join("results/ec_counter.csv");
    let mut bytes = std::fs::read(&csv).unwrap();
    bytes[0] ^= 1;
    std::fs::write(&csv, bytes).unwrap();
    println!("mutated: {:?}", verify_manifest(&dir, &m));

    let need = ["results/ec_counter.csv".to_string(), "results/missing.csv".to_string()];
    print!("{}", verify_presence(&dir, &need).render());
    Ok(())
}
