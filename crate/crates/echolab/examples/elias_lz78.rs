//! Elias code lengths with an encode/decode round trip, and LZ78 surrogate
//! costs under uniform and variable-length pointers.

use echolab::coding::{elias_delta_len, elias_gamma_len, lz78_cost, lz78_parse, BitWriter, Lz78Config};
use echolab::rng::{coin, seeded};

fn main() -> echolab::Result<()> {
    println!("u\tgamma\tdelta");
    for u in [1u64, 2, 5, 17, 1000, 1_000_000] {
        println!("{u}\t{}\t{}", elias_gamma_len(u)?, elias_delta_len(u)?);
    }
    let mut w = BitWriter::new();
    let vals = [3u64, 1, 400, 77];
    for &v in &vals {
        w.write_delta(v)?;
    }
    let mut r = w.reader();
    let back: Vec<u64> = vals.iter().map(|_| r.read_delta()).collect::<echolab::Result<_>>()?;
    println!("delta round trip {:?} in {} bits", back, w.len());

    let mut rng = seeded(5);
    println!("\nbias\tphrases\tuniform\tvlc");
    for bias in [0.5, 0.2, 0.05] {
        let x: Vec<bool> = (0..8192).map(|_| coin(&mut rng, bias)).collect();
        let rep = lz78_parse(&x, &Lz78Config::UNIFORM);
        println!(
            "{bias}\t{}\t{}\t{}",
            rep.phrases,
            lz78_cost(&x, &Lz78Config::UNIFORM),
            lz78_cost(&x, &Lz78Config::VLC)
        );
    }
    Ok(())
}
