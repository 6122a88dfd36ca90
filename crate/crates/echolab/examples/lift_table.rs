//! Balanced-window sizes and the 3XOR→3SAT lift, with a DIMACS round trip.

use echolab::instances::{balanced_m, gen_balanced_xor, lift_to_cnf, CnfInstance};

fn main() -> echolab::Result<()> {
    println!("n\tm\tcnf_clauses");
    for n in [64, 96, 128, 192, 256] {
        let x = gen_balanced_xor(n, 0.1, 1)?;
        let c = lift_to_cnf(&x);
        assert_eq!(x.m, balanced_m(n, 0.1));
        println!("{n}\t{}\t{}", x.m, c.clauses.len());
    }
    let small = lift_to_cnf(&gen_balanced_xor(8, 0.1, 7)?);
    let text = small.to_dimacs();
    let back = CnfInstance::from_dimacs(&text)?;
    assert_eq!(back, small);
    println!("\n{}", text.lines().take(5).collect::<Vec<_>>().join("\n"));
    Ok(())
}
