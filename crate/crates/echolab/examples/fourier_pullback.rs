//! Fourier mass and noise stability under coordinate permutations, an
//! affine dilation and a random restriction.

use echolab::fourier::{affine_pullback, restrict_poly, wht, AffineMap};
use echolab::restrictions::product_restriction;

fn main() -> echolab::Result<()> {
    // majority of 3 next to a parity on the remaining bit
    let f: Vec<f64> = (0..16u64)
        .map(|x| {
            let maj = (x & 7).count_ones() >= 2;
            let v = maj ^ (x >> 3 & 1 == 1);
            if v { -1.0 } else { 1.0 }
        })
        .collect();
    let p = wht(&f)?;
    let perm = AffineMap::new(4, vec![0b0100, 0b0001, 0b1000, 0b0010], 0b0101)?;
    let q = affine_pullback(&p, &perm)?;
    println!("k\tmass(p)\tmass(p∘T)");
    for k in 0..=4 {
        println!("{k}\t{:.4}\t{:.4}", p.mass_le_k(k), q.mass_le_k(k));
    }
    for rho in [0.1, 0.2, 0.5] {
        println!("Stab_{rho}: {:.6} vs {:.6}", p.stab_rho(rho), q.stab_rho(rho));
    }

    let dil = AffineMap::new(4, vec![0b0011, 0b0110, 0b1100, 0b1001], 0)?;
    let r = affine_pullback(&p, &dil)?;
    println!("\ndeg p = {}, Δ = {}, deg(p∘T) = {}", p.degree(), dil.delta(), r.degree());

    let rho = product_restriction(4, 0.5, 3)?;
    let pr = restrict_poly(&p, &rho)?;
    println!("alive {} of 4, restricted degree {}", rho.alive_count(), pr.degree());
    Ok(())
}
