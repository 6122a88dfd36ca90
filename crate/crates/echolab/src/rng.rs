//! Seeded generator used everywhere a run needs randomness.
//!
//! Every experiment row records the seed it was built from, so a row can be
//! regenerated in isolation with [`seeded`].

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type LabRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> LabRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Independent stream for a sub-task of a seeded run (e.g. the RHS resampling
/// of a fixed incidence structure).
pub fn substream(seed: u64, salt: u64) -> LabRng {
    seeded(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17))
}

#[inline]
pub fn coin(rng: &mut LabRng, p: f64) -> bool {
    rng.random::<f64>() < p
}

#[inline]
pub fn fair_bit(rng: &mut LabRng) -> bool {
    rng.random::<bool>()
}
