pub mod coding;
pub mod ec;
pub mod error;
pub mod fourier;
pub mod instances;
pub mod pipeline;
pub mod profile;
pub mod restrictions;
pub mod rng;
pub mod sources;
pub mod stats;

pub use error::{Error, Result};
