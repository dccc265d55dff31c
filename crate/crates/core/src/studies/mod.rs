//! Parameter sweeps built on the propagator: decay-time scaling, short-time
//! leak probabilities and spectrum classification.

mod adiabatic;
mod scaling;
mod short_time;
mod spectrum;

pub use adiabatic::*;
pub use scaling::*;
pub use short_time::*;
pub use spectrum::*;

use crate::error::{Result, SpcError};

/// Runs `f` on a rayon pool with at most `jobs` threads (all cores if `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(SpcError::Config("jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| SpcError::Config(format!("thread pool: {e}"))),
    }
}
