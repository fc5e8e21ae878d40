//! Numerical laboratory for the geometry of fibered hyperbolic 3-manifolds at
//! desk scale: upper half-plane and PSL(2,R) primitives, a concrete genus-2
//! surface with its Fuchsian group, random walks on it, a square-tiled
//! pseudo-Anosov flat model carrying the Cannon-Thurston (singular solv)
//! metric, and the height-function test paths with their fiber statistics.
//!
//! Everything is deterministic given a seed: sampling goes through
//! `rand_chacha::ChaCha8Rng` streams keyed by `(seed, task index)` so results
//! are independent of thread count.

pub mod flatmodel;
pub mod heightfn;
pub mod hyp2;
pub mod randwalk;
pub mod surface;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
