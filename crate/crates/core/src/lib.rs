//! Proper edge colourings that avoid rainbow cliques in randomly perturbed
//! graphs `K_{n/2,n/2} ∪ G(n,p)`.
//!
//! The crate pairs constructive avoiders (for `K4`, `K6` and `K8`) with
//! checkers for every claim they rely on. [`graph`] and [`colouring`] hold
//! the shared types. [`decide`] settles small `G → H` questions
//! exhaustively, and [`lemmas`] stress-tests the extraction lemmas on
//! adversarial colourings. [`emergence`] samples instances and computes
//! Janson bounds, density conditions and threshold scans. [`verify`] runs
//! the acceptance battery and [`cli`] wraps it all behind `rainbow-lab`.
//!
//! See `examples/` for one runnable program per capability.

pub mod avoid_k4;
pub mod avoid_k6;
pub mod bits;
pub mod canon;
pub mod cli;
pub mod colouring;
pub mod decide;
pub mod emergence;
pub mod error;
pub mod graph;
pub mod lemmas;
pub mod tiled;
pub mod verify;

pub use error::{LabError, Result};
