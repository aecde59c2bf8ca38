//! Growth and conjugacy growth of split polycyclic groups `Z^k x|_phi Z`.
//!
//! The crate works with the concrete lattice model: elements are pairs
//! `(vec, shift)` multiplied by `(v, s)(w, t) = (v + phi^s w, s + t)`, with
//! `phi` a unimodular integer matrix. On top of exact arithmetic it provides
//! ball enumeration and word norms, an exact conjugacy decision with canonical
//! class keys, simultaneous Diophantine approximation, the construction of
//! exponentially many short pairwise non-conjugate elements, and a heuristic
//! growth classifier.

pub mod ball;
pub mod certificate;
pub mod classifier;
pub mod conjugacy;
pub mod diophantine;
pub mod distortion;
pub mod error;
pub mod group;
pub mod interval;
pub mod json;
pub mod matrix;
pub mod norm;
pub mod par;
pub mod poly;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
pub use group::{matrix_power, Element, GroupSpec, Word};
pub use matrix::{IntMatrix, Snf};
pub use par::Parallelism;
