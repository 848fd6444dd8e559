//! Walsh-Fourier analysis on the dyadic group at finite resolution.
//!
//! Functions live on `2^N` cells ([`GridFunction`]) and are analyzed in the
//! Paley-ordered Walsh basis ([`Spectrum`]). On top of that sit the
//! Dirichlet, Fejér, Nörlund-logarithmic and Riesz kernels, the matching
//! means, size measurements (Lp, weak-Lp, maximal function, Hardy norm) and
//! a construction showing that `L_{2^n}` is unbounded from `H_p` to
//! weak-`L_p` for `p < 1`.

pub mod counterexample;
pub mod error;
pub mod group;
pub mod harmonic;
pub mod kernels;
pub mod means;
pub mod norms;
pub mod transform;

pub use error::{Error, Result};
pub use group::{add_points, cell_of, rademacher, walsh, Cell, DyadicPoint, PaleyIndex};
pub use kernels::{HarmonicPrefix, MeanKind};
pub use norms::Exponent;
pub use transform::{analyze, partial_sum, synthesize, GridFunction, Spectrum};
