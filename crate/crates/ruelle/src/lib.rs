//! Thermodynamic formalism on full shifts with finite-memory potentials.
//!
//! Everything the Ruelle-Perron-Frobenius machinery produces in this
//! setting — leading eigendata, Gibbs measures, the variance metric,
//! pressure gradient flows, constrained equilibrium states — reduces to
//! exact finite-dimensional linear algebra, which this crate implements
//! together with the surrounding calculus:
//!
//! * [`sft`] — alphabets, words, cylinder indexing, finite-memory tables;
//! * [`transfer`] — transfer matrices, Perron eigendata, normalization,
//!   the resolvent on mean-zero functions, quotient decompositions;
//! * [`gibbs`] — Markov measures, cylinder masses, entropy, pressure;
//! * [`calculus`] — derivatives of the leading eigenvalue and the Gibbs
//!   map, the variance metric computed by independent routes;
//! * [`equilibria`] — rotation vectors, prescription of integrals,
//!   constrained equilibrium states;
//! * [`flow`] — the pressure gradient flow in closed form;
//! * [`geometry2`] — the explicit two-symbol chart, metric tensor and
//!   curvature;
//! * [`wasserstein`] — dyadic projections and exact 1-D optimal transport
//!   scans.

pub mod calculus;
pub mod equilibria;
pub mod error;
pub mod flow;
pub mod geometry2;
pub mod gibbs;
pub mod linalg;
pub mod sft;
pub mod transfer;
pub mod wasserstein;

pub use error::{Error, Result};
pub use gibbs::MarkovMeasure;
pub use sft::{FnTable, ShiftSpec, Word};
pub use transfer::{RpfData, TransferMatrix};
