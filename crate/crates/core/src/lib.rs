//! Tight correlation Bell inequalities for `N` parties with three dichotomic
//! settings each, generated from admissible sign functions.
//!
//! A sign function `s: {±1}^(2N) → {±1}` is admissible when its Fourier
//! expansion contains no product of a party's two variables. Its spectrum,
//! restricted to the `3^N` remaining monomials, is the coefficient tensor of a
//! Bell inequality `|Σ ĝ·E| ≤ 2^(2N)` which is a facet of the local polytope.
//!
//! Correlation tensors are generic over [`Scalar`] and the quantum module over
//! `nalgebra::RealField`; the aliases below fix the usual choices.

pub mod catalog;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod fourier;
pub mod lifting;
pub mod polytope;
pub mod quantum;
pub mod rank;
pub mod scalar;
pub mod sign;
pub mod symmetry;
pub mod tightness;

pub use catalog::{CatalogEntry, VerificationRecord};
pub use classify::{classify, classify_enumeration, classify_tables, EnumerationReport};
pub use enumerate::{enumerate_admissible, Checkpoint, Enumeration, EnumerationMode};
pub use error::{BellError, Result};
pub use fourier::{fourier_transform, inverse_transform, is_admissible, is_factorable, FourierSpectrum, Monomial};
pub use lifting::{lift, two_setting_reduction, LiftedInequality};
pub use polytope::{
    canonical_coefficient, inequality_from_sign_function, lhv_bounds, lhv_max, strategy_to_correlations,
    vertex_tensor, BellInequality, CorrelationTensor, DeterministicStrategy, Vertex,
};
pub use quantum::{bell_operator, evaluate_state, seesaw_maximize, ObservableDirection, QuantumValueReport, SeesawOptions};
pub use scalar::{ExactInteger, Scalar};
pub use sign::{SignFunction, VariableAssignment};
pub use symmetry::{canonicalize, SymmetryElement, SymmetryGroup};
pub use tightness::{certify_tightness, TightnessCertificate};

/// Real-valued correlations.
pub type Correlations = CorrelationTensor<f64>;
/// Exact rational correlations, for convexity checks without rounding.
pub type ExactCorrelations = CorrelationTensor<num_rational::BigRational>;
pub type Directions = ObservableDirection<f64>;
pub type QuantumReport = QuantumValueReport<f64>;
