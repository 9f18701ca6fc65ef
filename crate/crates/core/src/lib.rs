//! Exact maximal slopes of monomial syzygy bundles on projective space and
//! semistability certificates for general kernel bundles `E_{a,b}`.
//!
//! All slopes, bounds and thresholds are exact rationals; nothing in the
//! computation goes through floating point.

pub mod atlas;
pub mod bundle;
pub mod constructions;
pub mod error;
pub mod monomial;
pub mod rational;
pub mod report;
pub mod slope;

pub use bundle::{
    certify, decompose, extend, extend_class, extension_margin, extension_margin_form,
    min_d_linear, slope_ledger, Coverage, DThreshold, Decomposition, KernelBundleClass, LinearForm,
    MatrixEntry, MonomialMatrix, StabilityCertificate,
};
pub use constructions::{
    a_interval, bound_b, construction1, construction1_dropped, e81_generators, e91_generators,
    k_of, p_n_of_d, ConstructionParams,
};
pub use error::{Error, Result};
pub use monomial::{Monomial, MonomialSet};
pub use rational::Rational;
pub use slope::{
    mu_max_bruteforce, mu_max_closure, per_rank_table, semistable_verdict, witness_subset,
    SlopeProfile,
};
