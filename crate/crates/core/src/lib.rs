//! Igusa zeta integrals `I(s) = ∫_C f^s dx` for a rational polynomial `f`
//! that is nonnegative on a finite signed union of rational simplices.
//!
//! The crate computes exact moment sequences `I(k)`, guesses and verifies
//! the linear recurrence `Σ c_i(s) I(s+i) = 0` they satisfy, and uses it to
//! continue `I` meromorphically: Laurent expansions at integers (poles and
//! their orders included) and point values at arbitrary real `s`.
//!
//! Everything here is `no_std` + `alloc`. The `std` feature only unlocks the
//! `parallel` feature, which spreads moment integrations and base expansions
//! over a rayon pool.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod continuation;
pub mod error;
pub mod laurent;
pub mod linalg;
pub mod mpoly;
pub mod quadrature;
pub mod rational;
pub mod ratfunc;
pub mod recurrence;
pub mod simplex;
pub mod unipoly;

pub use continuation::{
    base_expansion, evaluate_continued, laurent_at, pole_report, ContinuationConfig,
    LaurentExpansion, PointValue, PoleRecord,
};
pub use error::{Error, Result};
pub use laurent::{Coeff, LaurentSeries};
pub use mpoly::{parse_poly, restrict_chart, MPoly};
pub use quadrature::{
    integrate_box_rep, integrate_power_log, integrate_power_log_all, j_value, power_log_taylor,
    QuadConfig, QuadResult,
};
pub use rational::Rat;
pub use ratfunc::RatFunc;
pub use recurrence::{
    guess_ode, guess_recurrence, normalize_recurrence, ode_to_recurrence, verify_recurrence,
    GuessedRecurrence, OdeRelation, Recurrence, SearchConfig, VerificationReport,
};
pub use simplex::{
    decompose_union, integrate_monomial, integrate_poly, moments, sup_estimate, Domain,
    MomentSequence, SimplexDomain,
};
pub use unipoly::UniPoly;
