//! Brute-force reference implementations and the checks that compare the
//! fast paths against them.
//!
//! [`brute`] depends only on the model types and the mechanism itself; it
//! never calls into `explore` or `nash`. [`checks`] runs both sides and
//! reports agreement per claim.

pub mod brute;
pub mod checks;
pub mod corpus;

pub use brute::{
    brute_attainable, brute_check_p_stable_nash, brute_check_plain_nash, brute_stable_matchings,
    DEFAULT_CAP,
};
pub use checks::{audit_instance, verify_invariants, Claim, ClaimResult, OracleReport, Reproducer};
