//! Analysis of the stable marriage game played under the men-proposing
//! Gale-Shapley mechanism.
//!
//! The crate covers four layers:
//!
//! * [`model`]: preference lists, profiles, matchings and stability.
//! * [`engine`]: the deterministic men-proposing Gale-Shapley run with a full
//!   proposal trace.
//! * [`explore`] and [`nash`]: every partner a woman can reach by permuting
//!   her stated list, and the decision procedure for P-stable Nash equilibria
//!   built on top of it.
//! * [`oracle`] and [`dynamics`]: brute-force reference implementations and a
//!   driver for sequences of unilateral deviations.
//!
//! [`format`] reads and writes the plain-text instance format used by the CLI.
//!
//! ```
//! use stablenash_core::{engine, format};
//!
//! let inst = format::parse_instance(
//!     "1: a b\n2: a b\na: 2 1\nb: 1 2\n",
//! ).unwrap();
//! let result = engine::gs_m(inst.stated());
//! assert_eq!(result.matching.woman_of(0), 1);
//! ```

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod explore;
pub mod format;
pub mod model;
pub mod nash;
pub mod oracle;

#[cfg(test)]
mod testutil;

pub use engine::{gs_m, ExecutionTrace, GsResult, Outcome, ProposalEvent};
pub use error::{Error, Result};
pub use explore::{best_attainable, explore, AttainableSet};
pub use model::{
    blocking_pairs, is_stable, prefers, promote, with_list, BlockingPair, Matching, Person,
    PreferenceList, Profile, Side,
};
pub use nash::{check_p_stable_nash, check_plain_nash, ManipulationWitness, NashVerdict};
