//! Discrete clustering by multi-swap local search.
//!
//! The crate covers three objective families over a shared instance model —
//! cardinality-constrained `l_q^q` clustering (k-means at `q = 2`, k-median
//! at `q = 1`), uncapacitated facility location, and generalized k-median —
//! together with:
//!
//! * exact brute-force oracles for desk-scale ground truth,
//! * an executable verifier for the filtering / tether-pair / net-pair /
//!   randomized-partition machinery that underpins the swap heuristic's
//!   approximation guarantees, exercised statistically on concrete
//!   (local optimum, global optimum) pairs,
//! * instance generators, a centroid-descent baseline, and a benchmark
//!   harness.
//!
//! Everything is deterministic given (instance, seed, config); parallel
//! evaluation never changes results.

pub mod analysis;
pub mod error;
pub mod format;
pub mod harness;
pub mod instance;
pub mod objective;
pub mod oracle;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use format::{load_instance, parse_instance, save_instance};
pub use instance::{
    make_candidates, Candidate, CandidatePolicy, Instance, Metric, Point, Site, SiteRef,
};
pub use objective::{assign_all, cost_delta_swap, ObjectiveSpec, Solution};
pub use oracle::{exact_gkm, exact_lq, exact_ufl, OracleResult};
pub use search::{
    enumerate_moves, local_search_gkm, local_search_lq, local_search_ufl, Acceptance,
    Improvement, InitPolicy, MoveShape, SearchConfig, SearchTrace, SwapMove,
};
