//! Convex optimization from comparison feedback.
//!
//! The optimizers never see function values. Each round they ask an oracle
//! which of two points is better (a duel), or which of many points is best
//! (a multiwise winner query), and turn the answers into a normalized
//! gradient estimate.
//!
//! ```
//! use duelopt_core::{make_quadratic, params_smooth, batched_ngd_run, ComparisonOracle, Domain, Mode, Vector};
//! use rand::SeedableRng;
//!
//! let f = make_quadratic(4).unwrap();
//! let w1 = Vector::filled(4, 0.5).unwrap();
//! let p = params_smooth(0.1, f.beta(), 4, 1.0, 2, Mode::Batched).unwrap().with_rounds(500);
//! let mut oracle = ComparisonOracle::exact(f);
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let trace = batched_ngd_run(&mut oracle, &Domain::all_space(4).unwrap(), &w1, &p, &mut rng).unwrap();
//! assert!(trace.last().f_runmin < 1.0);
//! ```

mod error;
pub mod harness;
pub mod objectives;
pub mod optimizers;
pub mod oracles;
pub mod querysets;
pub mod vectorspace;

pub use error::{Error, Result};
pub use objectives::{fd_gradient, make_l2l1, make_quadratic, make_sinsum, Objective, ObjectiveKind};
pub use optimizers::{
    batched_ngd_run, battling_ngd_run, ell_m, params_smooth, params_strong, phased_run, pngd_run, Mode, PhaseSchedule,
    SmoothParams, Trace, TraceRecord,
};
pub use oracles::{resample_count, ComparisonOracle, QueryLedger, Sign};
pub use querysets::{build_query_set, extract_gradient_estimates, SignVertex, StructuredQuerySet};
pub use vectorspace::{sample_sphere, Domain, Vector};
