//! Comparison-feedback optimizers and their parameter schedules.

mod ngd;
mod params;
mod trace;

pub use ngd::{
    batched_ngd_run, batched_ngd_run_observed, battling_ngd_run, battling_ngd_run_observed, phased_run,
    phased_run_observed, pngd_run, pngd_run_observed, NoObserver, RoundObserver,
};
pub use params::{ell_m, params_smooth, params_strong, Mode, Phase, PhaseSchedule, SmoothParams};
pub use trace::{Trace, TraceRecord};

/// Closed-form query cost of a smooth run: `(duels, multiwise queries)`,
/// counting each algorithm-level query `calls_per_query` times.
pub fn smooth_budget(p: &SmoothParams, calls_per_query: u64) -> (u64, u64) {
    let t = p.rounds;
    let (duels, multi) = match p.mode {
        Mode::Single => (2 * t, 0),
        Mode::Batched => ((p.m as u64 + 1) * t, 0),
        Mode::Battling => (t, t),
    };
    (duels * calls_per_query, multi * calls_per_query)
}

/// Closed-form query cost of a phase-wise run.
pub fn phased_budget(s: &PhaseSchedule, calls_per_query: u64) -> (u64, u64) {
    s.phases.iter().fold((0, 0), |(d, m), ph| {
        let (pd, pm) = smooth_budget(&s.phase_params(ph), calls_per_query);
        (d + pd, m + pm)
    })
}
