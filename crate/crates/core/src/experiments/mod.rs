//! Configuration-driven experiments and their CSV/JSON output.

mod config;
mod emit;
mod runners;

pub use config::{BerezinSpec, DualitySpec, LambdaSpec, RunConfig, SeedSpec, TiltSpec};
pub use emit::{emit, format_sci, to_csv, write_report, Cell, Format, Tabular};
pub use runners::{
    commutator_constant, run_berezin, run_convergence, run_duality, run_fluctuation, run_lambda,
    BerezinReport, BerezinRow, ConvergenceReport, ConvergenceRow, DualityReport, DualityRow,
    FluctuationReport, FluctuationRow, LambdaReport, LambdaRow, LimitSummary, ReportMeta,
    TaskFailure, DUALITY_TOLERANCE,
};

/// Runs `f` on a dedicated pool of `threads` workers; `0` means the rayon default.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
