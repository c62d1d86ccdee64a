//! Benchmark instance generators and the semi-complete comparison harness.

mod generate;
mod report;

use std::ops::RangeInclusive;

use thiserror::Error;

pub use generate::{gen_random_amin, gen_semi_complete, RandomAminConfig};
pub use report::{micros, BenchReport, BenchRow, ReportError, CSV_HEADER};

use crate::bat;
use crate::model::{n_all, NodeSubset};
use crate::ugfm::{self, UgfmError};

/// Rows at or above this size need an explicit opt-in.
pub const LONG_RUN_FROM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineSet {
    pub bat: bool,
    pub ugfm: bool,
}

impl EngineSet {
    pub const BOTH: EngineSet = EngineSet {
        bat: true,
        ugfm: true,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: RangeInclusive<usize>,
    pub engines: EngineSet,
    pub cap: u64,
    /// Permits rows with `n >= LONG_RUN_FROM`.
    pub long: bool,
    /// Workers for the partitioned odometer; 1 keeps timings single-threaded.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: 5..=7,
            engines: EngineSet::BOTH,
            cap: ugfm::DEFAULT_TERM_CAP,
            long: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkbenchError {
    #[error("size {0} requires the long-run opt-in")]
    LongRunRequired(usize),
    #[error("semi-complete networks need at least 2 nodes, got {0}")]
    TooSmall(usize),
}

/// One semi-complete row per size, engines run in sequence. An engine failure
/// (the UGFM cap) leaves that engine's cells empty; it never aborts the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, WorkbenchError> {
    if !config.sizes.is_empty() && *config.sizes.start() < 2 {
        return Err(WorkbenchError::TooSmall(*config.sizes.start()));
    }
    if !config.long {
        if let Some(n) = config.sizes.clone().find(|&n| n >= LONG_RUN_FROM) {
            return Err(WorkbenchError::LongRunRequired(n));
        }
    }
    let rows = config.sizes.clone().map(|n| bench_row(n, config)).collect();
    Ok(BenchReport { rows })
}

fn bench_row(n: usize, config: &BenchConfig) -> BenchRow {
    let (network, dist) = gen_semi_complete(n);
    let target = NodeSubset::singleton(n);
    let mut row = BenchRow {
        n,
        arcs: network.arc_count(),
        n_all: n_all(&network),
        n_feasible: None,
        reliability: None,
        t_bat_s: None,
        t_ugfm_s: None,
        visited_bat: None,
        generated_ugfm: None,
        delta: None,
    };

    let bat = config.engines.bat.then(|| {
        let r = bat::reliability_to_targets(&network, &dist, target, config.threads);
        row.t_bat_s = Some(micros(r.counters.elapsed_secs()));
        row.visited_bat = Some(r.counters.visited);
        row.n_feasible = Some(r.counters.feasible);
        row.reliability = Some(r.reliability);
        r.reliability
    });

    let ugfm: Option<Result<f64, UgfmError>> = config.engines.ugfm.then(|| {
        let out = ugfm::reliability_ugfm(&network, &dist, config.cap)?;
        row.t_ugfm_s = Some(micros(out.stats.elapsed.as_secs_f64()));
        row.generated_ugfm = Some(out.stats.generated_count);
        let r = out.reliability(target);
        row.n_feasible.get_or_insert(out.feasible_count(target));
        row.reliability.get_or_insert(r);
        Ok(r)
    });

    if let (Some(b), Some(Ok(u))) = (bat, ugfm) {
        row.delta = Some((b - u).abs());
    }
    row
}
