//! Monte Carlo engine and the four experiment drivers.
//!
//! Each trial owns an independent counter-derived rng stream, so trials are
//! order-independent and parallelizable; aggregation is a deterministic
//! index-ordered reduction. Methods compared within one trial share the same
//! channel draw, keeping comparisons paired.
//!
//! Link-budget convention: surface-assisted and direct links fold the
//! endpoint antenna gains (dBi) into their path loss; repeater links are
//! budgeted port-to-port with the panel gains treated as part of the
//! repeater's calibrated system gain.

mod fig3;
mod fig4;
mod fig5;
mod fig7;

pub use fig3::{fig3_scene, run_fig3, DEFAULT_POWER_GRID_DBM, FIG3_BS, FIG3_NODE, FIG3_UE};
pub use fig4::{fig4_scene, run_fig4, Fig4Cell, Fig4Table, DEFAULT_NN_GRID, FIG4_BS, FIG4_M_MAX};
pub use fig5::{
    fig5_direct_blocked, fig5_scene, run_fig5, DEFAULT_Y_GRID, FIG5_BS, FIG5_NCR, FIG5_UE_X,
    FIG5_WALL_A, FIG5_WALL_B,
};
pub use fig7::{
    fig7_scene, run_fig7, DEFAULT_THETA1_GRID_PI, FIG7_BS1, FIG7_BS2, FIG7_NCR1, FIG7_NCR2,
    FIG7_UE1_RADIUS, FIG7_UE2,
};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ScenarioKind;
use crate::error::{Result, SimError};
use crate::geometry::{distance, Position, Wall};
use crate::rng::substream;

/// Output-power cap applied by scenario drivers when the config leaves the
/// clamp unset, in dBm.
pub const DEFAULT_NCR_MAX_OUT_DBM: f64 = 40.0;

/// Node placement for one experiment.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub bs: Vec<Position>,
    pub ncr: Vec<Position>,
    pub ris: Vec<Position>,
    pub ue: Vec<Position>,
    pub walls: Vec<Wall>,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if self.bs.is_empty() || self.ue.is_empty() {
            return Err(SimError::EmptyInput { context: "Scene (needs a BS and a UE)" });
        }
        let nodes: Vec<Position> = self
            .bs
            .iter()
            .chain(&self.ncr)
            .chain(&self.ris)
            .chain(&self.ue)
            .copied()
            .collect();
        for (i, a) in nodes.iter().enumerate() {
            for b in nodes.iter().skip(i + 1) {
                if distance(*a, *b) == 0.0 {
                    return Err(SimError::CoincidentPositions { context: "Scene" });
                }
            }
        }
        Ok(())
    }
}

/// Curve identity within a trial record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NcrUnclamped,
    NcrClamped,
    RisAo,
    RisDft,
    RisHwi,
    DirectOnly,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::NcrUnclamped => "ncr_unclamped",
            Method::NcrClamped => "ncr_clamped",
            Method::RisAo => "ris_ao",
            Method::RisDft => "ris_dft",
            Method::RisHwi => "ris_hwi",
            Method::DirectOnly => "direct_only",
        }
    }
}

/// One trial outcome for one curve at one sweep point.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub scenario: ScenarioKind,
    pub sweep_value: f64,
    pub method: Method,
    /// Presentation label; distinguishes curve variants sharing a method
    /// (gain settings, interference baselines).
    pub curve: String,
    pub trial_index: usize,
    pub rate_bps: f64,
    pub sinr_db: f64,
}

/// Mean and standard error of one curve at one sweep point.
#[derive(Debug, Clone)]
pub struct CurveAggregate {
    pub sweep_value: f64,
    pub curve: String,
    pub mean_rate_bps: f64,
    pub stderr_rate_bps: f64,
    pub trials: usize,
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub scenario: ScenarioKind,
    pub aggregates: Vec<CurveAggregate>,
    pub raw: Vec<TrialRecord>,
}

/// Runs `n_trials` closures in parallel, preserving trial order in the result.
pub fn run_trials<T: Send>(n_trials: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n_trials).into_par_iter().map(f).collect()
}

/// Index-ordered mean and standard error (s / sqrt(n), sample std).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloStats {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Runs a scalar-valued trial function over derived rng substreams and
/// aggregates. Identical master seed gives identical stats; completion order
/// cannot matter because each trial derives its own stream and the reduction
/// is index-ordered.
pub fn monte_carlo(
    trial_fn: impl Fn(usize, &mut ChaCha8Rng) -> f64 + Sync,
    n_trials: usize,
    master_seed: u64,
) -> MonteCarloStats {
    let values = run_trials(n_trials, |t| {
        let mut rng = substream(master_seed, &[t as u64]);
        trial_fn(t, &mut rng)
    });
    let (mean, stderr) = mean_stderr(&values);
    MonteCarloStats { mean, stderr, n: n_trials }
}

/// Search outcome of [`find_min_ris_elements`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(usize),
    /// Even `m_max` elements cannot reach the target.
    Unreachable,
}

impl SearchOutcome {
    pub fn found(self) -> Option<usize> {
        match self {
            SearchOutcome::Found(m) => Some(m),
            SearchOutcome::Unreachable => None,
        }
    }
}

/// Smallest element count whose rate reaches `target_rate`.
///
/// Exponential bracketing then bisection on the (monotone-evaluable) rate,
/// with a final linear confirmation that the predecessor really fails.
/// Evaluations are memoized, so the expensive closure runs once per distinct
/// element count.
pub fn find_min_ris_elements(
    target_rate: f64,
    rate_of_m: &mut dyn FnMut(usize) -> f64,
    m_max: usize,
) -> SearchOutcome {
    assert!(m_max >= 1, "m_max must be at least 1");
    let mut memo = std::collections::BTreeMap::new();
    let mut eval = |m: usize, memo: &mut std::collections::BTreeMap<usize, f64>| -> f64 {
        *memo.entry(m).or_insert_with(|| rate_of_m(m))
    };

    if eval(1, &mut memo) >= target_rate {
        return SearchOutcome::Found(1);
    }
    let mut lo = 1usize;
    let mut hi = 2usize.min(m_max);
    while hi < m_max && eval(hi, &mut memo) < target_rate {
        lo = hi;
        hi = (hi * 2).min(m_max);
    }
    if eval(hi, &mut memo) < target_rate {
        return SearchOutcome::Unreachable;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval(mid, &mut memo) >= target_rate {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    while hi > 1 && eval(hi - 1, &mut memo) >= target_rate {
        hi -= 1;
    }
    SearchOutcome::Found(hi)
}

/// 10 log10 with a floor for zero/negative SINR.
pub(crate) fn sinr_db(sinr: f64) -> f64 {
    if sinr > 0.0 {
        10.0 * sinr.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Aggregates per-trial rates curve by curve in deterministic order.
pub(crate) fn aggregate_records(
    records: &[TrialRecord],
    trials: usize,
) -> Vec<CurveAggregate> {
    // group by (sweep_value bits, curve) preserving first-seen order
    let mut order: Vec<(u64, String)> = Vec::new();
    let mut groups: std::collections::HashMap<(u64, String), Vec<f64>> =
        std::collections::HashMap::new();
    for r in records {
        let key = (r.sweep_value.to_bits(), r.curve.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r.rate_bps);
    }
    order
        .into_iter()
        .map(|key| {
            let xs = &groups[&key];
            let (mean, stderr) = mean_stderr(xs);
            CurveAggregate {
                sweep_value: f64::from_bits(key.0),
                curve: key.1,
                mean_rate_bps: mean,
                stderr_rate_bps: stderr,
                trials,
            }
        })
        .collect()
}
