//! Weighbridge traffic simulation: queue, passive-queue and dissatisfaction
//! frequencies per option and scenario.

mod config;
mod model;
mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use simcda_des::derive_seed;

pub use config::{ArrivalProcess, CapacityScope, Delay, ServiceTime, SimConfig};
pub use model::{simulate_once, simulate_with_diagnostics, RunDiagnostics};
pub use table::{run_simulation_table, SimCell, SimulationTable};

use crate::error::{Error, Result};
use crate::option::OptionSpec;
use crate::scenario::{Scenario, ScenarioSet};

/// Lorry percentage at `hour_of_day` for a day whose average is `daily_ltp`.
///
/// Inside the peak window the share is `peak_ltp`; the remaining hours carry
/// whatever keeps the 24-hour average at `daily_ltp`.
pub fn temporal_ltp(hour_of_day: f64, daily_ltp: f64, config: &SimConfig) -> Result<f64> {
    if !(0.0..24.0).contains(&hour_of_day) {
        return Err(Error::validation("hour_of_day", format!("{hour_of_day} not in [0, 24)")));
    }
    let in_peak = config.peak_start_hour <= hour_of_day && hour_of_day < config.peak_end_hour;
    let peak_hours = config.peak_hours();
    let ltp = if in_peak {
        config.peak_ltp
    } else {
        (daily_ltp - config.peak_ltp * peak_hours / 24.0) * (24.0 / (24.0 - peak_hours))
    };
    if !(0.0..=100.0).contains(&ltp) {
        return Err(Error::validation(
            "simulation.peak_ltp",
            format!("daily lorry share {daily_ltp}% is incompatible with a {}% peak (off-peak share {ltp:.2}%)", config.peak_ltp),
        ));
    }
    Ok(ltp)
}

/// How a customer experienced the pre-weighbridge point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueKind {
    None,
    /// Held up by a backlog of its own vehicle type.
    NonPassive,
    /// Held up by a backlog of the other vehicle type.
    Passive,
}

/// Dissatisfaction in percent.
///
/// | temperament, company | no queue | non-passive | passive |
/// |----------------------|----------|-------------|---------|
/// | good, not alone      | 0        | 20          | 50      |
/// | good, alone          | 0        | 50          | 80      |
/// | bad, not alone       | 0        | 40          | 70      |
/// | bad, alone           | 0        | 70          | 100     |
pub fn dissatisfaction(bad_temper: bool, alone: bool, queue: QueueKind) -> u8 {
    match (queue, bad_temper, alone) {
        (QueueKind::None, _, _) => 0,
        (QueueKind::NonPassive, false, false) => 20,
        (QueueKind::NonPassive, false, true) => 50,
        (QueueKind::NonPassive, true, false) => 40,
        (QueueKind::NonPassive, true, true) => 70,
        (QueueKind::Passive, false, false) => 50,
        (QueueKind::Passive, false, true) => 80,
        (QueueKind::Passive, true, false) => 70,
        (QueueKind::Passive, true, true) => 100,
    }
}

/// Customer-weighted frequencies in percent. For replicated runs the values
/// are replication means and the `_sd` fields their standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub queue_frequency: f64,
    pub passive_queue_frequency: f64,
    pub dissatisfaction_mean: f64,
    pub customers_processed: u64,
    pub queue_sd: f64,
    pub passive_sd: f64,
    pub dissatisfaction_sd: f64,
    pub replications: u32,
    /// Some replication ended with a runaway pre-weighbridge queue.
    pub unstable: bool,
}

impl SimStats {
    pub fn zero() -> Self {
        Self {
            queue_frequency: 0.0,
            passive_queue_frequency: 0.0,
            dissatisfaction_mean: 0.0,
            customers_processed: 0,
            queue_sd: 0.0,
            passive_sd: 0.0,
            dissatisfaction_sd: 0.0,
            replications: 0,
            unstable: false,
        }
    }

    /// Mean and sample standard deviation across replications.
    pub fn aggregate(runs: &[SimStats]) -> Self {
        let n = runs.len() as f64;
        let mean_sd = |f: fn(&SimStats) -> f64| -> (f64, f64) {
            let mean = runs.iter().map(f).sum::<f64>() / n;
            if runs.len() < 2 {
                return (mean, 0.0);
            }
            let var = runs.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var.sqrt())
        };
        let (q, q_sd) = mean_sd(|s| s.queue_frequency);
        let (p, p_sd) = mean_sd(|s| s.passive_queue_frequency);
        let (d, d_sd) = mean_sd(|s| s.dissatisfaction_mean);
        Self {
            queue_frequency: q,
            passive_queue_frequency: p,
            dissatisfaction_mean: d,
            customers_processed: runs.iter().map(|r| r.customers_processed).sum(),
            queue_sd: q_sd,
            passive_sd: p_sd,
            dissatisfaction_sd: d_sd,
            replications: runs.iter().map(|r| r.replications).sum(),
            unstable: runs.iter().any(|r| r.unstable),
        }
    }

    /// Probability-weighted combination of per-scenario statistics. Standard
    /// deviations combine as independent terms.
    pub fn weighted<'a>(cells: impl IntoIterator<Item = (f64, &'a SimStats)>) -> Self {
        let mut out = Self::zero();
        let (mut q_var, mut p_var, mut d_var) = (0.0, 0.0, 0.0);
        for (w, s) in cells {
            out.queue_frequency += w * s.queue_frequency;
            out.passive_queue_frequency += w * s.passive_queue_frequency;
            out.dissatisfaction_mean += w * s.dissatisfaction_mean;
            out.customers_processed += s.customers_processed;
            out.replications = out.replications.max(s.replications);
            out.unstable |= s.unstable;
            q_var += (w * s.queue_sd).powi(2);
            p_var += (w * s.passive_sd).powi(2);
            d_var += (w * s.dissatisfaction_sd).powi(2);
        }
        out.queue_sd = q_var.sqrt();
        out.passive_sd = p_var.sqrt();
        out.dissatisfaction_sd = d_var.sqrt();
        out
    }
}

/// Serial or rayon-parallel execution. Both give bit-identical results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Seed of replication `index`. Independent of option and scenario so that
/// every option sees the same arrival streams.
pub fn replication_seed(master_seed: u64, index: u32) -> u64 {
    derive_seed(master_seed, u64::from(index))
}

pub fn simulate_replicated(
    option: &OptionSpec,
    scenario: &Scenario,
    config: &SimConfig,
    master_seed: u64,
    execution: Execution,
) -> Result<SimStats> {
    config.validate("simulation")?;
    let run = |i: u32| simulate_once(option, scenario, config, replication_seed(master_seed, i));
    let runs: Vec<SimStats> = match execution {
        Execution::Serial => (0..config.replications).map(run).collect::<Result<_>>()?,
        Execution::Parallel => (0..config.replications)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?,
    };
    Ok(SimStats::aggregate(&runs))
}

/// Probability-weighted statistics of one option over the scenario set.
pub fn expected_stats(
    option: &OptionSpec,
    scenarios: &ScenarioSet,
    config: &SimConfig,
    master_seed: u64,
    execution: Execution,
) -> Result<SimStats> {
    let per_scenario = scenarios
        .scenarios()
        .iter()
        .map(|s| simulate_replicated(option, s, config, master_seed, execution))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimStats::weighted(
        scenarios
            .scenarios()
            .iter()
            .map(|s| s.probability)
            .zip(&per_scenario),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn peak_share() {
        assert_eq!(temporal_ltp(14.0, 44.17, &cfg()).unwrap(), 75.0);
        assert_eq!(temporal_ltp(12.0, 44.17, &cfg()).unwrap(), 75.0);
    }

    #[test]
    fn off_peak_share() {
        let x = temporal_ltp(3.0, 44.17, &cfg()).unwrap();
        assert!((x - 33.9).abs() <= 0.05, "{x}");
        // The window is half-open, so 18:00 is already off-peak.
        assert_eq!(temporal_ltp(18.0, 44.17, &cfg()).unwrap(), x);
    }

    #[test]
    fn daily_average_is_preserved() {
        for ltp in [19.0, 44.17, 46.38, 48.59, 80.0] {
            // Piecewise constant on whole hours, so hourly midpoints integrate exactly.
            let mean: f64 = (0..24)
                .map(|h| temporal_ltp(f64::from(h) + 0.5, ltp, &cfg()).unwrap())
                .sum::<f64>()
                / 24.0;
            assert!((mean - ltp).abs() <= 1e-9, "{ltp}: {mean}");
        }
    }

    #[test]
    fn incompatible_daily_share() {
        assert!(temporal_ltp(3.0, 10.0, &cfg()).is_err());
        assert!(temporal_ltp(3.0, 99.0, &cfg()).is_err());
        assert!(temporal_ltp(24.0, 44.17, &cfg()).is_err());
    }

    #[test]
    fn dissatisfaction_table() {
        assert_eq!(dissatisfaction(false, true, QueueKind::Passive), 80);
        assert_eq!(dissatisfaction(true, true, QueueKind::Passive), 100);
        assert_eq!(dissatisfaction(false, false, QueueKind::NonPassive), 20);
        for bad in [false, true] {
            for alone in [false, true] {
                assert_eq!(dissatisfaction(bad, alone, QueueKind::None), 0);
            }
        }
    }

    #[test]
    fn expected_dissatisfaction_given_queue_kind() {
        // P(bad) = 0.1, P(alone) = 0.9.
        let expect = |kind| {
            let mut e = 0.0;
            for (bad, pb) in [(false, 0.9), (true, 0.1)] {
                for (alone, pa) in [(false, 0.1), (true, 0.9)] {
                    e += pb * pa * f64::from(dissatisfaction(bad, alone, kind));
                }
            }
            e
        };
        assert!((expect(QueueKind::NonPassive) - 49.0).abs() < 1e-12);
        assert!((expect(QueueKind::Passive) - 79.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_of_one_is_identity() {
        let s = SimStats {
            queue_frequency: 3.0,
            passive_queue_frequency: 1.0,
            dissatisfaction_mean: 2.0,
            customers_processed: 10,
            replications: 1,
            ..SimStats::zero()
        };
        assert_eq!(SimStats::aggregate(&[s]), s);
    }

    #[test]
    fn weighted_of_zero_is_zero() {
        let z = SimStats::zero();
        let w = SimStats::weighted([(0.5, &z), (0.5, &z)]);
        assert_eq!(w.queue_frequency, 0.0);
        assert_eq!(w.dissatisfaction_mean, 0.0);
    }
}
