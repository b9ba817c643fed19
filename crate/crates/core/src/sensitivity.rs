//! Monte-Carlo robustness of the MCDA ranking.
//!
//! Each iteration multiplies the normalized scores (and, for one variant, the
//! weights) by independent `U(1 − a, 1 + a)` factors, recomputes the weighted
//! totals and records where every option lands.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use simcda_des::RandomStream;

use crate::error::{Error, Result};
use crate::mcda::{aligned_weights, ids, min_max_column, row_totals, Direction, NormalizedMatrix, WeightVector};
use crate::port_sim::Execution;
use crate::ranking::sort_positions;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Perturb every score except the frozen criteria.
    #[default]
    SelectedCriteria,
    /// Perturb every score.
    AllCriteria,
    /// Perturb every score and every weight.
    CriteriaAndWeights,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::SelectedCriteria, Variant::AllCriteria, Variant::CriteriaAndWeights];

    pub fn label(self) -> &'static str {
        match self {
            Variant::SelectedCriteria => "selected_criteria",
            Variant::AllCriteria => "all_criteria",
            Variant::CriteriaAndWeights => "criteria_and_weights",
        }
    }

    /// Criteria left untouched when no explicit list is configured.
    pub fn default_frozen(self) -> BTreeSet<String> {
        match self {
            Variant::SelectedCriteria => [ids::TRAFFIC_PROFIT, ids::LOCAL_PROFITS, ids::ROAD_SAFETY]
                .into_iter()
                .map(String::from)
                .collect(),
            Variant::AllCriteria | Variant::CriteriaAndWeights => BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub variant: Variant,
    /// Half-width of the multiplicative factor's range.
    pub amplitude: f64,
    pub iterations: u32,
    /// Criterion ids whose scores are never perturbed. `None` uses the
    /// variant's default set.
    pub frozen_criteria: Option<BTreeSet<String>>,
    /// Perturbed scores are floored here.
    pub clamp_floor: f64,
    pub seed: u64,
    /// Re-apply min–max scaling to each perturbed column before weighting,
    /// so every criterion again spans 0–100.
    pub renormalize: bool,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            variant: Variant::SelectedCriteria,
            amplitude: 0.1,
            iterations: 10_000,
            frozen_criteria: None,
            clamp_floor: 0.0,
            seed: 2015,
            renormalize: true,
        }
    }
}

impl PerturbationConfig {
    pub fn for_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn frozen(&self) -> BTreeSet<String> {
        self.frozen_criteria
            .clone()
            .unwrap_or_else(|| self.variant.default_frozen())
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(0.0..1.0).contains(&self.amplitude) {
            return Err(Error::validation(
                format!("{field}.amplitude"),
                format!("{} not in [0, 1)", self.amplitude),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::validation(format!("{field}.iterations"), "must be at least 1"));
        }
        if !self.clamp_floor.is_finite() {
            return Err(Error::validation(format!("{field}.clamp_floor"), "must be finite"));
        }
        Ok(())
    }
}

/// Top-rank and per-rank frequencies in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub variant: Variant,
    pub iterations: u32,
    pub amplitude: f64,
    pub seed: u64,
    pub top_rank_frequency: BTreeMap<u32, f64>,
    /// `rank_distribution[option][r]` is how often the option finished at
    /// position `r` (0 = best).
    pub rank_distribution: BTreeMap<u32, Vec<f64>>,
}

impl SensitivityReport {
    /// The option ranked first most often (lower id on a tie).
    pub fn most_frequent_winner(&self) -> u32 {
        let mut best: Option<(u32, f64)> = None;
        for (&o, &f) in &self.top_rank_frequency {
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((o, f));
            }
        }
        best.map(|(o, _)| o).expect("reports cover at least one option")
    }
}

/// Multiply each non-frozen cell by a `U(1 − amplitude, 1 + amplitude)`
/// draw and floor at `clamp_floor`. Draws are taken row by row over all
/// cells, frozen or not, so the stream position does not depend on the
/// frozen set.
pub fn perturb_scores(
    normalized: &NormalizedMatrix,
    frozen: &BTreeSet<String>,
    amplitude: f64,
    clamp_floor: f64,
    stream: &mut RandomStream,
) -> NormalizedMatrix {
    let mut out = normalized.clone();
    let mask: Vec<bool> = normalized.criteria.iter().map(|c| frozen.contains(&c.id)).collect();
    perturb_rows(&mut out.values, &mask, amplitude, clamp_floor, stream);
    out
}

fn perturb_rows(values: &mut [Vec<f64>], frozen: &[bool], amplitude: f64, floor: f64, stream: &mut RandomStream) {
    for row in values {
        for (cell, &fixed) in row.iter_mut().zip(frozen) {
            let alpha = factor(amplitude, stream);
            if !fixed {
                *cell = (*cell * alpha).max(floor);
            }
        }
    }
}

fn factor(amplitude: f64, stream: &mut RandomStream) -> f64 {
    if amplitude == 0.0 {
        // Keep the stream in step with the amplitude > 0 case.
        stream.uniform();
        1.0
    } else {
        stream.uniform_range(1.0 - amplitude, 1.0 + amplitude)
    }
}

/// Scale each weight by a `U(1 − amplitude, 1 + amplitude)` draw and rescale
/// to sum 1.
pub fn perturb_weights(weights: &WeightVector, amplitude: f64, stream: &mut RandomStream) -> WeightVector {
    let mut w: Vec<f64> = weights.weights.values().copied().collect();
    perturb_weight_slice(&mut w, amplitude, stream);
    WeightVector {
        weights: weights.weights.keys().cloned().zip(w).collect(),
    }
}

fn perturb_weight_slice(w: &mut [f64], amplitude: f64, stream: &mut RandomStream) {
    for x in w.iter_mut() {
        *x *= factor(amplitude, stream);
    }
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        for x in w.iter_mut() {
            *x /= sum;
        }
    }
}

/// Rank positions of one iteration, written into `ranks` (index into the
/// options vector, best first).
struct Iteration<'a> {
    base: &'a NormalizedMatrix,
    weights: &'a [f64],
    frozen: &'a [bool],
    config: &'a PerturbationConfig,
}

impl Iteration<'_> {
    fn run(&self, index: u32, scratch: &mut Scratch) {
        let mut stream = RandomStream::new(self.config.seed, u64::from(index));
        for (dst, src) in scratch.values.iter_mut().zip(&self.base.values) {
            dst.copy_from_slice(src);
        }
        perturb_rows(
            &mut scratch.values,
            self.frozen,
            self.config.amplitude,
            self.config.clamp_floor,
            &mut stream,
        );
        scratch.weights.copy_from_slice(self.weights);
        if self.config.variant == Variant::CriteriaAndWeights {
            perturb_weight_slice(&mut scratch.weights, self.config.amplitude, &mut stream);
        }
        if self.config.renormalize {
            for col in 0..self.base.criteria.len() {
                if self.frozen[col] {
                    continue;
                }
                let column: Vec<f64> = scratch.values.iter().map(|r| r[col]).collect();
                for (row, v) in min_max_column(&column, Direction::HigherBetter).into_iter().enumerate() {
                    scratch.values[row][col] = v;
                }
            }
        }
        row_totals(&scratch.values, &scratch.weights, &mut scratch.totals);
        for (i, p) in scratch.order.iter_mut().enumerate() {
            *p = i;
        }
        sort_positions(&self.base.options, &scratch.totals, &mut scratch.order);
        for (rank, &pos) in scratch.order.iter().enumerate() {
            scratch.counts[pos][rank] += 1;
        }
    }
}

#[derive(Clone)]
struct Scratch {
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
    totals: Vec<f64>,
    order: Vec<usize>,
    /// counts[option position][rank]
    counts: Vec<Vec<u64>>,
}

impl Scratch {
    fn new(base: &NormalizedMatrix) -> Self {
        let n = base.options.len();
        let k = base.criteria.len();
        Self {
            values: vec![vec![0.0; k]; n],
            weights: vec![0.0; k],
            totals: vec![0.0; n],
            order: vec![0; n],
            counts: vec![vec![0; n]; n],
        }
    }

    fn merge(mut self, other: Scratch) -> Scratch {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

/// Run the configured number of iterations. Iteration `i` draws from its own
/// stream derived from `(seed, i)`, so serial and parallel runs agree exactly.
pub fn run_analysis(
    normalized: &NormalizedMatrix,
    weights: &WeightVector,
    config: &PerturbationConfig,
    execution: Execution,
) -> Result<SensitivityReport> {
    config.validate("sensitivity")?;
    normalized.validate()?;
    weights.validate("weights")?;
    let w = aligned_weights(&normalized.criteria, weights)?;
    let frozen_ids = config.frozen();
    if let Some(unknown) = frozen_ids
        .iter()
        .find(|id| !normalized.criteria.iter().any(|c| &c.id == *id))
    {
        return Err(Error::validation(
            "sensitivity.frozen_criteria",
            format!("unknown criterion {unknown:?}"),
        ));
    }
    let frozen: Vec<bool> = normalized.criteria.iter().map(|c| frozen_ids.contains(&c.id)).collect();
    let job = Iteration {
        base: normalized,
        weights: &w,
        frozen: &frozen,
        config,
    };
    let counts = match execution {
        Execution::Serial => {
            let mut s = Scratch::new(normalized);
            for i in 0..config.iterations {
                job.run(i, &mut s);
            }
            s.counts
        }
        Execution::Parallel => {
            (0..config.iterations)
                .into_par_iter()
                .fold(
                    || Scratch::new(normalized),
                    |mut s, i| {
                        job.run(i, &mut s);
                        s
                    },
                )
                .reduce(|| Scratch::new(normalized), Scratch::merge)
                .counts
        }
    };
    let n = f64::from(config.iterations);
    let rank_distribution: BTreeMap<u32, Vec<f64>> = normalized
        .options
        .iter()
        .zip(&counts)
        .map(|(&o, c)| (o, c.iter().map(|&k| 100.0 * k as f64 / n).collect()))
        .collect();
    let top_rank_frequency = rank_distribution.iter().map(|(&o, r)| (o, r[0])).collect();
    Ok(SensitivityReport {
        variant: config.variant,
        iterations: config.iterations,
        amplitude: config.amplitude,
        seed: config.seed,
        top_rank_frequency,
        rank_distribution,
    })
}
