//! Criteria catalog, raw option × criterion matrix, normalization onto a
//! common 0–100 scale, weighting, and ranking.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cost_benefit::CostBreakdown;
use crate::error::{Error, Result};
use crate::port_sim::SimStats;
use crate::ranking::{Method, OptionTotal, RankingOutcome};

const WEIGHT_TOLERANCE: f64 = 1e-9;

pub mod ids {
    pub const COST_TOTAL: &str = "cost_total";
    pub const TRAFFIC_PROFIT: &str = "traffic_profit";
    pub const LOCAL_PROFITS: &str = "local_profits";
    pub const JOB_OPPORTUNITIES: &str = "job_opportunities";
    pub const ROAD_SAFETY: &str = "road_safety";
    pub const QUEUE_FREQUENCY: &str = "queue_frequency";
    pub const PASSIVE_QUEUE_FREQUENCY: &str = "passive_queue_frequency";
    pub const DISSATISFACTION: &str = "dissatisfaction";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Monetary,
    BinaryBenefit,
    PercentCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionDef {
    pub id: String,
    pub label: String,
    pub kind: CriterionKind,
    pub direction: Direction,
    pub weight: f64,
    /// Scored by the traffic simulation rather than known up front.
    pub simulation_derived: bool,
}

impl CriterionDef {
    fn new(
        id: &str,
        label: &str,
        kind: CriterionKind,
        direction: Direction,
        weight: f64,
        simulation_derived: bool,
    ) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind,
            direction,
            weight,
            simulation_derived,
        }
    }
}

/// The eight criteria with the stakeholder weights: port cost and profit
/// 0.25 each, customer criteria 0.1 each, local community 0.05 each.
pub fn default_criteria() -> Vec<CriterionDef> {
    use CriterionKind::*;
    use Direction::*;
    vec![
        CriterionDef::new(ids::COST_TOTAL, "Cost Total", Monetary, LowerBetter, 0.25, false),
        CriterionDef::new(ids::TRAFFIC_PROFIT, "Additional traffic profit", Monetary, HigherBetter, 0.25, false),
        CriterionDef::new(ids::LOCAL_PROFITS, "Local profits", BinaryBenefit, HigherBetter, 0.05, false),
        CriterionDef::new(ids::JOB_OPPORTUNITIES, "Job Opportunities", BinaryBenefit, HigherBetter, 0.05, false),
        CriterionDef::new(ids::ROAD_SAFETY, "Road safety", BinaryBenefit, HigherBetter, 0.1, false),
        CriterionDef::new(ids::QUEUE_FREQUENCY, "Queue frequency", PercentCost, LowerBetter, 0.1, true),
        CriterionDef::new(ids::PASSIVE_QUEUE_FREQUENCY, "Passive queue frequency", PercentCost, LowerBetter, 0.1, true),
        CriterionDef::new(ids::DISSATISFACTION, "Customer dissatisfaction", PercentCost, LowerBetter, 0.1, true),
    ]
}

/// Yes/no judgements for the non-monetary criteria that need no simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryAssessment {
    pub local_profits: bool,
    pub job_opportunities: bool,
    pub road_safety: bool,
}

impl BinaryAssessment {
    /// Every option keeps road safety and local trade; only the build
    /// options create jobs.
    pub fn for_option(requires_facility_build: bool) -> Self {
        Self {
            local_profits: true,
            job_opportunities: requires_facility_build,
            road_safety: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Score {
    Binary(bool),
    Number(f64),
}

impl Score {
    pub fn as_f64(self) -> f64 {
        match self {
            Score::Binary(true) => 100.0,
            Score::Binary(false) => 0.0,
            Score::Number(x) => x,
        }
    }
}

/// Raw scores: one row per option, one column per criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaMatrix {
    pub options: Vec<u32>,
    pub criteria: Vec<CriterionDef>,
    pub values: Vec<Vec<Score>>,
}

impl CriteriaMatrix {
    pub fn validate(&self) -> Result<()> {
        if self.options.is_empty() {
            return Err(Error::validation("matrix.options", "no options"));
        }
        if self.values.len() != self.options.len() {
            return Err(Error::validation("matrix.values", "one row per option required"));
        }
        for (row, &option) in self.values.iter().zip(&self.options) {
            if row.len() != self.criteria.len() {
                return Err(Error::MissingCell {
                    option,
                    criterion: self
                        .criteria
                        .get(row.len())
                        .map_or_else(|| "?".into(), |c| c.id.clone()),
                });
            }
            for (cell, c) in row.iter().zip(&self.criteria) {
                let ok = match (c.kind, cell) {
                    (CriterionKind::BinaryBenefit, Score::Binary(_)) => true,
                    (CriterionKind::BinaryBenefit, Score::Number(_)) => false,
                    (_, Score::Number(x)) => x.is_finite(),
                    (_, Score::Binary(_)) => false,
                };
                if !ok {
                    return Err(Error::validation(
                        format!("matrix[{option}].{}", c.id),
                        format!("{cell:?} is not a valid {:?} score", c.kind),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn criterion_index(&self, id: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.id == id)
    }

    pub fn cell(&self, option: u32, criterion: &str) -> Option<Score> {
        let row = self.options.iter().position(|&o| o == option)?;
        let col = self.criterion_index(criterion)?;
        Some(self.values[row][col])
    }
}

/// Build the option × criterion table from the monetary breakdowns, the
/// simulation statistics, and the binary judgements.
pub fn assemble_matrix(
    criteria: &[CriterionDef],
    breakdowns: &[CostBreakdown],
    sim_stats: &BTreeMap<u32, SimStats>,
    binaries: &BTreeMap<u32, BinaryAssessment>,
) -> Result<CriteriaMatrix> {
    if breakdowns.is_empty() {
        return Err(Error::validation("breakdowns", "no options to assemble"));
    }
    if sim_stats.is_empty() {
        return Err(Error::validation("sim_stats", "no simulation statistics supplied"));
    }
    let mut values = Vec::with_capacity(breakdowns.len());
    for b in breakdowns {
        let missing = |c: &CriterionDef| Error::MissingCell {
            option: b.option,
            criterion: c.id.clone(),
        };
        let row = criteria
            .iter()
            .map(|c| {
                let stats = sim_stats.get(&b.option);
                let binary = binaries.get(&b.option);
                let score = match c.id.as_str() {
                    ids::COST_TOTAL => Score::Number(b.cost_total),
                    ids::TRAFFIC_PROFIT => Score::Number(b.traffic_profit),
                    ids::LOCAL_PROFITS => Score::Binary(binary.ok_or_else(|| missing(c))?.local_profits),
                    ids::JOB_OPPORTUNITIES => Score::Binary(binary.ok_or_else(|| missing(c))?.job_opportunities),
                    ids::ROAD_SAFETY => Score::Binary(binary.ok_or_else(|| missing(c))?.road_safety),
                    ids::QUEUE_FREQUENCY => Score::Number(stats.ok_or_else(|| missing(c))?.queue_frequency),
                    ids::PASSIVE_QUEUE_FREQUENCY => {
                        Score::Number(stats.ok_or_else(|| missing(c))?.passive_queue_frequency)
                    }
                    ids::DISSATISFACTION => Score::Number(stats.ok_or_else(|| missing(c))?.dissatisfaction_mean),
                    _ => return Err(missing(c)),
                };
                Ok(score)
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    let matrix = CriteriaMatrix {
        options: breakdowns.iter().map(|b| b.option).collect(),
        criteria: criteria.to_vec(),
        values,
    };
    matrix.validate()?;
    Ok(matrix)
}

/// How monetary columns are mapped to 0–100.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonetaryScoring {
    /// Oriented min–max, same as the percentage criteria.
    #[default]
    MinMax,
    /// 100 for the best value, 0 for everything else.
    Indicator,
}

/// Scores on the common 0–100 scale, same layout as [`CriteriaMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    pub options: Vec<u32>,
    pub criteria: Vec<CriterionDef>,
    pub values: Vec<Vec<f64>>,
}

impl NormalizedMatrix {
    pub fn column(&self, col: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[col]).collect()
    }

    pub fn column_by_id(&self, id: &str) -> Option<Vec<f64>> {
        let col = self.criteria.iter().position(|c| c.id == id)?;
        Some(self.column(col))
    }

    pub fn validate(&self) -> Result<()> {
        if self.options.is_empty() || self.values.len() != self.options.len() {
            return Err(Error::validation("normalized.values", "one row per option required"));
        }
        for (row, &option) in self.values.iter().zip(&self.options) {
            if row.len() != self.criteria.len() {
                return Err(Error::validation(
                    format!("normalized[{option}]"),
                    "row length differs from criteria count",
                ));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::validation(format!("normalized[{option}]"), format!("non-finite score {x}")));
            }
        }
        Ok(())
    }
}

/// Oriented min–max onto 0–100; a column with no spread scores 100 throughout.
pub fn min_max_column(values: &[f64], direction: Direction) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return vec![100.0; values.len()];
    }
    values
        .iter()
        .map(|&x| match direction {
            Direction::LowerBetter => 100.0 * ((hi - x) / (hi - lo)),
            Direction::HigherBetter => 100.0 * ((x - lo) / (hi - lo)),
        })
        .collect()
}

fn indicator_column(values: &[f64], direction: Direction) -> Vec<f64> {
    let best = match direction {
        Direction::LowerBetter => values.iter().copied().fold(f64::INFINITY, f64::min),
        Direction::HigherBetter => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    values
        .iter()
        .map(|&x| if x == best { 100.0 } else { 0.0 })
        .collect()
}

pub fn normalize(matrix: &CriteriaMatrix, monetary: MonetaryScoring) -> Result<NormalizedMatrix> {
    matrix.validate()?;
    let rows = matrix.options.len();
    let mut values = vec![vec![0.0; matrix.criteria.len()]; rows];
    for (col, c) in matrix.criteria.iter().enumerate() {
        let raw: Vec<f64> = matrix.values.iter().map(|r| r[col].as_f64()).collect();
        let scored = match (c.kind, monetary) {
            // yes/no already sit at 100/0
            (CriterionKind::BinaryBenefit, _) => raw,
            (CriterionKind::Monetary, MonetaryScoring::Indicator) => indicator_column(&raw, c.direction),
            _ => min_max_column(&raw, c.direction),
        };
        for (row, v) in scored.into_iter().enumerate() {
            values[row][col] = v;
        }
    }
    Ok(NormalizedMatrix {
        options: matrix.options.clone(),
        criteria: matrix.criteria.clone(),
        values,
    })
}

/// Stakeholder weights by criterion id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    pub weights: BTreeMap<String, f64>,
}

impl WeightVector {
    pub fn new(weights: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let w = Self {
            weights: weights.into_iter().collect(),
        };
        w.validate("weights")?;
        Ok(w)
    }

    pub fn from_criteria(criteria: &[CriterionDef]) -> Self {
        Self {
            weights: criteria.iter().map(|c| (c.id.clone(), c.weight)).collect(),
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::validation(field, "no weights"));
        }
        if let Some((id, w)) = self.weights.iter().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::validation(format!("{field}.{id}"), format!("weight {w} is negative")));
        }
        let sum: f64 = self.weights.values().sum();
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::validation(field, format!("weights sum to {sum}, expected 1")));
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.weights.get(id).copied()
    }

    /// Keep only `keep` ids and rescale to sum 1.
    pub fn restricted(&self, keep: &BTreeSet<&str>) -> Result<Self> {
        let kept: BTreeMap<String, f64> = self
            .weights
            .iter()
            .filter(|(id, _)| keep.contains(id.as_str()))
            .map(|(id, w)| (id.clone(), *w))
            .collect();
        let sum: f64 = kept.values().sum();
        if kept.is_empty() || sum <= 0.0 {
            return Err(Error::validation("weights", "no weight left after restriction"));
        }
        Ok(Self {
            weights: kept.into_iter().map(|(id, w)| (id, w / sum)).collect(),
        })
    }
}

/// Weights aligned with the matrix columns; errors unless the id sets match.
pub(crate) fn aligned_weights(criteria: &[CriterionDef], weights: &WeightVector) -> Result<Vec<f64>> {
    let matrix_ids: BTreeSet<&str> = criteria.iter().map(|c| c.id.as_str()).collect();
    let weight_ids: BTreeSet<&str> = weights.weights.keys().map(String::as_str).collect();
    if matrix_ids != weight_ids {
        let missing: Vec<_> = matrix_ids.difference(&weight_ids).collect();
        let extra: Vec<_> = weight_ids.difference(&matrix_ids).collect();
        return Err(Error::validation(
            "weights",
            format!("criteria mismatch: missing {missing:?}, unknown {extra:?}"),
        ));
    }
    Ok(criteria.iter().map(|c| weights.weights[&c.id]).collect())
}

/// Σ_k score_ik · w_k per row.
pub(crate) fn row_totals(values: &[Vec<f64>], weights: &[f64], out: &mut [f64]) {
    for (total, row) in out.iter_mut().zip(values) {
        *total = row.iter().zip(weights).map(|(a, w)| a * w).sum();
    }
}

pub fn weighted_totals(
    normalized: &NormalizedMatrix,
    weights: &WeightVector,
    method: Method,
) -> Result<RankingOutcome> {
    normalized.validate()?;
    weights.validate("weights")?;
    let w = aligned_weights(&normalized.criteria, weights)?;
    let mut totals = vec![0.0; normalized.options.len()];
    row_totals(&normalized.values, &w, &mut totals);
    RankingOutcome::from_totals(
        method,
        normalized
            .options
            .iter()
            .zip(totals)
            .map(|(&option, total)| OptionTotal { option, total })
            .collect(),
    )
}

/// Normalize and weight every criterion.
pub fn dynamic_mcda(
    matrix: &CriteriaMatrix,
    weights: &WeightVector,
    monetary: MonetaryScoring,
) -> Result<RankingOutcome> {
    weighted_totals(&normalize(matrix, monetary)?, weights, Method::DynamicMcda)
}

/// The same analysis without the simulation-derived criteria; the surviving
/// weights are rescaled to sum to 1.
pub fn static_mcda(
    matrix: &CriteriaMatrix,
    weights: &WeightVector,
    monetary: MonetaryScoring,
) -> Result<RankingOutcome> {
    let (reduced, reduced_weights) = static_view(matrix, weights)?;
    weighted_totals(&normalize(&reduced, monetary)?, &reduced_weights, Method::StaticMcda)
}

/// The matrix and weights restricted to criteria known without simulation.
pub fn static_view(matrix: &CriteriaMatrix, weights: &WeightVector) -> Result<(CriteriaMatrix, WeightVector)> {
    aligned_weights(&matrix.criteria, weights)?;
    let keep: Vec<usize> = matrix
        .criteria
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.simulation_derived)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::validation(
            "criteria",
            "every criterion is simulation-derived; nothing left for a static analysis",
        ));
    }
    let reduced = CriteriaMatrix {
        options: matrix.options.clone(),
        criteria: keep.iter().map(|&i| matrix.criteria[i].clone()).collect(),
        values: matrix
            .values
            .iter()
            .map(|row| keep.iter().map(|&i| row[i]).collect())
            .collect(),
    };
    let ids: BTreeSet<&str> = reduced.criteria.iter().map(|c| c.id.as_str()).collect();
    let w = weights.restricted(&ids)?;
    Ok((reduced, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{reference_matrix, reference_normalized};
    use proptest::prelude::*;

    fn weights() -> WeightVector {
        WeightVector::from_criteria(&default_criteria())
    }

    #[test]
    fn default_weights_sum_to_one() {
        weights().validate("weights").unwrap();
    }

    #[test]
    fn assembled_cells() {
        let m = reference_matrix();
        assert_eq!(m.cell(2, ids::QUEUE_FREQUENCY), Some(Score::Number(0.06)));
        assert_eq!(m.cell(1, ids::JOB_OPPORTUNITIES), Some(Score::Binary(false)));
        assert_eq!(m.cell(3, ids::JOB_OPPORTUNITIES), Some(Score::Binary(true)));
    }

    #[test]
    fn assemble_requires_simulation_stats() {
        let b = crate::testing::reference_breakdowns();
        let binaries = crate::testing::reference_binaries();
        let err = assemble_matrix(&default_criteria(), &b, &BTreeMap::new(), &binaries).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        let mut stats = crate::testing::reference_stats();
        stats.remove(&3);
        let err = assemble_matrix(&default_criteria(), &b, &stats, &binaries).unwrap_err();
        assert!(matches!(err, Error::MissingCell { option: 3, .. }), "{err}");
    }

    #[test]
    fn normalized_percent_columns() {
        let n = normalize(&reference_matrix(), MonetaryScoring::MinMax).unwrap();
        let q = n.column_by_id(ids::QUEUE_FREQUENCY).unwrap();
        assert_eq!(q[0], 0.0);
        assert_eq!(q[1], 100.0);
        assert!((q[2] - 30.4).abs() <= 0.05, "{}", q[2]);
        let p = n.column_by_id(ids::PASSIVE_QUEUE_FREQUENCY).unwrap();
        assert!((p[2] - 35.0).abs() <= 0.5, "{}", p[2]);
        let d = n.column_by_id(ids::DISSATISFACTION).unwrap();
        assert!((d[2] - 31.0).abs() <= 0.5, "{}", d[2]);
        assert_eq!(n.column_by_id(ids::TRAFFIC_PROFIT).unwrap(), [100.0; 3]);
        assert_eq!(n.column_by_id(ids::COST_TOTAL).unwrap(), [100.0, 0.0, 0.0]);
        assert_eq!(n.column_by_id(ids::JOB_OPPORTUNITIES).unwrap(), [0.0, 100.0, 100.0]);
    }

    #[test]
    fn indicator_mode_agrees_on_reference_costs() {
        let a = normalize(&reference_matrix(), MonetaryScoring::MinMax).unwrap();
        let b = normalize(&reference_matrix(), MonetaryScoring::Indicator).unwrap();
        assert_eq!(a.column_by_id(ids::COST_TOTAL), b.column_by_id(ids::COST_TOTAL));
        assert_eq!(a.column_by_id(ids::TRAFFIC_PROFIT), b.column_by_id(ids::TRAFFIC_PROFIT));
    }

    #[test]
    fn dynamic_totals() {
        let r = weighted_totals(&reference_normalized(), &weights(), Method::DynamicMcda).unwrap();
        assert!((r.total_of(1).unwrap() - 65.0).abs() <= 0.01);
        assert!((r.total_of(2).unwrap() - 75.0).abs() <= 0.01);
        assert!((r.total_of(3).unwrap() - 54.64).abs() <= 0.01);
        assert_eq!(r.order, [2, 1, 3]);
    }

    #[test]
    fn single_criterion_weight_projects_column() {
        let n = reference_normalized();
        for (col, c) in n.criteria.iter().enumerate() {
            let w = WeightVector::new(
                n.criteria
                    .iter()
                    .map(|d| (d.id.clone(), if d.id == c.id { 1.0 } else { 0.0 })),
            )
            .unwrap();
            let r = weighted_totals(&n, &w, Method::DynamicMcda).unwrap();
            let totals: Vec<f64> = r.totals.iter().map(|t| t.total).collect();
            assert_eq!(totals, n.column(col));
        }
    }

    #[test]
    fn uniform_matrix_ties_by_id() {
        let mut n = reference_normalized();
        for row in &mut n.values {
            row.iter_mut().for_each(|v| *v = 50.0);
        }
        let r = weighted_totals(&n, &weights(), Method::DynamicMcda).unwrap();
        assert_eq!(r.order, [1, 2, 3]);
    }

    #[test]
    fn weight_mismatch_is_an_error() {
        let mut w = weights();
        let v = w.weights.remove(ids::ROAD_SAFETY).unwrap();
        w.weights.insert("something_else".into(), v);
        assert!(weighted_totals(&reference_normalized(), &w, Method::DynamicMcda).is_err());
    }

    #[test]
    fn static_totals() {
        let r = static_mcda(&reference_matrix(), &weights(), MonetaryScoring::MinMax).unwrap();
        assert!((r.total_of(1).unwrap() - 92.86).abs() <= 0.01);
        assert!((r.total_of(2).unwrap() - 64.29).abs() <= 0.01);
        assert!((r.total_of(3).unwrap() - 64.29).abs() <= 0.01);
        assert_eq!(r.best(), 1);
        assert_eq!(r.method, Method::StaticMcda);
    }

    #[test]
    fn static_without_simulation_criteria_matches_dynamic() {
        let mut m = reference_matrix();
        let keep: Vec<usize> = (0..5).collect();
        m.criteria = keep.iter().map(|&i| m.criteria[i].clone()).collect();
        m.values = m.values.iter().map(|r| keep.iter().map(|&i| r[i]).collect()).collect();
        let w = WeightVector::new(m.criteria.iter().map(|c| (c.id.clone(), 0.2))).unwrap();
        let s = static_mcda(&m, &w, MonetaryScoring::MinMax).unwrap();
        let d = dynamic_mcda(&m, &w, MonetaryScoring::MinMax).unwrap();
        assert_eq!(s.totals, d.totals);
    }

    #[test]
    fn static_needs_a_surviving_criterion() {
        let mut m = reference_matrix();
        m.criteria.iter_mut().for_each(|c| c.simulation_derived = true);
        assert!(static_mcda(&m, &weights(), MonetaryScoring::MinMax).is_err());
    }

    fn weight_vec() -> impl Strategy<Value = WeightVector> {
        prop::collection::vec(0.01f64..1.0, 8).prop_map(|raw| {
            let sum: f64 = raw.iter().sum();
            WeightVector {
                weights: default_criteria()
                    .into_iter()
                    .zip(raw)
                    .map(|(c, w)| (c.id, w / sum))
                    .collect(),
            }
        })
    }

    fn totals(n: &NormalizedMatrix, w: &WeightVector) -> Vec<f64> {
        let w = aligned_weights(&n.criteria, w).unwrap();
        let mut out = vec![0.0; n.options.len()];
        row_totals(&n.values, &w, &mut out);
        out
    }

    proptest! {
        #[test]
        fn normalized_cells_in_range(xs in prop::collection::vec(-1e6f64..1e6, 2..6), lower in any::<bool>()) {
            let dir = if lower { Direction::LowerBetter } else { Direction::HigherBetter };
            let col = min_max_column(&xs, dir);
            prop_assert!(col.iter().all(|v| (0.0..=100.0).contains(v)));
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                let (best, worst) = if lower { (lo, hi) } else { (hi, lo) };
                for (x, v) in xs.iter().zip(&col) {
                    if *x == best { prop_assert_eq!(*v, 100.0); }
                    if *x == worst { prop_assert_eq!(*v, 0.0); }
                }
            }
        }

        #[test]
        fn totals_affine_in_weights(w1 in weight_vec(), w2 in weight_vec(), alpha in 0.0f64..1.0) {
            let n = reference_normalized();
            let mix = WeightVector {
                weights: w1.weights.iter().map(|(k, a)| (k.clone(), alpha * a + (1.0 - alpha) * w2.weights[k])).collect(),
            };
            let lhs = totals(&n, &mix);
            let (t1, t2) = (totals(&n, &w1), totals(&n, &w2));
            for i in 0..lhs.len() {
                prop_assert!((lhs[i] - (alpha * t1[i] + (1.0 - alpha) * t2[i])).abs() <= 1e-9);
            }
        }

        #[test]
        fn scaling_a_column_changes_nothing(col in 0usize..8, factor in 0.001f64..1000.0) {
            let m = reference_matrix();
            prop_assume!(m.criteria[col].kind != CriterionKind::BinaryBenefit);
            let mut scaled = m.clone();
            for row in &mut scaled.values {
                row[col] = Score::Number(row[col].as_f64() * factor);
            }
            let a = normalize(&m, MonetaryScoring::MinMax).unwrap();
            let b = normalize(&scaled, MonetaryScoring::MinMax).unwrap();
            for (x, y) in a.column(col).iter().zip(b.column(col)) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }

        #[test]
        fn permuting_options_permutes_totals(perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
            let m = reference_matrix();
            let shuffled = CriteriaMatrix {
                options: perm.iter().map(|&i| m.options[i]).collect(),
                criteria: m.criteria.clone(),
                values: perm.iter().map(|&i| m.values[i].clone()).collect(),
            };
            let a = dynamic_mcda(&m, &weights(), MonetaryScoring::MinMax).unwrap();
            let b = dynamic_mcda(&shuffled, &weights(), MonetaryScoring::MinMax).unwrap();
            for t in &b.totals {
                prop_assert_eq!(Some(t.total), a.total_of(t.option));
            }
            prop_assert_eq!(a.order, b.order);
        }
    }
}
