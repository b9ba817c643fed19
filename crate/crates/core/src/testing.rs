//! Fixtures shared by unit tests.

use std::collections::BTreeMap;

use crate::cost_benefit::{expected_breakdown, CostBreakdown, FinancialParams};
use crate::mcda::{assemble_matrix, default_criteria, normalize, BinaryAssessment, CriteriaMatrix, MonetaryScoring, NormalizedMatrix};
use crate::option::OptionSpec;
use crate::port_sim::SimStats;
use crate::reference::default_binaries;
use crate::scenario::DiscreteDistribution;

pub fn reference_breakdowns() -> Vec<CostBreakdown> {
    let vtg = DiscreteDistribution::default_vtg();
    OptionSpec::defaults()
        .iter()
        .map(|o| expected_breakdown(o, &vtg, &FinancialParams::default()).unwrap())
        .collect()
}

/// Summary-level simulation results (two-decimal expected values).
pub fn reference_stats() -> BTreeMap<u32, SimStats> {
    [(1, 9.16, 2.64, 5.28), (2, 0.06, 0.01, 0.03), (3, 6.39, 1.72, 3.65)]
        .into_iter()
        .map(|(o, q, p, d)| {
            (
                o,
                SimStats {
                    queue_frequency: q,
                    passive_queue_frequency: p,
                    dissatisfaction_mean: d,
                    ..SimStats::zero()
                },
            )
        })
        .collect()
}

pub fn reference_binaries() -> BTreeMap<u32, BinaryAssessment> {
    default_binaries(&OptionSpec::defaults())
}

pub fn reference_matrix() -> CriteriaMatrix {
    assemble_matrix(&default_criteria(), &reference_breakdowns(), &reference_stats(), &reference_binaries()).unwrap()
}

pub fn reference_normalized() -> NormalizedMatrix {
    normalize(&reference_matrix(), MonetaryScoring::MinMax).unwrap()
}
