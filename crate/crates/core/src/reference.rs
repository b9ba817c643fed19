//! Published case-study inputs that have no formula behind them.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::mcda::BinaryAssessment;
use crate::option::OptionSpec;
use crate::port_sim::SimulationTable;

/// Per-scenario queue, passive-queue and dissatisfaction percentages for
/// the three options as reported by the original study's simulation. Used to
/// run the scoring pipeline without simulating.
pub const REFERENCE_SIMULATION_CSV: &str = include_str!("../data/reference_simulation.csv");

pub fn reference_simulation_table() -> Result<SimulationTable> {
    SimulationTable::read_csv(REFERENCE_SIMULATION_CSV.as_bytes())
}

/// Binary judgements per option derived from the option layout.
pub fn default_binaries(options: &[OptionSpec]) -> BTreeMap<u32, BinaryAssessment> {
    options
        .iter()
        .map(|o| (o.id, BinaryAssessment::for_option(o.requires_facility_build)))
        .collect()
}
