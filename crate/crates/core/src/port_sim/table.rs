use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_replicated, Execution, SimConfig, SimStats};
use crate::error::{Error, Result};
use crate::option::OptionSpec;
use crate::scenario::{Scenario, ScenarioSet};

/// Replicated statistics of one (option, scenario) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub option: u32,
    pub scenario: Scenario,
    pub stats: SimStats,
}

/// Flat CSV row: `option,scenario,vtg,ltp,probability,queue_pct,...,n`.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    option: u32,
    scenario: u32,
    vtg: f64,
    ltp: f64,
    probability: f64,
    queue_pct: f64,
    passive_pct: f64,
    dissat_pct: f64,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    queue_sd: Option<f64>,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    passive_sd: Option<f64>,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    dissat_sd: Option<f64>,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    n: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimulationTable {
    pub cells: Vec<SimCell>,
}

impl SimulationTable {
    pub fn cell(&self, option: u32, scenario: u32) -> Option<&SimCell> {
        self.cells
            .iter()
            .find(|c| c.option == option && c.scenario.id == scenario)
    }

    pub fn options(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.cells.iter().map(|c| c.option).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Scenario-probability-weighted statistics for every option in the table.
    pub fn expected_by_option(&self, scenarios: &ScenarioSet) -> Result<BTreeMap<u32, SimStats>> {
        self.options()
            .into_iter()
            .map(|option| {
                let cells = scenarios
                    .scenarios()
                    .iter()
                    .map(|s| {
                        self.cell(option, s.id)
                            .map(|c| (s.probability, &c.stats))
                            .ok_or(Error::MissingScenario(s.id))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((option, SimStats::weighted(cells)))
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for c in &self.cells {
            w.serialize(CsvRow {
                option: c.option,
                scenario: c.scenario.id,
                vtg: c.scenario.vtg,
                ltp: c.scenario.ltp,
                probability: c.scenario.probability,
                queue_pct: c.stats.queue_frequency,
                passive_pct: c.stats.passive_queue_frequency,
                dissat_pct: c.stats.dissatisfaction_mean,
                queue_sd: Some(c.stats.queue_sd),
                passive_sd: Some(c.stats.passive_sd),
                dissat_sd: Some(c.stats.dissatisfaction_sd),
                n: Some(c.stats.customers_processed),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parse a table in the CSV layout written by [`Self::write_csv`]. The
    /// `_sd` and `n` columns may be left empty; lines starting with `#` are
    /// skipped.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut cells = Vec::new();
        for (line, row) in r.deserialize::<CsvRow>().enumerate() {
            let row = row?;
            let pct = [row.queue_pct, row.passive_pct, row.dissat_pct];
            if pct.iter().any(|x| !(0.0..=100.0).contains(x)) {
                return Err(Error::validation(
                    format!("simulation_table[{line}]"),
                    "percentages must lie in [0, 100]",
                ));
            }
            cells.push(SimCell {
                option: row.option,
                scenario: Scenario {
                    id: row.scenario,
                    vtg: row.vtg,
                    ltp: row.ltp,
                    probability: row.probability,
                },
                stats: SimStats {
                    queue_frequency: row.queue_pct,
                    passive_queue_frequency: row.passive_pct,
                    dissatisfaction_mean: row.dissat_pct,
                    customers_processed: row.n.unwrap_or(0),
                    queue_sd: row.queue_sd.unwrap_or(0.0),
                    passive_sd: row.passive_sd.unwrap_or(0.0),
                    dissatisfaction_sd: row.dissat_sd.unwrap_or(0.0),
                    replications: 0,
                    unstable: false,
                },
            });
        }
        if cells.is_empty() {
            return Err(Error::validation("simulation_table", "table has no rows"));
        }
        Ok(Self { cells })
    }
}

/// Simulate every (option, scenario) cell, options outermost.
pub fn run_simulation_table(
    options: &[OptionSpec],
    scenarios: &ScenarioSet,
    config: &SimConfig,
    master_seed: u64,
    execution: Execution,
) -> Result<SimulationTable> {
    let jobs: Vec<(&OptionSpec, &Scenario)> = options
        .iter()
        .flat_map(|o| scenarios.scenarios().iter().map(move |s| (o, s)))
        .collect();
    let run = |(o, s): &(&OptionSpec, &Scenario)| -> Result<SimCell> {
        Ok(SimCell {
            option: o.id,
            scenario: **s,
            stats: simulate_replicated(o, s, config, master_seed, execution)?,
        })
    };
    let cells = match execution {
        Execution::Serial => jobs.iter().map(run).collect::<Result<Vec<_>>>()?,
        Execution::Parallel => jobs.par_iter().map(run).collect::<Result<Vec<_>>>()?,
    };
    Ok(SimulationTable { cells })
}
