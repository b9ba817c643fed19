//! End-to-end run: simulate (or take an injected table) → cost breakdowns →
//! criteria matrix → normalization → CBA, static and dynamic rankings →
//! sensitivity → report files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::cost_benefit::{cba_rank, expected_breakdown, CostBreakdown};
use crate::error::{Error, Result};
use crate::mcda::{
    aligned_weights, assemble_matrix, normalize, static_view, weighted_totals, CriteriaMatrix, NormalizedMatrix, Score,
};
use crate::port_sim::{run_simulation_table, Execution, SimStats, SimulationTable};
use crate::ranking::{Method, RankingOutcome};
use crate::sensitivity::{run_analysis, SensitivityReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the simulation statistics come from.
#[derive(Debug, Clone)]
pub enum SimulationSource {
    Simulate(Execution),
    /// A per-scenario table supplied by the caller; nothing is simulated.
    Injected(SimulationTable),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the configuration (output directory excluded).
    pub config_hash: String,
    pub master_seed: u64,
    pub tool_version: String,
    /// `simulated` or `injected`.
    pub simulation_source: String,
    /// SHA-256 of the simulation table in its CSV form.
    pub simulation_hash: String,
}

/// Everything downstream of the simulation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scoring {
    pub expected_stats: BTreeMap<u32, SimStats>,
    pub breakdowns: Vec<CostBreakdown>,
    pub raw: CriteriaMatrix,
    pub normalized: NormalizedMatrix,
    /// `weighted[option row][criterion]` = normalized score × weight.
    pub weighted: Vec<Vec<f64>>,
    pub cba: RankingOutcome,
    pub static_mcda: RankingOutcome,
    pub dynamic_mcda: RankingOutcome,
}

impl Scoring {
    pub fn ranking(&self, method: Method) -> &RankingOutcome {
        match method {
            Method::Cba => &self.cba,
            Method::StaticMcda => &self.static_mcda,
            Method::DynamicMcda => &self.dynamic_mcda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub provenance: Provenance,
    pub config: PipelineConfig,
    pub simulation: SimulationTable,
    pub scoring: Scoring,
    pub sensitivity: Vec<SensitivityReport>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn config_hash(config: &PipelineConfig) -> Result<String> {
    let mut c = config.clone();
    c.output_directory = PathBuf::new();
    Ok(sha256_hex(&serde_json::to_vec(&c)?))
}

pub fn table_hash(table: &SimulationTable) -> Result<String> {
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    Ok(sha256_hex(&buf))
}

/// Simulate every configured option under every scenario.
pub fn simulate(config: &PipelineConfig, execution: Execution) -> Result<SimulationTable> {
    stage("simulation", (|| {
        config.validate()?;
        run_simulation_table(
            &config.options,
            &config.scenario_set()?,
            &config.simulation,
            config.master_seed,
            execution,
        )
    })())
}

/// Score and rank the configured options given a simulation table.
pub fn score(config: &PipelineConfig, table: &SimulationTable) -> Result<Scoring> {
    config.validate()?;
    let scenarios = stage("scenarios", config.scenario_set())?;
    let expected_stats = stage("simulation", {
        let table_options = table.options();
        let wanted: Vec<u32> = config.options.iter().map(|o| o.id).collect();
        match wanted.iter().find(|o| !table_options.contains(o)) {
            Some(o) => Err(Error::validation(
                "simulation_table",
                format!("no rows for option {o}"),
            )),
            None => table
                .expected_by_option(&scenarios)
                .map(|m| m.into_iter().filter(|(o, _)| wanted.contains(o)).collect()),
        }
    })?;
    let breakdowns = stage(
        "costs",
        config
            .options
            .iter()
            .map(|o| expected_breakdown(o, &config.vtg, &config.financial))
            .collect::<Result<Vec<_>>>(),
    )?;
    let criteria = config.criteria_defs();
    let weights = &config.criteria.weights;
    let raw = stage(
        "assemble",
        assemble_matrix(&criteria, &breakdowns, &expected_stats, &config.binaries()),
    )?;
    let normalized = stage("normalize", normalize(&raw, config.criteria.monetary_scoring))?;
    let aligned = stage("rank", aligned_weights(&normalized.criteria, weights))?;
    let weighted = normalized
        .values
        .iter()
        .map(|row| row.iter().zip(&aligned).map(|(s, w)| s * w).collect())
        .collect();
    let cba = stage("rank", cba_rank(&breakdowns))?;
    let dynamic_mcda = stage("rank", weighted_totals(&normalized, weights, Method::DynamicMcda))?;
    let static_mcda = stage("rank", (|| {
        let (reduced, reduced_weights) = static_view(&raw, weights)?;
        weighted_totals(
            &normalize(&reduced, config.criteria.monetary_scoring)?,
            &reduced_weights,
            Method::StaticMcda,
        )
    })())?;
    Ok(Scoring {
        expected_stats,
        breakdowns,
        raw,
        normalized,
        weighted,
        cba,
        static_mcda,
        dynamic_mcda,
    })
}

/// One report per configured sensitivity variant.
pub fn sensitivity(config: &PipelineConfig, scoring: &Scoring, execution: Execution) -> Result<Vec<SensitivityReport>> {
    stage(
        "sensitivity",
        config
            .sensitivity
            .variants
            .iter()
            .map(|v| {
                run_analysis(
                    &scoring.normalized,
                    &config.criteria.weights,
                    &config.sensitivity.for_variant(*v),
                    execution,
                )
            })
            .collect(),
    )
}

pub fn run_pipeline(config: &PipelineConfig, source: SimulationSource) -> Result<RunArtifact> {
    stage("config", config.validate())?;
    let (simulation, source_label, execution) = match source {
        SimulationSource::Simulate(execution) => (simulate(config, execution)?, "simulated", execution),
        SimulationSource::Injected(table) => (table, "injected", Execution::Parallel),
    };
    let scoring = score(config, &simulation)?;
    let sensitivity = sensitivity(config, &scoring, execution)?;
    let provenance = Provenance {
        config_hash: config_hash(config)?,
        master_seed: config.master_seed,
        tool_version: TOOL_VERSION.to_string(),
        simulation_source: source_label.to_string(),
        simulation_hash: table_hash(&simulation)?,
    };
    Ok(RunArtifact {
        provenance,
        config: config.clone(),
        simulation,
        scoring,
        sensitivity,
    })
}

fn provenance_line(p: &Provenance) -> String {
    format!(
        "# config_hash={} seed={} version={} simulation={}\n",
        p.config_hash, p.master_seed, p.tool_version, p.simulation_source
    )
}

fn score_cell(s: Score) -> String {
    match s {
        Score::Binary(true) => "yes".into(),
        Score::Binary(false) => "no".into(),
        Score::Number(x) => x.to_string(),
    }
}

/// Criteria as rows and options as columns, the layout of the study's score
/// tables.
fn criteria_by_option<F: Fn(usize, usize) -> String>(
    options: &[u32],
    criteria: &[(String, String)],
    cell: F,
    footer: Option<(&str, Vec<String>)>,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["criterion".to_string(), "label".to_string()];
    header.extend(options.iter().map(|o| format!("option_{o}")));
    w.write_record(&header)?;
    for (col, (id, label)) in criteria.iter().enumerate() {
        let mut rec = vec![id.clone(), label.clone()];
        rec.extend((0..options.len()).map(|row| cell(row, col)));
        w.write_record(&rec)?;
    }
    if let Some((name, values)) = footer {
        let mut rec = vec![name.to_string(), String::new()];
        rec.extend(values);
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn write_file(dir: &Path, name: &str, prefix: &str, body: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path)?;
    f.write_all(prefix.as_bytes())?;
    f.write_all(body)?;
    Ok(path)
}

/// Write the artifact's tables as CSV (each led by a provenance comment
/// line), the whole artifact as JSON, and the resolved configuration as
/// TOML. Output is a pure function of the artifact.
pub fn write_artifact(artifact: &RunArtifact, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let p = provenance_line(&artifact.provenance);
    let s = &artifact.scoring;
    let options = &s.raw.options;
    let criteria: Vec<(String, String)> = s.raw.criteria.iter().map(|c| (c.id.clone(), c.label.clone())).collect();
    let mut written = Vec::new();

    let mut sim = Vec::new();
    artifact.simulation.write_csv(&mut sim)?;
    written.push(write_file(dir, "simulation.csv", &p, &sim)?);

    let mut costs = csv::Writer::from_writer(Vec::new());
    for b in &s.breakdowns {
        costs.serialize(b)?;
    }
    let costs = costs.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    written.push(write_file(dir, "costs.csv", &p, &costs)?);

    let raw = criteria_by_option(options, &criteria, |r, c| score_cell(s.raw.values[r][c]), None)?;
    written.push(write_file(dir, "raw_scores.csv", &p, &raw)?);
    let norm = criteria_by_option(options, &criteria, |r, c| s.normalized.values[r][c].to_string(), None)?;
    written.push(write_file(dir, "normalized_scores.csv", &p, &norm)?);
    let totals = options
        .iter()
        .map(|o| s.dynamic_mcda.total_of(*o).unwrap_or(f64::NAN).to_string())
        .collect();
    let weighted = criteria_by_option(
        options,
        &criteria,
        |r, c| s.weighted[r][c].to_string(),
        Some(("total", totals)),
    )?;
    written.push(write_file(dir, "weighted_scores.csv", &p, &weighted)?);

    let mut rankings = csv::Writer::from_writer(Vec::new());
    rankings.write_record(["method", "option", "total", "rank"])?;
    for r in [&s.cba, &s.static_mcda, &s.dynamic_mcda] {
        for t in &r.totals {
            let rank = r.order.iter().position(|o| *o == t.option).map_or(0, |i| i + 1);
            rankings.write_record([
                r.method.label().to_string(),
                t.option.to_string(),
                t.total.to_string(),
                rank.to_string(),
            ])?;
        }
    }
    let rankings = rankings.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    written.push(write_file(dir, "rankings.csv", &p, &rankings)?);

    let mut sens = csv::Writer::from_writer(Vec::new());
    sens.write_record(["variant", "option", "top_rank_pct", "rank_pcts", "iterations", "seed"])?;
    for r in &artifact.sensitivity {
        for (o, pct) in &r.top_rank_frequency {
            let ranks: Vec<String> = r.rank_distribution[o].iter().map(|x| x.to_string()).collect();
            sens.write_record([
                r.variant.label().to_string(),
                o.to_string(),
                pct.to_string(),
                ranks.join(";"),
                r.iterations.to_string(),
                r.seed.to_string(),
            ])?;
        }
    }
    let sens = sens.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    written.push(write_file(dir, "sensitivity.csv", &p, &sens)?);

    let json = serde_json::to_vec_pretty(artifact)?;
    written.push(write_file(dir, "artifact.json", "", &json)?);
    let toml = artifact.config.to_toml()?;
    written.push(write_file(dir, "config.toml", &p, toml.as_bytes())?);
    Ok(written)
}
