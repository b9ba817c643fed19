//! `simcda` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use simcda_core::config::{load_config, PipelineConfig};
use simcda_core::pipeline::{self, run_pipeline, write_artifact, SimulationSource};
use simcda_core::port_sim::{Execution, SimulationTable};
use simcda_core::ranking::RankingOutcome;
use simcda_core::sensitivity::SensitivityReport;
use simcda_core::Error;

use crate::service::{serve, AppState};

#[derive(Debug, Parser)]
#[command(name = "simcda", version, about = "Simulation-guided multi-criteria decision analysis for weighbridge options")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate every option under every scenario and write simulation.csv.
    Simulate(Common),
    /// Score and rank the options (CBA, static and dynamic MCDA).
    Score(Common),
    /// Run the Monte-Carlo sensitivity analysis of the MCDA ranking.
    Sensitivity(Common),
    /// Run everything and write all tables to the output directory.
    Pipeline(Common),
    /// Run the pipeline once, then serve the what-if HTTP API.
    Serve {
        #[command(flatten)]
        common: Common,
        /// Address to listen on.
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration; omitted fields take the case-study defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed for simulation replications.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<u32>,
    /// Simulated days per replication (warm-up included).
    #[arg(long)]
    pub days: Option<u32>,
    /// Use this per-scenario table (CSV) instead of simulating.
    #[arg(long, value_name = "TABLE")]
    pub bypass_simulation: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run replications and iterations on one thread.
    #[arg(long)]
    pub serial: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<PipelineConfig, Error> {
        let mut c = match &self.config {
            Some(path) => {
                if !path.is_file() {
                    return Err(missing_file("config", path));
                }
                load_config(path)?
            }
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            c.master_seed = seed;
        }
        if let Some(r) = self.replications {
            c.simulation.replications = r;
        }
        if let Some(d) = self.days {
            c.simulation.run_days = d;
        }
        if let Some(out) = &self.out {
            c.output_directory = out.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn execution(&self) -> Execution {
        if self.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        }
    }

    fn source(&self) -> Result<SimulationSource, Error> {
        match &self.bypass_simulation {
            Some(path) => Ok(SimulationSource::Injected(read_table(path)?)),
            None => Ok(SimulationSource::Simulate(self.execution())),
        }
    }

    fn table(&self, config: &PipelineConfig) -> Result<SimulationTable, Error> {
        match self.source()? {
            SimulationSource::Injected(t) => Ok(t),
            SimulationSource::Simulate(e) => pipeline::simulate(config, e),
        }
    }
}

fn read_table(path: &Path) -> Result<SimulationTable, Error> {
    if !path.is_file() {
        return Err(missing_file("bypass_simulation", path));
    }
    SimulationTable::read_csv(fs::File::open(path)?)
}

fn missing_file(flag: &str, path: &Path) -> Error {
    Error::Validation {
        field: flag.to_string(),
        message: format!("{} is not a readable file", path.display()),
    }
}

/// Exit status: 0 success, 1 invalid input, 2 runtime failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

pub fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Simulate(common) => {
            let config = common.resolve()?;
            let table = common.table(&config)?;
            fs::create_dir_all(&config.output_directory)?;
            let path = config.output_directory.join("simulation.csv");
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            fs::write(&path, buf)?;
            let expected = table.expected_by_option(&config.scenario_set()?)?;
            let mut out = String::from("option  queue%  passive%  dissatisfaction%\n");
            for (o, s) in expected {
                let _ = writeln!(
                    out,
                    "{o:>6}  {:>6.2}  {:>8.2}  {:>16.2}",
                    s.queue_frequency, s.passive_queue_frequency, s.dissatisfaction_mean
                );
            }
            let _ = writeln!(out, "wrote {}", path.display());
            Ok(out)
        }
        Command::Score(common) => {
            let config = common.resolve()?;
            let table = common.table(&config)?;
            let s = pipeline::score(&config, &table)?;
            let mut out = String::new();
            for r in [&s.cba, &s.static_mcda, &s.dynamic_mcda] {
                out.push_str(&format_ranking(r));
            }
            Ok(out)
        }
        Command::Sensitivity(common) => {
            let config = common.resolve()?;
            let table = common.table(&config)?;
            let s = pipeline::score(&config, &table)?;
            let reports = pipeline::sensitivity(&config, &s, common.execution())?;
            Ok(reports.iter().map(format_sensitivity).collect())
        }
        Command::Pipeline(common) => {
            let config = common.resolve()?;
            let artifact = run_pipeline(&config, common.source()?)?;
            let files = write_artifact(&artifact, &config.output_directory)?;
            let mut out = String::new();
            for r in [&artifact.scoring.cba, &artifact.scoring.static_mcda, &artifact.scoring.dynamic_mcda] {
                out.push_str(&format_ranking(r));
            }
            for r in &artifact.sensitivity {
                out.push_str(&format_sensitivity(r));
            }
            let _ = writeln!(out, "config hash {}", artifact.provenance.config_hash);
            for f in files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            Ok(out)
        }
        Command::Serve { common, addr } => {
            let config = common.resolve()?;
            let artifact = run_pipeline(&config, common.source()?)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(AppState::new(artifact), &addr))?;
            Ok(String::new())
        }
    }
}

fn format_ranking(r: &RankingOutcome) -> String {
    let mut out = format!("{}:", r.method.label());
    for o in &r.order {
        let _ = write!(out, "  option {o} = {:.2}", r.total_of(*o).unwrap_or(f64::NAN));
    }
    out.push('\n');
    out
}

fn format_sensitivity(r: &SensitivityReport) -> String {
    let mut out = format!("sensitivity {} ({} iterations):", r.variant.label(), r.iterations);
    for (o, f) in &r.top_rank_frequency {
        let _ = write!(out, "  option {o} first {f:.1}%");
    }
    out.push('\n');
    out
}
