//! Pipeline configuration, read from TOML. Every field has the case-study
//! value as its default, so an empty document reproduces the study.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost_benefit::FinancialParams;
use crate::error::{Error, Result};
use crate::mcda::{default_criteria, BinaryAssessment, CriterionDef, MonetaryScoring, WeightVector};
use crate::option::OptionSpec;
use crate::port_sim::SimConfig;
use crate::reference::default_binaries;
use crate::scenario::{build_scenario_set, DiscreteDistribution, ScenarioSet};
use crate::sensitivity::{PerturbationConfig, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaConfig {
    /// Stakeholder weight per criterion id; must cover every criterion and
    /// sum to 1.
    pub weights: WeightVector,
    pub monetary_scoring: MonetaryScoring,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self {
            weights: WeightVector::from_criteria(&default_criteria()),
            monetary_scoring: MonetaryScoring::MinMax,
        }
    }
}

/// Yes/no judgements for one option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryEntry {
    pub option: u32,
    pub local_profits: bool,
    pub job_opportunities: bool,
    pub road_safety: bool,
}

/// Settings shared by the sensitivity runs; one run per listed variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityConfig {
    pub variants: Vec<Variant>,
    pub amplitude: f64,
    pub iterations: u32,
    /// Overrides the default frozen set of every variant.
    pub frozen_criteria: Option<BTreeSet<String>>,
    pub clamp_floor: f64,
    pub seed: u64,
    pub renormalize: bool,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        let base = PerturbationConfig::default();
        Self {
            variants: Variant::ALL.to_vec(),
            amplitude: base.amplitude,
            iterations: base.iterations,
            frozen_criteria: None,
            clamp_floor: base.clamp_floor,
            seed: base.seed,
            renormalize: base.renormalize,
        }
    }
}

impl SensitivityConfig {
    pub fn for_variant(&self, variant: Variant) -> PerturbationConfig {
        PerturbationConfig {
            variant,
            amplitude: self.amplitude,
            iterations: self.iterations,
            frozen_criteria: self.frozen_criteria.clone(),
            clamp_floor: self.clamp_floor,
            seed: self.seed,
            renormalize: self.renormalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub master_seed: u64,
    pub output_directory: PathBuf,
    pub financial: FinancialParams,
    pub simulation: SimConfig,
    pub vtg: DiscreteDistribution,
    pub ltp: DiscreteDistribution,
    pub options: Vec<OptionSpec>,
    pub criteria: CriteriaConfig,
    /// Yes/no judgements; options not listed get the judgement implied by
    /// whether they require building work.
    pub binaries: Vec<BinaryEntry>,
    pub sensitivity: SensitivityConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            master_seed: 2015,
            output_directory: PathBuf::from("out"),
            financial: FinancialParams::default(),
            simulation: SimConfig::default(),
            vtg: DiscreteDistribution::default_vtg(),
            ltp: DiscreteDistribution::default_ltp(),
            options: OptionSpec::defaults(),
            criteria: CriteriaConfig::default(),
            binaries: Vec::new(),
            sensitivity: SensitivityConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.financial.validate("financial")?;
        self.simulation.validate("simulation")?;
        self.vtg.validate("vtg")?;
        self.ltp.validate("ltp")?;
        if self.options.is_empty() {
            return Err(Error::validation("options", "at least one option is required"));
        }
        let mut seen = BTreeSet::new();
        for (i, o) in self.options.iter().enumerate() {
            o.validate(&format!("options[{i}]"))?;
            if !seen.insert(o.id) {
                return Err(Error::validation(format!("options[{i}].id"), format!("duplicate option id {}", o.id)));
            }
        }
        self.criteria.weights.validate("criteria.weights")?;
        let catalog: BTreeSet<String> = default_criteria().into_iter().map(|c| c.id).collect();
        let given: BTreeSet<String> = self.criteria.weights.weights.keys().cloned().collect();
        if catalog != given {
            let missing: Vec<_> = catalog.difference(&given).collect();
            let unknown: Vec<_> = given.difference(&catalog).collect();
            return Err(Error::validation(
                "criteria.weights",
                format!("missing {missing:?}, unknown {unknown:?}"),
            ));
        }
        for (i, b) in self.binaries.iter().enumerate() {
            if !seen.contains(&b.option) {
                return Err(Error::validation(
                    format!("binaries[{i}].option"),
                    format!("no option with id {}", b.option),
                ));
            }
        }
        if self.sensitivity.variants.is_empty() {
            return Err(Error::validation("sensitivity.variants", "list at least one variant"));
        }
        if let Some(frozen) = &self.sensitivity.frozen_criteria {
            if let Some(id) = frozen.iter().find(|id| !catalog.contains(*id)) {
                return Err(Error::validation(
                    "sensitivity.frozen_criteria",
                    format!("unknown criterion {id:?}"),
                ));
            }
        }
        for v in &self.sensitivity.variants {
            self.sensitivity.for_variant(*v).validate("sensitivity")?;
        }
        Ok(())
    }

    pub fn scenario_set(&self) -> Result<ScenarioSet> {
        build_scenario_set(&self.vtg, &self.ltp)
    }

    /// The criteria catalog carrying the configured weights.
    pub fn criteria_defs(&self) -> Vec<CriterionDef> {
        default_criteria()
            .into_iter()
            .map(|mut c| {
                c.weight = self.criteria.weights.get(&c.id).unwrap_or(c.weight);
                c
            })
            .collect()
    }

    pub fn binaries(&self) -> BTreeMap<u32, BinaryAssessment> {
        let mut out = default_binaries(&self.options);
        for b in &self.binaries {
            out.insert(
                b.option,
                BinaryAssessment {
                    local_profits: b.local_profits,
                    job_opportunities: b.job_opportunities,
                    road_safety: b.road_safety,
                },
            );
        }
        out
    }
}

pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)?;
    PipelineConfig::from_toml(&text)
}
