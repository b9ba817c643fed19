use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Consumption units per vehicle once an extra lane speeds up the flow.
pub const IMPROVED_FLOW_CONSUMPTION: f64 = 0.85;

/// One expansion option: the lane layout change and what it costs to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionSpec {
    pub id: u32,
    pub name: String,
    #[serde(default)]
    pub extra_lorry_lane: bool,
    #[serde(default)]
    pub extra_non_lorry_lane: bool,
    pub consumption_unit: f64,
    #[serde(default)]
    pub requires_facility_build: bool,
}

impl OptionSpec {
    pub fn do_nothing() -> Self {
        Self {
            id: 1,
            name: "Do nothing".into(),
            extra_lorry_lane: false,
            extra_non_lorry_lane: false,
            consumption_unit: 1.0,
            requires_facility_build: false,
        }
    }

    pub fn extra_lorry_lane() -> Self {
        Self {
            id: 2,
            name: "Additional lorry lane".into(),
            extra_lorry_lane: true,
            extra_non_lorry_lane: false,
            consumption_unit: IMPROVED_FLOW_CONSUMPTION,
            requires_facility_build: true,
        }
    }

    pub fn extra_non_lorry_lane() -> Self {
        Self {
            id: 3,
            name: "Additional non-lorry lane".into(),
            extra_lorry_lane: false,
            extra_non_lorry_lane: true,
            consumption_unit: IMPROVED_FLOW_CONSUMPTION,
            requires_facility_build: true,
        }
    }

    /// The three options of the Dover weighbridge study.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self::do_nothing(),
            Self::extra_lorry_lane(),
            Self::extra_non_lorry_lane(),
        ]
    }

    pub fn adds_lane(&self) -> bool {
        self.extra_lorry_lane || self.extra_non_lorry_lane
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.extra_lorry_lane && self.extra_non_lorry_lane {
            return Err(Error::validation(
                field,
                "an option adds at most one lane (lorry or non-lorry)",
            ));
        }
        let expected = if self.adds_lane() {
            IMPROVED_FLOW_CONSUMPTION
        } else {
            1.0
        };
        if (self.consumption_unit - expected).abs() > 1e-12 {
            return Err(Error::validation(
                format!("{field}.consumption_unit"),
                format!(
                    "expected {expected} for this lane layout, got {}",
                    self.consumption_unit
                ),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for (i, o) in OptionSpec::defaults().iter().enumerate() {
            o.validate(&format!("options[{i}]")).unwrap();
            assert_eq!(o.id as usize, i + 1);
        }
    }

    #[test]
    fn two_lanes_rejected() {
        let mut o = OptionSpec::extra_lorry_lane();
        o.extra_non_lorry_lane = true;
        assert!(o.validate("options[1]").is_err());
    }

    #[test]
    fn consumption_must_match_layout() {
        let mut o = OptionSpec::do_nothing();
        o.consumption_unit = 0.85;
        let err = o.validate("options[0]").unwrap_err();
        assert!(err.to_string().contains("options[0].consumption_unit"));
    }
}
