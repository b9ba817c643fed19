//! Discrete uncertainty over traffic growth (VTG) and lorry share (LTP), the
//! product scenario tree, and expectations over it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// A finite distribution: strictly increasing values with positive
/// probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteDistribution {
    entries: Vec<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub value: f64,
    pub probability: f64,
}

impl DiscreteDistribution {
    pub fn new(entries: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let dist = Self::unchecked(entries);
        dist.validate("distribution")?;
        Ok(dist)
    }

    pub(crate) fn unchecked(entries: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            entries: entries
                .into_iter()
                .map(|(value, probability)| Outcome { value, probability })
                .collect(),
        }
    }

    /// Annual vehicle traffic growth as a fraction: {0, 0.1, 0.2}.
    pub fn default_vtg() -> Self {
        Self::unchecked([(0.0, 0.25), (0.1, 0.5), (0.2, 0.25)])
    }

    /// Lorry traffic percentage: {44.17, 46.38, 48.59}.
    pub fn default_ltp() -> Self {
        Self::unchecked([(44.17, 0.5), (46.38, 0.25), (48.59, 0.25)])
    }

    /// Check the invariants, reporting failures against `field`.
    pub fn validate(&self, field: &str) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::validation(field, "distribution has no entries"));
        }
        for (i, o) in self.entries.iter().enumerate() {
            if !o.value.is_finite() {
                return Err(Error::validation(
                    format!("{field}[{i}].value"),
                    "value must be finite",
                ));
            }
            if !(o.probability > 0.0 && o.probability <= 1.0) {
                return Err(Error::validation(
                    format!("{field}[{i}].probability"),
                    format!("probability {} not in (0, 1]", o.probability),
                ));
            }
        }
        if let Some(w) = self.entries.windows(2).find(|w| w[1].value <= w[0].value) {
            return Err(Error::validation(
                field,
                format!(
                    "values must be strictly increasing ({} then {})",
                    w[0].value, w[1].value
                ),
            ));
        }
        let total: f64 = self.entries.iter().map(|o| o.probability).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::validation(
                format!("{field}.probability"),
                format!("probabilities sum to {total}, expected 1"),
            ));
        }
        Ok(())
    }

    pub fn entries(&self) -> &[Outcome] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|o| o.value)
    }

    /// Σ p(v)·f(v).
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.entries.iter().map(|o| o.probability * f(o.value)).sum()
    }

    pub fn expect_fallible(&self, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        self.entries
            .iter()
            .try_fold(0.0, |acc, o| Ok(acc + o.probability * f(o.value)?))
    }
}

/// One leaf of the scenario tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: u32,
    /// Growth as a fraction (0.1 is 10%).
    pub vtg: f64,
    /// Lorry share in percent.
    pub ltp: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    scenarios: Vec<Scenario>,
}

/// Cartesian product of the two distributions under independence.
///
/// Ids run from 1 with VTG as the outer loop and LTP as the inner one, so
/// scenario 1 is the lowest growth with the lowest lorry share.
pub fn build_scenario_set(
    vtg: &DiscreteDistribution,
    ltp: &DiscreteDistribution,
) -> Result<ScenarioSet> {
    vtg.validate("vtg")?;
    ltp.validate("ltp")?;
    let scenarios = vtg
        .entries()
        .iter()
        .flat_map(|g| ltp.entries().iter().map(move |l| (g, l)))
        .zip(1u32..)
        .map(|((g, l), id)| Scenario {
            id,
            vtg: g.value,
            ltp: l.value,
            probability: g.probability * l.probability,
        })
        .collect();
    Ok(ScenarioSet { scenarios })
}

impl ScenarioSet {
    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    /// Σ probability × value over every scenario. Every id must be present.
    pub fn expectation(&self, values: &BTreeMap<u32, f64>) -> Result<f64> {
        self.scenarios.iter().try_fold(0.0, |acc, s| {
            let v = values.get(&s.id).ok_or(Error::MissingScenario(s.id))?;
            Ok(acc + s.probability * v)
        })
    }

    pub fn expect(&self, f: impl Fn(&Scenario) -> f64) -> f64 {
        self.scenarios.iter().map(|s| s.probability * f(s)).sum()
    }
}

/// Expectation of a per-VTG-level table, marginalizing over VTG only.
///
/// Levels are matched to the distribution's values within 1e-9.
pub fn expectation_over_vtg(values: &[(f64, f64)], vtg: &DiscreteDistribution) -> Result<f64> {
    vtg.expect_fallible(|level| {
        values
            .iter()
            .find(|(v, _)| (v - level).abs() <= 1e-9)
            .map(|(_, x)| *x)
            .ok_or(Error::MissingVtgLevel(level))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> ScenarioSet {
        build_scenario_set(
            &DiscreteDistribution::default_vtg(),
            &DiscreteDistribution::default_ltp(),
        )
        .unwrap()
    }

    #[test]
    fn tree_numbering_and_probabilities() {
        let set = defaults();
        assert_eq!(set.len(), 9);
        let s1 = set.get(1).unwrap();
        assert_eq!((s1.vtg, s1.ltp, s1.probability), (0.0, 44.17, 0.125));
        let s4 = set.get(4).unwrap();
        assert_eq!((s4.vtg, s4.ltp, s4.probability), (0.1, 44.17, 0.25));
        let s9 = set.get(9).unwrap();
        assert_eq!((s9.vtg, s9.ltp, s9.probability), (0.2, 48.59, 1.0 / 16.0));
        let total: f64 = set.scenarios().iter().map(|s| s.probability).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_product() {
        let one = DiscreteDistribution::new([(0.0, 1.0)]).unwrap();
        let ltp = DiscreteDistribution::new([(44.17, 1.0)]).unwrap();
        let set = build_scenario_set(&one, &ltp).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.scenarios()[0].probability, 1.0);
    }

    #[test]
    fn invalid_distribution_names_field() {
        let bad = DiscreteDistribution::unchecked([(0.0, 0.5), (0.1, 0.4)]);
        let err = build_scenario_set(&DiscreteDistribution::default_vtg(), &bad).unwrap_err();
        assert!(err.to_string().contains("ltp"), "{err}");
        let unsorted = DiscreteDistribution::unchecked([(0.1, 0.5), (0.0, 0.5)]);
        let err = build_scenario_set(&unsorted, &DiscreteDistribution::default_ltp()).unwrap_err();
        assert!(err.to_string().contains("vtg"), "{err}");
        assert!(DiscreteDistribution::new([(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(DiscreteDistribution::new([]).is_err());
    }

    #[test]
    fn expectation_of_constant() {
        let set = defaults();
        let values = set.scenarios().iter().map(|s| (s.id, 3.5)).collect();
        assert!((set.expectation(&values).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_safety_cost_table() {
        let set = defaults();
        let values = set
            .scenarios()
            .iter()
            .map(|s| (s.id, [0.0, 205_146.8, 410_293.6][((s.id - 1) / 3) as usize]))
            .collect();
        assert!((set.expectation(&values).unwrap() - 205_146.8).abs() < 1e-6);
    }

    #[test]
    fn expectation_of_queue_frequencies() {
        let set = defaults();
        let q = [0.0, 0.01, 0.72, 1.31, 6.86, 14.92, 17.82, 26.86, 34.55];
        let values = (1..=9).zip(q).collect();
        let e = set.expectation(&values).unwrap();
        assert!((e - 9.16).abs() < 0.005, "{e}");
    }

    #[test]
    fn missing_scenario_is_reported() {
        let set = defaults();
        let values: BTreeMap<u32, f64> = (1..=8).map(|id| (id, 1.0)).collect();
        assert!(matches!(
            set.expectation(&values),
            Err(Error::MissingScenario(9))
        ));
    }

    #[test]
    fn marginal_over_vtg() {
        let vtg = DiscreteDistribution::default_vtg();
        let env1 = expectation_over_vtg(&[(0.0, 0.0), (0.1, 51_193.78), (0.2, 51_193.78)], &vtg);
        assert!((env1.unwrap() - 38_395.3).abs() <= 0.05);
        let env2 = expectation_over_vtg(&[(0.0, 0.0), (0.1, 0.0), (0.2, 51_193.78)], &vtg);
        assert!((env2.unwrap() - 12_798.5).abs() <= 0.06);
        let profit = expectation_over_vtg(&[(0.0, 0.0), (0.1, 758_800.0), (0.2, 1_517_600.0)], &vtg);
        assert!((profit.unwrap() - 758_800.0).abs() < 1e-9);
        assert!(matches!(
            expectation_over_vtg(&[(0.0, 0.0)], &vtg),
            Err(Error::MissingVtgLevel(_))
        ));
    }

    fn table() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e6f64..1e6, 9)
    }

    proptest! {
        #[test]
        fn expectation_is_linear(f in table(), g in table(), a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let set = defaults();
            let to_map = |xs: &[f64]| -> BTreeMap<u32, f64> { (1..=9).zip(xs.iter().copied()).collect() };
            let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let lhs = set.expectation(&to_map(&combo)).unwrap();
            let rhs = a * set.expectation(&to_map(&f)).unwrap() + b * set.expectation(&to_map(&g)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-6 * (1.0 + lhs.abs()));
        }

        #[test]
        fn indicator_expectation_is_probability(id in 1u32..=9) {
            let set = defaults();
            let values = (1..=9).map(|k| (k, if k == id { 1.0 } else { 0.0 })).collect();
            prop_assert_eq!(set.expectation(&values).unwrap(), set.get(id).unwrap().probability);
        }

        #[test]
        fn built_sets_sum_to_one(
            pv in prop::collection::vec(1u32..100, 1..5),
            pl in prop::collection::vec(1u32..100, 1..5),
        ) {
            let norm = |ps: &[u32]| {
                let total: u32 = ps.iter().sum();
                let mut entries: Vec<(f64, f64)> = ps.iter().enumerate()
                    .map(|(i, p)| (i as f64, f64::from(*p) / f64::from(total))).collect();
                // absorb rounding in the last entry
                let head: f64 = entries[..entries.len() - 1].iter().map(|e| e.1).sum();
                entries.last_mut().unwrap().1 = 1.0 - head;
                DiscreteDistribution::unchecked(entries)
            };
            let (v, l) = (norm(&pv), norm(&pl));
            prop_assume!(v.validate("v").is_ok() && l.validate("l").is_ok());
            let set = build_scenario_set(&v, &l).unwrap();
            prop_assert_eq!(set.len(), pv.len() * pl.len());
            let total: f64 = set.scenarios().iter().map(|s| s.probability).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }
}
