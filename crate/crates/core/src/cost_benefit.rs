//! Monetary criteria: effective (interest-adjusted) costs, safety staffing,
//! greenery, facility build, traffic profit, and the CBA net benefit.
//!
//! All currency figures are pounds per year of the planning horizon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::option::OptionSpec;
use crate::ranking::{Method, OptionTotal, RankingOutcome};
use crate::scenario::DiscreteDistribution;

/// Effective-cost multiplier implied by the quoted £92,148.8 for a £90,000
/// lane. It also reproduces the £51,193.78 greenery and £205,146.8 safety
/// figures, which [`FinancialParams::interest_factor`] does not.
pub const DEFAULT_EFFECTIVE_MULTIPLIER: f64 = 1.023_875_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinancialParams {
    pub interest_earned: f64,
    pub cash_asset: f64,
    pub effective_multiplier: f64,
    pub lane_cost: f64,
    pub total_salaries: f64,
    pub key_remuneration: f64,
    pub staff_count: u32,
    pub key_staff_count: u32,
    pub new_staff_per_step: u32,
    pub car_cost: f64,
    pub car_maintenance: f64,
    pub greenery_cost: f64,
    pub base_profit: f64,
    /// Traffic growth covered by one staffing step, as a fraction.
    pub vtg_step: f64,
}

impl Default for FinancialParams {
    fn default() -> Self {
        Self {
            interest_earned: 1_031_000.0,
            cash_asset: 46_092_000.0,
            effective_multiplier: DEFAULT_EFFECTIVE_MULTIPLIER,
            lane_cost: 90_000.0,
            total_salaries: 12_488_000.0,
            key_remuneration: 502_000.0,
            staff_count: 344,
            key_staff_count: 8,
            new_staff_per_step: 5,
            car_cost: 20_000.0,
            car_maintenance: 2_000.0,
            greenery_cost: 50_000.0,
            base_profit: 7_588_000.0,
            vtg_step: 0.10,
        }
    }
}

impl FinancialParams {
    pub fn validate(&self, field: &str) -> Result<()> {
        let currencies = [
            ("interest_earned", self.interest_earned),
            ("cash_asset", self.cash_asset),
            ("lane_cost", self.lane_cost),
            ("total_salaries", self.total_salaries),
            ("key_remuneration", self.key_remuneration),
            ("car_cost", self.car_cost),
            ("car_maintenance", self.car_maintenance),
            ("greenery_cost", self.greenery_cost),
            ("base_profit", self.base_profit),
        ];
        for (name, v) in currencies {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(
                    format!("{field}.{name}"),
                    format!("must be a non-negative amount, got {v}"),
                ));
            }
        }
        if !(self.effective_multiplier >= 1.0) || !self.effective_multiplier.is_finite() {
            return Err(Error::validation(
                format!("{field}.effective_multiplier"),
                "must be at least 1",
            ));
        }
        if self.staff_count <= self.key_staff_count {
            return Err(Error::validation(
                format!("{field}.staff_count"),
                "must exceed key_staff_count",
            ));
        }
        if !(self.vtg_step > 0.0 && self.vtg_step <= 1.0) {
            return Err(Error::validation(
                format!("{field}.vtg_step"),
                "must lie in (0, 1]",
            ));
        }
        Ok(())
    }

    /// 1 + interest earned / cash asset.
    pub fn interest_factor(&self) -> Result<f64> {
        if self.cash_asset == 0.0 {
            return Err(Error::DivisionByZero("cash_asset"));
        }
        Ok(1.0 + self.interest_earned / self.cash_asset)
    }

    /// Copy of these parameters whose effective multiplier is the literal
    /// interest factor instead of the calibrated default.
    pub fn with_formula_interest(&self) -> Result<Self> {
        Ok(Self {
            effective_multiplier: self.interest_factor()?,
            ..self.clone()
        })
    }

    /// Average salary of the non-key staff.
    pub fn average_staff_cost(&self) -> f64 {
        (self.total_salaries - self.key_remuneration)
            / f64::from(self.staff_count - self.key_staff_count)
    }

    pub fn effective_cost(&self, base: f64) -> Result<f64> {
        if !(base >= 0.0) {
            return Err(Error::validation("base", format!("cost must be >= 0, got {base}")));
        }
        Ok(base * self.effective_multiplier)
    }
}

pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyCost {
    pub cost: f64,
    pub steps: u32,
    /// Growth was not a whole number of steps and staffing was rounded up.
    pub rounded_up: bool,
}

/// Extra staff and patrol cars needed to hold the accident rate at `vtg`.
pub fn safety_cost(vtg: f64, params: &FinancialParams) -> Result<SafetyCost> {
    if !(vtg >= 0.0) {
        return Err(Error::validation("vtg", format!("growth must be >= 0, got {vtg}")));
    }
    let exact = vtg / params.vtg_step;
    let nearest = exact.round();
    let (steps, rounded_up) = if (exact - nearest).abs() <= 1e-9 {
        (nearest, false)
    } else {
        (exact.ceil(), true)
    };
    let per_step = f64::from(params.new_staff_per_step) * params.average_staff_cost()
        + params.car_cost
        + params.car_maintenance;
    Ok(SafetyCost {
        cost: steps * params.effective_cost(per_step)?,
        steps: steps as u32,
        rounded_up,
    })
}

/// Greenery is bought once total fuel consumption exceeds today's level.
pub fn environmental_cost(option: &OptionSpec, vtg: f64, params: &FinancialParams) -> Result<f64> {
    let consumption = option.consumption_unit * (1.0 + vtg);
    Ok(params.effective_cost(params.greenery_cost)? * heaviside(consumption - 1.0))
}

pub fn facility_cost(option: &OptionSpec, params: &FinancialParams) -> Result<f64> {
    if option.requires_facility_build {
        params.effective_cost(params.lane_cost)
    } else {
        Ok(0.0)
    }
}

/// Additional profit, linear in traffic growth.
pub fn traffic_profit(vtg: f64, params: &FinancialParams) -> Result<f64> {
    if !(vtg >= 0.0) {
        return Err(Error::validation("vtg", format!("growth must be >= 0, got {vtg}")));
    }
    Ok(vtg * params.base_profit)
}

/// Expected monetary components of one option over the VTG distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub option: u32,
    pub environmental: f64,
    pub facility: f64,
    pub safety: f64,
    pub cost_total: f64,
    pub traffic_profit: f64,
    pub net_benefit: f64,
}

pub fn expected_breakdown(
    option: &OptionSpec,
    vtg: &DiscreteDistribution,
    params: &FinancialParams,
) -> Result<CostBreakdown> {
    let environmental = vtg.expect_fallible(|g| environmental_cost(option, g, params))?;
    let safety = vtg.expect_fallible(|g| Ok(safety_cost(g, params)?.cost))?;
    // Building cost does not depend on growth.
    let facility = facility_cost(option, params)?;
    let profit = vtg.expect_fallible(|g| traffic_profit(g, params))?;
    let cost_total = environmental + facility + safety;
    Ok(CostBreakdown {
        option: option.id,
        environmental,
        facility,
        safety,
        cost_total,
        traffic_profit: profit,
        net_benefit: profit - cost_total,
    })
}

/// Rank options by expected net benefit (benefits minus costs).
pub fn cba_rank(breakdowns: &[CostBreakdown]) -> Result<RankingOutcome> {
    RankingOutcome::from_totals(
        Method::Cba,
        breakdowns
            .iter()
            .map(|b| OptionTotal {
                option: b.option,
                total: b.net_benefit,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> FinancialParams {
        FinancialParams::default()
    }

    #[test]
    fn interest_factor_values() {
        assert!((p().interest_factor().unwrap() - 1.022_368_3).abs() < 1e-6);
        let none = FinancialParams {
            interest_earned: 0.0,
            ..p()
        };
        assert_eq!(none.interest_factor().unwrap(), 1.0);
        let tenth = FinancialParams {
            interest_earned: 100.0,
            cash_asset: 1000.0,
            ..p()
        };
        assert!((tenth.interest_factor().unwrap() - 1.1).abs() < 1e-15);
        let broke = FinancialParams {
            cash_asset: 0.0,
            ..p()
        };
        assert!(matches!(broke.interest_factor(), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn effective_costs() {
        assert!((p().effective_cost(90_000.0).unwrap() - 92_148.8).abs() <= 0.1);
        assert!((p().effective_cost(50_000.0).unwrap() - 51_193.78).abs() <= 0.05);
        assert_eq!(p().effective_cost(0.0).unwrap(), 0.0);
        assert!(p().effective_cost(-1.0).is_err());
    }

    #[test]
    fn safety_cost_per_step() {
        let one = safety_cost(0.1, &p()).unwrap();
        assert!((one.cost - 205_146.8).abs() <= 1.0, "{}", one.cost);
        assert_eq!((one.steps, one.rounded_up), (1, false));
        assert_eq!(safety_cost(0.0, &p()).unwrap().cost, 0.0);
        let two = safety_cost(0.2, &p()).unwrap();
        assert!((two.cost - 410_293.6).abs() <= 2.0, "{}", two.cost);
        assert_eq!(two.steps, 2);
    }

    #[test]
    fn fractional_growth_rounds_staffing_up() {
        let s = safety_cost(0.15, &p()).unwrap();
        assert_eq!((s.steps, s.rounded_up), (2, true));
        assert_eq!(s.cost, safety_cost(0.2, &p()).unwrap().cost);
    }

    #[test]
    fn heaviside_at_zero_is_zero() {
        assert_eq!(heaviside(0.1), 1.0);
        assert_eq!(heaviside(0.0), 0.0);
        assert_eq!(heaviside(-1.0), 0.0);
    }

    #[test]
    fn greenery_gate() {
        let o1 = OptionSpec::do_nothing();
        let o2 = OptionSpec::extra_lorry_lane();
        assert!((environmental_cost(&o1, 0.1, &p()).unwrap() - 51_193.78).abs() <= 0.01);
        assert_eq!(environmental_cost(&o1, 0.0, &p()).unwrap(), 0.0);
        assert_eq!(environmental_cost(&o2, 0.1, &p()).unwrap(), 0.0);
        assert!((environmental_cost(&o2, 0.2, &p()).unwrap() - 51_193.78).abs() <= 0.01);
    }

    #[test]
    fn profit_is_linear() {
        assert_eq!(traffic_profit(0.1, &p()).unwrap(), 758_800.0);
        assert_eq!(traffic_profit(0.0, &p()).unwrap(), 0.0);
        assert_eq!(traffic_profit(0.2, &p()).unwrap(), 1_517_600.0);
    }

    #[test]
    fn expected_breakdowns() {
        let vtg = DiscreteDistribution::default_vtg();
        let b1 = expected_breakdown(&OptionSpec::do_nothing(), &vtg, &p()).unwrap();
        let b2 = expected_breakdown(&OptionSpec::extra_lorry_lane(), &vtg, &p()).unwrap();
        let b3 = expected_breakdown(&OptionSpec::extra_non_lorry_lane(), &vtg, &p()).unwrap();
        assert!((b1.cost_total - 243_542.1).abs() <= 1.0, "{}", b1.cost_total);
        assert!((b2.cost_total - 310_094.1).abs() <= 1.0, "{}", b2.cost_total);
        assert_eq!(b2.cost_total, b3.cost_total);
        assert!((b1.net_benefit - 515_257.9).abs() <= 1.0, "{}", b1.net_benefit);
        assert_eq!(b1.facility, 0.0);
        assert!((b2.facility - 92_148.8).abs() <= 0.1);
    }

    #[test]
    fn cba_prefers_cheapest_when_profit_is_equal() {
        let vtg = DiscreteDistribution::default_vtg();
        let bs: Vec<_> = OptionSpec::defaults()
            .iter()
            .map(|o| expected_breakdown(o, &vtg, &p()).unwrap())
            .collect();
        let r = cba_rank(&bs).unwrap();
        assert_eq!(r.order, [1, 2, 3]);
        let single = cba_rank(&bs[1..2]).unwrap();
        assert_eq!(single.order, [2]);
        assert!(cba_rank(&[]).is_err());
    }

    #[test]
    fn cba_tie_goes_to_lower_id() {
        let mk = |option| CostBreakdown {
            option,
            environmental: 0.0,
            facility: 0.0,
            safety: 1.0,
            cost_total: 1.0,
            traffic_profit: 3.0,
            net_benefit: 2.0,
        };
        assert_eq!(cba_rank(&[mk(7), mk(4)]).unwrap().order, [4, 7]);
    }

    fn option() -> impl Strategy<Value = OptionSpec> {
        prop_oneof![
            Just(OptionSpec::do_nothing()),
            Just(OptionSpec::extra_lorry_lane()),
            Just(OptionSpec::extra_non_lorry_lane()),
        ]
    }

    proptest! {
        #[test]
        fn environment_monotone_in_growth(o in option(), a in 0.0f64..2.0, b in 0.0f64..2.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(environmental_cost(&o, lo, &p()).unwrap() <= environmental_cost(&o, hi, &p()).unwrap());
        }

        #[test]
        fn lane_options_pay_no_more_greenery(g in 0.0f64..2.0) {
            let c1 = environmental_cost(&OptionSpec::do_nothing(), g, &p()).unwrap();
            let c2 = environmental_cost(&OptionSpec::extra_lorry_lane(), g, &p()).unwrap();
            let c3 = environmental_cost(&OptionSpec::extra_non_lorry_lane(), g, &p()).unwrap();
            prop_assert_eq!(c2, c3);
            prop_assert!(c2 <= c1);
        }

        #[test]
        fn safety_scales_with_whole_steps(k in 0u32..20) {
            let step = p().vtg_step;
            let base = safety_cost(step, &p()).unwrap().cost;
            let scaled = safety_cost(f64::from(k) * step, &p()).unwrap().cost;
            prop_assert!((scaled - f64::from(k) * base).abs() <= 1e-6 * (1.0 + scaled));
        }

        #[test]
        fn net_plus_cost_is_profit(
            w in prop::collection::vec(1u32..10, 3),
            o in option(),
        ) {
            let total = f64::from(w.iter().sum::<u32>());
            let vtg = DiscreteDistribution::unchecked(
                [0.0, 0.1, 0.2].into_iter().zip(w.iter().map(|x| f64::from(*x) / total)),
            );
            let b = expected_breakdown(&o, &vtg, &p()).unwrap();
            prop_assert!((b.net_benefit + b.cost_total - b.traffic_profit).abs() <= 1e-6);
            prop_assert!((b.environmental + b.facility + b.safety - b.cost_total).abs() <= 1e-6);
        }

        #[test]
        fn cba_is_a_permutation(nets in prop::collection::vec(-1e6f64..1e6, 1..8)) {
            let bs: Vec<CostBreakdown> = nets.iter().enumerate().map(|(i, n)| CostBreakdown {
                option: i as u32 + 1, environmental: 0.0, facility: 0.0, safety: 0.0,
                cost_total: 0.0, traffic_profit: *n, net_benefit: *n,
            }).collect();
            let mut order = cba_rank(&bs).unwrap().order;
            order.sort_unstable();
            prop_assert_eq!(order, (1..=nets.len() as u32).collect::<Vec<_>>());
        }
    }
}
