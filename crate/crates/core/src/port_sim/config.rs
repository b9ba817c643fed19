use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalProcess {
    /// Exponential inter-arrival times at the configured rate.
    Poisson,
    /// Evenly spaced arrivals at the configured rate.
    #[default]
    Deterministic,
}

/// Which queues the free-capacity test at the pre-weighbridge point looks at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityScope {
    /// Only the queue of the customer's own lane group.
    #[default]
    PerGroup,
    /// The free capacity of both lane-group queues added together (the
    /// customer's own queue still needs one free place).
    Combined,
}

/// A non-negative delay in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Delay {
    Fixed { seconds: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { min: f64, max: f64 },
}

impl Delay {
    pub fn validate(&self, field: &str) -> Result<()> {
        let ok = match *self {
            Delay::Fixed { seconds } => seconds >= 0.0 && seconds.is_finite(),
            Delay::Normal { mean, sd } => mean > 0.0 && sd >= 0.0 && mean.is_finite() && sd.is_finite(),
            Delay::Uniform { min, max } => min >= 0.0 && max >= min && max.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(field, format!("invalid delay {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceTime {
    pub mean: f64,
    pub sd: f64,
}

/// Parameters of the weighbridge model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub arrival_rate_per_minute: f64,
    pub arrival_process: ArrivalProcess,
    /// Combined weighing and travel time through a lorry lane.
    pub lorry_service: ServiceTime,
    pub non_lorry_service: ServiceTime,
    pub peak_start_hour: f64,
    pub peak_end_hour: f64,
    /// Lorry percentage inside the peak window.
    pub peak_ltp: f64,
    pub bad_temper_probability: f64,
    pub alone_probability: f64,
    pub base_lorry_lanes: u32,
    pub base_non_lorry_lanes: u32,
    /// Waiting places in front of a lane group, per lane in the group.
    pub queue_places_per_lane: u32,
    pub merge_capacity: u32,
    /// Free places a lane-group queue needs before a customer may advance.
    pub advance_free_capacity: u32,
    pub capacity_scope: CapacityScope,
    pub pre_weighbridge_travel_delay: Delay,
    pub merge_delay: Delay,
    pub run_days: u32,
    pub warmup_days: u32,
    pub replications: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            arrival_rate_per_minute: 4.57,
            arrival_process: ArrivalProcess::Deterministic,
            lorry_service: ServiceTime { mean: 80.0, sd: 2.0 },
            non_lorry_service: ServiceTime { mean: 27.0, sd: 2.0 },
            peak_start_hour: 12.0,
            peak_end_hour: 18.0,
            peak_ltp: 75.0,
            bad_temper_probability: 0.10,
            alone_probability: 0.90,
            base_lorry_lanes: 5,
            base_non_lorry_lanes: 2,
            queue_places_per_lane: 5,
            merge_capacity: 2,
            advance_free_capacity: 2,
            capacity_scope: CapacityScope::PerGroup,
            pre_weighbridge_travel_delay: Delay::Fixed { seconds: 60.0 },
            merge_delay: Delay::Fixed { seconds: 5.0 },
            run_days: 30,
            warmup_days: 5,
            replications: 20,
        }
    }
}

impl SimConfig {
    /// A year of simulated traffic, 20 warm-up days, 10,000 replications.
    pub fn long_run() -> Self {
        Self {
            run_days: 365,
            warmup_days: 20,
            replications: 10_000,
            ..Self::default()
        }
    }

    pub fn peak_hours(&self) -> f64 {
        self.peak_end_hour - self.peak_start_hour
    }

    pub fn lane_queue_capacity_for(&self, lanes: u32) -> u32 {
        self.queue_places_per_lane * lanes
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        let f = |name: &str| format!("{field}.{name}");
        if !(self.arrival_rate_per_minute > 0.0) || !self.arrival_rate_per_minute.is_finite() {
            return Err(Error::validation(f("arrival_rate_per_minute"), "must be positive"));
        }
        for (name, s) in [("lorry_service", self.lorry_service), ("non_lorry_service", self.non_lorry_service)] {
            if !(s.mean > 0.0 && s.sd >= 0.0) || !s.mean.is_finite() || !s.sd.is_finite() {
                return Err(Error::validation(f(name), "mean must be > 0 and sd >= 0"));
            }
        }
        if !(0.0 <= self.peak_start_hour && self.peak_start_hour < self.peak_end_hour && self.peak_end_hour <= 24.0) {
            return Err(Error::validation(f("peak_start_hour"), "need 0 <= start < end <= 24"));
        }
        if self.peak_hours() >= 24.0 {
            return Err(Error::validation(f("peak_end_hour"), "peak window must leave off-peak hours"));
        }
        for (name, p) in [
            ("bad_temper_probability", self.bad_temper_probability),
            ("alone_probability", self.alone_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(f(name), format!("probability {p} not in [0, 1]")));
            }
        }
        if !(0.0..=100.0).contains(&self.peak_ltp) {
            return Err(Error::validation(f("peak_ltp"), "percentage not in [0, 100]"));
        }
        if self.base_lorry_lanes == 0 || self.base_non_lorry_lanes == 0 {
            return Err(Error::validation(f("base_lorry_lanes"), "every lane group needs at least one lane"));
        }
        if self.merge_capacity == 0 {
            return Err(Error::validation(f("merge_capacity"), "must be at least 1"));
        }
        if self.advance_free_capacity == 0 {
            return Err(Error::validation(f("advance_free_capacity"), "must be at least 1"));
        }
        // A lane-group queue smaller than the threshold would never admit anyone.
        let smallest_queue = match self.capacity_scope {
            CapacityScope::PerGroup => self
                .lane_queue_capacity_for(self.base_lorry_lanes)
                .min(self.lane_queue_capacity_for(self.base_non_lorry_lanes)),
            CapacityScope::Combined => {
                self.lane_queue_capacity_for(self.base_lorry_lanes)
                    + self.lane_queue_capacity_for(self.base_non_lorry_lanes)
            }
        };
        if smallest_queue < self.advance_free_capacity {
            return Err(Error::validation(
                f("queue_places_per_lane"),
                "lane queues must hold at least advance_free_capacity vehicles",
            ));
        }
        self.pre_weighbridge_travel_delay
            .validate(&f("pre_weighbridge_travel_delay"))?;
        self.merge_delay.validate(&f("merge_delay"))?;
        if self.run_days == 0 {
            return Err(Error::validation(f("run_days"), "must be at least 1"));
        }
        if self.warmup_days >= self.run_days {
            return Err(Error::validation(f("warmup_days"), "must be shorter than run_days"));
        }
        if self.replications == 0 {
            return Err(Error::validation(f("replications"), "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate("simulation").unwrap();
        SimConfig::long_run().validate("simulation").unwrap();
    }

    #[test]
    fn warmup_must_be_shorter_than_run() {
        let c = SimConfig {
            warmup_days: 30,
            ..SimConfig::default()
        };
        let err = c.validate("simulation").unwrap_err();
        assert!(err.to_string().contains("simulation.warmup_days"));
    }

    #[test]
    fn threshold_above_queue_capacity_rejected() {
        let c = SimConfig {
            queue_places_per_lane: 0,
            ..SimConfig::default()
        };
        assert!(c.validate("simulation").is_err());
    }

    #[test]
    fn delay_from_toml() {
        let d: Delay = toml::from_str("kind = \"uniform\"\nmin = 10.0\nmax = 20.0").unwrap();
        assert_eq!(d, Delay::Uniform { min: 10.0, max: 20.0 });
        assert!(Delay::Uniform { min: 5.0, max: 1.0 }.validate("d").is_err());
    }
}
