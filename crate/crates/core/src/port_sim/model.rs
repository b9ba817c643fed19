//! One replication of the weighbridge model.
//!
//! Flow: arrival → approach road (delay) → pre-weighbridge decision point →
//! lane-group queue → weighbridge lane (service) → merge point (capacity
//! limited, delay) → exit. A customer waits in the unbounded pre-weighbridge
//! queue whenever its lane-group queue lacks the required free places or
//! someone is already waiting ahead of it.

use simcda_des::{CapacityQueue, Kernel, RandomStream, Station, SECONDS_PER_DAY};

use super::config::{ArrivalProcess, CapacityScope, Delay, ServiceTime, SimConfig};
use super::{dissatisfaction, temporal_ltp, QueueKind, SimStats};
use crate::error::Result;
use crate::option::OptionSpec;
use crate::scenario::Scenario;

/// Random stream ids, one per purpose, so options share arrival streams.
mod stream {
    pub const ARRIVALS: u64 = 0;
    pub const VEHICLE_TYPE: u64 = 1;
    pub const TEMPERAMENT: u64 = 2;
    pub const COMPANY: u64 = 3;
    pub const SERVICE: u64 = 4;
    pub const TRAVEL: u64 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Arrival,
    ReachDecision,
    ServiceDone,
    MergeDone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    Lorry = 0,
    NonLorry = 1,
}

impl Group {
    fn other(self) -> Self {
        match self {
            Group::Lorry => Group::NonLorry,
            Group::NonLorry => Group::Lorry,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Customer {
    group: Group,
    arrival: f64,
    bad_temper: bool,
    alone: bool,
}

/// Lanes of one vehicle type plus the queue in front of them.
struct LaneGroup {
    lanes: Station,
    queue: CapacityQueue,
}

impl LaneGroup {
    fn new(name: &str, lanes: u32, queue_capacity: u32) -> Self {
        Self {
            lanes: Station::new(name, lanes as usize),
            queue: CapacityQueue::bounded(format!("{name} queue"), queue_capacity as usize),
        }
    }

    fn free_queue(&self) -> usize {
        self.queue.free().expect("lane queues are bounded")
    }
}

/// Recycles customer slots so memory tracks customers in the system, not
/// customers ever created.
#[derive(Default)]
struct Slab {
    items: Vec<Customer>,
    free: Vec<u64>,
}

impl Slab {
    fn insert(&mut self, c: Customer) -> u64 {
        match self.free.pop() {
            Some(id) => {
                self.items[id as usize] = c;
                id
            }
            None => {
                self.items.push(c);
                self.items.len() as u64 - 1
            }
        }
    }

    fn get(&self, id: u64) -> Customer {
        self.items[id as usize]
    }

    fn remove(&mut self, id: u64) {
        self.free.push(id);
    }
}

#[derive(Default)]
struct Tally {
    customers: u64,
    queued: u64,
    passive: u64,
    dissatisfaction: u64,
}

/// Extra diagnostics of a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDiagnostics {
    pub max_pre_queue: usize,
    pub final_pre_queue: usize,
    /// The pre-weighbridge queue ended the run longer than one hour of arrivals.
    pub unstable: bool,
    pub events: usize,
}

struct Model<'a> {
    cfg: &'a SimConfig,
    scenario: &'a Scenario,
    arrival_rate: f64,
    warmup_end: f64,
    groups: [LaneGroup; 2],
    merge: Station,
    merge_wait: CapacityQueue,
    pre_queue: CapacityQueue,
    customers: Slab,
    tally: Tally,
    arrivals: RandomStream,
    types: RandomStream,
    temper: RandomStream,
    company: RandomStream,
    service: RandomStream,
    travel: RandomStream,
    error: Option<crate::Error>,
}

impl<'a> Model<'a> {
    fn new(option: &OptionSpec, scenario: &'a Scenario, cfg: &'a SimConfig, seed: u64) -> Self {
        let lorry_lanes = cfg.base_lorry_lanes + u32::from(option.extra_lorry_lane);
        let non_lorry_lanes = cfg.base_non_lorry_lanes + u32::from(option.extra_non_lorry_lane);
        Self {
            cfg,
            scenario,
            arrival_rate: cfg.arrival_rate_per_minute * (1.0 + scenario.vtg) / 60.0,
            warmup_end: f64::from(cfg.warmup_days) * SECONDS_PER_DAY,
            groups: [
                LaneGroup::new("lorry lanes", lorry_lanes, cfg.lane_queue_capacity_for(lorry_lanes)),
                LaneGroup::new("non-lorry lanes", non_lorry_lanes, cfg.lane_queue_capacity_for(non_lorry_lanes)),
            ],
            merge: Station::new("merge", cfg.merge_capacity as usize),
            merge_wait: CapacityQueue::unbounded("merge wait"),
            pre_queue: CapacityQueue::unbounded("pre-weighbridge"),
            customers: Slab::default(),
            tally: Tally::default(),
            arrivals: RandomStream::new(seed, stream::ARRIVALS),
            types: RandomStream::new(seed, stream::VEHICLE_TYPE),
            temper: RandomStream::new(seed, stream::TEMPERAMENT),
            company: RandomStream::new(seed, stream::COMPANY),
            service: RandomStream::new(seed, stream::SERVICE),
            travel: RandomStream::new(seed, stream::TRAVEL),
            error: None,
        }
    }

    fn group(&self, g: Group) -> &LaneGroup {
        &self.groups[g as usize]
    }

    fn group_mut(&mut self, g: Group) -> &mut LaneGroup {
        &mut self.groups[g as usize]
    }

    fn can_advance(&self, g: Group) -> bool {
        let threshold = self.cfg.advance_free_capacity as usize;
        let own = self.group(g).free_queue();
        match self.cfg.capacity_scope {
            CapacityScope::PerGroup => own >= threshold,
            CapacityScope::Combined => own >= 1 && own + self.group(g.other()).free_queue() >= threshold,
        }
    }

    fn next_interarrival(&mut self) -> Result<f64> {
        Ok(match self.cfg.arrival_process {
            ArrivalProcess::Poisson => self.arrivals.sample_exponential(self.arrival_rate)?,
            ArrivalProcess::Deterministic => 1.0 / self.arrival_rate,
        })
    }

    fn sample_delay(stream: &mut RandomStream, delay: Delay) -> Result<f64> {
        Ok(match delay {
            Delay::Fixed { seconds } => seconds,
            Delay::Normal { mean, sd } => stream.sample_normal_positive(mean, sd)?,
            Delay::Uniform { min, max } => stream.uniform_range(min, max),
        })
    }

    fn sample_service(&mut self, g: Group) -> Result<f64> {
        let ServiceTime { mean, sd } = match g {
            Group::Lorry => self.cfg.lorry_service,
            Group::NonLorry => self.cfg.non_lorry_service,
        };
        Ok(self.service.sample_normal_positive(mean, sd)?)
    }

    fn handle(&mut self, k: &mut Kernel<Event>, event: Event, id: u64) -> Result<()> {
        match event {
            Event::Arrival => self.on_arrival(k),
            Event::ReachDecision => self.on_decision(k, id),
            Event::ServiceDone => self.on_service_done(k, id),
            Event::MergeDone => self.on_merge_done(k, id),
        }
    }

    fn on_arrival(&mut self, k: &mut Kernel<Event>) -> Result<()> {
        let now = k.now();
        let hour = (now % SECONDS_PER_DAY) / 3600.0;
        let lorry_share = temporal_ltp(hour, self.scenario.ltp, self.cfg)? / 100.0;
        let customer = Customer {
            group: if self.types.bernoulli(lorry_share) {
                Group::Lorry
            } else {
                Group::NonLorry
            },
            arrival: now,
            bad_temper: self.temper.bernoulli(self.cfg.bad_temper_probability),
            alone: self.company.bernoulli(self.cfg.alone_probability),
        };
        let id = self.customers.insert(customer);
        let travel = Self::sample_delay(&mut self.travel, self.cfg.pre_weighbridge_travel_delay)?;
        k.schedule_in(travel, Event::ReachDecision, id)?;
        let gap = self.next_interarrival()?;
        k.schedule_in(gap, Event::Arrival, 0)?;
        Ok(())
    }

    fn on_decision(&mut self, k: &mut Kernel<Event>, id: u64) -> Result<()> {
        let c = self.customers.get(id);
        let kind = if self.pre_queue.is_empty() && self.can_advance(c.group) {
            self.enter_lane_group(k, id, c.group)?;
            QueueKind::None
        } else {
            self.pre_queue.push(id)?;
            // Own lanes have room, so the blockage ahead comes from the other type.
            if self.group(c.group).free_queue() >= self.cfg.advance_free_capacity as usize {
                QueueKind::Passive
            } else {
                QueueKind::NonPassive
            }
        };
        if c.arrival >= self.warmup_end {
            self.tally.customers += 1;
            self.tally.queued += u64::from(kind != QueueKind::None);
            self.tally.passive += u64::from(kind == QueueKind::Passive);
            self.tally.dissatisfaction += u64::from(dissatisfaction(c.bad_temper, c.alone, kind));
        }
        Ok(())
    }

    fn enter_lane_group(&mut self, k: &mut Kernel<Event>, id: u64, g: Group) -> Result<()> {
        if self.group_mut(g).lanes.try_acquire() {
            let service = self.sample_service(g)?;
            k.schedule_in(service, Event::ServiceDone, id)?;
        } else {
            self.group_mut(g).queue.push(id)?;
        }
        Ok(())
    }

    /// Start service for the next vehicle waiting in front of a freed lane.
    fn refill_lane(&mut self, k: &mut Kernel<Event>, g: Group) -> Result<()> {
        self.group_mut(g).lanes.release();
        if let Some(next) = self.group_mut(g).queue.pop() {
            let acquired = self.group_mut(g).lanes.try_acquire();
            debug_assert!(acquired);
            let service = self.sample_service(g)?;
            k.schedule_in(service, Event::ServiceDone, next)?;
        }
        Ok(())
    }

    fn release_pre_queue(&mut self, k: &mut Kernel<Event>) -> Result<()> {
        while let Some(head) = self.pre_queue.front() {
            let g = self.customers.get(head).group;
            if !self.can_advance(g) {
                break;
            }
            self.pre_queue.pop();
            self.enter_lane_group(k, head, g)?;
        }
        Ok(())
    }

    fn start_merge(&mut self, k: &mut Kernel<Event>, id: u64) -> Result<()> {
        let g = self.customers.get(id).group;
        self.refill_lane(k, g)?;
        let delay = Self::sample_delay(&mut self.travel, self.cfg.merge_delay)?;
        k.schedule_in(delay, Event::MergeDone, id)?;
        Ok(())
    }

    fn on_service_done(&mut self, k: &mut Kernel<Event>, id: u64) -> Result<()> {
        if self.merge.try_acquire() {
            self.start_merge(k, id)?;
            self.release_pre_queue(k)?;
        } else {
            // Holds its lane until the merge point has room.
            self.merge_wait.push(id)?;
        }
        Ok(())
    }

    fn on_merge_done(&mut self, k: &mut Kernel<Event>, id: u64) -> Result<()> {
        self.merge.release();
        self.customers.remove(id);
        if let Some(next) = self.merge_wait.pop() {
            let acquired = self.merge.try_acquire();
            debug_assert!(acquired);
            self.start_merge(k, next)?;
            self.release_pre_queue(k)?;
        }
        Ok(())
    }
}

/// Run one replication and return its statistics (replication sd's are 0).
pub fn simulate_once(
    option: &OptionSpec,
    scenario: &Scenario,
    config: &SimConfig,
    seed: u64,
) -> Result<SimStats> {
    Ok(simulate_with_diagnostics(option, scenario, config, seed)?.0)
}

pub fn simulate_with_diagnostics(
    option: &OptionSpec,
    scenario: &Scenario,
    config: &SimConfig,
    seed: u64,
) -> Result<(SimStats, RunDiagnostics)> {
    config.validate("simulation")?;
    option.validate("option")?;
    // Fails early if the daily lorry share cannot be spread around the peak.
    temporal_ltp(0.0, scenario.ltp, config)?;
    temporal_ltp(config.peak_start_hour, scenario.ltp, config)?;

    let mut model = Model::new(option, scenario, config, seed);
    let mut kernel = Kernel::new();
    let first = model.next_interarrival()?;
    kernel.schedule(first, Event::Arrival, 0)?;
    let horizon = f64::from(config.run_days) * SECONDS_PER_DAY;
    let events = kernel.run(horizon, |k, ev| {
        if model.error.is_none() {
            if let Err(e) = model.handle(k, ev.kind, ev.subject) {
                model.error = Some(e);
            }
        }
    });
    if let Some(e) = model.error {
        return Err(e);
    }

    let t = &model.tally;
    let pct = |x: u64| {
        if t.customers == 0 {
            0.0
        } else {
            100.0 * x as f64 / t.customers as f64
        }
    };
    let final_pre_queue = model.pre_queue.len();
    let diagnostics = RunDiagnostics {
        max_pre_queue: model.pre_queue.max_len(),
        final_pre_queue,
        unstable: final_pre_queue as f64 > model.arrival_rate * 3600.0,
        events,
    };
    let stats = SimStats {
        queue_frequency: pct(t.queued),
        passive_queue_frequency: pct(t.passive),
        dissatisfaction_mean: if t.customers == 0 {
            0.0
        } else {
            t.dissatisfaction as f64 / t.customers as f64
        },
        customers_processed: t.customers,
        queue_sd: 0.0,
        passive_sd: 0.0,
        dissatisfaction_sd: 0.0,
        replications: 1,
        unstable: diagnostics.unstable,
    };
    Ok((stats, diagnostics))
}
