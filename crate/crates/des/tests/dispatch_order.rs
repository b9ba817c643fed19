//! Randomized schedules must always dispatch in (time, sequence) order.

use proptest::prelude::*;
use simcda_des::{CapacityQueue, Kernel, RandomStream};

fn audit(trace: &[(f64, u64)]) -> bool {
    trace
        .windows(2)
        .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1))
}

proptest! {
    #[test]
    fn static_schedule_is_ordered(times in prop::collection::vec(0u32..50, 1..200)) {
        let mut k = Kernel::new();
        k.enable_trace();
        for (i, t) in times.iter().enumerate() {
            k.schedule(f64::from(*t), (), i as u64).unwrap();
        }
        let n = k.run(1e9, |_, _| {});
        prop_assert_eq!(n, times.len());
        prop_assert!(audit(k.trace().unwrap()));
    }

    #[test]
    fn dynamic_schedule_is_ordered(seed in any::<u64>(), horizon in 10.0f64..500.0) {
        let mut rng = RandomStream::new(seed, 0);
        let mut k = Kernel::new();
        k.enable_trace();
        for i in 0..20 {
            k.schedule(rng.uniform() * 10.0, 0u8, i).unwrap();
        }
        let mut clock_ok = true;
        k.run(horizon, |k, ev| {
            clock_ok &= k.now() == ev.time;
            // Zero delays exercise the equal-time tie rule.
            let delay = if rng.bernoulli(0.3) { 0.0 } else { rng.uniform() * 5.0 };
            if ev.kind < 30 {
                k.schedule_in(delay, ev.kind + 1, ev.subject).unwrap();
            }
        });
        prop_assert!(clock_ok);
        prop_assert!(audit(k.trace().unwrap()));
        prop_assert_eq!(k.now(), horizon);
    }

    #[test]
    fn bounded_queue_never_exceeds_capacity(cap in 1usize..8, ops in prop::collection::vec(any::<bool>(), 0..300)) {
        let mut q = CapacityQueue::bounded("q", cap);
        let mut next = 0u64;
        let mut expected = std::collections::VecDeque::new();
        for push in ops {
            if push {
                if q.push(next).is_ok() {
                    expected.push_back(next);
                }
                next += 1;
            } else {
                prop_assert_eq!(q.pop(), expected.pop_front());
            }
            prop_assert!(q.len() <= cap);
        }
    }
}

#[test]
fn identical_seeds_give_identical_traces() {
    let run = |seed| {
        let mut rng = RandomStream::new(seed, 1);
        let mut k = Kernel::new();
        k.enable_trace();
        k.schedule(0.0, (), 0).unwrap();
        k.run(1000.0, |k, ev| {
            let dt = rng.sample_exponential(0.5).unwrap();
            k.schedule_in(dt, (), ev.subject + 1).unwrap();
        });
        k.trace().unwrap().to_vec()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}
