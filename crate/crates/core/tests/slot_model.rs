//! Independent check of the fixed-point solver: a slot-by-slot Monte-Carlo
//! of the idealized saturated model (every station always backlogged,
//! counters decrement once per virtual slot, unlimited retries).

use dcfsim::bianchi::solve_fixed_point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Estimate {
    tau: f64,
    p: f64,
}

fn simulate_slots(n: usize, w: u32, m: u32, slots: u64, seed: u64) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = |stage: u32| w << stage;
    let mut stage = vec![0u32; n];
    let mut counter: Vec<u32> = (0..n).map(|_| rng.random_range(0..w)).collect();
    let (mut tx, mut collided) = (0u64, 0u64);
    let mut senders = Vec::with_capacity(n);
    for _ in 0..slots {
        senders.clear();
        senders.extend((0..n).filter(|&i| counter[i] == 0));
        for c in &mut counter {
            *c = c.saturating_sub(1);
        }
        tx += senders.len() as u64;
        let collision = senders.len() > 1;
        if collision {
            collided += senders.len() as u64;
        }
        for &i in &senders {
            stage[i] = if collision { (stage[i] + 1).min(m) } else { 0 };
            counter[i] = rng.random_range(0..window(stage[i]));
        }
    }
    Estimate {
        tau: tx as f64 / (n as f64 * slots as f64),
        p: collided as f64 / tx as f64,
    }
}

#[test]
fn ten_stations_default_window() {
    let est = simulate_slots(10, 16, 6, 2_000_000, 11);
    let fp = solve_fixed_point::<f64>(10, 16, 6).unwrap();
    assert!(
        (est.p - fp.p).abs() < 0.01,
        "p: mc {} model {}",
        est.p,
        fp.p
    );
    assert!(
        (est.tau - fp.tau).abs() < 0.005,
        "tau: mc {} model {}",
        est.tau,
        fp.tau
    );
}

#[test]
fn small_and_large_populations() {
    for (n, w, m) in [(3usize, 8u32, 3u32), (30, 32, 5)] {
        let est = simulate_slots(n, w, m, 1_000_000, 5);
        let fp = solve_fixed_point::<f64>(n as u32, w, m).unwrap();
        assert!(
            (est.p - fp.p).abs() < 0.015,
            "n={n}: mc {} model {}",
            est.p,
            fp.p
        );
    }
}
