use dcfsim::runner::{run_scenario, ScenarioConfig};
use dcfsim::SimTime;
use proptest::prelude::*;

fn saturated(n: u32, secs: u64) -> ScenarioConfig {
    ScenarioConfig {
        stations: n,
        saturated: true,
        simulation_time: SimTime::from_secs(secs),
        ..ScenarioConfig::default()
    }
}

#[test]
fn single_saturated_station_never_collides() {
    let r = run_scenario::<f64>(&saturated(1, 10)).unwrap();
    let run = &r.runs[0].outcome;
    assert_eq!(run.mac.retransmissions, 0);
    assert_eq!(run.mac.drops, 0);
    let s = &run.flows[0].1;
    assert_eq!(s.lost_packets, 0);
    assert_eq!(s.rx_packets + run.residual[0], s.tx_packets);
}

#[test]
fn saturated_stations_share_fairly() {
    // short windows show the usual backoff-reset unfairness; it averages out
    let r = run_scenario::<f64>(&saturated(5, 300)).unwrap();
    let rx: Vec<u64> = r.runs[0]
        .outcome
        .flows
        .iter()
        .map(|(_, s)| s.rx_packets)
        .collect();
    let lo = *rx.iter().min().unwrap() as f64;
    let hi = *rx.iter().max().unwrap() as f64;
    assert!(hi / lo - 1.0 <= 0.05, "{rx:?}");
}

#[test]
fn identical_seed_identical_report() {
    let cfg = ScenarioConfig {
        seed: 99,
        ..saturated(8, 3)
    };
    let a = run_scenario::<f64>(&cfg).unwrap();
    let b = run_scenario::<f64>(&cfg).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.runs[0].outcome.digest, b.runs[0].outcome.digest);
}

#[test]
fn overloaded_onoff_overflows_queue() {
    // 60 stations offer 15 Mb/s on average, about three times capacity
    let cfg = ScenarioConfig {
        stations: 60,
        simulation_time: SimTime::from_secs(30),
        ..ScenarioConfig::default()
    };
    let r = run_scenario::<f64>(&cfg).unwrap();
    assert!(r.metrics.plr > 0.1, "{:?}", r.metrics);
    assert!(r.runs[0].outcome.residual.iter().all(|&q| q <= 501));
    assert!(r.metrics.pdr + r.metrics.plr <= 1.0 + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn metrics_stay_in_range(
        n in 1u32..25,
        cw_min in prop::sample::select(vec![3u32, 7, 15, 31]),
        retry in 1u32..10,
        rts in any::<bool>(),
        sat in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut cfg = ScenarioConfig {
            stations: n,
            saturated: sat,
            seed,
            simulation_time: SimTime::from_secs(2),
            ..ScenarioConfig::default()
        };
        cfg.mac.cw_min = cw_min;
        cfg.mac.retry_limit = retry;
        cfg.mac.rts_threshold = if rts { 0 } else { 65535 };
        let r = run_scenario::<f64>(&cfg).unwrap();
        let m = r.metrics;
        prop_assert!((0.0..=1.0).contains(&m.pdr));
        prop_assert!((0.0..=1.0).contains(&m.plr));
        prop_assert!(m.pdr + m.plr <= 1.0 + 1e-12);
        prop_assert!(m.agg_throughput_mbps >= 0.0 && m.agg_throughput_mbps < 12.0);
        prop_assert!(m.avg_delay_s >= 0.0);
        let o = &r.runs[0].outcome;
        prop_assert_eq!(o.mac.nav_violations, 0);
        prop_assert!(o.mac.successes + o.mac.drops <= o.mac.attempts);
    }
}
