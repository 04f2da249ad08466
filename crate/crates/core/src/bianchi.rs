//! Markov-chain fixed-point model of saturated DCF.
//!
//! Every station always has a packet. With `n` stations, initial window `W`
//! and `m` doubling stages, the per-slot transmission probability `tau` and
//! the conditional collision probability `p` satisfy
//!
//! ```text
//! tau = 2 (1 - 2p) / ((1 - 2p)(W + 1) + p W (1 - (2p)^m))
//! p   = 1 - (1 - tau)^(n - 1)
//! ```
//!
//! The solver bisects on `p`. `tau` is evaluated through the equivalent
//! form `2 / (1 + W + p W sum_{k<m} (2p)^k)`, which has no removable
//! singularity at `p = 1/2`.

use serde::Serialize;

use crate::error::OracleError;
use crate::mac::{AccessMode, MacParams};
use crate::num::Real;
use crate::phy::Phy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint<T> {
    pub tau: T,
    pub p: T,
    /// `|p - (1 - (1 - tau)^(n-1))|` at the returned point.
    pub residual: T,
}

/// Number of doublings from `cw_min + 1` up to `cw_max + 1`.
pub fn stages_for(cw_min: u32, cw_max: u32) -> u32 {
    let ratio = (cw_max + 1) / (cw_min + 1);
    ratio.max(1).ilog2()
}

/// Transmission probability of a station given its collision probability.
pub fn tau_given_p<T: Real>(p: T, window: u32, stages: u32) -> T {
    let one = T::one();
    let two = one + one;
    let w = T::from_count(u64::from(window));
    let mut geometric = T::zero();
    let mut term = one;
    for _ in 0..stages {
        geometric = geometric + term;
        term = term * two * p;
    }
    two / (one + w + p * w * geometric)
}

fn collision_given_tau<T: Real>(tau: T, n: u32) -> T {
    T::one() - (T::one() - tau).powi(n as i32 - 1)
}

fn residual_at<T: Real>(p: T, n: u32, window: u32, stages: u32) -> T {
    collision_given_tau(tau_given_p(p, window, stages), n) - p
}

/// Tolerance the returned residual must meet for the scalar type.
pub fn solver_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(4096.0)
}

pub fn solve_fixed_point<T: Real>(
    n: u32,
    window: u32,
    stages: u32,
) -> Result<FixedPoint<T>, OracleError> {
    if n < 1 {
        return Err(OracleError::InvalidParams(
            "need at least one station".into(),
        ));
    }
    if window < 2 {
        return Err(OracleError::InvalidParams(format!("window {window} < 2")));
    }
    if n == 1 {
        let tau = tau_given_p(T::zero(), window, stages);
        return Ok(FixedPoint {
            tau,
            p: T::zero(),
            residual: T::zero(),
        });
    }
    // residual_at is strictly decreasing in p: positive at 0, negative at 1
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..4096 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual_at(mid, n, window, stages) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (
        residual_at(lo, n, window, stages).abs(),
        residual_at(hi, n, window, stages).abs(),
    );
    let (p, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if residual.is_nan() || residual >= solver_tolerance::<T>() {
        return Err(OracleError::NonConvergence {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(FixedPoint {
        tau: tau_given_p(p, window, stages),
        p,
        residual,
    })
}

/// Model inputs with all durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BianchiParams<T> {
    pub n: u32,
    /// Initial window size, `cw_min + 1`.
    pub window: u32,
    pub stages: u32,
    pub slot: T,
    pub success: T,
    pub collision: T,
    /// Bits credited per successful packet.
    pub payload_bits: T,
}

impl<T: Real> BianchiParams<T> {
    /// Parameters matching a simulated scenario. Payload is counted at the
    /// IP level so results compare directly with measured throughput.
    pub fn for_scenario(
        n: u32,
        mac: &MacParams,
        phy: &Phy,
        payload: u32,
        mode: AccessMode,
    ) -> Self {
        let d = phy.exchange_durations(payload, mode == AccessMode::RtsCts);
        BianchiParams {
            n,
            window: mac.cw_min + 1,
            stages: stages_for(mac.cw_min, mac.cw_max),
            slot: T::lit(phy.slot().as_secs_f64()),
            success: T::lit(d.success.as_secs_f64()),
            collision: T::lit(d.collision.as_secs_f64()),
            payload_bits: T::from_count(u64::from(phy.sizes().ip_bytes(payload)) * 8),
        }
    }

    pub fn solve(&self) -> Result<FixedPoint<T>, OracleError> {
        solve_fixed_point(self.n, self.window, self.stages)
    }

    /// Saturation throughput in Mb/s at the given fixed point.
    pub fn throughput_at(&self, fp: &FixedPoint<T>) -> T {
        let one = T::one();
        let n = T::from_count(u64::from(self.n));
        let p_tr = one - (one - fp.tau).powi(self.n as i32);
        let p_s = n * fp.tau * (one - fp.tau).powi(self.n as i32 - 1) / p_tr;
        let busy = (one - p_tr) * self.slot
            + p_tr * p_s * self.success
            + p_tr * (one - p_s) * self.collision;
        p_tr * p_s * self.payload_bits / busy / T::lit(1e6)
    }

    pub fn saturation_throughput(&self) -> Result<T, OracleError> {
        Ok(self.throughput_at(&self.solve()?))
    }
}

/// One row of the oracle sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow<T> {
    pub n: u32,
    pub tau: T,
    pub p: T,
    pub s_basic: T,
    pub s_rts: T,
}

pub fn oracle_row<T: Real>(
    n: u32,
    mac: &MacParams,
    phy: &Phy,
    payload: u32,
) -> Result<OracleRow<T>, OracleError> {
    let basic = BianchiParams::<T>::for_scenario(n, mac, phy, payload, AccessMode::Basic);
    let rts = BianchiParams::<T>::for_scenario(n, mac, phy, payload, AccessMode::RtsCts);
    let fp = basic.solve()?;
    Ok(OracleRow {
        n,
        tau: fp.tau,
        p: fp.p,
        s_basic: basic.throughput_at(&fp),
        s_rts: rts.throughput_at(&fp),
    })
}
