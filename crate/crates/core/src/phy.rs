//! 802.11a OFDM airtimes and interframe spaces.

use serde::{Deserialize, Serialize};

use crate::error::PhyError;
use crate::kernel::SimTime;

/// OFDM PHY timing constants. Defaults are the 802.11a 20 MHz values with
/// data and control frames both sent at 12 Mb/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhyParams {
    pub slot_time: SimTime,
    pub sifs: SimTime,
    pub preamble_plus_signal: SimTime,
    pub symbol_time: SimTime,
    pub service_bits: u32,
    pub tail_bits: u32,
    /// bits/s
    pub data_rate: u64,
    /// bits/s
    pub control_rate: u64,
}

impl Default for PhyParams {
    fn default() -> Self {
        PhyParams {
            slot_time: SimTime::from_micros(9),
            sifs: SimTime::from_micros(16),
            preamble_plus_signal: SimTime::from_micros(20),
            symbol_time: SimTime::from_micros(4),
            service_bits: 16,
            tail_bits: 6,
            data_rate: 12_000_000,
            control_rate: 12_000_000,
        }
    }
}

/// Data bits carried per OFDM symbol at a given 802.11a rate.
pub fn data_bits_per_symbol(rate: u64) -> Result<u32, PhyError> {
    Ok(match rate {
        6_000_000 => 24,
        9_000_000 => 36,
        12_000_000 => 48,
        18_000_000 => 72,
        24_000_000 => 96,
        36_000_000 => 144,
        48_000_000 => 192,
        54_000_000 => 216,
        other => return Err(PhyError::UnsupportedRate(other)),
    })
}

/// Per-frame byte sizes. The stack overhead (IP/UDP, LLC/SNAP, MAC header
/// and FCS) is a fixed per-packet constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSizes {
    pub ack_bytes: u32,
    pub rts_bytes: u32,
    pub cts_bytes: u32,
    pub mac_header_plus_fcs_bytes: u32,
    pub llc_snap_bytes: u32,
    pub ip_udp_header_bytes: u32,
}

impl Default for FrameSizes {
    fn default() -> Self {
        FrameSizes {
            ack_bytes: 14,
            rts_bytes: 20,
            cts_bytes: 14,
            mac_header_plus_fcs_bytes: 28,
            llc_snap_bytes: 8,
            ip_udp_header_bytes: 28,
        }
    }
}

impl FrameSizes {
    /// Bytes seen by the IP-level flow probe for an application payload.
    pub fn ip_bytes(&self, payload: u32) -> u32 {
        payload + self.ip_udp_header_bytes
    }

    pub fn data_mpdu_bytes(&self, payload: u32) -> u32 {
        payload + self.ip_udp_header_bytes + self.llc_snap_bytes + self.mac_header_plus_fcs_bytes
    }
}

/// Time a frame exchange holds the channel, up to the point where the other
/// stations may resume backoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeDurations {
    pub success: SimTime,
    pub collision: SimTime,
}

/// Validated PHY configuration with the fixed control-frame airtimes cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phy {
    params: PhyParams,
    sizes: FrameSizes,
    ack: SimTime,
    cts: SimTime,
    rts: SimTime,
}

impl Phy {
    pub fn new(params: PhyParams, sizes: FrameSizes) -> Result<Self, PhyError> {
        data_bits_per_symbol(params.data_rate)?;
        let ack = airtime_with(&params, sizes.ack_bytes, params.control_rate)?;
        let cts = airtime_with(&params, sizes.cts_bytes, params.control_rate)?;
        let rts = airtime_with(&params, sizes.rts_bytes, params.control_rate)?;
        Ok(Phy {
            params,
            sizes,
            ack,
            cts,
            rts,
        })
    }

    pub fn params(&self) -> &PhyParams {
        &self.params
    }

    pub fn sizes(&self) -> &FrameSizes {
        &self.sizes
    }

    pub fn slot(&self) -> SimTime {
        self.params.slot_time
    }

    pub fn sifs(&self) -> SimTime {
        self.params.sifs
    }

    pub fn difs(&self) -> SimTime {
        self.params.sifs + self.params.slot_time * 2
    }

    /// Deferral after a frame that could not be decoded: long enough for
    /// an ACK at the control rate to be sent and then a DIFS.
    pub fn eifs(&self) -> SimTime {
        self.params.sifs + self.ack + self.difs()
    }

    pub fn airtime(&self, mpdu_bytes: u32, rate: u64) -> Result<SimTime, PhyError> {
        airtime_with(&self.params, mpdu_bytes, rate)
    }

    pub fn ack_airtime(&self) -> SimTime {
        self.ack
    }

    pub fn cts_airtime(&self) -> SimTime {
        self.cts
    }

    pub fn rts_airtime(&self) -> SimTime {
        self.rts
    }

    /// Airtime of a DATA frame carrying `payload` application bytes.
    pub fn data_airtime(&self, payload: u32) -> SimTime {
        airtime_with(
            &self.params,
            self.sizes.data_mpdu_bytes(payload),
            self.params.data_rate,
        )
        .expect("data rate validated at construction")
    }

    pub fn exchange_durations(&self, payload: u32, use_rts: bool) -> ExchangeDurations {
        let data = self.data_airtime(payload);
        let sifs = self.sifs();
        if use_rts {
            ExchangeDurations {
                success: self.rts + self.cts + data + self.ack + sifs * 3 + self.difs(),
                collision: self.rts + self.eifs(),
            }
        } else {
            ExchangeDurations {
                success: data + sifs + self.ack + self.difs(),
                collision: data + self.eifs(),
            }
        }
    }
}

fn airtime_with(params: &PhyParams, mpdu_bytes: u32, rate: u64) -> Result<SimTime, PhyError> {
    let per_symbol = u64::from(data_bits_per_symbol(rate)?);
    let bits = u64::from(params.service_bits + params.tail_bits) + 8 * u64::from(mpdu_bytes);
    let symbols = bits.div_ceil(per_symbol);
    Ok(params.preamble_plus_signal + params.symbol_time * symbols)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R12: u64 = 12_000_000;

    fn phy() -> Phy {
        Phy::new(PhyParams::default(), FrameSizes::default()).unwrap()
    }

    #[test]
    fn control_and_data_airtimes() {
        let phy = phy();
        assert_eq!(phy.airtime(14, R12).unwrap(), SimTime::from_micros(32));
        assert_eq!(phy.airtime(20, R12).unwrap(), SimTime::from_micros(36));
        assert_eq!(phy.airtime(576, R12).unwrap(), SimTime::from_micros(408));
        assert_eq!(phy.data_airtime(512), SimTime::from_micros(408));
    }

    #[test]
    fn interframe_spaces() {
        let phy = phy();
        assert_eq!(phy.difs(), SimTime::from_micros(34));
        assert_eq!(phy.eifs(), SimTime::from_micros(82));
        assert!(phy.eifs() > phy.difs());
    }

    #[test]
    fn eifs_follows_control_rate() {
        let params = PhyParams {
            control_rate: 6_000_000,
            ..PhyParams::default()
        };
        let phy = Phy::new(params, FrameSizes::default()).unwrap();
        // 134 bits over 24 bits/symbol -> 6 symbols -> 44 us ACK
        assert_eq!(phy.ack_airtime(), SimTime::from_micros(44));
        assert_eq!(phy.eifs(), SimTime::from_micros(16 + 44 + 34));
    }

    #[test]
    fn unsupported_rate_is_rejected() {
        let params = PhyParams {
            data_rate: 11_000_000,
            ..PhyParams::default()
        };
        assert_eq!(
            Phy::new(params, FrameSizes::default()),
            Err(PhyError::UnsupportedRate(11_000_000))
        );
        assert!(phy().airtime(10, 5_500_000).is_err());
    }

    #[test]
    fn exchange_durations_basic_and_rts() {
        let phy = phy();
        let basic = phy.exchange_durations(512, false);
        assert_eq!(basic.success, SimTime::from_micros(490));
        assert_eq!(basic.collision, SimTime::from_micros(408 + 82));
        let rts = phy.exchange_durations(512, true);
        assert_eq!(
            rts.success,
            SimTime::from_micros(36 + 32 + 408 + 32 + 48 + 34)
        );
        assert_eq!(rts.collision, SimTime::from_micros(36 + 82));
        assert!(rts.collision < basic.collision);
    }

    #[test]
    fn zero_payload_still_costs_overhead() {
        let basic = phy().exchange_durations(0, false);
        assert!(basic.success > SimTime::ZERO);
    }

    #[test]
    fn mpdu_overhead_is_64_bytes() {
        let sizes = FrameSizes::default();
        assert_eq!(sizes.data_mpdu_bytes(512), 576);
        assert_eq!(sizes.ip_bytes(512), 540);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn airtime_is_monotone_and_symbol_aligned(a in 0u32..4000, b in 0u32..4000) {
                let phy = phy();
                let (lo, hi) = (a.min(b), a.max(b));
                let t_lo = phy.airtime(lo, R12).unwrap();
                let t_hi = phy.airtime(hi, R12).unwrap();
                prop_assert!(t_lo <= t_hi);
                let body = t_hi - SimTime::from_micros(20);
                prop_assert_eq!(body.as_nanos() % 4_000, 0);
            }

            #[test]
            fn rts_collisions_are_shorter(payload in 1u32..2304) {
                let phy = phy();
                prop_assert!(
                    phy.exchange_durations(payload, true).collision
                        < phy.exchange_durations(payload, false).collision
                );
            }
        }
    }
}
