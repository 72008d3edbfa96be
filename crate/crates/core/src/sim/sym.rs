//! Flit-level simulation of the symmetric approaches: a real
//! transaction stream runs through the flit codec, a lossy replayed
//! channel per direction, and back out through the decoder.
//!
//! Each direction has 64 data lanes, so one 256-byte flit costs 32 UI;
//! elapsed time is the bottleneck direction's transmission count. Lane
//! power follows the layout's accounting convention: the unoptimized
//! and CHI layouts keep a powered direction fully on for the run (their
//! closed forms book no gated idle term), while the optimized layout
//! is active only while its own flits are on the wire and idles the
//! rest at the gated fraction.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::{
    Flit, FlitPacker, FlitUnpacker, Layout, RequestHeader, ResponseHeader, TxnItem, REQ_CMD_READ,
    REQ_CMD_WRITE, RESP_CMD_CMPL, RESP_CMD_DATA,
};
use crate::model::{ApproachId, Direction, LatencyModel};

use super::latency::{zero_load_ns, LatencyStats};
use super::replay::ReplayChannel;
use super::{GroupUsage, SimConfig, SimMetrics};

pub const LANES_PER_DIRECTION: f64 = 64.0;
pub const UI_PER_FLIT: f64 = 32.0;

fn layout_for(approach: ApproachId) -> Layout {
    match approach {
        ApproachId::CxlUnopt => Layout::CxlUnopt,
        ApproachId::CxlOpt => Layout::CxlOpt,
        ApproachId::ChiSym => Layout::Chi,
        other => unreachable!("{other} is not a symmetric approach"),
    }
}

fn line_pattern(tag: u16, salt: u8) -> [u8; 64] {
    let mut data = [0u8; 64];
    for (i, b) in data.iter_mut().enumerate() {
        *b = (i as u8).wrapping_mul(31).wrapping_add(tag as u8) ^ salt;
    }
    data
}

#[cfg_attr(not(test), allow(dead_code))] // stream fields are test-only hooks
pub(super) struct SymOutcome {
    pub metrics: SimMetrics,
    pub generated_s2m: Vec<TxnItem>,
    pub generated_m2s: Vec<TxnItem>,
    pub delivered_s2m: Vec<TxnItem>,
    pub delivered_m2s: Vec<TxnItem>,
}

pub(super) fn simulate(cfg: &SimConfig) -> SymOutcome {
    let layout = layout_for(cfg.approach);
    let tag_bits = if layout == Layout::CxlOpt { 8 } else { 16 };
    let tag_mask: u16 = ((1u32 << tag_bits) - 1) as u16;
    let (x, y) = (cfg.mix.reads(), cfg.mix.writes());

    let mut s2m_packer = FlitPacker::new(layout, Direction::SocToMem);
    let mut m2s_packer = FlitPacker::new(layout, Direction::MemToSoc);
    let mut s2m_flits: Vec<Flit> = Vec::new();
    let mut m2s_flits: Vec<Flit> = Vec::new();
    let mut generated_s2m = Vec::new();
    let mut generated_m2s = Vec::new();

    let mut tag: u32 = 0;
    let mut next_tag = || {
        let t = (tag & tag_mask as u32) as u16;
        tag += 1;
        t
    };

    // Open-loop generation: emit whole epochs until the bottleneck
    // direction has filled the requested duration.
    loop {
        for _ in 0..x {
            let t = next_tag();
            let req = TxnItem::ReadReq(RequestHeader {
                cmd: REQ_CMD_READ,
                meta_data: 0,
                address: 0x40 * t as u64,
                tag: t,
                poison: false,
            });
            let resp = TxnItem::DataResp(
                ResponseHeader {
                    cmd: RESP_CMD_DATA,
                    meta_data: 0,
                    devload: 0,
                    tag: t,
                    poison: false,
                },
                line_pattern(t, 0x5A),
            );
            generated_s2m.push(req);
            generated_m2s.push(resp);
            s2m_packer.push(req).expect("valid read request");
            m2s_packer.push(resp).expect("valid data response");
        }
        for _ in 0..y {
            let t = next_tag();
            let req = TxnItem::WriteReq(
                RequestHeader {
                    cmd: REQ_CMD_WRITE,
                    meta_data: 0,
                    address: 0x40 * t as u64 + 1,
                    tag: t,
                    poison: false,
                },
                line_pattern(t, 0xA5),
            );
            let resp = TxnItem::Cmpl(ResponseHeader {
                cmd: RESP_CMD_CMPL,
                meta_data: 0,
                devload: 0,
                tag: t,
                poison: false,
            });
            generated_s2m.push(req);
            generated_m2s.push(resp);
            s2m_packer.push(req).expect("valid write request");
            m2s_packer.push(resp).expect("valid completion");
        }
        s2m_flits.extend(s2m_packer.take_full_flits());
        m2s_flits.extend(m2s_packer.take_full_flits());
        let bottleneck = s2m_flits.len().max(m2s_flits.len()) as f64;
        if bottleneck * UI_PER_FLIT >= cfg.duration_ui as f64 {
            break;
        }
    }
    s2m_flits.extend(s2m_packer.flush());
    m2s_flits.extend(m2s_packer.flush());

    // Two independent lossy channels share nothing but the seed salt.
    let mut rng_s2m = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x53324d);
    let mut rng_m2s = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4d3253);
    let mut ch_s2m = ReplayChannel::new(Direction::SocToMem, cfg.error_rate, UI_PER_FLIT)
        .with_forced_nak(cfg.force_nak_at)
        .with_trace(cfg.trace);
    let mut ch_m2s =
        ReplayChannel::new(Direction::MemToSoc, cfg.error_rate, UI_PER_FLIT).with_trace(cfg.trace);
    let out_s2m = ch_s2m.transmit(&s2m_flits, &mut rng_s2m);
    let out_m2s = ch_m2s.transmit(&m2s_flits, &mut rng_m2s);

    let mut un_s2m = FlitUnpacker::new(layout, Direction::SocToMem);
    let mut un_m2s = FlitUnpacker::new(layout, Direction::MemToSoc);
    let mut delivered_s2m = Vec::new();
    let mut delivered_m2s = Vec::new();
    for flit in &out_s2m.delivered {
        delivered_s2m.extend(un_s2m.push_flit(flit).expect("clean flit decodes"));
    }
    for flit in &out_m2s.delivered {
        delivered_m2s.extend(un_m2s.push_flit(flit).expect("clean flit decodes"));
    }

    let mut m = SimMetrics::zero();
    m.delivered_reads = delivered_s2m
        .iter()
        .filter(|t| matches!(t, TxnItem::ReadReq(_)))
        .count() as u64;
    m.delivered_writes = delivered_s2m
        .iter()
        .filter(|t| matches!(t, TxnItem::WriteReq(..)))
        .count() as u64;
    m.delivered_s2m_lines = m.delivered_writes;
    m.delivered_m2s_lines = delivered_m2s
        .iter()
        .filter(|t| matches!(t, TxnItem::DataResp(..)))
        .count() as u64;
    m.retried_flits = out_s2m.retried + out_m2s.retried;

    let tx_s2m = out_s2m.transmissions as f64;
    let tx_m2s = out_m2s.transmissions as f64;
    m.elapsed_ui = tx_s2m.max(tx_m2s) * UI_PER_FLIT;

    let usage = |name: &str, tx: f64| -> GroupUsage {
        let (active, idle) = if layout == Layout::CxlOpt {
            // Active only while this direction's flits are on the wire.
            let active = LANES_PER_DIRECTION * tx * UI_PER_FLIT;
            (active, LANES_PER_DIRECTION * m.elapsed_ui - active)
        } else {
            // Powered direction stays fully on for the run.
            (LANES_PER_DIRECTION * m.elapsed_ui, 0.0)
        };
        GroupUsage {
            name: name.into(),
            lanes: LANES_PER_DIRECTION,
            active_lane_ui: active,
            idle_lane_ui: idle,
        }
    };
    m.groups = vec![usage("s2m-lanes", tx_s2m), usage("m2s-lanes", tx_m2s)];

    let (read_ns, write_ns) = zero_load_ns(cfg.approach, &cfg.link, &LatencyModel::default());
    m.latency = LatencyStats::from_mix(m.delivered_reads, m.delivered_writes, read_ns, write_ns);
    m.trace.extend(ch_s2m.trace.iter().copied());
    m.trace.extend(ch_m2s.trace.iter().copied());
    m.finish(cfg, 2.0 * LANES_PER_DIRECTION);

    SymOutcome {
        metrics: m,
        generated_s2m,
        generated_m2s,
        delivered_s2m,
        delivered_m2s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset_link, TrafficMix};

    fn cfg(approach: ApproachId, x: u32, y: u32, duration: u64) -> SimConfig {
        SimConfig::new(
            approach,
            preset_link("ucie-a-55").unwrap(),
            TrafficMix::new(x, y).unwrap(),
            duration,
        )
    }

    #[test]
    fn conservation_without_errors() {
        for approach in [ApproachId::CxlUnopt, ApproachId::CxlOpt, ApproachId::ChiSym] {
            let out = simulate(&cfg(approach, 2, 1, 50_000));
            assert_eq!(out.delivered_s2m, out.generated_s2m, "{approach} S2M");
            assert_eq!(out.delivered_m2s, out.generated_m2s, "{approach} M2S");
        }
    }

    #[test]
    fn exactly_once_in_order_under_errors() {
        for approach in [ApproachId::CxlUnopt, ApproachId::CxlOpt, ApproachId::ChiSym] {
            let mut c = cfg(approach, 1, 1, 100_000);
            c.error_rate = 0.02;
            c.seed = 99;
            let out = simulate(&c);
            assert!(out.metrics.retried_flits > 0, "{approach}");
            assert_eq!(out.delivered_s2m, out.generated_s2m, "{approach} S2M");
            assert_eq!(out.delivered_m2s, out.generated_m2s, "{approach} M2S");
        }
    }

    #[test]
    fn cxl_opt_1r1w_power_matches_closed_form() {
        let c = cfg(ApproachId::CxlOpt, 1, 1, 1_000_000);
        let m = simulate(&c).metrics;
        let expect = 0.7459; // 8 / 10.725
        assert!(
            (m.p_data - expect).abs() / expect < 0.01,
            "p_data {}",
            m.p_data
        );
    }

    #[test]
    fn forced_nak_trace_visible() {
        let mut c = cfg(ApproachId::CxlUnopt, 1, 1, 20_000);
        c.trace = true;
        c.force_nak_at = Some(100);
        let m = simulate(&c).metrics;
        use crate::sim::TraceEvent;
        let naks: Vec<u64> = m
            .trace
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Nak { seq, .. } => Some(*seq),
                _ => None,
            })
            .collect();
        assert_eq!(naks, vec![100]);
        for e in &m.trace {
            if let TraceEvent::Send { seq, resend: true, .. } = e {
                assert!(*seq >= 100);
            }
        }
    }
}
