//! Closed-form bandwidth-efficiency, density, and power-efficiency
//! evaluation for every attach approach.
//!
//! All results are ratios of terms that are homogeneous of degree one
//! in the mix counts, so every metric is invariant under scaling a mix
//! `xRyW -> kx R ky W`.
//!
//! A note on the data-power ratio orientation: `p_data` is implemented
//! as useful-data lane activity divided by the weighted total lane
//! activity, i.e. `p_data = 512(x+y) / sum(power terms)`. This is the
//! only orientation consistent with `p_data <= 1` and
//! `power_eff = peak / p_data >= peak`.

use thiserror::Error;

use crate::model::{
    baseline_metrics, ApproachId, AsymBreakdown, Breakdown, LinkVariant, MetricsResult,
    SlotBreakdown, TrafficMix,
};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error(
        "inconsistent CHI parameters: {granules} granules x {granule_bytes}B + {header_bytes}B header != 256B"
    )]
    BadChiParams {
        granules: u32,
        granule_bytes: u32,
        header_bytes: u32,
    },
}

// ---------------------------------------------------------------------------
// LPDDR6 on asymmetric UCIe (74-lane module)
// ---------------------------------------------------------------------------

/// UI needed to move `x` reads and `y` writes: a 576-bit cache line
/// (512 data + 64 meta/ECC, two 288-bit LPDDR6 granules) takes 16 UI
/// over the 36 read-data lanes and 24 UI over the 24 write-data lanes.
pub fn lpddr6_time_ui(mix: TrafficMix) -> f64 {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    8.0 * f64::max(2.0 * x, 3.0 * y)
}

/// Bandwidth efficiency of the 74-lane LPDDR6 module:
/// `32(x+y) / (37 max(2x, 3y))`.
pub fn lpddr6_bw_eff(mix: TrafficMix) -> f64 {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    32.0 * (x + y) / (37.0 * f64::max(2.0 * x, 3.0 * y))
}

/// Per-lane-group power terms over one `t_xRyW` window, in lane-UI.
///
/// Groups: 26 write-side data+mask lanes, 10 command lanes carrying
/// 96 bits per operation, the write-side CRC lane (active whenever
/// write data or commands flow), and the 37 read-side data+CRC lanes.
pub fn lpddr6_breakdown(mix: TrafficMix, idle_fraction: f64) -> AsymBreakdown {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    let p = idle_fraction;
    let t = lpddr6_time_ui(mix);
    let cmd_bits = 96.0 * (x + y);
    AsymBreakdown {
        t_ui: t,
        p_s2m_dq_wmask: 26.0 * (24.0 * y + (t - 24.0 * y) * p),
        p_s2m_cmd: cmd_bits + (10.0 * t - cmd_bits) * p,
        p_s2m_crc: f64::max(24.0 * y, 9.6 * (x + y)) * (1.0 - p) + t * p,
        p_m2s_data_crc: 37.0 * (16.0 * x * (1.0 - p) + t * p),
    }
}

/// Data-power ratio and effective power efficiency for the LPDDR6
/// asymmetric mapping.
pub fn lpddr6_power(mix: TrafficMix, link: &LinkVariant) -> (f64, f64) {
    let breakdown = lpddr6_breakdown(mix, link.idle_fraction);
    let p_data = mix.data_bits() as f64 / breakdown.total();
    (p_data, link.peak_pj_per_bit / p_data)
}

fn lpddr6_metrics(mix: TrafficMix, link: &LinkVariant) -> MetricsResult {
    let bw_eff = lpddr6_bw_eff(mix);
    let breakdown = lpddr6_breakdown(mix, link.idle_fraction);
    let p_data = mix.data_bits() as f64 / breakdown.total();
    MetricsResult {
        bw_eff,
        bw_density_linear: bw_eff * link.shoreline_gbps_mm,
        bw_density_areal: bw_eff * link.areal_gbps_mm2,
        p_data,
        power_eff_pj_b: link.peak_pj_per_bit / p_data,
        breakdown: Breakdown::Asym(breakdown),
    }
}

// ---------------------------------------------------------------------------
// HBM3/4 on asymmetric UCIe (138-lane module)
// ---------------------------------------------------------------------------

/// Command bits per operation assumed for the HBM mapping. The value
/// mirrors the LPDDR6 constant; it is a model assumption, exposed so
/// sensitivity studies can vary it.
pub const HBM_CMD_BITS_PER_OP: f64 = 96.0;

/// UI for `xRyW` on the 138-lane HBM module: a cache line takes 8 UI
/// over 72 read-data lanes and 16 UI over 36 write-data lanes.
pub fn hbm_asym_time_ui(mix: TrafficMix) -> f64 {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    8.0 * f64::max(x, 2.0 * y)
}

pub fn hbm_asym_bw_eff(mix: TrafficMix) -> f64 {
    let t = hbm_asym_time_ui(mix);
    mix.data_bits() as f64 / (138.0 * t)
}

/// HBM lane groups: 40 write data+mask, 24 command, 1 write-side CRC,
/// 73 read data+CRC. Structure matches the LPDDR6 terms.
pub fn hbm_asym_breakdown(mix: TrafficMix, idle_fraction: f64, cmd_bits_per_op: f64) -> AsymBreakdown {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    let p = idle_fraction;
    let t = hbm_asym_time_ui(mix);
    let cmd_bits = cmd_bits_per_op * (x + y);
    let cmd_ui_per_lane = cmd_bits / 24.0;
    AsymBreakdown {
        t_ui: t,
        p_s2m_dq_wmask: 40.0 * (16.0 * y + (t - 16.0 * y) * p),
        p_s2m_cmd: cmd_bits + (24.0 * t - cmd_bits) * p,
        p_s2m_crc: f64::max(16.0 * y, cmd_ui_per_lane) * (1.0 - p) + t * p,
        p_m2s_data_crc: 73.0 * (8.0 * x * (1.0 - p) + t * p),
    }
}

pub fn hbm_asym_power(mix: TrafficMix, link: &LinkVariant) -> (f64, f64) {
    let breakdown = hbm_asym_breakdown(mix, link.idle_fraction, HBM_CMD_BITS_PER_OP);
    let p_data = mix.data_bits() as f64 / breakdown.total();
    (p_data, link.peak_pj_per_bit / p_data)
}

fn hbm_asym_metrics(mix: TrafficMix, link: &LinkVariant) -> MetricsResult {
    let bw_eff = hbm_asym_bw_eff(mix);
    let breakdown = hbm_asym_breakdown(mix, link.idle_fraction, HBM_CMD_BITS_PER_OP);
    let p_data = mix.data_bits() as f64 / breakdown.total();
    MetricsResult {
        bw_eff,
        bw_density_linear: bw_eff * link.shoreline_gbps_mm,
        bw_density_areal: bw_eff * link.areal_gbps_mm2,
        p_data,
        power_eff_pj_b: link.peak_pj_per_bit / p_data,
        breakdown: Breakdown::Asym(breakdown),
    }
}

// ---------------------------------------------------------------------------
// CXL.Mem on symmetric UCIe, unoptimized layout
// ---------------------------------------------------------------------------

/// Slot counts for the unoptimized CXL.Mem layout: one request per
/// slot, two responses per slot, four data slots per cache line.
pub fn cxl_unopt_slots(mix: TrafficMix) -> SlotBreakdown {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    let s2m = x + 5.0 * y;
    let m2s = (9.0 * x + y) / 2.0;
    SlotBreakdown {
        s2m,
        m2s,
        max: f64::max(s2m, m2s),
    }
}

/// Unoptimized CXL.Mem metrics. 15 of 16 slot positions per flit carry
/// traffic (the last 16 bytes hold reserved/credit/CRC fields), hence
/// the 15/16 factor. The data-power ratio equals the bandwidth
/// efficiency for this layout: lanes are either all on or all off per
/// direction and the layout model books no gated idle term.
pub fn cxl_unopt_metrics(mix: TrafficMix, link: &LinkVariant) -> MetricsResult {
    let slots = cxl_unopt_slots(mix);
    let bw_eff = (15.0 / 16.0) * 4.0 * mix.total() as f64 / (2.0 * slots.max);
    let p_data = bw_eff;
    MetricsResult {
        bw_eff,
        bw_density_linear: bw_eff * link.shoreline_gbps_mm,
        bw_density_areal: bw_eff * link.areal_gbps_mm2,
        p_data,
        power_eff_pj_b: link.peak_pj_per_bit / p_data,
        breakdown: Breakdown::Slots(slots),
    }
}

// ---------------------------------------------------------------------------
// CXL.Mem on symmetric UCIe, optimized layout
// ---------------------------------------------------------------------------

/// Slot counts for the optimized layout. Data consumes 16/15 slot
/// positions per G-slot (the HS position passes with every 15 G-slots);
/// one request fits the 10-byte HS-slot or a G-slot and four responses
/// share an HS-slot.
pub fn cxl_opt_slots(mix: TrafficMix) -> SlotBreakdown {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    let s2m = (16.0 / 15.0) * 4.0 * y + f64::max((x + y) - 4.0 * y / 15.0, 0.0);
    let m2s = (16.0 / 15.0) * 4.0 * x + f64::max((x + y) / 4.0 - 4.0 * x / 15.0, 0.0);
    SlotBreakdown {
        s2m,
        m2s,
        max: f64::max(s2m, m2s),
    }
}

/// Optimized CXL.Mem metrics: no slot position is lost to CRC/header
/// fields, and slack slot positions are booked at the gated idle
/// fraction.
pub fn cxl_opt_metrics(mix: TrafficMix, link: &LinkVariant) -> MetricsResult {
    let slots = cxl_opt_slots(mix);
    let n = mix.total() as f64;
    let p = link.idle_fraction;
    let bw_eff = 4.0 * n / (2.0 * slots.max);
    let weighted = slots.s2m + slots.m2s + (2.0 * slots.max - slots.s2m - slots.m2s) * p;
    let p_data = 4.0 * n / weighted;
    MetricsResult {
        bw_eff,
        bw_density_linear: bw_eff * link.shoreline_gbps_mm,
        bw_density_areal: bw_eff * link.areal_gbps_mm2,
        p_data,
        power_eff_pj_b: link.peak_pj_per_bit / p_data,
        breakdown: Breakdown::Slots(slots),
    }
}

// ---------------------------------------------------------------------------
// CHI Format-X on symmetric UCIe
// ---------------------------------------------------------------------------

/// Parameters of the CHI container model. Defaults describe Format-X:
/// twelve 20-byte granules plus 16 bytes of link/protocol headers per
/// 256-byte container, with each data granule carrying a 16-byte
/// payload quarter of a cache line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiModelParams {
    pub granules_per_flit: u32,
    pub granule_bytes: u32,
    pub header_bytes_per_flit: u32,
    pub granules_per_cacheline: u32,
    pub requests_per_granule: u32,
    pub responses_per_granule: u32,
}

impl Default for ChiModelParams {
    fn default() -> Self {
        Self {
            granules_per_flit: 12,
            granule_bytes: 20,
            header_bytes_per_flit: 16,
            granules_per_cacheline: 4,
            requests_per_granule: 1,
            responses_per_granule: 2,
        }
    }
}

impl ChiModelParams {
    pub fn validate(&self) -> Result<(), AnalyticError> {
        if self.granules_per_flit * self.granule_bytes + self.header_bytes_per_flit != 256 {
            return Err(AnalyticError::BadChiParams {
                granules: self.granules_per_flit,
                granule_bytes: self.granule_bytes,
                header_bytes: self.header_bytes_per_flit,
            });
        }
        Ok(())
    }
}

/// Granule counts per direction, structured like [`cxl_unopt_slots`].
pub fn chi_slots(mix: TrafficMix, params: &ChiModelParams) -> SlotBreakdown {
    let (x, y) = (mix.reads() as f64, mix.writes() as f64);
    let data = params.granules_per_cacheline as f64;
    let s2m = (x + y) / params.requests_per_granule as f64 + data * y;
    let m2s = (x + y) / params.responses_per_granule as f64 + data * x;
    SlotBreakdown {
        s2m,
        m2s,
        max: f64::max(s2m, m2s),
    }
}

/// CHI container metrics: granule accounting like the unoptimized CXL
/// model, scaled by the container's effective payload fraction
/// (12 x 20B granules of which 16B is payload, over 256B = 0.75 under
/// defaults).
pub fn chi_metrics(
    mix: TrafficMix,
    link: &LinkVariant,
    params: &ChiModelParams,
) -> Result<MetricsResult, AnalyticError> {
    params.validate()?;
    let slots = chi_slots(mix, params);
    // Flits per direction = granules / granules_per_flit; each flit
    // consumes 2048 bit-times of lane capacity, both directions paced
    // by the bottleneck direction.
    let flits = 2.0 * slots.max / params.granules_per_flit as f64;
    let bw_eff = mix.data_bits() as f64 / (flits * 2048.0);
    let p_data = bw_eff;
    Ok(MetricsResult {
        bw_eff,
        bw_density_linear: bw_eff * link.shoreline_gbps_mm,
        bw_density_areal: bw_eff * link.areal_gbps_mm2,
        p_data,
        power_eff_pj_b: link.peak_pj_per_bit / p_data,
        breakdown: Breakdown::Slots(slots),
    })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Evaluate one (approach, mix, link) point. Baselines ignore the link.
pub fn evaluate(approach: ApproachId, mix: TrafficMix, link: &LinkVariant) -> MetricsResult {
    match approach {
        ApproachId::Lpddr6Asym => lpddr6_metrics(mix, link),
        ApproachId::HbmAsym => hbm_asym_metrics(mix, link),
        ApproachId::ChiSym => chi_metrics(mix, link, &ChiModelParams::default())
            .expect("default CHI parameters are consistent"),
        ApproachId::CxlUnopt => cxl_unopt_metrics(mix, link),
        ApproachId::CxlOpt => cxl_opt_metrics(mix, link),
        ApproachId::BaselineLpddr6 | ApproachId::BaselineHbm4 => {
            baseline_metrics(approach, mix).expect("baseline id")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset_link;

    fn mix(x: u32, y: u32) -> TrafficMix {
        TrafficMix::new(x, y).unwrap()
    }

    const EPS: f64 = 1e-9;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < EPS, "{a} vs {b}");
    }

    #[test]
    fn lpddr6_time() {
        close(lpddr6_time_ui(mix(1, 0)), 16.0);
        close(lpddr6_time_ui(mix(0, 1)), 24.0);
        close(lpddr6_time_ui(mix(1, 1)), 24.0);
    }

    #[test]
    fn lpddr6_bw() {
        close(lpddr6_bw_eff(mix(1, 0)), 32.0 / 74.0);
        close(lpddr6_bw_eff(mix(1, 1)), 64.0 / 111.0);
        close(lpddr6_bw_eff(mix(3, 2)), 160.0 / 222.0);
    }

    #[test]
    fn lpddr6_bw_maximized_at_3r2w() {
        // Brute force over integer mixes: the maximum sits on 2x = 3y.
        let best = lpddr6_bw_eff(mix(3, 2));
        for x in 0..=10u32 {
            for y in 0..=10u32 {
                if x == 0 && y == 0 {
                    continue;
                }
                let e = lpddr6_bw_eff(mix(x, y));
                assert!(e <= best + EPS, "{x}R{y}W beats 3R2W: {e}");
            }
        }
    }

    #[test]
    fn lpddr6_power_p_zero() {
        // Hand-evaluated with perfect gating (p = 0) at 1R0W:
        // 26*0 + 96 + 9.6 + 37*16 = 697.6 lane-UI.
        let b = lpddr6_breakdown(mix(1, 0), 0.0);
        close(b.p_s2m_dq_wmask, 0.0);
        close(b.p_s2m_cmd, 96.0);
        close(b.p_s2m_crc, 9.6);
        close(b.p_m2s_data_crc, 592.0);
        close(512.0 / b.total(), 512.0 / 697.6);
    }

    #[test]
    fn lpddr6_power_p_one_collapses_to_full_bus() {
        // p = 1: every lane fully powered, p_data = 512(x+y)/(74 t).
        for (x, y) in [(1, 0), (1, 1), (3, 2), (2, 5)] {
            let m = mix(x, y);
            let b = lpddr6_breakdown(m, 1.0);
            close(b.total(), 74.0 * lpddr6_time_ui(m));
        }
    }

    #[test]
    fn hbm_bw() {
        close(hbm_asym_bw_eff(mix(1, 0)), 512.0 / 1104.0);
        close(hbm_asym_bw_eff(mix(1, 1)), 1024.0 / 2208.0);
        close(hbm_asym_bw_eff(mix(2, 1)), 1536.0 / 2208.0);
    }

    #[test]
    fn hbm_bw_maximized_at_x_eq_2y() {
        let best = hbm_asym_bw_eff(mix(2, 1));
        for x in 0..=12u32 {
            for y in 0..=12u32 {
                if x == 0 && y == 0 {
                    continue;
                }
                assert!(hbm_asym_bw_eff(mix(x, y)) <= best + EPS);
            }
        }
    }

    #[test]
    fn hbm_power_p_one_collapses_to_full_bus() {
        for (x, y) in [(1, 0), (1, 1), (2, 1), (1, 4)] {
            let m = mix(x, y);
            let b = hbm_asym_breakdown(m, 1.0, HBM_CMD_BITS_PER_OP);
            close(b.total(), 138.0 * hbm_asym_time_ui(m));
        }
    }

    #[test]
    fn unopt_slots() {
        let s = cxl_unopt_slots(mix(1, 0));
        close(s.s2m, 1.0);
        close(s.m2s, 4.5);
        close(s.max, 4.5);
        let s = cxl_unopt_slots(mix(0, 1));
        close(s.s2m, 5.0);
        close(s.m2s, 0.5);
        close(s.max, 5.0);
        let s = cxl_unopt_slots(mix(1, 1));
        close(s.s2m, 6.0);
        close(s.m2s, 5.0);
        close(s.max, 6.0);
    }

    #[test]
    fn unopt_metrics() {
        let link = preset_link("ucie-a-55").unwrap();
        close(cxl_unopt_metrics(mix(1, 1), &link).bw_eff, 0.625);
        close(cxl_unopt_metrics(mix(1, 0), &link).bw_eff, 5.0 / 12.0);
        close(
            cxl_unopt_metrics(mix(1, 1), &link).bw_density_linear,
            0.625 * 658.44,
        );
    }

    #[test]
    fn opt_slots() {
        let s = cxl_opt_slots(mix(1, 1));
        close(s.s2m, 6.0);
        close(s.m2s, 4.5);
        close(s.max, 6.0);
        let s = cxl_opt_slots(mix(1, 0));
        close(s.s2m, 1.0);
        close(s.m2s, 64.0 / 15.0);
        close(s.max, 64.0 / 15.0);
        let s = cxl_opt_slots(mix(0, 1));
        close(s.s2m, 5.0);
        close(s.m2s, 0.25);
        close(s.max, 5.0);
    }

    #[test]
    fn opt_metrics() {
        let link = preset_link("ucie-a-55").unwrap();
        let m = cxl_opt_metrics(mix(1, 1), &link);
        close(m.bw_eff, 2.0 / 3.0);
        close(m.p_data, 8.0 / 10.725);
        close(m.power_eff_pj_b, 0.3 / (8.0 / 10.725));
        close(cxl_opt_metrics(mix(1, 0), &link).bw_eff, 4.0 / (128.0 / 15.0));
        close(cxl_opt_metrics(mix(0, 1), &link).bw_eff, 0.4);
        // The 1R1W gain over the unoptimized layout is exactly 16/15.
        let gain = m.bw_eff / cxl_unopt_metrics(mix(1, 1), &link).bw_eff;
        close(gain, 16.0 / 15.0);
    }

    #[test]
    fn chi_below_unopt() {
        let link = preset_link("ucie-a-55").unwrap();
        let params = ChiModelParams::default();
        for (x, y) in [(1, 0), (0, 1), (1, 1), (2, 1), (3, 2), (1, 3)] {
            let m = mix(x, y);
            let chi = chi_metrics(m, &link, &params).unwrap().bw_eff;
            let unopt = cxl_unopt_metrics(m, &link).bw_eff;
            assert!(chi < unopt, "{x}R{y}W: chi {chi} vs unopt {unopt}");
        }
    }

    #[test]
    fn chi_default_values() {
        let link = preset_link("ucie-a-55").unwrap();
        let params = ChiModelParams::default();
        // 1R1W: s2m = 2 + 4 = 6 granules, bw_eff = 1.5 * 2 / 6 = 0.5.
        let m = chi_metrics(mix(1, 1), &link, &params).unwrap();
        close(m.bw_eff, 0.5);
    }

    #[test]
    fn chi_param_degeneration_matches_cxl_opt() {
        // 15 x 16B granules + 16B header with four responses per granule
        // reproduces the optimized slot counts at 1R1W.
        let params = ChiModelParams {
            granules_per_flit: 15,
            granule_bytes: 16,
            header_bytes_per_flit: 16,
            responses_per_granule: 4,
            ..ChiModelParams::default()
        };
        params.validate().unwrap();
        let chi = chi_slots(mix(1, 1), &params);
        let opt = cxl_opt_slots(mix(1, 1));
        close(chi.s2m, opt.s2m);
        close(chi.m2s, opt.m2s);
    }

    #[test]
    fn chi_bad_params_rejected() {
        let params = ChiModelParams {
            granule_bytes: 21,
            ..ChiModelParams::default()
        };
        assert!(params.validate().is_err());
        let link = preset_link("ucie-a-55").unwrap();
        assert!(chi_metrics(mix(1, 1), &link, &params).is_err());
    }

    #[test]
    fn evaluate_dispatch() {
        let link = preset_link("ucie-a-55").unwrap();
        let hbm4 = evaluate(ApproachId::BaselineHbm4, mix(1, 1), &link);
        close(hbm4.bw_density_linear, 204.8);
        let opt = evaluate(ApproachId::CxlOpt, mix(1, 1), &link);
        close(opt.bw_density_linear, (2.0 / 3.0) * 658.44);
        let s110 = preset_link("ucie-s-110").unwrap();
        let lp = evaluate(ApproachId::Lpddr6Asym, mix(3, 2), &s110);
        close(lp.bw_density_linear, (160.0 / 222.0) * 224.0);
    }

    #[test]
    fn bounds_and_scale_invariance() {
        let link = preset_link("ucie-a-55").unwrap();
        for approach in ApproachId::ALL {
            for (x, y) in [(1, 0), (0, 1), (1, 1), (2, 1), (3, 2), (1, 3), (7, 5)] {
                let m = mix(x, y);
                let r = evaluate(approach, m, &link);
                assert!(r.bw_eff > 0.0 && r.bw_eff <= 1.0 + EPS, "{approach} {m}");
                assert!(r.p_data > 0.0 && r.p_data <= 1.0 + EPS, "{approach} {m}");
                for k in [2u32, 3, 7] {
                    let rk = evaluate(approach, m.scaled(k), &link);
                    close(rk.bw_eff, r.bw_eff);
                    close(rk.p_data, r.p_data);
                }
            }
        }
    }

    #[test]
    fn monotone_gating() {
        // p_data never increases as the idle fraction p grows.
        let mut link = preset_link("ucie-a-55").unwrap();
        for (x, y) in [(1, 0), (0, 1), (1, 1), (3, 2), (2, 1)] {
            let m = mix(x, y);
            let mut prev = [f64::INFINITY; 3];
            for p in [0.05, 0.15, 0.5, 0.9, 0.99] {
                link.idle_fraction = p;
                let cur = [
                    lpddr6_power(m, &link).0,
                    hbm_asym_power(m, &link).0,
                    cxl_opt_metrics(m, &link).p_data,
                ];
                for (c, pr) in cur.iter().zip(prev.iter()) {
                    assert!(*c <= *pr + EPS);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn power_reconstruction_identity() {
        // p_data x sum(power terms) = 512(x+y) exactly.
        let link = preset_link("ucie-a-55").unwrap();
        for (x, y) in [(1, 0), (0, 1), (1, 1), (3, 2), (5, 8)] {
            let m = mix(x, y);
            let b = lpddr6_breakdown(m, link.idle_fraction);
            let (p_data, _) = lpddr6_power(m, &link);
            close(p_data * b.total(), m.data_bits() as f64);
        }
    }
}
