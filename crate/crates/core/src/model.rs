//! Shared domain types: traffic mixes, link-variant presets, lane
//! topologies, and the metric result record every evaluator produces.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown link preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid traffic mix: reads and writes cannot both be zero")]
    EmptyMix,
    #[error("malformed mix `{0}`, expected `<x>R<y>W` (e.g. 3R2W)")]
    BadMixFormat(String),
    #[error("unknown approach `{got}`, expected one of: {candidates}")]
    UnknownApproach { got: String, candidates: String },
    #[error("lane topology for {approach} sums to {got} countable lanes, expected {expected}")]
    BadTopology {
        approach: &'static str,
        got: u32,
        expected: u32,
    },
    #[error("idle fraction must lie in (0, 1), got {0}")]
    BadIdleFraction(f64),
    #[error("malformed preset registry at line {line}: {reason}")]
    BadRegistry { line: usize, reason: String },
}

/// An `xRyW` traffic mix: x cache-line reads and y cache-line writes.
///
/// Both counts may be zero individually but not together. Every metric
/// in the crate is parameterized by one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrafficMix {
    reads: u32,
    writes: u32,
}

impl TrafficMix {
    pub fn new(reads: u32, writes: u32) -> Result<Self, ModelError> {
        if reads == 0 && writes == 0 {
            return Err(ModelError::EmptyMix);
        }
        Ok(Self { reads, writes })
    }

    pub fn reads(&self) -> u32 {
        self.reads
    }

    pub fn writes(&self) -> u32 {
        self.writes
    }

    pub fn total(&self) -> u32 {
        self.reads + self.writes
    }

    /// Useful data bits moved by the mix: 512 bits per 64-byte line.
    pub fn data_bits(&self) -> u64 {
        512 * self.total() as u64
    }

    pub fn scaled(&self, k: u32) -> Self {
        Self {
            reads: self.reads * k,
            writes: self.writes * k,
        }
    }
}

impl fmt::Display for TrafficMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}R{}W", self.reads, self.writes)
    }
}

impl FromStr for TrafficMix {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::BadMixFormat(s.to_string());
        let upper = s.to_ascii_uppercase();
        let (r_part, rest) = upper.split_once('R').ok_or_else(bad)?;
        let w_part = rest.strip_suffix('W').ok_or_else(bad)?;
        let reads: u32 = r_part.parse().map_err(|_| bad())?;
        let writes: u32 = w_part.parse().map_err(|_| bad())?;
        TrafficMix::new(reads, writes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Standard2d,
    Advanced25d,
    AsymmetricCustom,
}

impl LinkKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkKind::Standard2d => "standard-2d",
            LinkKind::Advanced25d => "advanced-2.5d",
            LinkKind::AsymmetricCustom => "asymmetric-custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard-2d" => Some(LinkKind::Standard2d),
            "advanced-2.5d" => Some(LinkKind::Advanced25d),
            "asymmetric-custom" => Some(LinkKind::AsymmetricCustom),
            _ => None,
        }
    }
}

/// Bump-field footprint of a link module, used to cross-check the
/// density figures against the aggregate bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub edge_mm: f64,
    pub depth_mm: f64,
    pub aggregate_gbps: f64,
}

/// A UCIe physical preset: width/rate class plus the derived density
/// and power-efficiency constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkVariant {
    pub name: String,
    pub kind: LinkKind,
    pub data_rate_gtps: f64,
    pub bump_pitch_um: f64,
    pub shoreline_gbps_mm: f64,
    pub areal_gbps_mm2: f64,
    pub peak_pj_per_bit: f64,
    /// Fraction of peak power a gated (idle) lane group still burns.
    pub idle_fraction: f64,
    pub footprint: Option<Footprint>,
    /// True when the density numbers are interpolated between the
    /// documented anchor points rather than taken verbatim.
    pub interpolated: bool,
}

impl LinkVariant {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.idle_fraction > 0.0 && self.idle_fraction < 1.0) {
            return Err(ModelError::BadIdleFraction(self.idle_fraction));
        }
        Ok(())
    }

    /// Nanoseconds per UI at this data rate.
    pub fn ui_ns(&self) -> f64 {
        1.0 / self.data_rate_gtps
    }
}

/// Default idle-power fraction for a gated lane group.
pub const IDLE_FRACTION: f64 = 0.15;

fn preset(
    name: &str,
    kind: LinkKind,
    rate: f64,
    pitch: f64,
    shoreline: f64,
    areal: f64,
    pj_b: f64,
    footprint: Option<Footprint>,
    interpolated: bool,
) -> LinkVariant {
    LinkVariant {
        name: name.to_string(),
        kind,
        data_rate_gtps: rate,
        bump_pitch_um: pitch,
        shoreline_gbps_mm: shoreline,
        areal_gbps_mm2: areal,
        peak_pj_per_bit: pj_b,
        idle_fraction: IDLE_FRACTION,
        footprint,
        interpolated,
    }
}

/// The documented link presets.
///
/// `ucie-s-110` is the doubly-stacked x32 standard-package module (two
/// modules on the shoreline, 256 GB/s aggregate); the single-module
/// variant is `ucie-s-110-single`. `ucie-a-45` densities are computed
/// from the fixed 388.8 um advanced-package die edge and the 1043 um
/// depth; they are flagged interpolated since only the 55 um and 25 um
/// points have verbatim anchors.
pub fn link_presets() -> Vec<LinkVariant> {
    use LinkKind::*;
    vec![
        preset(
            "ucie-s-110",
            Standard2d,
            32.0,
            110.0,
            224.0,
            145.44,
            0.6,
            Some(Footprint {
                edge_mm: 1.143,
                depth_mm: 1.54,
                aggregate_gbps: 256.0,
            }),
            false,
        ),
        preset(
            "ucie-s-110-single",
            Standard2d,
            32.0,
            110.0,
            112.0,
            72.72,
            0.6,
            Some(Footprint {
                edge_mm: 1.143,
                depth_mm: 1.54,
                aggregate_gbps: 128.0,
            }),
            false,
        ),
        preset("ucie-s-low", Standard2d, 4.0, 110.0, 28.0, 22.0, 0.5, None, false),
        preset(
            "ucie-a-55",
            Advanced25d,
            32.0,
            55.0,
            658.44,
            416.27,
            0.3,
            Some(Footprint {
                edge_mm: 0.7776,
                depth_mm: 1.585,
                aggregate_gbps: 512.0,
            }),
            false,
        ),
        preset(
            "ucie-a-45",
            Advanced25d,
            32.0,
            45.0,
            1316.87,
            1262.64,
            0.3,
            Some(Footprint {
                edge_mm: 0.3888,
                depth_mm: 1.043,
                aggregate_gbps: 512.0,
            }),
            true,
        ),
        preset("ucie-a-25", Advanced25d, 32.0, 25.0, 1317.0, 1350.0, 0.3, None, false),
        preset("ucie-a-low", Advanced25d, 4.0, 45.0, 165.0, 188.0, 0.25, None, false),
    ]
}

/// Look up a named link preset.
pub fn preset_link(name: &str) -> Result<LinkVariant, ModelError> {
    link_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| ModelError::UnknownPreset(name.to_string()))
}

pub fn preset_names() -> Vec<String> {
    link_presets().into_iter().map(|p| p.name).collect()
}

/// Signal direction on the die-to-die link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    SocToMem,
    MemToSoc,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::SocToMem => "S2M",
            Direction::MemToSoc => "M2S",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneRole {
    Data,
    WriteMask,
    Command,
    Crc,
    /// Forwarded clock, track, and valid lanes. These carry no payload
    /// and are excluded from the power accounting.
    ClockTrackValid,
}

impl LaneRole {
    pub fn countable(&self) -> bool {
        !matches!(self, LaneRole::ClockTrackValid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneGroup {
    pub name: &'static str,
    pub direction: Direction,
    pub lanes: u32,
    pub role: LaneRole,
}

/// Header capacities and usable-slot fraction of a symmetric flit
/// layout, as used by the analytic slot accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotGeometry {
    /// Slot positions usable for traffic out of 16 per 256-byte flit.
    pub usable_slots_per_flit: u32,
    pub requests_per_slot: u32,
    pub responses_per_slot: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproachId {
    Lpddr6Asym,
    HbmAsym,
    ChiSym,
    CxlUnopt,
    CxlOpt,
    BaselineLpddr6,
    BaselineHbm4,
}

impl ApproachId {
    pub const ALL: [ApproachId; 7] = [
        ApproachId::Lpddr6Asym,
        ApproachId::HbmAsym,
        ApproachId::ChiSym,
        ApproachId::CxlUnopt,
        ApproachId::CxlOpt,
        ApproachId::BaselineLpddr6,
        ApproachId::BaselineHbm4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ApproachId::Lpddr6Asym => "lpddr6-asym",
            ApproachId::HbmAsym => "hbm-asym",
            ApproachId::ChiSym => "chi-sym",
            ApproachId::CxlUnopt => "cxl-unopt",
            ApproachId::CxlOpt => "cxl-opt",
            ApproachId::BaselineLpddr6 => "baseline-lpddr6",
            ApproachId::BaselineHbm4 => "baseline-hbm4",
        }
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, ApproachId::BaselineLpddr6 | ApproachId::BaselineHbm4)
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            ApproachId::ChiSym | ApproachId::CxlUnopt | ApproachId::CxlOpt
        )
    }

    pub fn is_asymmetric(&self) -> bool {
        matches!(self, ApproachId::Lpddr6Asym | ApproachId::HbmAsym)
    }
}

impl fmt::Display for ApproachId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ApproachId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        ApproachId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| ModelError::UnknownApproach {
                got: s.to_string(),
                candidates: ApproachId::ALL
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

/// One of the modeled attach approaches with its lane topology
/// (asymmetric approaches) or slot geometry (symmetric approaches).
#[derive(Debug, Clone, PartialEq)]
pub struct ApproachSpec {
    pub id: ApproachId,
    pub lane_groups: Vec<LaneGroup>,
    pub slot_geometry: Option<SlotGeometry>,
    /// Read:write bandwidth ratio the lane split is designed for.
    pub read_write_lane_ratio: (u32, u32),
}

impl ApproachSpec {
    /// Build an asymmetric spec, rejecting topologies whose countable
    /// lanes do not sum to the expected module size.
    pub fn asymmetric(
        id: ApproachId,
        lane_groups: Vec<LaneGroup>,
        expected_countable: u32,
        ratio: (u32, u32),
    ) -> Result<Self, ModelError> {
        let got: u32 = lane_groups
            .iter()
            .filter(|g| g.role.countable())
            .map(|g| g.lanes)
            .sum();
        if got != expected_countable {
            return Err(ModelError::BadTopology {
                approach: id.as_str(),
                got,
                expected: expected_countable,
            });
        }
        Ok(Self {
            id,
            lane_groups,
            slot_geometry: None,
            read_write_lane_ratio: ratio,
        })
    }

    pub fn for_id(id: ApproachId) -> Self {
        use Direction::*;
        use LaneRole::*;
        let group = |name, direction, lanes, role| LaneGroup {
            name,
            direction,
            lanes,
            role,
        };
        match id {
            ApproachId::Lpddr6Asym => ApproachSpec::asymmetric(
                id,
                vec![
                    group("s2m-data", SocToMem, 24, Data),
                    group("s2m-wmask", SocToMem, 2, WriteMask),
                    group("s2m-cmd", SocToMem, 10, Command),
                    group("s2m-crc", SocToMem, 1, Crc),
                    group("s2m-ctv", SocToMem, 4, ClockTrackValid),
                    group("m2s-data", MemToSoc, 36, Data),
                    group("m2s-crc", MemToSoc, 1, Crc),
                    group("m2s-ctv", MemToSoc, 4, ClockTrackValid),
                ],
                74,
                (3, 2),
            )
            .expect("builtin lpddr6-asym topology"),
            ApproachId::HbmAsym => ApproachSpec::asymmetric(
                id,
                vec![
                    group("s2m-data", SocToMem, 36, Data),
                    group("s2m-wmask", SocToMem, 4, WriteMask),
                    group("s2m-cmd", SocToMem, 24, Command),
                    group("s2m-crc", SocToMem, 1, Crc),
                    group("s2m-ctv", SocToMem, 4, ClockTrackValid),
                    group("m2s-data", MemToSoc, 72, Data),
                    group("m2s-crc", MemToSoc, 1, Crc),
                    group("m2s-ctv", MemToSoc, 4, ClockTrackValid),
                ],
                138,
                (2, 1),
            )
            .expect("builtin hbm-asym topology"),
            ApproachId::ChiSym => ApproachSpec {
                id,
                lane_groups: Vec::new(),
                slot_geometry: Some(SlotGeometry {
                    usable_slots_per_flit: 12,
                    requests_per_slot: 1,
                    responses_per_slot: 2,
                }),
                read_write_lane_ratio: (1, 1),
            },
            ApproachId::CxlUnopt => ApproachSpec {
                id,
                lane_groups: Vec::new(),
                slot_geometry: Some(SlotGeometry {
                    usable_slots_per_flit: 15,
                    requests_per_slot: 1,
                    responses_per_slot: 2,
                }),
                read_write_lane_ratio: (1, 1),
            },
            ApproachId::CxlOpt => ApproachSpec {
                id,
                lane_groups: Vec::new(),
                slot_geometry: Some(SlotGeometry {
                    usable_slots_per_flit: 16,
                    requests_per_slot: 1,
                    responses_per_slot: 4,
                }),
                read_write_lane_ratio: (1, 1),
            },
            ApproachId::BaselineLpddr6 | ApproachId::BaselineHbm4 => ApproachSpec {
                id,
                lane_groups: Vec::new(),
                slot_geometry: None,
                read_write_lane_ratio: (1, 1),
            },
        }
    }

    /// Countable lanes (data, write-mask, command, crc) in one direction.
    pub fn countable_lanes(&self, direction: Direction) -> u32 {
        self.lane_groups
            .iter()
            .filter(|g| g.direction == direction && g.role.countable())
            .map(|g| g.lanes)
            .sum()
    }

    /// Total countable lanes over both directions.
    pub fn countable_total(&self) -> u32 {
        self.countable_lanes(Direction::SocToMem) + self.countable_lanes(Direction::MemToSoc)
    }
}

/// Per-lane-group active/idle UI split of an asymmetric evaluation, in
/// lane-UI units, over one `t_xRyW` window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymBreakdown {
    pub t_ui: f64,
    pub p_s2m_dq_wmask: f64,
    pub p_s2m_cmd: f64,
    pub p_s2m_crc: f64,
    pub p_m2s_data_crc: f64,
}

impl AsymBreakdown {
    pub fn total(&self) -> f64 {
        self.p_s2m_dq_wmask + self.p_s2m_cmd + self.p_s2m_crc + self.p_m2s_data_crc
    }
}

/// Fractional slot counts of a symmetric evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotBreakdown {
    pub s2m: f64,
    pub m2s: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakdown {
    Baseline,
    Asym(AsymBreakdown),
    Slots(SlotBreakdown),
}

/// Bandwidth efficiency, densities, data-power ratio, and effective
/// power efficiency for one (approach, mix, link) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsResult {
    pub bw_eff: f64,
    pub bw_density_linear: f64,
    pub bw_density_areal: f64,
    pub p_data: f64,
    pub power_eff_pj_b: f64,
    pub breakdown: Breakdown,
}

/// Fixed density/power constants of a bidirectional-bus baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConstants {
    pub shoreline_gbps_mm: f64,
    pub areal_gbps_mm2: f64,
    pub power_pj_b: f64,
    pub footprint: Footprint,
}

/// LPDDR5 at 9.6 GT/s: the derivation anchor the LPDDR6 numbers are
/// frequency-scaled from.
pub const BASELINE_LPDDR5: BaselineConstants = BaselineConstants {
    shoreline_gbps_mm: 26.5,
    areal_gbps_mm2: 15.1,
    power_pj_b: 2.8,
    footprint: Footprint {
        edge_mm: 5.8,
        depth_mm: 1.75,
        aggregate_gbps: 153.6,
    },
};

pub const BASELINE_LPDDR6: BaselineConstants = BaselineConstants {
    shoreline_gbps_mm: 35.3,
    areal_gbps_mm2: 20.2,
    power_pj_b: 2.8,
    footprint: Footprint {
        edge_mm: 5.8,
        depth_mm: 1.75,
        aggregate_gbps: 204.8,
    },
};

pub const BASELINE_HBM4: BaselineConstants = BaselineConstants {
    shoreline_gbps_mm: 204.8,
    areal_gbps_mm2: 81.9,
    power_pj_b: 0.9,
    footprint: Footprint {
        edge_mm: 8.0,
        depth_mm: 2.5,
        aggregate_gbps: 1638.4,
    },
};

pub fn baseline_constants(id: ApproachId) -> Option<BaselineConstants> {
    match id {
        ApproachId::BaselineLpddr6 => Some(BASELINE_LPDDR6),
        ApproachId::BaselineHbm4 => Some(BASELINE_HBM4),
        _ => None,
    }
}

/// Metrics for the bidirectional-bus baselines. These are modeled as
/// always delivering peak data bandwidth, so the result is constant
/// over every traffic mix.
pub fn baseline_metrics(which: ApproachId, _mix: TrafficMix) -> Result<MetricsResult, ModelError> {
    let c = baseline_constants(which).ok_or_else(|| ModelError::UnknownApproach {
        got: which.as_str().to_string(),
        candidates: "baseline-lpddr6, baseline-hbm4".to_string(),
    })?;
    Ok(MetricsResult {
        bw_eff: 1.0,
        bw_density_linear: c.shoreline_gbps_mm,
        bw_density_areal: c.areal_gbps_mm2,
        p_data: 1.0,
        power_eff_pj_b: c.power_pj_b,
        breakdown: Breakdown::Baseline,
    })
}

/// Latency pipeline constants in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyModel {
    pub phy_roundtrip_ns: f64,
    pub adapter_roundtrip_ns: f64,
    pub protocol_roundtrip_ns: f64,
    pub baseline_lpddr_ns: f64,
    pub baseline_hbm_ns: f64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        Self {
            phy_roundtrip_ns: 1.0,
            adapter_roundtrip_ns: 2.0,
            protocol_roundtrip_ns: 3.0,
            baseline_lpddr_ns: 7.5,
            baseline_hbm_ns: 6.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Preset registry serialization (config-file format)
// ---------------------------------------------------------------------------

/// Serialize a preset list in the tool's flat `[section]` + `key = value`
/// config format.
pub fn write_preset_registry(presets: &[LinkVariant]) -> String {
    let mut out = String::new();
    for p in presets {
        out.push_str(&format!("[preset {}]\n", p.name));
        out.push_str(&format!("kind = {}\n", p.kind.as_str()));
        out.push_str(&format!("data_rate_gtps = {}\n", p.data_rate_gtps));
        out.push_str(&format!("bump_pitch_um = {}\n", p.bump_pitch_um));
        out.push_str(&format!("shoreline_gbps_mm = {}\n", p.shoreline_gbps_mm));
        out.push_str(&format!("areal_gbps_mm2 = {}\n", p.areal_gbps_mm2));
        out.push_str(&format!("peak_pj_per_bit = {}\n", p.peak_pj_per_bit));
        out.push_str(&format!("idle_fraction = {}\n", p.idle_fraction));
        if let Some(fp) = p.footprint {
            out.push_str(&format!("footprint_edge_mm = {}\n", fp.edge_mm));
            out.push_str(&format!("footprint_depth_mm = {}\n", fp.depth_mm));
            out.push_str(&format!("aggregate_gbps = {}\n", fp.aggregate_gbps));
        }
        out.push_str(&format!("interpolated = {}\n\n", p.interpolated));
    }
    out
}

/// Parse a registry previously produced by [`write_preset_registry`].
pub fn parse_preset_registry(text: &str) -> Result<Vec<LinkVariant>, ModelError> {
    let mut presets: Vec<LinkVariant> = Vec::new();
    let mut current: Option<LinkVariant> = None;
    let mut fp_edge = None;
    let mut fp_depth = None;
    let mut fp_agg = None;

    let finish = |mut p: LinkVariant,
                  edge: Option<f64>,
                  depth: Option<f64>,
                  agg: Option<f64>|
     -> LinkVariant {
        if let (Some(e), Some(d), Some(a)) = (edge, depth, agg) {
            p.footprint = Some(Footprint {
                edge_mm: e,
                depth_mm: d,
                aggregate_gbps: a,
            });
        }
        p
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| ModelError::BadRegistry {
            line: idx + 1,
            reason: reason.to_string(),
        };
        if let Some(section) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some(p) = current.take() {
                presets.push(finish(p, fp_edge, fp_depth, fp_agg));
            }
            fp_edge = None;
            fp_depth = None;
            fp_agg = None;
            let name = section
                .strip_prefix("preset ")
                .ok_or_else(|| err("expected `[preset <name>]`"))?;
            current = Some(LinkVariant {
                name: name.to_string(),
                kind: LinkKind::Standard2d,
                data_rate_gtps: 0.0,
                bump_pitch_um: 0.0,
                shoreline_gbps_mm: 0.0,
                areal_gbps_mm2: 0.0,
                peak_pj_per_bit: 0.0,
                idle_fraction: IDLE_FRACTION,
                footprint: None,
                interpolated: false,
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let p = current.as_mut().ok_or_else(|| err("key outside a section"))?;
        let parse_f = |v: &str| v.parse::<f64>().map_err(|_| err("expected a number"));
        match key {
            "kind" => p.kind = LinkKind::parse(value).ok_or_else(|| err("unknown kind"))?,
            "data_rate_gtps" => p.data_rate_gtps = parse_f(value)?,
            "bump_pitch_um" => p.bump_pitch_um = parse_f(value)?,
            "shoreline_gbps_mm" => p.shoreline_gbps_mm = parse_f(value)?,
            "areal_gbps_mm2" => p.areal_gbps_mm2 = parse_f(value)?,
            "peak_pj_per_bit" => p.peak_pj_per_bit = parse_f(value)?,
            "idle_fraction" => p.idle_fraction = parse_f(value)?,
            "footprint_edge_mm" => fp_edge = Some(parse_f(value)?),
            "footprint_depth_mm" => fp_depth = Some(parse_f(value)?),
            "aggregate_gbps" => fp_agg = Some(parse_f(value)?),
            "interpolated" => {
                p.interpolated = value.parse::<bool>().map_err(|_| err("expected a bool"))?
            }
            _ => return Err(err(&format!("unknown key `{key}`"))),
        }
    }
    if let Some(p) = current.take() {
        presets.push(finish(p, fp_edge, fp_depth, fp_agg));
    }
    Ok(presets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_rejects_zero_zero() {
        assert_eq!(TrafficMix::new(0, 0), Err(ModelError::EmptyMix));
        assert!(TrafficMix::new(1, 0).is_ok());
        assert!(TrafficMix::new(0, 1).is_ok());
    }

    #[test]
    fn mix_parse_and_display() {
        let m: TrafficMix = "3R2W".parse().unwrap();
        assert_eq!((m.reads(), m.writes()), (3, 2));
        assert_eq!(m.to_string(), "3R2W");
        assert_eq!(m.data_bits(), 512 * 5);
        assert!("0R0W".parse::<TrafficMix>().is_err());
        assert!("3x2W".parse::<TrafficMix>().is_err());
        assert!("1r1w".parse::<TrafficMix>().is_ok());
    }

    #[test]
    fn preset_paper_constants() {
        let a55 = preset_link("ucie-a-55").unwrap();
        assert_eq!(a55.shoreline_gbps_mm, 658.44);
        assert_eq!(a55.areal_gbps_mm2, 416.27);
        assert_eq!(a55.peak_pj_per_bit, 0.3);
        assert_eq!(a55.idle_fraction, 0.15);

        let s110 = preset_link("ucie-s-110").unwrap();
        assert_eq!(s110.shoreline_gbps_mm, 224.0);
        assert_eq!(s110.areal_gbps_mm2, 145.44);

        let a25 = preset_link("ucie-a-25").unwrap();
        assert_eq!(a25.shoreline_gbps_mm, 1317.0);
        assert_eq!(a25.areal_gbps_mm2, 1350.0);

        assert!(matches!(
            preset_link("ucie-z-1"),
            Err(ModelError::UnknownPreset(_))
        ));
    }

    #[test]
    fn footprints_reproduce_aggregate_bandwidth() {
        for p in link_presets() {
            if let Some(fp) = p.footprint {
                let recon = p.areal_gbps_mm2 * fp.edge_mm * fp.depth_mm;
                let rel = (recon - fp.aggregate_gbps).abs() / fp.aggregate_gbps;
                assert!(rel < 0.01, "{}: {} vs {}", p.name, recon, fp.aggregate_gbps);
            }
        }
        // Baselines too.
        for c in [BASELINE_LPDDR5, BASELINE_LPDDR6, BASELINE_HBM4] {
            let fp = c.footprint;
            let recon = c.areal_gbps_mm2 * fp.edge_mm * fp.depth_mm;
            let rel = (recon - fp.aggregate_gbps).abs() / fp.aggregate_gbps;
            assert!(rel < 0.01);
        }
    }

    #[test]
    fn lane_totals() {
        let lp = ApproachSpec::for_id(ApproachId::Lpddr6Asym);
        assert_eq!(lp.countable_total(), 74);
        assert_eq!(lp.countable_lanes(Direction::SocToMem), 37);
        assert_eq!(lp.countable_lanes(Direction::MemToSoc), 37);

        let hbm = ApproachSpec::for_id(ApproachId::HbmAsym);
        assert_eq!(hbm.countable_total(), 138);
        assert_eq!(hbm.countable_lanes(Direction::SocToMem), 65);
        assert_eq!(hbm.countable_lanes(Direction::MemToSoc), 73);
    }

    #[test]
    fn bad_topology_rejected() {
        let r = ApproachSpec::asymmetric(
            ApproachId::Lpddr6Asym,
            vec![LaneGroup {
                name: "s2m-data",
                direction: Direction::SocToMem,
                lanes: 24,
                role: LaneRole::Data,
            }],
            74,
            (3, 2),
        );
        assert!(matches!(r, Err(ModelError::BadTopology { got: 24, .. })));
    }

    #[test]
    fn baseline_is_mix_independent() {
        let reference = baseline_metrics(ApproachId::BaselineHbm4, TrafficMix::new(1, 1).unwrap())
            .unwrap();
        assert_eq!(reference.bw_density_linear, 204.8);
        assert_eq!(reference.bw_density_areal, 81.9);
        assert_eq!(reference.power_eff_pj_b, 0.9);
        // Deterministic pseudo-random mixes; 20+ of them per the contract.
        let mut state = 0x9e3779b9u32;
        for _ in 0..25 {
            state = state.wrapping_mul(1664525).wrapping_add(1013904223);
            let x = state % 13;
            let y = (state >> 8) % 13;
            let Ok(mix) = TrafficMix::new(x, y) else { continue };
            let m = baseline_metrics(ApproachId::BaselineHbm4, mix).unwrap();
            assert_eq!(m, reference);
        }
        let lp = baseline_metrics(ApproachId::BaselineLpddr6, TrafficMix::new(0, 1).unwrap())
            .unwrap();
        assert_eq!(
            lp,
            baseline_metrics(ApproachId::BaselineLpddr6, TrafficMix::new(1, 0).unwrap()).unwrap()
        );
        assert_eq!(lp.bw_density_linear, 35.3);
        assert_eq!(lp.bw_density_areal, 20.2);
        assert_eq!(lp.power_eff_pj_b, 2.8);
    }

    #[test]
    fn approach_parse_lists_candidates() {
        let err = "cxl-fast".parse::<ApproachId>().unwrap_err();
        match err {
            ModelError::UnknownApproach { candidates, .. } => {
                assert!(candidates.contains("cxl-opt"));
                assert!(candidates.contains("lpddr6-asym"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn registry_round_trip() {
        let presets = link_presets();
        let text = write_preset_registry(&presets);
        let parsed = parse_preset_registry(&text).unwrap();
        assert_eq!(parsed, presets);
    }
}
