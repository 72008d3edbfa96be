//! Byte-exact 256-byte flit geometry for the three layouts.
//!
//! * Unoptimized CXL.Mem: 2B flit HDR, 14B H-slot, fourteen 16B
//!   G-slots, 10B reserved, 2B credit, CRC0 over bytes 0-127, CRC1
//!   over bytes 128-251.
//! * Optimized CXL.Mem: fifteen 16B G-slots (bytes 0-239), 10B HS-slot,
//!   2B HDR, 2B credit, one CRC over bytes 0-253.
//! * CHI Format-X: twelve 20B granules threaded between three link
//!   header pairs and five protocol header pairs; the trailing link
//!   header pair carries the CRC over bytes 0-253.

use std::ops::Range;

use super::headers::Layout;

pub const FLIT_BYTES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteRole {
    FlitHdr,
    HSlot,
    GSlot,
    HsSlot,
    Granule,
    ProtHdr,
    Reserved,
    Credit,
    Crc,
}

/// Whether a slot may carry data or only headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    HeaderOnly,
    General,
}

#[derive(Debug, Clone)]
pub struct SlotRef {
    pub range: Range<usize>,
    pub kind: SlotKind,
}

/// A CRC field and the byte region it protects.
#[derive(Debug, Clone)]
pub struct CrcRegion {
    pub name: &'static str,
    pub field: Range<usize>,
    pub covers: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct FlitGeometry {
    /// Slots in logical fill order (header-capable slot first).
    pub slots: Vec<SlotRef>,
    pub hdr: Range<usize>,
    pub credit: Range<usize>,
    pub crc_regions: Vec<CrcRegion>,
}

/// Start offsets of the twelve contiguous 20-byte CHI granules.
pub const CHI_GRANULE_OFFSETS: [usize; 12] =
    [2, 22, 42, 66, 86, 106, 130, 150, 170, 194, 214, 234];

#[cfg_attr(not(test), allow(dead_code))] // pinned by the geometry tests
const CHI_LINK_HDR: [usize; 6] = [0, 1, 126, 127, 254, 255];
const CHI_PROT_HDR: [usize; 10] = [62, 63, 64, 65, 128, 129, 190, 191, 192, 193];

pub fn geometry(layout: Layout) -> FlitGeometry {
    match layout {
        Layout::CxlUnopt => {
            let mut slots = vec![SlotRef {
                range: 2..16,
                kind: SlotKind::HeaderOnly,
            }];
            for i in 0..14 {
                let start = 16 + 16 * i;
                slots.push(SlotRef {
                    range: start..start + 16,
                    kind: SlotKind::General,
                });
            }
            FlitGeometry {
                slots,
                hdr: 0..2,
                credit: 250..252,
                crc_regions: vec![
                    CrcRegion {
                        name: "CRC0",
                        field: 252..254,
                        covers: 0..128,
                    },
                    CrcRegion {
                        name: "CRC1",
                        field: 254..256,
                        covers: 128..252,
                    },
                ],
            }
        }
        Layout::CxlOpt => {
            let mut slots = vec![SlotRef {
                range: 240..250,
                kind: SlotKind::HeaderOnly,
            }];
            for i in 0..15 {
                let start = 16 * i;
                slots.push(SlotRef {
                    range: start..start + 16,
                    kind: SlotKind::General,
                });
            }
            FlitGeometry {
                slots,
                hdr: 250..252,
                credit: 252..254,
                crc_regions: vec![CrcRegion {
                    name: "CRC",
                    field: 254..256,
                    covers: 0..254,
                }],
            }
        }
        Layout::Chi => {
            let slots = CHI_GRANULE_OFFSETS
                .iter()
                .map(|&start| SlotRef {
                    range: start..start + 20,
                    kind: SlotKind::General,
                })
                .collect();
            FlitGeometry {
                slots,
                hdr: 0..2,
                credit: 126..128,
                crc_regions: vec![CrcRegion {
                    name: "CRC",
                    field: 254..256,
                    covers: 0..254,
                }],
            }
        }
    }
}

/// Role of every byte 0..255 in the given layout.
pub fn byte_roles(layout: Layout) -> [ByteRole; FLIT_BYTES] {
    match layout {
        Layout::CxlUnopt => {
            let mut roles = [ByteRole::GSlot; FLIT_BYTES];
            roles[0..2].fill(ByteRole::FlitHdr);
            roles[2..16].fill(ByteRole::HSlot);
            roles[240..250].fill(ByteRole::Reserved);
            roles[250..252].fill(ByteRole::Credit);
            roles[252..256].fill(ByteRole::Crc);
            roles
        }
        Layout::CxlOpt => {
            let mut roles = [ByteRole::GSlot; FLIT_BYTES];
            roles[240..250].fill(ByteRole::HsSlot);
            roles[250..252].fill(ByteRole::FlitHdr);
            roles[252..254].fill(ByteRole::Credit);
            roles[254..256].fill(ByteRole::Crc);
            roles
        }
        Layout::Chi => {
            let mut roles = [ByteRole::Granule; FLIT_BYTES];
            roles[0..2].fill(ByteRole::FlitHdr);
            roles[126..128].fill(ByteRole::Credit);
            roles[254..256].fill(ByteRole::Crc);
            for b in CHI_PROT_HDR {
                roles[b] = ByteRole::ProtHdr;
            }
            roles
        }
    }
}
