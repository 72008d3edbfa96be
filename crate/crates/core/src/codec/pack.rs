//! Transaction-stream to flit-stream packing and the inverse.
//!
//! The fill policy is deterministic so the decoder can replay it from
//! stream state alone: the header-capable slot (H/HS) takes pending
//! headers first; every other slot carries a 16-byte data chunk while
//! announced cache-line data is outstanding, otherwise more headers,
//! otherwise NOP. Announcing a write request (S2M) or a data response
//! (M2S) queues its four data chunks behind whatever is already owed.

use std::collections::VecDeque;

use crate::model::Direction;

use super::crc::crc16;
use super::headers::{
    decode_request, decode_response, encode_request, encode_response, request_entry_bytes,
    response_entry_bytes, CodecError, Layout, RequestHeader, ResponseHeader, REQ_CMD_READ,
    REQ_CMD_WRITE, RESP_CMD_CMPL, RESP_CMD_DATA,
};
use super::layout::{geometry, FlitGeometry, SlotKind, FLIT_BYTES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolId {
    Nop,
    CxlMem,
    Other,
}

impl ProtocolId {
    fn to_bits(self) -> u16 {
        match self {
            ProtocolId::Nop => 0,
            ProtocolId::CxlMem => 1,
            ProtocolId::Other => 2,
        }
    }

    fn from_bits(v: u16) -> Self {
        match v & 0x3 {
            1 => ProtocolId::CxlMem,
            2 | 3 => ProtocolId::Other,
            _ => ProtocolId::Nop,
        }
    }
}

/// Link-level flit header: protocol identifier, sequence number, and
/// ack/nak flags. In the optimized layout the protocol identifier
/// names the protocol of the *next* flit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlitHeader {
    pub protocol: ProtocolId,
    pub seq: u8,
    pub ack: bool,
    pub nak: bool,
}

impl FlitHeader {
    pub fn encode(&self) -> [u8; 2] {
        let v = self.protocol.to_bits()
            | (self.ack as u16) << 2
            | (self.nak as u16) << 3
            | (self.seq as u16) << 4;
        v.to_le_bytes()
    }

    pub fn decode(bytes: [u8; 2]) -> Self {
        let v = u16::from_le_bytes(bytes);
        FlitHeader {
            protocol: ProtocolId::from_bits(v),
            ack: v & 0x4 != 0,
            nak: v & 0x8 != 0,
            seq: (v >> 4) as u8,
        }
    }
}

/// One item of the transaction stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxnItem {
    ReadReq(RequestHeader),
    WriteReq(RequestHeader, [u8; 64]),
    DataResp(ResponseHeader, [u8; 64]),
    Cmpl(ResponseHeader),
}

impl TxnItem {
    pub fn direction(&self) -> Direction {
        match self {
            TxnItem::ReadReq(_) | TxnItem::WriteReq(..) => Direction::SocToMem,
            TxnItem::DataResp(..) | TxnItem::Cmpl(_) => Direction::MemToSoc,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            TxnItem::ReadReq(_) => "read",
            TxnItem::WriteReq(..) => "write",
            TxnItem::DataResp(..) => "data",
            TxnItem::Cmpl(_) => "cmpl",
        }
    }

    pub fn payload(&self) -> Option<&[u8; 64]> {
        match self {
            TxnItem::WriteReq(_, d) | TxnItem::DataResp(_, d) => Some(d),
            _ => None,
        }
    }
}

/// A 256-byte flit with its layout tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flit {
    pub layout: Layout,
    pub bytes: [u8; FLIT_BYTES],
}

impl Flit {
    pub fn hdr(&self) -> FlitHeader {
        let g = geometry(self.layout);
        FlitHeader::decode([self.bytes[g.hdr.start], self.bytes[g.hdr.start + 1]])
    }

    pub fn set_hdr(&mut self, hdr: FlitHeader) {
        let g = geometry(self.layout);
        let enc = hdr.encode();
        self.bytes[g.hdr.start] = enc[0];
        self.bytes[g.hdr.start + 1] = enc[1];
        self.seal();
    }

    pub fn credit(&self) -> u16 {
        let g = geometry(self.layout);
        u16::from_le_bytes([self.bytes[g.credit.start], self.bytes[g.credit.start + 1]])
    }

    /// Recompute and store all CRC fields.
    pub fn seal(&mut self) {
        let g = geometry(self.layout);
        for region in &g.crc_regions {
            let crc = crc16(&self.bytes[region.covers.clone()]).to_le_bytes();
            self.bytes[region.field.start] = crc[0];
            self.bytes[region.field.start + 1] = crc[1];
        }
    }

    /// Verify all CRC regions, naming the first failing one.
    pub fn check_crc(&self) -> Result<(), CodecError> {
        let g = geometry(self.layout);
        for region in &g.crc_regions {
            let expect = crc16(&self.bytes[region.covers.clone()]);
            let stored = u16::from_le_bytes([
                self.bytes[region.field.start],
                self.bytes[region.field.start + 1],
            ]);
            if expect != stored {
                return Err(CodecError::CrcMismatch {
                    region: region.name,
                });
            }
        }
        Ok(())
    }

    /// One flit as 512 hex characters.
    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(layout: Layout, line: &str) -> Result<Self, CodecError> {
        let line = line.trim();
        if line.len() != 2 * FLIT_BYTES {
            return Err(CodecError::HexParse {
                offset: line.len().min(2 * FLIT_BYTES),
                reason: format!("expected {} hex chars, got {}", 2 * FLIT_BYTES, line.len()),
            });
        }
        let mut bytes = [0u8; FLIT_BYTES];
        for (i, chunk) in line.as_bytes().chunks(2).enumerate() {
            let s = std::str::from_utf8(chunk).map_err(|_| CodecError::HexParse {
                offset: 2 * i,
                reason: "non-ascii".into(),
            })?;
            bytes[i] = u8::from_str_radix(s, 16).map_err(|_| CodecError::HexParse {
                offset: 2 * i,
                reason: format!("invalid hex pair `{s}`"),
            })?;
        }
        Ok(Flit { layout, bytes })
    }
}

fn header_capacity(
    layout: Layout,
    direction: Direction,
    kind: SlotKind,
    two_requests_per_gslot: bool,
) -> usize {
    match (layout, direction) {
        (Layout::CxlUnopt | Layout::Chi, Direction::SocToMem) => 1,
        (Layout::CxlUnopt | Layout::Chi, Direction::MemToSoc) => 2,
        (Layout::CxlOpt, Direction::SocToMem) => match kind {
            SlotKind::HeaderOnly => 1,
            SlotKind::General if two_requests_per_gslot => 2,
            SlotKind::General => 1,
        },
        (Layout::CxlOpt, Direction::MemToSoc) => 4,
    }
}

fn entry_bytes(layout: Layout, direction: Direction) -> usize {
    match direction {
        Direction::SocToMem => request_entry_bytes(layout),
        Direction::MemToSoc => response_entry_bytes(layout),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlannedSlot {
    Data,
    Headers(usize),
    Nop,
}

/// Streaming packer for one link direction.
#[derive(Debug)]
pub struct FlitPacker {
    layout: Layout,
    direction: Direction,
    /// Optional optimized-layout extension: two requests per G-slot.
    /// Off by default so the defaults reproduce the analytic model.
    pub two_requests_per_gslot: bool,
    geo: FlitGeometry,
    pending: VecDeque<TxnItem>,
    owed: VecDeque<[u8; 16]>,
    next_seq: u8,
    flits_emitted: u64,
}

impl FlitPacker {
    pub fn new(layout: Layout, direction: Direction) -> Self {
        Self {
            layout,
            direction,
            two_requests_per_gslot: false,
            geo: geometry(layout),
            pending: VecDeque::new(),
            owed: VecDeque::new(),
            next_seq: 0,
            flits_emitted: 0,
        }
    }

    pub fn push(&mut self, item: TxnItem) -> Result<(), CodecError> {
        if item.direction() != self.direction {
            return Err(CodecError::WrongDirection {
                kind: item.kind_str(),
                direction: self.direction.as_str(),
            });
        }
        // Validate field widths up front so emit cannot fail.
        match &item {
            TxnItem::ReadReq(h) | TxnItem::WriteReq(h, _) => {
                encode_request(h, self.layout)?;
            }
            TxnItem::DataResp(h, _) | TxnItem::Cmpl(h) => {
                encode_response(h, self.layout)?;
            }
        }
        self.pending.push_back(item);
        Ok(())
    }

    pub fn has_content(&self) -> bool {
        !self.pending.is_empty() || !self.owed.is_empty()
    }

    fn plan(&self) -> Vec<PlannedSlot> {
        let mut avail = self.owed.len();
        let mut pend = self.pending.iter();
        let mut plan = Vec::with_capacity(self.geo.slots.len());
        for slot in &self.geo.slots {
            if slot.kind == SlotKind::General && avail > 0 {
                avail -= 1;
                plan.push(PlannedSlot::Data);
                continue;
            }
            let cap = header_capacity(
                self.layout,
                self.direction,
                slot.kind,
                self.two_requests_per_gslot,
            );
            let mut placed = 0;
            while placed < cap {
                match pend.next() {
                    Some(item) => {
                        placed += 1;
                        if item.payload().is_some() {
                            avail += 4;
                        }
                    }
                    None => break,
                }
            }
            plan.push(if placed > 0 {
                PlannedSlot::Headers(placed)
            } else {
                PlannedSlot::Nop
            });
        }
        plan
    }

    /// True when the next flit would use every slot at full capacity.
    /// A header slot holding fewer headers than it can carry counts as
    /// not full: waiting for the next headers costs nothing and keeps
    /// the emitted stream at the layout's nominal slot accounting.
    pub fn flit_ready(&self) -> bool {
        if !self.has_content() {
            return false;
        }
        self.geo
            .slots
            .iter()
            .zip(self.plan())
            .all(|(slot, planned)| match planned {
                PlannedSlot::Data => true,
                PlannedSlot::Nop => false,
                PlannedSlot::Headers(n) => {
                    n == header_capacity(
                        self.layout,
                        self.direction,
                        slot.kind,
                        self.two_requests_per_gslot,
                    )
                }
            })
    }

    /// Emit one flit, possibly partially filled.
    pub fn emit_flit(&mut self) -> Flit {
        let plan = self.plan();
        let mut flit = Flit {
            layout: self.layout,
            bytes: [0u8; FLIT_BYTES],
        };
        for (slot, planned) in self.geo.slots.clone().iter().zip(plan) {
            match planned {
                PlannedSlot::Nop => {}
                PlannedSlot::Data => {
                    let chunk = self.owed.pop_front().expect("planned data chunk");
                    flit.bytes[slot.range.start..slot.range.start + 16].copy_from_slice(&chunk);
                }
                PlannedSlot::Headers(n) => {
                    let entry = entry_bytes(self.layout, self.direction);
                    let mut off = slot.range.start;
                    for _ in 0..n {
                        let item = self.pending.pop_front().expect("planned header");
                        let enc = match &item {
                            TxnItem::ReadReq(h) | TxnItem::WriteReq(h, _) => {
                                encode_request(h, self.layout).expect("validated at push")
                            }
                            TxnItem::DataResp(h, _) | TxnItem::Cmpl(h) => {
                                encode_response(h, self.layout).expect("validated at push")
                            }
                        };
                        flit.bytes[off..off + enc.len()].copy_from_slice(&enc);
                        off += entry;
                        if let Some(data) = item.payload() {
                            for q in 0..4 {
                                let mut chunk = [0u8; 16];
                                chunk.copy_from_slice(&data[16 * q..16 * (q + 1)]);
                                self.owed.push_back(chunk);
                            }
                        }
                    }
                }
            }
        }
        // Credit: running flit count, usable by the far transaction
        // layer for credit returns.
        self.flits_emitted += 1;
        let credit = (self.flits_emitted as u16).to_le_bytes();
        flit.bytes[self.geo.credit.start] = credit[0];
        flit.bytes[self.geo.credit.start + 1] = credit[1];
        let seq = self.next_seq;
        self.next_seq = self.next_seq.wrapping_add(1);
        flit.set_hdr(FlitHeader {
            protocol: ProtocolId::CxlMem,
            seq,
            ack: false,
            nak: false,
        });
        flit
    }

    /// Drain every complete flit, then the partial remainder.
    pub fn flush(&mut self) -> Vec<Flit> {
        let mut out = Vec::new();
        while self.has_content() {
            out.push(self.emit_flit());
        }
        out
    }

    /// Drain only flits that are completely full.
    pub fn take_full_flits(&mut self) -> Vec<Flit> {
        let mut out = Vec::new();
        while self.flit_ready() {
            out.push(self.emit_flit());
        }
        out
    }
}

/// Pack a whole transaction queue into flits.
pub fn pack_flits(
    items: &[TxnItem],
    layout: Layout,
    direction: Direction,
) -> Result<Vec<Flit>, CodecError> {
    let mut packer = FlitPacker::new(layout, direction);
    for item in items {
        packer.push(*item)?;
    }
    Ok(packer.flush())
}

#[derive(Debug)]
struct PartialTxn {
    item: TxnItem,
    filled: usize,
    needs: usize,
}

/// Streaming unpacker for one link direction.
///
/// The optimized layout identifies a flit's protocol in the previous
/// flit's header, so the decoder parks one identifier of lookahead
/// state. A fresh decoder parks CXL.Mem (the post-training steady
/// state); use [`FlitUnpacker::with_parked`] with [`ProtocolId::Nop`]
/// to model the state right after link (re)training, where the first
/// flit's contents are ignored.
#[derive(Debug)]
pub struct FlitUnpacker {
    layout: Layout,
    direction: Direction,
    pub two_requests_per_gslot: bool,
    geo: FlitGeometry,
    parked: ProtocolId,
    assembling: VecDeque<PartialTxn>,
}

impl FlitUnpacker {
    pub fn new(layout: Layout, direction: Direction) -> Self {
        Self::with_parked(layout, direction, ProtocolId::CxlMem)
    }

    pub fn with_parked(layout: Layout, direction: Direction, parked: ProtocolId) -> Self {
        Self {
            layout,
            direction,
            two_requests_per_gslot: false,
            geo: geometry(layout),
            parked,
            assembling: VecDeque::new(),
        }
    }

    fn owed(&self) -> usize {
        self.assembling.iter().map(|t| t.needs - t.filled).sum()
    }

    fn announce(&mut self, item: TxnItem) {
        let needs = if item.payload().is_some() { 4 } else { 0 };
        self.assembling.push_back(PartialTxn {
            item,
            filled: 0,
            needs,
        });
    }

    fn fill_chunk(&mut self, chunk: &[u8]) {
        let txn = self
            .assembling
            .iter_mut()
            .find(|t| t.filled < t.needs)
            .expect("data slot with nothing owed");
        let q = txn.filled;
        match &mut txn.item {
            TxnItem::WriteReq(_, d) | TxnItem::DataResp(_, d) => {
                d[16 * q..16 * (q + 1)].copy_from_slice(chunk);
            }
            _ => unreachable!("only data carriers owe chunks"),
        }
        txn.filled += 1;
    }

    /// Decode one flit and return the transactions completed by it, in
    /// announce order.
    pub fn push_flit(&mut self, flit: &Flit) -> Result<Vec<TxnItem>, CodecError> {
        flit.check_crc()?;
        if self.layout == Layout::CxlOpt {
            let active = self.parked;
            self.parked = flit.hdr().protocol;
            if active != ProtocolId::CxlMem {
                return Ok(Vec::new());
            }
        } else if flit.hdr().protocol != ProtocolId::CxlMem {
            return Ok(Vec::new());
        }

        for slot in self.geo.slots.clone() {
            if slot.kind == SlotKind::General && self.owed() > 0 {
                let chunk = &flit.bytes[slot.range.start..slot.range.start + 16];
                let chunk = chunk.to_vec();
                self.fill_chunk(&chunk);
                continue;
            }
            let cap = header_capacity(
                self.layout,
                self.direction,
                slot.kind,
                self.two_requests_per_gslot,
            );
            let entry = entry_bytes(self.layout, self.direction);
            let mut off = slot.range.start;
            for _ in 0..cap {
                if off + entry > slot.range.end {
                    break;
                }
                let bytes = &flit.bytes[off..off + entry];
                off += entry;
                match self.direction {
                    Direction::SocToMem => match decode_request(bytes, self.layout) {
                        None => break,
                        Some(h) if h.cmd == REQ_CMD_READ => self.announce(TxnItem::ReadReq(h)),
                        Some(h) if h.cmd == REQ_CMD_WRITE => {
                            self.announce(TxnItem::WriteReq(h, [0u8; 64]))
                        }
                        Some(h) => {
                            return Err(CodecError::UnknownEncoding {
                                what: "request cmd",
                                value: h.cmd as u64,
                            })
                        }
                    },
                    Direction::MemToSoc => match decode_response(bytes, self.layout) {
                        None => break,
                        Some(h) if h.cmd == RESP_CMD_DATA => {
                            self.announce(TxnItem::DataResp(h, [0u8; 64]))
                        }
                        Some(h) if h.cmd == RESP_CMD_CMPL => self.announce(TxnItem::Cmpl(h)),
                        Some(h) => {
                            return Err(CodecError::UnknownEncoding {
                                what: "response cmd",
                                value: h.cmd as u64,
                            })
                        }
                    },
                }
            }
        }

        let mut done = Vec::new();
        while self
            .assembling
            .front()
            .is_some_and(|t| t.filled == t.needs)
        {
            done.push(self.assembling.pop_front().unwrap().item);
        }
        Ok(done)
    }
}

/// Unpack a flit sequence back into its transaction queue.
pub fn unpack_flits(
    flits: &[Flit],
    layout: Layout,
    direction: Direction,
) -> Result<Vec<TxnItem>, CodecError> {
    let mut unpacker = FlitUnpacker::new(layout, direction);
    let mut out = Vec::new();
    for flit in flits {
        out.extend(unpacker.push_flit(flit)?);
    }
    Ok(out)
}
