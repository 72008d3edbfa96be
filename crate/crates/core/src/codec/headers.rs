//! Request/response header field encodings.
//!
//! Fields are packed in table order (cmd, meta_data, devload, tag,
//! address, poison), least-significant bit first within a field, with
//! little-endian byte filling. Entries inside a slot are byte-aligned.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("field `{field}` value {value} exceeds {bits}-bit width")]
    FieldOverflow {
        field: &'static str,
        value: u64,
        bits: u32,
    },
    #[error("cmd 0 is reserved for NOP; real headers need a nonzero cmd")]
    ReservedNopCmd,
    #[error("CRC mismatch in region {region}")]
    CrcMismatch { region: &'static str },
    #[error("malformed hex at offset {offset}: {reason}")]
    HexParse { offset: usize, reason: String },
    #[error("transaction kind {kind} does not travel in direction {direction}")]
    WrongDirection {
        kind: &'static str,
        direction: &'static str,
    },
    #[error("unknown {what} encoding {value}")]
    UnknownEncoding { what: &'static str, value: u64 },
}

/// Flit layout family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    CxlUnopt,
    CxlOpt,
    Chi,
}

impl Layout {
    pub fn as_str(&self) -> &'static str {
        match self {
            Layout::CxlUnopt => "cxl-unopt",
            Layout::CxlOpt => "cxl-opt",
            Layout::Chi => "chi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cxl-unopt" => Some(Layout::CxlUnopt),
            "cxl-opt" => Some(Layout::CxlOpt),
            "chi" | "chi-sym" => Some(Layout::Chi),
            _ => None,
        }
    }

    /// Header field widths: the optimized layout shortens the fields;
    /// the CHI container reuses the unoptimized encodings inside its
    /// granules.
    fn uses_opt_fields(&self) -> bool {
        matches!(self, Layout::CxlOpt)
    }
}

struct FieldWidths {
    cmd: u32,
    meta: u32,
    devload: u32,
    tag: u32,
    addr: u32,
}

fn request_widths(layout: Layout) -> FieldWidths {
    if layout.uses_opt_fields() {
        FieldWidths {
            cmd: 3,
            meta: 4,
            devload: 0,
            tag: 8,
            addr: 46,
        }
    } else {
        FieldWidths {
            cmd: 4,
            meta: 7,
            devload: 0,
            tag: 16,
            addr: 46,
        }
    }
}

fn response_widths(layout: Layout) -> FieldWidths {
    if layout.uses_opt_fields() {
        FieldWidths {
            cmd: 3,
            meta: 4,
            devload: 0,
            tag: 8,
            addr: 0,
        }
    } else {
        FieldWidths {
            cmd: 3,
            meta: 4,
            devload: 2,
            tag: 16,
            addr: 0,
        }
    }
}

/// SoC-to-memory request header (read or write).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RequestHeader {
    pub cmd: u8,
    pub meta_data: u8,
    /// Cache-line address field (46 bits).
    pub address: u64,
    pub tag: u16,
    pub poison: bool,
}

/// Memory-to-SoC response header (data return or write completion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResponseHeader {
    pub cmd: u8,
    pub meta_data: u8,
    pub devload: u8,
    pub tag: u16,
    pub poison: bool,
}

pub const REQ_CMD_READ: u8 = 1;
pub const REQ_CMD_WRITE: u8 = 2;
pub const RESP_CMD_DATA: u8 = 1;
pub const RESP_CMD_CMPL: u8 = 2;

/// Total encoded bits of a request header in the given layout
/// (74 unoptimized, 62 optimized).
pub fn request_bits(layout: Layout) -> u32 {
    let w = request_widths(layout);
    w.cmd + w.meta + w.devload + w.tag + w.addr + 1
}

/// Total encoded bits of a response header (26 unoptimized, 16
/// optimized).
pub fn response_bits(layout: Layout) -> u32 {
    let w = response_widths(layout);
    w.cmd + w.meta + w.devload + w.tag + w.addr + 1
}

/// Byte-aligned size of one header entry inside a slot.
pub fn request_entry_bytes(layout: Layout) -> usize {
    request_bits(layout).div_ceil(8) as usize
}

pub fn response_entry_bytes(layout: Layout) -> usize {
    response_bits(layout).div_ceil(8) as usize
}

struct BitCursor {
    bits: u128,
    pos: u32,
}

impl BitCursor {
    fn new() -> Self {
        Self { bits: 0, pos: 0 }
    }

    fn write(
        &mut self,
        field: &'static str,
        value: u64,
        width: u32,
    ) -> Result<(), CodecError> {
        if width == 0 {
            if value != 0 {
                return Err(CodecError::FieldOverflow {
                    field,
                    value,
                    bits: 0,
                });
            }
            return Ok(());
        }
        if width < 64 && value >= 1u64 << width {
            return Err(CodecError::FieldOverflow {
                field,
                value,
                bits: width,
            });
        }
        self.bits |= (value as u128) << self.pos;
        self.pos += width;
        Ok(())
    }

    fn read(bits: u128, pos: &mut u32, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        let mask = if width >= 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let v = ((bits >> *pos) as u64) & mask;
        *pos += width;
        v
    }
}

fn bits_to_bytes(bits: u128, n_bits: u32) -> Vec<u8> {
    let n = (n_bits as usize).div_ceil(8);
    (0..n).map(|i| (bits >> (8 * i)) as u8).collect()
}

fn bytes_to_bits(bytes: &[u8]) -> u128 {
    bytes
        .iter()
        .take(16)
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | (b as u128) << (8 * i))
}

/// Encode a request header into its bit-string, little-endian bytes.
pub fn encode_request(h: &RequestHeader, layout: Layout) -> Result<Vec<u8>, CodecError> {
    if h.cmd == 0 && !h.poison {
        return Err(CodecError::ReservedNopCmd);
    }
    let w = request_widths(layout);
    let mut c = BitCursor::new();
    c.write("cmd", h.cmd as u64, w.cmd)?;
    c.write("meta_data", h.meta_data as u64, w.meta)?;
    c.write("devload", 0, w.devload)?;
    c.write("tag", h.tag as u64, w.tag)?;
    c.write("address", h.address, w.addr)?;
    c.write("poison", h.poison as u64, 1)?;
    Ok(bits_to_bytes(c.bits, request_bits(layout)))
}

/// Decode a request header. Returns `None` for the NOP encoding
/// (cmd 0, poison 0).
pub fn decode_request(bytes: &[u8], layout: Layout) -> Option<RequestHeader> {
    let w = request_widths(layout);
    let bits = bytes_to_bits(bytes);
    let mut pos = 0;
    let cmd = BitCursor::read(bits, &mut pos, w.cmd) as u8;
    let meta = BitCursor::read(bits, &mut pos, w.meta) as u8;
    let _devload = BitCursor::read(bits, &mut pos, w.devload);
    let tag = BitCursor::read(bits, &mut pos, w.tag) as u16;
    let address = BitCursor::read(bits, &mut pos, w.addr);
    let poison = BitCursor::read(bits, &mut pos, 1) != 0;
    if cmd == 0 && !poison {
        return None;
    }
    Some(RequestHeader {
        cmd,
        meta_data: meta,
        address,
        tag,
        poison,
    })
}

pub fn encode_response(h: &ResponseHeader, layout: Layout) -> Result<Vec<u8>, CodecError> {
    if h.cmd == 0 && !h.poison {
        return Err(CodecError::ReservedNopCmd);
    }
    let w = response_widths(layout);
    let mut c = BitCursor::new();
    c.write("cmd", h.cmd as u64, w.cmd)?;
    c.write("meta_data", h.meta_data as u64, w.meta)?;
    c.write("devload", h.devload as u64, w.devload)?;
    c.write("tag", h.tag as u64, w.tag)?;
    c.write("poison", h.poison as u64, 1)?;
    Ok(bits_to_bytes(c.bits, response_bits(layout)))
}

pub fn decode_response(bytes: &[u8], layout: Layout) -> Option<ResponseHeader> {
    let w = response_widths(layout);
    let bits = bytes_to_bits(bytes);
    let mut pos = 0;
    let cmd = BitCursor::read(bits, &mut pos, w.cmd) as u8;
    let meta = BitCursor::read(bits, &mut pos, w.meta) as u8;
    let devload = BitCursor::read(bits, &mut pos, w.devload) as u8;
    let tag = BitCursor::read(bits, &mut pos, w.tag) as u16;
    let poison = BitCursor::read(bits, &mut pos, 1) != 0;
    if cmd == 0 && !poison {
        return None;
    }
    Some(ResponseHeader {
        cmd,
        meta_data: meta,
        devload,
        tag,
        poison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_bit_totals() {
        assert_eq!(request_bits(Layout::CxlUnopt), 74);
        assert_eq!(request_bits(Layout::CxlOpt), 62);
        assert_eq!(request_bits(Layout::Chi), 74);
        assert_eq!(response_bits(Layout::CxlUnopt), 26);
        assert_eq!(response_bits(Layout::CxlOpt), 16);
    }

    #[test]
    fn zero_request_is_nop() {
        // The all-zero bit pattern decodes as NOP, not a header.
        let bytes = vec![0u8; request_entry_bytes(Layout::CxlUnopt)];
        assert_eq!(decode_request(&bytes, Layout::CxlUnopt), None);
    }

    #[test]
    fn round_trip_request() {
        for layout in [Layout::CxlUnopt, Layout::CxlOpt, Layout::Chi] {
            let h = RequestHeader {
                cmd: REQ_CMD_WRITE,
                meta_data: 0xB & 0x7,
                address: 0x2AAA_5555_1FF & ((1 << 46) - 1),
                tag: 0xFF,
                poison: true,
            };
            let enc = encode_request(&h, layout).unwrap();
            assert_eq!(decode_request(&enc, layout), Some(h));
        }
    }

    #[test]
    fn round_trip_response() {
        let h = ResponseHeader {
            cmd: RESP_CMD_DATA,
            meta_data: 0xA,
            devload: 2,
            tag: 0xBEEF,
            poison: false,
        };
        let enc = encode_response(&h, Layout::CxlUnopt).unwrap();
        assert_eq!(enc.len(), 4);
        assert_eq!(decode_response(&enc, Layout::CxlUnopt), Some(h));
    }

    #[test]
    fn overflow_rejected() {
        let h = RequestHeader {
            cmd: REQ_CMD_READ,
            meta_data: 0,
            address: 1 << 46,
            tag: 0,
            poison: false,
        };
        assert!(matches!(
            encode_request(&h, Layout::CxlUnopt),
            Err(CodecError::FieldOverflow {
                field: "address",
                ..
            })
        ));
        let h = RequestHeader {
            cmd: REQ_CMD_READ,
            meta_data: 0,
            address: 0,
            tag: 0x100,
            poison: false,
        };
        assert!(encode_request(&h, Layout::CxlOpt).is_err());
        assert!(encode_request(&h, Layout::CxlUnopt).is_ok());
    }

    #[test]
    fn nop_cmd_rejected_for_real_headers() {
        let h = RequestHeader {
            cmd: 0,
            meta_data: 0,
            address: 0,
            tag: 0,
            poison: false,
        };
        assert_eq!(
            encode_request(&h, Layout::CxlUnopt),
            Err(CodecError::ReservedNopCmd)
        );
    }
}
