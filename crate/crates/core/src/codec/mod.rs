//! Bit-exact 256-byte flit codecs for the symmetric-link layouts.

pub mod crc;
pub mod headers;
pub mod layout;
pub mod pack;

pub use crc::{crc16, Crc16, CRC_CCITT_FALSE};
pub use headers::{
    decode_request, decode_response, encode_request, encode_response, request_bits,
    response_bits, CodecError, Layout, RequestHeader, ResponseHeader, REQ_CMD_READ,
    REQ_CMD_WRITE, RESP_CMD_CMPL, RESP_CMD_DATA,
};
pub use layout::{byte_roles, geometry, ByteRole, FlitGeometry, SlotKind, FLIT_BYTES};
pub use pack::{
    pack_flits, unpack_flits, Flit, FlitHeader, FlitPacker, FlitUnpacker, ProtocolId, TxnItem,
};
