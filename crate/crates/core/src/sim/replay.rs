//! Go-back-N link-level retry over a lossy channel.
//!
//! The sender keeps a ring of unacknowledged flits (the replay
//! buffer); the receiver checks each flit's CRC and NAKs the first bad
//! sequence number, which forces in-order retransmission from exactly
//! that flit. Flits already in flight behind the failure are discarded
//! and resent — that flight cost is what degrades goodput by roughly
//! `1/(1 - eps * k)`.
//!
//! Window sizing and ack cadence are not protocol-mandated; the
//! defaults below are plumbing choices.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::codec::Flit;
use crate::model::Direction;

/// Maximum unacknowledged flits held in the replay buffer.
pub const REPLAY_WINDOW: usize = 64;
/// The receiver acknowledges after every group of this many flits.
pub const ACK_EVERY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceEvent {
    Send {
        ui: f64,
        direction: Direction,
        seq: u64,
        resend: bool,
    },
    Nak {
        ui: f64,
        direction: Direction,
        seq: u64,
    },
    Deliver {
        ui: f64,
        direction: Direction,
        seq: u64,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Send {
                ui,
                direction,
                seq,
                resend,
            } => {
                let kind = if *resend { "resend" } else { "send" };
                write!(f, "{ui:>12.1} {} {kind} seq={seq}", direction.as_str())
            }
            TraceEvent::Nak { ui, direction, seq } => {
                write!(f, "{ui:>12.1} {} nak seq={seq}", direction.as_str())
            }
            TraceEvent::Deliver { ui, direction, seq } => {
                write!(f, "{ui:>12.1} {} deliver seq={seq}", direction.as_str())
            }
        }
    }
}

pub struct ChannelOutcome {
    /// Flits accepted by the receiver, in order, exactly once.
    pub delivered: Vec<Flit>,
    /// Total transmissions, including discarded and resent flits.
    pub transmissions: u64,
    /// Flits that had to be retransmitted (discards + corrupted).
    pub retried: u64,
}

/// One direction of the lossy, replayed link.
pub struct ReplayChannel {
    direction: Direction,
    error_rate: f64,
    force_nak_at: Option<u64>,
    forced_done: bool,
    ui_per_flit: f64,
    pub trace: Vec<TraceEvent>,
    trace_enabled: bool,
}

impl ReplayChannel {
    pub fn new(direction: Direction, error_rate: f64, ui_per_flit: f64) -> Self {
        Self {
            direction,
            error_rate,
            force_nak_at: None,
            forced_done: false,
            ui_per_flit,
            trace: Vec::new(),
            trace_enabled: false,
        }
    }

    pub fn with_forced_nak(mut self, seq: Option<u64>) -> Self {
        self.force_nak_at = seq;
        self
    }

    pub fn with_trace(mut self, enabled: bool) -> Self {
        self.trace_enabled = enabled;
        self
    }

    fn corrupt(&mut self, flit: &Flit, seq: u64, rng: &mut ChaCha8Rng) -> Option<Flit> {
        if self.force_nak_at == Some(seq) && !self.forced_done {
            self.forced_done = true;
            let mut bad = *flit;
            bad.bytes[0] ^= 0x01;
            return Some(bad);
        }
        if self.error_rate > 0.0 && rng.gen_bool(self.error_rate) {
            let bit: usize = rng.gen_range(0..2048);
            let mut bad = *flit;
            bad.bytes[bit / 8] ^= 1 << (bit % 8);
            return Some(bad);
        }
        None
    }

    /// Transmit a flit stream through the channel with go-back-N
    /// retry. Deterministic given the RNG state.
    pub fn transmit(&mut self, flits: &[Flit], rng: &mut ChaCha8Rng) -> ChannelOutcome {
        let mut delivered = Vec::with_capacity(flits.len());
        let mut transmissions: u64 = 0;
        let mut retried: u64 = 0;
        let mut base = 0usize; // next sequence the receiver expects
        let mut high_water = 0usize; // furthest sequence sent so far

        while base < flits.len() {
            let end = (base + ACK_EVERY).min(flits.len());
            debug_assert!(end - base <= REPLAY_WINDOW);
            let mut failed = None;
            for seq in base..end {
                transmissions += 1;
                if self.trace_enabled {
                    self.trace.push(TraceEvent::Send {
                        ui: transmissions as f64 * self.ui_per_flit,
                        direction: self.direction,
                        seq: seq as u64,
                        resend: seq < high_water,
                    });
                }
                high_water = high_water.max(seq + 1);
                let wire = match self.corrupt(&flits[seq], seq as u64, rng) {
                    Some(bad) => bad,
                    None => flits[seq],
                };
                if wire.check_crc().is_err() {
                    if self.trace_enabled {
                        self.trace.push(TraceEvent::Nak {
                            ui: transmissions as f64 * self.ui_per_flit,
                            direction: self.direction,
                            seq: seq as u64,
                        });
                    }
                    failed = Some(seq);
                    break;
                }
                if self.trace_enabled {
                    self.trace.push(TraceEvent::Deliver {
                        ui: transmissions as f64 * self.ui_per_flit,
                        direction: self.direction,
                        seq: seq as u64,
                    });
                }
                delivered.push(flits[seq]);
            }
            match failed {
                None => base = end,
                Some(seq) => {
                    // Flits behind the failure were in flight; they are
                    // discarded on the wire and resent from `seq`.
                    let in_flight_after = (end - seq - 1) as u64;
                    transmissions += in_flight_after;
                    retried += in_flight_after + 1;
                    base = seq;
                }
            }
        }
        ChannelOutcome {
            delivered,
            transmissions,
            retried,
        }
    }
}
