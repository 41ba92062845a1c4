//! Resource bookkeeping for protocol runs.
//!
//! The classical channel between the parties is an in-process metered queue:
//! every message is logged with its direction and bit count, and the running
//! totals can be re-derived from the log with [`Transcript::audit`].

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Sender (Alice) to receiver (Bob).
    Forward,
    /// Receiver to sender.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub direction: Direction,
    pub tag: &'static str,
    pub bits: f64,
    /// Payload for messages that carry an actual integer value.
    pub value: Option<u64>,
    /// True when the cost is an asymptotic rate charged by accounting rather
    /// than a message actually encoded (compressed teleportation).
    pub modeled: bool,
}

/// Record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub bits_forward: f64,
    pub bits_backward: f64,
    pub ebits_consumed: f64,
    pub ebits_recovered: f64,
    /// Worst per-state fidelity of the run.
    pub output_fidelity: f64,
    pub fallback_used: bool,
    messages: Vec<Message>,
}

impl Default for Transcript {
    fn default() -> Self {
        Self::new()
    }
}

impl Transcript {
    pub fn new() -> Self {
        Self {
            bits_forward: 0.0,
            bits_backward: 0.0,
            ebits_consumed: 0.0,
            ebits_recovered: 0.0,
            output_fidelity: 1.0,
            fallback_used: false,
            messages: Vec::new(),
        }
    }

    fn push(&mut self, msg: Message) {
        match msg.direction {
            Direction::Forward => self.bits_forward += msg.bits,
            Direction::Backward => self.bits_backward += msg.bits,
        }
        self.messages.push(msg);
    }

    /// Sends `value` in a fixed-width field of `width` bits.
    pub fn send(&mut self, direction: Direction, tag: &'static str, width: u32, value: u64) {
        debug_assert!(width >= 64 || value < (1u64 << width));
        self.push(Message {
            direction,
            tag,
            bits: width as f64,
            value: Some(value),
            modeled: false,
        });
    }

    /// One symbol from an alphabet of `alphabet` values, charged log₂(alphabet)
    /// bits (the rate of block-encoding many such symbols).
    pub fn send_symbol(&mut self, direction: Direction, tag: &'static str, alphabet: u64, value: u64) {
        debug_assert!(value < alphabet);
        self.push(Message {
            direction,
            tag,
            bits: (alphabet as f64).log2(),
            value: Some(value),
            modeled: false,
        });
    }

    /// A reserved sentinel in a `width`-bit field.
    pub fn send_flag(&mut self, direction: Direction, tag: &'static str, width: u32) {
        self.push(Message {
            direction,
            tag,
            bits: width as f64,
            value: None,
            modeled: false,
        });
    }

    /// Charges `bits` without encoding a payload.
    pub fn send_modeled(&mut self, direction: Direction, tag: &'static str, bits: f64) {
        self.push(Message {
            direction,
            tag,
            bits,
            value: None,
            modeled: true,
        });
    }

    pub fn consume_ebits(&mut self, ebits: f64) {
        self.ebits_consumed += ebits;
    }

    pub fn recover_ebits(&mut self, ebits: f64) {
        self.ebits_recovered += ebits;
    }

    /// Folds a per-state fidelity into the run's worst case.
    pub fn record_fidelity(&mut self, f: f64) {
        self.output_fidelity = self.output_fidelity.min(f.clamp(0.0, 1.0));
    }

    pub fn mark_fallback(&mut self) {
        self.fallback_used = true;
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Forward and backward bit totals re-summed from the message log.
    pub fn audit(&self) -> (f64, f64) {
        self.messages.iter().fold((0.0, 0.0), |(f, b), m| match m.direction {
            Direction::Forward => (f + m.bits, b),
            Direction::Backward => (f, b + m.bits),
        })
    }

    /// Appends another run's costs and messages.
    pub fn absorb(&mut self, other: Transcript) {
        self.ebits_consumed += other.ebits_consumed;
        self.ebits_recovered += other.ebits_recovered;
        self.output_fidelity = self.output_fidelity.min(other.output_fidelity);
        self.fallback_used |= other.fallback_used;
        for m in other.messages {
            self.push(m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_matches_counters() {
        let mut t = Transcript::new();
        t.send(Direction::Forward, "index", 6, 17);
        t.send_modeled(Direction::Forward, "compressed", 3.25);
        t.send(Direction::Backward, "ack", 1, 1);
        let mut u = Transcript::new();
        u.send(Direction::Forward, "x", 2, 3);
        u.record_fidelity(0.5);
        t.absorb(u);
        assert_eq!(t.audit(), (t.bits_forward, t.bits_backward));
        assert_eq!(t.bits_forward, 11.25);
        assert_eq!(t.output_fidelity, 0.5);
    }
}
