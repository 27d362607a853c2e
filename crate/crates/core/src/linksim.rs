//! Clocked model of the serial transmitter and the lookup-table receiver.
//!
//! The transmitter shifts a loaded codeword out one bit per rising edge
//! while `EN` is high, leftmost bit first. The receiver shifts `n` bits into
//! a parallel register, then spends one cycle per codebook entry comparing
//! (XOR and ones-count, tracking the minimum and every index attaining it),
//! one cycle loading the result and one cycle latching `data`/`REQ`. The
//! processing phase therefore always takes `2n + 2` cycles; the `n` cycles
//! of serial reception are counted separately.

use std::fmt::{self, Write as _};

use crate::bits::BitWord;
use crate::channel::ChannelConfig;
use crate::codebook::{Codebook, Codeword, DataWord};
use crate::codec::{self, DecodeOutcome, Policy, ReceivedWord};
use crate::error::{Error, Result};

/// Parallel-in, serial-out transmit register.
#[derive(Debug, Clone)]
pub struct TxState {
    ortho: Codeword,
    position: usize,
    enabled: bool,
}

impl TxState {
    /// Loads a codeword and raises `EN`.
    pub fn load(ortho: Codeword) -> Self {
        TxState {
            ortho,
            position: 0,
            enabled: true,
        }
    }

    pub fn ortho(&self) -> &Codeword {
        &self.ortho
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn set_enabled(&mut self, enabled: bool) {
        self.enabled = enabled;
    }

    pub fn is_finished(&self) -> bool {
        self.position == self.ortho.len()
    }

    /// One rising edge: emits the bit at the current position.
    pub fn step(&mut self) -> Result<bool> {
        if !self.enabled {
            return Err(Error::Transmitter("stepped with EN low"));
        }
        if self.is_finished() {
            return Err(Error::Transmitter("stepped past the end of the codeword"));
        }
        let bit = self.ortho.bits().get(self.position);
        self.position += 1;
        Ok(bit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RxPhase {
    Receiving,
    Comparing,
    Latching,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RxInput {
    Bit(bool),
    Tick,
}

/// Receiver state machine.
#[derive(Debug, Clone)]
pub struct RxState<'a> {
    codebook: &'a Codebook,
    policy: Policy,
    shift_buffer: BitWord,
    bits_received: usize,
    phase: RxPhase,
    lut_index: usize,
    min_count: Option<usize>,
    argmin_set: Vec<usize>,
    cycle_counter: usize,
    latch_cycles: usize,
    outcome: Option<DecodeOutcome>,
    data_out: Option<DataWord>,
    req: bool,
}

impl<'a> RxState<'a> {
    pub fn new(codebook: &'a Codebook, policy: Policy) -> Self {
        RxState {
            codebook,
            policy,
            shift_buffer: BitWord::zeros(codebook.n()),
            bits_received: 0,
            phase: RxPhase::Receiving,
            lut_index: 0,
            min_count: None,
            argmin_set: Vec::new(),
            cycle_counter: 0,
            latch_cycles: 0,
            outcome: None,
            data_out: None,
            req: false,
        }
    }

    pub fn phase(&self) -> RxPhase {
        self.phase
    }

    pub fn bits_received(&self) -> usize {
        self.bits_received
    }

    pub fn shift_buffer(&self) -> &BitWord {
        &self.shift_buffer
    }

    pub fn lut_index(&self) -> usize {
        self.lut_index
    }

    pub fn min_count(&self) -> Option<usize> {
        self.min_count
    }

    pub fn argmin_set(&self) -> &[usize] {
        &self.argmin_set
    }

    /// Cycles spent in the comparing and latching phases.
    pub fn cycle_counter(&self) -> usize {
        self.cycle_counter
    }

    pub fn outcome(&self) -> Option<DecodeOutcome> {
        self.outcome
    }

    pub fn data_out(&self) -> Option<DataWord> {
        self.data_out
    }

    pub fn req(&self) -> bool {
        self.req
    }

    pub fn step(&mut self, input: RxInput) -> Result<()> {
        match (self.phase, input) {
            (RxPhase::Receiving, RxInput::Bit(bit)) => {
                self.shift_buffer.set(self.bits_received, bit);
                self.bits_received += 1;
                if self.bits_received == self.codebook.n() {
                    self.phase = RxPhase::Comparing;
                }
            }
            (RxPhase::Receiving, RxInput::Tick) => {
                return Err(Error::Receiver("tick before the shift register is full"));
            }
            (_, RxInput::Bit(_)) => {
                return Err(Error::Receiver("serial bit outside the receiving phase"));
            }
            (RxPhase::Comparing, RxInput::Tick) => {
                self.cycle_counter += 1;
                let entry = &self.codebook.entries()[self.lut_index];
                let count = entry.bits().distance_unchecked(&self.shift_buffer);
                match self.min_count {
                    Some(m) if count > m => {}
                    Some(m) if count == m => self.argmin_set.push(self.lut_index),
                    _ => {
                        self.min_count = Some(count);
                        self.argmin_set.clear();
                        self.argmin_set.push(self.lut_index);
                    }
                }
                self.lut_index += 1;
                if self.lut_index == self.codebook.len() {
                    self.phase = RxPhase::Latching;
                }
            }
            (RxPhase::Latching, RxInput::Tick) => {
                self.cycle_counter += 1;
                self.latch_cycles += 1;
                if self.latch_cycles == 1 {
                    let min = self.min_count.expect("comparison phase ran");
                    self.outcome = Some(DecodeOutcome::from_search(
                        min,
                        &self.argmin_set,
                        self.codebook.params().t(),
                    ));
                } else {
                    let outcome = self.outcome.expect("loaded on the previous cycle");
                    self.req = self.policy.requests_retransmit(&outcome);
                    self.data_out = self.policy.accepted_data(&outcome);
                    self.phase = RxPhase::Done;
                }
            }
            (RxPhase::Done, RxInput::Tick) => {
                return Err(Error::Receiver("tick after decoding finished"));
            }
        }
        Ok(())
    }

    /// Ticks until the outcome is latched.
    pub fn run_to_done(&mut self) -> Result<DecodeOutcome> {
        while self.phase != RxPhase::Done {
            self.step(RxInput::Tick)?;
        }
        Ok(self.outcome.expect("latched"))
    }

    fn rxcode_display(&self) -> String {
        (0..self.codebook.n())
            .map(|i| match i < self.bits_received {
                true if self.shift_buffer.get(i) => '1',
                true => '0',
                false => 'x',
            })
            .collect()
    }
}

/// One clock cycle of observable signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub clk: usize,
    pub en: bool,
    pub txcode: Option<bool>,
    /// Receive register; `x` marks positions not yet shifted in.
    pub rxcode: String,
    pub count: Option<usize>,
    pub ortho: Option<String>,
    pub data: Option<String>,
    pub req: bool,
}

pub const TRACE_SIGNALS: [&str; 8] = [
    "clk", "EN", "txcode", "rxcode", "count", "ortho", "data", "REQ",
];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WaveformTrace {
    records: Vec<TraceRecord>,
    receive_cycles: usize,
    processing_cycles: usize,
}

impl WaveformTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    /// Cycles spent shifting the word in (always `n`).
    pub fn receive_cycles(&self) -> usize {
        self.receive_cycles
    }

    /// Comparison plus latch cycles (always `2n + 2`).
    pub fn processing_cycles(&self) -> usize {
        self.processing_cycles
    }

    pub fn req_raised(&self) -> bool {
        self.records.last().is_some_and(|r| r.req)
    }

    /// Tab-separated value-change text: a header naming the signals, then
    /// one line per cycle. Undriven values print as `-`.
    pub fn to_text(&self) -> String {
        let mut out = TRACE_SIGNALS.join("\t");
        out.push('\n');
        for r in &self.records {
            let dash = || "-".to_string();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.clk,
                r.en as u8,
                r.txcode.map_or_else(dash, |b| (b as u8).to_string()),
                r.rxcode,
                r.count.map_or_else(dash, |c| c.to_string()),
                r.ortho.clone().unwrap_or_else(dash),
                r.data.clone().unwrap_or_else(dash),
                r.req as u8,
            );
        }
        out
    }
}

impl fmt::Display for WaveformTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone)]
pub struct LinkResult {
    pub outcome: DecodeOutcome,
    /// The parallel word the receiver assembled.
    pub received: ReceivedWord,
    /// Symbol delivered under the policy, if REQ stayed low.
    pub delivered: Option<DataWord>,
    pub trace: WaveformTrace,
}

/// Simulates one symbol end to end: encode, serialize, impair each bit on
/// the wire, deserialize and decode. `index` selects the channel stream for
/// this symbol.
pub fn run_link(
    data: DataWord,
    channel: &ChannelConfig,
    index: u64,
    cb: &Codebook,
    policy: Policy,
) -> Result<LinkResult> {
    let n = cb.n();
    let k = cb.params().k();
    if let ChannelConfig::Explicit(p) = channel {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.len(),
            });
        }
    }
    let mut tx = TxState::load(codec::encode(cb, data)?);
    let mut rx = RxState::new(cb, policy);
    let mut flipper = channel.bit_flipper(index);
    let mut records = Vec::with_capacity(3 * n + 2);

    let mut clk = 0;
    while !tx.is_finished() {
        let bit = tx.step()?;
        let wire = bit ^ flipper.next_flip()?;
        rx.step(RxInput::Bit(wire))?;
        records.push(TraceRecord {
            clk,
            en: true,
            txcode: Some(bit),
            rxcode: rx.rxcode_display(),
            count: None,
            ortho: None,
            data: None,
            req: false,
        });
        clk += 1;
    }
    tx.set_enabled(false);
    let receive_cycles = clk;

    let rxcode = rx.rxcode_display();
    while rx.phase() != RxPhase::Done {
        let comparing = rx.phase() == RxPhase::Comparing;
        let compared = rx.lut_index();
        rx.step(RxInput::Tick)?;
        let ortho = if comparing {
            Some(cb.entries()[compared].to_string())
        } else {
            match rx.argmin_set() {
                [only] => Some(cb.entries()[*only].to_string()),
                _ => None,
            }
        };
        records.push(TraceRecord {
            clk,
            en: false,
            txcode: None,
            rxcode: rxcode.clone(),
            count: rx.min_count(),
            ortho,
            data: rx.data_out().map(|d| d.to_bit_string(k)),
            req: rx.req(),
        });
        clk += 1;
    }

    let outcome = rx.outcome().expect("receiver finished");
    Ok(LinkResult {
        outcome,
        received: ReceivedWord::new(rx.shift_buffer().clone()),
        delivered: rx.data_out(),
        trace: WaveformTrace {
            records,
            receive_cycles,
            processing_cycles: rx.cycle_counter(),
        },
    })
}

/// Serializes a codeword through the transmit register.
pub fn serialize(c: &Codeword) -> Result<Vec<bool>> {
    let mut tx = TxState::load(c.clone());
    (0..c.len()).map(|_| tx.step()).collect()
}

/// Shifts serial bits into an `n`-bit parallel word.
pub fn deserialize(bits: &[bool]) -> BitWord {
    BitWord::from_bits(bits.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ErrorPattern;

    fn feed<'a>(cb: &'a Codebook, word: &str) -> RxState<'a> {
        let mut rx = RxState::new(cb, Policy::Conservative);
        for c in word.chars() {
            rx.step(RxInput::Bit(c == '1')).unwrap();
        }
        rx
    }

    #[test]
    fn transmitter_serializes_leftmost_first() {
        let cb = Codebook::build(8).unwrap();
        let c = cb.data_to_code(DataWord::new(0b0110)).unwrap();
        let bits: Vec<u8> = serialize(c).unwrap().into_iter().map(u8::from).collect();
        assert_eq!(bits, [0, 0, 1, 1, 1, 1, 0, 0]);
        let zero = serialize(&cb.entries()[0]).unwrap();
        assert_eq!(zero, [false; 8]);
    }

    #[test]
    fn transmitter_prefix_and_errors() {
        let cb = Codebook::build(8).unwrap();
        let mut tx = TxState::load(cb.entries()[6].clone());
        let prefix: Vec<bool> = (0..3).map(|_| tx.step().unwrap()).collect();
        assert_eq!(prefix, [false, false, true]);
        assert_eq!(tx.position(), 3);
        tx.set_enabled(false);
        assert!(tx.step().is_err());
        tx.set_enabled(true);
        for _ in 3..8 {
            tx.step().unwrap();
        }
        assert!(matches!(tx.step(), Err(Error::Transmitter(_))));
    }

    #[test]
    fn receiver_cases_take_eighteen_cycles() {
        let cb = Codebook::build(8).unwrap();
        let six = DataWord::new(0b0110);

        let mut rx = feed(&cb, "00111100");
        assert_eq!(
            rx.run_to_done().unwrap(),
            DecodeOutcome::ExactMatch { data: six }
        );
        assert_eq!(rx.cycle_counter(), 18);

        let mut rx = feed(&cb, "00110100");
        assert_eq!(
            rx.run_to_done().unwrap(),
            DecodeOutcome::Corrected {
                data: six,
                distance: 1
            }
        );
        assert_eq!(rx.cycle_counter(), 18);
        assert!(!rx.req());
        assert_eq!(rx.data_out(), Some(six));

        let mut rx = feed(&cb, "00110000");
        assert!(matches!(
            rx.run_to_done().unwrap(),
            DecodeOutcome::Retransmit { .. }
        ));
        assert_eq!(rx.cycle_counter(), 18);
        assert!(rx.req());
        assert_eq!(rx.data_out(), None);
    }

    #[test]
    fn receiver_phase_errors() {
        let cb = Codebook::build(8).unwrap();
        let mut rx = RxState::new(&cb, Policy::Conservative);
        assert!(rx.step(RxInput::Tick).is_err());
        let mut rx = feed(&cb, "00111100");
        assert_eq!(rx.phase(), RxPhase::Comparing);
        assert!(rx.step(RxInput::Bit(true)).is_err());
        rx.run_to_done().unwrap();
        assert!(rx.step(RxInput::Tick).is_err());
    }

    #[test]
    fn link_trace_shape() {
        let cb = Codebook::build(8).unwrap();
        let res = run_link(
            DataWord::new(6),
            &ChannelConfig::noiseless(),
            0,
            &cb,
            Policy::Conservative,
        )
        .unwrap();
        assert_eq!(
            res.outcome,
            DecodeOutcome::ExactMatch {
                data: DataWord::new(6)
            }
        );
        assert_eq!(res.trace.records().len(), 8 + 18);
        assert_eq!(res.trace.receive_cycles(), 8);
        assert_eq!(res.trace.processing_cycles(), 18);
        let text = res.trace.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "clk\tEN\ttxcode\trxcode\tcount\tortho\tdata\tREQ");
        assert_eq!(lines[1], "0\t1\t0\t0xxxxxxx\t-\t-\t-\t0");
        assert_eq!(lines[8], "7\t1\t0\t00111100\t-\t-\t-\t0");
        assert_eq!(
            *lines.last().unwrap(),
            "25\t0\t-\t00111100\t0\t00111100\t0110\t0"
        );
    }

    #[test]
    fn link_tie_raises_req() {
        let cb = Codebook::build(8).unwrap();
        let pattern: ErrorPattern = "00001100".parse().unwrap();
        let res = run_link(
            DataWord::new(6),
            &ChannelConfig::Explicit(pattern),
            0,
            &cb,
            Policy::Conservative,
        )
        .unwrap();
        assert!(matches!(
            res.outcome,
            DecodeOutcome::Retransmit {
                min_distance: 2,
                ..
            }
        ));
        assert!(res.trace.req_raised());
        assert_eq!(res.delivered, None);
        assert!(res
            .trace
            .to_text()
            .lines()
            .last()
            .unwrap()
            .ends_with("\t-\t-\t1"));
    }
}
