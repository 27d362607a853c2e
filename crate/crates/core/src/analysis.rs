//! Exhaustive and sampled measurements over the code: detection census of
//! the whole received-word space, correction sweeps, the parity-only
//! baseline and the census of undetectable error patterns.
//!
//! Every measurement is a sum over disjoint cases, so the parallel
//! enumeration gives the same totals however the work is split. Sampled
//! runs draw case `i` from the stream `SplitMix64::for_stream(seed, i)`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::bits::BitWord;
use crate::channel::{self, ChannelConfig, SplitMix64};
use crate::codebook::{Codebook, DataWord};
use crate::codec::{self, DecodeOutcome, OutcomeKind, Policy, ReceivedWord};
use crate::error::{Error, Result};
use crate::linksim;

/// Largest `n` whose `2^n` word space is enumerated exhaustively.
pub const EXHAUSTIVE_MAX_N: usize = 24;

/// Default cap on exhaustive sweep cases.
pub const DEFAULT_SWEEP_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub exact: u64,
    pub corrected: u64,
    pub retransmit: u64,
    pub beyond_radius: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, outcome: &DecodeOutcome) {
        match outcome.kind() {
            OutcomeKind::ExactMatch => self.exact += 1,
            OutcomeKind::Corrected => self.corrected += 1,
            OutcomeKind::Retransmit => self.retransmit += 1,
            OutcomeKind::NearestBeyondRadius => self.beyond_radius += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.exact + self.corrected + self.retransmit + self.beyond_radius
    }

    fn merge(mut self, other: OutcomeCounts) -> OutcomeCounts {
        self.exact += other.exact;
        self.corrected += other.corrected;
        self.retransmit += other.retransmit;
        self.beyond_radius += other.beyond_radius;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

impl Sampling {
    fn label(&self) -> &'static str {
        match self {
            Sampling::Exhaustive => "exhaustive",
            Sampling::Sampled { .. } => "sampled",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Sampling::Exhaustive => None,
            Sampling::Sampled { seed, .. } => Some(*seed),
        }
    }
}

/// Outcome classes over the received-word space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionCensus {
    pub n: usize,
    pub t: usize,
    /// `2^n` when exhaustive, the number of trials when sampled.
    pub total_words: u64,
    pub counts: OutcomeCounts,
    pub mode: Sampling,
}

impl DetectionCensus {
    /// Words indistinguishable from a valid codeword.
    pub fn undetected_as_valid(&self) -> u64 {
        self.counts.exact
    }

    /// `(total - exact) / total`.
    pub fn detection_rate(&self) -> f64 {
        (self.total_words - self.counts.exact) as f64 / self.total_words as f64
    }
}

/// Decodes every n-bit word.
pub fn detection_census(cb: &Codebook) -> Result<DetectionCensus> {
    let n = cb.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::ExhaustiveRefused(format!(
            "2^{n} words exceeds the exhaustive limit of 2^{EXHAUSTIVE_MAX_N}; use sampled_census"
        )));
    }
    let total = 1u64 << n;
    let counts = (0..total)
        .into_par_iter()
        .fold(OutcomeCounts::default, |mut acc, w| {
            let r = ReceivedWord::new(BitWord::from_u64(w, n));
            acc.record(&codec::decode(cb, &r).expect("length matches"));
            acc
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge);
    Ok(DetectionCensus {
        n,
        t: cb.params().t(),
        total_words: total,
        counts,
        mode: Sampling::Exhaustive,
    })
}

/// Decodes `trials` uniformly random n-bit words.
pub fn sampled_census(cb: &Codebook, trials: u64, seed: u64) -> Result<DetectionCensus> {
    if trials == 0 {
        return Err(Error::Config(
            "sampled census needs at least one trial".into(),
        ));
    }
    let n = cb.n();
    let counts = (0..trials)
        .into_par_iter()
        .fold(OutcomeCounts::default, |mut acc, i| {
            let mut rng = SplitMix64::for_stream(seed, i);
            let r = ReceivedWord::new(random_word(n, &mut rng));
            acc.record(&codec::decode(cb, &r).expect("length matches"));
            acc
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge);
    Ok(DetectionCensus {
        n,
        t: cb.params().t(),
        total_words: trials,
        counts,
        mode: Sampling::Sampled { seed, trials },
    })
}

fn random_word(n: usize, rng: &mut SplitMix64) -> BitWord {
    let mut word = BitWord::zeros(n);
    let mut chunk = 0;
    for i in 0..n {
        if i % 64 == 0 {
            chunk = rng.next_u64();
        }
        word.set(i, (chunk >> (i % 64)) & 1 == 1);
    }
    word
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Every codeword against every pattern of weight `1..=max_weight`,
    /// refused when the case count exceeds `budget`.
    Exhaustive {
        budget: u128,
    },
    Sampled {
        seed: u64,
        trials: u64,
    },
}

impl SweepMode {
    pub fn exhaustive() -> Self {
        SweepMode::Exhaustive {
            budget: DEFAULT_SWEEP_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionSweepResult {
    pub n: usize,
    /// Correction radius of the code, `n/4 - 1`.
    pub t: usize,
    /// Largest error weight exercised.
    pub max_weight: usize,
    pub patterns_tested: u64,
    /// Cases not decoded to `Corrected(original, weight)`.
    pub failures: u64,
    pub counts: OutcomeCounts,
    pub mode: Sampling,
}

impl CorrectionSweepResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn sweep_case(cb: &Codebook, data: usize, pattern: &channel::ErrorPattern, acc: &mut SweepAcc) {
    let c = &cb.entries()[data];
    let r = channel::apply_pattern(c, pattern).expect("lengths match");
    let outcome = codec::decode(cb, &r).expect("lengths match");
    acc.counts.record(&outcome);
    acc.cases += 1;
    let expected = DecodeOutcome::Corrected {
        data: DataWord::new(data as u64),
        distance: pattern.weight(),
    };
    if outcome != expected {
        acc.failures += 1;
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SweepAcc {
    cases: u64,
    failures: u64,
    counts: OutcomeCounts,
}

impl SweepAcc {
    fn merge(self, o: SweepAcc) -> SweepAcc {
        SweepAcc {
            cases: self.cases + o.cases,
            failures: self.failures + o.failures,
            counts: self.counts.merge(o.counts),
        }
    }
}

/// Checks that every error of weight `1..=max_weight` on every codeword is
/// corrected back to the original symbol.
pub fn correction_sweep(
    cb: &Codebook,
    max_weight: usize,
    mode: SweepMode,
) -> Result<CorrectionSweepResult> {
    let n = cb.n();
    if max_weight > n {
        return Err(Error::WeightOutOfRange { max_weight, n });
    }
    let (acc, sampling) = match mode {
        SweepMode::Exhaustive { budget } => {
            let per_codeword = channel::pattern_count(n, max_weight).map(|c| c - 1);
            let cases = per_codeword.and_then(|p| p.checked_mul(cb.len() as u128));
            match cases {
                Some(c) if c <= budget => {}
                _ => {
                    return Err(Error::ExhaustiveRefused(format!(
                        "n = {n}, weight <= {max_weight} exceeds the budget of {budget} cases"
                    )))
                }
            }
            let acc = (0..cb.len())
                .into_par_iter()
                .map(|data| {
                    let mut acc = SweepAcc::default();
                    for pattern in channel::enumerate_patterns_between(n, 1, max_weight)
                        .expect("weight checked")
                    {
                        sweep_case(cb, data, &pattern, &mut acc);
                    }
                    acc
                })
                .reduce(SweepAcc::default, SweepAcc::merge);
            (acc, Sampling::Exhaustive)
        }
        SweepMode::Sampled { seed, trials } => {
            if max_weight == 0 {
                return Err(Error::Config("sampled sweep needs max_weight >= 1".into()));
            }
            let weights = WeightTable::new(n, max_weight);
            let acc = (0..trials)
                .into_par_iter()
                .fold(SweepAcc::default, |mut acc, i| {
                    let mut rng = SplitMix64::for_stream(seed, i);
                    let data = rng.below(cb.len() as u64) as usize;
                    let w = weights.draw(&mut rng);
                    let pattern = channel::random_pattern_of_weight(n, w, &mut rng);
                    sweep_case(cb, data, &pattern, &mut acc);
                    acc
                })
                .reduce(SweepAcc::default, SweepAcc::merge);
            (acc, Sampling::Sampled { seed, trials })
        }
    };
    Ok(CorrectionSweepResult {
        n,
        t: cb.params().t(),
        max_weight,
        patterns_tested: acc.cases,
        failures: acc.failures,
        counts: acc.counts,
        mode: sampling,
    })
}

/// Draws an error weight in `1..=max_weight` with probability proportional
/// to the number of patterns of that weight, so patterns come out uniform.
struct WeightTable {
    cumulative: Vec<f64>,
}

impl WeightTable {
    fn new(n: usize, max_weight: usize) -> Self {
        let mut cumulative = Vec::with_capacity(max_weight);
        let mut binom = 1.0f64;
        let mut total = 0.0;
        for w in 1..=max_weight {
            binom = binom * (n - w + 1) as f64 / w as f64;
            total += binom;
            cumulative.push(total);
        }
        WeightTable { cumulative }
    }

    fn draw(&self, rng: &mut SplitMix64) -> usize {
        let total = *self.cumulative.last().expect("max_weight >= 1");
        let u = rng.next_f64() * total;
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
            + 1
    }
}

/// Parity-only detection over every n-bit error pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityBaseline {
    pub n: usize,
    pub total_patterns: u64,
    pub detected: u64,
}

impl ParityBaseline {
    pub fn rate(&self) -> f64 {
        self.detected as f64 / self.total_patterns as f64
    }
}

/// Applies every error pattern to a nonzero codeword and counts the
/// impaired words flagged by the parity check.
pub fn parity_baseline(n: usize) -> Result<ParityBaseline> {
    let cb = Codebook::build(n)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::ExhaustiveRefused(format!(
            "2^{n} patterns exceeds the exhaustive limit"
        )));
    }
    let base = &cb.entries()[1];
    let total = 1u64 << n;
    let detected = (0..total)
        .into_par_iter()
        .filter(|&e| {
            let pattern = channel::ErrorPattern::new(BitWord::from_u64(e, n));
            codec::parity_detects(&channel::apply_pattern(base, &pattern).expect("lengths match"))
        })
        .count() as u64;
    Ok(ParityBaseline {
        n,
        total_patterns: total,
        detected,
    })
}

pub fn parity_baseline_rate(n: usize) -> Result<f64> {
    parity_baseline(n).map(|p| p.rate())
}

/// Per-codeword count of nonzero error patterns that turn the codeword into
/// another codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndetectedCensus {
    pub n: usize,
    pub per_codeword: Vec<u64>,
}

impl UndetectedCensus {
    /// The common per-codeword count, if every codeword has the same one.
    pub fn uniform_count(&self) -> Option<u64> {
        let first = *self.per_codeword.first()?;
        self.per_codeword
            .iter()
            .all(|&c| c == first)
            .then_some(first)
    }
}

pub fn undetected_pattern_census(cb: &Codebook) -> Result<UndetectedCensus> {
    let n = cb.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::ExhaustiveRefused(format!(
            "2^{n} patterns exceeds the exhaustive limit"
        )));
    }
    let per_codeword = cb
        .entries()
        .par_iter()
        .map(|c| {
            (1..1u64 << n)
                .filter(|&e| {
                    let r = c
                        .bits()
                        .xor(&BitWord::from_u64(e, n))
                        .expect("lengths match");
                    cb.is_codeword(&r)
                })
                .count() as u64
        })
        .collect();
    Ok(UndetectedCensus { n, per_codeword })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusRow {
    pub n: usize,
    pub t: usize,
    pub certificate: CorrectionSweepResult,
}

/// Correction radius per code length, each certified by a sweep at weight
/// `t`: exhaustive up to `n = 16`, `sampled_trials` seeded trials above.
pub fn radius_table(ns: &[usize], sampled_trials: u64, seed: u64) -> Result<Vec<RadiusRow>> {
    ns.iter()
        .map(|&n| {
            let cb = Codebook::build(n)?;
            let t = cb.params().t();
            let mode = if n <= 16 {
                SweepMode::exhaustive()
            } else {
                SweepMode::Sampled {
                    seed,
                    trials: sampled_trials,
                }
            };
            Ok(RadiusRow {
                n,
                t,
                certificate: correction_sweep(&cb, t, mode)?,
            })
        })
        .collect()
}

/// Aggregate of many symbols pushed through the simulated link.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitSummary {
    pub n: usize,
    pub t: usize,
    pub symbols: u64,
    pub counts: OutcomeCounts,
    /// Symbols with REQ raised under the run's policy.
    pub requests: u64,
    /// Symbols delivered with the wrong value.
    pub wrong: u64,
    pub channel: ChannelConfig,
}

impl TransmitSummary {
    pub fn delivered_ok(&self) -> u64 {
        self.symbols - self.requests - self.wrong
    }
}

/// Sends `symbols` symbols (cycling through every data value) across the
/// link. Symbol `i` uses channel stream `i`.
pub fn simulate_transmission(
    cb: &Codebook,
    channel: &ChannelConfig,
    policy: Policy,
    symbols: u64,
) -> Result<TransmitSummary> {
    let mut counts = OutcomeCounts::default();
    let (mut requests, mut wrong) = (0, 0);
    for i in 0..symbols {
        let data = DataWord::new(i % cb.len() as u64);
        let res = linksim::run_link(data, channel, i, cb, policy)?;
        counts.record(&res.outcome);
        match res.delivered {
            None => requests += 1,
            Some(d) if d != data => wrong += 1,
            Some(_) => {}
        }
    }
    Ok(TransmitSummary {
        n: cb.n(),
        t: cb.params().t(),
        symbols,
        counts,
        requests,
        wrong,
        channel: channel.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportRow {
    Census(DetectionCensus),
    Sweep(CorrectionSweepResult),
    Parity(ParityBaseline),
    Transmit(TransmitSummary),
}

pub const CSV_HEADER: &str =
    "kind,n,total,exact,corrected,retransmit,beyond_radius,detection_rate,t,patterns_tested,failures,mode,seed";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::EmptyReport);
        }
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&CsvRow::from(row).to_string());
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv()?.as_bytes())?;
        Ok(())
    }
}

#[derive(Default)]
struct CsvRow {
    kind: &'static str,
    n: usize,
    total: Option<u64>,
    counts: Option<OutcomeCounts>,
    detection_rate: Option<f64>,
    t: Option<usize>,
    patterns_tested: Option<u64>,
    failures: Option<u64>,
    mode: &'static str,
    seed: Option<u64>,
}

impl From<&ReportRow> for CsvRow {
    fn from(row: &ReportRow) -> Self {
        match row {
            ReportRow::Census(c) => CsvRow {
                kind: "census",
                n: c.n,
                total: Some(c.total_words),
                counts: Some(c.counts),
                detection_rate: Some(c.detection_rate()),
                t: Some(c.t),
                mode: c.mode.label(),
                seed: c.mode.seed(),
                ..Default::default()
            },
            ReportRow::Sweep(s) => CsvRow {
                kind: "sweep",
                n: s.n,
                counts: Some(s.counts),
                t: Some(s.max_weight),
                patterns_tested: Some(s.patterns_tested),
                failures: Some(s.failures),
                mode: s.mode.label(),
                seed: s.mode.seed(),
                ..Default::default()
            },
            ReportRow::Parity(p) => CsvRow {
                kind: "parity",
                n: p.n,
                total: Some(p.total_patterns),
                detection_rate: Some(p.rate()),
                mode: "exhaustive",
                ..Default::default()
            },
            ReportRow::Transmit(s) => {
                let (mode, seed) = match &s.channel {
                    ChannelConfig::Explicit(_) => ("pattern", None),
                    ChannelConfig::IidFlip(iid) => ("iid", Some(iid.seed())),
                };
                CsvRow {
                    kind: "transmit",
                    n: s.n,
                    total: Some(s.symbols),
                    counts: Some(s.counts),
                    t: Some(s.t),
                    failures: Some(s.requests + s.wrong),
                    mode,
                    seed,
                    ..Default::default()
                }
            }
        }
    }
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        let c = self.counts;
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.kind,
            self.n,
            opt(self.total),
            opt(c.map(|c| c.exact)),
            opt(c.map(|c| c.corrected)),
            opt(c.map(|c| c.retransmit)),
            opt(c.map(|c| c.beyond_radius)),
            self.detection_rate
                .map(|r| format!("{r:.4}"))
                .unwrap_or_default(),
            opt(self.t),
            opt(self.patterns_tested),
            opt(self.failures),
            self.mode,
            opt(self.seed),
        )
    }
}
