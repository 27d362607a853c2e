//! Run configuration: flat `key=value` files mirroring the CLI flags.
//!
//! ```text
//! # comment
//! n = 16
//! flip-prob = 0.05
//! seed = 42
//! policy = conservative
//! ```

use std::path::{Path, PathBuf};

use crate::channel::{ChannelConfig, ErrorPattern};
use crate::codebook::CodeParams;
use crate::codec::Policy;
use crate::error::{Error, Result};

/// Raw settings, every field optional. CLI flags and config files both
/// produce one of these; [`Settings::or`] layers them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub flip_prob: Option<f64>,
    pub pattern: Option<String>,
    pub policy: Option<Policy>,
    pub out: Option<PathBuf>,
    pub symbols: Option<u64>,
    pub trials: Option<u64>,
    pub max_weight: Option<usize>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                Error::Config(format!("line {}: invalid {what} {value:?}", lineno + 1))
            };
            match key {
                "n" => s.n = Some(value.parse().map_err(|_| bad("n"))?),
                "seed" => s.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "flip-prob" => s.flip_prob = Some(value.parse().map_err(|_| bad("flip-prob"))?),
                "pattern" => s.pattern = Some(value.to_string()),
                "policy" => s.policy = Some(value.parse()?),
                "out" => s.out = Some(PathBuf::from(value)),
                "symbols" => s.symbols = Some(value.parse().map_err(|_| bad("symbols"))?),
                "trials" => s.trials = Some(value.parse().map_err(|_| bad("trials"))?),
                "max-weight" => s.max_weight = Some(value.parse().map_err(|_| bad("max-weight"))?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Fills every unset field from `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            n: self.n.or(fallback.n),
            seed: self.seed.or(fallback.seed),
            flip_prob: self.flip_prob.or(fallback.flip_prob),
            pattern: self.pattern.or(fallback.pattern),
            policy: self.policy.or(fallback.policy),
            out: self.out.or(fallback.out),
            symbols: self.symbols.or(fallback.symbols),
            trials: self.trials.or(fallback.trials),
            max_weight: self.max_weight.or(fallback.max_weight),
        }
    }

    pub fn code_params(&self) -> Result<CodeParams> {
        let n = self.n.ok_or_else(|| Error::Config("missing n".into()))?;
        CodeParams::new(n)
    }

    /// Channel described by these settings: an explicit pattern, or an
    /// i.i.d. flip channel (noiseless when no probability is given).
    pub fn channel(&self, n: usize) -> Result<ChannelConfig> {
        match (&self.pattern, self.flip_prob) {
            (Some(_), Some(_)) => Err(Error::Config(
                "pattern and flip-prob are mutually exclusive".into(),
            )),
            (Some(p), None) => {
                let pattern: ErrorPattern = p.parse()?;
                if pattern.len() != n {
                    return Err(Error::Config(format!(
                        "pattern has {} bits, code length is {n}",
                        pattern.len()
                    )));
                }
                Ok(ChannelConfig::Explicit(pattern))
            }
            (None, p) => ChannelConfig::iid(p.unwrap_or(0.0), self.seed.unwrap_or(0)),
        }
    }
}

/// A validated configuration for a transmission run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: CodeParams,
    pub channel: ChannelConfig,
    pub policy: Policy,
    pub seed: u64,
    pub symbols: u64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SYMBOLS: u64 = 1000;

impl TryFrom<&Settings> for RunConfig {
    type Error = Error;

    fn try_from(s: &Settings) -> Result<Self> {
        let params = s.code_params()?;
        Ok(RunConfig {
            params,
            channel: s.channel(params.n())?,
            policy: s.policy.unwrap_or_default(),
            seed: s.seed.unwrap_or(0),
            symbols: s.symbols.unwrap_or(DEFAULT_SYMBOLS),
            out: s.out.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full_file() {
        let s = Settings::parse(
            "# run\nn = 16\nseed=42\nflip-prob = 0.05\npolicy = accept-nearest\nsymbols = 10\nout = r.csv\n",
        )
        .unwrap();
        assert_eq!(s.n, Some(16));
        assert_eq!(s.seed, Some(42));
        assert_eq!(s.policy, Some(Policy::AcceptNearest));
        let rc = RunConfig::try_from(&s).unwrap();
        assert_eq!(rc.symbols, 10);
        assert_eq!(rc.channel, ChannelConfig::iid(0.05, 42).unwrap());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("n 8").is_err());
        assert!(Settings::parse("n = eight").is_err());
        assert!(Settings::parse("policy = maybe").is_err());
    }

    #[test]
    fn validation() {
        let mut s = Settings::parse("n = 12").unwrap();
        assert!(RunConfig::try_from(&s).is_err());
        s.n = Some(8);
        s.pattern = Some("0000100".into());
        assert!(RunConfig::try_from(&s).is_err());
        s.pattern = Some("00001000".into());
        assert!(RunConfig::try_from(&s).is_ok());
        s.flip_prob = Some(0.1);
        assert!(RunConfig::try_from(&s).is_err());
        s.pattern = None;
        s.flip_prob = Some(2.0);
        assert!(RunConfig::try_from(&s).is_err());
    }

    #[test]
    fn cli_overrides_file() {
        let file = Settings::parse("n = 8\nseed = 1").unwrap();
        let cli = Settings {
            seed: Some(9),
            ..Default::default()
        };
        let merged = cli.or(file);
        assert_eq!((merged.n, merged.seed), (Some(8), Some(9)));
    }
}
