//! Run settings from a flat `key = value` file.
//!
//! Blank lines and lines starting with `#` are skipped. A `profile` line
//! resets the rule constants, so put it first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::ConfigError;
use crate::geometry::{ReducedWord, VertexSet};
use crate::rational::{parse_rational, rational_string};
use crate::rules::RuleParams;
use crate::series::LengthRule;
use crate::subgroup::LengthSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Paper,
    Desk,
}

impl Profile {
    pub fn params(self) -> RuleParams {
        match self {
            Profile::Paper => RuleParams::paper(),
            Profile::Desk => RuleParams::desk(),
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            _ => Err(format!("unknown profile {s:?}, expected paper or desk")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(format!("unknown format {s:?}, expected json or csv")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: RuleParams,
    pub lengths: LengthSequence,
    /// Index set used when a command is not given one.
    pub indices: BTreeSet<u32>,
    pub format: OutputFormat,
    pub precision: usize,
    pub threads: usize,
    pub seed: u64,
    pub length_rule: LengthRule,
    /// Zero set for `classify`; everything else is 1.
    pub zeros: VertexSet,
    /// Where to classify.
    pub origin: ReducedWord,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: RuleParams::paper(),
            lengths: LengthSequence::from_pairs(&[(1, 3), (2, 6)]).expect("increasing"),
            indices: BTreeSet::new(),
            format: OutputFormat::Json,
            precision: 40,
            threads: 1,
            seed: 0,
            length_rule: LengthRule::StrictPaper,
            zeros: VertexSet::new(),
            origin: ReducedWord::identity(),
        }
    }
}

/// `1:3,2:6` or just `3,6` for consecutive indices from 1; surrounding
/// braces are ignored.
pub fn parse_lengths(s: &str) -> Result<LengthSequence, String> {
    let mut map = BTreeMap::new();
    let s = s.trim().trim_start_matches('{').trim_end_matches('}');
    for (i, item) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
        let (n, l) = match item.split_once(':') {
            Some((n, l)) => (n.trim().parse::<u32>().map_err(|e| format!("{item:?}: {e}"))?, l.trim()),
            None => (i as u32 + 1, item),
        };
        let l = l.parse::<u32>().map_err(|e| format!("{item:?}: {e}"))?;
        if map.insert(n, l).is_some() {
            return Err(format!("index {n} given twice"));
        }
    }
    LengthSequence::new(map).map_err(|e| e.to_string())
}

/// Comma separated indices, optionally in brackets; the empty string is the
/// empty set.
pub fn parse_indices(s: &str) -> Result<BTreeSet<u32>, String> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_words(s: &str) -> Result<VertexSet, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<ReducedWord>().map_err(|e| e.to_string()))
        .collect()
}

impl RunConfig {
    pub fn for_profile(profile: Profile) -> Self {
        RunConfig { params: profile.params(), ..RunConfig::default() }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |message: String| ConfigError::InvalidValue { key: key.to_string(), message };
        let num = |v: &str| v.parse::<u64>().map_err(|e| invalid(e.to_string()));
        match key {
            "profile" => {
                let profile: Profile = value.parse().map_err(invalid)?;
                self.params = profile.params();
            }
            "rho" => {
                // derived constants follow the radius unless set afterwards
                let p = RuleParams::with_rho(num(value)? as u32);
                self.params = RuleParams { bad_weight: self.params.bad_weight.clone(), ..p };
            }
            "dogleg_bound" => self.params.dogleg_bound = num(value)? as u32,
            "window" => self.params.window_halfwidth = num(value)? as u32,
            "min_central_vertices" => self.params.min_central_vertices = num(value)? as usize,
            "bad_weight" => {
                self.params.bad_weight = parse_rational(value).ok_or_else(|| invalid(format!("{value:?} is not a rational")))?
            }
            "lengths" => self.lengths = parse_lengths(value).map_err(invalid)?,
            "indices" => self.indices = parse_indices(value).map_err(invalid)?,
            "format" => self.format = value.parse().map_err(invalid)?,
            "precision" => self.precision = num(value)? as usize,
            "threads" => self.threads = (num(value)? as usize).max(1),
            "seed" => self.seed = num(value)?,
            "length_rule" => self.length_rule = value.parse().map_err(invalid)?,
            "zeros" => self.zeros = parse_words(value).map_err(invalid)?,
            "origin" => self.origin = value.parse().map_err(|e: crate::error::GeometryError| invalid(e.to_string()))?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    /// Applies the lines of `text` on top of the current values.
    pub fn apply(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse { line: i + 1, message: format!("expected key = value, got {line:?}") })?;
            self.set(key.trim(), value.trim())?;
        }
        self.params
            .validate()
            .map_err(|e| ConfigError::InvalidValue { key: "params".into(), message: e.to_string() })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rho": self.params.rho,
            "dogleg_bound": self.params.dogleg_bound,
            "window": self.params.window_halfwidth,
            "min_central_vertices": self.params.min_central_vertices,
            "bad_weight": rational_string(&self.params.bad_weight),
            "lengths": self.lengths.iter().map(|(n, l)| json!([n, l])).collect::<Vec<_>>(),
            "indices": self.indices,
            "format": self.format.to_string(),
            "precision": self.precision,
            "threads": self.threads,
            "seed": self.seed,
            "length_rule": self.length_rule.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_paper_constants() {
        let c = RunConfig::default();
        assert_eq!(c.params.rho, 10);
        assert_eq!(c.params.dogleg_bound, 9);
        assert_eq!(c.params.window_halfwidth, 10);
        assert_eq!(c.params.min_central_vertices, 5);
        assert_eq!(rational_string(&c.params.bad_weight), "1/100");
        assert_eq!(RunConfig::for_profile(Profile::Desk).params.rho, 2);
    }

    #[test]
    fn parses_a_file() {
        let c = RunConfig::parse(
            "# desk run\nprofile = desk\nlengths = 1:3, 2:6\nformat=csv\n\nseed = 9\nlength_rule = nullity\nzeros = bbb, bbbb\n",
        )
        .unwrap();
        assert_eq!(c.params, RuleParams::desk());
        assert_eq!(c.lengths.get(2), Some(6));
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.seed, 9);
        assert_eq!(c.length_rule, LengthRule::Nullity);
        assert_eq!(c.zeros.len(), 2);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(RunConfig::parse("rho 3").unwrap_err(), ConfigError::Parse { line: 1, message: "expected key = value, got \"rho 3\"".into() });
        assert_eq!(RunConfig::parse("colour = red").unwrap_err(), ConfigError::UnknownKey("colour".into()));
        assert!(matches!(RunConfig::parse("lengths = 6,3"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::parse("bad_weight = 2"), Err(ConfigError::InvalidValue { .. })));
    }

    #[test]
    fn index_syntax() {
        assert!(parse_indices("").unwrap().is_empty());
        assert_eq!(parse_indices("1, 2").unwrap().into_iter().collect::<Vec<_>>(), vec![1, 2]);
        assert!(parse_indices("x").is_err());
        assert_eq!(parse_lengths("3,6").unwrap(), parse_lengths("1:3,2:6").unwrap());
        assert_eq!(parse_lengths("{1:3, 2:6}").unwrap(), parse_lengths("3,6").unwrap());
        assert_eq!(parse_indices("[1,2]").unwrap(), parse_indices("1,2").unwrap());
    }
}
