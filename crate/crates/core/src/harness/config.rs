//! Experiment configuration and bandwidth-efficiency pairing.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::channel::Scheme;
use crate::code::DistributedCode;
use crate::codebook::construct;
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// SNR sweep `start:step:stop` in dB, inclusive of `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.step <= 0.0 {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as i64 + 1;
        (0..count.max(0)).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl Default for SnrGrid {
    fn default() -> Self {
        SnrGrid {
            start: 0.0,
            step: 2.0,
            stop: 24.0,
        }
    }
}

impl FromStr for SnrGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad SNR grid {s:?}")))
        };
        match parts.as_slice() {
            [single] => {
                let v = num(single)?;
                Ok(SnrGrid {
                    start: v,
                    step: 0.0,
                    stop: v,
                })
            }
            [a, b, c] => {
                let grid = SnrGrid {
                    start: num(a)?,
                    step: num(b)?,
                    stop: num(c)?,
                };
                if grid.step <= 0.0 || grid.stop < grid.start {
                    return Err(Error::Config(format!("bad SNR grid {s:?}")));
                }
                Ok(grid)
            }
            _ => Err(Error::Config(format!("bad SNR grid {s:?}, want start:step:stop"))),
        }
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

/// How relay per-use power is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "scale")]
pub enum PowerPairing {
    /// Every relay transmits `E_r` per use.
    Uniform,
    /// Repetition relays match the per-slot average power each relay spends
    /// under the distributed code of the same `(N, K)`.
    MatchDostbc,
    /// Explicit per-relay multipliers of `E_r`.
    Custom(Vec<f64>),
}

/// Per-use power multipliers that give each repetition relay the same
/// average power per relay slot as under `code`.
///
/// Relay `k` of `code` transmits in `uses_k` of `T` slots at per-use `E_r`;
/// in the repetition scheme it transmits in `N` of `NK` slots, so its per-use
/// multiplier is `K · uses_k / T`.
pub fn repetition_power_scale(code: &DistributedCode) -> Vec<f64> {
    let k = code.n_relays() as f64;
    let t = code.length() as f64;
    code.relays().iter().map(|p| k * p.uses() as f64 / t).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    /// Code file for the distributed scheme; the systematic construction for
    /// `(n, k)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_path: Option<PathBuf>,
    /// Explicit constellation; derived from `bps` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constellation: Option<String>,
    /// Target bandwidth efficiency in bits per relay slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bps: Option<f64>,
    #[serde(default)]
    pub snr: SnrGrid,
    /// Frames per SNR point (upper limit when `target_errors` is set).
    pub trials: u64,
    /// Stop a point early once this many bit errors are collected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_errors: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pairing")]
    pub power: PowerPairing,
    /// Points with fewer bit errors are flagged as unreliable.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    /// Accept a constellation whose bandwidth efficiency differs from `bps`.
    #[serde(default)]
    pub force: bool,
}

fn default_pairing() -> PowerPairing {
    PowerPairing::MatchDostbc
}

fn default_min_errors() -> u64 {
    200
}

impl ExperimentConfig {
    pub fn new(scheme: Scheme, n: usize, k: usize) -> Self {
        ExperimentConfig {
            scheme,
            n,
            k,
            code_path: None,
            constellation: None,
            bps: Some(1.0),
            snr: SnrGrid::default(),
            trials: 100_000,
            target_errors: None,
            seed: 42,
            power: PowerPairing::MatchDostbc,
            min_errors: default_min_errors(),
            force: false,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The distributed code this experiment refers to, whatever the scheme;
    /// the repetition scheme uses it for power matching.
    pub fn dostbc_code(&self) -> Result<DistributedCode> {
        let code = match &self.code_path {
            Some(p) => DistributedCode::load(p)?,
            None => construct(self.n, self.k)?,
        };
        if code.n_symbols() != self.n || code.n_relays() != self.k {
            return Err(Error::Config(format!(
                "code file has N = {}, K = {} but the config says N = {}, K = {}",
                code.n_symbols(),
                code.n_relays(),
                self.n,
                self.k
            )));
        }
        Ok(code)
    }

    /// Rate of the configured scheme.
    pub fn rate(&self) -> Result<Ratio<u64>> {
        match self.scheme {
            Scheme::Dostbc => Ok(self.dostbc_code()?.rate()),
            Scheme::Repetition => Ok(Ratio::new(1, self.k as u64)),
        }
    }

    /// Constellation for the configured scheme, checked against `bps`.
    pub fn resolve_constellation(&self) -> Result<Constellation> {
        let rate = self.rate()?;
        let named = self.constellation.as_deref().map(Constellation::by_name).transpose()?;
        match (named, self.bps) {
            (Some(c), Some(bps)) => {
                let achieved = rate * Ratio::from_integer(c.bits_per_symbol() as u64);
                if !self.force && ratio_to_f64(achieved) != bps {
                    return Err(Error::InfeasiblePairing(format!(
                        "{} at rate {rate} gives {achieved} bps/Hz, not {bps}",
                        c.name()
                    )));
                }
                Ok(c)
            }
            (Some(c), None) => Ok(c),
            (None, Some(bps)) => Ok(Constellation::with_size(1 << bits_for_rate(rate, bps)?)?),
            (None, None) => Err(Error::Config("need a constellation or a bps target".into())),
        }
    }

    /// Per-relay multipliers of `E_r` for this scheme.
    pub fn power_scale(&self) -> Result<Vec<f64>> {
        let scale = match (&self.power, self.scheme) {
            (PowerPairing::Custom(s), _) => s.clone(),
            (PowerPairing::Uniform, _) | (PowerPairing::MatchDostbc, Scheme::Dostbc) => vec![1.0; self.k],
            (PowerPairing::MatchDostbc, Scheme::Repetition) => repetition_power_scale(&self.dostbc_code()?),
        };
        if scale.len() != self.k {
            return Err(Error::DimensionMismatch {
                context: "per-relay power scale",
                expected: self.k,
                found: scale.len(),
            });
        }
        Ok(scale)
    }
}

fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Bits per symbol `b` with `rate · b = bps`; an error names the fractional
/// exponent when `b` is not an integer.
pub fn bits_for_rate(rate: Ratio<u64>, bps: f64) -> Result<u32> {
    if !(bps > 0.0) {
        return Err(Error::InvalidParameters(format!("bps must be positive, got {bps}")));
    }
    let bps_ratio = Ratio::<i64>::approximate_float(bps)
        .filter(|r| *r.numer() > 0)
        .ok_or_else(|| Error::InvalidParameters(format!("bps {bps} is not representable")))?;
    let bps_ratio = Ratio::new(*bps_ratio.numer() as u64, *bps_ratio.denom() as u64);
    let bits = bps_ratio / rate;
    if !bits.is_integer() {
        return Err(Error::InfeasiblePairing(format!(
            "rate {rate} at {bps} bps/Hz needs a 2^{{{bits}}}-point constellation"
        )));
    }
    Ok(*bits.numer() as u32)
}

/// One side of a bandwidth-efficiency comparison.
#[derive(Debug, Clone)]
pub struct PairedScheme {
    pub rate: Ratio<u64>,
    pub constellation: Constellation,
}

/// Constellations giving both schemes `target_bps`: the distributed code at
/// the row-monomial systematic rate and repetition at `1/K`.
pub fn pair_constellations(n: usize, k: usize, target_bps: f64) -> Result<(PairedScheme, PairedScheme)> {
    let code = construct(n, k)?;
    let rate_d = code.rate();
    let rate_r = Ratio::new(1, k as u64);
    let bits_d = bits_for_rate(rate_d, target_bps)?;
    let bits_r = bits_for_rate(rate_r, target_bps)?;
    debug_assert_eq!(rate_d * bits_d as u64, rate_r * bits_r as u64);
    Ok((
        PairedScheme {
            rate: rate_d,
            constellation: Constellation::with_size(1 << bits_d)?,
        },
        PairedScheme {
            rate: rate_r,
            constellation: Constellation::with_size(1 << bits_r)?,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: SnrGrid = "0:2:24".parse().unwrap();
        assert_eq!(g.points().len(), 13);
        assert_eq!(g.points()[12], 24.0);
        assert_eq!("7".parse::<SnrGrid>().unwrap().points(), vec![7.0]);
        assert!("1:2".parse::<SnrGrid>().is_err());
        assert!("5:1:0".parse::<SnrGrid>().is_err());
    }

    #[test]
    fn pairings() {
        let (d, r) = pair_constellations(4, 4, 1.0).unwrap();
        assert_eq!((d.constellation.name(), r.constellation.name()), ("qpsk", "16qam"));
        let (d, r) = pair_constellations(5, 5, 1.0).unwrap();
        assert_eq!((d.constellation.name(), r.constellation.name()), ("8psk", "32qam"));
        let (d, r) = pair_constellations(4, 4, 2.0).unwrap();
        assert_eq!((d.constellation.name(), r.constellation.name()), ("16qam", "256qam"));
        let err = pair_constellations(5, 4, 1.0).unwrap_err().to_string();
        assert!(err.contains("2^{12/5}"), "{err}");
    }

    #[test]
    fn repetition_power_profiles() {
        assert_eq!(repetition_power_scale(&construct(4, 4).unwrap()), vec![2.0; 4]);
        let s = repetition_power_scale(&construct(5, 5).unwrap());
        let thirds = s.iter().filter(|v| (**v - 5.0 / 3.0).abs() < 1e-12).count();
        let twos = s.iter().filter(|v| (**v - 2.0).abs() < 1e-12).count();
        assert_eq!((thirds, twos), (1, 4));
    }

    #[test]
    fn config_roundtrip_and_checks() {
        let mut cfg = ExperimentConfig::new(Scheme::Repetition, 4, 4);
        cfg.constellation = Some("qpsk".into());
        assert!(matches!(cfg.resolve_constellation(), Err(Error::InfeasiblePairing(_))));
        cfg.force = true;
        assert_eq!(cfg.resolve_constellation().unwrap().name(), "qpsk");
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.power_scale().unwrap(), vec![2.0; 4]);
    }
}
