//! Monte-Carlo bit-error-rate sweeps.
//!
//! Frames are simulated in fixed-size chunks; chunk `c` of SNR point `p` draws
//! from substream `(seed, p, c)`, so counts do not depend on thread
//! scheduling. With a target error count, chunks run in batches and the point
//! stops after the first batch that reaches the target.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{simulate_dostbc_frame, simulate_repetition_frame, PowerConfig, Scheme};
use crate::constellation::Constellation;
use crate::decoder::{repetition_ml_decode, single_symbol_ml_decode};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::rng::substream;
use crate::verifier::{VerifiedCode, VerifyOptions};

/// Frames per work unit.
pub const CHUNK_FRAMES: u64 = 1000;
/// Work units evaluated between stop-rule checks.
const BATCH_CHUNKS: u64 = 32;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// One SNR point. `ci_low`/`ci_high` are the 95% Wilson score interval for
/// the bit error probability over `trials · bits_per_frame` bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerPoint {
    pub fn new(snr_db: f64, trials: u64, bit_errors: u64, bits_per_frame: u64) -> Self {
        let bits = trials * bits_per_frame;
        let (ci_low, ci_high) = wilson_interval(bit_errors, bits);
        BerPoint {
            snr_db,
            trials,
            bit_errors,
            ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
            ci_low,
            ci_high,
        }
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials; `(0, 1)` when
/// `n = 0`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let low = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// Everything about a curve that is not per-point data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub constellation: String,
    pub bits_per_frame: u64,
    pub per_relay_scale: Vec<f64>,
    pub seed: u64,
    pub min_errors: u64,
    /// SHA-256 of the JSON-serialized config.
    pub config_hash: String,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub meta: CurveMeta,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    /// Points below the configured minimum error count.
    pub fn unreliable(&self) -> impl Iterator<Item = &BerPoint> {
        self.points.iter().filter(|p| p.bit_errors < self.meta.min_errors)
    }

    /// CSV with header `snr_db,trials,bit_errors,ber,ci_low,ci_high`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p).map_err(csv_error)?;
        }
        if self.points.is_empty() {
            w.write_record(["snr_db", "trials", "bit_errors", "ber", "ci_low", "ci_high"])
                .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Writes `path` and the metadata sidecar `path.meta.json`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_csv(std::fs::File::create(path)?)?;
        std::fs::write(meta_path(path), serde_json::to_string_pretty(&self.meta)?)?;
        Ok(())
    }

    /// Reads CSV points. Metadata comes from the sidecar if present,
    /// otherwise `meta` is `None`.
    pub fn load_points(path: impl AsRef<Path>) -> Result<(Vec<BerPoint>, Option<CurveMeta>)> {
        let path = path.as_ref();
        let points = read_points(std::fs::File::open(path)?)?;
        let meta_file = meta_path(path);
        let meta = if meta_file.exists() {
            Some(serde_json::from_str(&std::fs::read_to_string(meta_file)?)?)
        } else {
            None
        };
        Ok((points, meta))
    }
}

pub fn read_points<R: Read>(input: R) -> Result<Vec<BerPoint>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    s.into()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

enum Link {
    Dostbc(VerifiedCode),
    Repetition { n: usize, k: usize },
}

impl Link {
    /// Bit errors over `frames` frames from `rng`.
    fn run_chunk<R: Rng>(&self, c: &Constellation, power: &PowerConfig, frames: u64, rng: &mut R) -> Result<u64> {
        let m = c.size();
        let n = match self {
            Link::Dostbc(code) => code.n_symbols(),
            Link::Repetition { n, .. } => *n,
        };
        let mut errors = 0u64;
        for _ in 0..frames {
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
            let s: Vec<Complex64> = labels.iter().map(|l| c.point(*l)).collect();
            let decoded = match self {
                Link::Dostbc(code) => {
                    let frame = simulate_dostbc_frame(code, &s, power, rng, true)?;
                    single_symbol_ml_decode(&frame, code, c)?.symbols
                }
                Link::Repetition { k, .. } => {
                    let frame = simulate_repetition_frame(*k, &s, power, rng, true)?;
                    repetition_ml_decode(&frame, *k, c)?.symbols
                }
            };
            errors += labels
                .iter()
                .zip(&decoded)
                .map(|(a, b)| (a ^ b).count_ones() as u64)
                .sum::<u64>();
        }
        Ok(errors)
    }
}

fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_vec(config)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Runs the sweep described by `config`.
///
/// The distributed code must pass verification; the constellation must meet
/// the `bps` target unless `config.force` is set.
pub fn run_ber(config: &ExperimentConfig) -> Result<BerCurve> {
    let started = Instant::now();
    let constellation = config.resolve_constellation()?;
    let scale = config.power_scale()?;
    let link = match config.scheme {
        Scheme::Dostbc => Link::Dostbc(VerifiedCode::new(config.dostbc_code()?, &VerifyOptions::default())?),
        Scheme::Repetition => Link::Repetition {
            n: config.n,
            k: config.k,
        },
    };
    let bits_per_frame = config.n as u64 * constellation.bits_per_symbol() as u64;
    let mut points = Vec::new();
    let grid = if config.trials == 0 { Vec::new() } else { config.snr.points() };
    for (p_idx, snr_db) in grid.into_iter().enumerate() {
        let power = PowerConfig::from_snr_db(snr_db, scale.clone());
        let c = constellation.scaled(power.es);
        let total_chunks = config.trials.div_ceil(CHUNK_FRAMES);
        let chunk_frames = |i: u64| CHUNK_FRAMES.min(config.trials - i * CHUNK_FRAMES);
        let batch = if config.target_errors.is_some() {
            BATCH_CHUNKS
        } else {
            total_chunks.max(1)
        };
        let (mut trials, mut errors) = (0u64, 0u64);
        let mut next = 0u64;
        while next < total_chunks {
            let end = (next + batch).min(total_chunks);
            let results: Vec<Result<u64>> = (next..end)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(config.seed, p_idx as u64, i);
                    link.run_chunk(&c, &power, chunk_frames(i), &mut rng)
                })
                .collect();
            for r in results {
                errors += r?;
            }
            trials += (next..end).map(chunk_frames).sum::<u64>();
            next = end;
            if config.target_errors.is_some_and(|t| errors >= t) {
                break;
            }
        }
        points.push(BerPoint::new(snr_db, trials, errors, bits_per_frame));
    }
    Ok(BerCurve {
        meta: CurveMeta {
            scheme: config.scheme,
            n: config.n,
            k: config.k,
            constellation: constellation.name().to_string(),
            bits_per_frame,
            per_relay_scale: scale,
            seed: config.seed,
            min_errors: config.min_errors,
            config_hash: config_hash(config)?,
            runtime_s: started.elapsed().as_secs_f64(),
        },
        points,
    })
}
