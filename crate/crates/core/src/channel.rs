//! Two-hop amplify-and-forward transmission.
//!
//! The source broadcasts `s` to every relay (`y_k = h_k s + n_k`), relay `k`
//! sends `x_k = ρ_k (y_k A_k + y_k* B_k)`, and the destination observes
//! `y_D = Σ_k f_k x_k + n_D = w X + n`. All noises are unit-variance
//! circularly-symmetric complex Gaussian. There is no direct source link.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::DistributedCode;
use crate::codebook::repetition_layout;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::complex_gaussian;
use crate::verifier::noise_covariance;

/// One realization of source→relay (`h`) and relay→destination (`f`) gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDraw {
    pub h: Vec<Complex64>,
    pub f: Vec<Complex64>,
}

impl ChannelDraw {
    /// All `|f_k|` non-zero and pairwise distinct.
    pub fn is_generic(&self) -> bool {
        let mags: Vec<f64> = self.f.iter().map(|v| v.norm_sqr()).collect();
        mags.iter().all(|m| *m > 0.0)
            && mags
                .iter()
                .enumerate()
                .all(|(i, a)| mags[i + 1..].iter().all(|b| a != b))
    }
}

/// `2K` independent unit-variance complex Gaussian gains.
pub fn draw_channels<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ChannelDraw {
    ChannelDraw {
        h: (0..k).map(|_| complex_gaussian(rng, 1.0)).collect(),
        f: (0..k).map(|_| complex_gaussian(rng, 1.0)).collect(),
    }
}

/// Source symbol power and relay per-use power.
///
/// Relay `k` transmits with per-use power `er · per_relay_scale[k]`, which
/// fixes its amplification at `ρ_k = √(er · scale_k / (1 + es))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub es: f64,
    pub er: f64,
    pub per_relay_scale: Vec<f64>,
}

impl PowerConfig {
    pub fn uniform(es: f64, er: f64, k: usize) -> Self {
        PowerConfig {
            es,
            er,
            per_relay_scale: vec![1.0; k],
        }
    }

    /// `E_s = E_r = 10^(snr_db/10)` with unit-variance noise.
    pub fn from_snr_db(snr_db: f64, scale: Vec<f64>) -> Self {
        let p = 10f64.powf(snr_db / 10.0);
        PowerConfig {
            es: p,
            er: p,
            per_relay_scale: scale,
        }
    }

    pub fn rho(&self, k: usize) -> f64 {
        (self.er * self.per_relay_scale[k] / (1.0 + self.es)).sqrt()
    }

    pub fn rho_profile(&self) -> Vec<f64> {
        (0..self.per_relay_scale.len()).map(|k| self.rho(k)).collect()
    }

    fn validate(&self, k: usize) -> Result<()> {
        if self.per_relay_scale.len() != k {
            return Err(Error::DimensionMismatch {
                context: "per-relay power scale",
                expected: k,
                found: self.per_relay_scale.len(),
            });
        }
        if !(self.es >= 0.0 && self.er >= 0.0) || self.per_relay_scale.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidParameters("powers must be non-negative, scales positive".into()));
        }
        Ok(())
    }
}

/// Which transmission layout produced a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Dostbc,
    Repetition,
}

/// Destination observation plus the context needed to decode it.
#[derive(Debug, Clone)]
pub struct ReceivedFrame {
    pub y_d: Vec<Complex64>,
    pub draw: ChannelDraw,
    /// Per-relay amplification `ρ_k`.
    pub rho: Vec<f64>,
    /// Noise covariance `R` for this draw.
    pub r: CMatrix,
    /// What each relay put on the air, `K` rows of `T` samples.
    pub relay_signals: Vec<Vec<Complex64>>,
    pub scheme: Scheme,
}

impl ReceivedFrame {
    /// `w = [ρ_1 f_1, …, ρ_K f_K]`.
    pub fn w(&self) -> Vec<Complex64> {
        self.draw.f.iter().zip(&self.rho).map(|(f, r)| f * *r).collect()
    }
}

/// `x_k = ρ_k (y_k A_k + y_k* B_k)` for relay `k` of `code`.
pub fn relay_encode(code: &DistributedCode, k: usize, y_k: &[Complex64], rho_k: f64) -> Vec<Complex64> {
    code.relay(k).encode(y_k).into_iter().map(|v| v * rho_k).collect()
}

/// Runs one frame through a fixed channel draw.
pub fn simulate_frame_with_draw<R: Rng + ?Sized>(
    code: &DistributedCode,
    s: &[Complex64],
    power: &PowerConfig,
    draw: ChannelDraw,
    rng: &mut R,
    noise_enabled: bool,
    scheme: Scheme,
) -> Result<ReceivedFrame> {
    let k_len = code.n_relays();
    power.validate(k_len)?;
    if s.len() != code.n_symbols() {
        return Err(Error::DimensionMismatch {
            context: "symbol vector",
            expected: code.n_symbols(),
            found: s.len(),
        });
    }
    let rho = power.rho_profile();
    let mut y_d = vec![Complex64::new(0.0, 0.0); code.length()];
    let mut relay_signals = Vec::with_capacity(k_len);
    for k in 0..k_len {
        let y_k: Vec<Complex64> = s
            .iter()
            .map(|sym| {
                let noise = if noise_enabled {
                    complex_gaussian(rng, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                draw.h[k] * sym + noise
            })
            .collect();
        let x_k = relay_encode(code, k, &y_k, rho[k]);
        for (acc, x) in y_d.iter_mut().zip(&x_k) {
            *acc += draw.f[k] * x;
        }
        relay_signals.push(x_k);
    }
    if noise_enabled {
        for v in &mut y_d {
            *v += complex_gaussian(rng, 1.0);
        }
    }
    let r = noise_covariance(code, &draw.f, &rho)?;
    Ok(ReceivedFrame {
        y_d,
        draw,
        rho,
        r,
        relay_signals,
        scheme,
    })
}

/// One distributed-code frame over a freshly drawn channel.
pub fn simulate_dostbc_frame<R: Rng + ?Sized>(
    code: &DistributedCode,
    s: &[Complex64],
    power: &PowerConfig,
    rng: &mut R,
    noise_enabled: bool,
) -> Result<ReceivedFrame> {
    let draw = draw_channels(code.n_relays(), rng);
    simulate_frame_with_draw(code, s, power, draw, rng, noise_enabled, Scheme::Dostbc)
}

/// One repetition frame: relay `k` forwards `s_1..s_N` alone in slots
/// `kN..(k+1)N`, so `T = NK` and `R` is diagonal.
pub fn simulate_repetition_frame<R: Rng + ?Sized>(
    k: usize,
    s: &[Complex64],
    power: &PowerConfig,
    rng: &mut R,
    noise_enabled: bool,
) -> Result<ReceivedFrame> {
    let layout = repetition_layout(s.len(), k)?;
    let draw = draw_channels(k, rng);
    simulate_frame_with_draw(&layout, s, power, draw, rng, noise_enabled, Scheme::Repetition)
}
