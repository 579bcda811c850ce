//! Maximum-likelihood detection at the destination.
//!
//! With `R = L L^H`, the metric `(y_D - wX) R^{-1} (y_D - wX)^H` equals
//! `‖L^{-1}(y_D - wX)^H‖²`. Since `wX = Σ_n (s_n u_n + s_n* v_n)` with
//! `u_n = Σ_k w_k h_k A_k[n,:]` and `v_n = Σ_k w_k h_k* B_k[n,:]`, the
//! whitened residual is `Y - Σ_n (s_n* U_n + s_n V_n)` where capitals denote
//! whitened vectors. All three decoders break ties toward the smallest
//! constellation index (lexicographically smallest vector for the joint one).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ReceivedFrame;
use crate::code::DistributedCode;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Whitener};
use crate::verifier::VerifiedCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodePath {
    SingleSymbol,
    Joint,
    Repetition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Constellation index per symbol slot.
    pub symbols: Vec<usize>,
    /// `N × M` per-slot metrics, when the path produces them.
    pub per_symbol_metrics: Option<Vec<Vec<f64>>>,
    pub path: DecodePath,
    /// Number of metric evaluations performed.
    pub metric_evaluations: u64,
}

/// Default cap on `M^N` for [`joint_ml_decode`].
pub const DEFAULT_JOINT_BUDGET: u64 = 1 << 20;

/// Whitened observation and per-symbol basis vectors for one frame.
struct Whitened {
    y: CVector,
    u: Vec<CVector>,
    v: Vec<CVector>,
}

fn whitened(frame: &ReceivedFrame, code: &DistributedCode, r: &CMatrix) -> Result<Whitened> {
    let t_len = code.length();
    if frame.y_d.len() != t_len || r.nrows() != t_len {
        return Err(Error::DimensionMismatch {
            context: "frame length",
            expected: t_len,
            found: frame.y_d.len(),
        });
    }
    if frame.draw.h.len() != code.n_relays() {
        return Err(Error::DimensionMismatch {
            context: "relay count",
            expected: code.n_relays(),
            found: frame.draw.h.len(),
        });
    }
    let whitener = Whitener::new(r)?;
    let w = frame.w();
    let mut u = Vec::with_capacity(code.n_symbols());
    let mut v = Vec::with_capacity(code.n_symbols());
    for n in 0..code.n_symbols() {
        let mut un = vec![Complex64::new(0.0, 0.0); t_len];
        let mut vn = vec![Complex64::new(0.0, 0.0); t_len];
        for (k, pair) in code.relays().iter().enumerate() {
            let gu = w[k] * frame.draw.h[k];
            let gv = w[k] * frame.draw.h[k].conj();
            for (t, a) in pair.a().row(n).iter().enumerate() {
                if !a.is_zero() {
                    un[t] += gu * a.to_complex();
                }
            }
            for (t, b) in pair.b().row(n).iter().enumerate() {
                if !b.is_zero() {
                    vn[t] += gv * b.to_complex();
                }
            }
        }
        u.push(whitener.whiten(&un));
        v.push(whitener.whiten(&vn));
    }
    Ok(Whitened {
        y: whitener.whiten(&frame.y_d),
        u,
        v,
    })
}

fn residual_norm(y: &CVector, terms: impl Iterator<Item = CVector>) -> f64 {
    let mut e = y.clone();
    for term in terms {
        e -= term;
    }
    e.norm_squared()
}

fn joint(
    frame: &ReceivedFrame,
    code: &DistributedCode,
    constellation: &Constellation,
    budget: u64,
    r: &CMatrix,
) -> Result<DecodeResult> {
    let n = code.n_symbols();
    let m = constellation.size();
    let total = (m as f64).powi(n as i32);
    if total > budget as f64 {
        return Err(Error::BudgetExceeded {
            bound: total,
            budget: budget as f64,
        });
    }
    let wd = whitened(frame, code, r)?;
    let pts = constellation.points();
    let mut idx = vec![0usize; n];
    let mut best = (f64::INFINITY, idx.clone());
    let mut evals = 0u64;
    loop {
        let metric = residual_norm(
            &wd.y,
            (0..n).map(|i| {
                let c = pts[idx[i]];
                &wd.u[i] * c.conj() + &wd.v[i] * c
            }),
        );
        evals += 1;
        if metric < best.0 {
            best = (metric, idx.clone());
        }
        // odometer with the last slot fastest, so visits are lexicographic
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(DecodeResult {
                    symbols: best.1,
                    per_symbol_metrics: None,
                    path: DecodePath::Joint,
                    metric_evaluations: evals,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Exhaustive ML over all `M^N` symbol vectors; the reference decoder.
///
/// Works for any code, verified or not. Fails with
/// [`Error::BudgetExceeded`] when `M^N > budget`.
pub fn joint_ml_decode(
    frame: &ReceivedFrame,
    code: &DistributedCode,
    constellation: &Constellation,
    budget: u64,
) -> Result<DecodeResult> {
    joint(frame, code, constellation, budget, &frame.r)
}

/// [`joint_ml_decode`] with `R` replaced by the identity, i.e. a detector
/// that ignores the relay-amplified noise correlation.
pub fn joint_ml_decode_unwhitened(
    frame: &ReceivedFrame,
    code: &DistributedCode,
    constellation: &Constellation,
    budget: u64,
) -> Result<DecodeResult> {
    let t = code.length();
    joint(frame, code, constellation, budget, &CMatrix::identity(t, t))
}

/// Per-slot ML: slot `n` is decided from the full metric at `c·e_n`.
///
/// Exactly `N·M` metric evaluations. Only sound for orthogonal codes, which
/// the [`VerifiedCode`] argument guarantees.
pub fn single_symbol_ml_decode(
    frame: &ReceivedFrame,
    code: &VerifiedCode,
    constellation: &Constellation,
) -> Result<DecodeResult> {
    let wd = whitened(frame, code.code(), &frame.r)?;
    let n = code.n_symbols();
    let mut symbols = Vec::with_capacity(n);
    let mut metrics = Vec::with_capacity(n);
    let mut evals = 0u64;
    for i in 0..n {
        let row: Vec<f64> = constellation
            .points()
            .iter()
            .map(|c| {
                evals += 1;
                residual_norm(&wd.y, std::iter::once(&wd.u[i] * c.conj() + &wd.v[i] * *c))
            })
            .collect();
        symbols.push(argmin(&row));
        metrics.push(row);
    }
    Ok(DecodeResult {
        symbols,
        per_symbol_metrics: Some(metrics),
        path: DecodePath::SingleSymbol,
        metric_evaluations: evals,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Maximal-ratio combining of the `K` copies of each symbol, then scalar ML.
///
/// Copy `k` of `s_n` sits in slot `kN + n` with gain `g_k = ρ_k f_k h_k` and
/// noise variance `σ_k² = 1 + |ρ_k f_k|²`. The metric
/// `G|c|² - 2 Re(c* z)` with `z = Σ_k g_k* y_k / σ_k²` and
/// `G = Σ_k |g_k|² / σ_k²` differs from `Σ_k |y_k - g_k c|² / σ_k²` by a
/// candidate-independent constant.
pub fn repetition_ml_decode(
    frame: &ReceivedFrame,
    k: usize,
    constellation: &Constellation,
) -> Result<DecodeResult> {
    if k == 0 || frame.y_d.len() % k != 0 || frame.draw.h.len() != k {
        return Err(Error::DimensionMismatch {
            context: "repetition frame",
            expected: k,
            found: frame.draw.h.len(),
        });
    }
    let n = frame.y_d.len() / k;
    let w = frame.w();
    let mut symbols = Vec::with_capacity(n);
    let mut metrics = Vec::with_capacity(n);
    let mut evals = 0u64;
    for i in 0..n {
        let mut z = Complex64::new(0.0, 0.0);
        let mut gain = 0.0;
        for relay in 0..k {
            let g = w[relay] * frame.draw.h[relay];
            let var = 1.0 + w[relay].norm_sqr();
            z += g.conj() * frame.y_d[relay * n + i] / var;
            gain += g.norm_sqr() / var;
        }
        let row: Vec<f64> = constellation
            .points()
            .iter()
            .map(|c| {
                evals += 1;
                gain * c.norm_sqr() - 2.0 * (c.conj() * z).re
            })
            .collect();
        symbols.push(argmin(&row));
        metrics.push(row);
    }
    Ok(DecodeResult {
        symbols,
        per_symbol_metrics: Some(metrics),
        path: DecodePath::Repetition,
        metric_evaluations: evals,
    })
}
