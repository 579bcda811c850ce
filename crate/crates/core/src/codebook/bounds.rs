//! Data-rate upper bounds for general and row-monomial codes.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which class of code a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFamily {
    Dostbc,
    RowMonomial,
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundFamily::Dostbc => "dostbc",
            BoundFamily::RowMonomial => "row-monomial",
        })
    }
}

impl std::str::FromStr for BoundFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dostbc" => Ok(BoundFamily::Dostbc),
            "row-monomial" | "row_monomial" => Ok(BoundFamily::RowMonomial),
            other => Err(Error::InvalidParameters(format!(
                "unknown bound family {other:?}"
            ))),
        }
    }
}

/// A rate bound kept in unreduced `N / T_min` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RateBound {
    pub numerator: u64,
    pub denominator: u64,
    pub family: BoundFamily,
}

impl RateBound {
    /// The reduced rational value.
    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }

    /// Smallest admissible code length implied by the bound.
    pub fn min_length(&self) -> u64 {
        self.denominator
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for RateBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// `N / ⌈NK/2⌉`, valid for any orthogonal distributed code.
pub fn rate_bound_dostbc(n: usize, k: usize) -> Result<RateBound> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameters(format!(
            "rate bound needs N, K >= 1, got N = {n}, K = {k}"
        )));
    }
    let (n, k) = (n as u64, k as u64);
    Ok(RateBound {
        numerator: n,
        denominator: (n * k).div_ceil(2),
        family: BoundFamily::Dostbc,
    })
}

/// Minimal length of a row-monomial code for `N, K >= 2`, piecewise in the
/// parity decomposition `N = 2l (+1)`, `K = 2m (+1)`.
pub fn min_length_row_monomial(n: usize, k: usize) -> Result<u64> {
    if n < 2 || k < 2 {
        return Err(Error::InvalidParameters(format!(
            "row-monomial bound needs N >= 2 and K >= 2, got N = {n}, K = {k}"
        )));
    }
    let (l, m) = ((n / 2) as u64, (k / 2) as u64);
    Ok(match (n % 2 == 0, k % 2 == 0) {
        (true, true) => 2 * l * m,
        (false, true) => 2 * l * m + 2 * m,
        (true, false) => 2 * l * m + 2 * l,
        (false, false) => (2 * l * m + 2 * m + l + 1).max(2 * l * m + 2 * l + m + 1),
    })
}

/// Row-monomial bound as `N / T_min`; equals `1/m`, `(2l+1)/(2lm+2m)`,
/// `1/(m+1)` or the smaller of the two odd/odd ratios.
pub fn rate_bound_row_monomial(n: usize, k: usize) -> Result<RateBound> {
    Ok(RateBound {
        numerator: n as u64,
        denominator: min_length_row_monomial(n, k)?,
        family: BoundFamily::RowMonomial,
    })
}

pub fn rate_bound(n: usize, k: usize, family: BoundFamily) -> Result<RateBound> {
    match family {
        BoundFamily::Dostbc => rate_bound_dostbc(n, k),
        BoundFamily::RowMonomial => rate_bound_row_monomial(n, k),
    }
}

/// Rate of the repetition-based strategy, `1/K`.
pub fn repetition_rate(k: usize) -> Ratio<u64> {
    Ratio::new(1, k as u64)
}
