//! Exact arithmetic over the unit alphabet `{0, ±1, ±j}`.
//!
//! Relay matrices only ever hold these five values, so every channel-free
//! orthogonality condition can be evaluated in Gaussian integers without
//! rounding.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One entry of a relay encoding matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum GaussianUnit {
    #[default]
    Zero,
    One,
    MinusOne,
    J,
    MinusJ,
}

impl GaussianUnit {
    /// The four non-zero units in canonical order.
    pub const NONZERO: [GaussianUnit; 4] = [
        GaussianUnit::One,
        GaussianUnit::MinusOne,
        GaussianUnit::J,
        GaussianUnit::MinusJ,
    ];

    pub fn is_zero(self) -> bool {
        self == GaussianUnit::Zero
    }

    pub fn to_gaussian(self) -> GaussianInt {
        match self {
            GaussianUnit::Zero => GaussianInt::new(0, 0),
            GaussianUnit::One => GaussianInt::new(1, 0),
            GaussianUnit::MinusOne => GaussianInt::new(-1, 0),
            GaussianUnit::J => GaussianInt::new(0, 1),
            GaussianUnit::MinusJ => GaussianInt::new(0, -1),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        let g = self.to_gaussian();
        Complex64::new(g.re as f64, g.im as f64)
    }

    pub fn conj(self) -> GaussianUnit {
        match self {
            GaussianUnit::J => GaussianUnit::MinusJ,
            GaussianUnit::MinusJ => GaussianUnit::J,
            u => u,
        }
    }

    /// Exact conversion back from a Gaussian integer, if it is a unit or zero.
    pub fn from_gaussian(g: GaussianInt) -> Option<GaussianUnit> {
        match (g.re, g.im) {
            (0, 0) => Some(GaussianUnit::Zero),
            (1, 0) => Some(GaussianUnit::One),
            (-1, 0) => Some(GaussianUnit::MinusOne),
            (0, 1) => Some(GaussianUnit::J),
            (0, -1) => Some(GaussianUnit::MinusJ),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GaussianUnit::Zero => "0",
            GaussianUnit::One => "1",
            GaussianUnit::MinusOne => "-1",
            GaussianUnit::J => "j",
            GaussianUnit::MinusJ => "-j",
        }
    }
}

impl Neg for GaussianUnit {
    type Output = GaussianUnit;

    fn neg(self) -> GaussianUnit {
        match self {
            GaussianUnit::Zero => GaussianUnit::Zero,
            GaussianUnit::One => GaussianUnit::MinusOne,
            GaussianUnit::MinusOne => GaussianUnit::One,
            GaussianUnit::J => GaussianUnit::MinusJ,
            GaussianUnit::MinusJ => GaussianUnit::J,
        }
    }
}

impl Mul for GaussianUnit {
    type Output = GaussianUnit;

    fn mul(self, rhs: GaussianUnit) -> GaussianUnit {
        // closed under multiplication
        GaussianUnit::from_gaussian(self.to_gaussian() * rhs.to_gaussian())
            .expect("product of units is a unit")
    }
}

impl fmt::Display for GaussianUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GaussianUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "0" => Ok(GaussianUnit::Zero),
            "1" | "+1" => Ok(GaussianUnit::One),
            "-1" => Ok(GaussianUnit::MinusOne),
            "j" | "+j" => Ok(GaussianUnit::J),
            "-j" => Ok(GaussianUnit::MinusJ),
            other => Err(Error::InvalidEntry(other.to_string())),
        }
    }
}

impl Serialize for GaussianUnit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for GaussianUnit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Gaussian integer `re + j·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }
}

impl Add for GaussianInt {
    type Output = GaussianInt;

    fn add(self, rhs: GaussianInt) -> GaussianInt {
        GaussianInt::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for GaussianInt {
    fn add_assign(&mut self, rhs: GaussianInt) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Mul for GaussianInt {
    type Output = GaussianInt;

    fn mul(self, rhs: GaussianInt) -> GaussianInt {
        GaussianInt::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}j"),
            (re, im) if im < 0 => write!(f, "{re}-{}j", -im),
            (re, im) => write!(f, "{re}+{im}j"),
        }
    }
}
