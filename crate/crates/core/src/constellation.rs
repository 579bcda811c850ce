//! Gray-labelled PSK and QAM constellations.
//!
//! Points are stored indexed by their bit label, so a decoded index is also
//! the decoded bit pattern. Every table is normalized to unit average energy;
//! [`Constellation::scaled`] applies `√E_s`.
//!
//! Layouts:
//! - `M`-PSK: label `gray(i)` sits at phase `2πi/M`, rotated by `π/4` for QPSK.
//! - Square `M`-QAM: `label = gray(I index) << b | gray(Q index)` on the odd
//!   integer grid, `b = log2(M)/2`.
//! - 32-QAM (cross): built from the 8×4 Gray grid `I ∈ {±1,±3,±5,±7}`,
//!   `Q ∈ {±1,±3}` with `label = gray3(I index) << 2 | gray2(Q index)`; the
//!   eight points with `|I| = 7` move to `(sign(I)·(4 - |Q|), sign(Q)·5)`,
//!   giving the 6×6-minus-corners cross. Labels are quasi-Gray: adjacent
//!   points differ in one bit except across the moved outer points.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: u32,
}

fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

fn normalized(points: Vec<Complex64>) -> Vec<Complex64> {
    let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    let s = energy.sqrt();
    points.into_iter().map(|p| p / s).collect()
}

impl Constellation {
    pub fn psk(m: usize) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::UnknownConstellation(format!("{m}-PSK")));
        }
        let offset = if m == 4 { PI / 4.0 } else { 0.0 };
        let mut points = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m as u32 {
            let phase = offset + 2.0 * PI * i as f64 / m as f64;
            points[gray(i) as usize] = Complex64::from_polar(1.0, phase);
        }
        let name = match m {
            2 => "bpsk".to_string(),
            4 => "qpsk".to_string(),
            _ => format!("{m}psk"),
        };
        Ok(Constellation {
            name,
            points,
            bits_per_symbol: m.trailing_zeros(),
        })
    }

    /// Square QAM for `M = 4^b`, `M >= 4`.
    pub fn square_qam(m: usize) -> Result<Self> {
        let bits = m.trailing_zeros();
        if m < 4 || !m.is_power_of_two() || bits % 2 != 0 {
            return Err(Error::UnknownConstellation(format!("{m}-QAM")));
        }
        let half = bits / 2;
        let side = 1u32 << half;
        let mut points = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..side {
            for q in 0..side {
                let label = (gray(i) << half) | gray(q);
                let re = 2.0 * i as f64 - (side - 1) as f64;
                let im = 2.0 * q as f64 - (side - 1) as f64;
                points[label as usize] = Complex64::new(re, im);
            }
        }
        Ok(Constellation {
            name: format!("{m}qam"),
            points: normalized(points),
            bits_per_symbol: bits,
        })
    }

    /// 32-point cross constellation; see the module docs for the labelling.
    pub fn cross_qam32() -> Self {
        let mut points = vec![Complex64::new(0.0, 0.0); 32];
        for i in 0..8u32 {
            for q in 0..4u32 {
                let label = (gray(i) << 2) | gray(q);
                let mut re = 2.0 * i as f64 - 7.0;
                let mut im = 2.0 * q as f64 - 3.0;
                if re.abs() == 7.0 {
                    let (si, sq) = (re.signum(), im.signum());
                    re = si * (4.0 - im.abs());
                    im = sq * 5.0;
                }
                points[label as usize] = Complex64::new(re, im);
            }
        }
        Constellation {
            name: "32qam".into(),
            points: normalized(points),
            bits_per_symbol: 5,
        }
    }

    /// Constellation with `m` points: PSK up to 8, QAM above.
    pub fn with_size(m: usize) -> Result<Self> {
        match m {
            2 | 4 | 8 => Constellation::psk(m),
            32 => Ok(Constellation::cross_qam32()),
            _ => Constellation::square_qam(m),
        }
    }

    /// Accepts `bpsk`, `qpsk`, `8psk`/`8-psk`, `16qam`/`16-qam`, `32qam`, ...
    pub fn by_name(name: &str) -> Result<Self> {
        let key = name.to_ascii_lowercase().replace(['-', '_'], "");
        let parse = |digits: &str| {
            digits
                .parse::<usize>()
                .map_err(|_| Error::UnknownConstellation(name.to_string()))
        };
        match key.as_str() {
            "bpsk" => Constellation::psk(2),
            "qpsk" => Constellation::psk(4),
            k if k.ends_with("psk") => Constellation::psk(parse(&k[..k.len() - 3])?),
            k if k.ends_with("qam") => {
                let m = parse(&k[..k.len() - 3])?;
                if m == 32 {
                    Ok(Constellation::cross_qam32())
                } else {
                    Constellation::square_qam(m)
                }
            }
            _ => Err(Error::UnknownConstellation(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Copy whose mean symbol energy is `es`.
    pub fn scaled(&self, es: f64) -> Constellation {
        let s = (es / self.mean_energy()).sqrt();
        Constellation {
            name: self.name.clone(),
            points: self.points.iter().map(|p| p * s).collect(),
            bits_per_symbol: self.bits_per_symbol,
        }
    }

    /// Audit table: `label,bits,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,bits,re,im\n");
        for (label, p) in self.points.iter().enumerate() {
            writeln!(
                out,
                "{label},{:0width$b},{:.12},{:.12}",
                label,
                p.re,
                p.im,
                width = self.bits_per_symbol as usize
            )
            .unwrap();
        }
        out
    }
}
