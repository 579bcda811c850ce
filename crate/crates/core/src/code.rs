//! Relay encoding matrices and the distributed code they form.
//!
//! Relay `k` transmits `ρ (y_k A_k + y_k* B_k)` where `A_k`, `B_k` are `N × T`
//! matrices over `{0, ±1, ±j}`. Symbols and relays are 1-based in printed
//! output (`h1s1`) and 0-based everywhere in the API and in code files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unit::GaussianUnit;

/// Dense `rows × cols` matrix over the unit alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianUnit>,
}

impl UnitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        UnitMatrix {
            rows,
            cols,
            data: vec![GaussianUnit::Zero; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianUnit>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(UnitMatrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> GaussianUnit {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: GaussianUnit) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[GaussianUnit] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<GaussianUnit>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Non-zero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, GaussianUnit)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, u)| !u.is_zero())
            .map(move |(i, &u)| (i / self.cols, i % self.cols, u))
    }

    pub fn col_nonzero_count(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| !self.get(r, col).is_zero()).count()
    }

    pub fn row_nonzero_count(&self, row: usize) -> usize {
        self.row(row).iter().filter(|u| !u.is_zero()).count()
    }

    pub fn col_is_zero(&self, col: usize) -> bool {
        self.col_nonzero_count(col) == 0
    }

    /// Copy with the column count changed; new columns are zero, dropped
    /// columns must be zero or are discarded.
    pub fn resized(&self, cols: usize) -> UnitMatrix {
        let mut out = UnitMatrix::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..cols.min(self.cols) {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }
}

/// One relay's `(A_k, B_k)` pair.
///
/// Only the shared-dimension invariant is enforced here; the alphabet-level
/// conditions (disjoint support, column-monomial) are what
/// [`crate::verifier`] decides, so malformed candidates stay representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelayMatrixPair {
    a: UnitMatrix,
    b: UnitMatrix,
}

impl RelayMatrixPair {
    pub fn new(a: UnitMatrix, b: UnitMatrix) -> Result<Self> {
        if a.rows() != b.rows() {
            return Err(Error::DimensionMismatch {
                context: "relay B rows",
                expected: a.rows(),
                found: b.rows(),
            });
        }
        if a.cols() != b.cols() {
            return Err(Error::DimensionMismatch {
                context: "relay B columns",
                expected: a.cols(),
                found: b.cols(),
            });
        }
        Ok(RelayMatrixPair { a, b })
    }

    pub fn zeros(n: usize, t: usize) -> Self {
        RelayMatrixPair {
            a: UnitMatrix::zeros(n, t),
            b: UnitMatrix::zeros(n, t),
        }
    }

    pub fn a(&self) -> &UnitMatrix {
        &self.a
    }

    pub fn b(&self) -> &UnitMatrix {
        &self.b
    }

    pub fn a_mut(&mut self) -> &mut UnitMatrix {
        &mut self.a
    }

    pub fn b_mut(&mut self) -> &mut UnitMatrix {
        &mut self.b
    }

    pub fn resized(&self, cols: usize) -> Self {
        RelayMatrixPair {
            a: self.a.resized(cols),
            b: self.b.resized(cols),
        }
    }

    /// Number of columns in which this relay transmits.
    pub fn uses(&self) -> usize {
        (0..self.a.cols())
            .filter(|&t| !self.a.col_is_zero(t) || !self.b.col_is_zero(t))
            .count()
    }

    /// `x = y A + y* B` for a length-`N` row vector `y`.
    pub fn encode(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.a.cols()];
        for (n, t, u) in self.a.nonzeros() {
            x[t] += y[n] * u.to_complex();
        }
        for (n, t, u) in self.b.nonzeros() {
            x[t] += y[n].conj() * u.to_complex();
        }
        x
    }
}

/// A `K × T` distributed code in `N` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CodeFile", into = "CodeFile")]
pub struct DistributedCode {
    n_symbols: usize,
    length: usize,
    relays: Vec<RelayMatrixPair>,
}

impl DistributedCode {
    pub fn new(n_symbols: usize, length: usize, relays: Vec<RelayMatrixPair>) -> Result<Self> {
        if n_symbols == 0 || length == 0 || relays.is_empty() {
            return Err(Error::InvalidParameters(
                "N, K and T must all be positive".into(),
            ));
        }
        for pair in &relays {
            if pair.a().rows() != n_symbols {
                return Err(Error::DimensionMismatch {
                    context: "relay matrix rows",
                    expected: n_symbols,
                    found: pair.a().rows(),
                });
            }
            if pair.a().cols() != length {
                return Err(Error::DimensionMismatch {
                    context: "relay matrix columns",
                    expected: length,
                    found: pair.a().cols(),
                });
            }
        }
        Ok(DistributedCode {
            n_symbols,
            length,
            relays,
        })
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn n_relays(&self) -> usize {
        self.relays.len()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn relays(&self) -> &[RelayMatrixPair] {
        &self.relays
    }

    pub fn relay(&self, k: usize) -> &RelayMatrixPair {
        &self.relays[k]
    }

    /// Modified copy with one entry replaced; used for perturbation studies.
    pub fn with_entry(
        &self,
        relay: usize,
        conjugate: bool,
        symbol: usize,
        col: usize,
        value: GaussianUnit,
    ) -> DistributedCode {
        let mut out = self.clone();
        let pair = &mut out.relays[relay];
        let m = if conjugate { pair.b_mut() } else { pair.a_mut() };
        m.set(symbol, col, value);
        out
    }

    /// Data-rate `N/T`, always derived from the dimensions.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.n_symbols as u64, self.length as u64)
    }

    /// All terms at row `k`, column `t` of the symbolic code matrix `X`.
    pub fn terms_at(&self, k: usize, t: usize) -> Vec<Term> {
        let pair = &self.relays[k];
        let mut out = Vec::new();
        for n in 0..self.n_symbols {
            let a = pair.a().get(n, t);
            if !a.is_zero() {
                out.push(Term {
                    relay: k,
                    symbol: n,
                    conjugate: false,
                    coeff: a,
                });
            }
            let b = pair.b().get(n, t);
            if !b.is_zero() {
                out.push(Term {
                    relay: k,
                    symbol: n,
                    conjugate: true,
                    coeff: b,
                });
            }
        }
        out
    }

    /// Symbolic `X` as `K` rows of `T` cells.
    pub fn symbolic_matrix(&self) -> Vec<Vec<Vec<Term>>> {
        (0..self.n_relays())
            .map(|k| (0..self.length).map(|t| self.terms_at(k, t)).collect())
            .collect()
    }

    /// Human-readable rendering of the symbolic `X`, one row per relay.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .symbolic_matrix()
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|cell| {
                        if cell.is_empty() {
                            "0".to_string()
                        } else {
                            cell.iter()
                                .map(Term::to_string)
                                .collect::<Vec<_>>()
                                .join("+")
                        }
                    })
                    .collect()
            })
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            n: self.n_symbols,
            k: self.n_relays(),
            t: self.length,
            relays: self
                .relays
                .iter()
                .map(|p| RelayFile {
                    a: p.a().to_rows(),
                    b: p.b().to_rows(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        DistributedCode::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// On-disk code format: `{"n","k","t","relays":[{"a":[[..]],"b":[[..]]}]}`.
///
/// `a` and `b` are `N` rows of `T` entries; row `i` is symbol `s_{i+1}` and
/// relay `i` in the list is relay `i+1` of the printed matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub relays: Vec<RelayFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelayFile {
    pub a: Vec<Vec<GaussianUnit>>,
    pub b: Vec<Vec<GaussianUnit>>,
}

impl From<DistributedCode> for CodeFile {
    fn from(code: DistributedCode) -> Self {
        code.to_file()
    }
}

impl TryFrom<CodeFile> for DistributedCode {
    type Error = Error;

    fn try_from(file: CodeFile) -> Result<Self> {
        if file.relays.len() != file.k {
            return Err(Error::DimensionMismatch {
                context: "relay count",
                expected: file.k,
                found: file.relays.len(),
            });
        }
        let mut relays = Vec::with_capacity(file.k);
        for r in file.relays {
            let a = UnitMatrix::from_rows(r.a)?;
            let b = UnitMatrix::from_rows(r.b)?;
            relays.push(RelayMatrixPair::new(a, b)?);
        }
        DistributedCode::new(file.n, file.t, relays)
    }
}

/// A single non-zero entry `coeff · h_k s_n` or `coeff · h_k* s_n*` of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub relay: usize,
    pub symbol: usize,
    pub conjugate: bool,
    pub coeff: GaussianUnit,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.coeff {
            GaussianUnit::One => "",
            GaussianUnit::MinusOne => "-",
            GaussianUnit::J => "j",
            GaussianUnit::MinusJ => "-j",
            GaussianUnit::Zero => "0*",
        };
        let star = if self.conjugate { "*" } else { "" };
        write!(
            f,
            "{prefix}h{}{star}s{}{star}",
            self.relay + 1,
            self.symbol + 1
        )
    }
}

impl FromStr for Term {
    type Err = Error;

    /// Parses the rendering produced by `Display`, e.g. `-jh2*s3*`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidEntry(s.to_string());
        let (coeff, rest) = if let Some(r) = s.strip_prefix("-j") {
            (GaussianUnit::MinusJ, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (GaussianUnit::MinusOne, r)
        } else if let Some(r) = s.strip_prefix('j') {
            (GaussianUnit::J, r)
        } else {
            (GaussianUnit::One, s)
        };
        let rest = rest.strip_prefix('h').ok_or_else(bad)?;
        let (h_part, s_part) = rest.split_once('s').ok_or_else(bad)?;
        let (h_idx, h_conj) = match h_part.strip_suffix('*') {
            Some(idx) => (idx, true),
            None => (h_part, false),
        };
        let (s_idx, s_conj) = match s_part.strip_suffix('*') {
            Some(idx) => (idx, true),
            None => (s_part, false),
        };
        // mixed forms such as h2s3* are not representable
        if h_conj != s_conj {
            return Err(bad());
        }
        let relay: usize = h_idx.parse().map_err(|_| bad())?;
        let symbol: usize = s_idx.parse().map_err(|_| bad())?;
        if relay == 0 || symbol == 0 {
            return Err(bad());
        }
        Ok(Term {
            relay: relay - 1,
            symbol: symbol - 1,
            conjugate: h_conj,
            coeff,
        })
    }
}
