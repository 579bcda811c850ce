//! Rate-bound comparison tables.
//!
//! The symbolic rows are closed forms in `l, m` (`N = 2l` or `2l+1`,
//! `K = 2m` or `2m+1`); the numeric rows come from the bound functions, so
//! comparing the two checks one against the other.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::codebook::{rate_bound_dostbc, rate_bound_row_monomial, repetition_rate};
use crate::error::{Error, Result};

type Q = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    EvenEven,
    OddEven,
    EvenOdd,
    OddOdd,
}

impl ParityClass {
    pub const ALL: [ParityClass; 4] = [
        ParityClass::EvenEven,
        ParityClass::OddEven,
        ParityClass::EvenOdd,
        ParityClass::OddOdd,
    ];

    pub fn of(n: usize, k: usize) -> ParityClass {
        match (n % 2 == 0, k % 2 == 0) {
            (true, true) => ParityClass::EvenEven,
            (false, true) => ParityClass::OddEven,
            (true, false) => ParityClass::EvenOdd,
            (false, false) => ParityClass::OddOdd,
        }
    }

    /// `(N, K)` for given `l, m >= 1`.
    pub fn dims(self, l: u64, m: u64) -> (usize, usize) {
        let (n, k) = match self {
            ParityClass::EvenEven => (2 * l, 2 * m),
            ParityClass::OddEven => (2 * l + 1, 2 * m),
            ParityClass::EvenOdd => (2 * l, 2 * m + 1),
            ParityClass::OddOdd => (2 * l + 1, 2 * m + 1),
        };
        (n as usize, k as usize)
    }

    pub fn label(self) -> &'static str {
        match self {
            ParityClass::EvenEven => "N=2l, K=2m",
            ParityClass::OddEven => "N=2l+1, K=2m",
            ParityClass::EvenOdd => "N=2l, K=2m+1",
            ParityClass::OddOdd => "N=2l+1, K=2m+1",
        }
    }
}

/// One symbolic row: both bounds and their difference as expressions in
/// `l, m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicRow {
    pub class: ParityClass,
    pub dostbc: String,
    pub row_monomial: String,
    pub difference: String,
}

fn q(a: u64, b: u64) -> Q {
    Ratio::new(a, b)
}

impl SymbolicRow {
    /// Evaluates the row's three expressions at `(l, m)`.
    pub fn evaluate(&self, l: u64, m: u64) -> (Q, Q, Q) {
        match self.class {
            ParityClass::EvenEven => (q(1, m), q(1, m), Q::from_integer(0)),
            ParityClass::OddEven => (q(1, m), q(2 * l + 1, 2 * l * m + 2 * m), q(1, 2 * l * m + 2 * m)),
            ParityClass::EvenOdd => (q(2, 2 * m + 1), q(1, 1 + m), q(1, (2 * m + 1) * (m + 1))),
            ParityClass::OddOdd => {
                let a = 2 * l * m + l + m + 1;
                let b = 2 * l * m + 2 * m + l + 1;
                let c = 2 * l * m + 2 * l + m + 1;
                (
                    q(2 * l + 1, a),
                    q(2 * l + 1, b).min(q(2 * l + 1, c)),
                    q(m * (2 * l + 1), a * b).max(q(l * (2 * l + 1), a * c)),
                )
            }
        }
    }
}

pub fn symbolic_rows() -> Vec<SymbolicRow> {
    let row = |class, d: &str, r: &str, diff: &str| SymbolicRow {
        class,
        dostbc: d.into(),
        row_monomial: r.into(),
        difference: diff.into(),
    };
    vec![
        row(ParityClass::EvenEven, "1/m", "1/m", "0"),
        row(ParityClass::OddEven, "1/m", "(2l+1)/(2lm+2m)", "1/(2lm+2m)"),
        row(ParityClass::EvenOdd, "2/(2m+1)", "1/(1+m)", "1/((2m+1)(m+1))"),
        row(
            ParityClass::OddOdd,
            "(2l+1)/(2lm+l+m+1)",
            "min((2l+1)/(2lm+2m+l+1), (2l+1)/(2lm+2l+m+1))",
            "max(m(2l+1)/((2lm+l+m+1)(2lm+2m+l+1)), l(2l+1)/((2lm+l+m+1)(2lm+2l+m+1)))",
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub k: usize,
    pub class: ParityClass,
    pub dostbc: Q,
    pub row_monomial: Q,
    pub difference: Q,
}

/// Bound-versus-`K` series, `K = 2..=max_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSeries {
    pub n: usize,
    pub k: Vec<usize>,
    pub dostbc: Vec<Q>,
    pub row_monomial: Vec<Q>,
    pub repetition: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateTable {
    pub symbolic: Vec<SymbolicRow>,
    pub rows: Vec<RateRow>,
    pub series: Vec<BoundSeries>,
}

impl RateTable {
    /// `n,k,class,dostbc,row_monomial,difference` with exact fractions.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,class,dostbc,row_monomial,difference\n");
        for r in &self.rows {
            let class = serde_json::to_value(r.class).expect("enum serializes");
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n,
                r.k,
                class.as_str().unwrap_or_default(),
                r.dostbc,
                r.row_monomial,
                r.difference
            )
            .unwrap();
        }
        out
    }

    /// `n,k,dostbc,row_monomial,repetition` as decimals, plot-ready.
    pub fn series_csv(&self) -> String {
        let f = |r: &Q| *r.numer() as f64 / *r.denom() as f64;
        let mut out = String::from("n,k,dostbc,row_monomial,repetition\n");
        for s in &self.series {
            for i in 0..s.k.len() {
                writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6}",
                    s.n,
                    s.k[i],
                    f(&s.dostbc[i]),
                    f(&s.row_monomial[i]),
                    f(&s.repetition[i])
                )
                .unwrap();
            }
        }
        out
    }

    pub fn symbolic_text(&self) -> String {
        let mut out = String::new();
        for r in &self.symbolic {
            writeln!(
                out,
                "{:<16} | {:<20} | {} | {}",
                r.class.label(),
                r.dostbc,
                r.row_monomial,
                r.difference
            )
            .unwrap();
        }
        out
    }
}

/// Both bounds for every `2 <= N <= max_n`, `2 <= K <= max_k`, the symbolic
/// rows, and bound-versus-`K` series for `N = 2, 3`.
pub fn emit_rate_table(max_n: usize, max_k: usize) -> Result<RateTable> {
    if max_n < 2 || max_k < 2 {
        return Err(Error::InvalidParameters(format!(
            "rate table needs max N, max K >= 2, got {max_n}, {max_k}"
        )));
    }
    let mut rows = Vec::new();
    for n in 2..=max_n {
        for k in 2..=max_k {
            let d = rate_bound_dostbc(n, k)?.value();
            let r = rate_bound_row_monomial(n, k)?.value();
            rows.push(RateRow {
                n,
                k,
                class: ParityClass::of(n, k),
                dostbc: d,
                row_monomial: r,
                difference: d - r,
            });
        }
    }
    let mut series = Vec::new();
    for n in [2usize, 3] {
        let ks: Vec<usize> = (2..=max_k).collect();
        series.push(BoundSeries {
            n,
            dostbc: ks.iter().map(|&k| rate_bound_dostbc(n, k).map(|b| b.value())).collect::<Result<_>>()?,
            row_monomial: ks.iter().map(|&k| rate_bound_row_monomial(n, k).map(|b| b.value())).collect::<Result<_>>()?,
            repetition: ks.iter().map(|&k| repetition_rate(k)).collect(),
            k: ks,
        });
    }
    Ok(RateTable {
        symbolic: symbolic_rows(),
        rows,
        series,
    })
}
