//! Exhaustive minimal-length search for row-monomial codes on tiny instances.
//!
//! Every row-monomial code is, after structural reduction, a set of distinct
//! non-zero columns, each column holding at most one non-conjugate entry and
//! at most one conjugate entry, from different relays. Pruning, applied as
//! columns are added:
//!
//! - column-monomial `A_k`, `B_k`, `A_k + B_k` and column-disjointness across
//!   relays: enforced by the column alphabet itself;
//! - row-monomial: each `(relay, symbol, conjugate)` slot is used once;
//! - disjoint support: implied by the above (one entry per relay per column);
//! - column order: columns are chosen in strictly increasing option order,
//!   since permuting columns changes no condition;
//! - column phase: the first entry of a column is fixed to `1`, since scaling
//!   a column by a unit changes no condition;
//! - coverage: every `(relay, symbol)` needs `E_{n,k} > 0`, and a column
//!   covers at most two, so branches that cannot cover the rest are cut.
//!
//! Leaves are decided by the exact channel-free check; the first accepted
//! leaf is also run through the full verifier.

use serde::{Deserialize, Serialize};

use crate::code::{DistributedCode, RelayMatrixPair};
use crate::error::{Error, Result};
use crate::unit::GaussianUnit;
use crate::verifier::{check_channel_free_orthogonality, verify, Verdict, VerifyOptions};

/// Default cap on the number of column sets the search may visit.
pub const DEFAULT_SEARCH_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    relay: usize,
    symbol: usize,
    unit: GaussianUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ColumnOption {
    plain: Option<Entry>,
    conj: Option<Entry>,
}

impl ColumnOption {
    fn entries(&self) -> impl Iterator<Item = (bool, Entry)> {
        self.plain
            .map(|e| (false, e))
            .into_iter()
            .chain(self.conj.map(|e| (true, e)))
    }
}

fn column_options(n: usize, k: usize) -> Vec<ColumnOption> {
    let one = |relay, symbol| Entry {
        relay,
        symbol,
        unit: GaussianUnit::One,
    };
    let mut out = Vec::new();
    for relay in 0..k {
        for symbol in 0..n {
            out.push(ColumnOption {
                plain: Some(one(relay, symbol)),
                conj: None,
            });
            out.push(ColumnOption {
                plain: None,
                conj: Some(one(relay, symbol)),
            });
        }
    }
    for pr in 0..k {
        for ps in 0..n {
            for cr in (0..k).filter(|&r| r != pr) {
                for cs in 0..n {
                    for unit in GaussianUnit::NONZERO {
                        out.push(ColumnOption {
                            plain: Some(one(pr, ps)),
                            conj: Some(Entry {
                                relay: cr,
                                symbol: cs,
                                unit,
                            }),
                        });
                    }
                }
            }
        }
    }
    out
}

fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound on visited column sets: `Σ_{T ≤ maxT} C(options, T)`.
pub fn search_space_bound(n: usize, k: usize, max_t: usize) -> f64 {
    let options = 2 * n * k + n * k * n * k.saturating_sub(1) * 4;
    (1..=max_t).map(|t| binomial(options, t)).sum()
}

/// A minimal-length witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub t: usize,
    pub witness: DistributedCode,
    /// Column sets visited over all lengths tried.
    pub visited: u64,
}

struct Search<'a> {
    n: usize,
    k: usize,
    t: usize,
    options: &'a [ColumnOption],
    chosen: Vec<usize>,
    used: Vec<bool>,
    cover: Vec<u32>,
    visited: u64,
    opts: VerifyOptions,
}

impl Search<'_> {
    fn slot(&self, conj: bool, e: &Entry) -> usize {
        (e.relay * self.n + e.symbol) * 2 + conj as usize
    }

    fn uncovered(&self) -> usize {
        self.cover.iter().filter(|c| **c == 0).count()
    }

    fn build(&self) -> DistributedCode {
        let mut relays = vec![RelayMatrixPair::zeros(self.n, self.t); self.k];
        for (col, &idx) in self.chosen.iter().enumerate() {
            for (conj, e) in self.options[idx].entries() {
                let pair = &mut relays[e.relay];
                let m = if conj { pair.b_mut() } else { pair.a_mut() };
                m.set(e.symbol, col, e.unit);
            }
        }
        DistributedCode::new(self.n, self.t, relays).expect("dimensions are consistent")
    }

    fn run(&mut self, start: usize) -> Result<Option<DistributedCode>> {
        if self.chosen.len() == self.t {
            self.visited += 1;
            if self.uncovered() > 0 {
                return Ok(None);
            }
            let code = self.build();
            if !check_channel_free_orthogonality(&code).passed() {
                return Ok(None);
            }
            return Ok((verify(&code, &self.opts)?.verdict == Verdict::RowMonomialDostbc).then_some(code));
        }
        let remaining = self.t - self.chosen.len();
        if remaining * 2 < self.uncovered() {
            return Ok(None);
        }
        for idx in start..self.options.len() {
            let opt = self.options[idx];
            let slots: Vec<usize> = opt.entries().map(|(c, e)| self.slot(c, &e)).collect();
            if slots.iter().any(|s| self.used[*s]) {
                continue;
            }
            for (s, (_, e)) in slots.iter().zip(opt.entries()) {
                self.used[*s] = true;
                self.cover[e.relay * self.n + e.symbol] += 1;
            }
            self.chosen.push(idx);
            let found = self.run(idx + 1)?;
            self.chosen.pop();
            for (s, (_, e)) in slots.iter().zip(opt.entries()) {
                self.used[*s] = false;
                self.cover[e.relay * self.n + e.symbol] -= 1;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Smallest `T <= max_t` admitting a row-monomial orthogonal code, with the
/// first witness in enumeration order, or `None`.
///
/// Fails with [`Error::BudgetExceeded`] when the enumeration bound from
/// [`search_space_bound`] exceeds `budget`.
pub fn min_length_search(n: usize, k: usize, max_t: usize, budget: f64) -> Result<Option<SearchResult>> {
    if n == 0 || k == 0 || max_t == 0 {
        return Err(Error::InvalidParameters(format!(
            "search needs N, K, maxT >= 1, got N = {n}, K = {k}, maxT = {max_t}"
        )));
    }
    let bound = search_space_bound(n, k, max_t);
    if bound > budget {
        return Err(Error::BudgetExceeded { bound, budget });
    }
    let options = column_options(n, k);
    let mut visited = 0;
    for t in 1..=max_t {
        let mut search = Search {
            n,
            k,
            t,
            options: &options,
            chosen: Vec::with_capacity(t),
            used: vec![false; 2 * n * k],
            cover: vec![0; n * k],
            visited: 0,
            opts: VerifyOptions::default(),
        };
        let found = search.run(0)?;
        visited += search.visited;
        if let Some(witness) = found {
            return Ok(Some(SearchResult { t, witness, visited }));
        }
    }
    Ok(None)
}
