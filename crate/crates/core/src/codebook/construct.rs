//! Systematic constructions for the four parity classes of `(N, K)`.

use std::collections::BTreeSet;

use crate::code::{DistributedCode, RelayMatrixPair};
use crate::error::{Error, Result};
use crate::unit::GaussianUnit;
use crate::verifier::{self, Verdict, VerifyOptions};

/// Accumulates relay matrices whose final length is not known up front.
///
/// Columns are appended as entries are placed; the length is the index of the
/// last non-zero column plus one, so trailing zero columns never exist.
#[derive(Debug)]
struct CodeBuilder {
    n: usize,
    relays: Vec<RelayMatrixPair>,
    width: usize,
}

impl CodeBuilder {
    fn new(n: usize, k: usize) -> Self {
        CodeBuilder {
            n,
            relays: vec![RelayMatrixPair::zeros(n, 0); k],
            width: 0,
        }
    }

    fn ensure_width(&mut self, cols: usize) {
        if cols > self.width {
            // grow geometrically to keep appends cheap
            let target = cols.max(self.width * 2);
            for r in &mut self.relays {
                *r = r.resized(target);
            }
            self.width = target;
        }
    }

    /// Sets `X[relay, col]` to `unit · h s_symbol` (or the conjugate form),
    /// replacing whatever that relay had in the column.
    fn set(&mut self, relay: usize, conjugate: bool, symbol: usize, col: usize, unit: GaussianUnit) {
        self.ensure_width(col + 1);
        let pair = &mut self.relays[relay];
        for n in 0..self.n {
            pair.a_mut().set(n, col, GaussianUnit::Zero);
            pair.b_mut().set(n, col, GaussianUnit::Zero);
        }
        let m = if conjugate { pair.b_mut() } else { pair.a_mut() };
        m.set(symbol, col, unit);
    }

    fn used_width(&self) -> usize {
        (0..self.width)
            .rev()
            .find(|&t| {
                self.relays
                    .iter()
                    .any(|r| !r.a().col_is_zero(t) || !r.b().col_is_zero(t))
            })
            .map_or(0, |t| t + 1)
    }

    fn finish(self) -> Result<DistributedCode> {
        let t = self.used_width();
        let relays = self.relays.iter().map(|r| r.resized(t)).collect();
        DistributedCode::new(self.n, t, relays)
    }

    /// Even/even block construction over a subset of symbols and relays,
    /// starting at column `offset`. Returns the number of columns used.
    ///
    /// For each consecutive relay pair `(2p, 2p+1)` the first relay carries
    /// `G_A = diag[1,-1,…]` in its `A` matrix and the second carries
    /// `G_B = diag[G_s,…]`, `G_s = [[0,1],[1,0]]`, in its `B` matrix, both in
    /// column block `p`.
    fn place_even_even(&mut self, symbols: &[usize], relays: &[usize], offset: usize) -> usize {
        debug_assert!(symbols.len() % 2 == 0 && relays.len() % 2 == 0);
        let block = symbols.len();
        for (p, pair) in relays.chunks(2).enumerate() {
            let base = offset + p * block;
            for (i, &s) in symbols.iter().enumerate() {
                let sign = if i % 2 == 0 {
                    GaussianUnit::One
                } else {
                    GaussianUnit::MinusOne
                };
                self.set(pair[0], false, s, base + i, sign);
                self.set(pair[1], true, s, base + (i ^ 1), GaussianUnit::One);
            }
        }
        block * relays.len() / 2
    }
}

fn halve(value: usize, name: &str, want_even: bool) -> Result<usize> {
    let even = value % 2 == 0;
    let half = value / 2;
    if even != want_even || half == 0 {
        let parity = if want_even {
            "an even number >= 2"
        } else {
            "an odd number >= 3"
        };
        return Err(Error::InvalidParameters(format!(
            "{name} = {value} must be {parity}"
        )));
    }
    Ok(half)
}

/// `N = 2l`, `K = 2m`: length `mN`, rate `1/m`.
pub fn construct_even_even(n: usize, k: usize) -> Result<DistributedCode> {
    halve(n, "N", true)?;
    halve(k, "K", true)?;
    let mut b = CodeBuilder::new(n, k);
    let symbols: Vec<usize> = (0..n).collect();
    let relays: Vec<usize> = (0..k).collect();
    b.place_even_even(&symbols, &relays, 0);
    b.finish()
}

/// `N = 2l+1`, `K = 2m`: the even/even code in `s_1..s_{N-1}` followed by
/// `diag[h_1 s_N, …, h_K s_N]`.
pub fn construct_odd_even(n: usize, k: usize) -> Result<DistributedCode> {
    halve(n, "N", false)?;
    halve(k, "K", true)?;
    let mut b = CodeBuilder::new(n, k);
    let symbols: Vec<usize> = (0..n - 1).collect();
    let relays: Vec<usize> = (0..k).collect();
    let used = b.place_even_even(&symbols, &relays, 0);
    for relay in 0..k {
        b.set(relay, false, n - 1, used + relay, GaussianUnit::One);
    }
    b.finish()
}

/// `N = 2l`, `K = 2m+1`: block diagonal of the even/even code on the first
/// `K-1` relays and the row `[h_K s_1, …, h_K s_N]`.
pub fn construct_even_odd(n: usize, k: usize) -> Result<DistributedCode> {
    halve(n, "N", true)?;
    halve(k, "K", false)?;
    let mut b = CodeBuilder::new(n, k);
    let symbols: Vec<usize> = (0..n).collect();
    let relays: Vec<usize> = (0..k - 1).collect();
    let used = b.place_even_even(&symbols, &relays, 0);
    for s in 0..n {
        b.set(k - 1, false, s, used + s, GaussianUnit::One);
    }
    b.finish()
}

/// `N = 2l+1`, `K = 2m+1`.
///
/// Part I places `m` two-relay blocks, block `p` omitting symbol `p mod N`.
/// Part II pairs the omitted symbols with the last relay, first on the odd
/// relays' conjugate entries, then on the even relays' non-conjugate ones.
/// When `N != K` the literal pairing steps either repeat a symbol in one of
/// relay K's matrices or leave symbols off relay K; those pairings are
/// skipped and the leftovers appended, which still meets the row-monomial
/// length exactly for all odd `N, K <= 9`.
/// The output is only returned if it verifies as a row-monomial code.
pub fn construct_odd_odd(n: usize, k: usize) -> Result<DistributedCode> {
    let l = halve(n, "N", false)?;
    let m = halve(k, "K", false)?;
    let mut b = CodeBuilder::new(n, k);
    let last = k - 1;

    // Part I
    for p in 0..m {
        let omitted = p % n;
        let symbols: Vec<usize> = (0..n).filter(|&s| s != omitted).collect();
        b.place_even_even(&symbols, &[2 * p, 2 * p + 1], p * 2 * l);
    }

    // Part II. A pairing is skipped (treated as if the symbol set were
    // empty) when it would place a symbol twice in the same matrix of relay
    // K; symbols still unplaced at the end go to relay K one column each.
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut c = 2 * l * m;
    let mut in_k_a = BTreeSet::new();
    for p in 0..m {
        let sp = p % n;
        b.set(2 * p, true, sp, c, GaussianUnit::One);
        let partner = remaining.iter().rev().copied().find(|&s| s != sp);
        match partner.filter(|_| !in_k_a.contains(&sp)) {
            None => c += 1,
            Some(smax) => {
                b.set(last, false, smax, c, GaussianUnit::One);
                c += 1;
                b.set(2 * p, true, smax, c, GaussianUnit::One);
                b.set(last, false, sp, c, GaussianUnit::MinusOne);
                in_k_a.extend([smax, sp]);
                remaining.remove(&smax);
                remaining.remove(&sp);
                c += 1;
            }
        }
    }
    let mut in_k_b = BTreeSet::new();
    for p in 0..m {
        let sp = p % n;
        b.set(2 * p + 1, false, sp, c, GaussianUnit::One);
        let partner = remaining.iter().rev().copied().find(|&s| s != sp);
        match partner.filter(|_| !in_k_b.contains(&sp)) {
            None => c += 1,
            Some(smax) => {
                b.set(last, true, smax, c, GaussianUnit::One);
                c += 1;
                b.set(2 * p + 1, false, smax, c, GaussianUnit::MinusOne);
                b.set(last, true, sp, c, GaussianUnit::One);
                in_k_b.extend([smax, sp]);
                remaining.remove(&smax);
                remaining.remove(&sp);
                c += 1;
            }
        }
    }
    for s in remaining {
        b.set(last, false, s, c, GaussianUnit::One);
        c += 1;
    }

    let code = b.finish()?;
    let report = verifier::verify(&code, &VerifyOptions::default())?;
    if report.verdict != Verdict::RowMonomialDostbc {
        return Err(Error::ConstructionFailed {
            n,
            k,
            reason: report.summary(),
        });
    }
    Ok(code)
}

/// Dispatches on the parity of `(N, K)`; both must be at least 2.
pub fn construct(n: usize, k: usize) -> Result<DistributedCode> {
    if n < 2 || k < 2 {
        return Err(Error::InvalidParameters(format!(
            "constructions need N >= 2 and K >= 2, got N = {n}, K = {k}"
        )));
    }
    match (n % 2 == 0, k % 2 == 0) {
        (true, true) => construct_even_even(n, k),
        (false, true) => construct_odd_even(n, k),
        (true, false) => construct_even_odd(n, k),
        (false, false) => construct_odd_odd(n, k),
    }
}

/// The repetition layout: relay `k` forwards `s_1..s_N` in slots
/// `kN..(k+1)N`, nobody else transmits there.
pub fn repetition_layout(n: usize, k: usize) -> Result<DistributedCode> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameters(
            "repetition layout needs N, K >= 1".into(),
        ));
    }
    let mut b = CodeBuilder::new(n, k);
    for relay in 0..k {
        for s in 0..n {
            b.set(relay, false, s, relay * n + s, GaussianUnit::One);
        }
    }
    b.finish()
}
