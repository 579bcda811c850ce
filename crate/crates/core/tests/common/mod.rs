//! Shared oracles: codes as printed in the literature, an independent entry
//! parser, and small helpers.

#![allow(dead_code)]

use dostbc::DistributedCode;

/// One printed entry `±[j] h_k[*] s_n[*]`, parsed without the crate's own
/// `Term` parser so the comparison does not share code with the renderer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Printed {
    pub negative: bool,
    pub j: bool,
    pub relay: usize,
    pub h_conj: bool,
    pub symbol: usize,
    pub s_conj: bool,
}

pub fn parse_entry(s: &str) -> Option<Printed> {
    if s == "0" {
        return None;
    }
    let mut rest = s;
    let negative = rest.starts_with('-');
    if negative {
        rest = &rest[1..];
    }
    let j = rest.starts_with('j');
    if j {
        rest = &rest[1..];
    }
    let rest = rest.strip_prefix('h').unwrap_or_else(|| panic!("bad entry {s}"));
    let h_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap();
    let relay: usize = rest[..h_end].parse().unwrap();
    let mut rest = &rest[h_end..];
    let h_conj = rest.starts_with('*');
    if h_conj {
        rest = &rest[1..];
    }
    let rest = rest.strip_prefix('s').unwrap_or_else(|| panic!("bad entry {s}"));
    let s_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let symbol: usize = rest[..s_end].parse().unwrap();
    let s_conj = &rest[s_end..] == "*";
    Some(Printed {
        negative,
        j,
        relay,
        h_conj,
        symbol,
        s_conj,
    })
}

pub fn parse_matrix(rows: &[&str]) -> Vec<Vec<Option<Printed>>> {
    rows.iter()
        .map(|r| r.split_whitespace().map(parse_entry).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchKind {
    /// Same entry except for the conjugation on `h`.
    HConjugation,
    /// Same entry except for the relay index.
    RelayIndex,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    /// 1-based row and column.
    pub row: usize,
    pub col: usize,
    pub printed: String,
    pub built: String,
    pub kind: MismatchKind,
}

/// Entry-by-entry comparison of `code` against printed rows.
pub fn compare(code: &DistributedCode, printed: &[&str]) -> Vec<Mismatch> {
    let built_text = code.render();
    let built: Vec<Vec<&str>> = built_text.lines().map(|l| l.split_whitespace().collect()).collect();
    let printed_tokens: Vec<Vec<&str>> = printed.iter().map(|r| r.split_whitespace().collect()).collect();
    assert_eq!(built.len(), printed_tokens.len(), "row count");
    let mut out = Vec::new();
    for (r, (b_row, p_row)) in built.iter().zip(&printed_tokens).enumerate() {
        assert_eq!(b_row.len(), p_row.len(), "column count in row {}", r + 1);
        for (c, (b, p)) in b_row.iter().zip(p_row).enumerate() {
            let (eb, ep) = (parse_entry(b), parse_entry(p));
            if eb == ep {
                continue;
            }
            let kind = match (eb, ep) {
                (Some(x), Some(y)) if Printed { h_conj: y.h_conj, ..x } == y => MismatchKind::HConjugation,
                (Some(x), Some(y)) if Printed { relay: y.relay, ..x } == y => MismatchKind::RelayIndex,
                _ => MismatchKind::Other,
            };
            out.push(Mismatch {
                row: r + 1,
                col: c + 1,
                printed: p.to_string(),
                built: b.to_string(),
                kind,
            });
        }
    }
    out
}

pub const X44: [&str; 4] = [
    "h1s1 -h1s2 h1s3 -h1s4 0 0 0 0",
    "h2*s2* h2*s1* h2*s4* h2s3* 0 0 0 0",
    "0 0 0 0 h3s1 -h3s2 h3s3 -h3s4",
    "0 0 0 0 h4*s2* h4*s1* h4*s4* h4s3*",
];

pub const X54: [&str; 4] = [
    "h1s1 -h1s2 h1s3 -h1s4 0 0 0 0 h1s5 0 0 0",
    "h2*s2* h2*s1* h2*s4* h2s3* 0 0 0 0 0 h2s5 0 0",
    "0 0 0 0 h3s1 -h3s2 h3s3 -h3s4 0 0 h3s5 0",
    "0 0 0 0 h4*s2* h4*s1* h4*s4* h4s3* 0 0 0 h4s5",
];

pub const X45: [&str; 5] = [
    "h1s1 -h1s2 h1s3 -h1s4 0 0 0 0 0 0 0 0",
    "h2*s2* h2*s1* h2*s4* h2s3* 0 0 0 0 0 0 0 0",
    "0 0 0 0 h3s1 -h3s2 h3s3 -h3s4 0 0 0 0",
    "0 0 0 0 h4*s2* h4*s1* h4*s4* h4s3* 0 0 0 0",
    "0 0 0 0 0 0 0 0 h5s1 h5s2 h5s3 h5s4",
];

/// `[X1, X2]` for `(5, 5)`: eight columns of `X1`, then seven of `X2`.
pub const X55: [&str; 5] = [
    "h1s2 -h1s3 h1s4 -h1s5 0 0 0 0   h1*s1* h1*s5* 0 0 0 0 0",
    "h2*s3* h2*s2* h2*s5* h2s4* 0 0 0 0   0 0 0 0 h2s1 -h2s3 0",
    "0 0 0 0 h3s1 -h3s3 h3s4 -h3s5   0 0 h3*s2* h3*s4* 0 0 0",
    "0 0 0 0 h4*s3* h4*s1* h4*s5* h4s4*   0 0 0 0 0 0 h4s2",
    "0 0 0 0 0 0 0 0   h5s5 -h5s1 h5s4 -h5s2 h3*s3* h5*s1* 0",
];

/// Positions (1-based) whose printed entries are suspected typos.
pub fn flagged(n: usize, k: usize) -> Vec<(usize, usize)> {
    match (n, k) {
        (4, 4) | (5, 4) | (4, 5) => vec![(2, 4), (4, 8)],
        (5, 5) => vec![(2, 4), (4, 8), (5, 13)],
        _ => vec![],
    }
}

/// `⌈a/b⌉` the long way, for floor checks.
pub fn ceil_div(a: usize, b: usize) -> usize {
    let mut q = a / b;
    if q * b < a {
        q += 1;
    }
    q
}

/// Entry code for [`code_from`]: 0, 1, -1, 2 for `j`, -2 for `-j`.
pub fn unit(v: i32) -> dostbc::GaussianUnit {
    use dostbc::GaussianUnit as U;
    match v {
        0 => U::Zero,
        1 => U::One,
        -1 => U::MinusOne,
        2 => U::J,
        -2 => U::MinusJ,
        _ => panic!("bad unit code {v}"),
    }
}

fn matrix(rows: &[Vec<i32>]) -> dostbc::UnitMatrix {
    dostbc::UnitMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| unit(v)).collect()).collect()).unwrap()
}

/// Builds a code from per-relay `(A_k, B_k)` given as integer rows.
pub fn code_from(n: usize, t: usize, relays: &[(Vec<Vec<i32>>, Vec<Vec<i32>>)]) -> DistributedCode {
    let pairs = relays
        .iter()
        .map(|(a, b)| dostbc::RelayMatrixPair::new(matrix(a), matrix(b)).unwrap())
        .collect();
    DistributedCode::new(n, t, pairs).unwrap()
}

/// Two relays, two symbols, three slots: passes every channel-free
/// condition, yet `B_1` has two entries in row 1, so its `R` is not diagonal
/// and the weighted conditions fail.
pub fn channel_free_only_code() -> DistributedCode {
    code_from(
        2,
        3,
        &[
            (vec![vec![0, 0, 0], vec![0, 0, 0]], vec![vec![-1, 0, 1], vec![0, 1, 0]]),
            (vec![vec![0, 1, 0], vec![1, 0, 0]], vec![vec![0, 0, 0], vec![0, 0, 0]]),
        ],
    )
}
