//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances and budgets are fixed here, not tuned.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{compare, flagged, MismatchKind, X44, X45, X54, X55};
use dostbc::channel::{draw_channels, simulate_dostbc_frame, simulate_frame_with_draw, PowerConfig, Scheme};
use dostbc::codebook::{
    construct, construct_even_even, construct_even_odd, construct_odd_even, construct_odd_odd,
    min_length_search, rate_bound_row_monomial, DEFAULT_SEARCH_BUDGET,
};
use dostbc::decoder::{joint_ml_decode, single_symbol_ml_decode, DEFAULT_JOINT_BUDGET};
use dostbc::harness::{emit_rate_table, estimate_diversity, run_ber, ExperimentConfig, ParityClass, SnrGrid};
use dostbc::linalg::CMatrix;
use dostbc::rng::substream;
use dostbc::verifier::{
    check_channel_free_orthogonality, check_diagonal_r, check_structural, check_weighted_orthogonality,
    noise_covariance, verify, Verdict, VerifyOptions,
};
use dostbc::{Constellation, DistributedCode, GaussianUnit, RelayMatrixPair, UnitMatrix, VerifiedCode};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fidelity() -> Outcome {
    let cases: [(usize, usize, DistributedCode, &[&str]); 4] = [
        (4, 4, construct_even_even(4, 4).map_err(|e| e.to_string())?, &X44),
        (5, 4, construct_odd_even(5, 4).map_err(|e| e.to_string())?, &X54),
        (4, 5, construct_even_odd(4, 5).map_err(|e| e.to_string())?, &X45),
        (5, 5, construct_odd_odd(5, 5).map_err(|e| e.to_string())?, &X55),
    ];
    let mut notes = Vec::new();
    for (n, k, code, printed) in cases {
        let m = compare(&code, printed);
        let pos: Vec<(usize, usize)> = m.iter().map(|x| (x.row, x.col)).collect();
        ensure(pos == flagged(n, k), || format!("X({n},{k}) differs at {m:?}"))?;
        ensure(m.len() <= 3, || format!("X({n},{k}) has {} flagged entries", m.len()))?;
        let relay_typos = m.iter().filter(|x| x.kind == MismatchKind::RelayIndex).count();
        ensure(m.iter().all(|x| x.kind != MismatchKind::Other), || format!("X({n},{k}): {m:?}"))?;
        let v = verify(&code, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(v.verdict == Verdict::RowMonomialDostbc, || format!("X({n},{k}) verdict {}", v.verdict))?;
        notes.push(format!("X({n},{k}) {} flagged ({} relay-index)", m.len(), relay_typos));
    }
    Ok(notes.join(", "))
}

fn rate_achievement() -> Outcome {
    let mut count = 0;
    for n in 2..=9 {
        for k in 2..=9 {
            let code = construct(n, k).map_err(|e| format!("({n},{k}): {e}"))?;
            let bound = rate_bound_row_monomial(n, k).map_err(|e| e.to_string())?.value();
            ensure(code.rate() == bound, || format!("({n},{k}) rate {} vs bound {bound}", code.rate()))?;
            count += 1;
        }
    }
    Ok(format!("{count} codes at the row-monomial bound"))
}

fn rate_table() -> Outcome {
    let q = Ratio::<u64>::new;
    let expect = |c: ParityClass, l: u64, m: u64| match c {
        ParityClass::EvenEven => (q(1, m), q(1, m), q(0, 1)),
        ParityClass::OddEven => (q(1, m), q(2 * l + 1, 2 * l * m + 2 * m), q(1, 2 * l * m + 2 * m)),
        ParityClass::EvenOdd => (q(2, 2 * m + 1), q(1, 1 + m), q(1, (2 * m + 1) * (m + 1))),
        ParityClass::OddOdd => {
            let d = 2 * l * m + l + m + 1;
            let a = 2 * l * m + 2 * m + l + 1;
            let b = 2 * l * m + 2 * l + m + 1;
            (
                q(2 * l + 1, d),
                q(2 * l + 1, a).min(q(2 * l + 1, b)),
                q(m * (2 * l + 1), d * a).max(q(l * (2 * l + 1), d * b)),
            )
        }
    };
    let table = emit_rate_table(9, 9).map_err(|e| e.to_string())?;
    ensure(table.symbolic.len() == 4, || "expected four symbolic rows".into())?;
    let mut rng = substream(3, 0, 0);
    let points: Vec<(u64, u64)> = (0..20).map(|_| (rng.random_range(1..=12), rng.random_range(1..=12))).collect();
    for row in &table.symbolic {
        for &(l, m) in &points {
            ensure(row.evaluate(l, m) == expect(row.class, l, m), || {
                format!("{:?} at l={l}, m={m}", row.class)
            })?;
        }
    }
    for r in &table.rows {
        let (l, m) = ((r.n / 2) as u64, (r.k / 2) as u64);
        ensure((r.dostbc, r.row_monomial, r.difference) == expect(r.class, l, m), || {
            format!("numeric row ({}, {})", r.n, r.k)
        })?;
    }
    Ok(format!("4 rows x 20 (l,m) points, {} numeric rows", table.rows.len()))
}

fn perturb<R: Rng>(code: &DistributedCode, rng: &mut R) -> DistributedCode {
    let relay = rng.random_range(0..code.n_relays());
    let conj = rng.random_bool(0.5);
    let n = rng.random_range(0..code.n_symbols());
    let t = rng.random_range(0..code.length());
    let pair = code.relay(relay);
    let current = if conj { pair.b() } else { pair.a() }.get(n, t);
    let choices: Vec<GaussianUnit> = [GaussianUnit::Zero]
        .into_iter()
        .chain(GaussianUnit::NONZERO)
        .filter(|u| *u != current)
        .collect();
    code.with_entry(relay, conj, n, t, choices[rng.random_range(0..choices.len())])
}

fn weighted_vs_channel_free() -> Outcome {
    let opts = VerifyOptions {
        draws: 8,
        tol: 1e-9,
        ..VerifyOptions::default()
    };
    let mut codes = Vec::new();
    for n in 2..=9 {
        for k in 2..=9 {
            codes.push(construct(n, k).map_err(|e| e.to_string())?);
        }
    }
    let constructed = codes.len();
    let mut rng = substream(4, 0, 0);
    for _ in 0..50 {
        let base = codes[rng.random_range(0..constructed)].clone();
        codes.push(perturb(&base, &mut rng));
    }
    let mut disagreements = Vec::new();
    let mut perturbed_pass = 0;
    for (i, code) in codes.iter().enumerate() {
        let cf = check_channel_free_orthogonality(code).passed();
        let w = check_weighted_orthogonality(code, &opts).map_err(|e| e.to_string())?.check.passed;
        if cf != w {
            disagreements.push(format!("#{i} channel-free {cf}, weighted {w}:\n{}", code.render()));
        }
        if i >= constructed && w {
            perturbed_pass += 1;
        }
    }
    ensure(disagreements.is_empty(), || disagreements.join("\n"))?;
    Ok(format!(
        "{constructed} constructed + 50 perturbed ({perturbed_pass} perturbed still pass), 0 disagreements"
    ))
}

/// Random column-monomial candidate: each relay puts at most one entry per
/// column across `A_k + B_k`. With `row_monomial` every row of every
/// matrix holds at most one entry; otherwise one row is forced to hold two.
fn candidate<R: Rng>(rng: &mut R, row_monomial: bool) -> DistributedCode {
    let n = rng.random_range(1..=3);
    let k = rng.random_range(1..=3);
    let t = rng.random_range(2..=6);
    let mut relays = Vec::new();
    let mut a_rows: Vec<Vec<Vec<GaussianUnit>>> = vec![vec![vec![GaussianUnit::Zero; t]; n]; k];
    let mut b_rows = a_rows.clone();
    for relay in 0..k {
        let mut used = vec![[false; 2]; n];
        for col in 0..t {
            if !rng.random_bool(0.6) {
                continue;
            }
            let conj = rng.random_bool(0.5);
            let sym = rng.random_range(0..n);
            if row_monomial && used[sym][conj as usize] {
                continue;
            }
            used[sym][conj as usize] = true;
            let u = GaussianUnit::NONZERO[rng.random_range(0..4)];
            if conj {
                b_rows[relay][sym][col] = u;
            } else {
                a_rows[relay][sym][col] = u;
            }
        }
    }
    if !row_monomial {
        // two entries in one row of one matrix, in columns nobody else uses
        let relay = rng.random_range(0..k);
        let sym = rng.random_range(0..n);
        let conj = rng.random_bool(0.5);
        let (c1, c2) = (0, 1);
        for r in 0..k {
            for s in 0..n {
                for c in [c1, c2] {
                    if r == relay {
                        a_rows[r][s][c] = GaussianUnit::Zero;
                        b_rows[r][s][c] = GaussianUnit::Zero;
                    }
                }
            }
        }
        let target = if conj { &mut b_rows[relay][sym] } else { &mut a_rows[relay][sym] };
        target[c1] = GaussianUnit::NONZERO[rng.random_range(0..4)];
        target[c2] = GaussianUnit::NONZERO[rng.random_range(0..4)];
    }
    for relay in 0..k {
        let a = UnitMatrix::from_rows(a_rows[relay].clone()).unwrap();
        let b = UnitMatrix::from_rows(b_rows[relay].clone()).unwrap();
        relays.push(RelayMatrixPair::new(a, b).unwrap());
    }
    DistributedCode::new(n, t, relays).unwrap()
}

fn diagonal_r_iff_row_monomial() -> Outcome {
    let mut rng = substream(5, 0, 0);
    let opts = VerifyOptions::default();
    let (mut agree, mut total, mut rm) = (0, 0, 0);
    for i in 0..200 {
        let code = candidate(&mut rng, i % 2 == 0);
        let s = check_structural(&code);
        ensure(s.basic_passed(), || format!("candidate {i} is not column-monomial:\n{}", code.render()))?;
        ensure(s.row_monomial.passed == (i % 2 == 0), || format!("candidate {i} has the wrong row pattern"))?;
        let out = check_diagonal_r(&code, &opts).map_err(|e| e.to_string())?;
        total += 1;
        rm += s.row_monomial.passed as usize;
        if out.diagonal == s.row_monomial.passed {
            agree += 1;
        }
    }
    ensure(agree == total, || format!("{agree}/{total} agree"))?;
    Ok(format!("{agree}/{total} agree ({rm} row-monomial)"))
}

fn covariance_law() -> Outcome {
    let code = construct_even_even(4, 4).map_err(|e| e.to_string())?;
    let power = PowerConfig::from_snr_db(10.0, vec![1.0; 4]);
    let t = code.length();
    let mut worst: f64 = 0.0;
    for d in 0..3 {
        let draw = draw_channels(4, &mut substream(6, 1, d));
        let mut rng = substream(6, 2, d);
        let s = vec![Complex64::new(0.0, 0.0); 4];
        let mut acc = CMatrix::zeros(t, t);
        let frames = 100_000;
        for _ in 0..frames {
            let f = simulate_frame_with_draw(&code, &s, &power, draw.clone(), &mut rng, true, Scheme::Dostbc)
                .map_err(|e| e.to_string())?;
            let y = CMatrix::from_row_slice(1, t, &f.y_d);
            acc += y.adjoint() * y;
        }
        acc /= Complex64::new(frames as f64, 0.0);
        let r = noise_covariance(&code, &draw.f, &power.rho_profile()).map_err(|e| e.to_string())?;
        worst = worst.max((acc - &r).norm() / r.norm());
    }
    ensure(worst < 0.03, || format!("relative Frobenius error {worst:.4}"))?;
    Ok(format!("worst relative Frobenius error {worst:.4} < 0.03"))
}

fn decoder_equivalence() -> Outcome {
    let qpsk = Constellation::by_name("qpsk").map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (n, k) in [(2, 2), (4, 4)] {
        let code = VerifiedCode::new(construct_even_even(n, k).map_err(|e| e.to_string())?, &VerifyOptions::default())
            .map_err(|e| e.to_string())?;
        let mut rng = substream(7, n as u64, 0);
        let mut mismatches = 0;
        for i in 0..10_000 {
            let snr = [0.0, 5.0, 10.0, 15.0][i % 4];
            let power = PowerConfig::from_snr_db(snr, vec![1.0; k]);
            let c = qpsk.scaled(power.es);
            let s: Vec<Complex64> = (0..n).map(|_| c.point(rng.random_range(0..4))).collect();
            let f = simulate_dostbc_frame(code.code(), &s, &power, &mut rng, true).map_err(|e| e.to_string())?;
            let a = single_symbol_ml_decode(&f, &code, &c).map_err(|e| e.to_string())?;
            let b = joint_ml_decode(&f, code.code(), &c, DEFAULT_JOINT_BUDGET).map_err(|e| e.to_string())?;
            if a.symbols != b.symbols {
                mismatches += 1;
            }
        }
        ensure(mismatches == 0, || format!("X({n},{k}): {mismatches} mismatches"))?;
        notes.push(format!("X({n},{k}) 0/10000"));
    }
    Ok(notes.join(", "))
}

fn ber_superiority() -> Outcome {
    let grid = SnrGrid {
        start: 8.0,
        step: 2.0,
        stop: 20.0,
    };
    let cfg = |scheme, seed| {
        let mut c = ExperimentConfig::new(scheme, 4, 4);
        c.bps = Some(1.0);
        c.snr = grid;
        c.trials = 100_000;
        c.seed = seed;
        c
    };
    let d = run_ber(&cfg(Scheme::Dostbc, 81)).map_err(|e| e.to_string())?;
    let r = run_ber(&cfg(Scheme::Repetition, 82)).map_err(|e| e.to_string())?;
    ensure(d.meta.constellation == "qpsk" && r.meta.constellation == "16qam", || {
        format!("pairing {} / {}", d.meta.constellation, r.meta.constellation)
    })?;
    let mut worst_gap = f64::INFINITY;
    for (pd, pr) in d.points.iter().zip(&r.points) {
        ensure(pd.ber < pr.ber && pd.ci_high < pr.ci_low, || {
            format!(
                "{} dB: dostbc {:.3e} [{:.3e}, {:.3e}] vs repetition {:.3e} [{:.3e}, {:.3e}]",
                pd.snr_db, pd.ber, pd.ci_low, pd.ci_high, pr.ber, pr.ci_low, pr.ci_high
            )
        })?;
        worst_gap = worst_gap.min(pr.ci_low / pd.ci_high);
    }
    Ok(format!(
        "{} points, 1e5 frames each, smallest ratio of interval edges {worst_gap:.2}",
        d.points.len()
    ))
}

fn diversity() -> Outcome {
    let cfg = |scheme, seed| {
        let mut c = ExperimentConfig::new(scheme, 2, 2);
        c.bps = Some(1.0);
        c.snr = SnrGrid {
            start: 18.0,
            step: 3.0,
            stop: 30.0,
        };
        c.trials = 50_000_000;
        c.target_errors = Some(500);
        c.seed = seed;
        c
    };
    let d = run_ber(&cfg(Scheme::Dostbc, 91)).map_err(|e| e.to_string())?;
    let r = run_ber(&cfg(Scheme::Repetition, 92)).map_err(|e| e.to_string())?;
    let sd = estimate_diversity(&d.points, (18.0, 30.0), 200).map_err(|e| e.to_string())?;
    let sr = estimate_diversity(&r.points, (18.0, 30.0), 200).map_err(|e| e.to_string())?;
    ensure((1.5..=2.5).contains(&sd.slope), || format!("dostbc slope {:.3}", sd.slope))?;
    ensure((sd.slope - sr.slope).abs() < 0.5, || {
        format!("slopes {:.3} vs {:.3}", sd.slope, sr.slope)
    })?;
    Ok(format!(
        "K=2 slopes: dostbc {:.3} (r2 {:.3}), repetition {:.3}, 18..30 dB",
        sd.slope, sd.r2, sr.slope
    ))
}

fn search_floor() -> Outcome {
    let a = min_length_search(2, 2, 4, DEFAULT_SEARCH_BUDGET)
        .map_err(|e| e.to_string())?
        .ok_or("no (2,2) code with T <= 4")?;
    ensure(a.t == 2, || format!("(2,2) gave T = {}", a.t))?;
    let v = verify(&a.witness, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(v.verdict != Verdict::NotDostbc, || "(2,2) witness fails verification".into())?;
    let b = min_length_search(1, 2, 4, DEFAULT_SEARCH_BUDGET)
        .map_err(|e| e.to_string())?
        .ok_or("no (1,2) code with T <= 4")?;
    ensure(b.t == 2, || format!("(1,2) gave T = {}", b.t))?;
    Ok("(2,2) T = 2 = ceil(4/2); (1,2) T = 2 > ceil(2/2) = 1".to_string())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "construction fidelity", limit: Duration::from_secs(1), run: fidelity },
        Criterion { id: 2, name: "rate achievement", limit: Duration::from_secs(10), run: rate_achievement },
        Criterion { id: 3, name: "rate table", limit: Duration::from_secs(60), run: rate_table },
        Criterion { id: 4, name: "channel-free vs weighted", limit: Duration::from_secs(30), run: weighted_vs_channel_free },
        Criterion { id: 5, name: "diagonal R iff row-monomial", limit: Duration::from_secs(60), run: diagonal_r_iff_row_monomial },
        Criterion { id: 6, name: "noise covariance law", limit: Duration::from_secs(60), run: covariance_law },
        Criterion { id: 7, name: "decoder equivalence", limit: Duration::from_secs(300), run: decoder_equivalence },
        Criterion { id: 8, name: "BER superiority (4,4) 1 bps/Hz", limit: Duration::from_secs(1800), run: ber_superiority },
        Criterion { id: 9, name: "diversity order K=2", limit: Duration::from_secs(1800), run: diversity },
        Criterion { id: 10, name: "search floor", limit: Duration::from_secs(300), run: search_floor },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > c.limit => Err(format!("{msg}; over the {:?} budget", c.limit)),
            other => other,
        };
        let (tag, msg) = match &result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {:>2} {tag} {} ({:.2} s): {msg}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
