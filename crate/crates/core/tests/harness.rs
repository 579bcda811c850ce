use dostbc::channel::Scheme;
use dostbc::codebook::{rate_bound_dostbc, rate_bound_row_monomial};
use dostbc::harness::{
    emit_rate_table, estimate_diversity, pair_constellations, run_ber, BerPoint, ExperimentConfig,
    ParityClass, SnrGrid,
};
use dostbc::Error;
use num_rational::Ratio;

type Q = Ratio<u64>;

/// Closed-form rate table, one arm per parity class: `(dostbc, row-monomial, difference)`.
fn closed_form(class: ParityClass, l: u64, m: u64) -> (Q, Q, Q) {
    let q = Q::new;
    match class {
        ParityClass::EvenEven => (q(1, m), q(1, m), q(0, 1)),
        ParityClass::OddEven => (q(1, m), q(2 * l + 1, 2 * l * m + 2 * m), q(1, 2 * l * m + 2 * m)),
        ParityClass::EvenOdd => (q(2, 2 * m + 1), q(1, 1 + m), q(1, (2 * m + 1) * (m + 1))),
        ParityClass::OddOdd => {
            let d = 2 * l * m + l + m + 1;
            let a = 2 * l * m + 2 * m + l + 1;
            let b = 2 * l * m + 2 * l + m + 1;
            let rm = if q(2 * l + 1, a) < q(2 * l + 1, b) { q(2 * l + 1, a) } else { q(2 * l + 1, b) };
            let x = q(m * (2 * l + 1), d * a);
            let y = q(l * (2 * l + 1), d * b);
            (q(2 * l + 1, d), rm, if x > y { x } else { y })
        }
    }
}

fn lm_points() -> Vec<(u64, u64)> {
    // 20 points, including l != m in both directions and a few large values
    vec![
        (1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2), (3, 3), (4, 1),
        (1, 4), (4, 4), (5, 2), (2, 5), (6, 3), (3, 7), (8, 8), (10, 1), (1, 10), (12, 9),
    ]
}

#[test]
fn rate_table_rows_match_at_twenty_points() {
    let table = emit_rate_table(2, 2).unwrap();
    assert_eq!(table.symbolic.len(), 4);
    let points = lm_points();
    assert_eq!(points.len(), 20);
    for row in &table.symbolic {
        for &(l, m) in &points {
            let expect = closed_form(row.class, l, m);
            assert_eq!(row.evaluate(l, m), expect, "{:?} at l={l}, m={m}", row.class);
            let (n, k) = row.class.dims(l, m);
            let d = rate_bound_dostbc(n, k).unwrap().value();
            let r = rate_bound_row_monomial(n, k).unwrap().value();
            assert_eq!((d, r, d - r), expect, "numeric bounds at N={n}, K={k}");
        }
    }
}

#[test]
fn rate_table_expressions() {
    let t = emit_rate_table(9, 9).unwrap();
    let get = |c: ParityClass| t.symbolic.iter().find(|r| r.class == c).unwrap();
    assert_eq!(get(ParityClass::EvenEven).difference, "0");
    assert_eq!(get(ParityClass::OddEven).difference, "1/(2lm+2m)");
    assert_eq!(get(ParityClass::EvenOdd).dostbc, "2/(2m+1)");
    assert_eq!(get(ParityClass::OddOdd).dostbc, "(2l+1)/(2lm+l+m+1)");
    let row = t.rows.iter().find(|r| r.n == 4 && r.k == 5).unwrap();
    assert_eq!((row.dostbc, row.row_monomial, row.difference), (Q::new(2, 5), Q::new(1, 3), Q::new(1, 15)));
    assert!(t.series.iter().any(|s| s.n == 2) && t.series.iter().any(|s| s.n == 3));
    assert!(matches!(emit_rate_table(1, 5), Err(Error::InvalidParameters(_))));
}

#[test]
fn pairings() {
    let name = |n, k| {
        let (d, r) = pair_constellations(n, k, 1.0).unwrap();
        (d.constellation.name().to_string(), r.constellation.name().to_string())
    };
    assert_eq!(name(4, 4), ("qpsk".into(), "16qam".into()));
    assert_eq!(name(5, 5), ("8psk".into(), "32qam".into()));
    match pair_constellations(5, 4, 1.0) {
        Err(Error::InfeasiblePairing(msg)) => assert!(msg.contains("2^{12/5}"), "{msg}"),
        other => panic!("expected infeasible pairing, got {other:?}"),
    }
}

#[test]
fn pairing_soundness() {
    for n in 2..=9 {
        for k in 2..=9 {
            for bps in [1.0, 2.0] {
                if let Ok((d, r)) = pair_constellations(n, k, bps) {
                    let bd = d.rate * Q::from_integer(d.constellation.bits_per_symbol() as u64);
                    let br = r.rate * Q::from_integer(r.constellation.bits_per_symbol() as u64);
                    assert_eq!(bd, br, "({n},{k}) at {bps}");
                }
            }
        }
    }
}

fn small(scheme: Scheme) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(scheme, 4, 4);
    cfg.snr = SnrGrid {
        start: 4.0,
        step: 4.0,
        stop: 12.0,
    };
    cfg.trials = 3000;
    cfg.seed = 7;
    cfg
}

#[test]
fn same_seed_same_csv() {
    for scheme in [Scheme::Dostbc, Scheme::Repetition] {
        let a = run_ber(&small(scheme)).unwrap();
        let b = run_ber(&small(scheme)).unwrap();
        assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
        assert_eq!(a.meta.config_hash, b.meta.config_hash);
        let mut other = small(scheme);
        other.seed = 8;
        assert_ne!(run_ber(&other).unwrap().meta.config_hash, a.meta.config_hash);
    }
}

#[test]
fn every_point_has_an_interval() {
    let curve = run_ber(&small(Scheme::Dostbc)).unwrap();
    assert_eq!(curve.meta.constellation, "qpsk");
    for p in &curve.points {
        assert!(p.ci_low <= p.ber && p.ber <= p.ci_high);
        let bits = p.trials * curve.meta.bits_per_frame;
        assert_eq!(p.ber, p.bit_errors as f64 / bits as f64);
    }
    let rep = run_ber(&small(Scheme::Repetition)).unwrap();
    assert_eq!(rep.meta.constellation, "16qam");
    assert_eq!(rep.meta.per_relay_scale, vec![2.0; 4]);
}

#[test]
fn forced_mismatch_is_rejected_without_force() {
    let mut cfg = small(Scheme::Dostbc);
    cfg.constellation = Some("16qam".into());
    assert!(matches!(run_ber(&cfg), Err(Error::InfeasiblePairing(_))));
    cfg.force = true;
    cfg.trials = 10;
    assert!(run_ber(&cfg).is_ok());
}

#[test]
fn synthetic_power_law_slope() {
    let points: Vec<BerPoint> = (0..8)
        .map(|i| {
            let snr_db = 10.0 + 3.0 * i as f64;
            let ber = 0.2 * 10f64.powf(-3.0 * snr_db / 10.0);
            BerPoint {
                snr_db,
                trials: 1,
                bit_errors: 1000,
                ber,
                ci_low: ber,
                ci_high: ber,
            }
        })
        .collect();
    let est = estimate_diversity(&points, (10.0, 31.0), 200).unwrap();
    assert!((est.slope - 3.0).abs() < 1e-6);
    assert!(matches!(
        estimate_diversity(&points[..2], (0.0, 100.0), 200),
        Err(Error::InsufficientData(_))
    ));
}
