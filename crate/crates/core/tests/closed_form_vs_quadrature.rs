use crsnoma_core::analytic::{
    rate_s1_mrc, rate_s1_sc, rate_s1_single, rate_s2_mrc, rate_s2_sc, rate_s2_single,
};
use crsnoma_core::quad_oracle::{quad_rate_s1, quad_rate_s2, QuadratureSettings};
use crsnoma_core::{Combiner, Method, SystemConfig};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn layouts() -> Vec<(u32, u32, Combiner)> {
    let mut v = vec![(1, 1, Combiner::Single)];
    for (nr, nd) in [(1, 1), (2, 2), (3, 2)] {
        v.push((nr, nd, Combiner::Sc));
        v.push((nr, nd, Combiner::Mrc));
    }
    v
}

#[test]
fn closed_forms_match_quadrature_on_reference_grid() {
    let s = QuadratureSettings::default();
    for (nr, nd, c) in layouts() {
        for a2 in [0.05, 0.2] {
            for q in [1.0, 10.0, 100.0, 1e4] {
                let cfg = SystemConfig::reference()
                    .with_a2(a2)
                    .with_q(q)
                    .with_antennas(nr, nd, c);
                let (s1, s2, tol2) = match c {
                    Combiner::Single => (rate_s1_single(&cfg), rate_s2_single(&cfg), 1e-6),
                    Combiner::Sc => (rate_s1_sc(&cfg), rate_s2_sc(&cfg), 1e-6),
                    Combiner::Mrc => {
                        let (v, m) = rate_s2_mrc(&cfg).unwrap();
                        assert_eq!(m, Method::ClosedForm, "{c} ({nr},{nd}) a2={a2} q={q}");
                        (rate_s1_mrc(&cfg).unwrap(), v, 1e-4)
                    }
                };
                let q1 = quad_rate_s1(&cfg, &s).unwrap();
                let q2 = quad_rate_s2(&cfg, &s).unwrap();
                assert!(
                    rel(s1, q1) < 1e-6,
                    "s1 {c} ({nr},{nd}) a2={a2} q={q}: {s1} vs {q1}"
                );
                assert!(
                    rel(s2, q2) < tol2,
                    "s2 {c} ({nr},{nd}) a2={a2} q={q}: {s2} vs {q2}"
                );
            }
        }
    }
}

#[test]
fn halving_tolerances_stays_within_reported_error() {
    let s = QuadratureSettings::default();
    let cfg = SystemConfig::reference()
        .with_antennas(2, 2, Combiner::Mrc)
        .with_q(10.0);
    let a = quad_rate_s2(&cfg, &s).unwrap();
    let b = quad_rate_s2(&cfg, &s.halved()).unwrap();
    assert!((a - b).abs() <= 1e-9 * a.max(1.0));
}

#[test]
fn sc_and_mrc_reduce_to_single_antenna_on_5x5_grid() {
    for a2 in [0.01, 0.06, 0.12, 0.18, 0.24] {
        for q in [0.1, 1.0, 10.0, 1e3, 1e5] {
            let single = SystemConfig::reference().with_a2(a2).with_q(q);
            let sc = single.with_antennas(1, 1, Combiner::Sc);
            let mrc = single.with_antennas(1, 1, Combiner::Mrc);
            let (r1, r2) = (rate_s1_single(&single), rate_s2_single(&single));
            assert!((rate_s1_sc(&sc) - r1).abs() < 1e-9);
            assert!((rate_s2_sc(&sc) - r2).abs() < 1e-9);
            assert!(rel(rate_s1_mrc(&mrc).unwrap(), r1) < 1e-6);
            assert!(rel(rate_s2_mrc(&mrc).unwrap().0, r2) < 1e-6);
        }
    }
}
