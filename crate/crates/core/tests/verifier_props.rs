use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tschottky::builder::{build_classical_config, build_gamma_chain, build_lp_config};
use tschottky::classifier::{classify_lambda, margins, LambdaParam};
use tschottky::moebius::{standard_generators, MoebiusMap, SpherePoint};
use tschottky::nsdc::{build_nsdc_config, NsdcSign, OrthoEnd};
use tschottky::sphere::GeneralizedCircle;
use tschottky::verifier::{elliptic_scan, nsdc_search_oracle, ping_pong_oracle, verify_configuration};
use tschottky::SchottkyConfiguration;

const EPS: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn off_curve(g: &GeneralizedCircle, w: Complex64) -> f64 {
    match *g {
        GeneralizedCircle::Circle { center, radius, .. } => ((w - center).norm() - radius).abs(),
        GeneralizedCircle::Line { normal, offset, .. } => ((w * normal.conj()).re - offset).abs(),
    }
}

/// The pole of m, if finite, keeps at least `gap` from every side.
fn pole_clear(m: &MoebiusMap, cfg: &SchottkyConfiguration, gap: f64) -> bool {
    match m.pole() {
        SpherePoint::Infinity => true,
        SpherePoint::Finite(p) => cfg.sides.iter().all(|g| off_curve(g, p) > gap),
    }
}

fn map() -> impl Strategy<Value = MoebiusMap> {
    let z = || (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| c(a, b));
    (z(), z(), z())
        .prop_map(|(b, cc, a)| MoebiusMap::new(c(1.0, 0.0) + a * 0.3, b, cc * 0.3, c(1.0, 0.0)))
        .prop_filter_map("invertible", |m| m.ok())
}

#[test]
fn brute_force_search_agrees_with_nsdc_flag() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    while checked < 60 {
        let l = c(rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0));
        let m = margins(&LambdaParam::new(l));
        let slack = m.nsdc_minus.max(m.nsdc_plus);
        if l.norm() < 0.5 || slack.abs() < 0.2 {
            continue;
        }
        checked += 1;
        let found = [l, -l].iter().any(|x| nsdc_search_oracle(&OrthoEnd::standard(*x), 720, 1e-9).is_some());
        if found != (slack > 0.0) {
            mismatches.push((l, slack, found));
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn classical_ping_pong_is_clean() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut n = 0;
    while n < 6 {
        let l = Complex64::from_polar(rng.gen_range(1.0..5.0), rng.gen_range(0.0..TAU));
        if margins(&LambdaParam::new(l)).classical <= 0.1 {
            continue;
        }
        n += 1;
        let (s, t) = standard_generators(l, EPS).unwrap();
        let cfg = build_classical_config(l, EPS).unwrap();
        let rep = ping_pong_oracle(&s, &t, &cfg, 7, EPS).unwrap();
        assert!(rep.violations.is_empty(), "λ = {l}: {:?}", &rep.violations[..rep.violations.len().min(5)]);
        assert_eq!(rep.words_checked, 4 * (3usize.pow(7) - 1) / 2);
        assert!(elliptic_scan(&s, &t, 7, EPS).is_empty(), "λ = {l}");
    }
}

#[test]
fn broken_configs_fail() {
    let mut cfg = build_classical_config(c(0.0, 3.0), EPS).unwrap();
    assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);
    // Swap the pairing to the wrong generator.
    let (s, _) = standard_generators(c(0.0, 3.0), EPS).unwrap();
    cfg.pairings[1].2 = s;
    let rep = verify_configuration(&cfg, 1e-9).unwrap();
    assert!(!rep.passed && rep.max_defect > 1e-3);

    let mut cfg = build_lp_config(c(3.0, 1.0), EPS).unwrap();
    if let GeneralizedCircle::Circle { radius, .. } = &mut cfg.sides[0] {
        *radius *= 1.1;
    }
    assert!(!verify_configuration(&cfg, 1e-9).unwrap().passed);

    let mut cfg = build_classical_config(c(1.0, 2.0), EPS).unwrap();
    cfg.pairings.clear();
    assert!(verify_configuration(&cfg, 1e-9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verification_survives_transport(r in 0.8f64..6.0, w in 0.0..TAU, kind in 0usize..4, m in map()) {
        let l = Complex64::from_polar(r, w);
        let built = match kind {
            0 => build_classical_config(l, EPS),
            1 => build_lp_config(l, EPS),
            2 => build_gamma_chain(l, 1, EPS),
            _ => build_nsdc_config(l, NsdcSign::Minus, EPS),
        };
        let Ok(cfg) = built else { return Ok(()) };
        let report = classify_lambda(l, EPS).unwrap();
        let slack = [report.margins.classical, report.margins.marked_lp, report.margins.lyndon_ullman_k.abs(), report.margins.nsdc_minus][kind];
        prop_assume!(slack > 1e-3);
        prop_assume!(verify_configuration(&cfg, 1e-9).unwrap().passed);
        prop_assume!(pole_clear(&m, &cfg, 0.2));
        let moved = cfg.transported(&m, EPS);
        let rep = verify_configuration(&moved, 1e-7).unwrap();
        prop_assert!(rep.passed, "λ = {} kind {}: {:?}", l, kind, rep.pairing_checks);
    }
}
