//! Explicit T-Schottky configurations: circle pair + line pair, the loxodromic
//! variant, the equal-circle chain and the non-classical witness curve.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

use num_complex::Complex64;

use crate::classifier::{classify_lambda, LambdaParam, Region};
use crate::config::{ConfigGeometryParams, ConfigKind, SchottkyConfiguration};
use crate::error::{Error, Result};
use crate::moebius::{standard_generators, Mat2, MoebiusMap, SpherePoint};
use crate::sphere::GeneralizedCircle;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Circle-slab width t·[1 + 1/(2t cos φ − 1)]·[1 + cos ψ].
pub fn d_c(t: f64, phi: f64, psi: f64) -> f64 {
    t * (1.0 + 1.0 / (2.0 * t * phi.cos() - 1.0)) * (1.0 + psi.cos())
}

/// Signed line separation: the dot product of 2λ with e^{i(φ+ψ)}.
pub fn d_l(lambda: Complex64, phi: f64, psi: f64) -> f64 {
    (lambda * 2.0 * Complex64::from_polar(1.0, -(phi + psi))).re
}

pub fn build_classical_config(lambda: Complex64, eps: f64) -> Result<SchottkyConfiguration> {
    let report = classify_lambda(lambda, eps)?;
    if !report.is_classical {
        return Err(Error::NotClassical(report.margins.classical));
    }
    let rep = report.lambda.rep;
    let psi = FRAC_PI_2;
    let phi = report.lambda.omega / 2.0 - FRAC_PI_4;
    let tau = Complex64::new(1.0, phi.tan());
    let t = tau.norm();
    let u = Complex64::from_polar(1.0, phi + psi);
    let dc = d_c(t, phi, psi);
    let dl = d_l(rep, phi, psi);

    let c1 = GeneralizedCircle::circle(-tau, t);
    let c2 = GeneralizedCircle::circle(tau / (tau + tau.conj() - 1.0), t / (2.0 * tau.re - 1.0));
    let l1 = GeneralizedCircle::line(u, -dl / 2.0).flipped();
    let l2 = GeneralizedCircle::line(u, dl / 2.0);

    let (s, t_rep) = standard_generators(rep, eps)?;
    let mut cfg = SchottkyConfiguration::new(ConfigKind::ClassicalPP, lambda);
    cfg.sides = vec![c1, c2, l1, l2];
    cfg.pairings = vec![(0, 1, s), (2, 3, t_rep)];
    cfg.tangencies = vec![(0, 1, SpherePoint::finite(0.0, 0.0)), (2, 3, SpherePoint::Infinity)];
    let gap = (dl - dc) / 2.0;
    if gap.abs() <= eps || report.on_classical_boundary {
        for (side, line, corner) in [
            (0, 3, Complex64::new(-1.0, 1.0)),
            (0, 2, Complex64::new(-1.0, -1.0)),
            (1, 3, Complex64::new(1.0, 1.0)),
            (1, 2, Complex64::new(1.0, -1.0)),
        ] {
            cfg.tangencies.push((side, line, SpherePoint::Finite(tau * corner)));
        }
    }
    cfg.params = Some(ConfigGeometryParams { psi, phi, t, tau, d_c: dc, d_l: dl });
    Ok(cfg)
}

/// Moves λ to the closed first quadrant by λ ↦ −λ then λ ↦ conj λ, and back.
#[derive(Clone, Copy, Debug)]
struct Frame {
    q: Complex64,
    conj: bool,
}

impl Frame {
    fn new(lambda: Complex64) -> Frame {
        let mu = if lambda.re < 0.0 || (lambda.re == 0.0 && lambda.im < 0.0) { -lambda } else { lambda };
        if mu.im < 0.0 {
            Frame { q: mu.conj(), conj: true }
        } else {
            Frame { q: mu, conj: false }
        }
    }

    fn point(&self, z: Complex64) -> Complex64 {
        if self.conj {
            z.conj()
        } else {
            z
        }
    }

    fn circle(&self, c: GeneralizedCircle) -> GeneralizedCircle {
        if self.conj {
            c.conj()
        } else {
            c
        }
    }

    fn map(&self, m: MoebiusMap) -> MoebiusMap {
        if self.conj {
            m.conj()
        } else {
            m
        }
    }
}

/// Feasible Im τ for Re τ = 1: 1 + v² ≤ x + yv ≤ |q|²/2.
fn lp_tau(q: Complex64, eps: f64) -> Option<Complex64> {
    let (x, y) = (q.re, q.im);
    let ok = |v: f64| {
        let tau = Complex64::new(1.0, v);
        (tau - q).norm() >= tau.norm() - eps && (tau - q / 2.0).norm() <= (q / 2.0).norm() + eps
    };
    let mid = (y - x) / 2.0;
    if ok(mid) {
        return Some(Complex64::new(1.0, mid));
    }
    let disc = y * y - 4.0 + 4.0 * x;
    if disc < 0.0 {
        return None;
    }
    let mut lo = (y - disc.sqrt()) / 2.0;
    let mut hi = (y + disc.sqrt()) / 2.0;
    let cap = q.norm_sqr() / 2.0 - x;
    if y > 0.0 {
        hi = hi.min(cap / y);
    } else if cap < 0.0 {
        return None;
    }
    if hi < lo {
        if hi < lo - eps {
            return None;
        }
        lo = hi;
    }
    let v = (lo + hi) / 2.0;
    ok(v).then(|| Complex64::new(1.0, v))
}

pub fn build_lp_config(lambda: Complex64, eps: f64) -> Result<SchottkyConfiguration> {
    let report = classify_lambda(lambda, eps)?;
    if !report.is_marked_lp {
        return Err(Error::NotMarkedLP(report.margins.marked_lp));
    }
    let frame = Frame::new(lambda);
    let q = frame.q;
    let tau = lp_tau(q, eps).ok_or(Error::NotMarkedLP(report.margins.marked_lp))?;
    let r = tau.norm();
    let nrm = tau / r;

    let c1 = GeneralizedCircle::circle(tau / (tau + tau.conj() - 1.0) - q * 2.0, r / (2.0 * tau.re - 1.0));
    let c2 = GeneralizedCircle::circle(-tau, r);
    let l2 = GeneralizedCircle::line(nrm, 0.0);
    let l1 = GeneralizedCircle::line(nrm, (-q * 2.0 * nrm.conj()).re).flipped();

    let two_q = q * 2.0;
    let rmap = MoebiusMap::from_mat(Mat2::new(
        Complex64::new(1.0, 0.0),
        two_q,
        Complex64::new(-1.0, 0.0),
        Complex64::new(1.0, 0.0) - two_q,
    ))?;
    let tmap = MoebiusMap::from_mat(Mat2::new(
        Complex64::new(1.0, 0.0),
        two_q,
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ))?;

    let mut tang = vec![
        (1, 3, Complex64::new(0.0, 0.0)),
        (0, 2, -two_q),
    ];
    if ((tau - q).norm() - r).abs() <= eps {
        tang.push((0, 1, -q));
    }
    if ((tau - q / 2.0).norm() - (q / 2.0).norm()).abs() <= eps {
        tang.push((0, 3, tau * 2.0 - two_q));
        tang.push((1, 2, -tau * 2.0));
    }

    let mut cfg = SchottkyConfiguration::new(ConfigKind::MarkedLP, lambda);
    cfg.sides = [c1, c2, l1, l2].iter().map(|c| frame.circle(*c)).collect();
    cfg.pairings = vec![(0, 1, frame.map(rmap)), (2, 3, frame.map(tmap))];
    cfg.tangencies = tang.into_iter().map(|(i, j, p)| (i, j, SpherePoint::Finite(frame.point(p)))).collect();
    cfg.tangencies.push((2, 3, SpherePoint::Infinity));
    cfg.params = Some(ConfigGeometryParams {
        psi: 0.0,
        phi: tau.arg(),
        t: r,
        tau: frame.point(tau),
        d_c: 2.0 * r,
        d_l: 2.0 * (q * nrm.conj()).re,
    });
    Ok(cfg)
}

/// Slack of the chain condition on the first-quadrant image of λ.
pub fn gamma_chain_margin(lambda: Complex64) -> f64 {
    crate::classifier::margins(&LambdaParam::new(lambda)).lyndon_ullman_k
}

struct Chain {
    frame: Frame,
    tau: Complex64,
    r: f64,
}

impl Chain {
    fn new(lambda: Complex64, eps: f64) -> Result<Chain> {
        if lambda.norm() <= eps {
            return Err(Error::ElementaryGroup);
        }
        if gamma_chain_margin(lambda) < -eps {
            return Err(Error::NotGammaChain);
        }
        let frame = Frame::new(lambda);
        let omega = frame.q.arg();
        let phi = if omega >= FRAC_PI_3 { 0.0 } else { omega - FRAC_PI_3 };
        Ok(Chain { frame, tau: Complex64::from_polar(1.0 / phi.cos(), phi), r: 1.0 / phi.cos() })
    }

    /// Centers of the pair at level n (frame coordinates).
    fn centers(&self, n: i64) -> (Complex64, Complex64) {
        let shift = self.frame.q * (2.0 * n as f64);
        (-self.tau + shift, self.tau + shift)
    }
}

pub fn build_gamma_chain(lambda: Complex64, n_max: usize, eps: f64) -> Result<SchottkyConfiguration> {
    let chain = Chain::new(lambda, eps)?;
    let q = chain.frame.q;
    let (s, t) = standard_generators(q, eps)?;
    let mut cfg = SchottkyConfiguration::new(ConfigKind::GammaChain, lambda);
    let mut centers = Vec::new();
    let n_max = n_max as i64;
    for n in -n_max..=n_max {
        let (c, cp) = chain.centers(n);
        centers.push(c);
        centers.push(cp);
        let k = cfg.sides.len();
        cfg.sides.push(chain.frame.circle(GeneralizedCircle::circle(c, chain.r)));
        cfg.sides.push(chain.frame.circle(GeneralizedCircle::circle(cp, chain.r)));
        let mut tn = MoebiusMap::identity();
        for _ in 0..n.abs() {
            tn = if n > 0 { tn * t } else { tn * t.inverse() };
        }
        let g = tn * s * tn.inverse();
        cfg.pairings.push((k, k + 1, chain.frame.map(g)));
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d = (centers[i] - centers[j]).norm();
            if (d - 2.0 * chain.r).abs() <= eps {
                let p = (centers[i] + centers[j]) / 2.0;
                cfg.tangencies.push((i, j, SpherePoint::Finite(chain.frame.point(p))));
            }
        }
    }
    cfg.params = Some(ConfigGeometryParams {
        psi: 0.0,
        phi: chain.tau.arg(),
        t: chain.r,
        tau: chain.frame.point(chain.tau),
        d_c: 2.0 * chain.r,
        d_l: 2.0 * q.norm(),
    });
    Ok(cfg)
}

/// Distance from z to the nearest disc among the given levels (negative inside).
fn level_distance(chain: &Chain, z: Complex64, levels: impl Iterator<Item = i64>) -> f64 {
    let mut best = f64::INFINITY;
    for n in levels {
        let (c, cp) = chain.centers(n);
        best = best.min((z - c).norm() - chain.r).min((z - cp).norm() - chain.r);
    }
    best
}

const WINDOW: i64 = 3;

fn bisector_gap(chain: &Chain, z: Complex64) -> f64 {
    level_distance(chain, z, -WINDOW..=0) - level_distance(chain, z, 1..=WINDOW + 1)
}

/// γ in frame coordinates: u(s) along the chain direction for a grid of s.
fn trace_bisector(chain: &Chain, s_values: &[f64]) -> Result<Vec<Complex64>> {
    let q = chain.frame.q;
    let e = q / q.norm();
    let p = I * e;
    let mut out = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let at = |u: f64| q + p * s + e * u;
        let mut lo = -q.norm();
        let mut hi = q.norm();
        let mut widen = 0;
        while !(bisector_gap(chain, at(lo)) < 0.0 && bisector_gap(chain, at(hi)) > 0.0) {
            lo *= 2.0;
            hi *= 2.0;
            widen += 1;
            if widen > 8 {
                return Err(Error::WitnessSearchFailed(format!("no sign change at s = {s}")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if bisector_gap(chain, at(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(at(0.5 * (lo + hi)));
    }
    Ok(out)
}

/// Tangency points between a level ≤ 0 disc and a level ≥ 1 disc; they lie on γ.
fn cross_level_tangencies(chain: &Chain, eps: f64) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for n in -WINDOW..=0 {
        for m in 1..=WINDOW + 1 {
            let (a, ap) = chain.centers(n);
            let (b, bp) = chain.centers(m);
            for x in [a, ap] {
                for y in [b, bp] {
                    if ((x - y).norm() - 2.0 * chain.r).abs() <= eps {
                        pts.push((x + y) / 2.0);
                    }
                }
            }
        }
    }
    pts
}

/// Checks γ against the chain discs; returns the smallest clearance found.
fn validate_witness(chain: &Chain, gamma: &[Complex64], tangencies: &[Complex64], eps: f64) -> Result<f64> {
    let q = chain.frame.q;
    let e = q / q.norm();
    let p = I * e;
    let coords = |z: Complex64| {
        let w = z - q;
        ((w * p.conj()).re, (w * e.conj()).re)
    };
    let mut clearance = f64::INFINITY;
    for seg in gamma.windows(2) {
        for k in 0..=8 {
            let z = seg[0] + (seg[1] - seg[0]) * (k as f64 / 8.0);
            let d = level_distance(chain, z, -WINDOW - 1..=WINDOW + 2);
            let near_tangency = tangencies.iter().any(|t| (z - t).norm() <= 1e3 * eps.max(1e-12));
            if d < -eps && !near_tangency {
                return Err(Error::WitnessSearchFailed(format!("γ enters a disc at {z}")));
            }
            if !near_tangency {
                clearance = clearance.min(d);
            }
        }
    }
    // u(s) of γ by linear interpolation.
    let u_of = |s: f64| -> Option<f64> {
        for seg in gamma.windows(2) {
            let (s0, u0) = coords(seg[0]);
            let (s1, u1) = coords(seg[1]);
            if (s0..=s1).contains(&s) {
                let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
                return Some(u0 + w * (u1 - u0));
            }
        }
        None
    };
    let shift = 2.0 * q.norm();
    let (c, cp) = chain.centers(0);
    for z in [c, cp] {
        let (s, u) = coords(z);
        let g = u_of(s).ok_or_else(|| Error::WitnessSearchFailed("center outside γ range".into()))?;
        // Level 0 lies between T⁻¹γ and γ.
        if !(u < g && u > g - shift) {
            return Err(Error::WitnessSearchFailed("level 0 not between γ and T⁻¹γ".into()));
        }
    }
    for z in [chain.centers(1).0, chain.centers(1).1] {
        let (s, u) = coords(z);
        let g = u_of(s).ok_or_else(|| Error::WitnessSearchFailed("center outside γ range".into()))?;
        if u <= g {
            return Err(Error::WitnessSearchFailed("level 1 on the wrong side of γ".into()));
        }
    }
    Ok(clearance)
}

/// The two central chain circles with S, plus the curve γ and T⁻¹(γ).
pub fn nonclassical_witness(lambda: Complex64, eps: f64) -> Result<SchottkyConfiguration> {
    let report = classify_lambda(lambda, eps)?;
    if report.summary != Region::NonClassicalTS {
        return Err(Error::NotNonClassical);
    }
    let chain = Chain::new(lambda, eps)?;
    let q = chain.frame.q;
    let clip = 10.0 * (1.0 + lambda.norm());
    let s_max = (clip * clip - q.norm_sqr()).max(1.0).sqrt();
    let tang = cross_level_tangencies(&chain, 1e-9);
    let e = q / q.norm();
    let p = I * e;

    let mut density = 64.0;
    let mut last_err = None;
    for _ in 0..3 {
        let step = chain.r.min(q.norm()) / density;
        let n = (2.0 * s_max / step).ceil() as usize;
        let mut s_values: Vec<f64> = (0..=n).map(|k| -s_max + 2.0 * s_max * k as f64 / n as f64).collect();
        for t in &tang {
            s_values.push(((t - q) * p.conj()).re);
        }
        s_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s_values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut gamma = trace_bisector(&chain, &s_values)?;
        // Snap the exact tangency vertices.
        for t in &tang {
            if let Some(v) = gamma.iter_mut().min_by(|a, b| (**a - t).norm().partial_cmp(&(**b - t).norm()).unwrap()) {
                *v = *t;
            }
        }
        match validate_witness(&chain, &gamma, &tang, 1e-9) {
            Ok(_) => {
                let (c, cp) = chain.centers(0);
                let (s, _) = standard_generators(q, eps)?;
                let mut cfg = SchottkyConfiguration::new(ConfigKind::NonClassicalWitness, lambda);
                cfg.sides = vec![
                    chain.frame.circle(GeneralizedCircle::circle(c, chain.r)),
                    chain.frame.circle(GeneralizedCircle::circle(cp, chain.r)),
                ];
                cfg.pairings = vec![(0, 1, chain.frame.map(s))];
                cfg.tangencies = vec![(0, 1, SpherePoint::finite(0.0, 0.0))];
                let back: Vec<Complex64> = gamma.iter().map(|z| chain.frame.point(*z)).collect();
                let shifted: Vec<Complex64> = gamma.iter().map(|z| chain.frame.point(*z - q * 2.0)).collect();
                cfg.polylines = vec![back, shifted];
                cfg.params = Some(ConfigGeometryParams {
                    psi: 0.0,
                    phi: chain.tau.arg(),
                    t: chain.r,
                    tau: chain.frame.point(chain.tau),
                    d_c: 2.0 * chain.r,
                    d_l: 2.0 * q.norm(),
                });
                return Ok(cfg);
            }
            Err(e) => last_err = Some(e),
        }
        density *= 4.0;
    }
    Err(last_err.unwrap_or_else(|| Error::WitnessSearchFailed("no attempt made".into())))
}

/// Smallest distance from a witness curve to the chain discs of its λ,
/// ignoring the tangency vertices.
pub fn witness_clearance(cfg: &SchottkyConfiguration, eps: f64) -> Result<f64> {
    let chain = Chain::new(cfg.lambda, eps)?;
    let gamma: Vec<Complex64> = cfg.polylines.first().ok_or(Error::NotNonClassical)?.iter().map(|z| chain.frame.point(*z)).collect();
    validate_witness(&chain, &gamma, &cross_level_tangencies(&chain, 1e-9), 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::DEFAULT_EPS;
    use crate::sphere::relation;
    use crate::verifier::verify_configuration;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_examples() {
        let cfg = build_classical_config(c(0.0, 1.0), DEFAULT_EPS).unwrap();
        assert!(cfg.sides[0].approx_eq(&GeneralizedCircle::circle(c(-1.0, 0.0), 1.0), 1e-15));
        assert!(cfg.sides[1].approx_eq(&GeneralizedCircle::circle(c(1.0, 0.0), 1.0), 1e-15));
        assert!(cfg.sides[2].locus_defect(&GeneralizedCircle::line(c(0.0, 1.0), -1.0)) < 1e-15);
        assert!(cfg.sides[3].locus_defect(&GeneralizedCircle::line(c(0.0, 1.0), 1.0)) < 1e-15);
        assert_eq!(cfg.tangencies.len(), 6);
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        let cfg = build_classical_config(c(0.0, 2.0), DEFAULT_EPS).unwrap();
        assert!(cfg.sides[3].locus_defect(&GeneralizedCircle::line(c(0.0, 1.0), 2.0)) < 1e-15);
        assert_eq!(cfg.tangencies.len(), 2);
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        assert!(matches!(build_classical_config(c(0.0, 0.9), DEFAULT_EPS), Err(Error::NotClassical(_))));
    }

    #[test]
    fn lp_examples() {
        let cfg = build_lp_config(c(2.0, 2.0), DEFAULT_EPS).unwrap();
        assert!((cfg.params.unwrap().tau - c(1.0, 0.0)).norm() < 1e-15);
        assert!(cfg.sides[1].approx_eq(&GeneralizedCircle::circle(c(-1.0, 0.0), 1.0), 1e-15));
        assert!(cfg.sides[0].approx_eq(&GeneralizedCircle::circle(c(-3.0, -4.0), 1.0), 1e-15));
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        let cfg = build_lp_config(c(2.0, 0.0), DEFAULT_EPS).unwrap();
        assert!((cfg.params.unwrap().tau - c(1.0, -1.0)).norm() < 1e-15);
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        for lam in [c(-2.5, 0.7), c(0.3, -3.0), c(-1.0, -4.0), c(6.0, 0.0), c(5.5, 0.2)] {
            let cfg = build_lp_config(lam, DEFAULT_EPS).unwrap();
            let rep = verify_configuration(&cfg, 1e-9).unwrap();
            assert!(rep.passed, "{lam}: {rep:?}");
        }
        assert!(matches!(build_lp_config(c(1.0, 0.5), DEFAULT_EPS), Err(Error::NotMarkedLP(_))));
    }

    #[test]
    fn gamma_chain_examples() {
        let lam = Complex64::from_polar(1.0, FRAC_PI_3);
        let cfg = build_gamma_chain(lam, 2, DEFAULT_EPS).unwrap();
        assert_eq!(cfg.sides.len(), 10);
        assert!(cfg.tangencies.len() > 5);
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        let cfg = build_gamma_chain(c(3.0, 0.0), 1, DEFAULT_EPS).unwrap();
        assert!((cfg.params.unwrap().t - 2.0).abs() < 1e-12);
        for i in 0..cfg.sides.len() {
            for j in i + 1..cfg.sides.len() {
                assert!(relation(&cfg.sides[i], &cfg.sides[j], 1e-9).is_tangent_or_disjoint());
            }
        }
        assert!(matches!(build_gamma_chain(c(0.0, 0.8), 1, DEFAULT_EPS), Err(Error::NotGammaChain)));
    }

    #[test]
    fn witness_examples() {
        let cfg = nonclassical_witness(Complex64::from_polar(1.0, FRAC_PI_3), DEFAULT_EPS).unwrap();
        assert_eq!(cfg.polylines.len(), 2);
        assert!(witness_clearance(&cfg, DEFAULT_EPS).unwrap() >= -1e-9);

        let cfg = nonclassical_witness(Complex64::from_polar(1.05, FRAC_PI_3), DEFAULT_EPS).unwrap();
        assert!(witness_clearance(&cfg, DEFAULT_EPS).unwrap() > 1e-3);

        assert!(matches!(nonclassical_witness(c(0.0, 2.0), DEFAULT_EPS), Err(Error::NotNonClassical)));
    }

    #[test]
    fn slab_width_minimum() {
        let phi = 0.3_f64;
        let t0 = 1.0 / phi.cos();
        assert!((d_c(t0, phi, FRAC_PI_2) - 2.0 * t0).abs() < 1e-12);
    }
}
