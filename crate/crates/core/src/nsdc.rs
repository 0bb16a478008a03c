//! Ortho-ends, θ-circles, the teardrop, and NSDC circle triples.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classifier::classify_lambda;
use crate::config::{ConfigKind, SchottkyConfiguration};
use crate::error::{Error, Result};
use crate::moebius::{classify_element, compose, fixed_points, ElementClass, Mat2, MoebiusMap, SpherePoint};
use crate::sphere::{contact, half_turn, half_turn_mat, nsdc_triple, Contact, GeneralizedCircle};

/// Endpoints of the three axes with A = H_{[a,a′]}·H_{[n,n′]} and B = H_{[b,b′]}·H_{[n,n′]}.
/// For the four-point slice the same tuple is read as (a, a′, b, b′, d, d′).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoEnd {
    pub a: SpherePoint,
    pub a_prime: SpherePoint,
    pub n: SpherePoint,
    pub n_prime: SpherePoint,
    pub b: SpherePoint,
    pub b_prime: SpherePoint,
}

impl OrthoEnd {
    /// The slice (2, 0, 0, ∞, ∞, λ) of the standard pair.
    pub fn standard(lambda: Complex64) -> Self {
        OrthoEnd {
            a: SpherePoint::finite(2.0, 0.0),
            a_prime: SpherePoint::finite(0.0, 0.0),
            n: SpherePoint::finite(0.0, 0.0),
            n_prime: SpherePoint::Infinity,
            b: SpherePoint::Infinity,
            b_prime: lambda.into(),
        }
    }

    /// The point pairs (a, a′), (n, n′), (b, b′).
    pub fn pairs(&self) -> [(SpherePoint, SpherePoint); 3] {
        [(self.a, self.a_prime), (self.n, self.n_prime), (self.b, self.b_prime)]
    }

    /// A and B rebuilt from the three half-turns.
    pub fn rebuild(&self, eps: f64) -> Result<(MoebiusMap, MoebiusMap)> {
        let hl = half_turn(self.n, self.n_prime, eps)?;
        let a = compose(&half_turn(self.a, self.a_prime, eps)?, &hl);
        let b = compose(&half_turn(self.b, self.b_prime, eps)?, &hl);
        Ok((a, b))
    }
}

fn parabolic_fix(m: &MoebiusMap, eps: f64) -> Result<SpherePoint> {
    if classify_element(m, eps) != ElementClass::Parabolic {
        let tr = m.trace();
        return Err(Error::NotParabolic(format!("{}", tr * tr)));
    }
    Ok(fixed_points(m, eps)?[0])
}

/// Splits the fixed points of an involution into (the one near `known`, the other).
fn split_fixed(m: &MoebiusMap, known: SpherePoint, eps: f64) -> Result<SpherePoint> {
    let fp = fixed_points(m, eps)?;
    let dist = |p: &SpherePoint| match (p, known) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => (x - y).norm(),
        _ => f64::INFINITY,
    };
    let other = fp
        .iter()
        .copied()
        .max_by(|p, q| dist(p).partial_cmp(&dist(q)).unwrap())
        .expect("at least one fixed point");
    Ok(other)
}

pub fn ortho_end(a: &MoebiusMap, b: &MoebiusMap, eps: f64) -> Result<OrthoEnd> {
    let n = parabolic_fix(a, eps)?;
    let n_prime = parabolic_fix(b, eps)?;
    if n.approx_eq(&n_prime, eps) {
        return Err(Error::SharedFixedPoint);
    }
    let hl = half_turn(n, n_prime, eps)?;
    let a_other = split_fixed(&compose(a, &hl), n, eps)?;
    let b_other = split_fixed(&compose(b, &hl), n_prime, eps)?;
    Ok(OrthoEnd { a: a_other, a_prime: n, n, n_prime, b: n_prime, b_prime: b_other })
}

/// Member of the one-parameter family of circles tangent to both pull-back
/// circles of angle θ, one tangency at 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThetaCircle {
    /// Center (m, n), radius r.
    Circle { theta: f64, m: f64, n: f64, r: f64 },
    /// θ = ±π/4: the line y = ∓(x − 2).
    Line { theta: f64 },
}

impl ThetaCircle {
    pub fn theta(&self) -> f64 {
        match *self {
            ThetaCircle::Circle { theta, .. } | ThetaCircle::Line { theta } => theta,
        }
    }

    pub fn to_circle(&self) -> GeneralizedCircle {
        match *self {
            ThetaCircle::Circle { m, n, r, .. } => GeneralizedCircle::circle(Complex64::new(m, n), r),
            ThetaCircle::Line { theta } => {
                let s = theta.signum();
                GeneralizedCircle::line(Complex64::new(s, 1.0), 2.0 * s)
            }
        }
    }

    /// (x(θ, t), y(θ, t)) on the circle; for the line, t is arc length from 2.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            ThetaCircle::Circle { m, n, r, .. } => Complex64::new(m + r * t.cos(), n + r * t.sin()),
            ThetaCircle::Line { theta } => {
                Complex64::new(2.0, 0.0) + Complex64::new(1.0, -theta.signum()) * (t / 2f64.sqrt())
            }
        }
    }
}

/// θ-circle on the extended range |θ| < π/2. Beyond π/4 the circle is
/// externally tangent to the pull-back circles.
pub fn theta_circle_extended(theta: f64) -> ThetaCircle {
    if (theta.abs() - FRAC_PI_4).abs() < 1e-12 {
        return ThetaCircle::Line { theta };
    }
    let t2 = (2.0 * theta).tan();
    ThetaCircle::Circle {
        theta,
        m: -t2 * theta.tan(),
        n: -t2,
        r: (2.0 * theta.cos() / (2.0 * theta).cos()).abs(),
    }
}

pub fn theta_circle(theta: f64) -> Result<ThetaCircle> {
    if theta.abs() > FRAC_PI_4 + 1e-9 {
        return Err(Error::OutOfRange(format!("theta = {theta} outside [-pi/4, pi/4]")));
    }
    Ok(theta_circle_extended(theta.clamp(-FRAC_PI_4, FRAC_PI_4)))
}

/// The pull-back circles through (−2, 0) and (0, 2): centers (−1, tan θ) and (1, −tan θ), radius sec θ.
pub fn pullback_pair(theta: f64) -> (GeneralizedCircle, GeneralizedCircle) {
    let r = 1.0 / theta.cos();
    (
        GeneralizedCircle::circle(Complex64::new(-1.0, theta.tan()), r),
        GeneralizedCircle::circle(Complex64::new(1.0, -theta.tan()), r),
    )
}

pub fn teardrop_point(theta: f64) -> Complex64 {
    let s = theta.sin();
    let den = 1.0 + (2.0 * theta).sin().powi(2);
    Complex64::new(2.0 - 4.0 * s * s / den, 8.0 * s.powi(3) * theta.cos() / den)
}

/// Coefficients (A, B, C) of the pencil condition A·cos 2θ + B·sin 2θ = C that
/// puts d on the θ-circle.
fn pencil(d: Complex64) -> (f64, f64, f64) {
    (d.norm_sqr() - 2.0 * d.re, 2.0 * d.im, 4.0 - 2.0 * d.re)
}

/// A² + B² − C²: positive outside the teardrop, zero on it, negative inside.
pub fn teardrop_discriminant(d: Complex64) -> f64 {
    let (a, b, c) = pencil(d);
    a * a + b * b - c * c
}

fn discriminant_scale(d: Complex64) -> f64 {
    let (a, b, c) = pencil(d);
    (a * a + b * b + c * c).max(1.0)
}

/// Angles θ ∈ (−π/2, π/2] of the θ-circles through d (none inside the teardrop).
pub fn thetas_through(d: Complex64) -> Vec<f64> {
    let (a, b, c) = pencil(d);
    let rho = a.hypot(b);
    if rho < c.abs() * (1.0 - 1e-15) || rho == 0.0 {
        return Vec::new();
    }
    let base = b.atan2(a);
    let delta = (c / rho).clamp(-1.0, 1.0).acos();
    let wrap = |x: f64| {
        let mut y = x;
        while y <= -std::f64::consts::PI {
            y += 2.0 * std::f64::consts::PI;
        }
        while y > std::f64::consts::PI {
            y -= 2.0 * std::f64::consts::PI;
        }
        y / 2.0
    };
    let mut out = vec![wrap(base + delta)];
    if delta > 0.0 {
        out.push(wrap(base - delta));
    }
    out
}

/// The four-point slice: circles through (−2, 0), (0, 2) and (2, d).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourPointConfig {
    pub d: Complex64,
    /// C_A, C_B, C_D oriented so the interiors are disjoint; present when NSDC.
    pub circles: Option<[GeneralizedCircle; 3]>,
    pub theta_star: Option<f64>,
    pub is_nsdc: bool,
    pub on_boundary: bool,
}

impl FourPointConfig {
    /// The witness as a configuration paired by the three half-turns.
    pub fn to_configuration(&self, eps: f64) -> Result<SchottkyConfiguration> {
        let circles = self.circles.ok_or(Error::NotNSDC(teardrop_discriminant(self.d)))?;
        let pts = [
            (SpherePoint::finite(-2.0, 0.0), SpherePoint::finite(0.0, 0.0)),
            (SpherePoint::finite(0.0, 0.0), SpherePoint::finite(2.0, 0.0)),
            (SpherePoint::finite(2.0, 0.0), SpherePoint::Finite(self.d)),
        ];
        let mut cfg = SchottkyConfiguration::new(ConfigKind::NSDCTriple, teardrop_to_lambda(self.d, eps)?);
        cfg.sides = circles.to_vec();
        let mut hs = Vec::new();
        for (k, (x, y)) in pts.iter().enumerate() {
            let h = half_turn(*x, *y, eps)?;
            cfg.pairings.push((k, k, h));
            hs.push(h);
        }
        cfg.half_turns = Some(hs);
        let tol = 1e-7 * (1.0 + self.d.norm());
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if let Contact::Touch(p) = contact(&circles[i], &circles[j], tol) {
                cfg.tangencies.push((i, j, p));
            }
        }
        Ok(cfg)
    }
}

pub fn fourpoint_nsdc_test(d: Complex64, eps: f64) -> Result<FourPointConfig> {
    for p in [-2.0, 0.0, 2.0] {
        if (d - p).norm() <= eps {
            return Err(Error::DegeneratePoint(format!("d = {d} coincides with {p}")));
        }
    }
    let disc = teardrop_discriminant(d);
    let on_boundary = disc.abs() <= eps * discriminant_scale(d);
    let mut out = FourPointConfig { d, circles: None, theta_star: None, is_nsdc: disc > 0.0 || on_boundary, on_boundary };
    if !out.is_nsdc {
        return Ok(out);
    }
    let mut thetas = thetas_through(d);
    if thetas.is_empty() {
        // On the teardrop within tolerance: the double root.
        let (a, b, _) = pencil(d);
        thetas.push(b.atan2(a) / 2.0);
    }
    let tol = 1e-9_f64.max(eps) * (1.0 + d.norm());
    for theta in thetas {
        if theta.abs() > FRAC_PI_2 - 1e-6 {
            continue;
        }
        let (ca, cb) = pullback_pair(theta);
        let cd = theta_circle_extended(theta).to_circle();
        if let Some(tri) = nsdc_triple([ca, cb, cd], tol) {
            out.circles = Some(tri);
            out.theta_star = Some(theta);
            break;
        }
    }
    Ok(out)
}

/// A, B and γ₀ = H_{[−2,0]}·H_{[0,2]}·H_{[2,d]} as raw SL(2) products of the
/// ordered `half_turn_mat`; A = H_{[−2,0]}H_{[0,2]}, B = H_{[0,2]}H_{[2,d]}.
pub fn fourpoint_matrices(d: Complex64, eps: f64) -> Result<(Mat2, Mat2, Mat2)> {
    if (d - 2.0).norm() <= eps {
        return Err(Error::DegeneratePoint("d = 2".into()));
    }
    let p = |x: f64| SpherePoint::finite(x, 0.0);
    let h1 = half_turn_mat(p(-2.0), p(0.0), eps)?;
    let h2 = half_turn_mat(p(0.0), p(2.0), eps)?;
    let h3 = half_turn_mat(p(2.0), SpherePoint::Finite(d), eps)?;
    Ok((h1 * h2, h2 * h3, h1 * h2 * h3))
}

/// λ = 4d/(d − 2); ∞ goes to 4.
pub fn teardrop_to_lambda(d: impl Into<SpherePoint>, eps: f64) -> Result<Complex64> {
    match d.into() {
        SpherePoint::Infinity => Ok(Complex64::new(4.0, 0.0)),
        SpherePoint::Finite(d) => {
            if (d - 2.0).norm() <= eps {
                return Err(Error::DegeneratePoint("d = 2".into()));
            }
            Ok(d * 4.0 / (d - 2.0))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NsdcSign {
    Minus,
    Plus,
}

/// Circle C₁ through 0 and 2, its tangent line L₂ at 0 and the parallel line L₃
/// through λ′, paired by the half-turns about [2,0], [0,∞], [∞,λ′].
pub fn build_nsdc_config(lambda: Complex64, sign: NsdcSign, eps: f64) -> Result<SchottkyConfiguration> {
    let report = classify_lambda(lambda, eps)?;
    let (ok, margin) = match sign {
        NsdcSign::Minus => (report.is_nsdc_minus, report.margins.nsdc_minus),
        NsdcSign::Plus => (report.is_nsdc_plus, report.margins.nsdc_plus),
    };
    if !ok {
        return Err(Error::NotNSDC(margin));
    }
    let rep = report.lambda.rep;
    let lp = match sign {
        NsdcSign::Minus => rep,
        NsdcSign::Plus => -rep,
    };
    let phi = lp.arg() / 2.0;
    let u = Complex64::from_polar(1.0, phi);
    let r = 1.0 / phi.cos();
    let c1 = GeneralizedCircle::circle(Complex64::new(1.0, phi.tan()), r);
    let l2 = GeneralizedCircle::line(u, 0.0).flipped();
    let d_l = (lp * u.conj()).re;
    let l3 = GeneralizedCircle::line(u, d_l);

    let mut cfg = SchottkyConfiguration::new(ConfigKind::NSDCTriple, lambda);
    cfg.sides = vec![c1, l2, l3];
    let zero = SpherePoint::finite(0.0, 0.0);
    let axes = [
        (SpherePoint::finite(2.0, 0.0), zero),
        (zero, SpherePoint::Infinity),
        (SpherePoint::Infinity, SpherePoint::Finite(lp)),
    ];
    let mut hs = Vec::new();
    for (k, (x, y)) in axes.iter().enumerate() {
        let h = half_turn(*x, *y, eps)?;
        cfg.pairings.push((k, k, h));
        hs.push(h);
    }
    cfg.half_turns = Some(hs);
    cfg.tangencies.push((0, 1, zero));
    cfg.tangencies.push((1, 2, SpherePoint::Infinity));
    if (d_l - 2.0 * r).abs() <= eps * (1.0 + d_l) {
        cfg.tangencies.push((0, 2, SpherePoint::Finite(Complex64::new(1.0, phi.tan()) + u * r)));
    }
    Ok(cfg)
}
