//! 2x2 complex matrices acting on the Riemann sphere.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance for every predicate in the crate.
pub const DEFAULT_EPS: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Finite points compare with absolute tolerance `eps`; infinity only equals infinity.
    pub fn approx_eq(&self, other: &SpherePoint, eps: f64) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (a - b).norm() <= eps,
            _ => false,
        }
    }

    pub fn conj(&self) -> SpherePoint {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Finite(z) => z.serialize(s),
            SpherePoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Pair(Complex64),
            Tag(String),
        }
        match Wire::deserialize(d)? {
            Wire::Pair(z) => Ok(SpherePoint::Finite(z)),
            Wire::Tag(t) if t == "inf" => Ok(SpherePoint::Infinity),
            Wire::Tag(t) => Err(serde::de::Error::custom(format!("unknown point tag {t:?}"))),
        }
    }
}

/// A plain 2x2 complex matrix with no normalization.
///
/// Word evaluation uses these raw products so that trace signs follow the
/// chosen lifts of the generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn scale(&self, k: Complex64) -> Mat2 {
        Mat2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    /// Inverse via the adjugate divided by the determinant.
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Largest entrywise difference.
    pub fn dist(&self, other: &Mat2) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }

    /// Distance in PSL(2,C): the smaller of |M - N| and |M + N|.
    pub fn dist_projective(&self, other: &Mat2) -> f64 {
        self.dist(other).min(self.dist(&other.scale(-ONE)))
    }

    pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
        *x * *y * x.inverse() * y.inverse()
    }

    pub fn conj(&self) -> Mat2 {
        Mat2::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => {
                if self.c.norm() <= f64::EPSILON * self.max_abs() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                let scale = (self.c * z).norm() + self.d.norm();
                if den.norm() <= f64::EPSILON * scale || den.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(num / den)
                }
            }
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

/// A Möbius transformation stored as its canonical unit-determinant matrix.
///
/// Among {M, -M} the stored matrix has Re(tr) > 0; ties fall back to
/// Im(tr), then Re a, Im a, Re b, Im b, Re c, Im c. The traceless fallback
/// is an arbitrary but fixed choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    m: Mat2,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        MoebiusMap { m: Mat2::IDENTITY }
    }

    /// Builds a normalized map from raw entries.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        normalize(Mat2::new(a, b, c, d), DEFAULT_EPS)
    }

    pub fn from_mat(m: Mat2) -> Result<Self> {
        normalize(m, DEFAULT_EPS)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn a(&self) -> Complex64 {
        self.m.a
    }
    pub fn b(&self) -> Complex64 {
        self.m.b
    }
    pub fn c(&self) -> Complex64 {
        self.m.c
    }
    pub fn d(&self) -> Complex64 {
        self.m.d
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        self.m.apply(z)
    }

    pub fn apply_c(&self, z: Complex64) -> SpherePoint {
        self.m.apply(SpherePoint::Finite(z))
    }

    pub fn inverse(&self) -> MoebiusMap {
        let m = &self.m;
        canonical_sign(Mat2::new(m.d, -m.b, -m.c, m.a))
    }

    /// Point sent to infinity.
    pub fn pole(&self) -> SpherePoint {
        self.inverse().apply(SpherePoint::Infinity)
    }

    /// `p * self * p^-1`.
    pub fn conjugate_by(&self, p: &MoebiusMap) -> MoebiusMap {
        compose(&compose(p, self), &p.inverse())
    }

    /// Entrywise complex conjugate: the map z -> conj(M(conj z)).
    pub fn conj(&self) -> MoebiusMap {
        canonical_sign(self.m.conj())
    }

    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        self.m.dist_projective(&other.m) <= tol
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        self.m.dist_projective(&Mat2::IDENTITY) <= eps
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, r: MoebiusMap) -> MoebiusMap {
        compose(&self, &r)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m.a, m.b, m.c, m.d)
    }
}

#[derive(Serialize, Deserialize)]
struct WireMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireMap { a: self.m.a, b: self.m.b, c: self.m.c, d: self.m.d }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WireMap::deserialize(d)?;
        let m = Mat2::new(w.a, w.b, w.c, w.d);
        // Already unimodular: keep the stored entries so files round-trip bit for bit.
        if (m.det() - ONE).norm() <= 1e-12 {
            return Ok(canonical_sign(m));
        }
        MoebiusMap::new(w.a, w.b, w.c, w.d).map_err(serde::de::Error::custom)
    }
}

fn sign_key(m: &Mat2) -> f64 {
    let zero = 1e-12 * m.max_abs().max(1.0);
    let tr = m.trace();
    for v in [tr.re, tr.im, m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im] {
        if v.abs() > zero {
            return v;
        }
    }
    1.0
}

fn canonical_sign(m: Mat2) -> MoebiusMap {
    if sign_key(&m) < 0.0 {
        MoebiusMap { m: m.scale(-ONE) }
    } else {
        MoebiusMap { m }
    }
}

/// Divides by the principal square root of the determinant and picks the
/// canonical sign representative.
pub fn normalize(raw: Mat2, eps: f64) -> Result<MoebiusMap> {
    let det = raw.det();
    if det.norm() <= eps * eps {
        return Err(Error::SingularMatrix(det.norm()));
    }
    let k = ONE / det.sqrt();
    Ok(canonical_sign(raw.scale(k)))
}

pub fn compose(m1: &MoebiusMap, m2: &MoebiusMap) -> MoebiusMap {
    canonical_sign(m1.m * m2.m)
}

pub fn apply(m: &MoebiusMap, z: SpherePoint) -> SpherePoint {
    m.apply(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic { hyperbolic: bool },
}

/// Classification by the square of the trace.
pub fn classify_element(m: &MoebiusMap, eps: f64) -> ElementClass {
    if m.is_identity(eps) {
        return ElementClass::Identity;
    }
    let tr = m.trace();
    let tr2 = tr * tr;
    if (tr2 - 4.0).norm() < eps {
        ElementClass::Parabolic
    } else if tr2.im.abs() < eps && tr2.re >= 0.0 && tr2.re < 4.0 {
        ElementClass::Elliptic
    } else {
        ElementClass::Loxodromic { hyperbolic: tr.im.abs() < eps && tr.re.abs() > 2.0 }
    }
}

/// Roots of c z^2 + (d - a) z - b = 0 on the sphere.
pub fn fixed_points(m: &MoebiusMap, eps: f64) -> Result<Vec<SpherePoint>> {
    let cls = classify_element(m, eps);
    if cls == ElementClass::Identity {
        return Err(Error::IdentityHasAllFixedPoints);
    }
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    let parabolic = cls == ElementClass::Parabolic;
    if c.norm() <= eps {
        if parabolic || (d - a).norm() <= eps {
            return Ok(vec![SpherePoint::Infinity]);
        }
        return Ok(vec![SpherePoint::Infinity, SpherePoint::Finite(b / (d - a))]);
    }
    if parabolic {
        return Ok(vec![SpherePoint::Finite((a - d) / (c * 2.0))]);
    }
    // Stable quadratic roots: q = -(B + s)/2 with the sign of s chosen to avoid cancellation.
    let bq = d - a;
    let cq = -b;
    let mut s = (bq * bq - c * cq * 4.0).sqrt();
    if (bq - s).norm() > (bq + s).norm() {
        s = -s;
    }
    let q = -(bq + s) * 0.5;
    let z1 = q / c;
    let z2 = cq / q;
    Ok(vec![SpherePoint::Finite(z1), SpherePoint::Finite(z2)])
}

/// S = [[1,0],[1,1]] and T = [[1,2λ],[0,1]].
pub fn standard_generators(lambda: Complex64, eps: f64) -> Result<(MoebiusMap, MoebiusMap)> {
    if lambda.norm() <= eps {
        return Err(Error::ElementaryGroup);
    }
    let s = MoebiusMap { m: Mat2::real(1.0, 0.0, 1.0, 1.0) };
    let t = MoebiusMap { m: Mat2::new(ONE, lambda * 2.0, ZERO, ONE) };
    Ok((s, t))
}

/// Raw generator matrices S, T_λ (trace +2 lifts).
pub fn standard_mats(lambda: Complex64) -> (Mat2, Mat2) {
    (Mat2::real(1.0, 0.0, 1.0, 1.0), Mat2::new(ONE, lambda * 2.0, ZERO, ONE))
}

/// λ = (tr(ST) - 2)/2 with both generators lifted to trace +2.
pub fn lambda_from_generators(s: &MoebiusMap, t: &MoebiusMap, eps: f64) -> Result<Complex64> {
    let lift = |g: &MoebiusMap| -> Result<Mat2> {
        let tr = g.trace();
        let scale = g.matrix().max_abs().max(1.0);
        if (tr * tr - 4.0).norm() > eps * scale * scale {
            return Err(Error::NotParabolic(format!("{}", tr * tr)));
        }
        Ok(if tr.re < 0.0 { g.matrix().scale(-ONE) } else { *g.matrix() })
    };
    let st = lift(s)? * lift(t)?;
    let lambda = (st.trace() - 2.0) * 0.5;
    if lambda.norm() <= eps {
        return Err(Error::ElementaryGroup);
    }
    Ok(lambda)
}
