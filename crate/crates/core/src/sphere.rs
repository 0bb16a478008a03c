//! Circles and lines on the sphere, half-turns, images under Möbius maps and
//! the tangency / disjointness predicates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{normalize, Mat2, MoebiusMap, SpherePoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleSide {
    Bounded,
    Unbounded,
}

/// For a line with unit normal n and offset o: `Pos` is {Re(z n̄) > o}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineSide {
    Pos,
    Neg,
}

/// A circle or a line (a circle through ∞) with a chosen interior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneralizedCircle {
    Circle { center: Complex64, radius: f64, interior: CircleSide },
    Line { normal: Complex64, offset: f64, interior: LineSide },
}

use GeneralizedCircle::{Circle, Line};

impl GeneralizedCircle {
    /// Circle with the bounded disc as interior.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Circle { center, radius, interior: CircleSide::Bounded }
    }

    /// The line Re(z n̄) = offset with interior on the side n points to.
    pub fn line(normal: Complex64, offset: f64) -> Self {
        let k = normal.norm();
        Line { normal: normal / k, offset: offset / k, interior: LineSide::Pos }
    }

    /// Line through two distinct finite points, interior to the left of p -> q.
    pub fn line_through(p: Complex64, q: Complex64) -> Self {
        let n = I * (q - p) / (q - p).norm();
        Line { normal: n, offset: (p * n.conj()).re, interior: LineSide::Pos }
    }

    pub fn flipped(&self) -> Self {
        match *self {
            Circle { center, radius, interior } => Circle {
                center,
                radius,
                interior: match interior {
                    CircleSide::Bounded => CircleSide::Unbounded,
                    CircleSide::Unbounded => CircleSide::Bounded,
                },
            },
            Line { normal, offset, interior } => Line {
                normal,
                offset,
                interior: match interior {
                    LineSide::Pos => LineSide::Neg,
                    LineSide::Neg => LineSide::Pos,
                },
            },
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Line { .. })
    }

    /// Positive inside the interior, negative outside, zero on the curve.
    /// The magnitude is the Euclidean distance to the curve.
    pub fn signed(&self, z: Complex64) -> f64 {
        match *self {
            Circle { center, radius, interior } => {
                let v = radius - (z - center).norm();
                match interior {
                    CircleSide::Bounded => v,
                    CircleSide::Unbounded => -v,
                }
            }
            Line { normal, offset, interior } => {
                let v = (z * normal.conj()).re - offset;
                match interior {
                    LineSide::Pos => v,
                    LineSide::Neg => -v,
                }
            }
        }
    }

    /// Membership of ∞: Some(true) if in the interior, Some(false) if exterior,
    /// None when ∞ lies on the curve.
    pub fn infinity_inside(&self) -> Option<bool> {
        match self {
            Circle { interior, .. } => Some(*interior == CircleSide::Unbounded),
            Line { .. } => None,
        }
    }

    pub fn on_curve(&self, p: SpherePoint, eps: f64) -> bool {
        match p {
            SpherePoint::Infinity => self.is_line(),
            SpherePoint::Finite(z) => self.signed(z).abs() <= eps,
        }
    }

    /// Point on the curve at parameter t (angle for circles, arc length for lines).
    pub fn point_at(&self, t: f64) -> Complex64 {
        match *self {
            Circle { center, radius, .. } => center + Complex64::from_polar(radius, t),
            Line { normal, offset, .. } => normal * offset + I * normal * t,
        }
    }

    /// `k` points on the curve (lines are sampled over [-span, span]).
    pub fn sample_points(&self, k: usize, span: f64) -> Vec<Complex64> {
        match self {
            Circle { .. } => (0..k).map(|j| self.point_at(2.0 * PI * j as f64 / k as f64)).collect(),
            Line { .. } => (0..k)
                .map(|j| self.point_at(-span + 2.0 * span * j as f64 / (k.max(2) - 1) as f64))
                .collect(),
        }
    }

    /// A handful of points strictly inside the interior, plus ∞ when it is interior.
    pub fn interior_samples(&self) -> Vec<SpherePoint> {
        match *self {
            Circle { center, radius, interior } => match interior {
                CircleSide::Bounded => {
                    let mut v = vec![SpherePoint::Finite(center)];
                    for k in 0..4 {
                        v.push(SpherePoint::Finite(
                            center + Complex64::from_polar(0.5 * radius, PI / 2.0 * k as f64 + 0.3),
                        ));
                    }
                    v
                }
                CircleSide::Unbounded => {
                    let mut v = vec![SpherePoint::Infinity];
                    for k in 0..4 {
                        v.push(SpherePoint::Finite(
                            center + Complex64::from_polar(2.0 * radius, PI / 2.0 * k as f64 + 0.3),
                        ));
                    }
                    v
                }
            },
            Line { normal, offset, interior } => {
                let dir = match interior {
                    LineSide::Pos => normal,
                    LineSide::Neg => -normal,
                };
                let base = normal * offset;
                let l = 1.0 + offset.abs();
                let mut v = Vec::new();
                for s in [0.5, 2.0] {
                    for t in [-1.0, 0.0, 1.0] {
                        v.push(SpherePoint::Finite(base + dir * (s * l) + I * normal * (t * l)));
                    }
                }
                v
            }
        }
    }

    /// Same locus within `tol` (orientation ignored).
    pub fn locus_defect(&self, other: &GeneralizedCircle) -> f64 {
        match (*self, *other) {
            (Circle { center: c1, radius: r1, .. }, Circle { center: c2, radius: r2, .. }) => {
                ((c1 - c2).norm() + (r1 - r2).abs()) / r1.max(1.0)
            }
            (Line { normal: n1, offset: o1, .. }, Line { normal: n2, offset: o2, .. }) => {
                let same = (n1 - n2).norm() + (o1 - o2).abs();
                let opp = (n1 + n2).norm() + (o1 + o2).abs();
                same.min(opp) / o1.abs().max(1.0)
            }
            _ => f64::INFINITY,
        }
    }

    /// Same locus and same interior.
    pub fn approx_eq(&self, other: &GeneralizedCircle, tol: f64) -> bool {
        if self.locus_defect(other) > tol {
            return false;
        }
        same_interior_side(self, other)
    }

    /// Image under z -> conj(z).
    pub fn conj(&self) -> GeneralizedCircle {
        match *self {
            Circle { center, radius, interior } => Circle { center: center.conj(), radius, interior },
            Line { normal, offset, interior } => Line { normal: normal.conj(), offset, interior },
        }
    }

    /// Checks the radius / unit-normal invariants.
    pub fn validate(&self, eps: f64) -> Result<()> {
        match *self {
            Circle { center, radius, .. } => {
                if !(radius > eps) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
                    return Err(Error::MalformedConfig(format!("bad circle radius {radius}")));
                }
            }
            Line { normal, offset, .. } => {
                if (normal.norm() - 1.0).abs() >= eps.max(1e-12) || !offset.is_finite() {
                    return Err(Error::MalformedConfig(format!("bad line normal {normal}")));
                }
            }
        }
        Ok(())
    }
}

fn same_interior_side(a: &GeneralizedCircle, b: &GeneralizedCircle) -> bool {
    match (*a, *b) {
        (Circle { interior: i1, .. }, Circle { interior: i2, .. }) => i1 == i2,
        (Line { normal: n1, interior: i1, .. }, Line { normal: n2, interior: i2, .. }) => {
            let aligned = (n1 * n2.conj()).re > 0.0;
            (i1 == i2) == aligned
        }
        _ => false,
    }
}

/// Raw half-turn matrix fixing x and y with the ordered sign convention:
/// (i/(x−y))·[[x+y, −2xy], [2, −(x+y)]], or [[−1, 2x], [0, 1]]/i when y = ∞.
pub fn half_turn_mat(x: SpherePoint, y: SpherePoint, eps: f64) -> Result<Mat2> {
    match (x, y) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => Err(Error::DegenerateAxis),
        (SpherePoint::Finite(x), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(x)) => {
            Ok(Mat2::new(Complex64::new(-1.0, 0.0), x * 2.0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).scale(-I))
        }
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
            if (x - y).norm() <= eps {
                return Err(Error::DegenerateAxis);
            }
            let k = I / (x - y);
            Ok(Mat2::new(x + y, -x * y * 2.0, Complex64::new(2.0, 0.0), -(x + y)).scale(k))
        }
    }
}

/// The order-two map fixing x and y.
pub fn half_turn(x: SpherePoint, y: SpherePoint, eps: f64) -> Result<MoebiusMap> {
    normalize(half_turn_mat(x, y, eps)?, eps)
}

fn circumcircle(z1: Complex64, z2: Complex64, z3: Complex64) -> Option<(Complex64, f64)> {
    let b = z2 - z1;
    let c = z3 - z1;
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d.abs() <= 1e-300 {
        return None;
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let u = Complex64::new((c.im * b2 - b.im * c2) / d, (b.re * c2 - c.re * b2) / d);
    let center = z1 + u;
    let r = ((z1 - center).norm() + (z2 - center).norm() + (z3 - center).norm()) / 3.0;
    Some((center, r))
}

/// Image of a generalized circle under a Möbius map, by a three-point fit,
/// with the interior transported by mapping interior sample points.
pub fn image_circle(m: &MoebiusMap, c: &GeneralizedCircle, eps: f64) -> GeneralizedCircle {
    let mc = m.c();
    let pole = m.pole();
    // |c·p + d| = |c|·dist(p, pole); the image passes through ∞ when this can vanish on C.
    let through_inf = match (c, pole) {
        (Line { .. }, SpherePoint::Infinity) => true,
        (Circle { .. }, SpherePoint::Infinity) => false,
        (_, SpherePoint::Finite(p)) => mc.norm() * c.signed(p).abs() < eps,
    };

    let samples: Vec<SpherePoint> = match *c {
        Circle { center, radius, .. } => {
            let mut t0 = 0.0;
            if let SpherePoint::Finite(p) = pole {
                let near = (0..3).any(|k| {
                    (center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / 3.0) - p).norm() < 0.25 * radius
                });
                if near {
                    t0 = PI / 3.0;
                }
            }
            (0..3)
                .map(|k| SpherePoint::Finite(c.point_at(t0 + 2.0 * PI * k as f64 / 3.0)))
                .collect()
        }
        Line { offset, .. } => {
            let l = 1.0 + offset.abs();
            let mut ts = [0.0, l];
            if let SpherePoint::Finite(p) = pole {
                if ts.iter().any(|&t| (c.point_at(t) - p).norm() < 0.25 * l) {
                    ts = [-l, 2.0 * l];
                }
            }
            vec![
                SpherePoint::Finite(c.point_at(ts[0])),
                SpherePoint::Finite(c.point_at(ts[1])),
                SpherePoint::Infinity,
            ]
        }
    };
    let images: Vec<Complex64> = samples.iter().filter_map(|&p| m.apply(p).as_finite()).collect();

    let raw = if through_inf || images.len() < 3 {
        // Line through the two finite images farthest apart.
        let mut best = (0, 1);
        let mut far = -1.0;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                let d = (images[i] - images[j]).norm();
                if d > far {
                    far = d;
                    best = (i, j);
                }
            }
        }
        GeneralizedCircle::line_through(images[best.0], images[best.1])
    } else {
        match circumcircle(images[0], images[1], images[2]) {
            Some((center, r)) => GeneralizedCircle::circle(center, r),
            None => GeneralizedCircle::line_through(images[0], images[1]),
        }
    };

    // Orientation: the interior sample whose image sits farthest from the image curve decides.
    let mut best_score = -1.0;
    let mut inside = true;
    for q in c.interior_samples() {
        match m.apply(q) {
            SpherePoint::Infinity => {
                if let Some(v) = raw.infinity_inside() {
                    best_score = f64::INFINITY;
                    inside = v;
                }
            }
            SpherePoint::Finite(w) => {
                let g = raw.signed(w);
                if g.abs() > best_score {
                    best_score = g.abs();
                    inside = g > 0.0;
                }
            }
        }
    }
    if inside {
        raw
    } else {
        raw.flipped()
    }
}

/// Whether M carries the exterior of `c1` into the interior of `c2`.
pub fn maps_exterior_to_interior(
    m: &MoebiusMap,
    c1: &GeneralizedCircle,
    c2: &GeneralizedCircle,
    eps: f64,
) -> Result<bool> {
    let img = image_circle(m, c1, eps);
    let defect = img.locus_defect(c2);
    if defect > eps {
        return Err(Error::NotPaired(defect));
    }
    let mut best = -1.0;
    let mut result = false;
    for q in c1.flipped().interior_samples() {
        match m.apply(q) {
            SpherePoint::Infinity => {
                if let Some(v) = c2.infinity_inside() {
                    best = f64::INFINITY;
                    result = v;
                }
            }
            SpherePoint::Finite(w) => {
                let g = c2.signed(w);
                if g.abs() > best {
                    best = g.abs();
                    result = g > 0.0;
                }
            }
        }
    }
    Ok(result)
}

/// How the two boundary curves meet, ignoring interiors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contact {
    Cross,
    Apart,
    Touch(SpherePoint),
    Coincident,
}

pub fn contact(c1: &GeneralizedCircle, c2: &GeneralizedCircle, eps: f64) -> Contact {
    match (*c1, *c2) {
        (Circle { center: a, radius: ra, .. }, Circle { center: b, radius: rb, .. }) => {
            let delta = (b - a).norm();
            if delta <= eps && (ra - rb).abs() <= eps {
                return Contact::Coincident;
            }
            let ext = delta - (ra + rb);
            let int = (ra - rb).abs() - delta;
            if ext.abs() <= eps {
                Contact::Touch(SpherePoint::Finite(a + (b - a) * (ra / delta)))
            } else if int.abs() <= eps {
                let (big, rbig, small) = if ra >= rb { (a, ra, b) } else { (b, rb, a) };
                let u = if delta > 0.0 { (small - big) / delta } else { Complex64::new(1.0, 0.0) };
                Contact::Touch(SpherePoint::Finite(big + u * rbig))
            } else if ext > 0.0 || int > 0.0 {
                Contact::Apart
            } else {
                Contact::Cross
            }
        }
        (Circle { center, radius, .. }, Line { normal, offset, .. })
        | (Line { normal, offset, .. }, Circle { center, radius, .. }) => {
            let s = (center * normal.conj()).re - offset;
            let gap = s.abs() - radius;
            if gap.abs() <= eps {
                Contact::Touch(SpherePoint::Finite(center - normal * s))
            } else if gap > 0.0 {
                Contact::Apart
            } else {
                Contact::Cross
            }
        }
        (Line { normal: n1, offset: o1, .. }, Line { normal: n2, offset: o2, .. }) => {
            let cross = (n1 * n2.conj()).im;
            if cross.abs() > eps {
                return Contact::Cross;
            }
            let sigma = (n1 * n2.conj()).re.signum();
            if (o1 - sigma * o2).abs() <= eps {
                Contact::Coincident
            } else {
                Contact::Touch(SpherePoint::Infinity)
            }
        }
    }
}

/// For curves that do not cross: whether `y` lies in the closure of the interior of `x`.
fn holds(x: &GeneralizedCircle, y: &GeneralizedCircle) -> bool {
    let pts = match y {
        Circle { .. } => y.sample_points(8, 0.0),
        Line { offset, .. } => {
            let l = 1.0 + offset.abs();
            [0.0, -l, l, -10.0 * l, 10.0 * l, -100.0 * l, 100.0 * l]
                .iter()
                .map(|&t| y.point_at(t))
                .collect()
        }
    };
    let mut best = 0.0_f64;
    for p in pts {
        let g = x.signed(p);
        if g.abs() > best.abs() {
            best = g;
        }
    }
    best > 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangencyKind {
    /// Interiors on opposite sides of the common tangent.
    External,
    /// One interior nested in the other.
    Internal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CircleRelation {
    InteriorsDisjoint,
    Tangent { point: SpherePoint, kind: TangencyKind },
    Overlapping,
    FirstInsideSecond,
    SecondInsideFirst,
}

impl CircleRelation {
    /// Acceptable relation for two sides of a Schottky configuration.
    pub fn is_tangent_or_disjoint(&self) -> bool {
        matches!(
            self,
            CircleRelation::InteriorsDisjoint
                | CircleRelation::Tangent { kind: TangencyKind::External, .. }
        )
    }
}

/// Set relation between the interiors, tolerance-banded at `eps`.
pub fn relation(c1: &GeneralizedCircle, c2: &GeneralizedCircle, eps: f64) -> CircleRelation {
    let touch = match contact(c1, c2, eps) {
        Contact::Cross | Contact::Coincident => return CircleRelation::Overlapping,
        Contact::Apart => None,
        Contact::Touch(p) => Some(p),
    };
    let two_in_one = holds(c1, c2);
    let one_in_two = holds(c2, c1);
    match (two_in_one, one_in_two, touch) {
        (true, true, _) => CircleRelation::Overlapping,
        (false, false, None) => CircleRelation::InteriorsDisjoint,
        (false, false, Some(point)) => CircleRelation::Tangent { point, kind: TangencyKind::External },
        (_, _, Some(point)) => CircleRelation::Tangent { point, kind: TangencyKind::Internal },
        (true, false, None) => CircleRelation::SecondInsideFirst,
        (false, true, None) => CircleRelation::FirstInsideSecond,
    }
}

/// Side of `x` holding `y`, or None when the curves cross or coincide.
pub fn side_holding(x: &GeneralizedCircle, y: &GeneralizedCircle, eps: f64) -> Option<bool> {
    match contact(x, y, eps) {
        Contact::Cross | Contact::Coincident => None,
        _ => Some(holds(x, y)),
    }
}

/// `x` separates `y` from `z`: exactly one of them lies in x's interior.
pub fn separates(x: &GeneralizedCircle, y: &GeneralizedCircle, z: &GeneralizedCircle, eps: f64) -> bool {
    match (side_holding(x, y, eps), side_holding(x, z, eps)) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    }
}

/// Checks that three generalized circles are pairwise tangent-or-disjoint with
/// none separating the other two; returns them oriented so the three interiors
/// are pairwise disjoint.
pub fn nsdc_triple(c: [GeneralizedCircle; 3], eps: f64) -> Option<[GeneralizedCircle; 3]> {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if matches!(contact(&c[i], &c[j], eps), Contact::Cross | Contact::Coincident) {
            return None;
        }
    }
    let mut out = c;
    for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
        if separates(&c[i], &c[j], &c[k], eps) {
            return None;
        }
        if holds(&c[i], &c[j]) {
            out[i] = c[i].flipped();
        }
    }
    Some(out)
}

/// Generalized circle through `shared` and `other` tangent to `n` at `shared`.
pub fn tangent_circle_through(
    shared: SpherePoint,
    other: SpherePoint,
    n: &GeneralizedCircle,
    eps: f64,
) -> Option<GeneralizedCircle> {
    match (shared, other) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => None,
        (SpherePoint::Infinity, SpherePoint::Finite(o)) => match *n {
            Line { normal, .. } => Some(GeneralizedCircle::line(normal, (o * normal.conj()).re)),
            Circle { .. } => None,
        },
        (SpherePoint::Finite(s), SpherePoint::Infinity) => match *n {
            Circle { center, .. } => {
                let u = (s - center) / (s - center).norm();
                Some(GeneralizedCircle::line(u, (s * u.conj()).re))
            }
            Line { .. } => None,
        },
        (SpherePoint::Finite(s), SpherePoint::Finite(o)) => {
            let u = match *n {
                Circle { center, .. } => (s - center) / (s - center).norm(),
                Line { normal, .. } => normal,
            };
            let v = s - o;
            if v.norm() <= eps {
                return None;
            }
            let den = (u * v.conj()).re;
            if den.abs() <= eps * v.norm() {
                return Some(GeneralizedCircle::line(u, (s * u.conj()).re));
            }
            let t = -v.norm_sqr() / (2.0 * den);
            Some(GeneralizedCircle::circle(s + u * t, t.abs()))
        }
    }
}

/// Circle through two finite points with the center pulled back `t` half-chords
/// along the perpendicular bisector: center (x + x')/2 + i·t·(x − x')/2.
pub fn pullback_circle(x: Complex64, xp: Complex64, t: f64) -> GeneralizedCircle {
    let center = (x + xp) * 0.5 + I * (x - xp) * (0.5 * t);
    GeneralizedCircle::circle(center, (x - center).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{compose, DEFAULT_EPS};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }
    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }

    #[test]
    fn half_turn_examples() {
        let h = half_turn(fin(-2.0, 0.0), fin(0.0, 0.0), DEFAULT_EPS).unwrap();
        let expected = Mat2::new(c(0.0, -1.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0));
        assert!(h.matrix().dist_projective(&expected) < 1e-15);

        let h = half_turn(fin(1.0, 0.0), fin(-1.0, 0.0), DEFAULT_EPS).unwrap();
        let inv = h.apply(fin(2.0, 0.0)).as_finite().unwrap();
        assert!((inv - 0.5).norm() < 1e-15);
        assert!(compose(&h, &h).is_identity(1e-15));

        let h = half_turn(fin(0.0, 0.0), SpherePoint::Infinity, DEFAULT_EPS).unwrap();
        assert!((h.apply(fin(0.3, 0.7)).as_finite().unwrap() - c(-0.3, -0.7)).norm() < 1e-15);

        assert!(matches!(half_turn(fin(1.0, 1.0), fin(1.0, 1.0), DEFAULT_EPS), Err(Error::DegenerateAxis)));
    }

    #[test]
    fn half_turn_is_symmetric() {
        let x = fin(0.3, -1.1);
        let y = fin(-2.0, 0.4);
        let a = half_turn(x, y, DEFAULT_EPS).unwrap();
        let b = half_turn(y, x, DEFAULT_EPS).unwrap();
        assert!(a.matrix().dist(b.matrix()) < 1e-14);
    }

    #[test]
    fn image_examples() {
        let s = MoebiusMap::from_mat(Mat2::real(1.0, 0.0, 1.0, 1.0)).unwrap();
        let img = image_circle(&s, &GeneralizedCircle::circle(c(-1.0, 0.0), 1.0), DEFAULT_EPS);
        assert!(img.locus_defect(&GeneralizedCircle::circle(c(1.0, 0.0), 1.0)) < 1e-12);
        // The pole -1 is the center, so the bounded side goes to the outside.
        assert!(matches!(img, Circle { interior: CircleSide::Unbounded, .. }));

        let any = GeneralizedCircle::circle(c(0.4, 2.0), 0.7);
        assert!(image_circle(&MoebiusMap::identity(), &any, DEFAULT_EPS).approx_eq(&any, 1e-14));

        // Line Re z = -1/2 avoids the pole -1: image is the circle through 1/... three images.
        let l = GeneralizedCircle::line(c(1.0, 0.0), -0.5);
        let img = image_circle(&s, &l, DEFAULT_EPS);
        for p in [c(-0.5, 0.0), c(-0.5, 1.0)] {
            let w = s.apply_c(p).as_finite().unwrap();
            assert!(img.signed(w).abs() < 1e-12);
        }
        assert!(img.signed(c(1.0, 0.0)).abs() < 1e-12);
        // Images -1, 0.6 + 0.8i and 1: the unit circle.
        assert!(img.locus_defect(&GeneralizedCircle::circle(c(0.0, 0.0), 1.0)) < 1e-12);
    }

    #[test]
    fn exterior_to_interior_examples() {
        let s = MoebiusMap::from_mat(Mat2::real(1.0, 0.0, 1.0, 1.0)).unwrap();
        let c1 = GeneralizedCircle::circle(c(-1.0, 0.0), 1.0);
        let c2 = GeneralizedCircle::circle(c(1.0, 0.0), 1.0);
        assert!(maps_exterior_to_interior(&s, &c1, &c2, DEFAULT_EPS).unwrap());
        assert!(maps_exterior_to_interior(&s.inverse(), &c2, &c1, DEFAULT_EPS).unwrap());

        // τ = 0.3: C1 = Circle{-0.3, 0.3}, image center τ/(2τ-1) = -0.75, radius 0.75.
        let c1 = GeneralizedCircle::circle(c(-0.3, 0.0), 0.3);
        let c2 = GeneralizedCircle::circle(c(-0.75, 0.0), 0.75);
        assert!(!maps_exterior_to_interior(&s, &c1, &c2, DEFAULT_EPS).unwrap());

        let wrong = GeneralizedCircle::circle(c(-0.75, 0.1), 0.75);
        assert!(matches!(maps_exterior_to_interior(&s, &c1, &wrong, DEFAULT_EPS), Err(Error::NotPaired(_))));
    }

    #[test]
    fn relation_examples() {
        let a = GeneralizedCircle::circle(c(-1.0, 0.0), 1.0);
        let b = GeneralizedCircle::circle(c(1.0, 0.0), 1.0);
        match relation(&a, &b, DEFAULT_EPS) {
            CircleRelation::Tangent { point, kind } => {
                assert!(point.approx_eq(&fin(0.0, 0.0), 1e-15));
                assert_eq!(kind, TangencyKind::External);
            }
            r => panic!("{r:?}"),
        }
        let l1 = GeneralizedCircle::line(c(0.0, -1.0), 1.0);
        let l2 = GeneralizedCircle::line(c(0.0, 1.0), 1.0);
        assert_eq!(
            relation(&l1, &l2, DEFAULT_EPS),
            CircleRelation::Tangent { point: SpherePoint::Infinity, kind: TangencyKind::External }
        );
        assert_eq!(
            relation(
                &GeneralizedCircle::circle(c(0.0, 0.0), 1.0),
                &GeneralizedCircle::circle(c(3.0, 0.0), 1.0),
                DEFAULT_EPS
            ),
            CircleRelation::InteriorsDisjoint
        );
        let big = GeneralizedCircle::circle(c(0.0, 0.0), 3.0);
        let small = GeneralizedCircle::circle(c(0.5, 0.0), 1.0);
        assert_eq!(relation(&big, &small, DEFAULT_EPS), CircleRelation::SecondInsideFirst);
        assert_eq!(relation(&small, &big, DEFAULT_EPS), CircleRelation::FirstInsideSecond);
        // Outside of `big` against `small`: disjoint interiors.
        assert_eq!(relation(&big.flipped(), &small, DEFAULT_EPS), CircleRelation::InteriorsDisjoint);
        assert_eq!(relation(&a, &big, DEFAULT_EPS), CircleRelation::FirstInsideSecond);
        let cross = GeneralizedCircle::circle(c(0.5, 0.0), 1.0);
        assert_eq!(relation(&a, &cross, DEFAULT_EPS), CircleRelation::Overlapping);
    }

    #[test]
    fn tangent_circle_construction() {
        let n = GeneralizedCircle::circle(c(1.0, -0.5), (c(1.0, -0.5) - c(2.0, 0.0)).norm());
        let t = tangent_circle_through(fin(2.0, 0.0), fin(3.0, 2.0), &n, DEFAULT_EPS).unwrap();
        assert!(t.signed(c(2.0, 0.0)).abs() < 1e-12 && t.signed(c(3.0, 2.0)).abs() < 1e-12);
        assert!(matches!(contact(&n, &t, 1e-9), Contact::Touch(_)));

        let line = GeneralizedCircle::line(c(0.6, 0.8), 0.0);
        let par = tangent_circle_through(SpherePoint::Infinity, fin(4.0, 1.0), &line, DEFAULT_EPS).unwrap();
        assert_eq!(contact(&line, &par, 1e-9), Contact::Touch(SpherePoint::Infinity));
    }

    #[test]
    fn nsdc_triple_orients_interiors() {
        let a = GeneralizedCircle::circle(c(-1.0, 0.0), 1.0);
        let b = GeneralizedCircle::circle(c(1.0, 0.0), 1.0);
        let outer = GeneralizedCircle::circle(c(0.0, 0.0), 2.0);
        let t = nsdc_triple([a, b, outer], DEFAULT_EPS).unwrap();
        assert!(matches!(t[2], Circle { interior: CircleSide::Unbounded, .. }));
        let far = GeneralizedCircle::circle(c(5.0, 0.0), 1.0);
        // `outer` separates `a` from `far`.
        assert!(nsdc_triple([a, outer, far], DEFAULT_EPS).is_none());
    }
}
