//! Region criteria in the λ-plane.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{lambda_from_generators, standard_mats, Mat2, MoebiusMap};

/// λ together with its representative modulo λ ↦ −λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaParam {
    pub lambda: Complex64,
    pub modulus: f64,
    /// Argument of `rep`, in [0, π).
    pub omega: f64,
    /// The one of ±λ with argument in [0, π).
    pub rep: Complex64,
}

impl LambdaParam {
    pub fn new(lambda: Complex64) -> Self {
        let mut rep = lambda;
        let mut omega = lambda.arg();
        if omega < 0.0 || omega >= PI {
            rep = -lambda;
            omega = rep.arg();
        }
        // -0.0 imaginary parts can leave arg at -0 or π after the flip.
        if omega < 0.0 || omega >= PI {
            rep = Complex64::new(rep.re.abs(), 0.0);
            omega = 0.0;
        }
        LambdaParam { lambda, modulus: lambda.norm(), omega, rep }
    }

    /// Image in the closed first quadrant under λ ↦ −λ, λ ↦ conj λ.
    pub fn first_quadrant(&self) -> Complex64 {
        Complex64::new(self.rep.re.abs(), self.rep.im.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    NonDiscreteJorgensen,
    NSDC,
    ClassicalTS,
    NonClassicalTS,
    Indeterminate,
}

impl Region {
    /// Raster code.
    pub fn code(&self) -> u8 {
        match self {
            Region::NonDiscreteJorgensen => 0,
            Region::NSDC => 1,
            Region::ClassicalTS => 2,
            Region::NonClassicalTS => 3,
            Region::Indeterminate => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    ClassicalTS,
    NSDC,
}

/// Words that become parabolic at the extra cusps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspTag {
    #[serde(rename = "ST")]
    ST,
    #[serde(rename = "S⁻¹T")]
    SinvT,
    #[serde(rename = "[S,T]")]
    Commutator,
}

impl CuspTag {
    /// The word's raw SL(2) matrix for the standard pair at λ.
    pub fn word(&self, lambda: Complex64) -> Mat2 {
        let (s, t) = standard_mats(lambda);
        match self {
            CuspTag::ST => s * t,
            CuspTag::SinvT => s.inverse() * t,
            CuspTag::Commutator => Mat2::commutator(&s, &t),
        }
    }
}

impl fmt::Display for CuspTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CuspTag::ST => "ST",
            CuspTag::SinvT => "S⁻¹T",
            CuspTag::Commutator => "[S,T]",
        })
    }
}

/// Signed slack of each inequality: ≥ 0 means the inequality holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// |λ| − 1/2; negative inside the Jørgensen circle.
    pub jorgensen: f64,
    /// |λ|(1 + cos ω) − 4.
    pub nsdc_minus: f64,
    /// |λ|(1 − cos ω) − 4.
    pub nsdc_plus: f64,
    /// |λ|(1 + sin ω) − 2.
    pub classical: f64,
    /// |Re λ| + |Im λ| − 2.
    pub marked_lp: f64,
    /// Distance-like slack to the boundary of K; negative strictly inside.
    pub lyndon_ullman_k: f64,
}

/// The raw values of the trace forms of the criteria, μ = tr(ST) − 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCriteria {
    pub tr_st: Complex64,
    /// |μ| + |Re μ|, NSDC iff ≥ 8.
    pub nsdc_value: f64,
    /// |μ| + |Im tr(ST)|, classical iff ≥ 4.
    pub classical_value: f64,
    /// Slack of the first-quadrant sector condition on μ (≥ 0 holds).
    pub sector_margin: f64,
    pub sector_sufficient: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub lambda: LambdaParam,
    pub summary: Region,
    pub is_nsdc_minus: bool,
    pub is_nsdc_plus: bool,
    pub is_classical: bool,
    pub is_marked_lp: bool,
    pub in_lyndon_ullman_k: bool,
    pub on_classical_boundary: bool,
    pub on_nsdc_boundary: bool,
    pub extra_cusp: Option<CuspTag>,
    pub margins: Margins,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_criteria: Option<TraceCriteria>,
}

impl RegionReport {
    pub fn is_nsdc(&self) -> bool {
        self.is_nsdc_minus || self.is_nsdc_plus
    }
}

/// Slack of |w| ≥ 1 on [π/3, π/2] / Re(w e^{−iπ/3}) ≥ 1 on [0, π/3], for w in
/// the closed first quadrant.
fn sector_slack(w: Complex64) -> f64 {
    if w.arg() >= PI / 3.0 {
        w.norm() - 1.0
    } else {
        (w * Complex64::from_polar(1.0, -PI / 3.0)).re - 1.0
    }
}

pub fn margins(p: &LambdaParam) -> Margins {
    let x = p.rep.re;
    let y = p.rep.im;
    let m = p.modulus;
    Margins {
        jorgensen: m - 0.5,
        nsdc_minus: m + x - 4.0,
        nsdc_plus: m - x - 4.0,
        classical: m + y.abs() - 2.0,
        marked_lp: x.abs() + y.abs() - 2.0,
        lyndon_ullman_k: sector_slack(p.first_quadrant()),
    }
}

pub fn classify_lambda(lambda: Complex64, eps: f64) -> Result<RegionReport> {
    if lambda.norm() <= eps {
        return Err(Error::ElementaryGroup);
    }
    let p = LambdaParam::new(lambda);
    let mg = margins(&p);
    let is_nsdc_minus = mg.nsdc_minus >= -eps;
    let is_nsdc_plus = mg.nsdc_plus >= -eps;
    let is_classical = mg.classical >= -eps;
    let is_marked_lp = mg.marked_lp >= -eps;
    let in_k = mg.lyndon_ullman_k < -eps;
    let jorgensen = mg.jorgensen < -eps;

    let summary = if jorgensen {
        Region::NonDiscreteJorgensen
    } else if is_nsdc_minus || is_nsdc_plus {
        Region::NSDC
    } else if is_classical {
        Region::ClassicalTS
    } else if !in_k {
        Region::NonClassicalTS
    } else {
        Region::Indeterminate
    };

    Ok(RegionReport {
        lambda: p,
        summary,
        is_nsdc_minus,
        is_nsdc_plus,
        is_classical,
        is_marked_lp,
        in_lyndon_ullman_k: in_k,
        on_classical_boundary: mg.classical.abs() <= eps,
        on_nsdc_boundary: mg.nsdc_minus.max(mg.nsdc_plus).abs() <= eps,
        extra_cusp: detect_extra_cusp(lambda, eps),
        margins: mg,
        trace_criteria: None,
    })
}

pub fn boundary_point(family: Family, omega: f64) -> Complex64 {
    match family {
        Family::ClassicalTS => Complex64::from_polar(2.0 / (1.0 + omega.sin().abs()), omega),
        Family::NSDC => Complex64::from_polar(4.0 / (1.0 + omega.cos().abs()), omega),
    }
}

pub fn trace_criteria(s: &MoebiusMap, t: &MoebiusMap, eps: f64) -> Result<RegionReport> {
    let lambda = lambda_from_generators(s, t, eps)?;
    let mut report = classify_lambda(lambda, eps)?;
    let tr = Complex64::new(2.0, 0.0) + lambda * 2.0;
    let mu = tr - 2.0;
    let muq = Complex64::new(mu.re.abs(), mu.im.abs());
    let sector_margin = 2.0 * sector_slack(muq / 2.0);
    report.trace_criteria = Some(TraceCriteria {
        tr_st: tr,
        nsdc_value: mu.norm() + mu.re.abs(),
        classical_value: mu.norm() + tr.im.abs(),
        sector_margin,
        sector_sufficient: sector_margin >= -eps,
    });
    Ok(report)
}

pub fn detect_extra_cusp(lambda: Complex64, eps: f64) -> Option<CuspTag> {
    let near = |z: Complex64| (lambda - z).norm() <= eps;
    if near(Complex64::new(-2.0, 0.0)) {
        Some(CuspTag::ST)
    } else if near(Complex64::new(2.0, 0.0)) {
        Some(CuspTag::SinvT)
    } else if near(Complex64::new(0.0, 1.0)) || near(Complex64::new(0.0, -1.0)) {
        Some(CuspTag::Commutator)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{standard_generators, DEFAULT_EPS};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn representative() {
        let p = LambdaParam::new(c(-3.0, 0.0));
        assert_eq!(p.rep, c(3.0, 0.0));
        assert_eq!(p.omega, 0.0);
        let p = LambdaParam::new(c(1.0, -1.0));
        assert!((p.rep - c(-1.0, 1.0)).norm() < 1e-15);
        assert!((p.omega - 3.0 * PI / 4.0).abs() < 1e-15);
        let p = LambdaParam::new(c(-3.0, -0.0));
        assert_eq!(p.rep.re, 3.0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_lambda(c(0.4, 0.0), DEFAULT_EPS).unwrap().summary, Region::NonDiscreteJorgensen);
        let r = classify_lambda(Complex64::from_polar(1.0, PI / 3.0), DEFAULT_EPS).unwrap();
        assert_eq!(r.summary, Region::NonClassicalTS);

        let r = classify_lambda(c(0.0, 1.5), DEFAULT_EPS).unwrap();
        assert_eq!(r.summary, Region::ClassicalTS);
        assert!(r.is_classical && !r.is_nsdc() && !r.is_marked_lp);

        let r = classify_lambda(c(0.0, 4.0), DEFAULT_EPS).unwrap();
        assert_eq!(r.summary, Region::NSDC);
        assert!(r.on_nsdc_boundary);

        assert_eq!(classify_lambda(c(1.0, 0.0), DEFAULT_EPS).unwrap().summary, Region::Indeterminate);
        assert!(matches!(classify_lambda(c(0.0, 0.0), DEFAULT_EPS), Err(Error::ElementaryGroup)));
    }

    #[test]
    fn boundary_examples() {
        assert!((boundary_point(Family::ClassicalTS, PI / 2.0) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((boundary_point(Family::ClassicalTS, 0.0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((boundary_point(Family::NSDC, PI / 2.0) - c(0.0, 4.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_examples() {
        let (s, t) = standard_generators(c(4.0, 0.0), DEFAULT_EPS).unwrap();
        let r = trace_criteria(&s, &t, DEFAULT_EPS).unwrap();
        assert_eq!(r.summary, Region::NSDC);
        assert!((r.trace_criteria.unwrap().nsdc_value - 16.0).abs() < 1e-12);

        let (s, t) = standard_generators(c(0.0, 1.0), DEFAULT_EPS).unwrap();
        let r = trace_criteria(&s, &t, DEFAULT_EPS).unwrap();
        assert!(r.is_classical && r.on_classical_boundary);
        assert!((r.trace_criteria.unwrap().classical_value - 4.0).abs() < 1e-12);

        let m = MoebiusMap::new(c(1.0, 0.5), c(0.3, 0.0), c(-0.2, 1.0), c(2.0, -0.1)).unwrap();
        let (s, t) = standard_generators(c(4.0, 0.0), DEFAULT_EPS).unwrap();
        let r = trace_criteria(&s, &t, DEFAULT_EPS).unwrap();
        let r2 = trace_criteria(&s.conjugate_by(&m), &t.conjugate_by(&m), 1e-8).unwrap();
        assert_eq!(r2.summary, r.summary);
        assert_eq!(r2.is_marked_lp, r.is_marked_lp);
        assert!((r2.lambda.lambda - r.lambda.lambda).norm() < 1e-8);
    }

    #[test]
    fn cusp_examples() {
        let tag = detect_extra_cusp(c(0.0, 1.0), DEFAULT_EPS).unwrap();
        assert_eq!(tag, CuspTag::Commutator);
        assert!((tag.word(c(0.0, 1.0)).trace() - c(-2.0, 0.0)).norm() < 1e-12);
        let tag = detect_extra_cusp(c(2.0, 0.0), DEFAULT_EPS).unwrap();
        assert_eq!(tag, CuspTag::SinvT);
        assert!((tag.word(c(2.0, 0.0)).trace() - c(-2.0, 0.0)).norm() < 1e-12);
        assert_eq!(detect_extra_cusp(c(1.99, 0.001), DEFAULT_EPS), None);
    }
}
