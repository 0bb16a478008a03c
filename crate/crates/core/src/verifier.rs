//! Independent checks: side pairings and disjointness, ping-pong on reduced
//! words, elliptic scans and a grid search for NSDC triples.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SchottkyConfiguration;
use crate::error::{Error, Result};
use crate::moebius::{Mat2, MoebiusMap, SpherePoint};
use crate::nsdc::OrthoEnd;
use crate::sphere::{
    image_circle, maps_exterior_to_interior, nsdc_triple, pullback_circle, relation, tangent_circle_through,
    CircleRelation, GeneralizedCircle,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingCheck {
    pub from: usize,
    pub to: usize,
    pub image_matches: bool,
    pub exterior_to_interior: bool,
    pub defect: f64,
}

impl PairingCheck {
    pub fn ok(&self) -> bool {
        self.image_matches && self.exterior_to_interior
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    /// Row i, column j: relation of side i to side j (None on the diagonal).
    pub side_relations: Vec<Vec<Option<CircleRelation>>>,
    pub pairing_checks: Vec<PairingCheck>,
    pub unexpected_tangencies: Vec<(usize, usize, SpherePoint)>,
    /// Expected tangencies that the relation check did not find.
    pub missing_tangencies: Vec<(usize, usize, SpherePoint)>,
    /// Largest pairing defect.
    pub max_defect: f64,
}

fn point_tol(tol: f64, p: &SpherePoint) -> f64 {
    let scale = p.as_finite().map_or(1.0, |z| 1.0 + z.norm());
    (100.0 * tol).max(1e-7) * scale
}

pub fn verify_configuration(config: &SchottkyConfiguration, tol: f64) -> Result<VerificationReport> {
    let n = config.sides.len();
    if config.pairings.is_empty() {
        return Err(Error::MalformedConfig("no pairings".into()));
    }
    for &(i, j, _) in &config.pairings {
        if i >= n || j >= n {
            return Err(Error::MalformedConfig(format!("pairing ({i}, {j}) out of range")));
        }
    }
    for &(i, j, _) in &config.tangencies {
        if i >= n || j >= n {
            return Err(Error::MalformedConfig(format!("tangency ({i}, {j}) out of range")));
        }
    }
    for s in &config.sides {
        s.validate(tol)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            if config.sides[i].locus_defect(&config.sides[j]) <= tol {
                return Err(Error::MalformedConfig(format!("sides {i} and {j} coincide")));
            }
        }
    }

    let mut max_defect = 0.0_f64;
    let mut pairing_checks = Vec::new();
    for &(i, j, g) in &config.pairings {
        let img = image_circle(&g, &config.sides[i], tol);
        let defect = img.locus_defect(&config.sides[j]);
        max_defect = max_defect.max(defect);
        let image_matches = defect <= tol;
        let exterior_to_interior =
            image_matches && maps_exterior_to_interior(&g, &config.sides[i], &config.sides[j], tol).unwrap_or(false);
        pairing_checks.push(PairingCheck { from: i, to: j, image_matches, exterior_to_interior, defect });
    }

    let mut side_relations = vec![vec![None; n]; n];
    let mut relations_ok = true;
    let mut unexpected = Vec::new();
    let mut found = vec![false; config.tangencies.len()];
    for i in 0..n {
        for j in i + 1..n {
            let r = relation(&config.sides[i], &config.sides[j], tol);
            side_relations[i][j] = Some(r);
            side_relations[j][i] = Some(match r {
                CircleRelation::FirstInsideSecond => CircleRelation::SecondInsideFirst,
                CircleRelation::SecondInsideFirst => CircleRelation::FirstInsideSecond,
                other => other,
            });
            if !r.is_tangent_or_disjoint() {
                relations_ok = false;
            }
            if let CircleRelation::Tangent { point, .. } = r {
                let hit = config.tangencies.iter().position(|&(a, b, p)| {
                    ((a, b) == (i, j) || (a, b) == (j, i)) && p.approx_eq(&point, point_tol(tol, &point))
                });
                match hit {
                    Some(k) => found[k] = true,
                    None => unexpected.push((i, j, point)),
                }
            }
        }
    }
    let missing = config
        .tangencies
        .iter()
        .zip(&found)
        .filter(|(_, f)| !**f)
        .map(|(t, _)| *t)
        .collect();

    let passed = pairing_checks.iter().all(PairingCheck::ok) && relations_ok && unexpected.is_empty();
    Ok(VerificationReport {
        passed,
        side_relations,
        pairing_checks,
        unexpected_tangencies: unexpected,
        missing_tangencies: missing,
        max_defect,
    })
}

/// A ping-pong letter: its matrix, the index of its inverse letter and the
/// side whose interior receives the common exterior.
#[derive(Clone, Debug)]
pub struct Letter {
    pub name: String,
    pub mat: Mat2,
    pub inverse: usize,
    pub target: usize,
}

/// Letters of the pairings: a map and its inverse for i ≠ j, one involutive
/// letter for a self-pairing.
pub fn pairing_alphabet(config: &SchottkyConfiguration) -> Vec<Letter> {
    let mut letters = Vec::new();
    for (k, &(i, j, g)) in config.pairings.iter().enumerate() {
        let at = letters.len();
        if i == j {
            letters.push(Letter { name: format!("P{k}"), mat: *g.matrix(), inverse: at, target: j });
        } else {
            letters.push(Letter { name: format!("P{k}"), mat: *g.matrix(), inverse: at + 1, target: j });
            letters.push(Letter { name: format!("p{k}"), mat: g.matrix().inverse(), inverse: at, target: i });
        }
    }
    letters
}

fn find_pairing(config: &SchottkyConfiguration, g: &MoebiusMap, tol: f64) -> Option<(usize, usize)> {
    for &(i, j, p) in &config.pairings {
        if p.approx_eq(g, tol) {
            return Some((i, j));
        }
        if p.inverse().approx_eq(g, tol) {
            return Some((j, i));
        }
    }
    None
}

/// Letters S, s, T, t matched to the configuration's pairings.
pub fn generator_alphabet(
    s: &MoebiusMap,
    t: &MoebiusMap,
    config: &SchottkyConfiguration,
    tol: f64,
) -> Result<Vec<Letter>> {
    let tol = tol.max(1e-9);
    let (s_from, s_to) = find_pairing(config, s, tol).ok_or(Error::GeneratorNotPaired)?;
    let (t_from, t_to) = find_pairing(config, t, tol).ok_or(Error::GeneratorNotPaired)?;
    Ok(vec![
        Letter { name: "S".into(), mat: *s.matrix(), inverse: 1, target: s_to },
        Letter { name: "s".into(), mat: s.matrix().inverse(), inverse: 0, target: s_from },
        Letter { name: "T".into(), mat: *t.matrix(), inverse: 3, target: t_to },
        Letter { name: "t".into(), mat: t.matrix().inverse(), inverse: 2, target: t_from },
    ])
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WordOracleReport {
    pub depth: usize,
    /// Reduced words with 1 ≤ length ≤ depth.
    pub words_checked: usize,
    pub words_at_max_depth: usize,
    pub violations: Vec<(String, String)>,
    /// Cyclically reduced words, not powers of one letter, with real trace in [−2, 2].
    pub near_elliptic: Vec<(String, Complex64)>,
    pub base_point: Option<Complex64>,
}

/// A point of the common exterior as far from every side as a grid search finds.
pub fn base_point(config: &SchottkyConfiguration) -> Option<Complex64> {
    let mut extent = 1.0_f64;
    let mut mid = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    for s in &config.sides {
        match *s {
            GeneralizedCircle::Circle { center, radius, .. } => {
                extent = extent.max(center.norm() + radius);
                mid += center;
                count += 1.0;
            }
            GeneralizedCircle::Line { offset, .. } => extent = extent.max(offset.abs() + 1.0),
        }
    }
    if count > 0.0 {
        mid /= count;
    }
    let margin = |z: Complex64| config.sides.iter().map(|s| -s.signed(z)).fold(f64::INFINITY, f64::min);
    let mut best: Option<(f64, Complex64)> = None;
    let k = 80;
    for a in 0..=k {
        for b in 0..=k {
            let z = mid
                + Complex64::new(
                    extent * (2.0 * a as f64 / k as f64 - 1.0),
                    extent * (2.0 * b as f64 / k as f64 - 1.0),
                );
            let m = margin(z);
            if best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, z));
            }
        }
    }
    best.filter(|(m, _)| *m > 0.0).map(|(_, z)| z)
}

fn is_identity(m: &Mat2, tol: f64) -> bool {
    m.dist(&Mat2::IDENTITY).min(m.dist(&Mat2::IDENTITY.scale(Complex64::new(-1.0, 0.0)))) <= tol
}

fn is_real_trace(tr: Complex64, tol: f64) -> bool {
    tr.im.abs() <= tol * tr.norm().max(1.0)
}

/// Visits every reduced word of length 1..=depth as (letters, matrix).
fn for_each_reduced(letters: &[Letter], depth: usize, f: &mut dyn FnMut(&[usize], &Mat2)) {
    fn rec(letters: &[Letter], depth: usize, word: &mut Vec<usize>, m: Mat2, f: &mut dyn FnMut(&[usize], &Mat2)) {
        if !word.is_empty() {
            f(word, &m);
        }
        if word.len() == depth {
            return;
        }
        for (k, l) in letters.iter().enumerate() {
            if let Some(&last) = word.last() {
                if letters[last].inverse == k {
                    continue;
                }
            }
            word.push(k);
            rec(letters, depth, word, m * l.mat, f);
            word.pop();
        }
    }
    rec(letters, depth, &mut Vec::new(), Mat2::IDENTITY, f);
}

fn word_name(letters: &[Letter], w: &[usize]) -> String {
    w.iter().map(|&k| letters[k].name.as_str()).collect()
}

fn cyclically_reduced_mixed(letters: &[Letter], w: &[usize]) -> bool {
    let first = w[0];
    let last = w[w.len() - 1];
    letters[last].inverse != first && w.iter().any(|&k| k != first)
}

/// Ping-pong over an explicit alphabet. A word x₁⋯x_k must carry the base
/// point into the interior of x₁'s target side and must not be ±I.
pub fn ping_pong_words(
    letters: &[Letter],
    config: &SchottkyConfiguration,
    depth: usize,
    tol: f64,
) -> Result<WordOracleReport> {
    let mut report = WordOracleReport { depth, ..Default::default() };
    if depth == 0 {
        return Ok(report);
    }
    let z0 = base_point(config).ok_or_else(|| Error::MalformedConfig("no common exterior point".into()))?;
    report.base_point = Some(z0);
    let mut rows: Vec<(Vec<usize>, String, Option<String>, Option<Complex64>)> = Vec::new();
    for_each_reduced(letters, depth, &mut |w, m| {
        let target = &config.sides[letters[w[0]].target];
        let mut reason = None;
        if is_identity(m, tol) {
            reason = Some("word is the identity".to_string());
        } else {
            let inside = match m.apply(SpherePoint::Finite(z0)) {
                SpherePoint::Infinity => target.infinity_inside() != Some(false),
                SpherePoint::Finite(z) => target.signed(z) > -tol * (1.0 + z.norm()),
            };
            if !inside {
                reason = Some(format!("base point not inside side {}", letters[w[0]].target));
            }
        }
        let tr = m.trace();
        let near = (cyclically_reduced_mixed(letters, w) && is_real_trace(tr, tol) && tr.re.abs() <= 2.0 + tol)
            .then_some(tr);
        if w.len() == depth {
            report.words_at_max_depth += 1;
        }
        report.words_checked += 1;
        if reason.is_some() || near.is_some() {
            rows.push((w.to_vec(), word_name(letters, w), reason, near));
        }
    });
    rows.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    for (_, name, reason, near) in rows {
        if let Some(r) = reason {
            report.violations.push((name.clone(), r));
        }
        if let Some(tr) = near {
            report.near_elliptic.push((name, tr));
        }
    }
    Ok(report)
}

pub fn ping_pong_oracle(
    s: &MoebiusMap,
    t: &MoebiusMap,
    config: &SchottkyConfiguration,
    depth: usize,
    tol: f64,
) -> Result<WordOracleReport> {
    if !verify_configuration(config, tol)?.passed {
        return Err(Error::UnverifiedConfig);
    }
    if depth == 0 {
        return Ok(WordOracleReport::default());
    }
    let letters = generator_alphabet(s, t, config, tol)?;
    ping_pong_words(&letters, config, depth, tol)
}

fn st_letters(s: &MoebiusMap, t: &MoebiusMap) -> Vec<Letter> {
    vec![
        Letter { name: "S".into(), mat: *s.matrix(), inverse: 1, target: 0 },
        Letter { name: "s".into(), mat: s.matrix().inverse(), inverse: 0, target: 0 },
        Letter { name: "T".into(), mat: *t.matrix(), inverse: 3, target: 0 },
        Letter { name: "t".into(), mat: t.matrix().inverse(), inverse: 2, target: 0 },
    ]
}

/// Reduced words whose trace is real and strictly inside (−2, 2).
pub fn elliptic_scan(s: &MoebiusMap, t: &MoebiusMap, depth: usize, tol: f64) -> Vec<(String, Complex64)> {
    let letters = st_letters(s, t);
    let mut rows = Vec::new();
    for_each_reduced(&letters, depth, &mut |w, m| {
        let tr = m.trace();
        if is_real_trace(tr, tol) && tr.re.abs() < 2.0 - tol {
            rows.push((w.to_vec(), word_name(&letters, w), tr));
        }
    });
    rows.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    rows.into_iter().map(|(_, n, tr)| (n, tr)).collect()
}

/// Traces of SⁿT for 2 ≤ |n| ≤ n_max and of (ST)ⁿT for 1 ≤ n ≤ n_max.
pub fn power_word_traces(s: &MoebiusMap, t: &MoebiusMap, n_max: usize) -> Vec<(String, Complex64)> {
    let sm = *s.matrix();
    let tm = *t.matrix();
    let mut out = Vec::new();
    for n in 2..=n_max as i32 {
        for sign in [1, -1] {
            let base = if sign > 0 { sm } else { sm.inverse() };
            let mut p = Mat2::IDENTITY;
            for _ in 0..n {
                p = p * base;
            }
            out.push((format!("S^{}T", sign * n), (p * tm).trace()));
        }
    }
    let st = sm * tm;
    let mut p = Mat2::IDENTITY;
    for n in 1..=n_max {
        p = p * st;
        out.push((format!("(ST)^{n}T"), (p * tm).trace()));
    }
    out
}

/// k-th of n generalized circles through x and y: pull-back angle
/// θ = −π/2 + πk/n through two finite points (k = 0 is the line), or the line
/// at angle πk/n through the finite point.
fn family_member(x: SpherePoint, y: SpherePoint, k: usize, n: usize) -> Option<GeneralizedCircle> {
    let frac = k as f64 / n as f64;
    match (x, y) {
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
            if k == 0 {
                Some(GeneralizedCircle::line_through(x, y))
            } else {
                let theta = -PI / 2.0 + PI * frac;
                Some(pullback_circle(x, y, theta.tan()))
            }
        }
        (SpherePoint::Finite(p), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(p)) => {
            let nrm = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, PI * frac);
            Some(GeneralizedCircle::line(nrm, (p * nrm.conj()).re))
        }
        _ => None,
    }
}

fn shared(p: (SpherePoint, SpherePoint), q: (SpherePoint, SpherePoint), eps: f64) -> Option<(SpherePoint, SpherePoint)> {
    for (s, o) in [(p.0, p.1), (p.1, p.0)] {
        if s.approx_eq(&q.0, eps) || s.approx_eq(&q.1, eps) {
            return Some((s, o));
        }
    }
    None
}

/// Candidates through `pair`: tangent to `n` at a shared point when there is
/// one, else the whole grid family.
fn candidates(
    pair: (SpherePoint, SpherePoint),
    npair: (SpherePoint, SpherePoint),
    ncircle: &GeneralizedCircle,
    grid_n: usize,
    eps: f64,
) -> Vec<GeneralizedCircle> {
    match shared(pair, npair, eps) {
        Some((s, o)) => tangent_circle_through(s, o, ncircle, eps).into_iter().collect(),
        None => (0..grid_n).filter_map(|k| family_member(pair.0, pair.1, k, grid_n)).collect(),
    }
}

/// Brute-force search for pairwise tangent-or-disjoint, non-separating circles
/// through (a, a′), (n, n′), (b, b′). `None` means "not found at this resolution".
pub fn nsdc_search_oracle(oe: &OrthoEnd, grid_n: usize, eps: f64) -> Option<[GeneralizedCircle; 3]> {
    let [pa, pn, pb] = oe.pairs();
    for k in 0..grid_n {
        let Some(nc) = family_member(pn.0, pn.1, k, grid_n) else { continue };
        let ca = candidates(pa, pn, &nc, grid_n, eps);
        let cb = candidates(pb, pn, &nc, grid_n, eps);
        for a in &ca {
            for b in &cb {
                if let Some(t) = nsdc_triple([*a, nc, *b], eps) {
                    return Some(t);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_classical_config;
    use crate::moebius::{standard_generators, DEFAULT_EPS};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn verify_examples() {
        let rep = verify_configuration(&build_classical_config(c(0.0, 2.0), DEFAULT_EPS).unwrap(), 1e-9).unwrap();
        assert!(rep.passed);
        let cfg = build_classical_config(c(0.0, 1.0), DEFAULT_EPS).unwrap();
        assert_eq!(cfg.tangencies.len(), 6);
        assert!(verify_configuration(&cfg, 1e-9).unwrap().passed);

        let mut broken = build_classical_config(c(0.0, 2.0), DEFAULT_EPS).unwrap();
        if let GeneralizedCircle::Circle { center, .. } = &mut broken.sides[1] {
            *center += 0.1;
        }
        let rep = verify_configuration(&broken, 1e-9).unwrap();
        assert!(!rep.passed && !rep.pairing_checks[0].ok());

        let mut bad = broken.clone();
        bad.pairings[0].1 = 9;
        assert!(matches!(verify_configuration(&bad, 1e-9), Err(Error::MalformedConfig(_))));
    }

    #[test]
    fn ping_pong_examples() {
        let lam = c(3.0, 0.0);
        let (s, t) = standard_generators(lam, DEFAULT_EPS).unwrap();
        let cfg = build_classical_config(lam, DEFAULT_EPS).unwrap();
        let rep = ping_pong_oracle(&s, &t, &cfg, 8, 1e-9).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.words_at_max_depth, 8748);
        assert_eq!(rep.words_checked, 13120);

        let lam = c(0.0, 1.0);
        let (s, t) = standard_generators(lam, DEFAULT_EPS).unwrap();
        let cfg = build_classical_config(lam, DEFAULT_EPS).unwrap();
        let rep = ping_pong_oracle(&s, &t, &cfg, 6, 1e-9).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        let comm = rep.near_elliptic.iter().find(|(w, _)| w == "STst").expect("[S,T] recorded");
        assert!((comm.1 - c(-2.0, 0.0)).norm() < 1e-12);

        assert_eq!(ping_pong_oracle(&s, &t, &cfg, 0, 1e-9).unwrap().words_checked, 0);
    }

    #[test]
    fn elliptic_examples() {
        let (s, t) = standard_generators(c(3.0, 0.0), DEFAULT_EPS).unwrap();
        assert!(elliptic_scan(&s, &t, 8, 1e-9).is_empty());
        let (s, t) = standard_generators(c(2.0, 0.0), DEFAULT_EPS).unwrap();
        let scan = elliptic_scan(&s, &t, 4, 1e-9);
        assert!(!scan.iter().any(|(w, _)| w == "sT"));
    }

    #[test]
    fn oracle_examples() {
        assert!(nsdc_search_oracle(&OrthoEnd::standard(c(4.5, 0.0)), 360, 1e-9).is_some());
        assert!(nsdc_search_oracle(&OrthoEnd::standard(c(0.0, 2.0)), 720, 1e-9).is_none());
        assert!(nsdc_search_oracle(&OrthoEnd::standard(c(0.0, 4.0)), 720, 1e-9).is_some());
    }
}
