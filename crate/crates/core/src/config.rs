//! The certificate format shared by the builders, the verifier and the renderer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{MoebiusMap, SpherePoint};
use crate::sphere::GeneralizedCircle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigKind {
    ClassicalPP,
    MarkedLP,
    GammaChain,
    NSDCTriple,
    NonClassicalWitness,
}

/// Parameters of the circle-pair/line-pair construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigGeometryParams {
    pub psi: f64,
    pub phi: f64,
    pub t: f64,
    pub tau: Complex64,
    pub d_c: f64,
    pub d_l: f64,
}

/// Sides with their pairings and the tangencies the construction expects.
/// A pairing (i, j, g) means g carries the exterior of side i onto the interior
/// of side j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyConfiguration {
    pub kind: ConfigKind,
    pub lambda: Complex64,
    pub sides: Vec<GeneralizedCircle>,
    pub pairings: Vec<(usize, usize, MoebiusMap)>,
    pub tangencies: Vec<(usize, usize, SpherePoint)>,
    /// Finite polylines; unbounded rays are clipped.
    #[serde(default)]
    pub polylines: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_turns: Option<Vec<MoebiusMap>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ConfigGeometryParams>,
}

impl SchottkyConfiguration {
    pub fn new(kind: ConfigKind, lambda: Complex64) -> Self {
        SchottkyConfiguration {
            kind,
            lambda,
            sides: Vec::new(),
            pairings: Vec::new(),
            tangencies: Vec::new(),
            polylines: Vec::new(),
            half_turns: None,
            params: None,
        }
    }

    pub fn finite_tangencies(&self) -> usize {
        self.tangencies.iter().filter(|t| !t.2.is_infinite()).count()
    }

    /// Simultaneous image of every side, pairing and tangency under `m`.
    pub fn transported(&self, m: &MoebiusMap, eps: f64) -> SchottkyConfiguration {
        let mut out = self.clone();
        out.sides = self.sides.iter().map(|s| crate::sphere::image_circle(m, s, eps)).collect();
        out.pairings = self.pairings.iter().map(|&(i, j, g)| (i, j, g.conjugate_by(m))).collect();
        out.tangencies = self.tangencies.iter().map(|&(i, j, p)| (i, j, m.apply(p))).collect();
        out.half_turns = self.half_turns.as_ref().map(|h| h.iter().map(|g| g.conjugate_by(m)).collect());
        out.polylines.clear();
        out.params = None;
        out
    }

    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }

    pub fn from_json(s: &str) -> Result<SchottkyConfiguration> {
        let c: SchottkyConfiguration = serde_json::from_str(s)?;
        for side in &c.sides {
            side.validate(1e-9)?;
        }
        let n = c.sides.len();
        if c.pairings.iter().any(|p| p.0 >= n || p.1 >= n) || c.tangencies.iter().any(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::MalformedConfig("side index out of range".into()));
        }
        Ok(c)
    }
}
