//! λ-plane rasters (PPM / SVG) and SVG plots of configurations.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::classify_lambda;
use crate::config::SchottkyConfiguration;
use crate::error::{Error, Result};
use crate::moebius::SpherePoint;
use crate::sphere::GeneralizedCircle;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: usize,
    pub height: usize,
}

impl PlaneWindow {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, width: usize, height: usize) -> Result<Self> {
        let w = PlaneWindow { x_min, x_max, y_min, y_max, width, height };
        w.check()?;
        Ok(w)
    }

    fn check(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(Error::EmptyWindow(format!(
                "[{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::EmptyWindow(format!("{}x{} pixels", self.width, self.height)));
        }
        Ok(())
    }

    /// The window grown about its center so pixels are square.
    pub fn letterboxed(&self) -> PlaneWindow {
        let h = ((self.x_max - self.x_min) / self.width as f64).max((self.y_max - self.y_min) / self.height as f64);
        let cx = 0.5 * (self.x_min + self.x_max);
        let cy = 0.5 * (self.y_min + self.y_max);
        let hw = 0.5 * h * self.width as f64;
        let hh = 0.5 * h * self.height as f64;
        PlaneWindow { x_min: cx - hw, x_max: cx + hw, y_min: cy - hh, y_max: cy + hh, ..*self }
    }

    pub fn pixel_size(&self) -> f64 {
        (self.x_max - self.x_min) / self.width as f64
    }

    /// λ at the center of pixel (col, row); row 0 is the top.
    pub fn pixel_center(&self, col: usize, row: usize) -> Complex64 {
        let h = self.pixel_size();
        Complex64::new(self.x_min + (col as f64 + 0.5) * h, self.y_max - (row as f64 + 0.5) * h)
    }

    /// Pixel containing z, if inside.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let h = self.pixel_size();
        let c = ((z.re - self.x_min) / h).floor();
        let r = ((self.y_max - z.im) / h).floor();
        let (c, r) = (c.clamp(-1.0, self.width as f64), r.clamp(-1.0, self.height as f64));
        // Points exactly on the right or bottom edge belong to the last pixel.
        let c = if c == self.width as f64 && z.re <= self.x_max { c - 1.0 } else { c };
        let r = if r == self.height as f64 && z.im >= self.y_min { r - 1.0 } else { r };
        (c >= 0.0 && r >= 0.0 && c < self.width as f64 && r < self.height as f64).then(|| (c as usize, r as usize))
    }

    fn to_svg(&self, z: Complex64) -> (f64, f64) {
        let h = self.pixel_size();
        ((z.re - self.x_min) / h, (self.y_max - z.im) / h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub name: String,
    pub points: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRaster {
    /// The letterboxed window actually rasterized.
    pub window: PlaneWindow,
    /// Row-major class codes, row 0 at the top.
    pub classes: Vec<u8>,
    pub overlay_curves: Vec<Overlay>,
}

/// Class colors: non-discrete, NSDC, classical, non-classical, indeterminate.
pub const PALETTE: [[u8; 3]; 5] = [
    [0x40, 0x40, 0x40],
    [0x1f, 0x77, 0xb4],
    [0x9e, 0xc9, 0xe2],
    [0xe3, 0x6c, 0x0a],
    [0xff, 0xff, 0xff],
];
const OVERLAY_RGB: [u8; 3] = [0xd6, 0x27, 0x28];

fn sample(n: usize, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    (0..=n).map(|k| f(a + (b - a) * k as f64 / n as f64)).collect()
}

fn overlays(window: &PlaneWindow) -> Vec<Overlay> {
    let per_unit = 4.0 / window.pixel_size();
    let n_for = |extent: f64| ((extent * per_unit).ceil() as usize).max(64);
    let mut out = Vec::new();
    for (name, sign) in [("classical_upper", 1.0), ("classical_lower", -1.0)] {
        out.push(Overlay {
            name: name.into(),
            points: sample(n_for(4.0), -2.0, 2.0, |x| Complex64::new(x, sign * (1.0 - x * x / 4.0))),
        });
    }
    for (name, sign) in [("nsdc_upper", 1.0), ("nsdc_lower", -1.0)] {
        out.push(Overlay {
            name: name.into(),
            points: sample(n_for(4.0), -2.0, 2.0, |x| Complex64::new(x, sign * (16.0 - 8.0 * x.abs()).max(0.0).sqrt())),
        });
    }
    out.push(Overlay {
        name: "jorgensen".into(),
        points: sample(n_for(PI), 0.0, 2.0 * PI, |t| Complex64::from_polar(0.5, t)),
    });
    // K: two unit-circle arcs and four tangent segments from ±2.
    let mut k = Vec::new();
    let seg = n_for(2.0);
    let arc = n_for(PI / 3.0);
    let e = |t: f64| Complex64::from_polar(1.0, t);
    k.extend(sample(seg, 0.0, 1.0, |s| Complex64::new(2.0, 0.0) * (1.0 - s) + e(PI / 3.0) * s));
    k.extend(sample(arc, PI / 3.0, 2.0 * PI / 3.0, e));
    k.extend(sample(seg, 0.0, 1.0, |s| e(2.0 * PI / 3.0) * (1.0 - s) + Complex64::new(-2.0, 0.0) * s));
    k.extend(sample(seg, 0.0, 1.0, |s| Complex64::new(-2.0, 0.0) * (1.0 - s) + e(4.0 * PI / 3.0) * s));
    k.extend(sample(arc, 4.0 * PI / 3.0, 5.0 * PI / 3.0, e));
    k.extend(sample(seg, 0.0, 1.0, |s| e(5.0 * PI / 3.0) * (1.0 - s) + Complex64::new(2.0, 0.0) * s));
    out.push(Overlay { name: "lyndon_ullman_k".into(), points: k });
    out
}

/// Per-pixel region codes at pixel centers, plus the analytic boundary curves.
pub fn render_plane(window: &PlaneWindow, eps: f64) -> Result<RegionRaster> {
    window.check()?;
    let w = window.letterboxed();
    let classes: Vec<u8> = (0..w.height)
        .into_par_iter()
        .flat_map_iter(|row| {
            (0..w.width).map(move |col| match classify_lambda(w.pixel_center(col, row), eps) {
                Ok(r) => r.summary.code(),
                Err(_) => 0,
            })
        })
        .collect();
    Ok(RegionRaster { window: w, classes, overlay_curves: overlays(&w) })
}

impl RegionRaster {
    pub fn code_at(&self, col: usize, row: usize) -> u8 {
        self.classes[row * self.window.width + col]
    }

    /// Pixels touched by the overlay curves.
    pub fn overlay_pixels(&self) -> Vec<bool> {
        let mut mask = vec![false; self.classes.len()];
        for o in &self.overlay_curves {
            for p in &o.points {
                if let Some((c, r)) = self.window.pixel_of(*p) {
                    mask[r * self.window.width + c] = true;
                }
            }
        }
        mask
    }

    /// Binary PPM; overlays drawn on top when requested.
    pub fn to_ppm(&self, with_overlays: bool) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.window.width, self.window.height).into_bytes();
        let mask = with_overlays.then(|| self.overlay_pixels());
        for (k, &code) in self.classes.iter().enumerate() {
            let rgb = match &mask {
                Some(m) if m[k] => OVERLAY_RGB,
                _ => PALETTE[code as usize],
            };
            out.extend_from_slice(&rgb);
        }
        out
    }

    /// SVG with one rect per horizontal run of equal codes, overlays as paths.
    pub fn to_svg(&self) -> String {
        let w = &self.window;
        let mut s = svg_header(w.width, w.height);
        s.push_str("<g class=\"raster\" shape-rendering=\"crispEdges\">\n");
        for row in 0..w.height {
            let mut col = 0;
            while col < w.width {
                let code = self.code_at(col, row);
                let start = col;
                while col < w.width && self.code_at(col, row) == code {
                    col += 1;
                }
                let [r, g, b] = PALETTE[code as usize];
                let _ = writeln!(
                    s,
                    "<rect class=\"c{code}\" x=\"{start}\" y=\"{row}\" width=\"{}\" height=\"1\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>",
                    col - start
                );
            }
        }
        s.push_str("</g>\n");
        for o in &self.overlay_curves {
            let _ = writeln!(
                s,
                "<path class=\"overlay {}\" d=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\"/>",
                o.name,
                path_data(w, &o.points)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn svg_header(width: usize, height: usize) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

fn path_data(w: &PlaneWindow, pts: &[Complex64]) -> String {
    let mut d = String::new();
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = w.to_svg(*p);
        let _ = write!(d, "{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" });
    }
    d
}

/// The part of the line Re(z n̄) = offset inside the window, if any.
fn clip_line(w: &PlaneWindow, normal: Complex64, offset: f64) -> Option<(Complex64, Complex64)> {
    let base = normal * offset;
    let dir = Complex64::new(0.0, 1.0) * normal;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, d, min, max) in [(base.re, dir.re, w.x_min, w.x_max), (base.im, dir.im, w.y_min, w.y_max)] {
        if d.abs() < 1e-15 {
            if p < min || p > max {
                return None;
            }
        } else {
            let (a, b) = ((min - p) / d, (max - p) / d);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    (lo < hi).then(|| (base + dir * lo, base + dir * hi))
}

/// Window around every finite feature of a configuration, with a 10% margin.
pub fn config_window(config: &SchottkyConfiguration, width: usize, height: usize) -> Result<PlaneWindow> {
    let mut pts: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    for s in &config.sides {
        match *s {
            GeneralizedCircle::Circle { center, radius, .. } => {
                pts.push(center + Complex64::new(radius, radius));
                pts.push(center - Complex64::new(radius, radius));
            }
            GeneralizedCircle::Line { normal, offset, .. } => pts.push(normal * offset),
        }
    }
    pts.extend(config.tangencies.iter().filter_map(|t| t.2.as_finite()));
    let fold = |f: fn(&Complex64) -> f64| {
        pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (x0, x1) = fold(|z| z.re);
    let (y0, y1) = fold(|z| z.im);
    let pad = 0.1 * (x1 - x0).max(y1 - y0).max(1.0);
    PlaneWindow::new(x0 - pad, x1 + pad, y0 - pad, y1 + pad, width, height)
}

/// SVG of sides, tangency markers, polylines and pairing arrows.
pub fn render_config_svg(config: &SchottkyConfiguration, window: &PlaneWindow) -> Result<String> {
    window.check()?;
    let w = window.letterboxed();
    let h = w.pixel_size();
    let mut s = svg_header(w.width, w.height);
    s.push_str("<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"#555555\"/></marker></defs>\n");
    // Axes.
    if let Some((a, b)) = clip_line(&w, Complex64::new(0.0, 1.0), 0.0) {
        let _ = writeln!(s, "<path class=\"axis\" d=\"{}\" stroke=\"#bbbbbb\" fill=\"none\"/>", path_data(&w, &[a, b]));
    }
    if let Some((a, b)) = clip_line(&w, Complex64::new(1.0, 0.0), 0.0) {
        let _ = writeln!(s, "<path class=\"axis\" d=\"{}\" stroke=\"#bbbbbb\" fill=\"none\"/>", path_data(&w, &[a, b]));
    }
    let mut anchors = Vec::new();
    for (k, side) in config.sides.iter().enumerate() {
        match *side {
            GeneralizedCircle::Circle { center, radius, .. } => {
                let (x, y) = w.to_svg(center);
                let _ = writeln!(
                    s,
                    "<circle class=\"side\" id=\"side{k}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#1f77b4\"/>",
                    radius / h
                );
                anchors.push(Some(center));
            }
            GeneralizedCircle::Line { normal, offset, .. } => match clip_line(&w, normal, offset) {
                Some((a, b)) => {
                    let _ = writeln!(
                        s,
                        "<path class=\"side\" id=\"side{k}\" d=\"{}\" fill=\"none\" stroke=\"#1f77b4\"/>",
                        path_data(&w, &[a, b])
                    );
                    anchors.push(Some((a + b) / 2.0));
                }
                None => anchors.push(None),
            },
        }
    }
    for &(_, _, p) in &config.tangencies {
        if let SpherePoint::Finite(z) = p {
            let (x, y) = w.to_svg(z);
            let _ = writeln!(
                s,
                "<rect class=\"tangency\" x=\"{:.3}\" y=\"{:.3}\" width=\"2\" height=\"2\" fill=\"#d62728\"/>",
                x - 1.0,
                y - 1.0
            );
        }
    }
    for line in &config.polylines {
        let _ = writeln!(
            s,
            "<path class=\"polyline\" d=\"{}\" fill=\"none\" stroke=\"#2ca02c\"/>",
            path_data(&w, line)
        );
    }
    for (k, &(i, j, _)) in config.pairings.iter().enumerate() {
        if let (Some(Some(a)), Some(Some(b))) = (anchors.get(i), anchors.get(j)) {
            let (x0, y0) = w.to_svg(*a);
            let (x1, y1) = w.to_svg(*b);
            let (mx, my) = (0.5 * (x0 + x1), 0.5 * (y0 + y1) - 12.0);
            let _ = writeln!(
                s,
                "<path class=\"pairing\" d=\"M{x0:.3},{y0:.3} Q{mx:.3},{my:.3} {x1:.3},{y1:.3}\" fill=\"none\" stroke=\"#555555\" marker-end=\"url(#arrow)\"/>"
            );
            let _ = writeln!(s, "<text class=\"pairing-label\" x=\"{mx:.3}\" y=\"{my:.3}\" font-size=\"10\">g{k}</text>");
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_classical_config, build_gamma_chain};
    use crate::config::ConfigKind;
    use crate::moebius::DEFAULT_EPS;

    #[test]
    fn plane_examples() {
        let w = PlaneWindow::new(-0.4, 0.4, -0.3, 0.3, 40, 30).unwrap();
        let r = render_plane(&w, DEFAULT_EPS).unwrap();
        assert!(r.classes.iter().all(|&c| c == 0));

        let w = PlaneWindow::new(0.4, 0.6, 0.8, 0.9, 20, 10).unwrap();
        let r = render_plane(&w, DEFAULT_EPS).unwrap();
        let target = Complex64::from_polar(1.0, PI / 3.0);
        let (c, row) = r.window.pixel_of(target).unwrap();
        // The pixel center is off the curve; classify the region it lies in.
        let centre = r.window.pixel_center(c, row);
        let want = classify_lambda(centre, DEFAULT_EPS).unwrap().summary.code();
        assert_eq!(r.code_at(c, row), want);
        assert!(PlaneWindow::new(1.0, 1.0, 0.0, 1.0, 10, 10).is_err());
    }

    #[test]
    fn config_svg_counts() {
        let cfg = build_classical_config(Complex64::new(0.0, 1.0), DEFAULT_EPS).unwrap();
        let w = config_window(&cfg, 400, 400).unwrap();
        let svg = render_config_svg(&cfg, &w).unwrap();
        assert_eq!(svg.matches("<circle class=\"side\"").count(), 2);
        assert_eq!(svg.matches("<path class=\"side\"").count(), 2);
        assert_eq!(svg.matches("class=\"tangency\"").count(), 5);

        let lam = Complex64::from_polar(1.0, PI / 3.0);
        let chain = build_gamma_chain(lam, 1, DEFAULT_EPS).unwrap();
        let svg = render_config_svg(&chain, &config_window(&chain, 400, 400).unwrap()).unwrap();
        assert_eq!(svg.matches("<circle class=\"side\"").count(), 6);

        let empty = SchottkyConfiguration::new(ConfigKind::ClassicalPP, Complex64::new(1.0, 0.0));
        let svg = render_config_svg(&empty, &PlaneWindow::new(-1.0, 1.0, -1.0, 1.0, 10, 10).unwrap()).unwrap();
        assert_eq!(svg.matches("class=\"axis\"").count(), 2);
        assert_eq!(svg.matches("class=\"side\"").count(), 0);
    }
}
