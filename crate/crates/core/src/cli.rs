//! Command-line front end. `run_cli` never panics on bad input; it maps
//! failures to exit codes (0 ok, 1 failure, 2 usage, 3 criterion not met).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::builder::{build_classical_config, build_gamma_chain, build_lp_config, nonclassical_witness};
use crate::classifier::{boundary_point, classify_lambda, Family};
use crate::config::{ConfigKind, SchottkyConfiguration};
use crate::error::{Error, Result};
use crate::moebius::DEFAULT_EPS;
use crate::nsdc::{build_nsdc_config, NsdcSign};
use crate::render::{config_window, render_config_svg, render_plane, PlaneWindow};
use crate::verifier::{pairing_alphabet, ping_pong_words, verify_configuration};
use crate::wire;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CRITERION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tschottky", version, about = "Two-parabolic Möbius groups: classify, build, verify, plot")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Classical,
    Lp,
    Gamma,
    Nsdc,
    Witness,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Sign {
    Minus,
    Plus,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FamilyArg {
    Classical,
    Nsdc,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify λ into its region.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        json: bool,
    },
    /// Build an explicit configuration and write it as JSON.
    Build {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Chain half-length for --kind gamma.
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// Which NSDC region for --kind nsdc; picked from λ when omitted.
        #[arg(long, value_enum)]
        sign: Option<Sign>,
    },
    /// Check a configuration file geometrically, optionally with the word test.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Draw a configuration as SVG.
    PlotConfig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// x0,x1,y0,y1; fitted to the configuration when omitted.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value = "800x800")]
        size: String,
    },
    /// Rasterize the λ-plane by region (.ppm or .svg by extension).
    PlotPlane {
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value = "600x600")]
        size: String,
        #[arg(long)]
        out: PathBuf,
        /// Leave the boundary curves off the PPM.
        #[arg(long)]
        no_overlay: bool,
    },
    /// Sample a region boundary, one "x y" line per point.
    Boundary {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
}

/// Parse "a", "bi", "a+bi", "a-bi", "i", "-i". Spaces are ignored.
pub fn parse_lambda(s: &str) -> Result<Complex64> {
    let err = || Error::Parse(s.to_string());
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err());
    }
    let num = |x: &str| -> Result<f64> {
        let v = match x {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => x.parse::<f64>().map_err(|_| err())?,
        };
        if v.is_finite() { Ok(v) } else { Err(err()) }
    };
    let Some(body) = t.strip_suffix('i') else {
        if t == "+" || t == "-" {
            return Err(err());
        }
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = &body[..k];
            if re.is_empty() || re == "+" || re == "-" {
                return Err(err());
            }
            Ok(Complex64::new(num(re)?, num(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

fn parse_window(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(s.to_string()));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| Error::Parse(s.to_string()))?;
    }
    Ok(out)
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| Error::Parse(s.to_string()))?;
    let w = w.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
    let h = h.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
    Ok((w, h))
}

/// Tolerance from SCHOTTKY_EPS, or the default.
pub fn env_eps() -> Result<f64> {
    match std::env::var("SCHOTTKY_EPS") {
        Err(_) => Ok(DEFAULT_EPS),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(e) if e.is_finite() && e > 0.0 => Ok(e),
            _ => Err(Error::OutOfRange(format!("SCHOTTKY_EPS={v:?} is not a positive number"))),
        },
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::EmptyWindow(_) | Error::OutOfRange(_) | Error::ElementaryGroup => EXIT_USAGE,
        Error::NotNSDC(_)
        | Error::NotClassical(_)
        | Error::NotMarkedLP(_)
        | Error::NotGammaChain
        | Error::NotNonClassical => EXIT_CRITERION,
        _ => EXIT_FAIL,
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<SchottkyConfiguration> {
    SchottkyConfiguration::from_json(&std::fs::read_to_string(path)?)
}

/// Entry point for the binary. `argv[0]` is the program name.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Same as `run_cli` with explicit output streams.
pub fn run_cli_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    let eps = env_eps()?;
    match cmd {
        Cmd::Classify { lambda, json } => {
            let r = classify_lambda(parse_lambda(&lambda)?, eps)?;
            if json {
                writeln!(out, "{}", wire::to_json(&r)?)?;
            } else {
                let l = r.lambda.lambda;
                writeln!(out, "lambda = {} {:+}i", l.re, l.im)?;
                writeln!(out, "region = {:?}", r.summary)?;
                writeln!(
                    out,
                    "nsdc_minus = {} nsdc_plus = {} classical = {} marked_lp = {} in_k = {}",
                    r.is_nsdc_minus, r.is_nsdc_plus, r.is_classical, r.is_marked_lp, r.in_lyndon_ullman_k
                )?;
                if let Some(c) = r.extra_cusp {
                    writeln!(out, "extra_cusp = {c}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Build { lambda, kind, out: path, n_max, sign } => {
            let l = parse_lambda(&lambda)?;
            let cfg = match kind {
                Kind::Classical => build_classical_config(l, eps)?,
                Kind::Lp => build_lp_config(l, eps)?,
                Kind::Gamma => build_gamma_chain(l, n_max, eps)?,
                Kind::Witness => nonclassical_witness(l, eps)?,
                Kind::Nsdc => {
                    let sign = match sign {
                        Some(Sign::Minus) => NsdcSign::Minus,
                        Some(Sign::Plus) => NsdcSign::Plus,
                        None => {
                            let r = classify_lambda(l, eps)?;
                            if r.is_nsdc_minus || !r.is_nsdc_plus { NsdcSign::Minus } else { NsdcSign::Plus }
                        }
                    };
                    build_nsdc_config(l, sign, eps)?
                }
            };
            let mut text = cfg.to_json()?;
            text.push('\n');
            write_output(path.as_deref(), text.as_bytes(), out)?;
            Ok(EXIT_OK)
        }
        Cmd::Verify { config, depth, tol, json } => {
            let cfg = load(&config)?;
            let tol = tol.unwrap_or(eps);
            let report = verify_configuration(&cfg, tol)?;
            let mut ok = report.passed;
            if json {
                writeln!(out, "{}", wire::to_json(&report)?)?;
            } else {
                writeln!(out, "geometry: {}", if report.passed { "PASS" } else { "FAIL" })?;
                writeln!(out, "max_defect = {:e}", report.max_defect)?;
                for t in &report.unexpected_tangencies {
                    writeln!(out, "unexpected tangency: {t:?}")?;
                }
            }
            if let (Some(depth), true) = (depth, report.passed) {
                let letters = if cfg.kind == ConfigKind::GammaChain {
                    // Two adjacent levels already generate; more only slows the word walk.
                    let centre = cfg.pairings.len() / 2;
                    let mut sub = cfg.clone();
                    sub.pairings = cfg.pairings[centre..(centre + 2).min(cfg.pairings.len())].to_vec();
                    pairing_alphabet(&sub)
                } else {
                    pairing_alphabet(&cfg)
                };
                let w = ping_pong_words(&letters, &cfg, depth, tol)?;
                if json {
                    writeln!(out, "{}", wire::to_json(&w)?)?;
                } else {
                    writeln!(
                        out,
                        "words: {} checked, {} violations",
                        w.words_checked,
                        w.violations.len()
                    )?;
                    for (word, why) in w.violations.iter().take(10) {
                        writeln!(out, "  {word}: {why}")?;
                    }
                }
                ok &= w.violations.is_empty();
            }
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
        Cmd::PlotConfig { config, out: path, window, size } => {
            let cfg = load(&config)?;
            let (w, h) = parse_size(&size)?;
            let win = match window {
                Some(s) => {
                    let [x0, x1, y0, y1] = parse_window(&s)?;
                    PlaneWindow::new(x0, x1, y0, y1, w, h)?
                }
                None => config_window(&cfg, w, h)?,
            };
            let svg = render_config_svg(&cfg, &win)?;
            write_output(Some(&path), svg.as_bytes(), out)?;
            Ok(EXIT_OK)
        }
        Cmd::PlotPlane { window, size, out: path, no_overlay } => {
            let [x0, x1, y0, y1] = parse_window(&window)?;
            let (w, h) = parse_size(&size)?;
            let raster = render_plane(&PlaneWindow::new(x0, x1, y0, y1, w, h)?, eps)?;
            let is_ppm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
            let bytes = if is_ppm { raster.to_ppm(!no_overlay) } else { raster.to_svg().into_bytes() };
            write_output(Some(&path), &bytes, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Boundary { family, samples } => {
            if samples == 0 {
                return Err(Error::OutOfRange("samples must be positive".into()));
            }
            let fam = match family {
                FamilyArg::Classical => Family::ClassicalTS,
                FamilyArg::Nsdc => Family::NSDC,
            };
            for k in 0..samples {
                let omega = std::f64::consts::TAU * k as f64 / samples as f64;
                let p = boundary_point(fam, omega);
                writeln!(out, "{:.12} {:.12}", p.re, p.im)?;
            }
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_lambda("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_lambda("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_lambda("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_lambda("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_lambda("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_lambda(" -1 + i ").unwrap(), c(-1.0, 1.0));
        assert_eq!(parse_lambda("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        for bad in ["", "abc", "1+", "+", "i1", "1+2j", "nan"] {
            assert!(parse_lambda(bad).is_err(), "{bad}");
        }
    }
}
