//! Output formats: CSV tallies, plot data blocks and the run manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Scheme;
use crate::harness::BerCurve;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "scheme,mm,frames,bit_errors,frame_errors,ber,fer,stopped_by";

/// Fixed-point decimal with at least six significant digits.
pub fn format_rate(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.6}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(6) as usize;
    format!("{v:.decimals$}")
}

fn ensure_curves(curves: &[BerCurve]) -> Result<()> {
    if curves.is_empty() {
        Err(Error::Contract("no curves to write".into()))
    } else {
        Ok(())
    }
}

/// Curves in output order: grouped by scheme (first appearance), points by
/// ascending `mm`.
fn ordered(curves: &[BerCurve]) -> Vec<(Scheme, Vec<&crate::harness::BerPoint>)> {
    let mut groups: Vec<(Scheme, Vec<&crate::harness::BerPoint>)> = Vec::new();
    for curve in curves {
        match groups.iter_mut().find(|(s, _)| *s == curve.scheme) {
            Some((_, pts)) => pts.extend(curve.points.iter()),
            None => groups.push((curve.scheme, curve.points.iter().collect())),
        }
    }
    for (_, pts) in &mut groups {
        pts.sort_by(|a, b| a.mm.total_cmp(&b.mm));
    }
    groups
}

pub fn format_csv(curves: &[BerCurve]) -> Result<String> {
    ensure_curves(curves)?;
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for (scheme, points) in ordered(curves) {
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                scheme.tag(),
                p.mm,
                p.frames,
                p.bit_errors,
                p.frame_errors,
                format_rate(p.ber),
                format_rate(p.fer),
                p.stopped_by.tag()
            );
        }
    }
    Ok(out)
}

pub fn emit_csv(curves: &[BerCurve], path: &Path) -> Result<()> {
    let text = format_csv(curves)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scheme: Scheme,
    pub mm: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub stopped_by: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: "csv".into(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(err(1, "missing or unexpected header".into())),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(err(i + 1, format!("expected 8 fields, got {}", f.len())));
            }
            let num = |s: &str| -> Result<f64> { s.parse().map_err(|e| err(i + 1, format!("`{s}`: {e}"))) };
            let int = |s: &str| -> Result<u64> { s.parse().map_err(|e| err(i + 1, format!("`{s}`: {e}"))) };
            Ok(CsvRow {
                scheme: f[0].parse()?,
                mm: num(f[1])?,
                frames: int(f[2])?,
                bit_errors: int(f[3])?,
                frame_errors: int(f[4])?,
                ber: num(f[5])?,
                fer: num(f[6])?,
                stopped_by: f[7].to_string(),
            })
        })
        .collect()
}

/// Whitespace-separated `mm ber` blocks, one per scheme, for gnuplot-style tools.
pub fn format_plotdata(curves: &[BerCurve]) -> Result<String> {
    ensure_curves(curves)?;
    let mut out = String::from("# set logscale xy; columns: mm ber; one block per scheme\n");
    for (i, (scheme, points)) in ordered(curves).into_iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# scheme: {}", scheme.tag());
        for p in points {
            let _ = writeln!(out, "{} {}", p.mm, format_rate(p.ber));
        }
    }
    Ok(out)
}

pub fn emit_plotdata(curves: &[BerCurve], path: &Path) -> Result<()> {
    let text = format_plotdata(curves)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Provenance written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub channel_source: String,
    pub code_source: String,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(config_digest: String, channel_source: String, code_source: String) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            config_digest,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            channel_source,
            code_source,
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            message: e.to_string(),
        })
    }
}
