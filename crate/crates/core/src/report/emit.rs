//! Report and plot emitters: JSON and CSV at 12 significant digits, and a
//! self-contained SVG sweep chart. All files are written atomically
//! (temporary file + rename).

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{ExperimentReport, ReportPayload, SweepRowRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Rounds to 12 significant digits so emitted numbers are stable across
/// platforms and algebraically equivalent evaluation orders.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_numbers(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    if let Some(rounded) = serde_json::Number::from_f64(sig12(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = std::fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(contents.as_bytes()).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Serializes a report to `path`. CSV is only defined for sweep-type
/// reports; JSON works for every payload.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut value =
                serde_json::to_value(report).map_err(|e| Error::Config(e.to_string()))?;
            round_numbers(&mut value);
            let text =
                serde_json::to_string_pretty(&value).map_err(|e| Error::Config(e.to_string()))?;
            atomic_write(path, &(text + "\n"))
        }
        ReportFormat::Csv => {
            let rows = match &report.results {
                ReportPayload::CircuitSweep { rows, .. } => rows.as_slice(),
                _ => {
                    return Err(Error::Parameter(
                        "CSV output is only defined for sweep reports".into(),
                    ))
                }
            };
            let mut text = String::from("t,delta_estimate,stderr,n_samples,seed\n");
            for row in rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.t,
                    sig12(row.delta_estimate),
                    sig12(row.stderr),
                    row.n_samples,
                    row.seed
                ));
            }
            atomic_write(path, &text)
        }
    }
}

/// Loads a JSON report written by [`emit_report`].
pub fn load_report(path: &Path) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))
}

const PLOT_WIDTH: f64 = 640.0;
const PLOT_HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Writes a self-contained SVG line chart of a depth sweep: linear depth
/// axis, logarithmic δ axis, one marker per row and error bars where the
/// standard error is nonzero.
pub fn emit_plot(rows: &[SweepRowRecord], path: &Path) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::Parameter(format!(
            "a sweep plot needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let t_min = rows.iter().map(|r| r.t).min().expect("non-empty") as f64;
    let t_max = rows.iter().map(|r| r.t).max().expect("non-empty") as f64;
    let t_span = (t_max - t_min).max(1.0);

    // the log axis needs a positive floor; estimates at or below it are
    // clamped onto the axis
    let floor = rows
        .iter()
        .flat_map(|r| {
            let lo = r.delta_estimate - r.stderr;
            [r.delta_estimate, lo]
        })
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min)
        .max(1e-12)
        / 2.0;
    let ceil = rows
        .iter()
        .map(|r| r.delta_estimate + r.stderr)
        .fold(floor * 10.0, f64::max);
    let (log_lo, log_hi) = (floor.log10(), ceil.log10());
    let log_span = (log_hi - log_lo).max(1e-6);

    let x_of = |t: f64| {
        MARGIN_LEFT + (t - t_min) / t_span * (PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    };
    let y_of = |v: f64| {
        let clamped = v.max(floor).min(ceil);
        let frac = (clamped.log10() - log_lo) / log_span;
        PLOT_HEIGHT - MARGIN_BOTTOM - frac * (PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" \
         viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" \
         y2=\"{}\" stroke=\"black\"/>\n",
        PLOT_HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>\n",
        PLOT_WIDTH - MARGIN_RIGHT,
        y = PLOT_HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">circuit depth t</text>\n",
        (MARGIN_LEFT + PLOT_WIDTH - MARGIN_RIGHT) / 2.0,
        PLOT_HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{y}\" text-anchor=\"middle\" font-size=\"13\" \
         transform=\"rotate(-90 16 {y})\">delta proxy (log scale)</text>\n",
        y = PLOT_HEIGHT / 2.0
    ));
    for decade in (log_lo.floor() as i64)..=(log_hi.ceil() as i64) {
        let v = 10f64.powi(decade as i32);
        if v < floor || v > ceil {
            continue;
        }
        let y = y_of(v);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{y:.2}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">1e{decade}</text>\n",
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0
        ));
    }
    for row in rows {
        let x = x_of(row.t as f64);
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            PLOT_HEIGHT - MARGIN_BOTTOM + 18.0,
            row.t
        ));
    }

    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", x_of(r.t as f64), y_of(r.delta_estimate)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
        points.join(" ")
    ));
    for row in rows {
        let x = x_of(row.t as f64);
        if row.stderr > 0.0 {
            let y_lo = y_of(row.delta_estimate - row.stderr);
            let y_hi = y_of(row.delta_estimate + row.stderr);
            svg.push_str(&format!(
                "<line class=\"errorbar\" x1=\"{x:.2}\" y1=\"{y_hi:.2}\" x2=\"{x:.2}\" \
                 y2=\"{y_lo:.2}\" stroke=\"#1f6fb2\"/>\n"
            ));
        }
        svg.push_str(&format!(
            "<circle class=\"marker\" cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f6fb2\"/>\n",
            y_of(row.delta_estimate)
        ));
    }
    svg.push_str("</svg>\n");
    atomic_write(path, &svg)
}
