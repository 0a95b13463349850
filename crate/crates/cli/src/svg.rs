//! Minimal, dependency-free SVG emitters. Output is a pure function of the
//! input data, byte for byte.

use crate::experiment::{BoundColumn, ExperimentTable, SetKind};
use reachbound::{BetaReachProfile, Error, Result};
use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 48.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = writeln!(out, "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>");
    let _ = writeln!(out, "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>");
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let xv = frame.x_lo + t * (frame.x_hi - frame.x_lo);
        let yv = frame.y_lo + t * (frame.y_hi - frame.y_lo);
        let xp = frame.x(xv);
        let yp = frame.y(yv);
        let _ = writeln!(
            out,
            "<line x1=\"{xp:.2}\" y1=\"{y0:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{xp:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{xv:.3}</text>",
            y0 + 18.0
        );
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{x0:.2}\" y2=\"{yp:.2}\" stroke=\"black\"/>",
            x0 - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{yv:.3}</text>",
            x0 - 7.0,
            yp + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Right-continuous step plot of a profile: one horizontal segment per value
/// plateau, vertical risers at the jumps.
pub fn profile_svg(profile: &BetaReachProfile) -> Result<String> {
    let bps = profile.breakpoints();
    let max_beta = profile.max_beta();
    let finite: Vec<(f64, f64)> = bps
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|&(b, v)| (b, v.value()))
        .collect();
    let (Some(mb), false) = (max_beta, finite.is_empty()) else {
        return Err(Error::InvalidInput("profile has no finite values to plot".into()));
    };
    let y_max = finite.iter().map(|s| s.1).fold(0.0, f64::max);
    let frame = Frame { x_lo: 0.0, x_hi: (mb * 1.05).max(1e-9), y_lo: 0.0, y_hi: (y_max * 1.1).max(1e-9) };

    let mut out = String::new();
    open_svg(&mut out);
    axes(&mut out, &frame, "beta", "profile value");
    let mut path = String::new();
    for (k, &(b, v)) in finite.iter().enumerate() {
        let end = if k + 1 < finite.len() { finite[k + 1].0 } else { mb };
        if k == 0 {
            let _ = write!(path, "M {:.2} {:.2} ", frame.x(b), frame.y(v));
        } else {
            let _ = write!(path, "L {:.2} {:.2} ", frame.x(b), frame.y(v));
        }
        let _ = write!(path, "L {:.2} {:.2} ", frame.x(end), frame.y(v));
    }
    let _ = writeln!(
        out,
        "<path d=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
        path.trim_end()
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Mean-and-interval plot of an experiment table: one series per
/// (set, bound) pair, points at each n with 95% confidence whiskers.
pub fn table_svg(table: &ExperimentTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InvalidInput("experiment table is empty".into()));
    }
    let mut series = Vec::new();
    for set in [SetKind::U, SetKind::W] {
        let sub = table.filter_set(set);
        if sub.rows.is_empty() {
            continue;
        }
        for (column, color) in [(BoundColumn::Rconv, "firebrick"), (BoundColumn::Reach, "steelblue")] {
            let stats: Vec<(f64, f64, f64)> = sub
                .means(column)
                .into_iter()
                .filter(|(_, mean, _, _)| mean.is_finite())
                .map(|(n, mean, sd, count)| (n as f64, mean, 1.96 * sd / (count as f64).sqrt()))
                .collect();
            if !stats.is_empty() {
                series.push((format!("{set} {column}"), color, set, stats));
            }
        }
    }
    if series.is_empty() {
        return Err(Error::InvalidInput("no finite means to plot".into()));
    }
    let x_hi = series.iter().flat_map(|s| s.3.iter().map(|p| p.0)).fold(0.0, f64::max);
    let y_hi = series
        .iter()
        .flat_map(|s| s.3.iter().map(|p| p.1 + p.2))
        .fold(0.0, f64::max);
    let frame = Frame { x_lo: 0.0, x_hi: x_hi * 1.1, y_lo: 0.0, y_hi: y_hi * 1.1 };

    let mut out = String::new();
    open_svg(&mut out);
    axes(&mut out, &frame, "n", "bound");
    for (label_idx, (label, color, set, stats)) in series.iter().enumerate() {
        for &(n, mean, ci) in stats {
            let x = frame.x(n);
            let (ylo, yhi) = (frame.y(mean - ci), frame.y(mean + ci));
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{ylo:.2}\" x2=\"{x:.2}\" y2=\"{yhi:.2}\" stroke=\"{color}\"/>"
            );
            let y = frame.y(mean);
            match set {
                SetKind::U => {
                    let _ = writeln!(
                        out,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"6\" height=\"6\" fill=\"{color}\"/>",
                        x - 3.0,
                        y - 3.0
                    );
                }
                SetKind::W => {
                    let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.2\" fill=\"{color}\"/>");
                }
            }
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{color}\">{label}</text>",
            WIDTH - 170.0,
            MARGIN_T + 14.0 * (label_idx as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn save_svg<P: AsRef<std::path::Path>>(path: P, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}
