//! CSV and SVG emission for curve points.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::CurvePoint;
use super::spec::{ExperimentSpec, Task};
use crate::error::Result;

pub const CSV_HEADER: [&str; 8] = [
    "x", "sim_rate", "ci_low", "ci_high", "theory", "trials", "errors", "seed",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the points as CSV with the fixed column set. Wall time is left
/// out so that identical runs give identical bytes.
pub fn emit_csv<W: Write>(points: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.write_record([
            p.x.to_string(),
            opt(p.sim_rate),
            opt(p.ci_low),
            opt(p.ci_high),
            opt(p.theory),
            p.trials.to_string(),
            p.errors.to_string(),
            p.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
}

impl PlotStyle {
    pub fn for_spec(spec: &ExperimentSpec, iterations: usize) -> Self {
        let (x_label, y_label) = match spec.task {
            Task::Density => ("messages M", "density d"),
            Task::Recover | Task::Distorted => ("messages M", "error rate"),
            Task::Classify => ("density d", "type II error rate"),
            Task::Diversity => ("order c", "diversity M"),
        };
        let title = if spec.is_rate() {
            format!(
                "{} ({} iteration{})",
                spec.label,
                iterations,
                if iterations == 1 { "" } else { "s" }
            )
        } else {
            spec.label.clone()
        };
        PlotStyle {
            title,
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: spec.is_rate() || spec.task == Task::Diversity,
        }
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// Simple line chart: simulated points as markers, theory as a line.
pub fn emit_plot<W2: Write>(points: &[CurvePoint], style: &PlotStyle, mut out: W2) -> Result<()> {
    let ty = |v: f64| if style.log_y { v.log10() } else { v };
    let usable = |v: &Option<f64>| v.filter(|&y| !style.log_y || y > 0.0);
    let sim: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| usable(&p.sim_rate).map(|y| (p.x, ty(y))))
        .collect();
    let th: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| usable(&p.theory).map(|y| (p.x, ty(y))))
        .collect();

    let xs = points.iter().map(|p| p.x);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let ys = sim.iter().chain(&th).map(|&(_, y)| y);
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if style.log_y {
        (y0, y1) = (y0.floor(), y1.ceil());
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        H - BOTTOM,
        W - RIGHT
    );
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            H - BOTTOM + 16.0,
            short(x)
        );
    }
    let ticks: Vec<f64> = if style.log_y {
        (y0 as i64..=y1 as i64).map(|e| e as f64).collect()
    } else {
        (0..=4).map(|i| y0 + (y1 - y0) * i as f64 / 4.0).collect()
    };
    for y in ticks {
        let label = if style.log_y {
            format!("1e{}", y as i64)
        } else {
            short(y)
        };
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" x2="{}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            W - RIGHT,
            py(y),
            py(y),
            LEFT - 6.0,
            py(y) + 4.0,
            label
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(&style.y_label)
    );
    if th.len() > 1 {
        let pts: Vec<String> = th
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#c33" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    for &(x, y) in &sim {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#236"/>"##,
            px(x),
            py(y)
        );
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn short(v: f64) -> String {
    if v.abs() >= 1e4 {
        format!("{v:.2e}")
    } else if v.fract() == 0.0 {
        format!("{v}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Splits points into one curve per iteration budget.
pub fn by_series(points: &[CurvePoint]) -> BTreeMap<usize, Vec<CurvePoint>> {
    let mut map: BTreeMap<usize, Vec<CurvePoint>> = BTreeMap::new();
    for p in points {
        map.entry(p.iterations).or_default().push(p.clone());
    }
    map
}

/// Writes `<label>.csv/.svg`, or `<label>_it<k>.csv/.svg` per series when
/// the experiment lists several iteration budgets.
pub fn write_outputs(
    spec: &ExperimentSpec,
    points: &[CurvePoint],
    dir: &Path,
    plots: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let series = by_series(points);
    let multi = series.len() > 1;
    let mut written = Vec::new();
    for (k, pts) in series {
        let stem = if multi {
            format!("{}_it{k}", spec.label)
        } else {
            spec.label.clone()
        };
        let csv_path = dir.join(format!("{stem}.csv"));
        emit_csv(&pts, fs::File::create(&csv_path)?)?;
        written.push(csv_path);
        if plots {
            let svg_path = dir.join(format!("{stem}.svg"));
            emit_plot(
                &pts,
                &PlotStyle::for_spec(spec, k),
                fs::File::create(&svg_path)?,
            )?;
            written.push(svg_path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn pt(x: f64, rate: f64) -> CurvePoint {
        CurvePoint {
            x,
            iterations: 1,
            sim_rate: Some(rate),
            ci_low: Some(rate / 2.0),
            ci_high: Some(rate * 2.0),
            theory: Some(rate),
            trials: 100,
            errors: (rate * 100.0) as u64,
            seed: 7,
            wall_time: Duration::from_millis(3),
        }
    }

    #[test]
    fn csv_lines() {
        let mut buf = Vec::new();
        emit_csv(&[pt(1e4, 0.01), pt(2e4, 0.1), pt(3e4, 0.5)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "x,sim_rate,ci_low,ci_high,theory,trials,errors,seed"
        );
        assert_eq!(lines[1], "10000,0.01,0.005,0.02,0.01,100,1,7");
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn log_plot_skips_zero_rates() {
        let style = PlotStyle {
            title: "t".into(),
            x_label: "density d".into(),
            y_label: "rate".into(),
            log_y: true,
        };
        let mut buf = Vec::new();
        emit_plot(
            &[pt(0.2, 0.0), pt(0.5, 1e-3), pt(0.8, 0.1)],
            &style,
            &mut buf,
        )
        .unwrap();
        let svg = String::from_utf8(buf).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("1e-3") && svg.contains("density d"));
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("f");
        fs::write(&file, "x").unwrap();
        let spec = ExperimentSpec::new(
            Task::Density,
            crate::topology::Topology::new(4, 4).unwrap(),
            crate::message::OrderProfile::constant(2),
        );
        assert!(write_outputs(&spec, &[pt(1.0, 0.1)], &file.join("sub"), false).is_err());
    }
}
