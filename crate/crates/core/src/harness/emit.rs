//! CSV, JSON and SVG output of result tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::EmitFormat;
use super::run::ResultRow;

pub const CSV_HEADER: &str = "n,estimator,mse,stderr,trials";

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Floats are written with Rust's shortest round-trip formatting.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.estimator, r.mse, r.stderr, r.trials);
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{CSV_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what} in `{line}`", i + 2));
            let f: Vec<&str> = line.trim_end().split(',').collect();
            if f.len() != 5 {
                return Err(bad("field count"));
            }
            Ok(ResultRow {
                n: f[0].parse().map_err(|_| bad("n"))?,
                estimator: f[1].to_string(),
                mse: f[2].parse().map_err(|_| bad("mse"))?,
                stderr: f[3].parse().map_err(|_| bad("stderr"))?,
                trials: f[4].parse().map_err(|_| bad("trials"))?,
            })
        })
        .collect()
}

pub fn to_json(rows: &[ResultRow]) -> String {
    serde_json::to_string_pretty(rows).expect("result rows always serialize")
}

pub fn parse_json(text: &str) -> Result<Vec<ResultRow>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Log-log chart of mse against n, one polyline (with error bars) per
/// estimator.
pub fn to_svg(rows: &[ResultRow], title: &str) -> String {
    let (w, h) = (760.0, 500.0);
    let (left, right, top, bottom) = (80.0, 190.0, 40.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let mut series: Vec<(&str, Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        match series.iter_mut().find(|(name, _)| *name == r.estimator) {
            Some((_, v)) => v.push(r),
            None => series.push((&r.estimator, vec![r])),
        }
    }
    for (_, v) in &mut series {
        v.sort_by_key(|r| r.n);
    }

    let positive = |v: f64| v.is_finite() && v > 0.0;
    let ys: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.mse, r.mse - r.stderr, r.mse + r.stderr])
        .filter(|&v| positive(v))
        .collect();
    let floor = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut ylo, mut yhi) = (floor.log10().floor(), ys.iter().cloned().fold(0.0, f64::max).log10().ceil());
    if !ylo.is_finite() || !yhi.is_finite() {
        (ylo, yhi) = (0.0, 1.0);
    }
    if yhi <= ylo {
        yhi = ylo + 1.0;
    }
    let nlo = rows.iter().map(|r| r.n).min().unwrap_or(1).max(1) as f64;
    let nhi = rows.iter().map(|r| r.n).max().unwrap_or(1).max(1) as f64;
    let (xlo, mut xhi) = (nlo.log10(), nhi.log10());
    if xhi <= xlo {
        xhi = xlo + 1.0;
    }
    let sx = |n: f64| left + (n.log10() - xlo) / (xhi - xlo) * pw;
    let sy = |v: f64| {
        let l = if positive(v) { v.log10() } else { ylo };
        top + (yhi - l.clamp(ylo, yhi)) / (yhi - ylo) * ph
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let mut e = ylo as i32;
    while e as f64 <= yhi {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
        e += 1;
    }
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let x = sx(n as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">number of samples</text>"#,
        left + pw / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">expected squared error</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g class="series" data-estimator="{}">"#, escape(name));
        let coords: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.n as f64), sy(r.mse)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            coords.join(" ")
        );
        for r in pts {
            let x = sx(r.n as f64);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sy(r.mse + r.stderr),
                sy(r.mse - r.stderr),
                sy(r.mse)
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(name)
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Write `rows` to `path` in `format`.
pub fn emit(rows: &[ResultRow], format: EmitFormat, path: &Path, title: &str) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidData("no result rows to write".into()));
    }
    let text = match format {
        EmitFormat::Csv => to_csv(rows),
        EmitFormat::Json => to_json(rows),
        EmitFormat::Svg => to_svg(rows, title),
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write `<dir>/<name>.<ext>` for every format; returns the written paths.
pub fn emit_all(
    rows: &[ResultRow],
    formats: &[EmitFormat],
    dir: &Path,
    name: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    formats
        .iter()
        .map(|&f| {
            let path = dir.join(format!("{name}.{}", f.extension()));
            emit(rows, f, &path, name)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ResultRow> {
        vec![
            ResultRow {
                n: 40,
                estimator: "mc".into(),
                mse: 1.0 / 3.0,
                stderr: 0.1,
                trials: 300,
            },
            ResultRow {
                n: 40,
                estimator: "stackmc".into(),
                mse: 2.5e-7,
                stderr: 1e-9,
                trials: 300,
            },
            ResultRow {
                n: 80,
                estimator: "mc".into(),
                mse: 0.125,
                stderr: 0.01,
                trials: 300,
            },
        ]
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let r = rows();
        let text = to_csv(&r[..2]);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        let back = parse_csv(&to_csv(&r)).unwrap();
        assert_eq!(back, r);
        assert!(parse_csv("n,mse\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\n1,mc,x,0,1\n")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = rows();
        assert_eq!(parse_json(&to_json(&r)).unwrap(), r);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let svg = to_svg(&rows(), "demo <1>");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo &lt;1&gt;"));
    }

    #[test]
    fn emit_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit(&[], EmitFormat::Csv, &dir.path().join("a.csv"), "x").is_err());
        let missing = dir.path().join("no/such/dir/a.csv");
        assert!(matches!(
            emit(&rows(), EmitFormat::Csv, &missing, "x"),
            Err(Error::Io { .. })
        ));
        let paths = emit_all(&rows(), &[EmitFormat::Csv, EmitFormat::Json, EmitFormat::Svg], dir.path(), "t").unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths.iter().all(|p| p.exists()));
    }
}
