//! Minimal line plots rendered straight from CSV text.
//!
//! The first column is the x axis; every other column is a series. The x
//! axis is logarithmic when the first column is a window length (its name
//! starts with `T`), so the picture depends on nothing but the CSV.

use std::fmt::Write;

use super::table::Table;
use crate::error::{Error, Result};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

pub fn render_svg(csv: &str) -> Result<String> {
    let table = Table::parse_csv(csv)?;
    if table.columns.len() < 2 {
        return Err(Error::Config("need at least one data column to plot".into()));
    }
    let log_x = table.columns[0].starts_with('T');
    let xs: Vec<Option<f64>> = table.rows.iter().map(|r| r[0].filter(|&x| !log_x || x > 0.0)).collect();
    let tx = |x: f64| if log_x { x.log10() } else { x };

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (row, x) in table.rows.iter().zip(&xs) {
        let Some(x) = x else { continue };
        for y in row[1..].iter().flatten() {
            x_lo = x_lo.min(tx(*x));
            x_hi = x_hi.max(tx(*x));
            y_lo = y_lo.min(*y);
            y_hi = y_hi.max(*y);
        }
    }
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        return Err(Error::Config("nothing to plot".into()));
    }
    let (x_lo, x_hi) = pad(x_lo, x_hi, 0.0);
    let (y_lo, y_hi) = pad(y_lo, y_hi, 0.05);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (tx(x) - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    let x_ticks: Vec<(f64, String)> = if log_x {
        (x_lo.ceil() as i64..=x_hi.floor() as i64).map(|e| (10f64.powi(e as i32), format!("1e{e}"))).collect()
    } else {
        nice_ticks(x_lo, x_hi).into_iter().map(|v| (v, short(v))).collect()
    };
    for (v, label) in x_ticks {
        let x = sx(v);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, TOP + ph + 20.0);
    }
    for v in nice_ticks(y_lo, y_hi) {
        let y = sy(v);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, short(v));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&table.columns[0])
    );

    for (i, name) in table.columns.iter().enumerate().skip(1) {
        let color = PALETTE[(i - 1) % PALETTE.len()];
        let mut segment: Vec<String> = vec![];
        let flush = |segment: &mut Vec<String>, out: &mut String| {
            if segment.len() > 1 {
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, segment.join(" "));
            }
            segment.clear();
        };
        for (row, x) in table.rows.iter().zip(&xs) {
            match (x, row[i]) {
                (Some(x), Some(y)) => segment.push(format!("{:.2},{:.2}", sx(*x), sy(y))),
                _ => flush(&mut segment, &mut out),
            }
        }
        flush(&mut segment, &mut out);

        let ly = TOP + 15.0 + 18.0 * (i - 1) as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 25.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 32.0, ly + 4.0, escape(name));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn pad(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    if hi > lo {
        let d = (hi - lo) * frac;
        (lo - d, hi + d)
    } else {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - d, hi + d)
    }
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn short(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&v.abs()) {
        format!("{}", (v * 1e6).round() / 1e6)
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
