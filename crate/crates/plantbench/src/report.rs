//! Self-contained SVG figures rendered from sweep CSV files.
//!
//! Output is a pure function of the input text: no timestamps, fixed
//! number formatting and a fixed color ramp.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// Success-rate grid from a `sweep-sr` CSV.
    Heatmap,
    /// Energy histograms per K from a `sweep-k` histogram CSV.
    Hist,
    /// Stacked measure bands per K from a `sweep-k` summary CSV.
    Measure,
}

impl std::str::FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heatmap" => Ok(Self::Heatmap),
            "hist" => Ok(Self::Hist),
            "measure" => Ok(Self::Measure),
            _ => Err(Error::Usage(format!("unknown report kind `{s}` (heatmap, hist, measure)"))),
        }
    }
}

pub fn render(kind: ReportKind, csv_text: &str) -> Result<String> {
    let table = Table::parse(csv_text)?;
    match kind {
        ReportKind::Heatmap => heatmap(&table),
        ReportKind::Hist => hist(&table),
        ReportKind::Measure => measure(&table),
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        if rows.is_empty() {
            return Err(Error::Validation("the CSV has no data rows".into()));
        }
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Validation(format!("missing column `{name}`")))
    }

    fn num(&self, row: usize, col: usize) -> Result<f64> {
        let s = &self.rows[row][col];
        s.parse()
            .map_err(|_| Error::Validation(format!("row {}: `{s}` is not a number", row + 1)))
    }

    fn opt_num(&self, row: usize, col: usize) -> Option<f64> {
        self.rows[row][col].parse().ok()
    }
}

/// Viridis-like ramp sampled at five stops.
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

const BAND_COLORS: [&str; 10] = [
    "#1b9e77", "#66a61e", "#e6ab02", "#d95f02", "#e7298a", "#7570b3", "#a6761d", "#666666", "#1f78b4", "#b2df8a",
];

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Svg {
    out: String,
}

impl Svg {
    fn new(w: f64, h: f64) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
        Self { out }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"{extra}/>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.out, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, esc(s));
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            esc(s)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Distinct values in order of first appearance.
fn distinct(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in v {
        if !out.iter().any(|&y| y == x) {
            out.push(x);
        }
    }
    out
}

fn heatmap(t: &Table) -> Result<String> {
    let axes: Vec<usize> = (0..t.header.len()).filter(|&i| t.header[i].starts_with("axis_")).collect();
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::Validation("a heatmap needs one or two `axis_` columns".into()));
    }
    let sr_col = t.col("sr")?;
    let ys: Vec<f64> = (0..t.rows.len()).map(|r| t.num(r, axes[0])).collect::<Result<_>>()?;
    let xs: Vec<f64> = match axes.get(1) {
        Some(&c) => (0..t.rows.len()).map(|r| t.num(r, c)).collect::<Result<_>>()?,
        None => vec![0.0; t.rows.len()],
    };
    let (yv, xv) = (distinct(&ys), distinct(&xs));
    let mut grid = vec![vec![f64::NAN; xv.len()]; yv.len()];
    let mut best: Option<(usize, usize, f64)> = None;
    for r in 0..t.rows.len() {
        let sr = t.num(r, sr_col)?;
        let yi = yv.iter().position(|&v| v == ys[r]).expect("distinct value");
        let xi = xv.iter().position(|&v| v == xs[r]).expect("distinct value");
        grid[yi][xi] = sr;
        if best.is_none_or(|b| sr > b.2) {
            best = Some((yi, xi, sr));
        }
    }

    let cell = (360.0 / xv.len().max(yv.len()) as f64).clamp(6.0, 40.0);
    let (left, top) = (90.0, 40.0);
    let (pw, ph) = (cell * xv.len() as f64, cell * yv.len() as f64);
    let mut s = Svg::new(left + pw + 110.0, top + ph + 70.0);
    s.text(left + pw / 2.0, 22.0, "middle", "success rate");
    for (yi, row) in grid.iter().enumerate() {
        // First axis runs bottom to top.
        let y = top + ph - cell * (yi + 1) as f64;
        for (xi, &v) in row.iter().enumerate() {
            let fill = if v.is_nan() { "#dddddd".to_string() } else { color(v) };
            s.rect(left + cell * xi as f64, y, cell, cell, &fill, "");
        }
    }
    if let Some((yi, xi, sr)) = best {
        let x = left + cell * xi as f64;
        let y = top + ph - cell * (yi + 1) as f64;
        s.rect(x, y, cell, cell, "none", r##" stroke="#d62728" stroke-width="2""##);
        s.text(left + pw / 2.0, top + ph + 50.0, "middle", &format!("max sr = {} at cell ({}, {})", fmt(sr), fmt(yv[yi]), fmt(xv[xi])));
    }
    let yname = t.header[axes[0]].trim_start_matches("axis_").to_string();
    let ticks = |n: usize| -> Vec<usize> {
        let step = n.div_ceil(6).max(1);
        (0..n).step_by(step).chain(std::iter::once(n - 1)).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
    };
    for i in ticks(yv.len()) {
        s.text(left - 4.0, top + ph - cell * (i as f64 + 0.5) + 4.0, "end", &fmt(yv[i]));
    }
    s.vtext(18.0, top + ph / 2.0, &yname);
    if let Some(&c) = axes.get(1) {
        for i in ticks(xv.len()) {
            s.text(left + cell * (i as f64 + 0.5), top + ph + 14.0, "middle", &fmt(xv[i]));
        }
        s.text(left + pw / 2.0, top + ph + 32.0, "middle", t.header[c].trim_start_matches("axis_"));
    }
    // Color bar.
    let bx = left + pw + 30.0;
    for i in 0..50 {
        let v = i as f64 / 49.0;
        s.rect(bx, top + ph - ph * (i + 1) as f64 / 50.0, 14.0, ph / 50.0 + 0.5, &color(v), "");
    }
    for v in [0.0, 0.5, 1.0] {
        s.text(bx + 20.0, top + ph - ph * v + 4.0, "start", &fmt(v));
    }
    Ok(s.finish())
}

fn hist(t: &Table) -> Result<String> {
    let (kc, lo_c, hi_c, cnt_c, sm_c) = (t.col("k")?, t.col("lo")?, t.col("hi")?, t.col("count")?, t.col("smoothed")?);
    let (emin_c, emax_c) = (t.col("e_min").ok(), t.col("e_max").ok());
    struct Bin {
        lo: f64,
        hi: f64,
        count: f64,
        smoothed: f64,
    }
    let mut per_k: BTreeMap<u64, (Vec<Bin>, Option<(f64, f64)>)> = BTreeMap::new();
    for r in 0..t.rows.len() {
        let k = t.num(r, kc)?;
        if k < 0.0 || k.fract() != 0.0 {
            return Err(Error::Validation(format!("row {}: k must be a non-negative integer", r + 1)));
        }
        let planted = match (emin_c.and_then(|c| t.opt_num(r, c)), emax_c.and_then(|c| t.opt_num(r, c))) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        let entry = per_k.entry(k as u64).or_insert_with(|| (Vec::new(), planted));
        entry.0.push(Bin {
            lo: t.num(r, lo_c)?,
            hi: t.num(r, hi_c)?,
            count: t.num(r, cnt_c)?,
            smoothed: t.num(r, sm_c)?,
        });
    }
    let mut e_lo = f64::INFINITY;
    let mut e_hi = f64::NEG_INFINITY;
    for (bins, planted) in per_k.values() {
        for b in bins {
            e_lo = e_lo.min(b.lo);
            e_hi = e_hi.max(b.hi);
        }
        if let Some((a, b)) = planted {
            e_lo = e_lo.min(*a);
            e_hi = e_hi.max(*b);
        }
    }
    if !(e_hi > e_lo) {
        e_hi = e_lo + 1.0;
    }
    let (left, top, ph) = (70.0, 40.0, 360.0);
    let col_w = (640.0 / per_k.len() as f64).clamp(4.0, 40.0);
    let pw = col_w * per_k.len() as f64;
    let ymap = |e: f64| top + ph * (e_hi - e) / (e_hi - e_lo);
    let mut s = Svg::new(left + pw + 40.0, top + ph + 60.0);
    s.text(left + pw / 2.0, 22.0, "middle", "found energies per K (shade: smoothed density, lines: planted range)");
    s.rect(left, top, pw, ph, "#f7f7f7", "");
    for (i, (k, (bins, planted))) in per_k.iter().enumerate() {
        let x = left + col_w * i as f64;
        let peak = bins.iter().map(|b| b.smoothed).fold(0.0, f64::max);
        for b in bins.iter().filter(|b| b.count > 0.0 || b.smoothed > 0.0) {
            let v = if peak > 0.0 { b.smoothed / peak } else { 0.0 };
            let (y0, y1) = (ymap(b.hi), ymap(b.lo));
            s.rect(x + 0.5, y0, col_w - 1.0, (y1 - y0).max(0.5), &color(v), "");
        }
        if let Some((a, b)) = planted {
            for e in [a, b] {
                s.line(x, ymap(*e), x + col_w, ymap(*e), "#d62728", 1.5);
            }
        }
        let step = per_k.len().div_ceil(12).max(1);
        if i % step == 0 {
            s.text(x + col_w / 2.0, top + ph + 14.0, "middle", &k.to_string());
        }
    }
    s.text(left + pw / 2.0, top + ph + 34.0, "middle", "K");
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let e = e_lo + f * (e_hi - e_lo);
        s.text(left - 4.0, ymap(e) + 4.0, "end", &fmt(e));
    }
    s.vtext(16.0, top + ph / 2.0, "energy");
    Ok(s.finish())
}

fn measure(t: &Table) -> Result<String> {
    let kc = t.col("k")?;
    let mut cols: Vec<(String, usize)> = Vec::new();
    if let Ok(c) = t.col("measure_below") {
        cols.push(("below".into(), c));
    }
    for (i, h) in t.header.iter().enumerate() {
        if let Some(f) = h.strip_prefix("band_") {
            cols.push((format!("<= {f}"), i));
        }
    }
    if let Ok(c) = t.col("measure_above") {
        cols.push(("above".into(), c));
    }
    if cols.len() <= 2 {
        return Err(Error::Validation("no `band_` columns".into()));
    }
    let (left, top, ph) = (60.0, 40.0, 300.0);
    let bar_w = (640.0 / t.rows.len() as f64).clamp(4.0, 40.0);
    let pw = bar_w * t.rows.len() as f64;
    let mut s = Svg::new(left + pw + 130.0, top + ph + 60.0);
    s.text(left + pw / 2.0, 22.0, "middle", "share of runs per energy band");
    for r in 0..t.rows.len() {
        let counts: Vec<f64> = cols.iter().map(|(_, c)| t.opt_num(r, *c).unwrap_or(0.0)).collect();
        let total: f64 = counts.iter().sum();
        let x = left + bar_w * r as f64;
        if total > 0.0 {
            // Stack from the bottom: lowest band first.
            let mut y = top + ph;
            for (j, c) in counts.iter().enumerate() {
                let h = ph * c / total;
                if h > 0.0 {
                    s.rect(x + 0.5, y - h, bar_w - 1.0, h, BAND_COLORS[j % BAND_COLORS.len()], "");
                }
                y -= h;
            }
        }
        let step = t.rows.len().div_ceil(12).max(1);
        if r % step == 0 {
            s.text(x + bar_w / 2.0, top + ph + 14.0, "middle", &t.rows[r][kc]);
        }
    }
    s.text(left + pw / 2.0, top + ph + 34.0, "middle", "K");
    for f in [0.0, 0.5, 1.0] {
        s.text(left - 4.0, top + ph * (1.0 - f) + 4.0, "end", &fmt(f));
    }
    for (j, (name, _)) in cols.iter().enumerate() {
        let y = top + 14.0 * j as f64;
        s.rect(left + pw + 12.0, y, 10.0, 10.0, BAND_COLORS[j % BAND_COLORS.len()], "");
        s.text(left + pw + 26.0, y + 9.0, "start", name);
    }
    Ok(s.finish())
}
