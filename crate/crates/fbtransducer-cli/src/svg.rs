//! Minimal hand-written SVG plots: line charts and heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Horizontal reference lines.
    pub hlines: Vec<(f64, String)>,
    /// Shaded polygon drawn under the series.
    pub shade: Option<Vec<(f64, f64)>>,
    /// Fill each series down to the previous one.
    pub stacked: bool,
}

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
    log_y: bool,
}

impl Axes {
    fn tx(&self, v: f64) -> f64 {
        let (v, a, b) = if self.log_x {
            (v.log10(), self.x0.log10(), self.x1.log10())
        } else {
            (v, self.x0, self.x1)
        };
        LEFT + (v - a) / (b - a) * (W - LEFT - RIGHT)
    }

    fn ty(&self, v: f64) -> f64 {
        let (v, a, b) = if self.log_y {
            (v.log10(), self.y0.log10(), self.y1.log10())
        } else {
            (v, self.y0, self.y1)
        };
        H - BOTTOM - (v - a) / (b - a) * (H - TOP - BOTTOM)
    }
}

fn range(vals: impl Iterator<Item = f64>, log: bool) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return if log { (0.1, 10.0) } else { (0.0, 1.0) };
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return if log {
            (lo / 2.0, hi * 2.0)
        } else {
            (lo - 0.5, hi + 0.5)
        };
    }
    if log {
        (lo, hi)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn ticks(a: f64, b: f64, log: bool) -> Vec<f64> {
    if log {
        let (lo, hi) = (a.log10().floor() as i32, b.log10().ceil() as i32);
        return (lo..=hi)
            .map(|e| 10f64.powi(e))
            .filter(|v| *v >= a * 0.999 && *v <= b * 1.001)
            .collect();
    }
    let span = b - a;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (a / step).ceil() * step;
    let mut out = Vec::new();
    while t <= b + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn frame(out: &mut String, ax: &Axes, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for x in ticks(ax.x0, ax.x1, ax.log_x) {
        let px = ax.tx(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            b + 5.0,
            b + 18.0,
            fmt_tick(x)
        );
    }
    for y in ticks(ax.y0, ax.y1, ax.log_y) {
        let py = ax.ty(y);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 5.0,
            l - 8.0,
            py + 4.0,
            fmt_tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn polyline(ax: &Axes, pts: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for &(x, y) in pts {
        if x.is_finite() && y.is_finite() && (!ax.log_x || x > 0.0) && (!ax.log_y || y > 0.0) {
            let _ = write!(s, "{:.2},{:.2} ", ax.tx(x), ax.ty(y));
        }
    }
    s
}

impl LinePlot {
    pub fn render(&self) -> String {
        let stacked = self.stacked_points();
        let all = || stacked.iter().flat_map(|s| s.iter());
        let (x0, x1) = range(all().map(|p| p.0), self.log_x);
        let mut ys: Vec<f64> = all().map(|p| p.1).collect();
        ys.extend(self.hlines.iter().map(|h| h.0));
        let (mut y0, y1) = range(ys.into_iter(), self.log_y);
        if self.stacked && !self.log_y {
            y0 = y0.min(0.0);
        }
        let ax = Axes {
            x0,
            x1,
            y0,
            y1,
            log_x: self.log_x,
            log_y: self.log_y,
        };
        let mut out = String::new();
        header(&mut out, &self.title);
        let _ = writeln!(
            out,
            r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath><g clip-path="url(#plot)">"#,
            W - LEFT - RIGHT,
            H - TOP - BOTTOM
        );
        if let Some(poly) = &self.shade {
            let _ = writeln!(
                out,
                r##"<polygon points="{}" fill="#cccccc" stroke="none"/>"##,
                polyline(&ax, poly)
            );
        }
        for (k, (s, pts)) in self.series.iter().zip(&stacked).enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            if self.stacked {
                let mut poly = pts.clone();
                let below: Vec<(f64, f64)> = if k == 0 {
                    pts.iter().map(|p| (p.0, y0.max(0.0))).collect()
                } else {
                    stacked[k - 1].clone()
                };
                poly.extend(below.into_iter().rev());
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.35" stroke="none"/>"#,
                    polyline(&ax, &poly)
                );
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                polyline(&ax, pts)
            );
        }
        for (y, label) in &self.hlines {
            let py = ax.ty(*y);
            let _ = writeln!(
                out,
                r#"<line x1="{LEFT}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="gray" stroke-dasharray="2 3"/><text x="{}" y="{:.2}" fill="gray">{}</text>"#,
                W - RIGHT,
                LEFT + 4.0,
                py - 4.0,
                escape(label)
            );
        }
        let _ = writeln!(out, "</g>");
        frame(&mut out, &ax, &self.x_label, &self.y_label);
        for (k, s) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * k as f64;
            let x = W - RIGHT + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                x + 20.0,
                PALETTE[k % PALETTE.len()],
                x + 25.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    fn stacked_points(&self) -> Vec<Vec<(f64, f64)>> {
        if !self.stacked {
            return self.series.iter().map(|s| s.points.clone()).collect();
        }
        let mut acc: Vec<Vec<(f64, f64)>> = Vec::new();
        for s in &self.series {
            let pts = match acc.last() {
                None => s.points.clone(),
                Some(prev) => s
                    .points
                    .iter()
                    .zip(prev)
                    .map(|(p, q)| (p.0, p.1 + q.1))
                    .collect(),
            };
            acc.push(pts);
        }
        acc
    }
}

/// Row-major grid (rows along y) drawn with a diverging colormap centred on
/// zero, or a sequential one when `diverging` is false.
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub diverging: bool,
    /// Level traced by a contour line.
    pub contour: Option<f64>,
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * t)
}

fn rgb(c: [f64; 3]) -> String {
    format!(
        "#{:02x}{:02x}{:02x}",
        c[0].round() as u8,
        c[1].round() as u8,
        c[2].round() as u8
    )
}

impl Heatmap {
    fn color(&self, v: f64, lo: f64, hi: f64) -> String {
        let blue = [33.0, 102.0, 172.0];
        let white = [247.0, 247.0, 247.0];
        let red = [178.0, 24.0, 43.0];
        if !v.is_finite() {
            return "#000000".into();
        }
        if self.diverging {
            let m = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            let t = (v / m).clamp(-1.0, 1.0);
            if t < 0.0 {
                rgb(lerp(white, blue, -t))
            } else {
                rgb(lerp(white, red, t))
            }
        } else {
            let t = ((v - lo) / (hi - lo).max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
            rgb(lerp(
                lerp(blue, white, (2.0 * t).min(1.0)),
                red,
                (2.0 * t - 1.0).max(0.0),
            ))
        }
    }

    pub fn render(&self) -> String {
        let ax = Axes {
            x0: self.x.0,
            x1: self.x.1,
            y0: self.y.0,
            y1: self.y.1,
            log_x: false,
            log_y: false,
        };
        let (lo, hi) = self
            .values
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let mut out = String::new();
        header(&mut out, &self.title);
        let cw = (W - LEFT - RIGHT) / self.nx as f64;
        let ch = (H - TOP - BOTTOM) / self.ny as f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.values[j * self.nx + i];
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    LEFT + i as f64 * cw,
                    H - BOTTOM - (j + 1) as f64 * ch,
                    cw + 0.3,
                    ch + 0.3,
                    self.color(v, lo, hi)
                );
            }
        }
        if let Some(level) = self.contour {
            for (a, b) in self.contour_segments(level) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.2"/>"#,
                    ax.tx(a.0),
                    ax.ty(a.1),
                    ax.tx(b.0),
                    ax.ty(b.1)
                );
            }
        }
        frame(&mut out, &ax, &self.x_label, &self.y_label);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">min {}</text><text x="{}" y="{}">max {}</text>"#,
            W - RIGHT + 10.0,
            TOP + 12.0,
            fmt_tick(lo),
            W - RIGHT + 10.0,
            TOP + 30.0,
            fmt_tick(hi)
        );
        out.push_str("</svg>\n");
        out
    }

    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let fx = if self.nx > 1 {
            i as f64 / (self.nx - 1) as f64
        } else {
            0.5
        };
        let fy = if self.ny > 1 {
            j as f64 / (self.ny - 1) as f64
        } else {
            0.5
        };
        (
            self.x.0 + fx * (self.x.1 - self.x.0),
            self.y.0 + fy * (self.y.1 - self.y.0),
        )
    }

    /// Marching squares over the sample nodes; saddle cells take the first
    /// pairing.
    pub fn contour_segments(&self, level: f64) -> Vec<((f64, f64), (f64, f64))> {
        let mut segs = Vec::new();
        if self.nx < 2 || self.ny < 2 {
            return segs;
        }
        let v = |i: usize, j: usize| self.values[j * self.nx + i] - level;
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let mut hits = Vec::with_capacity(4);
                for k in 0..4 {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    let (va, vb) = (v(a.0, a.1), v(b.0, b.1));
                    if !(va.is_finite() && vb.is_finite()) {
                        continue;
                    }
                    if (va < 0.0) != (vb < 0.0) {
                        let t = va / (va - vb);
                        let (pa, pb) = (self.node(a.0, a.1), self.node(b.0, b.1));
                        hits.push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
                    }
                }
                for pair in hits.chunks_exact(2) {
                    segs.push((pair[0], pair[1]));
                }
            }
        }
        segs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_well_formed() {
        let p = LinePlot {
            title: "a < b".into(),
            series: vec![Series::new("s", vec![(0.0, 1.0), (1.0, 2.0)])],
            hlines: vec![(1.5, "ref".into())],
            ..Default::default()
        };
        let s = p.render();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains("<polyline"));
    }

    #[test]
    fn contour_of_a_plane_is_a_straight_line() {
        let n = 5;
        let values = (0..n * n).map(|k| (k % n) as f64).collect();
        let h = Heatmap {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            x: (0.0, 4.0),
            y: (0.0, 4.0),
            nx: n,
            ny: n,
            values,
            diverging: true,
            contour: Some(1.5),
        };
        let segs = h.contour_segments(1.5);
        assert_eq!(segs.len(), n - 1);
        for (a, b) in segs {
            assert!((a.0 - 1.5).abs() < 1e-12 && (b.0 - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn log_ticks_are_decades() {
        assert_eq!(
            ticks(0.1, 1000.0, true),
            vec![0.1, 1.0, 10.0, 100.0, 1000.0]
        );
        let t = ticks(-1.0, 1.0, false);
        assert!(t.contains(&0.0));
    }
}
