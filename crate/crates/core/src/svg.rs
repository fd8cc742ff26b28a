//! Minimal deterministic SVG charts. All coordinates are printed with a
//! fixed number of decimals so identical inputs yield identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo <= 0.0 {
            let pad = lo.abs().max(1.0) * 0.5;
            return Range {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        let pad = (hi - lo) * 0.05;
        Range {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn union(self, other: Range) -> Range {
        Range {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

struct Plot {
    out: String,
    x: Range,
    y: Range,
}

impl Plot {
    fn new(title: &str, x_label: &str, y_label: &str, x: Range, y: Range) -> Plot {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let mut plot = Plot { out, x, y };
        plot.axes(x_label, y_label);
        plot
    }

    fn px(&self, v: f64) -> f64 {
        MARGIN_LEFT + self.x.frac(v) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - self.y.frac(v) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
        let _ = writeln!(
            self.out,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let xv = self.x.lo + t * (self.x.hi - self.x.lo);
            let yv = self.y.lo + t * (self.y.hi - self.y.lo);
            let (xp, yp) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                self.out,
                r#"<line x1="{xp:.2}" y1="{y0:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/><text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 5.0,
                y0 + 18.0,
                tick_label(xv)
            );
            let _ = writeln!(
                self.out,
                r#"<line x1="{:.2}" y1="{yp:.2}" x2="{x0:.2}" y2="{yp:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                yp + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            self.out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.out,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    fn points(&mut self, xs: &[f64], ys: &[f64], color: &str) {
        for (&x, &y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                let _ = writeln!(
                    self.out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{color}" fill-opacity="0.4"/>"#,
                    self.px(x),
                    self.py(y)
                );
            }
        }
    }

    fn line(&mut self, (xa, ya): (f64, f64), (xb, yb): (f64, f64), color: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            self.px(xa),
            self.py(ya),
            self.px(xb),
            self.py(yb)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1e5 {
        format!("{v:.2e}")
    } else if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Actual vs predicted with the `x = y` reference line in red.
pub fn scatter_actual_vs_predicted(title: &str, actual: &[f64], predicted: &[f64]) -> String {
    let r = Range::of(actual.iter().copied()).union(Range::of(predicted.iter().copied()));
    let mut p = Plot::new(title, "Actual price", "Predicted price", r, r);
    p.points(actual, predicted, "steelblue");
    p.line((r.lo, r.lo), (r.hi, r.hi), "red");
    p.finish()
}

/// Residuals (actual − predicted) against predictions, with a zero line.
pub fn residuals_vs_predicted(title: &str, actual: &[f64], predicted: &[f64]) -> String {
    let resid: Vec<f64> = actual.iter().zip(predicted).map(|(a, p)| a - p).collect();
    let xr = Range::of(predicted.iter().copied());
    let yr = Range::of(resid.iter().copied().chain(std::iter::once(0.0)));
    let mut p = Plot::new(title, "Predicted price", "Residual", xr, yr);
    p.points(predicted, &resid, "darkorange");
    p.line((xr.lo, 0.0), (xr.hi, 0.0), "red");
    p.finish()
}

/// Histogram of prediction errors over `bins` equal-width bins.
pub fn error_histogram(title: &str, actual: &[f64], predicted: &[f64], bins: usize) -> String {
    let errors: Vec<f64> = actual.iter().zip(predicted).map(|(a, p)| a - p).collect();
    let (lo, hi) = errors
        .iter()
        .filter(|e| e.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| {
            (l.min(e), h.max(e))
        });
    let bins = bins.max(1);
    let (lo, hi) = if lo.is_finite() && hi > lo {
        (lo, hi)
    } else if lo.is_finite() {
        (lo - 0.5, lo + 0.5)
    } else {
        (0.0, 1.0)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for e in errors.iter().filter(|e| e.is_finite()) {
        let b = (((e - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mut p = Plot::new(
        title,
        "Error (actual − predicted)",
        "Count",
        Range { lo, hi },
        Range {
            lo: 0.0,
            hi: max * 1.05,
        },
    );
    for (i, &c) in counts.iter().enumerate() {
        let (xa, xb) = (lo + i as f64 * width, lo + (i + 1) as f64 * width);
        let (left, right) = (p.px(xa), p.px(xb));
        let (top, base) = (p.py(c as f64), p.py(0.0));
        let _ = writeln!(
            p.out,
            r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="seagreen" stroke="white"/>"#,
            right - left,
            base - top
        );
    }
    p.finish()
}

/// Square heatmap; `None` cells are drawn grey and labeled `NA`.
pub fn heatmap(title: &str, labels: &[String], values: &[Vec<Option<f64>>]) -> String {
    let k = labels.len().max(1);
    let cell = 20.0;
    let (left, top) = (70.0, 50.0);
    let size = left + cell * k as f64 + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{:.0}" font-family="sans-serif" font-size="9">"#,
        size + 30.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        size / 2.0,
        escape(title)
    );
    for (i, label) in labels.iter().enumerate() {
        let y = top + cell * i as f64 + cell * 0.65;
        let x = left + cell * i as f64 + cell * 0.5;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end">{}</text>"#,
            left - 4.0,
            escape(label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="start" transform="rotate(90 {x:.2} {:.2})">{}</text>"#,
            top + cell * k as f64 + 4.0,
            top + cell * k as f64 + 4.0,
            escape(label)
        );
    }
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (x, y) = (left + cell * j as f64, top + cell * i as f64);
            let fill = match v {
                Some(r) => diverging_color(*r),
                None => "rgb(200,200,200)".to_string(),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}"/>"#
            );
            let text = match v {
                Some(r) => format!("{r:.1}"),
                None => "NA".to_string(),
            };
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="7">{text}</text>"#,
                x + cell / 2.0,
                y + cell * 0.65
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Blue (−1) through white (0) to red (+1).
fn diverging_color(r: f64) -> String {
    let t = r.clamp(-1.0, 1.0);
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    if t >= 0.0 {
        format!("rgb(255,{},{})", fade(t), fade(t))
    } else {
        format!("rgb({},{},255)", fade(t), fade(t))
    }
}

/// Horizontal bar chart, one bar per (label, value) in the given order.
pub fn bar_chart(title: &str, x_label: &str, bars: &[(String, f64)]) -> String {
    let n = bars.len().max(1);
    let bar_h = 18.0;
    let left = 90.0;
    let right = 40.0;
    let top = 40.0;
    let height = top + bar_h * n as f64 + 50.0;
    let plot_w = WIDTH - left - right;
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max).max(1.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, (label, v)) in bars.iter().enumerate() {
        let y = top + bar_h * i as f64;
        let w = plot_w * v / max;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text><rect x="{left:.2}" y="{:.2}" width="{w:.2}" height="{:.2}" fill="steelblue"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            left - 6.0,
            y + bar_h * 0.7,
            escape(label),
            y + 2.0,
            bar_h - 4.0,
            left + w + 4.0,
            y + bar_h * 0.7,
            tick_label(*v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        height - 15.0,
        escape(x_label)
    );
    out.push_str("</svg>\n");
    out
}
