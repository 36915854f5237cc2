//! Static log-scale SVG chart of miss and false-alarm rates against `n`.

use std::fmt::Write as _;

use crate::format::general;
use crate::rates::lambdas;
use crate::sweep::SweepRow;
use crate::{CliError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Frame {
    n_min: f64,
    n_max: f64,
    decade_min: f64,
    decade_max: f64,
}

impl Frame {
    fn x(&self, n: f64) -> f64 {
        let span = (self.n_max - self.n_min).max(1.0);
        LEFT + (n - self.n_min) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        let t = (value.log10() - self.decade_min) / (self.decade_max - self.decade_min);
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn fmt(x: f64) -> String {
    general(x, 6)
}

/// One `<g class="series">` per `lambda`, holding a solid miss-rate line and
/// a dashed false-alarm line. Zero rates have no logarithm and are omitted.
pub fn render(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::Parse("sweep CSV has no rows".into()));
    }
    let positive = rows.iter().flat_map(|r| [r.miss_attacked, r.p_f_attacked]).filter(|v| *v > 0.0);
    let smallest = positive.fold(f64::INFINITY, f64::min);
    let decade_min = if smallest.is_finite() { smallest.log10().floor().min(-1.0) } else { -1.0 };
    let frame = Frame {
        n_min: rows.iter().map(|r| r.n).min().unwrap_or(1) as f64,
        n_max: rows.iter().map(|r| r.n).max().unwrap_or(1) as f64,
        decade_min,
        decade_max: 0.0,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ =
        writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);

    let mut decade = frame.decade_min;
    while decade <= frame.decade_max {
        let y = frame.y(10f64.powf(decade));
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{}" x2="{x1}" y2="{}" stroke="#ddd"/>"##, fmt(y), fmt(y));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">1e{}</text>"#, x0 - 6.0, fmt(y + 4.0), decade);
        decade += 1.0;
    }
    for n in frame.n_min as usize..=frame.n_max as usize {
        let x = frame.x(n as f64);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{n}</text>"#, fmt(x), y1 + 18.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">number of observations n</text>"#,
        fmt((x0 + x1) / 2.0),
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">error rate (log scale)</text>"#,
        fmt((y0 + y1) / 2.0),
        fmt((y0 + y1) / 2.0)
    );
    let _ = writeln!(s, r#"<text x="{x0}" y="24">miss rate (solid) and false-alarm rate (dashed)</text>"#);

    for (k, lambda) in lambdas(rows).into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut group: Vec<&SweepRow> = rows.iter().filter(|r| r.lambda == lambda).collect();
        group.sort_by_key(|r| r.n);
        let _ = writeln!(s, r#"<g class="series" data-lambda="{}">"#, general(lambda, 12));
        for (dash, pick) in [
            ("", (|r: &SweepRow| r.miss_attacked) as fn(&SweepRow) -> f64),
            (r#" stroke-dasharray="6 4""#, |r: &SweepRow| r.p_f_attacked),
        ] {
            let points: Vec<String> = group
                .iter()
                .filter(|r| pick(r) > 0.0)
                .map(|r| format!("{},{}", fmt(frame.x(r.n as f64)), fmt(frame.y(pick(r)))))
                .collect();
            if points.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
                points.join(" ")
            );
            for p in &points {
                let (px, py) = p.split_once(',').expect("point pair");
                let _ = writeln!(s, r#"<circle cx="{px}" cy="{py}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 16.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            x1 + 16.0,
            x1 + 40.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">λ = {}</text>"#, x1 + 46.0, ly + 4.0, general(lambda, 6));
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
