use std::fmt::Write;

use crate::error::{Error, Result};
use crate::tmqi::BoxStats;

const PLOT_TOP: f64 = 20.0;
const PLOT_HEIGHT: f64 = 300.0;
const LEFT: f64 = 70.0;
const SLOT: f64 = 48.0;
const BOX_HALF: f64 = 14.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one box per labelled entry on a shared value axis.
pub fn emit_boxplot_svg(boxes: &[(String, BoxStats)], axis_label: &str) -> Result<String> {
    if boxes.is_empty() {
        return Err(Error::Param("boxplot needs at least one arm".into()));
    }
    let values = boxes.iter().flat_map(|(_, b)| {
        [b.whisker_lo, b.whisker_hi]
            .into_iter()
            .chain(b.outliers.iter().copied())
    });
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        lo -= pad;
        hi += pad;
    }
    let y = |v: f64| PLOT_TOP + PLOT_HEIGHT * (hi - v) / (hi - lo);
    let width = LEFT + SLOT * boxes.len() as f64 + 20.0;
    let height = PLOT_TOP + PLOT_HEIGHT + 150.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let bottom = PLOT_TOP + PLOT_HEIGHT;
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{PLOT_TOP:.2}" x2="{LEFT:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let v = lo + (hi - lo) * i as f64 / TICKS as f64;
        let ty = y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{LEFT:.2}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            ty + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">{}</text>"#,
        PLOT_TOP + PLOT_HEIGHT / 2.0,
        PLOT_TOP + PLOT_HEIGHT / 2.0,
        escape(axis_label)
    );

    for (i, (label, b)) in boxes.iter().enumerate() {
        let cx = LEFT + SLOT * (i as f64 + 0.5);
        let (x0, x1) = (cx - BOX_HALF, cx + BOX_HALF);
        let (yq1, yq3, ymed) = (y(b.q1), y(b.q3), y(b.median));
        let (ylo, yhi) = (y(b.whisker_lo), y(b.whisker_hi));
        let _ = writeln!(s, r#"<g class="arm">"#);
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{yhi:.2}" x2="{cx:.2}" y2="{yq3:.2}" stroke="black"/><line x1="{cx:.2}" y1="{yq1:.2}" x2="{cx:.2}" y2="{ylo:.2}" stroke="black"/>"#
        );
        for wy in [ylo, yhi] {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{wy:.2}" x2="{:.2}" y2="{wy:.2}" stroke="black"/>"#,
                cx - BOX_HALF / 2.0,
                cx + BOX_HALF / 2.0
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            x1 - x0,
            yq1 - yq3
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{ymed:.2}" x2="{x1:.2}" y2="{ymed:.2}" stroke="black" stroke-width="2"/>"#
        );
        for &o in &b.outliers {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="2.5" fill="none" stroke="black"/>"#,
                y(o)
            );
        }
        let ly = bottom + 8.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{ly:.2}" transform="rotate(60 {cx:.2} {ly:.2})">{}</text>"#,
            escape(label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
