//! Static line plots of step functions and dual fields.

use std::fmt::Write as _;

use rof1d::{DualField, StepFunction};

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

type Series = (String, Vec<(f64, f64)>);

fn step_points(u: &StepFunction) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(2 * u.len());
    for i in 0..u.len() {
        let (l, r) = u.interval(i);
        pts.push((l, u.values()[i]));
        pts.push((r, u.values()[i]));
    }
    pts
}

/// One chart with every series; step functions drawn as staircases, fields as
/// polylines through their nodes.
pub fn plot(steps: &[(String, StepFunction)], fields: &[(String, DualField)]) -> String {
    let mut series: Vec<Series> = steps.iter().map(|(n, u)| (n.clone(), step_points(u))).collect();
    series.extend(fields.iter().map(|(n, z)| (n.clone(), z.nodes().iter().copied().zip(z.values().iter().copied()).collect())));

    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    )
    .unwrap();
    for (v, y) in [(y1, PAD), (y0, H - PAD)] {
        writeln!(s, r#"<text x="4" y="{y:.1}" font-size="11" font-family="sans-serif">{v:.3}</text>"#).unwrap();
    }
    writeln!(s, r#"<text x="{PAD}" y="{:.1}" font-size="11" font-family="sans-serif">{x0:.3}</text>"#, H - PAD / 3.0).unwrap();
    writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif">{x1:.3}</text>"#, W - PAD - 30.0, H - PAD / 3.0)
        .unwrap();
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, path.join(" ")).unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" font-family="sans-serif" fill="{color}">{name}</text>"#,
            W - PAD - 60.0,
            PAD + 16.0 * (k as f64 + 1.0)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
