//! Static SVG figures: the cone and cylinder with their zero curves, and
//! the coefficient-decay plot.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
/// Vertical half-axis of the ellipses drawn for horizontal circles.
const PERSPECTIVE: f64 = 0.18;
/// Magnitudes are clamped to `10^FLOOR` on the decay plot.
const FLOOR: f64 = -17.0;

/// Affine map from a world box onto the fixed viewport.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn sx(&self, dx: f64) -> f64 {
        dx / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, dy: f64) -> f64 {
        dy / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn line(s: &mut String, f: &Frame, a: (f64, f64), b: (f64, f64), style: &str) {
    writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
        f.px(a.0),
        f.py(a.1),
        f.px(b.0),
        f.py(b.1)
    )
    .unwrap();
}

fn ellipse(s: &mut String, f: &Frame, center: (f64, f64), rx: f64, style: &str) {
    writeln!(
        s,
        r#"<ellipse cx="{:.2}" cy="{:.2}" rx="{:.2}" ry="{:.2}" {style}/>"#,
        f.px(center.0),
        f.py(center.1),
        f.sx(rx),
        f.sy(rx * PERSPECTIVE)
    )
    .unwrap();
}

fn polyline(s: &mut String, f: &Frame, pts: &[(f64, f64)], closed: bool, style: &str) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let tag = if closed { "polygon" } else { "polyline" };
    writeln!(s, r#"<{tag} points="{}" fill="none" {style}/>"#, coords.join(" ")).unwrap();
}

fn label(s: &mut String, x: f64, y: f64, anchor: &str, text: &str) {
    writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{}</text>"#,
        escape(text)
    )
    .unwrap();
}

const OUTLINE: &str = r##"stroke="#444444" stroke-width="1.5""##;
const HIDDEN: &str = r##"stroke="#999999" stroke-width="1" stroke-dasharray="4 3" fill="none""##;
const CURVE: &str = r##"stroke="#c0392b" stroke-width="2""##;

/// The solid cone `|w| ≤ t ≤ 1` seen from the side, with a zero curve in
/// the plane `Im w = 0`. `curve` holds `(Re w, t)` pairs.
pub fn cone_svg(curve: &[(f64, f64)]) -> String {
    let f = Frame {
        x0: -1.4,
        x1: 1.4,
        y0: -0.15,
        y1: 1.3,
    };
    let mut s = header("cone spectrum and zero curve J");
    line(&mut s, &f, (0.0, 0.0), (-1.0, 1.0), OUTLINE);
    line(&mut s, &f, (0.0, 0.0), (1.0, 1.0), OUTLINE);
    ellipse(&mut s, &f, (0.0, 1.0), 1.0, r##"fill="none" stroke="#444444" stroke-width="1.5""##);
    ellipse(&mut s, &f, (0.0, 0.5), 0.5, HIDDEN);
    line(&mut s, &f, (0.0, 0.0), (0.0, 1.2), HIDDEN);
    polyline(&mut s, &f, curve, true, CURVE);
    label(&mut s, f.px(0.0) + 6.0, f.py(1.2), "start", "t");
    label(&mut s, f.px(1.05), f.py(1.0) + 4.0, "start", "|w| = t");
    label(&mut s, f.px(0.0), f.py(0.0) + 16.0, "middle", "(0, 0)");
    s.push_str("</svg>\n");
    s
}

/// The cylinder over the unit disk seen from the side, with a zero curve in
/// the plane `Im z = 0`. `curve` holds `(Re z, t)` pairs.
pub fn cylinder_svg(curve: &[(f64, f64)]) -> String {
    let lo = curve.iter().map(|p| p.1).fold(0.0, f64::min);
    let hi = curve.iter().map(|p| p.1).fold(1.0, f64::max);
    let pad = 0.2 * (hi - lo);
    let f = Frame {
        x0: -1.4,
        x1: 1.4,
        y0: lo - pad,
        y1: hi + pad,
    };
    let mut s = header("cylinder and zero curve of the second entry");
    line(&mut s, &f, (-1.0, lo), (-1.0, hi), OUTLINE);
    line(&mut s, &f, (1.0, lo), (1.0, hi), OUTLINE);
    ellipse(&mut s, &f, (0.0, hi), 1.0, r##"fill="none" stroke="#444444" stroke-width="1.5""##);
    ellipse(&mut s, &f, (0.0, lo), 1.0, HIDDEN);
    line(&mut s, &f, (0.0, lo), (0.0, hi + 0.5 * pad), HIDDEN);
    polyline(&mut s, &f, curve, true, CURVE);
    label(&mut s, f.px(0.0) + 6.0, f.py(hi + 0.5 * pad), "start", "t");
    label(&mut s, f.px(1.05), f.py(hi) + 4.0, "start", &format!("t = {hi}"));
    label(&mut s, f.px(1.05), f.py(lo) + 4.0, "start", &format!("t = {lo}"));
    s.push_str("</svg>\n");
    s
}

/// `log10 max_k |c_n(r_k)|` against the mode `n`.
pub fn decay_svg(title: &str, modes: &[(i64, f64)]) -> String {
    let n_max = modes.iter().map(|m| m.0.abs()).max().unwrap_or(1).max(1) as f64;
    let logs: Vec<(f64, f64)> = modes
        .iter()
        .map(|&(n, m)| (n as f64, if m > 0.0 { m.log10().max(FLOOR) } else { FLOOR }))
        .collect();
    let top = logs.iter().map(|p| p.1).fold(0.0, f64::max).ceil() + 1.0;
    let f = Frame {
        x0: -n_max - 1.0,
        x1: n_max + 1.0,
        y0: FLOOR - 1.0,
        y1: top,
    };
    let mut s = header(title);
    let axis = r##"stroke="#444444" stroke-width="1""##;
    line(&mut s, &f, (f.x0, f.y0), (f.x1, f.y0), axis);
    line(&mut s, &f, (0.0, f.y0), (0.0, f.y1), HIDDEN);
    let mut decade = FLOOR.ceil() as i64;
    while (decade as f64) <= top {
        if decade % 4 == 0 {
            let y = f.py(decade as f64);
            label(&mut s, MARGIN - 4.0, y + 4.0, "end", &format!("1e{decade}"));
            line(&mut s, &f, (f.x0, decade as f64), (f.x1, decade as f64), r##"stroke="#eeeeee" stroke-width="1""##);
        }
        decade += 1;
    }
    for n in [-n_max, 0.0, n_max] {
        label(&mut s, f.px(n), HEIGHT - MARGIN + 16.0, "middle", &format!("{n}"));
    }
    label(&mut s, WIDTH / 2.0, HEIGHT - 6.0, "middle", "mode n");
    let negative: Vec<(f64, f64)> = logs.iter().copied().filter(|p| p.0 < 0.0).collect();
    let positive: Vec<(f64, f64)> = logs.iter().copied().filter(|p| p.0 >= 0.0).collect();
    polyline(&mut s, &f, &negative, false, CURVE);
    polyline(&mut s, &f, &positive, false, r##"stroke="#2463a6" stroke-width="2""##);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figures_are_static_and_repeatable() {
        let curve: Vec<(f64, f64)> = (0..8).map(|j| (j as f64 / 16.0, j as f64 / 8.0)).collect();
        for svg in [cone_svg(&curve), cylinder_svg(&curve), decay_svg("d", &[(-1, 1.0), (0, 0.0), (1, 1e-3)])] {
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
            assert!(!svg.contains("<script"));
        }
        assert_eq!(cone_svg(&curve), cone_svg(&curve));
    }
}
