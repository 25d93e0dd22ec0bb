//! Deterministic SVG rendering of a point set and an optional tree.

use std::fmt::Write;

use dilatree::dyadic::{rational_to_f64, Round};
use dilatree::{PointSet, Tree};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Six significant digits, trailing zeros dropped.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let scale = 10f64.powi(5 - mag);
    let r = (v * scale).round() / scale;
    let mut s = format!("{r:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(ps: &PointSet, tree: Option<&Tree>) -> String {
    let pts: Vec<(f64, f64)> =
        ps.points().iter().map(|p| (rational_to_f64(&p.x, Round::Down), rational_to_f64(&p.y, Round::Down))).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let s = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 1.0 };
    let proj = |(x, y): (f64, f64)| (MARGIN + (x - x0) * s, SIZE - MARGIN - (y - y0) * s);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    if let Some(t) = tree {
        writeln!(out, r#"<g stroke="black" stroke-width="1.5">"#).unwrap();
        for &(u, v) in t.edges() {
            let (a, b) = (proj(pts[u]), proj(pts[v]));
            writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, sig6(a.0), sig6(a.1), sig6(b.0), sig6(b.1)).unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, r#"<g fill="steelblue" font-family="sans-serif" font-size="12">"#).unwrap();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = proj(p);
        writeln!(out, r#"<circle cx="{}" cy="{}" r="4"/>"#, sig6(x), sig6(y)).unwrap();
        writeln!(out, r#"<text x="{}" y="{}" fill="black">{}</text>"#, sig6(x + 6.0), sig6(y - 6.0), escape(&ps.label(i))).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(123.4567891), "123.457");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(1234567.0), "1234570");
        assert_eq!(sig6(40.0), "40");
        assert_eq!(sig6(-0.0000001), "-0.0000001");
    }

    #[test]
    fn render_is_stable() {
        let ps = PointSet::from_ints(&[(0, 0), (3, 4), (6, 0)]).unwrap();
        let t = Tree::new(3, [(0, 1), (1, 2)]).unwrap();
        let a = render(&ps, Some(&t));
        assert_eq!(a, render(&ps, Some(&t)));
        assert_eq!(a.matches("<line").count(), 2);
        assert_eq!(a.matches("<circle").count(), 3);
    }
}
