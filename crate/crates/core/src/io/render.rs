//! Static SVG pictures of base diagrams.
//!
//! Layout is a pure function of the canonical form: boundary circles are
//! drawn as concentric circles (outermost first), corners as dots evenly
//! spaced along their circle, and Lefschetz points as crosses on a small ring
//! around the centre. Each circle is labelled with its component type and
//! parity.

use std::fmt::Write;

use crate::diagram::{canonical_form, ensure_valid, DiagramError, FibrationDiagram};

const SIZE: f64 = 480.0;
const CENTER: f64 = SIZE / 2.0;
const OUTER_RADIUS: f64 = 200.0;
const INNER_RADIUS: f64 = 70.0;
const CROSS: f64 = 6.0;

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.3}");
    // Avoid "-0.000".
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0.000".to_string()
    } else {
        s
    }
}

fn point(radius: f64, angle: f64) -> (String, String) {
    (
        fmt_num(CENTER + radius * angle.cos()),
        fmt_num(CENTER - radius * angle.sin()),
    )
}

pub fn render(d: &FibrationDiagram) -> Result<String, DiagramError> {
    ensure_valid(d)?;
    let c = canonical_form(d);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE as u32
    );
    let _ = writeln!(
        svg,
        r#"  <text x="8" y="18" font-family="sans-serif" font-size="12">genus {}, {} circles, {} corners, {} Lefschetz</text>"#,
        c.genus,
        c.circles.len(),
        c.corner_count(),
        c.lefschetz_count()
    );

    let h = c.circles.len();
    // Outermost circle is the last in canonical order, so larger necklaces sit outside.
    for (rank, circle) in c.circles.iter().rev().enumerate() {
        let radius = if h <= 1 {
            OUTER_RADIUS
        } else {
            OUTER_RADIUS - (OUTER_RADIUS - INNER_RADIUS - 30.0) * rank as f64 / (h - 1) as f64
        };
        let _ = writeln!(
            svg,
            r#"  <circle class="boundary" cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black" stroke-width="2"/>"#,
            c = fmt_num(CENTER),
            r = fmt_num(radius)
        );
        let k = circle.corners.len();
        for (i, id) in circle.corners.iter().enumerate() {
            let angle = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / k as f64;
            let (x, y) = point(radius, angle);
            let _ = writeln!(
                svg,
                r#"  <circle class="corner" id="{id}" cx="{x}" cy="{y}" r="5" fill="black"/>"#
            );
        }
        let (lx, ly) = point(radius + 10.0, std::f64::consts::FRAC_PI_4);
        let _ = writeln!(
            svg,
            r#"  <text class="component" x="{lx}" y="{ly}" font-family="sans-serif" font-size="12">{} ε={}</text>"#,
            circle.component.kind, circle.component.parity
        );
    }

    let n = c.lefschetz.len();
    for (i, l) in c.lefschetz.iter().enumerate() {
        let (x, y) = if n == 1 {
            (CENTER, CENTER)
        } else {
            let angle = std::f64::consts::TAU * i as f64 / n as f64;
            (
                CENTER + 0.5 * INNER_RADIUS * angle.cos(),
                CENTER - 0.5 * INNER_RADIUS * angle.sin(),
            )
        };
        let _ = writeln!(
            svg,
            r#"  <path class="lefschetz" id="{}" d="M {} {} L {} {} M {} {} L {} {}" stroke="black" stroke-width="2"/>"#,
            l.id,
            fmt_num(x - CROSS),
            fmt_num(y - CROSS),
            fmt_num(x + CROSS),
            fmt_num(y + CROSS),
            fmt_num(x - CROSS),
            fmt_num(y + CROSS),
            fmt_num(x + CROSS),
            fmt_num(y - CROSS)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{LefschetzPoint, Parity};

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!(r#"class="{class}""#)).count()
    }

    #[test]
    fn s4_lefschetz_model() {
        let mut d = FibrationDiagram::disk(1, Parity::Minus);
        d.lefschetz.push(LefschetzPoint::bare("L0"));
        let svg = render(&d).unwrap();
        assert_eq!(count(&svg, "boundary"), 1);
        assert_eq!(count(&svg, "corner"), 1);
        assert_eq!(count(&svg, "lefschetz"), 1);
        assert!(svg.contains("ε=-1"));
    }

    #[test]
    fn closed_base_has_no_boundary() {
        let mut d = FibrationDiagram::closed(2);
        d.lefschetz.push(LefschetzPoint::bare("a"));
        d.lefschetz.push(LefschetzPoint::bare("b"));
        let svg = render(&d).unwrap();
        assert_eq!(count(&svg, "boundary"), 0);
        assert_eq!(count(&svg, "lefschetz"), 2);
    }

    #[test]
    fn deterministic() {
        let d = FibrationDiagram::disk(5, Parity::Plus);
        assert_eq!(render(&d).unwrap(), render(&d.clone()).unwrap());
        assert!(!render(&d).unwrap().contains("-0.000"));
    }

    #[test]
    fn invalid_diagram_refused() {
        let mut d = FibrationDiagram::disk(2, Parity::Plus);
        d.oriented = false;
        assert!(render(&d).is_err());
    }
}
