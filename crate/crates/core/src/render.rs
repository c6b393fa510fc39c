//! Deterministic SVG output for base diagrams and hulls.
//!
//! Geometry stays exact until emission: every coordinate is mapped to the
//! canvas as a rational and printed with six fractional digits, rounding
//! half to even. The y axis is flipped here and nowhere else.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atf::BaseDiagram;
use crate::hull::BoundaryHull;
use crate::lattice::{rat, LatticePolygon, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("polygon has zero area")]
    DegenerateGeometry,
    #[error("invalid render settings: {0}")]
    InvalidSpec(String),
}

impl RenderError {
    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            RenderError::DegenerateGeometry => "DegenerateGeometry",
            RenderError::InvalidSpec(_) => "InvalidSpec",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Style {
    pub stroke_width: u32,
    pub cut_width: u32,
    /// Value of `stroke-dasharray` on cuts.
    pub cut_dash: String,
    /// Half the width of the × drawn at each node, in pixels.
    pub node_radius: u32,
    pub fiber_radius: u32,
    pub grid_radius: u32,
    pub stroke: String,
    pub cut_stroke: String,
    pub fiber_fill: String,
    pub font_size: u32,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke_width: 2,
            cut_width: 1,
            cut_dash: "6 4".into(),
            node_radius: 5,
            fiber_radius: 4,
            grid_radius: 1,
            stroke: "#000000".into(),
            cut_stroke: "#444444".into(),
            fiber_fill: "#c0392b".into(),
            font_size: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    /// Canvas size in pixels; a chain uses one canvas per panel.
    pub width: u32,
    pub height: u32,
    pub style: Style,
    pub labels: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 400,
            height: 400,
            style: Style::default(),
            labels: true,
        }
    }
}

/// Anything [`render`] can draw.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Diagram(&'a BaseDiagram),
    Hull(&'a BoundaryHull),
    Chain(&'a [BaseDiagram]),
}

pub fn render(target: Target<'_>, spec: &RenderSpec) -> Result<Vec<u8>, RenderError> {
    match target {
        Target::Diagram(d) => render_diagram(d, spec),
        Target::Hull(h) => render_hull(h, spec),
        Target::Chain(ds) => render_chain(ds, spec),
    }
}

/// Six fractional digits, half to even, no locale.
pub fn format_decimal(x: &BigRational) -> String {
    let scaled = x * rat(1_000_000);
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut n = floor.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    let neg = n.is_negative();
    let (int, rem) = n.abs().div_rem(&BigInt::from(1_000_000));
    format!("{}{}.{:06}", if neg { "-" } else { "" }, int, rem)
}

/// Exact map from diagram coordinates to one canvas.
struct Frame {
    scale: BigRational,
    offset_x: BigRational,
    offset_y: BigRational,
    height: BigRational,
}

impl Frame {
    fn fit(points: &[Point], width: u32, height: u32) -> Result<Frame, RenderError> {
        let min_x = points.iter().map(|p| &p.x).min().ok_or(RenderError::DegenerateGeometry)?;
        let max_x = points.iter().map(|p| &p.x).max().unwrap();
        let min_y = points.iter().map(|p| &p.y).min().unwrap();
        let max_y = points.iter().map(|p| &p.y).max().unwrap();
        let (dx, dy) = (max_x - min_x, max_y - min_y);
        if dx.is_zero() || dy.is_zero() {
            return Err(RenderError::DegenerateGeometry);
        }
        let (w, h) = (rat(width), rat(height));
        // 5% margin on each side.
        let inner = BigRational::new(9.into(), 10.into());
        let scale = std::cmp::min(&w * &inner / &dx, &h * &inner / &dy);
        let two = rat(2);
        let offset_x = (&w - &dx * &scale) / &two - min_x * &scale;
        let offset_y = (&h - &dy * &scale) / &two - min_y * &scale;
        Ok(Frame {
            scale,
            offset_x,
            offset_y,
            height: h,
        })
    }

    fn x(&self, p: &Point) -> String {
        format_decimal(&(&p.x * &self.scale + &self.offset_x))
    }

    fn y(&self, p: &Point) -> String {
        format_decimal(&(&self.height - (&p.y * &self.scale + &self.offset_y)))
    }

    fn xy(&self, p: &Point) -> String {
        format!("{} {}", self.x(p), self.y(p))
    }
}

fn check_spec(spec: &RenderSpec) -> Result<(), RenderError> {
    if spec.width == 0 || spec.height == 0 {
        return Err(RenderError::InvalidSpec("canvas must be positive".into()));
    }
    Ok(())
}

fn header(out: &mut String, width: u64, height: u32) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
}

fn polygon_path(out: &mut String, frame: &Frame, poly: &LatticePolygon, style: &Style) {
    let mut d = String::new();
    for (i, v) in poly.vertices().iter().enumerate() {
        let _ = write!(d, "{}{}", if i == 0 { "M " } else { " L " }, frame.xy(v));
    }
    d.push_str(" Z");
    let _ = writeln!(
        out,
        r#"<path class="polygon" d="{d}" fill="none" stroke="{}" stroke-width="{}" stroke-linejoin="round"/>"#,
        style.stroke, style.stroke_width
    );
}

fn text(out: &mut String, x: &str, y: &str, size: u32, body: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x}" y="{y}" font-family="monospace" font-size="{size}" text-anchor="middle">{body}</text>"#
    );
}

fn diagram_body(out: &mut String, d: &BaseDiagram, spec: &RenderSpec) -> Result<(), RenderError> {
    if d.polygon.area().is_zero() {
        return Err(RenderError::DegenerateGeometry);
    }
    let style = &spec.style;
    let frame = Frame::fit(d.polygon.vertices(), spec.width, spec.height)?;
    polygon_path(out, &frame, &d.polygon, style);
    let r = rat(style.node_radius);
    for n in &d.nodes {
        let a = d.anchor_point(n);
        let p = d.node_position(n);
        let _ = writeln!(
            out,
            r#"<line class="cut" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}" stroke-dasharray="{}"/>"#,
            frame.x(a),
            frame.y(a),
            frame.x(&p),
            frame.y(&p),
            style.cut_stroke,
            style.cut_width,
            style.cut_dash
        );
        let cx = &p.x * &frame.scale + &frame.offset_x;
        let cy = &frame.height - (&p.y * &frame.scale + &frame.offset_y);
        let f = |v: BigRational| format_decimal(&v);
        let _ = writeln!(
            out,
            r#"<path class="node" d="M {} {} L {} {} M {} {} L {} {}" stroke="{}" stroke-width="{}"/>"#,
            f(&cx - &r),
            f(&cy - &r),
            f(&cx + &r),
            f(&cy + &r),
            f(&cx - &r),
            f(&cy + &r),
            f(&cx + &r),
            f(&cy - &r),
            style.stroke,
            style.stroke_width
        );
    }
    let _ = writeln!(
        out,
        r#"<circle class="fiber" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
        frame.x(&d.fiber),
        frame.y(&d.fiber),
        style.fiber_radius,
        style.fiber_fill
    );
    if spec.labels {
        let size = style.font_size;
        let y = format_decimal(&(rat(spec.height) - rat(size) / rat(2)));
        let x = format_decimal(&(rat(spec.width) / rat(2)));
        text(out, &x, &y, size, &d.provenance.to_string());
    }
    Ok(())
}

pub fn render_diagram(d: &BaseDiagram, spec: &RenderSpec) -> Result<Vec<u8>, RenderError> {
    check_spec(spec)?;
    let mut out = String::new();
    header(&mut out, spec.width.into(), spec.height);
    diagram_body(&mut out, d, spec)?;
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

/// Panels side by side, one canvas each, in the given order.
pub fn render_chain(ds: &[BaseDiagram], spec: &RenderSpec) -> Result<Vec<u8>, RenderError> {
    check_spec(spec)?;
    if ds.is_empty() {
        return Err(RenderError::InvalidSpec("chain is empty".into()));
    }
    let mut out = String::new();
    header(&mut out, u64::from(spec.width) * ds.len() as u64, spec.height);
    for (i, d) in ds.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<g class="panel" transform="translate({} 0)">"#,
            u64::from(spec.width) * i as u64
        );
        diagram_body(&mut out, d, spec)?;
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

/// Grids with more points than this are left out.
const MAX_GRID_POINTS: usize = 40_000;

pub fn render_hull(h: &BoundaryHull, spec: &RenderSpec) -> Result<Vec<u8>, RenderError> {
    check_spec(spec)?;
    if h.hull.area().is_zero() {
        return Err(RenderError::DegenerateGeometry);
    }
    let style = &spec.style;
    let vs = h.hull.vertices();
    let frame = Frame::fit(vs, spec.width, spec.height)?;
    let mut out = String::new();
    header(&mut out, spec.width.into(), spec.height);

    let lo_x = vs.iter().map(|p| p.x.floor().to_integer()).min().unwrap();
    let hi_x = vs.iter().map(|p| p.x.ceil().to_integer()).max().unwrap();
    let lo_y = vs.iter().map(|p| p.y.floor().to_integer()).min().unwrap();
    let hi_y = vs.iter().map(|p| p.y.ceil().to_integer()).max().unwrap();
    let cols = (&hi_x - &lo_x + 1u32).to_string().parse::<usize>().unwrap_or(usize::MAX);
    let rows = (&hi_y - &lo_y + 1u32).to_string().parse::<usize>().unwrap_or(usize::MAX);
    if cols.saturating_mul(rows) <= MAX_GRID_POINTS {
        let _ = writeln!(out, r##"<g class="grid" fill="#999999">"##);
        let mut y = hi_y.clone();
        while y >= lo_y {
            let mut x = lo_x.clone();
            while x <= hi_x {
                let p = Point::from_ints(x.clone(), y.clone());
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}"/>"#, frame.x(&p), frame.y(&p), style.grid_radius);
                x += 1u32;
            }
            y -= 1u32;
        }
        out.push_str("</g>\n");
    }

    let mut d = String::new();
    for (i, v) in vs.iter().enumerate() {
        let _ = write!(d, "{}{}", if i == 0 { "M " } else { " L " }, frame.xy(v));
    }
    d.push_str(" Z");
    let _ = writeln!(
        out,
        r##"<path class="hull" d="{d}" fill="#dfe9f5" fill-opacity="0.6" stroke="{}" stroke-width="{}" stroke-linejoin="round"/>"##,
        style.stroke, style.stroke_width
    );
    let o = Point::origin();
    let _ = writeln!(
        out,
        r#"<circle class="origin" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
        frame.x(&o),
        frame.y(&o),
        style.fiber_radius,
        style.stroke
    );
    for v in vs {
        let _ = writeln!(
            out,
            r#"<circle class="vertex" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
            frame.x(v),
            frame.y(v),
            style.fiber_radius,
            style.fiber_fill
        );
        if spec.labels {
            let y = format_decimal(&(&frame.height - (&v.y * &frame.scale + &frame.offset_y) - rat(style.font_size) / rat(2)));
            text(&mut out, &frame.x(v), &y, style.font_size, &format!("({},{})", v.x, v.y));
        }
    }
    if spec.labels {
        let size = style.font_size;
        let y = format_decimal(&(rat(spec.height) - rat(size) / rat(2)));
        let x = format_decimal(&(rat(spec.width) / rat(2)));
        let ls: Vec<String> = h.lengths.iter().map(|l| l.to_string()).collect();
        text(&mut out, &x, &y, size, &format!("{} lengths {{{}}}", h.provenance, ls.join(",")));
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atf::rational_blowdown_diagram;
    use crate::hull::boundary_hull;
    use crate::markov::MarkovTriple;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_round_half_even() {
        assert_eq!(format_decimal(&q(1, 3)), "0.333333");
        assert_eq!(format_decimal(&q(2, 3)), "0.666667");
        assert_eq!(format_decimal(&q(-1, 3)), "-0.333333");
        assert_eq!(format_decimal(&q(1, 2_000_000)), "0.000000");
        assert_eq!(format_decimal(&q(3, 2_000_000)), "0.000002");
        assert_eq!(format_decimal(&q(-1, 2_000_000)), "0.000000");
        assert_eq!(format_decimal(&q(-3, 2_000_000)), "-0.000002");
        assert_eq!(format_decimal(&q(400, 1)), "400.000000");
    }

    #[test]
    fn diagram_structure() {
        let d = rational_blowdown_diagram(&MarkovTriple::new(1, 2, 5).unwrap()).unwrap();
        let svg = String::from_utf8(render_diagram(&d, &RenderSpec::default()).unwrap()).unwrap();
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<svg").count(), 1);
        assert_eq!(render_diagram(&d, &RenderSpec::default()).unwrap(), svg.into_bytes());
    }

    #[test]
    fn hull_structure() {
        let h = boundary_hull(&MarkovTriple::new(1, 2, 5).unwrap()).unwrap();
        let svg = String::from_utf8(render_hull(&h, &RenderSpec::default()).unwrap()).unwrap();
        assert_eq!(svg.matches(r#"class="vertex""#).count(), 3);
        assert_eq!(svg.matches(r#"class="origin""#).count(), 1);
        // 8 × 6 lattice points in the bounding box [-6, 1] × [-4, 1].
        assert_eq!(svg.matches("<circle").count(), 48 + 1 + 3);
    }

    #[test]
    fn zero_canvas_rejected() {
        let d = rational_blowdown_diagram(&MarkovTriple::root()).unwrap();
        let spec = RenderSpec {
            width: 0,
            ..RenderSpec::default()
        };
        assert!(matches!(render_diagram(&d, &spec), Err(RenderError::InvalidSpec(_))));
    }
}
