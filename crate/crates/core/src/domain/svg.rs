//! Poincaré disk drawings.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::Result;
use crate::hyperbolic::{act, Point};
use crate::moebius::{ProjectiveElement, Word};

use super::{ball_words, DomainDescription};

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    /// Width and height in pixels.
    pub size: f64,
    pub stroke_width: f64,
    pub side_color: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 512.0,
            stroke_width: 1.5,
            side_color: "#1f5fa8".into(),
        }
    }
}

impl SvgStyle {
    fn half(&self) -> f64 {
        self.size / 2.0
    }

    fn scale(&self) -> f64 {
        self.size / 2.0 - 16.0
    }

    fn screen(&self, p: (f64, f64)) -> (f64, f64) {
        (
            self.half() + self.scale() * p.0,
            self.half() - self.scale() * p.1,
        )
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// `z ↦ (z − i)/(z + i)`.
pub(crate) fn upper_to_disk(z: (f64, f64)) -> (f64, f64) {
    let (x, y) = z;
    let den = x * x + (y + 1.0) * (y + 1.0);
    ((x * x + y * y - 1.0) / den, -2.0 * x / den)
}

/// Path data for the geodesic segment between two points of the closed disk.
fn geodesic_path(p: (f64, f64), q: (f64, f64), style: &SvgStyle) -> String {
    let (s1, s2) = (style.screen(p), style.screen(q));
    let det = 4.0 * (p.0 * q.1 - p.1 * q.0);
    let line = || {
        format!(
            "M {} {} L {} {}",
            num(s1.0),
            num(s1.1),
            num(s2.0),
            num(s2.1)
        )
    };
    if det.abs() < 1e-9 {
        return line();
    }
    // the circle through p and q orthogonal to the unit circle
    let (r1, r2) = (p.0 * p.0 + p.1 * p.1 + 1.0, q.0 * q.0 + q.1 * q.1 + 1.0);
    let c = (
        (r1 * 2.0 * q.1 - r2 * 2.0 * p.1) / det,
        (r2 * 2.0 * p.0 - r1 * 2.0 * q.0) / det,
    );
    let radius = ((p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)).sqrt();
    if !radius.is_finite() || radius > 1e6 {
        return line();
    }
    let cs = style.screen(c);
    let cross = (s1.0 - cs.0) * (s2.1 - cs.1) - (s1.1 - cs.1) * (s2.0 - cs.0);
    let sweep = u8::from(cross > 0.0);
    let r = num(radius * style.scale());
    format!(
        "M {} {} A {r} {r} 0 0 {sweep} {} {}",
        num(s1.0),
        num(s1.1),
        num(s2.0),
        num(s2.1)
    )
}

fn header(style: &SvgStyle) -> String {
    let size = num(style.size);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    let _ = writeln!(
        out,
        "<circle class=\"boundary\" cx=\"{h}\" cy=\"{h}\" r=\"{r}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        h = num(style.half()),
        r = num(style.scale())
    );
    out
}

/// The sides of a domain as arcs in the Poincaré disk.
pub fn emit_svg(desc: &DomainDescription, style: &SvgStyle) -> String {
    let mut out = header(style);
    for e in &desc.edges {
        let _ = writeln!(
            out,
            "<path class=\"side\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            geodesic_path(e[0], e[1], style),
            style.side_color,
            num(style.stroke_width)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Orbit points `g·v` of a ball in the Cayley graph, with edges
/// `g → g·x`.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub words: Vec<Word>,
    /// Disk coordinates of `g·v`.
    pub points: Vec<(f64, f64)>,
    pub edges: Vec<(usize, usize)>,
}

pub fn cayley_ball(gens: &[ProjectiveElement], base: &Point, radius: usize) -> Result<CayleyBall> {
    let spec = base.spec();
    let words = ball_words(gens.len(), radius);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut points = Vec::with_capacity(words.len());
    let mut edges = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let g = w.evaluate(gens, spec)?;
        points.push(upper_to_disk(act(&g, base).to_f64()));
        if !w.is_empty() {
            let parent = Word::new(w.letters()[..w.len() - 1].iter().copied());
            edges.push((index[&parent], i));
        }
    }
    Ok(CayleyBall {
        words,
        points,
        edges,
    })
}

pub fn emit_cayley_svg(ball: &CayleyBall, style: &SvgStyle) -> String {
    let mut out = header(style);
    for &(a, b) in &ball.edges {
        let _ = writeln!(
            out,
            "<path class=\"edge\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            geodesic_path(ball.points[a], ball.points[b], style),
            style.side_color,
            num(style.stroke_width)
        );
    }
    for p in &ball.points {
        let s = style.screen(*p);
        let _ = writeln!(
            out,
            "<circle class=\"vertex\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"black\"/>",
            num(s.0),
            num(s.1)
        );
    }
    out.push_str("</svg>\n");
    out
}
