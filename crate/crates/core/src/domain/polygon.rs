//! Convex polygons in the Klein model with exact vertices.
//!
//! A geodesic `α(x² + y²) + βx + γ = 0` of the upper half-plane becomes the
//! line `(α + γ) + (α − γ)·k₁ − β·k₂ = 0` in the Klein disk centred at `i`,
//! where `k = (x² + y² − 1, −2x) / (x² + y² + 1)`. The sign of the linear
//! form agrees with the sign of the quadratic one, so half-planes stay
//! half-planes and every vertex has coordinates in the base field.

use crate::hyperbolic::{Geodesic, Point};
use crate::numberfield::{FieldElement, FieldSpec};

/// `c₀ + c₁·k₁ + c₂·k₂`, negative inside.
#[derive(Clone, Debug)]
pub(crate) struct KleinLine {
    c: [FieldElement; 3],
    approx: [f64; 3],
}

impl KleinLine {
    pub fn from_geodesic(g: &Geodesic) -> Self {
        let c = [&g.alpha + &g.gamma, &g.alpha - &g.gamma, -g.beta.clone()];
        let approx = [c[0].to_f64(), c[1].to_f64(), c[2].to_f64()];
        KleinLine { c, approx }
    }

    pub fn eval(&self, k: &KleinPoint) -> FieldElement {
        &self.c[0] + &self.c[1] * &k.x + &self.c[2] * &k.y
    }

    fn eval_f64(&self, k: (f64, f64)) -> f64 {
        self.approx[0] + self.approx[1] * k.0 + self.approx[2] * k.1
    }

    pub(crate) fn negated(&self) -> Self {
        KleinLine {
            c: self.c.clone().map(|x| -x),
            approx: self.approx.map(|x| -x),
        }
    }
}

/// An exact point of the Klein model (possibly outside the disk).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KleinPoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl KleinPoint {
    pub fn from_upper(p: &Point) -> Self {
        let r2 = p.abs2();
        let one = p.spec().one();
        let den = &r2 + &one;
        KleinPoint {
            x: (&r2 - &one) / den.clone(),
            y: (p.spec().int(-2) * p.x()) / den,
        }
    }

    pub fn norm2(&self) -> FieldElement {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// Position relative to the unit circle: −1 inside, 0 on, 1 outside.
    pub fn disk_position(&self) -> i8 {
        (self.norm2() - self.x.spec().one()).signum()
    }

    fn lerp(&self, other: &KleinPoint, t: &FieldElement) -> KleinPoint {
        KleinPoint {
            x: &self.x + t * &(&other.x - &self.x),
            y: &self.y + t * &(&other.y - &self.y),
        }
    }
}

/// Which constraint produced an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum EdgeLabel {
    Frame,
    Side(usize),
}

/// Convex polygon; edge `i` runs from `vertices[i]` to `vertices[i + 1]`.
#[derive(Clone, Debug)]
pub(crate) struct KleinPolygon {
    pub vertices: Vec<KleinPoint>,
    pub labels: Vec<EdgeLabel>,
    approx: Vec<(f64, f64)>,
}

impl KleinPolygon {
    /// The square `[−1, 1]²`, which contains the closed disk.
    pub fn frame(spec: FieldSpec) -> Self {
        let pt = |x: i64, y: i64| KleinPoint {
            x: spec.int(x),
            y: spec.int(y),
        };
        let vertices = vec![pt(-1, -1), pt(1, -1), pt(1, 1), pt(-1, 1)];
        let approx = vertices.iter().map(|v| v.to_f64()).collect();
        KleinPolygon {
            vertices,
            labels: vec![EdgeLabel::Frame; 4],
            approx,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the whole polygon lies strictly inside `line`, judged in
    /// floating point with a wide margin; `false` means "unknown".
    fn surely_inside(&self, line: &KleinLine) -> bool {
        let scale = line.approx.iter().map(|c| c.abs()).sum::<f64>();
        self.approx
            .iter()
            .all(|&v| line.eval_f64(v) < -1e-9 * scale)
    }

    /// Intersects with `line ≤ 0`, labelling new edges `label`.
    pub fn clip(&mut self, line: &KleinLine, label: EdgeLabel) {
        if self.vertices.is_empty() || self.surely_inside(line) {
            return;
        }
        let values: Vec<FieldElement> = self.vertices.iter().map(|v| line.eval(v)).collect();
        let n = self.vertices.len();
        let mut out_v = Vec::with_capacity(n + 1);
        let mut out_l = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (sp, sq) = (values[i].signum(), values[j].signum());
            let (p, q) = (&self.vertices[i], &self.vertices[j]);
            let crossing = || {
                let t = values[i].clone() / (&values[i] - &values[j]);
                p.lerp(q, &t)
            };
            if sp <= 0 {
                if sq > 0 {
                    if sp == 0 {
                        out_v.push(p.clone());
                        out_l.push(label);
                    } else {
                        out_v.push(p.clone());
                        out_l.push(self.labels[i]);
                        out_v.push(crossing());
                        out_l.push(label);
                    }
                } else {
                    out_v.push(p.clone());
                    out_l.push(self.labels[i]);
                }
            } else if sq < 0 {
                out_v.push(crossing());
                out_l.push(self.labels[i]);
            }
        }
        // a zero-length edge i means vertex i repeats vertex i + 1
        let m = out_v.len();
        let keep: Vec<bool> = (0..m).map(|i| out_v[i] != out_v[(i + 1) % m]).collect();
        let mut it = keep.iter();
        out_v.retain(|_| *it.next().expect("same length"));
        let mut it = keep.iter();
        out_l.retain(|_| *it.next().expect("same length"));
        if out_v.len() < 3 {
            out_v.clear();
            out_l.clear();
        }
        self.approx = out_v.iter().map(|v| v.to_f64()).collect();
        self.vertices = out_v;
        self.labels = out_l;
    }

    /// Does edge `i` pass through the open unit disk?
    pub fn edge_meets_open_disk(&self, i: usize) -> bool {
        let n = self.vertices.len();
        segment_meets_open_disk(&self.vertices[i], &self.vertices[(i + 1) % n])
    }

    /// Does the polygon meet the open unit disk?
    pub fn meets_open_disk(&self) -> bool {
        (0..self.vertices.len())
            .any(|i| self.vertices[i].disk_position() < 0 || self.edge_meets_open_disk(i))
    }
}

/// Exact test: does the closed segment `[p, q]` come within distance < 1 of
/// the origin?
pub(crate) fn segment_meets_open_disk(p: &KleinPoint, q: &KleinPoint) -> bool {
    let spec = p.x.spec();
    let one = spec.one();
    if p.norm2() < one || q.norm2() < one {
        return true;
    }
    let dx = &q.x - &p.x;
    let dy = &q.y - &p.y;
    let len2 = &dx * &dx + &dy * &dy;
    if len2.is_zero() {
        return false;
    }
    let t = -(&p.x * &dx + &p.y * &dy) / len2;
    if !t.is_positive() || t >= one {
        return false;
    }
    p.lerp(q, &t).norm2() < one
}

/// `{a < 0} ⊆ {b < 0}` within the hyperbolic plane.
#[cfg(test)]
pub(crate) fn implies(a: &KleinLine, b: &KleinLine, spec: FieldSpec) -> bool {
    let mut poly = KleinPolygon::frame(spec);
    poly.clip(a, EdgeLabel::Side(0));
    poly.clip(&b.negated(), EdgeLabel::Side(1));
    poly.is_empty() || !poly.meets_open_disk()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::RATIONALS
    }

    #[test]
    fn klein_point_of_i_is_origin() {
        let k = KleinPoint::from_upper(&Point::i(q()));
        assert!(k.x.is_zero() && k.y.is_zero());
        let p = KleinPoint::from_upper(&Point::new(q().int(2), q().int(1)).unwrap());
        assert_eq!(
            p,
            KleinPoint {
                x: q().ratio(2, 3),
                y: q().ratio(-2, 3)
            }
        );
    }

    #[test]
    fn clip_halves_the_frame() {
        let mut poly = KleinPolygon::frame(q());
        // k1 ≤ 0
        let line = KleinLine {
            c: [q().zero(), q().one(), q().zero()],
            approx: [0.0, 1.0, 0.0],
        };
        poly.clip(&line, EdgeLabel::Side(7));
        assert_eq!(poly.vertices.len(), 4);
        assert_eq!(
            poly.labels
                .iter()
                .filter(|l| **l == EdgeLabel::Side(7))
                .count(),
            1
        );
        assert!(poly.vertices.iter().all(|v| !v.x.is_positive()));
    }

    #[test]
    fn segment_disk_tests() {
        let p = |x: (i64, i64), y: (i64, i64)| KleinPoint {
            x: q().ratio(x.0, x.1),
            y: q().ratio(y.0, y.1),
        };
        assert!(segment_meets_open_disk(
            &p((-2, 1), (0, 1)),
            &p((2, 1), (0, 1))
        ));
        assert!(!segment_meets_open_disk(
            &p((-2, 1), (1, 1)),
            &p((2, 1), (1, 1))
        ));
        assert!(!segment_meets_open_disk(
            &p((2, 1), (0, 1)),
            &p((3, 1), (0, 1))
        ));
    }
}
