//! Exact predicates in the upper half-plane.
//!
//! Distances are never computed. Every comparison goes through the surrogate
//! `tanh²(d/2)`, which is a field element for points with coordinates in the
//! field, and through directions in the Cayley disk centred at the base point.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::moebius::{GroupElement, ProjectiveElement};
use crate::numberfield::{FieldElement, FieldSpec};

/// The point `x + iy` with `y > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    x: FieldElement,
    y: FieldElement,
}

impl Point {
    pub fn new(x: FieldElement, y: FieldElement) -> Result<Self> {
        if x.spec() != y.spec() {
            return Err(Error::FieldMismatch(x.spec().d(), y.spec().d()));
        }
        if !y.is_positive() {
            return Err(Error::Precondition(format!(
                "imaginary part {y} is not positive"
            )));
        }
        Ok(Point { x, y })
    }

    /// The base point `i`.
    pub fn i(spec: FieldSpec) -> Self {
        Point {
            x: spec.zero(),
            y: spec.one(),
        }
    }

    pub fn x(&self) -> &FieldElement {
        &self.x
    }

    pub fn y(&self) -> &FieldElement {
        &self.y
    }

    pub fn spec(&self) -> FieldSpec {
        self.x.spec()
    }

    /// `x² + y²`.
    pub fn abs2(&self) -> FieldElement {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// Lexicographic order on `(x, y)`; used to pick canonical orbit
    /// representatives.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Möbius action `z ↦ (az + b)/(cz + d)` of an SL₂ matrix.
pub fn act_sl2(g: &GroupElement, p: &Point) -> Point {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let cx_d = c * &p.x + d;
    let cy = c * &p.y;
    let den = (&cx_d * &cx_d + &cy * &cy)
        .inverse()
        .expect("cz + d vanishes only off the half-plane");
    let ax_b = a * &p.x + b;
    let re = (&ax_b * &cx_d + a * &cy * &p.y) * &den;
    let im = &p.y * &den;
    Point { x: re, y: im }
}

/// Möbius action of a projective element.
pub fn act(g: &ProjectiveElement, p: &Point) -> Point {
    act_sl2(g.rep(), p)
}

/// `tanh²(d/2)` for a hyperbolic distance `d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistSurrogate(FieldElement);

impl DistSurrogate {
    pub fn value(&self) -> &FieldElement {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `t + t' < 1`, equivalent to `Φ(d)Φ(d') < 1` with `Φ = sinh`.
    pub fn phi_product_lt_one(&self, other: &DistSurrogate) -> bool {
        (&self.0 + &other.0 - self.0.spec().one()).is_negative()
    }

    /// Approximate distance `2·artanh(√t)`, for display only.
    pub fn approx_distance(&self) -> f64 {
        2.0 * self.0.to_f64().max(0.0).sqrt().atanh()
    }
}

impl fmt::Display for DistSurrogate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for DistSurrogate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}", self.0)
    }
}

/// `|z − w|² / |z − w̄|²`.
pub fn dist_surrogate(w: &Point, z: &Point) -> DistSurrogate {
    let dx = &z.x - &w.x;
    let dx2 = &dx * &dx;
    let dm = &z.y - &w.y;
    let dp = &z.y + &w.y;
    let num = &dx2 + &dm * &dm;
    let den = dx2 + &dp * &dp;
    DistSurrogate(num / den)
}

/// Surrogate of `d(i, g·i)`, computed from `N = a² + b² + c² + d²` as
/// `(N − 2)/(N + 2)` since `cosh d(i, g·i) = N/2`.
pub fn displacement_surrogate(g: &ProjectiveElement) -> DistSurrogate {
    displacement_surrogate_sl2(g.rep())
}

pub fn displacement_surrogate_sl2(g: &GroupElement) -> DistSurrogate {
    let n = g
        .entries()
        .iter()
        .fold(g.spec().zero(), |acc, e| acc + *e * *e);
    let two = g.spec().int(2);
    DistSurrogate((&n - &two) / (n + two))
}

/// Displacement surrogate of `g` at an arbitrary base point.
pub fn displacement_at(g: &ProjectiveElement, base: &Point) -> DistSurrogate {
    if base.x.is_zero() && base.y.is_one() {
        displacement_surrogate(g)
    } else {
        dist_surrogate(base, &act(g, base))
    }
}

pub fn phi_product_lt_one(g: &ProjectiveElement, h: &ProjectiveElement) -> bool {
    displacement_surrogate(g).phi_product_lt_one(&displacement_surrogate(h))
}

/// A ray from the centre of the Cayley disk, up to positive scaling.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Direction {
    pub u: FieldElement,
    pub w: FieldElement,
}

impl Direction {
    pub fn new(u: FieldElement, w: FieldElement) -> Result<Self> {
        if u.is_zero() && w.is_zero() {
            return Err(Error::Precondition("zero direction".into()));
        }
        Ok(Direction { u, w })
    }

    fn cross(&self, o: &Direction) -> FieldElement {
        &self.u * &o.w - &self.w * &o.u
    }

    fn dot(&self, o: &Direction) -> FieldElement {
        &self.u * &o.u + &self.w * &o.w
    }

    /// Positively proportional.
    pub fn same_ray(&self, o: &Direction) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    /// 0 when the clockwise angle from `self` to `d` lies in `[0, π)`, else 1.
    fn cw_half(&self, d: &Direction) -> u8 {
        match self.cross(d).signum() {
            -1 => 0,
            0 if self.dot(d).is_positive() => 0,
            _ => 1,
        }
    }

    /// Compares the clockwise angles from `self` to `a` and to `b`.
    pub fn cw_cmp(&self, a: &Direction, b: &Direction) -> Ordering {
        let (ha, hb) = (self.cw_half(a), self.cw_half(b));
        if ha != hb {
            return ha.cmp(&hb);
        }
        match a.cross(b).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.u.to_f64(), self.w.to_f64())
    }
}

/// Direction of `p` seen from `center`: the Cayley image
/// `(p − c)/(p − c̄)` with its positive denominator cleared.
pub fn direction_from(center: &Point, p: &Point) -> Result<Direction> {
    if center == p {
        return Err(Error::Precondition("direction of the centre itself".into()));
    }
    let dx = &p.x - &center.x;
    let u = &dx * &dx + &p.y * &p.y - &center.y * &center.y;
    let w = -(center.y.spec().int(2) * &center.y * dx);
    Direction::new(u, w)
}

pub fn direction_from_v(p: &Point) -> Result<Direction> {
    direction_from(&Point::i(p.spec()), p)
}

/// True iff `d2` strictly precedes `d3` sweeping clockwise from `d1`.
///
/// Directions sharing a ray are never in strict precedence, so the relation
/// is a strict cyclic order on pairwise distinct rays.
pub fn cw_cyclic_cmp(d1: &Direction, d2: &Direction, d3: &Direction) -> bool {
    if d1.same_ray(d2) || d1.same_ray(d3) || d2.same_ray(d3) {
        return false;
    }
    d1.cw_cmp(d2, d3) == Ordering::Less
}

/// The curve `α(x² + y²) + βx + γ = 0`, oriented: the half-plane is where
/// the form is negative.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Geodesic {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
}

impl Geodesic {
    pub fn new(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> Result<Self> {
        let ok = if alpha.is_zero() {
            !beta.is_zero()
        } else {
            (&beta * &beta - alpha.spec().int(4) * &alpha * &gamma).is_positive()
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "({alpha}, {beta}, {gamma}) is not a geodesic"
            )));
        }
        Ok(Geodesic { alpha, beta, gamma })
    }

    /// Axis of a hyperbolic element `[[a, b], [c, d]]`:
    /// `c(x² + y²) + (d − a)x − b = 0`.
    pub fn axis(g: &ProjectiveElement) -> Result<Self> {
        let r = g.rep();
        Geodesic::new(r.c().clone(), r.d() - r.a(), -r.b()).map(|g| g.normalized())
    }

    pub fn evaluate(&self, p: &Point) -> FieldElement {
        &self.alpha * p.abs2() + &self.beta * &p.x + &self.gamma
    }

    /// Divides by the absolute value of the first nonzero coefficient,
    /// keeping the orientation.
    pub fn normalized(&self) -> Geodesic {
        let lead = [&self.alpha, &self.beta, &self.gamma]
            .into_iter()
            .find(|c| !c.is_zero())
            .expect("geodesic coefficients are not all zero")
            .abs();
        let inv = lead.inverse().expect("nonzero");
        Geodesic {
            alpha: &self.alpha * &inv,
            beta: &self.beta * &inv,
            gamma: &self.gamma * &inv,
        }
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic {
            alpha: -&self.alpha,
            beta: -&self.beta,
            gamma: -&self.gamma,
        }
    }

    /// Same oriented half-plane (positively proportional coefficients).
    pub fn same_halfplane(&self, o: &Geodesic) -> bool {
        self.normalized() == o.normalized()
    }

    /// Same curve, orientation ignored.
    pub fn same_curve(&self, o: &Geodesic) -> bool {
        let n = o.normalized();
        self.normalized() == n || self.normalized() == n.reversed()
    }

    /// Endpoints on the boundary, sorted; `f64::INFINITY` for a vertical
    /// line's point at infinity.
    pub fn endpoints_f64(&self) -> (f64, f64) {
        let (a, b, c) = (self.alpha.to_f64(), self.beta.to_f64(), self.gamma.to_f64());
        if self.alpha.is_zero() {
            return (-c / b, f64::INFINITY);
        }
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        // the stable root pair
        let q = -0.5 * (b + b.signum() * disc);
        let (r1, r2) = if q != 0.0 { (q / a, c / q) } else { (0.0, 0.0) };
        if r1 <= r2 {
            (r1, r2)
        } else {
            (r2, r1)
        }
    }
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})(x²+y²) + ({})x + ({}) < 0",
            self.alpha, self.beta, self.gamma
        )
    }
}

impl fmt::Debug for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Perpendicular bisector of `c` and `q`, oriented so that `c` is inside:
/// the set where `|w − c|²·q.y < |w − q|²·c.y`.
pub fn bisector(c: &Point, q: &Point) -> Result<Geodesic> {
    if c == q {
        return Err(Error::Precondition(
            "bisector of a point with itself".into(),
        ));
    }
    let alpha = &q.y - &c.y;
    let beta = c.spec().int(2) * (&q.x * &c.y - &c.x * &q.y);
    let gamma = &q.y * c.abs2() - &c.y * q.abs2();
    Ok(Geodesic::new(alpha, beta, gamma)?.normalized())
}

/// Position of a point relative to an oriented half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

pub fn halfplane_contains(geo: &Geodesic, p: &Point) -> Containment {
    match geo.evaluate(p).signum() {
        -1 => Containment::Inside,
        0 => Containment::Boundary,
        _ => Containment::Outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::RATIONALS
    }

    fn m(e: [[i64; 2]; 2]) -> ProjectiveElement {
        GroupElement::from_ints(q(), e).unwrap().normalize()
    }

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::new(q().ratio(x.0, x.1), q().ratio(y.0, y.1)).unwrap()
    }

    fn a() -> ProjectiveElement {
        m([[1, 2], [0, 1]])
    }

    fn b() -> ProjectiveElement {
        m([[1, 0], [2, 1]])
    }

    #[test]
    fn action_examples() {
        let v = Point::i(q());
        assert_eq!(act(&a(), &v), pt((2, 1), (1, 1)));
        assert_eq!(act(&ProjectiveElement::identity(q()), &v), v);
        assert_eq!(act(&b(), &v), pt((2, 5), (1, 5)));
    }

    #[test]
    fn surrogate_examples() {
        let v = Point::i(q());
        assert_eq!(
            dist_surrogate(&v, &pt((2, 1), (1, 1))).value(),
            &q().ratio(1, 2)
        );
        assert!(dist_surrogate(&v, &v).is_zero());
        let ab = &a() * &b();
        assert_eq!(ab, m([[5, 2], [2, 1]]));
        assert_eq!(act(&ab, &v), pt((12, 5), (1, 5)));
        assert_eq!(dist_surrogate(&v, &act(&ab, &v)).value(), &q().ratio(8, 9));
        assert_eq!(displacement_surrogate(&a()).value(), &q().ratio(1, 2));
        assert!(displacement_surrogate(&ProjectiveElement::identity(q())).is_zero());
        assert_eq!(displacement_surrogate(&b()).value(), &q().ratio(1, 2));
        assert_eq!(displacement_surrogate(&ab).value(), &q().ratio(8, 9));
    }

    #[test]
    fn phi_examples() {
        assert!(!phi_product_lt_one(&a(), &b()));
        assert!(phi_product_lt_one(&ProjectiveElement::identity(q()), &a()));
        assert!(phi_product_lt_one(&m([[1, 1], [0, 1]]), &a()));
    }

    #[test]
    fn direction_examples() {
        let v = Point::i(q());
        let one_m1 = Direction::new(q().int(1), q().int(-1)).unwrap();
        let da = direction_from_v(&act(&a(), &v)).unwrap();
        assert!(da.same_ray(&one_m1));
        let db = direction_from_v(&act(&b(), &v)).unwrap();
        assert!(db.same_ray(&Direction::new(q().int(-1), q().int(-1)).unwrap()));
        let dab = direction_from_v(&act(&(&a() * &b()), &v)).unwrap();
        assert!(dab.same_ray(&da));
        assert!(direction_from_v(&v).is_err());
    }

    #[test]
    fn cyclic_order_examples() {
        let v = Point::i(q());
        let dir = |g: &ProjectiveElement| direction_from_v(&act(g, &v)).unwrap();
        let (da, db, dai, dbi) = (
            dir(&a()),
            dir(&b()),
            dir(&a().inverse()),
            dir(&b().inverse()),
        );
        assert!(cw_cyclic_cmp(&da, &db, &dai));
        assert!(!cw_cyclic_cmp(&da, &da, &db));
        assert!(!cw_cyclic_cmp(&da, &dai, &db));
        // full clockwise order A, B, B⁻¹, A⁻¹
        assert!(cw_cyclic_cmp(&da, &db, &dbi) && cw_cyclic_cmp(&db, &dbi, &dai));
    }

    #[test]
    fn bisector_examples() {
        let v = Point::i(q());
        let x1 = bisector(&v, &pt((2, 1), (1, 1))).unwrap();
        assert_eq!(
            x1,
            Geodesic::new(q().int(0), q().int(1), q().int(-1)).unwrap()
        );
        let circ = bisector(&v, &pt((2, 5), (1, 5))).unwrap();
        assert!(circ.same_curve(&Geodesic::new(q().int(1), q().int(-1), q().int(0)).unwrap()));
        let small = bisector(&v, &pt((8, 13), (1, 13))).unwrap();
        assert!(small.same_curve(&Geodesic::new(q().int(3), q().int(-4), q().int(1)).unwrap()));
        assert_eq!(halfplane_contains(&x1, &v), Containment::Inside);
        assert_eq!(
            halfplane_contains(&x1, &pt((1, 1), (1, 1))),
            Containment::Boundary
        );
        assert_eq!(
            halfplane_contains(&x1, &pt((2, 1), (1, 1))),
            Containment::Outside
        );
        assert!(bisector(&v, &v).is_err());
    }

    #[test]
    fn axis_of_diagonal_is_imaginary_axis() {
        let h = GroupElement::new(q().int(2), q().int(0), q().int(0), q().ratio(1, 2))
            .unwrap()
            .normalize();
        let ax = Geodesic::axis(&h).unwrap();
        assert!(ax.same_curve(&Geodesic::new(q().int(0), q().int(1), q().int(0)).unwrap()));
        assert_eq!(ax.endpoints_f64(), (0.0, f64::INFINITY));
    }
}
