//! Dirichlet domains, peripheral classes, Nielsen region sides and SVG
//! output.
//!
//! Sides are exact. Redundancy is decided exactly by clipping in the Klein
//! model, whose vertices stay in the base field. Vertices and angles in the
//! upper half-plane are only reported in floating point.

mod polygon;
mod signature;
mod svg;

pub use polygon::KleinPoint;
pub use signature::{
    nielsen_region_sides, peripheral_classes, PeripheralClass, PeripheralKind, SignatureReport,
};
pub use svg::{cayley_ball, emit_cayley_svg, emit_svg, CayleyBall, SvgStyle};

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finiteindex::FiniteIndexData;
use crate::hyperbolic::{
    act, bisector, dist_surrogate, halfplane_contains, Containment, Geodesic, Point,
};
use crate::membership::{cosh_proxy, ReducedGroup};
use crate::moebius::{Letter, ProjectiveElement, Word};
use crate::numberfield::{FieldElement, FieldSpec};
use crate::reduction::{short_words_at, Reducer, ReducerConfig};
use polygon::{EdgeLabel, KleinLine, KleinPolygon};

/// Points nearer to `center` than to `owner·center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlaneSide {
    pub owner: ProjectiveElement,
    /// `owner` as a word over the generators the domain was built from.
    pub owner_word: Word,
    pub center: Point,
    /// Oriented so that `center` is inside.
    pub geodesic: Geodesic,
}

impl HalfPlaneSide {
    pub fn new(owner: ProjectiveElement, owner_word: Word, center: &Point) -> Result<Self> {
        let geodesic = bisector(center, &act(&owner, center))?;
        Ok(HalfPlaneSide {
            owner,
            owner_word,
            center: center.clone(),
            geodesic,
        })
    }

    /// `center` strictly inside and `owner·center` strictly outside.
    pub fn is_oriented(&self) -> bool {
        halfplane_contains(&self.geodesic, &self.center) == Containment::Inside
            && halfplane_contains(&self.geodesic, &act(&self.owner, &self.center))
                == Containment::Outside
    }
}

/// A corner of the domain, for display.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    /// On the circle at infinity.
    pub ideal: bool,
    /// Poincaré disk coordinates, `z ↦ (z − i)/(z + i)`.
    pub disk: (f64, f64),
    /// Upper half-plane coordinates; `None` for `∞`.
    pub upper: Option<(f64, f64)>,
    /// Bound on the rounding error of `disk`.
    pub error: f64,
}

/// An intersection of half-planes around a center, with redundant sides
/// removed.
#[derive(Clone, Debug)]
pub struct DomainDescription {
    spec: FieldSpec,
    pub center: Point,
    /// In boundary order.
    pub sides: Vec<HalfPlaneSide>,
    /// In boundary order; includes the ends of free boundary arcs.
    pub vertices: Vec<Vertex>,
    /// Endpoints of each side's edge, in disk coordinates.
    pub edges: Vec<[(f64, f64); 2]>,
    /// Part of the domain's closure lies on the circle at infinity.
    pub free_boundary: bool,
    /// Set by [`full_group_domain`] once the audit passes.
    pub verified_depth: Option<usize>,
    /// Klein coordinates of the boundary polygon, for sampling.
    outline: Vec<(f64, f64)>,
    angle_sum: f64,
}

fn klein_to_upper(k: (f64, f64)) -> Option<(f64, f64)> {
    let den = 1.0 - k.0;
    if den <= 1e-15 {
        return None;
    }
    let r2 = (1.0 + k.0) / den;
    let x = -k.1 / den;
    Some((x, (r2 - x * x).max(0.0).sqrt()))
}

fn klein_to_disk(k: (f64, f64)) -> (f64, f64) {
    let n2 = k.0 * k.0 + k.1 * k.1;
    let s = 1.0 + (1.0 - n2).max(0.0).sqrt();
    (k.0 / s, k.1 / s)
}

/// Parameters in `[0, 1]` where the segment `p → q` crosses the unit circle.
fn circle_crossings(p: (f64, f64), q: (f64, f64)) -> Vec<f64> {
    let d = (q.0 - p.0, q.1 - p.1);
    let a = d.0 * d.0 + d.1 * d.1;
    let b = 2.0 * (p.0 * d.0 + p.1 * d.1);
    let c = p.0 * p.0 + p.1 * p.1 - 1.0;
    let disc = b * b - 4.0 * a * c;
    if a == 0.0 || disc <= 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
        .into_iter()
        .filter(|t| (0.0..=1.0).contains(t))
        .collect()
}

fn lerp(p: (f64, f64), q: (f64, f64), t: f64) -> (f64, f64) {
    (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
}

/// Interior angle between two sides at an upper half-plane point.
fn interior_angle(a: &Geodesic, b: &Geodesic, z: (f64, f64)) -> f64 {
    let normal = |g: &Geodesic| {
        let al = g.alpha.to_f64();
        (2.0 * al * z.0 + g.beta.to_f64(), 2.0 * al * z.1)
    };
    let (n, m) = (normal(a), normal(b));
    let cos =
        (n.0 * m.0 + n.1 * m.1) / ((n.0 * n.0 + n.1 * n.1).sqrt() * (m.0 * m.0 + m.1 * m.1).sqrt());
    PI - cos.clamp(-1.0, 1.0).acos()
}

impl DomainDescription {
    /// Builds the domain from candidate elements, dropping those that fix
    /// `center` and duplicate half-planes.
    pub fn from_candidates(
        center: &Point,
        candidates: Vec<(ProjectiveElement, Word)>,
    ) -> Result<Self> {
        let spec = center.spec();
        let mut keyed = Vec::with_capacity(candidates.len());
        for (g, w) in candidates {
            if g.spec() != spec {
                return Err(Error::FieldMismatch(spec.d(), g.spec().d()));
            }
            let image = act(&g, center);
            if image == *center {
                continue;
            }
            keyed.push((dist_surrogate(center, &image), w, g));
        }
        keyed.sort_by(|x, y| {
            x.0.cmp(&y.0)
                .then_with(|| x.1.len().cmp(&y.1.len()))
                .then_with(|| x.1.cmp(&y.1))
        });
        let mut seen = HashSet::new();
        let mut sides = Vec::new();
        for (_, w, g) in keyed {
            let side = HalfPlaneSide::new(g, w, center)?;
            if seen.insert(side.geodesic.clone()) {
                sides.push(side);
            }
        }
        let mut poly = KleinPolygon::frame(spec);
        for (j, s) in sides.iter().enumerate() {
            poly.clip(&KleinLine::from_geodesic(&s.geodesic), EdgeLabel::Side(j));
        }
        Ok(Self::from_polygon(center, &sides, &poly))
    }

    fn from_polygon(center: &Point, sides: &[HalfPlaneSide], poly: &KleinPolygon) -> Self {
        let n = poly.vertices.len();
        let corners: Vec<(f64, f64)> = poly.vertices.iter().map(|v| v.to_f64()).collect();
        let position: Vec<i8> = poly.vertices.iter().map(|v| v.disk_position()).collect();
        let free_boundary = position.iter().any(|&p| p > 0);
        let vertex = |k: (f64, f64), ideal: bool, error: f64| {
            let disk = klein_to_disk(k);
            Vertex {
                ideal,
                disk,
                upper: klein_to_upper(k),
                error: error * (1.0 + disk.0.abs() + disk.1.abs()),
            }
        };
        let mut kept = Vec::new();
        let mut edges = Vec::new();
        let mut vertices = Vec::new();
        let mut outline = Vec::new();
        let mut angle_sum = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            if position[i] <= 0 {
                vertices.push(vertex(corners[i], position[i] == 0, 1e-12));
                outline.push(corners[i]);
                let prev = poly.labels[(i + n - 1) % n];
                if let (EdgeLabel::Side(a), EdgeLabel::Side(b), true) =
                    (prev, poly.labels[i], position[i] < 0)
                {
                    if let Some(z) = klein_to_upper(corners[i]) {
                        angle_sum += interior_angle(&sides[a].geodesic, &sides[b].geodesic, z);
                    }
                }
            }
            if !poly.edge_meets_open_disk(i) {
                continue;
            }
            let (p, q) = (corners[i], corners[j]);
            let ts = circle_crossings(p, q);
            let t0 = if position[i] > 0 {
                ts.first().copied().unwrap_or(0.0)
            } else {
                0.0
            };
            let t1 = if position[j] > 0 {
                ts.last().copied().unwrap_or(1.0)
            } else {
                1.0
            };
            if position[i] > 0 {
                let k = lerp(p, q, t0);
                vertices.push(vertex(k, true, 1e-9));
                outline.push(k);
            }
            if position[j] > 0 {
                let k = lerp(p, q, t1);
                vertices.push(vertex(k, true, 1e-9));
                outline.push(k);
            }
            if let EdgeLabel::Side(s) = poly.labels[i] {
                kept.push(sides[s].clone());
                edges.push([klein_to_disk(lerp(p, q, t0)), klein_to_disk(lerp(p, q, t1))]);
            }
        }
        DomainDescription {
            spec: center.spec(),
            center: center.clone(),
            sides: kept,
            vertices,
            edges,
            free_boundary,
            verified_depth: None,
            outline,
            angle_sum,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Position of `p` relative to the closed domain.
    pub fn contains(&self, p: &Point) -> Containment {
        let mut out = Containment::Inside;
        for s in &self.sides {
            match halfplane_contains(&s.geodesic, p) {
                Containment::Outside => return Containment::Outside,
                Containment::Boundary => out = Containment::Boundary,
                Containment::Inside => {}
            }
        }
        out
    }

    /// Hyperbolic area from the angle sum; `None` when the domain reaches
    /// the circle at infinity along an arc.
    pub fn area(&self) -> Option<f64> {
        if self.free_boundary || self.vertices.len() < 3 {
            return None;
        }
        Some((self.vertices.len() as f64 - 2.0) * PI - self.angle_sum)
    }

    /// No side is implied by the others together.
    pub fn is_irredundant(&self) -> bool {
        let lines: Vec<KleinLine> = self
            .sides
            .iter()
            .map(|s| KleinLine::from_geodesic(&s.geodesic))
            .collect();
        (0..lines.len()).all(|j| {
            let mut poly = KleinPolygon::frame(self.spec);
            for (k, l) in lines.iter().enumerate() {
                if k != j {
                    poly.clip(l, EdgeLabel::Side(k));
                }
            }
            poly.clip(&lines[j].negated(), EdgeLabel::Side(j));
            !poly.is_empty() && poly.meets_open_disk()
        })
    }

    /// Random exact points of the closed domain, drawn from convex
    /// combinations of its corners plus points just inside each corner.
    pub fn sample_points<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Point> {
        let clamp = |k: (f64, f64)| {
            let r = (k.0 * k.0 + k.1 * k.1).sqrt();
            if r > 0.999 {
                (0.999 * k.0 / r, 0.999 * k.1 / r)
            } else {
                k
            }
        };
        let corners: Vec<(f64, f64)> = self.outline.iter().map(|&k| clamp(k)).collect();
        let mut klein = Vec::with_capacity(count + corners.len());
        if corners.len() >= 3 {
            let m = corners.len() as f64;
            let centroid = corners
                .iter()
                .fold((0.0, 0.0), |a, c| (a.0 + c.0 / m, a.1 + c.1 / m));
            for c in &corners {
                klein.push(lerp(*c, centroid, 0.02));
            }
            for _ in 0..count {
                let weights: Vec<f64> = corners
                    .iter()
                    .map(|_| -rng.gen_range(1e-12f64..1.0).ln())
                    .collect();
                let total: f64 = weights.iter().sum();
                let k = corners.iter().zip(&weights).fold((0.0, 0.0), |a, (c, w)| {
                    (a.0 + c.0 * w / total, a.1 + c.1 * w / total)
                });
                klein.push(k);
            }
        } else {
            for _ in 0..count {
                let r = 0.95 * rng.gen::<f64>().sqrt();
                let t = rng.gen_range(0.0..2.0 * PI);
                klein.push((r * t.cos(), r * t.sin()));
            }
        }
        const SCALE: f64 = (1u64 << 24) as f64;
        let mut out = Vec::new();
        for k in klein {
            let Some((x, y)) = klein_to_upper(k) else {
                continue;
            };
            if !(x.is_finite() && y.is_finite()) || x.abs() > 1e9 || y > 1e9 {
                continue;
            }
            let (xn, yn) = ((x * SCALE).round() as i64, (y * SCALE).round() as i64);
            if yn <= 0 {
                continue;
            }
            let Ok(p) = Point::new(self.spec.ratio(xn, 1 << 24), self.spec.ratio(yn, 1 << 24))
            else {
                continue;
            };
            if self.contains(&p) != Containment::Outside {
                out.push(p);
            }
        }
        out
    }

    /// `{"sides":[{"alpha","beta","gamma","owner_word"}]}`.
    pub fn to_json(&self) -> Value {
        let sides: Vec<Value> = self
            .sides
            .iter()
            .map(|s| {
                json!({
                    "alpha": s.geodesic.alpha.to_string(),
                    "beta": s.geodesic.beta.to_string(),
                    "gamma": s.geodesic.gamma.to_string(),
                    "owner_word": s.owner_word.to_signed(),
                })
            })
            .collect();
        json!({ "sides": sides })
    }
}

/// All freely reduced words of length at most `radius` in `rank`
/// generators, shortest first.
pub(crate) fn ball_words(rank: usize, radius: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..rank {
                for exp in [1i8, -1] {
                    let l = Letter::new(i, exp);
                    if w.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    next.push(w.concat_reduce(&Word::letter(l)));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Dirichlet domain of a torsion-free group from its short words and their
/// inverses. For a
/// center other than the group's base point the generators are first
/// reduced at that center.
pub fn dirichlet_sides(group: &ReducedGroup, center: &Point) -> Result<DomainDescription> {
    let spec = group.spec();
    if center.spec() != spec {
        return Err(Error::FieldMismatch(spec.d(), center.spec().d()));
    }
    let mut candidates = Vec::new();
    if center == group.base() {
        for s in short_words_at(group.entries(), center)? {
            let w = group.expand(&s.word)?;
            candidates.push((s.elem.inverse(), w.inverse()));
            candidates.push((s.elem, w));
        }
    } else {
        let elems: Vec<ProjectiveElement> =
            group.entries().iter().map(|e| e.elem.clone()).collect();
        let mut reducer = Reducer::new(ReducerConfig {
            base: Some(center.clone()),
            ..ReducerConfig::default()
        });
        let cert = reducer.run(&elems)?;
        let reduced = cert.reduced().ok_or_else(|| {
            Error::Verification(format!(
                "reduction at {center} did not return a reduced set"
            ))
        })?;
        let images: Vec<Word> = reduced.iter().map(|e| e.word.clone()).collect();
        for s in short_words_at(reduced, center)? {
            let w = group.expand(&s.word.substitute(&images)?)?;
            candidates.push((s.elem.inverse(), w.inverse()));
            candidates.push((s.elem, w));
        }
    }
    DomainDescription::from_candidates(center, candidates)
}

/// Tunables for [`full_group_domain`].
#[derive(Clone, Debug)]
pub struct FullDomainConfig {
    /// Radius of the ball of generator words added to the candidates.
    pub depth: usize,
    /// Random audit points per round.
    pub samples: usize,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for FullDomainConfig {
    fn default() -> Self {
        FullDomainConfig {
            depth: 2,
            samples: 48,
            max_rounds: 64,
            seed: 0,
        }
    }
}

/// Nearest point of the orbit `G·v` to `p`, if it is strictly nearer than
/// `v` itself, as `(g, word)`.
fn nearer_orbit_point(
    data: &FiniteIndexData,
    reps: &[(ProjectiveElement, Word)],
    p: &Point,
) -> Result<Option<(ProjectiveElement, Word)>> {
    let h = &data.subgroup;
    let center = h.base();
    let mut best: Option<(FieldElement, ProjectiveElement, usize, Word)> = None;
    let here = cosh_proxy(center, p);
    for (k, (s, _)) in reps.iter().enumerate() {
        // h·(s⁻¹p) lies in the domain of the kernel, so h⁻¹v is the kernel
        // orbit point nearest to s⁻¹p
        let red = h.reduce_point(&act(&s.inverse(), p), false)?;
        let g = s * &red.elem.inverse();
        let value = cosh_proxy(&act(&g, center), p);
        if value < here && best.as_ref().map_or(true, |b| value < b.0) {
            best = Some((value, g, k, red.word));
        }
    }
    let Some((_, g, k, word)) = best else {
        return Ok(None);
    };
    let kernel_word = h.expand(&word)?.substitute(&data.schreier)?;
    Ok(Some((g, reps[k].1.concat_reduce(&kernel_word.inverse()))))
}

/// Dirichlet domain of a group with torsion at its kernel's base point.
///
/// Candidates are the coset representatives, their products with the
/// kernel's reduced generators and inverses, and a ball of generator words. Random points of
/// the candidate domain are then checked against the nearest orbit point,
/// found exactly through the kernel; any nearer orbit point adds a side.
pub fn full_group_domain(
    data: &FiniteIndexData,
    config: &FullDomainConfig,
) -> Result<DomainDescription> {
    let spec = data.subgroup.spec();
    let center = data.subgroup.base().clone();
    let gens: Vec<ProjectiveElement> = data.generators.iter().map(|g| g.normalize()).collect();
    let reps: Vec<(ProjectiveElement, Word)> = data
        .cosets
        .reps()
        .iter()
        .map(|(w, _)| Ok((w.evaluate(&gens, spec)?, w.clone())))
        .collect::<Result<_>>()?;
    let mut seen: HashSet<ProjectiveElement> = HashSet::new();
    let mut candidates = Vec::new();
    let mut add = |g: ProjectiveElement, w: Word, out: &mut Vec<(ProjectiveElement, Word)>| {
        if !g.is_identity() && seen.insert(g.clone()) {
            out.push((g, w));
        }
    };
    for w in ball_words(gens.len(), config.depth) {
        add(w.evaluate(&gens, spec)?, w, &mut candidates);
    }
    let kernel: Vec<(ProjectiveElement, Word)> = data
        .subgroup
        .entries()
        .iter()
        .map(|e| Ok((e.elem.clone(), e.word.substitute(&data.schreier)?)))
        .collect::<Result<_>>()?;
    for (s, sw) in &reps {
        add(s.clone(), sw.clone(), &mut candidates);
        for (h, hw) in &kernel {
            add(s * h, sw.concat_reduce(hw), &mut candidates);
            add(
                s * &h.inverse(),
                sw.concat_reduce(&hw.inverse()),
                &mut candidates,
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.max_rounds {
        let mut desc = DomainDescription::from_candidates(&center, candidates.clone())?;
        let mut found = false;
        for p in desc.sample_points(config.samples, &mut rng) {
            if let Some((g, w)) = nearer_orbit_point(data, &reps, &p)? {
                add(g, w, &mut candidates);
                found = true;
            }
        }
        if !found {
            desc.verified_depth = Some(config.depth);
            return Ok(desc);
        }
    }
    Err(Error::Verification(format!(
        "domain audit still failing after {} rounds at depth {}",
        config.max_rounds, config.depth
    )))
}

#[cfg(test)]
mod tests;
