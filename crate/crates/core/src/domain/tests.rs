use super::polygon::implies;
use super::*;
use crate::finiteindex::{recognize, FiniteIndexConfig, FullCertificate};
use crate::moebius::GroupElement;
use crate::reduction::recognize_torsion_free;

fn q() -> FieldSpec {
    FieldSpec::RATIONALS
}

fn m(spec: FieldSpec, e: [&str; 4]) -> GroupElement {
    let f = |s: &str| spec.parse(s).unwrap();
    GroupElement::new(f(e[0]), f(e[1]), f(e[2]), f(e[3])).unwrap()
}

fn group(gens: &[GroupElement]) -> ReducedGroup {
    let spec = gens.first().map(|g| g.spec()).unwrap_or(q());
    let cert = recognize_torsion_free(gens).unwrap();
    ReducedGroup::from_certificate_sl2(spec, &cert, gens).unwrap()
}

fn pair() -> ReducedGroup {
    group(&[m(q(), ["1", "2", "0", "1"]), m(q(), ["1", "0", "2", "1"])])
}

fn h() -> ReducedGroup {
    group(&[m(q(), ["2", "0", "0", "1/2"])])
}

fn geo(spec: FieldSpec, c: [&str; 3]) -> Geodesic {
    Geodesic::new(
        spec.parse(c[0]).unwrap(),
        spec.parse(c[1]).unwrap(),
        spec.parse(c[2]).unwrap(),
    )
    .unwrap()
}

fn has_side(desc: &DomainDescription, g: &Geodesic) -> bool {
    desc.sides.iter().any(|s| s.geodesic.same_halfplane(g))
}

#[test]
fn pair_domain_has_four_sides() {
    let g = pair();
    let d = dirichlet_sides(&g, &Point::i(q())).unwrap();
    assert_eq!(d.sides.len(), 4);
    for c in [
        ["0", "1", "-1"],
        ["0", "-1", "-1"],
        ["-1", "1", "0"],
        ["-1", "-1", "0"],
    ] {
        assert!(has_side(&d, &geo(q(), c)), "{c:?}");
    }
    assert!(d.sides.iter().all(|s| s.is_oriented()));
    assert!(d.is_irredundant());
    // four cusps at ∞, ±1 and 0
    assert_eq!(d.vertices.len(), 4);
    assert!(d.vertices.iter().all(|v| v.ideal));
    assert!(!d.free_boundary);
    assert!((d.area().unwrap() - 2.0 * PI).abs() < 1e-9);
}

#[test]
fn pair_pruning_is_implied_by_single_sides() {
    let g = pair();
    let v = Point::i(q());
    let shorts = short_words_at(g.entries(), &v).unwrap();
    assert_eq!(shorts.len(), 6);
    let all: Vec<HalfPlaneSide> = shorts
        .iter()
        .map(|s| HalfPlaneSide::new(s.elem.clone(), s.word.clone(), &v).unwrap())
        .collect();
    let d = dirichlet_sides(&g, &v).unwrap();
    let line = |s: &HalfPlaneSide| KleinLine::from_geodesic(&s.geodesic);
    let dropped: Vec<&HalfPlaneSide> = all.iter().filter(|s| !has_side(&d, &s.geodesic)).collect();
    assert_eq!(dropped.len(), 2);
    for s in dropped {
        assert!(d.sides.iter().any(|k| implies(&line(k), &line(s), q())));
        assert!(!implies(&line(s), &line(&d.sides[0]), q()));
    }
}

#[test]
fn hyperbolic_domain_is_an_annulus_piece() {
    let d = dirichlet_sides(&h(), &Point::i(q())).unwrap();
    assert_eq!(d.sides.len(), 2);
    assert!(has_side(&d, &geo(q(), ["1", "0", "-4"])));
    assert!(has_side(&d, &geo(q(), ["-1", "0", "1/4"])));
    assert!(d.free_boundary);
    assert_eq!(d.area(), None);
}

#[test]
fn empty_group_domain_is_the_plane() {
    let g = group(&[]);
    let d = dirichlet_sides(&g, &Point::i(q())).unwrap();
    assert!(d.sides.is_empty());
    assert_eq!(
        d.contains(&Point::new(q().int(100), q().ratio(1, 100)).unwrap()),
        Containment::Inside
    );
    let svg = emit_svg(&d, &SvgStyle::default());
    assert_eq!(svg.matches("<circle").count(), 1);
    assert_eq!(svg.matches("<path").count(), 0);
}

#[test]
fn domain_at_another_center() {
    let g = pair();
    let c = Point::new(q().ratio(1, 3), q().ratio(3, 2)).unwrap();
    let d = dirichlet_sides(&g, &c).unwrap();
    assert!(d.sides.iter().all(|s| s.is_oriented() && s.center == c));
    assert!(d.is_irredundant());
    // every domain of the thrice-punctured sphere has area 2π
    assert!((d.area().unwrap() - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn orbit_audit_on_the_pair() {
    let g = pair();
    let d = dirichlet_sides(&g, &Point::i(q())).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = d.sample_points(40, &mut rng);
    assert!(pts.len() > 30);
    for p in pts {
        assert!(g.reduce_to_domain(&p).unwrap().word.is_empty(), "{p}");
    }
}

#[test]
fn json_lists_sides() {
    let d = dirichlet_sides(&h(), &Point::i(q())).unwrap();
    let v = d.to_json();
    let sides = v["sides"].as_array().unwrap();
    assert_eq!(sides.len(), 2);
    assert!(sides
        .iter()
        .all(|s| s["owner_word"].as_array().unwrap().len() == 1));
    assert!(sides
        .iter()
        .any(|s| s["alpha"] == "1" && s["beta"] == "0" && s["gamma"] == "-4"));
}

#[test]
fn pair_svg_is_stable() {
    let d = dirichlet_sides(&pair(), &Point::i(q())).unwrap();
    let a = emit_svg(&d, &SvgStyle::default());
    assert_eq!(a.matches("<path").count(), 4);
    assert_eq!(a.matches("<circle").count(), 1);
    assert_eq!(
        a,
        emit_svg(
            &dirichlet_sides(&pair(), &Point::i(q())).unwrap(),
            &SvgStyle::default()
        )
    );
}

#[test]
fn cayley_ball_of_radius_two() {
    let gens: Vec<ProjectiveElement> = pair().original().to_vec();
    let ball = cayley_ball(&gens, &Point::i(q()), 2).unwrap();
    assert_eq!(ball.points.len(), 17);
    assert_eq!(ball.edges.len(), 16);
    let svg = emit_cayley_svg(&ball, &SvgStyle::default());
    assert_eq!(svg.matches("class=\"vertex\"").count(), 17);
    assert_eq!(svg.matches("<path").count(), 16);
}

#[test]
fn signatures() {
    let (classes, r) = peripheral_classes(&pair()).unwrap();
    assert_eq!(classes.len(), 3);
    assert_eq!(
        (r.genus, r.parabolic_classes, r.hyperbolic_boundary_classes),
        (Some(0), 3, 0)
    );
    assert!(!r.cocompact && !r.degenerate && r.is_consistent());

    let (classes, r) = peripheral_classes(&h()).unwrap();
    assert_eq!(classes.len(), 2);
    assert_eq!(
        (r.genus, r.parabolic_classes, r.hyperbolic_boundary_classes),
        (Some(0), 0, 2)
    );
    assert!(r.is_consistent());

    let (classes, r) = peripheral_classes(&group(&[m(q(), ["1", "2", "0", "1"])])).unwrap();
    assert_eq!(classes.len(), 2);
    assert!(r.degenerate && r.genus.is_none() && r.is_consistent());
}

#[test]
fn nielsen_sides() {
    assert!(nielsen_region_sides(&pair(), 2).unwrap().is_empty());
    let axes = nielsen_region_sides(&h(), 0).unwrap();
    assert_eq!(axes.len(), 1);
    assert!(axes[0].same_curve(&geo(q(), ["0", "1", "0"])));
    assert_eq!(nielsen_region_sides(&h(), 3).unwrap().len(), 1);
    // conjugating by a parabolic moves the axis
    let g = group(&[
        m(q(), ["3", "0", "0", "1/3"]),
        m(q(), ["5/4", "3/4", "3/4", "5/4"]),
    ]);
    let (_, r) = peripheral_classes(&g).unwrap();
    let n0 = nielsen_region_sides(&g, 0).unwrap().len();
    assert_eq!(n0, r.hyperbolic_boundary_classes.min(n0));
    assert!(nielsen_region_sides(&g, 1).unwrap().len() >= n0);
}

#[test]
fn elliptic_wedge() {
    let k = FieldSpec::new(3).unwrap();
    let c = m(k, ["r", "1", "-1", "0"]);
    let FullCertificate::Discrete(data) =
        recognize(std::slice::from_ref(&c), &FiniteIndexConfig::default()).unwrap()
    else {
        panic!("not discrete")
    };
    let d = full_group_domain(&data, &FullDomainConfig::default()).unwrap();
    assert_eq!(d.verified_depth, Some(2));
    assert_eq!(d.sides.len(), 2);
    let fixed = Point::new(
        k.element(
            crate::numberfield::rational(0, 1),
            crate::numberfield::rational(-1, 2),
        ),
        k.ratio(1, 2),
    )
    .unwrap();
    for s in &d.sides {
        assert!(s.geodesic.evaluate(&fixed).is_zero());
    }
    // brute force over all nontrivial powers agrees
    let v = Point::i(k);
    let p = c.normalize();
    let brute: Vec<(ProjectiveElement, Word)> =
        (1..6).map(|e| (p.pow(e), Word::gen(0).pow(e))).collect();
    let b = DomainDescription::from_candidates(&v, brute).unwrap();
    assert_eq!(b.sides.len(), 2);
    for s in &b.sides {
        assert!(has_side(&d, &s.geodesic));
    }
    let z = klein_to_upper(KleinPoint::from_upper(&fixed).to_f64()).unwrap();
    let angle = interior_angle(&d.sides[0].geodesic, &d.sides[1].geodesic, z);
    assert!((angle - PI / 3.0).abs() < 1e-9);
    assert!(d.free_boundary);
}

#[test]
fn trivial_full_group() {
    let FullCertificate::Discrete(data) = recognize(&[], &FiniteIndexConfig::default()).unwrap()
    else {
        panic!("not discrete")
    };
    let d = full_group_domain(&data, &FullDomainConfig::default()).unwrap();
    assert!(d.sides.is_empty());
}

#[test]
fn ball_word_counts() {
    assert_eq!(ball_words(2, 2).len(), 17);
    assert_eq!(ball_words(3, 1).len(), 7);
    assert_eq!(ball_words(0, 4).len(), 1);
}
