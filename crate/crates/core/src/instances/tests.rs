use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::planar::{classify_slab, convex_hull, crossing_margin as slab_margin, overlap_margin, Slab2, SlabRelation};
use crate::rounded::{cover_lines, verify_cover, Precondition};
use crate::solid::{crosses, intersects, line_hits_cylinder, Line3};
use crate::transversal::{build_digraph, solve, verify_report, SolveOptions};

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn meets(a: &Cyl, b: &Cyl) -> bool {
    intersects(a, b, tol()).unwrap()
}

fn hits(l: &Line3<f64>, c: &Cyl) -> bool {
    line_hits_cylinder(l, c, tol()).unwrap()
}

fn all_pairs_intersect(family: &[Cyl]) -> bool {
    (0..family.len()).all(|i| (i + 1..family.len()).all(|j| meets(&family[i], &family[j])))
}

fn square(center: V, dir: V, h: f64) -> Cyl {
    let f = make_frame(dir).unwrap();
    let gens = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(a, b)| center + f.e1 * (a * h) + f.e2 * (b * h))
        .collect();
    Cylinder3::new(dir, gens).unwrap()
}

#[test]
fn common_point_examples() {
    assert_eq!(gen_common_point(1, 0).unwrap().len(), 1);
    let (family, p) = gen_common_point_with(56, 1, 0.0).unwrap();
    assert_eq!(family, gen_common_point(56, 1).unwrap());
    assert_eq!(family.len(), 56);
    assert!(all_pairs_intersect(&family));
    assert!(family.iter().all(|c| c.generators.len() == 12));
    let fiber = Line3::new(p, family[0].direction).unwrap();
    assert!(family.iter().all(|c| hits(&fiber, c)));
}

#[test]
fn common_point_jitter_range() {
    let (family, p) = gen_common_point_with(40, 3, 0.9).unwrap();
    assert!(all_pairs_intersect(&family));
    assert!(family.iter().any(|c| c.generators.len() < 12));
    let fiber = Line3::new(p, V::axis(2)).unwrap();
    assert!(family.iter().all(|c| hits(&fiber, c)));
    assert!(gen_common_point_with(4, 0, 1.0).is_err());
}

#[test]
fn coplanar_examples() {
    let two = gen_coplanar_lines(2, 0, 1e-3).unwrap();
    assert!(meets(&two[0], &two[1]));

    let family = gen_coplanar_lines(56, 4, 1e-3).unwrap();
    assert!(all_pairs_intersect(&family));
    for c in &family {
        assert!(c.direction.z.abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let n = family.len();
    let lines = coplanar_lines_of(&family);
    for _ in 0..1000 {
        let mut idx = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        idx.sort_unstable();
        if idx[0] == idx[1] || idx[1] == idx[2] {
            continue;
        }
        assert!(!strips_share_point([&lines[idx[0]], &lines[idx[1]], &lines[idx[2]]]));
    }
    assert_eq!(first_concurrent_triple(&lines), None);

    let r = solve(&family, SolveOptions::default()).unwrap();
    assert!(r.hits.len() >= 2);
    assert!(r.line.direction.z.abs() < 1e-9);
    assert!(r.line.point.z.abs() < 1e-2);
    assert!(verify_report(&family, &r, tol()));
}

/// Recovers the planar lines behind generated coplanar cylinders.
fn coplanar_lines_of(family: &[Cyl]) -> Vec<PlanarLine> {
    family
        .iter()
        .map(|c| {
            let n = c.generators.len() as f64;
            let center = c.generators.iter().fold(V::zero(), |a, &g| a + g) * (1.0 / n);
            PlanarLine {
                pivot: Point2::new(center.x, center.y),
                theta: c.direction.y.atan2(c.direction.x),
                radius: c.generators[0].dist(center),
            }
        })
        .collect()
}

#[test]
fn coplanar_rejects_tiny_gaps() {
    assert!(matches!(
        gen_coplanar_lines(1000, 0, 1e-3),
        Err(Error::GenerationFailed(_))
    ));
}

#[test]
fn concurrent_strips() {
    let line = |x: f64, y: f64, theta: f64| PlanarLine {
        pivot: Point2::new(x, y),
        theta,
        radius: 0.1,
    };
    let (a, b, c) = (line(0.0, 0.0, 0.0), line(0.0, 0.0, 1.0), line(0.0, 0.0, 2.0));
    assert!(strips_share_point([&a, &b, &c]));
    let far = line(0.0, 5.0, 2.0);
    assert!(!strips_share_point([&a, &b, &far]));
    assert!(!concurrent(&a, &b, &far));
    assert!(concurrent(&a, &b, &c));
}

#[test]
fn hyperboloid_rulings_meet() {
    let f = ruling_line(0.0, Ruling::F);
    let g = ruling_line(FRAC_PI_2, Ruling::G);
    let (x, y) = closest_points(f.0, f.1, g.0, g.1).unwrap();
    assert!(x.dist(y) < 1e-12);
    assert!((x.x * x.x + x.y * x.y - x.z * x.z - 1.0).abs() < 1e-12);
    let (fc, gc) = (thick_line(f, 0.05), thick_line(g, 0.05));
    assert!(meets(&fc, &gc));
    // antipodal opposite rulings are parallel
    let g = ruling_line(PI, Ruling::G);
    assert!(closest_points(f.0, f.1, g.0, g.1).is_none());
}

#[test]
fn hyperboloid_examples() {
    let (f, g) = gen_hyperboloid(56, 5, 0.05).unwrap();
    assert_eq!((f.len(), g.len()), (56, 56));
    for a in &f {
        for b in &g {
            assert!(meets(a, b));
        }
    }
    // same-side mates are skew: some pair is more than 2 delta apart
    let axis = |c: &Cyl| {
        let n = c.generators.len() as f64;
        (
            c.generators.iter().fold(V::zero(), |a, &p| a + p) * (1.0 / n),
            c.direction,
        )
    };
    let far = (0..f.len()).any(|i| {
        (i + 1..f.len()).any(|j| {
            let ((p, u), (q, v)) = (axis(&f[i]), axis(&f[j]));
            closest_points(p, u, q, v).is_some_and(|(x, y)| x.dist(y) > 2.0 * 0.05)
        })
    });
    assert!(far);
    assert!(f
        .iter()
        .enumerate()
        .any(|(i, a)| f[i + 1..].iter().any(|b| !meets(a, b))));
}

#[test]
fn stack_examples() {
    let two = gen_stack(2, 0).unwrap();
    assert!(crosses(&two[0], &two[1], tol()).unwrap());
    assert!(mc_crossing_oracle(&two[0], &two[1], 64, 0).unwrap());

    let family = gen_stack(28, 0).unwrap();
    assert!(all_pairs_intersect(&family));
    let g = build_digraph(&family, tol()).unwrap();
    assert_eq!(g.outdeg[0], 27);
    let r = solve(&family, SolveOptions::default()).unwrap();
    assert_eq!(r.hits.len(), 28);
    assert!(gen_stack(1, 0).is_err());
}

#[test]
fn rounded_examples() {
    assert_eq!(gen_rounded(1, 2.0, 0).unwrap().len(), 1);
    let bodies = gen_rounded(200, 2.0, 9).unwrap();
    for b in &bodies {
        assert!((1.0..=2.0).contains(&b.r));
        assert!(b.r_outer >= b.r && b.r_outer < 2.0 * b.r);
    }
    let cover = cover_lines(&bodies, 2.0, Precondition::Strict, tol()).unwrap();
    assert!(verify_cover(&bodies, &cover, tol()));

    let balls = gen_rounded(500, 1.0, 0).unwrap();
    assert!(balls.iter().all(|b| b.r == b.r_outer));
    let cover = cover_lines(&balls, 1.0, Precondition::Strict, tol()).unwrap();
    assert!(cover.directions.len() <= 32);
    assert!(gen_rounded(3, 0.5, 0).is_err());
}

#[test]
fn generators_keep_margins() {
    for family in [
        gen_common_point(30, 2).unwrap(),
        gen_coplanar_lines(30, 2, 1e-3).unwrap(),
        gen_stack(30, 2).unwrap(),
    ] {
        assert_eq!(first_tight_pair(&family, Pairs::All).unwrap(), None);
    }
    let (mut f, g) = gen_hyperboloid(20, 2, 0.05).unwrap();
    f.extend(g);
    assert_eq!(first_tight_pair(&f, Pairs::Across(20)).unwrap(), None);
}

#[test]
fn seeds_are_deterministic() {
    for kind in [
        GenKind::CommonPoint,
        GenKind::CoplanarLines,
        GenKind::Hyperboloid,
        GenKind::Stack,
        GenKind::Rounded,
    ] {
        let spec = GenSpec::new(kind, 20, 7);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = GenSpec::new(kind, 20, 8);
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }
}

#[test]
fn kind_names_round_trip() {
    for kind in [
        GenKind::CommonPoint,
        GenKind::CoplanarLines,
        GenKind::Hyperboloid,
        GenKind::Stack,
        GenKind::Rounded,
    ] {
        let name = serde_json::to_value(kind).unwrap();
        assert_eq!(name.as_str().unwrap().parse::<GenKind>().unwrap(), kind);
    }
    assert_eq!("common-point".parse::<GenKind>().unwrap(), GenKind::CommonPoint);
    assert!("cubes".parse::<GenKind>().is_err());
}

#[test]
fn oracle_examples() {
    let needle = square(V::zero(), V::axis(2), 0.05);
    let fat = square(V::zero(), V::axis(0), 2.0);
    assert!(crosses(&needle, &fat, tol()).unwrap());
    assert!(mc_crossing_oracle(&needle, &fat, 64, 0).unwrap());
    assert!(!crosses(&fat, &needle, tol()).unwrap());
    assert!(!mc_crossing_oracle(&fat, &needle, 64, 0).unwrap());

    let away = square(V::new(0.0, 0.0, 10.0), V::axis(1), 1.0);
    assert!(!meets(&fat, &away));
    assert!(!mc_crossing_oracle(&fat, &away, 64, 0).unwrap());

    assert!(matches!(
        mc_crossing_oracle(&needle, &fat, 4, 0),
        Err(Error::InsufficientResolution(_))
    ));
}

#[test]
fn oracle_agrees_on_generated_pairs() {
    let pairs = gen_pairs(40, 11, 1e-3).unwrap();
    let mut crossing = 0;
    for (k, (a, b)) in pairs.iter().enumerate() {
        let exact = crosses(a, b, tol()).unwrap();
        crossing += usize::from(exact);
        assert_eq!(mc_crossing_oracle(a, b, 48, k as u64).unwrap(), exact, "pair {k}");
    }
    assert!(crossing > 0 && crossing < pairs.len());
}

fn polygon() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 3..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slab_oracle_matches_classification(
        pts in polygon(),
        angle in 0.0..PI,
        lo in -3.0..3.0f64,
        width in 0.01..4.0f64,
        seed in 0u64..1000,
    ) {
        let pts: Vec<Point2<f64>> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
        let k = convex_hull(&pts, tol()).unwrap();
        let slab = Slab2::new(Point2::new(angle.cos(), angle.sin()), lo, lo + width).unwrap();
        prop_assume!(slab_margin(&k, &slab).abs() >= 1e-3);
        prop_assume!(overlap_margin(&k, &slab).abs() >= 1e-3);
        let exact = classify_slab(&k, &slab, tol()) == SlabRelation::Crosses;
        prop_assert_eq!(mc_slab_oracle(&k, &slab, 256, seed).unwrap(), exact);
    }
}
