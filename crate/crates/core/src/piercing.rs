//! Piercing wide slabs that touch a convex polygon without crossing it.
//!
//! Given a convex polygon `K` of width `w`, every slab of width at least `w`
//! that meets `K` but does not cross it contains one of at most twelve
//! points built from `K` alone:
//!
//! * `a`, `c`: where the middle line of the minimal enclosing slab leaves `K`;
//! * `b`, `d`: the extreme vertices of `K` along the direction `a -> c`;
//! * for every boundary arc between consecutive anchors, the chord endpoints
//!   pushed `w / 2` towards the arc.
//!
//! The push runs along the normal of the minimal slab, not along the chord
//! normal: the arc then lies inside the parallelogram spanned by the chord
//! and the push, which is what the piercing argument needs. Pushing along
//! the chord normal leaves arcs with steep chords poking out of their
//! rectangle; [`Push::ChordNormal`] keeps that variant for comparison.
//!
//! Degenerate polygons are pierced by their endpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::planar::{classify_slab, extreme_points, min_width_slab, ConvexPolygon, Point2, Slab2, SlabRelation};
use crate::scalar::{Scalar, Tolerance};

/// Upper bound on the size of a piercing set.
pub const MAX_PIERCING_POINTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchors<T: Copy> {
    pub a: Point2<T>,
    pub b: Point2<T>,
    pub c: Point2<T>,
    pub d: Point2<T>,
}

/// Parallelogram over one boundary arc: chord `from -> to`, pushed by half
/// the width along `outward`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcRectangle<T: Copy> {
    pub from: Point2<T>,
    pub to: Point2<T>,
    pub outward: Point2<T>,
    pub e: Point2<T>,
    pub f: Point2<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiercingSet<T: Copy> {
    pub points: Vec<Point2<T>>,
    pub width: T,
    /// Minimal enclosing slab of `K`.
    pub slab: Slab2<T>,
    /// `None` for degenerate polygons.
    pub anchors: Option<Anchors<T>>,
    pub rectangles: Vec<ArcRectangle<T>>,
}

impl<T: Scalar> PiercingSet<T> {
    /// Whether some point lies in `s` (closed, inflated by `margin`).
    pub fn pierces(&self, s: &Slab2<T>, margin: T) -> bool {
        self.points.iter().any(|&p| s.contains(p, margin))
    }
}

fn push_unique<T: Scalar>(points: &mut Vec<Point2<T>>, p: Point2<T>, eps: T) {
    if points.iter().all(|q| q.dist(p) > eps) {
        points.push(p);
    }
}

/// Direction in which chord endpoints are pushed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Push {
    /// Along the minimal-slab normal, towards the arc.
    SlabNormal,
    /// Perpendicular to the chord, towards the arc. Not a valid piercing
    /// construction in general.
    ChordNormal,
}

/// Builds the piercing set of `k`.
pub fn piercing_points<T: Scalar>(k: &ConvexPolygon<T>, tol: Tolerance<T>) -> PiercingSet<T> {
    piercing_points_with(k, Push::SlabNormal, tol)
}

pub fn piercing_points_with<T: Scalar>(k: &ConvexPolygon<T>, push: Push, tol: Tolerance<T>) -> PiercingSet<T> {
    let (slab, width) = min_width_slab(k, tol);
    let v = k.vertices();
    if v.len() < 3 {
        return PiercingSet {
            points: v.to_vec(),
            width: T::zero(),
            slab,
            anchors: None,
            rectangles: Vec::new(),
        };
    }
    let m = v.len();
    let mid = slab.mid();

    // Boundary positions are `edge index + fraction`.
    let mut crossings: Vec<(T, Point2<T>)> = Vec::with_capacity(2);
    for i in 0..m {
        let p = v[i];
        let q = v[(i + 1) % m];
        let sp = p.dot(slab.normal) - mid;
        let sq = q.dot(slab.normal) - mid;
        if sp == T::zero() {
            crossings.push((T::lit(i as f64), p));
        } else if sp * sq < T::zero() {
            let t = sp / (sp - sq);
            crossings.push((T::lit(i as f64) + t, p + (q - p) * t));
        }
    }
    debug_assert_eq!(crossings.len(), 2, "middle line meets the boundary twice");
    let (first, second) = (crossings[0], crossings[crossings.len() - 1]);
    let (a, c) = if lex_le(first.1, second.1) {
        (first, second)
    } else {
        (second, first)
    };

    let dir = (c.1 - a.1).normalized().expect("middle chord has positive length");
    let (kmin, kmax) = k.extent(dir);
    let (bmin, dmax) = extreme_points(k, dir, tol).expect("nonzero direction");
    let vertex_pos = |p: Point2<T>| {
        let i = v.iter().position(|&x| x == p).expect("extreme point is a vertex");
        T::lit(i as f64)
    };
    let b = if a.1.dot(dir) <= kmin + tol.eps {
        a
    } else {
        (vertex_pos(bmin), bmin)
    };
    let d = if c.1.dot(dir) >= kmax - tol.eps {
        c
    } else {
        (vertex_pos(dmax), dmax)
    };

    let mut anchors = vec![a, b, c, d];
    anchors.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite positions"));
    anchors.dedup_by(|x, y| x.1.dist(y.1) <= tol.eps);
    if anchors.len() > 1 && anchors[0].1.dist(anchors[anchors.len() - 1].1) <= tol.eps {
        anchors.pop();
    }

    let mut points = Vec::with_capacity(MAX_PIERCING_POINTS);
    for &(_, p) in &anchors {
        push_unique(&mut points, p, tol.eps);
    }
    let half = width * T::half();
    let mut rectangles = Vec::new();
    let count = anchors.len();
    for idx in 0..count {
        let (sp, p) = anchors[idx];
        let (mut sq, q) = anchors[(idx + 1) % count];
        if idx + 1 == count {
            sq = sq + T::lit(m as f64);
        }
        let chain: Vec<Point2<T>> = (0..=2 * m)
            .filter(|&i| {
                let s = T::lit(i as f64);
                s > sp && s < sq
            })
            .map(|i| v[i % m])
            .collect();
        if chain.is_empty() {
            continue;
        }
        let bulge = chain[chain.len() / 2];
        let Some(mut chord_normal) = (q - p).perp().normalized() else {
            continue;
        };
        if (bulge - p).dot(chord_normal) < T::zero() {
            chord_normal = -chord_normal;
        }
        // The chord normal is the length-weighted sum of the arc's outward edge
        // normals, so its side of the midline is the arc's side.
        let outward = match push {
            Push::ChordNormal => chord_normal,
            Push::SlabNormal if chord_normal.dot(slab.normal) < T::zero() => -slab.normal,
            Push::SlabNormal => slab.normal,
        };
        let e = q + outward * half;
        let f = p + outward * half;
        push_unique(&mut points, f, tol.eps);
        push_unique(&mut points, e, tol.eps);
        rectangles.push(ArcRectangle {
            from: p,
            to: q,
            outward,
            e,
            f,
        });
    }

    PiercingSet {
        points,
        width,
        slab,
        anchors: Some(Anchors {
            a: a.1,
            b: b.1,
            c: c.1,
            d: d.1,
        }),
        rectangles,
    }
}

fn lex_le<T: Scalar>(p: Point2<T>, q: Point2<T>) -> bool {
    p.x < q.x || (p.x == q.x && p.y <= q.y)
}

/// Sampling parameters for [`verify_piercing`].
#[derive(Clone, Copy, Debug)]
pub struct SlabSampler<T: Copy> {
    pub trials: usize,
    pub seed: u64,
    /// Containment inflation when testing a point against a sampled slab.
    pub margin: T,
}

/// Samples `trials` slabs of width at least `width(K)` that meet `K` without
/// crossing it, and returns the ones containing no point of `points`.
///
/// Angles are uniform; offsets are uniform over the range where the slab
/// meets `K`. Half of the slabs have exactly the minimal width.
pub fn verify_piercing<T: Scalar>(
    k: &ConvexPolygon<T>,
    points: &[Point2<T>],
    sampler: SlabSampler<T>,
    tol: Tolerance<T>,
) -> Vec<Slab2<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let (_, w) = min_width_slab(k, tol);
    let diameter = k
        .vertices()
        .iter()
        .flat_map(|p| k.vertices().iter().map(move |q| p.dist(*q)))
        .fold(T::zero(), T::max)
        .max(T::one());
    let mut failures = Vec::new();
    let mut accepted = 0usize;
    let budget = sampler.trials.saturating_mul(1000).max(1000);
    for _ in 0..budget {
        if accepted == sampler.trials {
            break;
        }
        let theta = T::lit(rng.gen_range(0.0..std::f64::consts::PI));
        let normal = Point2::new(theta.cos(), theta.sin());
        let extra = if rng.gen_bool(0.5) {
            T::zero()
        } else {
            diameter * T::lit(rng.gen_range(0.0..2.0))
        };
        let width = w + extra;
        let (kmin, kmax) = k.extent(normal);
        let span = kmax - kmin + width;
        let lo = kmin - width + span * T::lit(rng.gen_range(0.0..=1.0));
        let slab = Slab2 {
            normal,
            lo,
            hi: lo + width,
        };
        if classify_slab(k, &slab, tol) != SlabRelation::Meets {
            continue;
        }
        accepted += 1;
        if !points.iter().any(|&p| slab.contains(p, sampler.margin)) {
            failures.push(slab);
        }
    }
    failures
}
