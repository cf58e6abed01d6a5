//! Sampling oracle for "`A \ B` is disconnected".
//!
//! `A` is sampled by fibers (lines parallel to its axis) over a jittered
//! lattice of its cross-section, plus its vertices and points along its
//! edges. Each fiber is clipped exactly against `B`, leaving a part below
//! `B`, a part above it, or the whole fiber when it misses `B`. Parts of
//! neighboring fibers are joined when the straight segment between them, at
//! the bottom or top of a box enclosing every clipped interval, avoids `B`.
//! The oracle answers whether the resulting graph has two or more
//! components. It shares no code with the slab classification it checks.

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::planar::{convex_hull, orient, polygons_intersect, ConvexPolygon, Point2, Slab2};
use crate::scalar::Tolerance;
use crate::solid::{Cylinder3, Prepared};
use crate::vec3::Vec3;

/// Fewest kept fibers the oracle will decide on.
const MIN_SAMPLES: usize = 100;

/// Extra samples are joined to this many nearest kept samples.
const EXTRA_NEIGHBORS: usize = 3;

#[derive(Clone, Copy, Debug)]
enum Clip {
    Miss,
    Interval(f64, f64),
    /// The whole fiber lies inside the removed set.
    Full,
}

/// Parameter interval where `q + t d` lies in `k`.
fn clip_line(q: Point2<f64>, d: Point2<f64>, k: &ConvexPolygon<f64>, eps: f64) -> Clip {
    let v = k.vertices();
    let dd = d.dot(d);
    if dd <= 1e-30 {
        return if k.contains(q, Tolerance::new(eps)) {
            Clip::Full
        } else {
            Clip::Miss
        };
    }
    match v.len() {
        1 => {
            let t = (v[0] - q).dot(d) / dd;
            if (q + d * t).dist(v[0]) <= eps {
                Clip::Interval(t, t)
            } else {
                Clip::Miss
            }
        }
        2 => {
            let e = v[1] - v[0];
            let den = d.cross(e);
            if den.abs() <= 1e-15 * d.norm() * e.norm() {
                // parallel: on the segment's line or not
                if (q - v[0]).cross(e).abs() / e.norm() > eps {
                    return Clip::Miss;
                }
                let (t0, t1) = ((v[0] - q).dot(d) / dd, (v[1] - q).dot(d) / dd);
                return Clip::Interval(t0.min(t1), t0.max(t1));
            }
            // q + t d = v0 + s e
            let w = v[0] - q;
            let t = w.cross(e) / den;
            let s = w.cross(d) / den;
            let slack = eps / e.norm();
            if (-slack..=1.0 + slack).contains(&s) {
                Clip::Interval(t, t)
            } else {
                Clip::Miss
            }
        }
        _ => {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (a, b) in k.edges() {
                let len = (b - a).norm();
                let c0 = orient(a, b, q) / len + eps;
                let c1 = (b - a).cross(d) / len;
                if c1.abs() <= 1e-15 {
                    if c0 < 0.0 {
                        return Clip::Miss;
                    }
                } else if c1 > 0.0 {
                    lo = lo.max(-c0 / c1);
                } else {
                    hi = hi.min(-c0 / c1);
                }
            }
            if lo <= hi {
                Clip::Interval(lo, hi)
            } else {
                Clip::Miss
            }
        }
    }
}

/// Node ids of one fiber's surviving parts.
#[derive(Clone, Copy, Debug)]
enum Parts {
    Whole(usize),
    Split { below: usize, above: usize },
    Gone,
}

/// Generic fiber graph: fibers `p + t dir` over 2D base points, removed set
/// tested by `blocks` on segments `(x, y)` at a common height.
struct FiberGraph {
    parts: Vec<Parts>,
    nodes: usize,
    t_min: f64,
    t_max: f64,
}

impl FiberGraph {
    fn new(clips: &[Clip], spread: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in clips {
            if let Clip::Interval(a, b) = *c {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if lo > hi {
            lo = -1.0;
            hi = 1.0;
        }
        let mut nodes = 0;
        let mut fresh = || {
            nodes += 1;
            nodes - 1
        };
        let parts = clips
            .iter()
            .map(|c| match c {
                Clip::Miss => Parts::Whole(fresh()),
                Clip::Interval(..) => Parts::Split {
                    below: fresh(),
                    above: fresh(),
                },
                Clip::Full => Parts::Gone,
            })
            .collect();
        FiberGraph {
            parts,
            nodes,
            t_min: lo - spread,
            t_max: hi + spread,
        }
    }

    fn bottom(p: Parts) -> Option<usize> {
        match p {
            Parts::Whole(n) => Some(n),
            Parts::Split { below, .. } => Some(below),
            Parts::Gone => None,
        }
    }

    fn top(p: Parts) -> Option<usize> {
        match p {
            Parts::Whole(n) => Some(n),
            Parts::Split { above, .. } => Some(above),
            Parts::Gone => None,
        }
    }

    /// Joins the parts of fibers `f` and `g` reachable by a straight segment
    /// at the bottom or the top of the box.
    fn link(&self, uf: &mut UnionFind<usize>, f: usize, g: usize, free_at: impl Fn(f64) -> bool) {
        let (pf, pg) = (self.parts[f], self.parts[g]);
        for (height, pick) in [
            (self.t_min, Self::bottom as fn(Parts) -> Option<usize>),
            (self.t_max, Self::top),
        ] {
            if let (Some(a), Some(b)) = (pick(pf), pick(pg)) {
                if free_at(height) {
                    uf.union(a, b);
                }
            }
        }
    }

    fn components(&self, uf: &mut UnionFind<usize>) -> usize {
        let mut roots: Vec<usize> = (0..self.nodes).map(|i| uf.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

fn segment_polygon(a: Point2<f64>, b: Point2<f64>, tol: Tolerance<f64>) -> ConvexPolygon<f64> {
    convex_hull(&[a, b], tol).expect("two finite points")
}

/// Whether `A \ B` is disconnected, decided by sampling `A`'s fibers on a
/// `resolution x resolution` lattice.
pub fn mc_crossing_oracle(a: &Cylinder3<f64>, b: &Cylinder3<f64>, resolution: usize, seed: u64) -> Result<bool> {
    let tol = Tolerance::default();
    let pa = Prepared::new(a.clone(), tol)?;
    let pb = Prepared::new(b.clone(), tol)?;
    let ka = &pa.section;
    let kb = &pb.section;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (x0, x1) = ka.extent(Point2::new(1.0, 0.0));
    let (y0, y1) = ka.extent(Point2::new(0.0, 1.0));
    let res = resolution.max(1);
    let (dx, dy) = ((x1 - x0) / res as f64, (y1 - y0) / res as f64);
    let mut base: Vec<Point2<f64>> = Vec::new();
    let mut grid = vec![None; res * res];
    for ix in 0..res {
        for iy in 0..res {
            let p = Point2::new(
                x0 + dx * (ix as f64 + rng.gen_range(0.1..0.9)),
                y0 + dy * (iy as f64 + rng.gen_range(0.1..0.9)),
            );
            if ka.contains(p, tol) {
                grid[ix * res + iy] = Some(base.len());
                base.push(p);
            }
        }
    }
    let lattice = base.len();
    base.extend_from_slice(ka.vertices());
    for (p, q) in ka.edges() {
        for k in 0..res {
            base.push(p + (q - p) * ((k as f64 + rng.gen_range(0.1..0.9)) / res as f64));
        }
    }
    if base.len() < MIN_SAMPLES {
        return Err(Error::InsufficientResolution(base.len()));
    }

    let lift = |p: Point2<f64>| pa.frame.lift(p);
    let u: Vec3<f64> = pa.frame.u;
    let du = pb.frame.project(u);
    let clips: Vec<Clip> = base
        .iter()
        .map(|&p| clip_line(pb.frame.project(lift(p)), du, kb, tol.eps))
        .collect();
    let diameter = kb
        .vertices()
        .iter()
        .flat_map(|p| kb.vertices().iter().map(move |q| p.dist(*q)))
        .fold(0.0, f64::max)
        .max(1.0);
    let graph = FiberGraph::new(&clips, 3.0 * diameter);
    let mut uf = UnionFind::new(graph.nodes);
    let free = |f: usize, g: usize, t: f64| {
        let s = segment_polygon(
            pb.frame.project(lift(base[f]) + u * t),
            pb.frame.project(lift(base[g]) + u * t),
            tol,
        );
        !polygons_intersect(&s, kb, tol)
    };
    for ix in 0..res {
        for iy in 0..res {
            let Some(f) = grid[ix * res + iy] else { continue };
            let right = (ix + 1 < res).then(|| grid[(ix + 1) * res + iy]).flatten();
            let up = (iy + 1 < res).then(|| grid[ix * res + iy + 1]).flatten();
            for g in [right, up].into_iter().flatten() {
                graph.link(&mut uf, f, g, |t| free(f, g, t));
            }
        }
    }
    for f in lattice..base.len() {
        let mut near: Vec<(f64, usize)> = (0..base.len())
            .filter(|&g| g != f)
            .map(|g| (base[f].dist(base[g]), g))
            .collect();
        let k = EXTRA_NEIGHBORS.min(near.len());
        if k == 0 {
            continue;
        }
        near.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, g) in &near[..k] {
            graph.link(&mut uf, f, g, |t| free(f, g, t));
        }
    }
    Ok(graph.components(&mut uf) >= 2)
}

/// Planar counterpart: whether `S \ K` is disconnected, sampling lines of
/// the slab parallel to its boundary at `resolution` jittered offsets plus
/// both boundary lines.
pub fn mc_slab_oracle(k: &ConvexPolygon<f64>, s: &Slab2<f64>, resolution: usize, seed: u64) -> Result<bool> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.normal;
    let d = n.perp();
    let mut offsets = vec![s.lo];
    for i in 0..resolution {
        offsets.push(s.lo + s.width() * (i as f64 + rng.gen_range(0.1..0.9)) / resolution as f64);
    }
    offsets.push(s.hi);
    if offsets.len() < MIN_SAMPLES {
        return Err(Error::InsufficientResolution(offsets.len()));
    }
    let clips: Vec<Clip> = offsets.iter().map(|&o| clip_line(n * o, d, k, tol.eps)).collect();
    let diameter = k
        .vertices()
        .iter()
        .flat_map(|p| k.vertices().iter().map(move |q| p.dist(*q)))
        .fold(0.0, f64::max)
        .max(1.0);
    let graph = FiberGraph::new(&clips, 3.0 * diameter);
    let mut uf = UnionFind::new(graph.nodes);
    for f in 0..offsets.len() - 1 {
        let g = f + 1;
        graph.link(&mut uf, f, g, |t| {
            let seg = segment_polygon(n * offsets[f] + d * t, n * offsets[g] + d * t, tol);
            !polygons_intersect(&seg, k, tol)
        });
    }
    Ok(graph.components(&mut uf) >= 2)
}
