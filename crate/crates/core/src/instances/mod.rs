//! Seeded instance generators and a sampling oracle for the crossing
//! predicate.
//!
//! All randomness comes from ChaCha8 seeded with the caller's seed, so a
//! `GenSpec` always yields the same instance on every platform. Generated
//! families keep every pairwise predicate at least [`MIN_MARGIN`] away from
//! flipping; pairs that land closer are resampled.

mod oracle;

pub use oracle::{mc_crossing_oracle, mc_slab_oracle};

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::Point2;
use crate::rounded::RoundedBody;
use crate::scalar::Tolerance;
use crate::solid::{crossing_margin, intersection_margin, make_frame, Cylinder3, Prepared};
use crate::vec3::Vec3;

type V = Vec3<f64>;
type Cyl = Cylinder3<f64>;

/// Minimum distance of every emitted predicate from its decision boundary.
pub const MIN_MARGIN: f64 = 1e-6;

/// Regeneration budget before giving up on an instance.
const MAX_RESAMPLES: usize = 10_000;

/// Budget for margin repairs; each costs a full pass over the pairs.
const MAX_PAIR_RESAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    CommonPoint,
    CoplanarLines,
    Hyperboloid,
    Stack,
    Rounded,
}

impl std::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "common-point" => GenKind::CommonPoint,
            "coplanar-lines" => GenKind::CoplanarLines,
            "hyperboloid" => GenKind::Hyperboloid,
            "stack" => GenKind::Stack,
            "rounded" => GenKind::Rounded,
            other => return Err(Error::InvalidParameter(format!("unknown generator kind {other:?}"))),
        })
    }
}

/// Generator request. Optional parameters fall back to per-kind defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    /// Family size; per side for hyperboloid instances.
    pub n: usize,
    pub seed: u64,
    /// Cross-section radius for coplanar-lines and hyperboloid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Roundness parameter for rounded instances.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Shape variety (common-point), pivot spread (coplanar-lines) or height
    /// spread (stack).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            seed,
            delta: None,
            d: None,
            jitter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Family(Vec<Cyl>),
    Bipartite(Vec<Cyl>, Vec<Cyl>),
    Rounded { d: f64, bodies: Vec<RoundedBody<f64>> },
}

pub const DEFAULT_COPLANAR_DELTA: f64 = 1e-3;
pub const DEFAULT_HYPERBOLOID_DELTA: f64 = 0.05;

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    let n = spec.n;
    match spec.kind {
        GenKind::CommonPoint => Ok(Instance::Family(
            gen_common_point_with(n, spec.seed, spec.jitter.unwrap_or(0.0))?.0,
        )),
        GenKind::CoplanarLines => Ok(Instance::Family(gen_coplanar_lines_with(
            n,
            spec.seed,
            spec.delta.unwrap_or(DEFAULT_COPLANAR_DELTA),
            spec.jitter.unwrap_or(DEFAULT_PIVOT_SPREAD),
        )?)),
        GenKind::Hyperboloid => {
            let (f, g) = gen_hyperboloid(n, spec.seed, spec.delta.unwrap_or(DEFAULT_HYPERBOLOID_DELTA))?;
            Ok(Instance::Bipartite(f, g))
        }
        GenKind::Stack => Ok(Instance::Family(gen_stack_with(
            n,
            spec.seed,
            spec.jitter.unwrap_or(0.8),
        )?)),
        GenKind::Rounded => {
            let d = spec.d.unwrap_or(2.0);
            Ok(Instance::Rounded {
                d,
                bodies: gen_rounded(n, d, spec.seed)?,
            })
        }
    }
}

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn unit_vector(rng: &mut ChaCha8Rng) -> V {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    V::new(s * phi.cos(), s * phi.sin(), z)
}

/// Convex polygon with `m` vertices on an ellipse, at stratified sorted
/// angles so no two vertices come close.
fn ellipse_polygon(rng: &mut ChaCha8Rng, m: usize, a: f64, b: f64) -> Vec<Point2<f64>> {
    let phase: f64 = rng.gen_range(0.0..TAU);
    let tilt: f64 = rng.gen_range(0.0..PI);
    let (st, ct) = tilt.sin_cos();
    (0..m)
        .map(|k| {
            let t = phase + TAU * (k as f64 + rng.gen_range(0.1..0.9)) / m as f64;
            let (x, y) = (a * t.cos(), b * t.sin());
            Point2::new(ct * x - st * y, st * x + ct * y)
        })
        .collect()
}

/// Values `lo * (1 + (rank + 0.25 + 0.5 U) / n)` over a random permutation of
/// ranks: distinct, in `[lo, 2 lo]`, pairwise at least `lo / 2n` apart.
fn stratified_radii(rng: &mut ChaCha8Rng, n: usize, lo: f64) -> Vec<f64> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(rng);
    ranks
        .into_iter()
        .map(|r| lo * (1.0 + (r as f64 + rng.gen_range(0.25..0.75)) / n as f64))
        .collect()
}

/// Distinct angles in `[0, span)` at stratified positions, in random order.
fn stratified_angles(rng: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<f64> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(rng);
    ranks
        .into_iter()
        .map(|r| span * (r as f64 + rng.gen_range(0.1..0.9)) / n as f64)
        .collect()
}

/// Regular octagon of radius `r` around `center` in the plane spanned by
/// `h` and `k`.
fn octagon(center: V, h: V, k: V, r: f64) -> Vec<V> {
    (0..8)
        .map(|j| {
            let t = PI / 4.0 * j as f64;
            center + h * (r * t.cos()) + k * (r * t.sin())
        })
        .collect()
}

/// Which pairs must intersect.
#[derive(Clone, Copy)]
enum Pairs {
    All,
    Across(usize),
}

/// First pair `(i, j)`, `i < j`, whose intersection or crossing predicate is
/// within [`MIN_MARGIN`] of flipping, or that fails to intersect.
fn first_tight_pair(family: &[Cyl], pairs: Pairs) -> Result<Option<(usize, usize)>> {
    let tol = Tolerance::default();
    let prepared: Vec<Prepared<f64>> = family
        .par_iter()
        .map(|c| Prepared::new(c.clone(), tol))
        .collect::<Result<_>>()?;
    let n = family.len();
    let checked = |i: usize, j: usize| match pairs {
        Pairs::All => true,
        Pairs::Across(s) => (i < s) != (j < s),
    };
    let tight = |a: usize, b: usize| -> bool {
        if intersection_margin(&family[a], &prepared[b], tol) < MIN_MARGIN {
            return true;
        }
        match crossing_margin(&family[a], &prepared[b], tol) {
            Ok(m) => m.abs() < MIN_MARGIN,
            Err(_) => false,
        }
    };
    Ok((0..n)
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..n)
                .find(|&j| checked(i, j) && (tight(i, j) || tight(j, i)))
                .map(|j| (i, j))
        })
        .min())
}

/// Resamples cylinder `j` of every tight pair `(i, j)` until none is left.
fn enforce_margins(
    family: &mut [Cyl],
    pairs: Pairs,
    rng: &mut ChaCha8Rng,
    mut resample: impl FnMut(usize, &mut ChaCha8Rng) -> Cyl,
) -> Result<()> {
    for _ in 0..MAX_PAIR_RESAMPLES {
        match first_tight_pair(family, pairs)? {
            None => return Ok(()),
            Some((_, j)) => family[j] = resample(j, rng),
        }
    }
    Err(Error::GenerationFailed("could not separate predicate margins".into()))
}

fn common_point_cylinder(rng: &mut ChaCha8Rng, p: V, jitter: f64) -> Cyl {
    let u = unit_vector(rng);
    let frame = make_frame(u).expect("unit vector");
    let size = 1.0 + 0.5 * jitter * rng.gen_range(-1.0..1.0);
    let aspect = 1.0 - 0.6 * jitter * rng.gen::<f64>();
    let m = rng.gen_range(12 - (8.0 * jitter).round() as usize..=12);
    let poly = ellipse_polygon(rng, m, size, size * aspect);
    // near the boundary: round sections through a near-central point cross
    // each other far more often
    let c = poly.iter().fold(Point2::new(0.0, 0.0), |acc, &v| acc + v) * (1.0 / m as f64);
    let k = rng.gen_range(0..m);
    let edge = poly[k] + (poly[(k + 1) % m] - poly[k]) * rng.gen::<f64>();
    let q = c + (edge - c) * BOUNDARY_FRACTION;
    let generators = poly
        .iter()
        .map(|&v| p + frame.lift(v - q) + frame.u * rng.gen_range(-1.0..1.0))
        .collect();
    Cylinder3 {
        direction: u,
        generators,
    }
}

/// How far from the section's center towards its boundary the hidden point
/// sits.
const BOUNDARY_FRACTION: f64 = 0.9;

/// Family of `n` cylinders through a hidden common point.
pub fn gen_common_point(n: usize, seed: u64) -> Result<Vec<Cyl>> {
    Ok(gen_common_point_with(n, seed, 0.0)?.0)
}

/// [`gen_common_point`] with explicit shape jitter in `[0, 1)`, also
/// returning the hidden point. Jitter 0 gives equal circumscribed 12-gons;
/// larger values vary size, aspect and vertex count (down to 4).
pub fn gen_common_point_with(n: usize, seed: u64, jitter: f64) -> Result<(Vec<Cyl>, V)> {
    require_n(n, 1)?;
    if !(0.0..1.0).contains(&jitter) {
        return Err(Error::InvalidParameter(format!(
            "jitter must lie in [0, 1), got {jitter}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = V::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    );
    let mut family: Vec<Cyl> = (0..n).map(|_| common_point_cylinder(&mut rng, p, jitter)).collect();
    enforce_margins(&mut family, Pairs::All, &mut rng, |_, rng| {
        common_point_cylinder(rng, p, jitter)
    })?;
    Ok((family, p))
}

/// `count` pairs of cylinders through a common point, with shapes at full
/// jitter and sizes spread over a factor of 10, keeping only pairs whose
/// `crosses` verdict and intersection are at least `margin` from flipping.
pub fn gen_pairs(count: usize, seed: u64, margin: f64) -> Result<Vec<(Cyl, Cyl)>> {
    require_positive("margin", margin)?;
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        if draws > MAX_RESAMPLES * count.max(1) {
            return Err(Error::GenerationFailed("too few pairs clear the margin".into()));
        }
        let p = V::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let pick = |rng: &mut ChaCha8Rng| {
            let c = common_point_cylinder(rng, p, 0.9);
            let s = 10f64.powf(rng.gen_range(-0.5..0.5));
            Cylinder3 {
                direction: c.direction,
                generators: c.generators.iter().map(|&g| p + (g - p) * s).collect(),
            }
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let pb = Prepared::new(b.clone(), tol)?;
        let Ok(m) = crossing_margin(&a, &pb, tol) else { continue };
        if m.abs() >= margin && intersection_margin(&a, &pb, tol) >= margin {
            out.push((a, b));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PlanarLine {
    pivot: Point2<f64>,
    theta: f64,
    radius: f64,
}

impl PlanarLine {
    fn normal(&self) -> Point2<f64> {
        Point2::new(-self.theta.sin(), self.theta.cos())
    }

    fn cylinder(&self) -> Cyl {
        let dir = V::new(self.theta.cos(), self.theta.sin(), 0.0);
        let h = V::new(-self.theta.sin(), self.theta.cos(), 0.0);
        let center = V::new(self.pivot.x, self.pivot.y, 0.0);
        Cylinder3 {
            direction: dir,
            generators: octagon(center, h, V::axis(2), self.radius),
        }
    }
}

/// Whether the strips `|<x - pivot, normal>| <= radius` of three lines share
/// a point. Any common point of the cylinders lies in all three strips.
fn strips_share_point(lines: [&PlanarLine; 3]) -> bool {
    let mut candidates = Vec::with_capacity(12);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let (la, lb) = (lines[a], lines[b]);
        let (na, nb) = (la.normal(), lb.normal());
        let det = na.cross(nb);
        if det.abs() < 1e-15 {
            continue;
        }
        for sa in [-1.0, 1.0] {
            for sb in [-1.0, 1.0] {
                let ca = na.dot(la.pivot) + sa * la.radius;
                let cb = nb.dot(lb.pivot) + sb * lb.radius;
                // solve <x, na> = ca, <x, nb> = cb
                candidates.push(Point2::new(
                    (ca * nb.y - cb * na.y) / det,
                    (na.x * cb - nb.x * ca) / det,
                ));
            }
        }
    }
    candidates.iter().any(|&x| {
        lines
            .iter()
            .all(|l| (x - l.pivot).dot(l.normal()).abs() <= l.radius + MIN_MARGIN)
    })
}

/// Whether the strips of `i`, `j` and `k` share a point, with a cheap reject
/// through the crossing point of the center lines of `i` and `j`.
fn concurrent(li: &PlanarLine, lj: &PlanarLine, lk: &PlanarLine) -> bool {
    let (ni, nj) = (li.normal(), lj.normal());
    let det = ni.cross(nj);
    if det.abs() > 1e-12 {
        let (ci, cj) = (ni.dot(li.pivot), nj.dot(lj.pivot));
        let x = Point2::new((ci * nj.y - cj * ni.y) / det, (ni.x * cj - nj.x * ci) / det);
        let reach = lk.radius + (li.radius + lj.radius) / det.abs() + MIN_MARGIN;
        if (x - lk.pivot).dot(lk.normal()).abs() > reach {
            return false;
        }
    }
    strips_share_point([li, lj, lk])
}

/// Whether `cand` forms a concurrent triple with two of `lines`, ignoring
/// index `skip`.
fn joins_triple(lines: &[PlanarLine], skip: usize, cand: &PlanarLine) -> bool {
    let n = lines.len();
    (0..n).into_par_iter().filter(|&i| i != skip).any(|i| {
        (i + 1..n)
            .filter(|&j| j != skip)
            .any(|j| concurrent(&lines[i], &lines[j], cand))
    })
}

/// First triple `(i, j, k)`, `k` largest, whose strips share a point.
#[cfg(test)]
pub(crate) fn first_concurrent_triple(lines: &[PlanarLine]) -> Option<(usize, usize, usize)> {
    let n = lines.len();
    (2..n).into_par_iter().find_map_first(|k| {
        (0..k).find_map(|i| {
            (i + 1..k)
                .find(|&j| concurrent(&lines[i], &lines[j], &lines[k]))
                .map(|j| (i, j, k))
        })
    })
}

/// Draws a pivot for `line` until it joins no concurrent triple.
fn place(lines: &[PlanarLine], skip: usize, line: &mut PlanarLine, spread: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..MAX_RESAMPLES {
        line.pivot = Point2::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread));
        if !joins_triple(lines, skip, line) {
            return Ok(());
        }
    }
    Err(Error::GenerationFailed(
        "could not avoid concurrent triples; raise the pivot spread".into(),
    ))
}

/// Default half-width of the square the coplanar pivots are drawn from.
pub const DEFAULT_PIVOT_SPREAD: f64 = 50.0;

/// Thickened coplanar lines in the plane `z = 0`.
pub fn gen_coplanar_lines(n: usize, seed: u64, delta: f64) -> Result<Vec<Cyl>> {
    gen_coplanar_lines_with(n, seed, delta, DEFAULT_PIVOT_SPREAD)
}

/// [`gen_coplanar_lines`] with pivots drawn from `[-spread, spread]^2`.
///
/// Directions are pairwise distinct; cross-section radii are distinct values
/// in `[delta, 2 delta]`, so a line is severed exactly by the thicker ones.
/// Lines are placed one at a time, each avoiding every concurrent triple
/// with the lines before it.
pub fn gen_coplanar_lines_with(n: usize, seed: u64, delta: f64, spread: f64) -> Result<Vec<Cyl>> {
    require_n(n, 1)?;
    require_positive("delta", delta)?;
    require_positive("spread", spread)?;
    if delta / (2.0 * n as f64) < MIN_MARGIN {
        return Err(Error::GenerationFailed(format!(
            "radius gaps delta / 2n fall below {MIN_MARGIN}; raise delta or lower n"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas = stratified_angles(&mut rng, n, PI);
    let radii = stratified_radii(&mut rng, n, delta);
    let mut lines: Vec<PlanarLine> = Vec::with_capacity(n);
    for i in 0..n {
        let mut line = PlanarLine {
            pivot: Point2::new(0.0, 0.0),
            theta: thetas[i],
            radius: radii[i],
        };
        place(&lines, usize::MAX, &mut line, spread, &mut rng)?;
        lines.push(line);
    }
    let mut family: Vec<Cyl> = lines.iter().map(PlanarLine::cylinder).collect();
    enforce_margins(&mut family, Pairs::All, &mut rng, |j, rng| {
        let mut line = lines[j];
        // a failed placement keeps the old pivot; the margin loop then gives up
        if place(&lines, j, &mut line, spread, rng).is_ok() {
            lines[j] = line;
        }
        lines[j].cylinder()
    })?;
    Ok(family)
}

/// Which family of rulings of `x^2 + y^2 - z^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ruling {
    F,
    G,
}

/// Point and direction of the ruling line through `(cos t, sin t, 0)`.
pub fn ruling_line(theta: f64, ruling: Ruling) -> (V, V) {
    let (s, c) = theta.sin_cos();
    let lift = match ruling {
        Ruling::F => 1.0,
        Ruling::G => -1.0,
    };
    (V::new(c, s, 0.0), V::new(-s, c, lift))
}

/// Closest points of two lines, or `None` when they are parallel.
pub fn closest_points(p: V, u: V, q: V, v: V) -> Option<(V, V)> {
    let w = p - q;
    let (a, b, c) = (u.dot(u), u.dot(v), v.dot(v));
    let (d, e) = (u.dot(w), v.dot(w));
    let den = a * c - b * b;
    if den <= 1e-14 * a * c {
        return None;
    }
    let s = (b * e - c * d) / den;
    let t = (a * e - b * d) / den;
    Some((p + u * s, q + v * t))
}

/// Largest coordinate allowed for the meeting point of two rulings.
const HYPERBOLOID_REACH: f64 = 50.0;

/// Angular range of both rulings. Opposite rulings through antipodal points
/// are parallel; keeping angles within this range keeps every meeting point
/// within a few units of the waist.
const HYPERBOLOID_SPAN: f64 = 0.9 * PI;

fn meets_well(f: (V, V), g: (V, V), delta: f64) -> bool {
    match closest_points(f.0, f.1, g.0, g.1) {
        Some((x, y)) => x.dist(y) <= delta / 2.0 && x.norm() <= HYPERBOLOID_REACH,
        None => false,
    }
}

fn thick_line((p, u): (V, V), radius: f64) -> Cyl {
    let frame = make_frame(u).expect("ruling direction is nonzero");
    Cylinder3 {
        direction: u,
        generators: octagon(p, frame.e1, frame.e2, radius),
    }
}

/// Thickened rulings of the hyperboloid of one sheet: `n` lines from each
/// family, every line of one family meeting every line of the other.
pub fn gen_hyperboloid(n_per_side: usize, seed: u64, delta: f64) -> Result<(Vec<Cyl>, Vec<Cyl>)> {
    require_n(n_per_side, 1)?;
    require_positive("delta", delta)?;
    let n = n_per_side;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tf = stratified_angles(&mut rng, n, HYPERBOLOID_SPAN);
    let mut tg = stratified_angles(&mut rng, n, HYPERBOLOID_SPAN);
    let rf = stratified_radii(&mut rng, n, delta);
    let mut rg = stratified_radii(&mut rng, n, delta);
    for k in 0..n {
        let mut tries = 0;
        while !tf
            .iter()
            .all(|&t| meets_well(ruling_line(t, Ruling::F), ruling_line(tg[k], Ruling::G), delta))
        {
            tries += 1;
            if tries > MAX_RESAMPLES {
                return Err(Error::GenerationFailed("no admissible angle for a ruling line".into()));
            }
            tg[k] = rng.gen_range(0.0..HYPERBOLOID_SPAN);
        }
    }
    let f: Vec<Cyl> = (0..n)
        .map(|i| thick_line(ruling_line(tf[i], Ruling::F), rf[i]))
        .collect();
    let g: Vec<Cyl> = (0..n)
        .map(|i| thick_line(ruling_line(tg[i], Ruling::G), rg[i]))
        .collect();
    let mut all: Vec<Cyl> = f.into_iter().chain(g).collect();
    enforce_margins(&mut all, Pairs::Across(n), &mut rng, |j, rng| {
        // only cross pairs are checked, so j always lies in g
        let k = j - n;
        rg[k] = delta * rng.gen_range(1.0..2.0);
        thick_line(ruling_line(tg[k], Ruling::G), rg[k])
    })?;
    let g = all.split_off(n);
    Ok((all, g))
}

/// Half side of the needle's square cross-section.
const NEEDLE_HALF: f64 = 0.05;

fn flat_cylinder(rng: &mut ChaCha8Rng, theta: f64, spread: f64) -> Cyl {
    let dir = V::new(theta.cos(), theta.sin(), 0.0);
    let h = V::new(-theta.sin(), theta.cos(), 0.0);
    let half_width = rng.gen_range(2.0..4.0);
    let half_height = rng.gen_range(0.2..0.6);
    let offset = rng.gen_range(-1.0..1.0);
    // the height range always contains z = 0 with room to spare
    let z = half_height * spread * rng.gen_range(-1.0..1.0);
    let generators = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(a, b)| {
            h * (offset + a * half_width) + V::axis(2) * (z + b * half_height) + dir * rng.gen_range(-1.0..1.0)
        })
        .collect();
    Cylinder3 {
        direction: dir,
        generators,
    }
}

/// A vertical needle (index 0) and `n - 1` flat horizontal cylinders that
/// all sever it.
pub fn gen_stack(n: usize, seed: u64) -> Result<Vec<Cyl>> {
    gen_stack_with(n, seed, 0.8)
}

/// [`gen_stack`] with flat heights offset by up to `spread` (in `[0, 1)`)
/// of their half-height.
pub fn gen_stack_with(n: usize, seed: u64, spread: f64) -> Result<Vec<Cyl>> {
    require_n(n, 2)?;
    if !(0.0..1.0).contains(&spread) {
        return Err(Error::InvalidParameter(format!(
            "height spread must lie in [0, 1), got {spread}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let needle = Cylinder3 {
        direction: V::axis(2),
        generators: [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(a, b)| V::new(a * NEEDLE_HALF, b * NEEDLE_HALF, 0.0))
            .collect(),
    };
    let thetas = stratified_angles(&mut rng, n - 1, PI);
    let mut family = vec![needle];
    for &t in &thetas {
        family.push(flat_cylinder(&mut rng, t, spread));
    }
    enforce_margins(&mut family, Pairs::All, &mut rng, |j, rng| {
        flat_cylinder(rng, thetas[j - 1], spread)
    })?;
    Ok(family)
}

/// `n` well-rounded bodies with inner radii in `[1, 2]` and `R / r < D`
/// (balls when `D = 1`). Every center lies inside its own outer ball around
/// the origin, so the outer balls pairwise intersect.
pub fn gen_rounded(n: usize, d: f64, seed: u64) -> Result<Vec<RoundedBody<f64>>> {
    require_n(n, 1)?;
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("D must be at least 1, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let r = rng.gen_range(1.0..2.0);
            let ratio = if d > 1.0 { rng.gen_range(1.0..d) } else { 1.0 };
            let r_outer = r * ratio;
            let reach = (r_outer - MIN_MARGIN) * rng.gen::<f64>().cbrt();
            RoundedBody {
                center: unit_vector(&mut rng) * reach,
                r,
                r_outer,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests;
