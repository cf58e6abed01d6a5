//! Planar convex-geometry kernel.
//!
//! Everything in the 3D pipeline reduces to questions about a convex polygon
//! and a slab in the plane orthogonal to some axis. Polygons are kept in a
//! canonical form (counterclockwise, starting at the lexicographically
//! smallest vertex, no collinear triples), so that every tie-break below can
//! be phrased as "lowest index" or "lexicographically smallest".

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// Serialized as a bare `[x, y]` array.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
pub struct Point2<T: Copy> {
    pub x: T,
    pub y: T,
}

impl<T: Copy> From<[T; 2]> for Point2<T> {
    fn from(a: [T; 2]) -> Self {
        Point2 { x: a[0], y: a[1] }
    }
}

impl<T: Copy> From<Point2<T>> for [T; 2] {
    fn from(p: Point2<T>) -> Self {
        [p.x, p.y]
    }
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(Point2::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lex_cmp(&self, o: &Self) -> Ordering {
        self.x
            .partial_cmp(&o.x)
            .unwrap_or(Ordering::Equal)
            .then(self.y.partial_cmp(&o.y).unwrap_or(Ordering::Equal))
    }

    pub fn cast<U: Scalar>(self) -> Point2<U> {
        Point2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point2::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

/// Signed area of the parallelogram (a - o, b - o); positive for a left turn.
#[inline]
pub fn orient<T: Scalar>(o: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    (a - o).cross(b - o)
}

/// Convex polygon in canonical form. Degenerates to a segment (two vertices)
/// or a single point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon<T: Copy> {
    vertices: Vec<Point2<T>>,
}

impl<T: Scalar> ConvexPolygon<T> {
    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false for a constructed polygon; provided for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Vertex `i` modulo the vertex count.
    #[inline]
    pub fn vertex(&self, i: usize) -> Point2<T> {
        self.vertices[i % self.vertices.len()]
    }

    /// Edges as `(start, end)` pairs in counterclockwise order. A segment has
    /// two edges (there and back), a point has none.
    pub fn edges(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        let m = self.vertices.len();
        let count = if m < 2 { 0 } else { m };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % m]))
    }

    /// Vertex average; strictly interior for polygons with three or more vertices.
    pub fn centroid(&self) -> Point2<T> {
        let m = T::lit(self.vertices.len() as f64);
        let sx: T = self.vertices.iter().map(|v| v.x).sum();
        let sy: T = self.vertices.iter().map(|v| v.y).sum();
        Point2::new(sx / m, sy / m)
    }

    /// Range of `<v, dir>` over the vertices.
    pub fn extent(&self, dir: Point2<T>) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for v in &self.vertices {
            let s = v.dot(dir);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    pub fn scaled(&self, factor: T) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> ConvexPolygon<U> {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| v.cast()).collect(),
        }
    }

    /// Closed containment with tolerance.
    pub fn contains(&self, p: Point2<T>, tol: Tolerance<T>) -> bool {
        match self.vertices.len() {
            1 => self.vertices[0].dist(p) <= tol.eps,
            2 => segment_distance(self.vertices[0], self.vertices[1], p) <= tol.eps,
            _ => self.edges().all(|(a, b)| {
                let len = (b - a).norm();
                orient(a, b, p) / len >= -tol.eps
            }),
        }
    }
}

fn segment_distance<T: Scalar>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::zero() {
        return a.dist(p);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    (a + ab * t).dist(p)
}

/// Closed slab `{ p : lo <= <p, normal> <= hi }` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slab2<T: Copy> {
    pub normal: Point2<T>,
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Slab2<T> {
    /// Builds a slab, normalizing `normal` and rescaling the offsets so the
    /// set described is unchanged.
    pub fn new(normal: Point2<T>, lo: T, hi: T) -> Result<Self> {
        let len = normal.norm();
        if !(len > T::zero()) || !len.is_finite() {
            return Err(Error::ZeroDirection);
        }
        if lo > hi {
            return Err(Error::InvalidParameter(format!("slab lo {lo} > hi {hi}")));
        }
        Ok(Slab2 {
            normal: normal * (T::one() / len),
            lo: lo / len,
            hi: hi / len,
        })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    /// Closed containment, inflated by `margin` on both sides.
    pub fn contains(&self, p: Point2<T>, margin: T) -> bool {
        let s = p.dot(self.normal);
        s >= self.lo - margin && s <= self.hi + margin
    }

    /// Offset of the middle line.
    pub fn mid(&self) -> T {
        (self.lo + self.hi) * T::half()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlabRelation {
    Disjoint,
    Meets,
    Crosses,
}

/// Convex hull in canonical form (Andrew's monotone chain).
///
/// Points within `tol.eps` of the line through their neighbours are dropped,
/// so the output is in strict convex position.
pub fn convex_hull<T: Scalar>(points: &[Point2<T>], tol: Tolerance<T>) -> Result<ConvexPolygon<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup_by(|a, b| a.dist(*b) <= tol.eps);
    if pts.len() == 1 {
        return Ok(ConvexPolygon { vertices: pts });
    }

    // `a` is redundant when it lies within eps of the chord o-b or fails to
    // turn left.
    let redundant = |o: Point2<T>, a: Point2<T>, b: Point2<T>| {
        let base = (b - o).norm();
        base <= tol.eps || orient(o, a, b) <= tol.eps * base
    };

    let mut lower: Vec<Point2<T>> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && redundant(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2<T>> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && redundant(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);

    let first = pts[0];
    let last = pts[pts.len() - 1];
    if lower.len() < 3 {
        // Everything was within eps of the segment between the extreme points.
        if first.dist(last) <= tol.eps {
            return Ok(ConvexPolygon { vertices: vec![first] });
        }
        return Ok(ConvexPolygon {
            vertices: vec![first, last],
        });
    }
    // The chain starts at the lexicographic minimum by construction.
    Ok(ConvexPolygon { vertices: lower })
}

/// Minimal-width enclosing slab via rotating calipers.
///
/// For two or more vertices the slab normal is the inward normal of the
/// minimizing edge (lowest edge index among ties). A point yields a zero-width
/// slab with normal `(0, 1)`.
pub fn min_width_slab<T: Scalar>(k: &ConvexPolygon<T>, tol: Tolerance<T>) -> (Slab2<T>, T) {
    let v = k.vertices();
    match v.len() {
        1 => {
            let n = Point2::new(T::zero(), T::one());
            let s = v[0].dot(n);
            return (
                Slab2 {
                    normal: n,
                    lo: s,
                    hi: s,
                },
                T::zero(),
            );
        }
        2 => {
            let n = (v[1] - v[0]).perp().normalized().expect("distinct segment endpoints");
            let s = v[0].dot(n);
            return (
                Slab2 {
                    normal: n,
                    lo: s,
                    hi: s,
                },
                T::zero(),
            );
        }
        _ => {}
    }
    let m = v.len();
    let height = |i: usize, j: usize| {
        let a = v[i];
        let b = v[(i + 1) % m];
        orient(a, b, v[j % m]) / (b - a).norm()
    };
    let mut best: Option<(usize, T)> = None;
    let mut j = 1usize;
    for i in 0..m {
        if j <= i {
            j = i + 1;
        }
        while height(i, j + 1) > height(i, j) {
            j += 1;
        }
        let w = height(i, j);
        match best {
            Some((_, bw)) if w >= bw - tol.eps => {}
            _ => best = Some((i, w)),
        }
    }
    let (i, w) = best.expect("polygon has edges");
    let a = v[i];
    let b = v[(i + 1) % m];
    let n = (b - a).perp().normalized().expect("nondegenerate edge");
    let lo = a.dot(n);
    (
        Slab2 {
            normal: n,
            lo,
            hi: lo + w,
        },
        w,
    )
}

/// Relation between a convex polygon and a slab under closed-set semantics.
pub fn classify_slab<T: Scalar>(k: &ConvexPolygon<T>, s: &Slab2<T>, tol: Tolerance<T>) -> SlabRelation {
    let (kmin, kmax) = k.extent(s.normal);
    if kmax < s.lo - tol.eps || kmin > s.hi + tol.eps {
        SlabRelation::Disjoint
    } else if kmin <= s.lo + tol.eps && kmax >= s.hi - tol.eps {
        SlabRelation::Crosses
    } else {
        SlabRelation::Meets
    }
}

/// Signed distance to a change of [`classify_slab`]'s crossing verdict:
/// positive when `k` spans `s` with that much room, negative otherwise.
pub fn crossing_margin<T: Scalar>(k: &ConvexPolygon<T>, s: &Slab2<T>) -> T {
    let (kmin, kmax) = k.extent(s.normal);
    (s.lo - kmin).min(kmax - s.hi)
}

/// Signed separation margin between `k` and `s`: positive when they overlap.
pub fn overlap_margin<T: Scalar>(k: &ConvexPolygon<T>, s: &Slab2<T>) -> T {
    let (kmin, kmax) = k.extent(s.normal);
    (kmax - s.lo).min(s.hi - kmin)
}

/// Vertices minimizing and maximizing `<v, d>`; ties go to the
/// lexicographically smallest vertex.
pub fn extreme_points<T: Scalar>(
    k: &ConvexPolygon<T>,
    d: Point2<T>,
    tol: Tolerance<T>,
) -> Result<(Point2<T>, Point2<T>)> {
    let d = d.normalized().ok_or(Error::ZeroDirection)?;
    let (lo, hi) = k.extent(d);
    let pick = |target: T| {
        k.vertices()
            .iter()
            .filter(|v| (v.dot(d) - target).abs() <= tol.eps)
            .min_by(|a, b| a.lex_cmp(b))
            .copied()
            .expect("extreme value attained by a vertex")
    };
    Ok((pick(lo), pick(hi)))
}

/// Whether the infinite line `p + t d` meets `k`.
pub fn line_hits_polygon<T: Scalar>(
    p: Point2<T>,
    d: Point2<T>,
    k: &ConvexPolygon<T>,
    tol: Tolerance<T>,
) -> Result<bool> {
    let n = d.normalized().ok_or(Error::ZeroDirection)?.perp();
    let (lo, hi) = k.extent(n);
    let s = p.dot(n);
    Ok(lo <= s + tol.eps && hi >= s - tol.eps)
}

/// Separating-axis test for two closed convex polygons.
pub fn polygons_intersect<T: Scalar>(a: &ConvexPolygon<T>, b: &ConvexPolygon<T>, tol: Tolerance<T>) -> bool {
    if a.is_point() {
        return b.contains(a.vertices()[0], tol);
    }
    if b.is_point() {
        return a.contains(b.vertices()[0], tol);
    }
    let mut axes = Vec::with_capacity(a.len() + b.len() + 2);
    for poly in [a, b] {
        for (p, q) in poly.edges() {
            if let Some(n) = (q - p).perp().normalized() {
                axes.push(n);
                if poly.is_segment() {
                    axes.push(n.perp());
                }
            }
        }
    }
    axes.iter().all(|&n| {
        let (alo, ahi) = a.extent(n);
        let (blo, bhi) = b.extent(n);
        ahi >= blo - tol.eps && bhi >= alo - tol.eps
    })
}
