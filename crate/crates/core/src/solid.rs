//! Cylinders in 3-space and the pairwise predicates on them.
//!
//! A cylinder is `conv(generators) + span(direction)`. Projecting along its
//! own axis gives its cross-section polygon; projecting along any other axis
//! gives a slab. Both pairwise predicates reduce to [`crate::planar`] in the
//! frame of the second argument's axis: a fiber over a point of the
//! cross-section lies entirely inside the cylinder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::{
    classify_slab, convex_hull, crossing_margin as slab_crossing_margin, line_hits_polygon, min_width_slab,
    overlap_margin, polygons_intersect, ConvexPolygon, Point2, Slab2, SlabRelation,
};
use crate::scalar::{Scalar, Tolerance};
use crate::vec3::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cylinder3<T: Copy> {
    pub direction: Vec3<T>,
    pub generators: Vec<Vec3<T>>,
}

impl<T: Scalar> Cylinder3<T> {
    pub fn new(direction: Vec3<T>, generators: Vec<Vec3<T>>) -> Result<Self> {
        let c = Cylinder3 { direction, generators };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.direction.is_finite() || self.direction.normalized().is_none() {
            return Err(Error::ZeroDirection);
        }
        if self.generators.is_empty() {
            return Err(Error::EmptyInput);
        }
        if self.generators.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter("non-finite generator".into()));
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> Cylinder3<U> {
        Cylinder3 {
            direction: self.direction.cast(),
            generators: self.generators.iter().map(|g| g.cast()).collect(),
        }
    }

    pub fn translated(&self, by: Vec3<T>) -> Self {
        Cylinder3 {
            direction: self.direction,
            generators: self.generators.iter().map(|&g| g + by).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line3<T: Copy> {
    pub point: Vec3<T>,
    pub direction: Vec3<T>,
}

impl<T: Scalar> Line3<T> {
    pub fn new(point: Vec3<T>, direction: Vec3<T>) -> Result<Self> {
        if direction.normalized().is_none() {
            return Err(Error::ZeroDirection);
        }
        Ok(Line3 { point, direction })
    }

    pub fn translated(&self, by: Vec3<T>) -> Self {
        Line3 {
            point: self.point + by,
            direction: self.direction,
        }
    }
}

/// Orthonormal right-handed frame `(e1, e2, u)`; coordinates in the plane
/// orthogonal to `u` are taken against `e1` and `e2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame<T: Copy> {
    pub u: Vec3<T>,
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
}

impl<T: Scalar> Frame<T> {
    #[inline]
    pub fn project(&self, v: Vec3<T>) -> Point2<T> {
        Point2::new(v.dot(self.e1), v.dot(self.e2))
    }

    /// Point of the plane through the origin orthogonal to `u`.
    #[inline]
    pub fn lift(&self, p: Point2<T>) -> Vec3<T> {
        self.e1 * p.x + self.e2 * p.y
    }
}

/// Frame for axis `u`. `e1` is seeded from the coordinate axis with the
/// smallest `|component|` in `u` (lowest index on ties).
pub fn make_frame<T: Scalar>(u: Vec3<T>) -> Result<Frame<T>> {
    let u = u.normalized().ok_or(Error::ZeroDirection)?;
    let mut seed = 0;
    for i in 1..3 {
        if u.component(i).abs() < u.component(seed).abs() {
            seed = i;
        }
    }
    let a = Vec3::axis(seed);
    let e1 = (a - u * a.dot(u)).normalized().ok_or(Error::ZeroDirection)?;
    let e2 = u.cross(e1);
    Ok(Frame { u, e1, e2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shadow<T: Copy> {
    Poly(ConvexPolygon<T>),
    Slab(Slab2<T>),
}

fn parallel<T: Scalar>(a: Vec3<T>, b: Vec3<T>, tol: Tolerance<T>) -> bool {
    a.line_sine(b) <= tol.angle.sin()
}

/// Orthogonal projection of `a` onto the plane of frame `f`.
pub fn shadow<T: Scalar>(a: &Cylinder3<T>, f: &Frame<T>, tol: Tolerance<T>) -> Shadow<T> {
    let projected: Vec<Point2<T>> = a.generators.iter().map(|&g| f.project(g)).collect();
    if parallel(a.direction, f.u, tol) {
        return Shadow::Poly(convex_hull(&projected, tol).expect("generators are nonempty and finite"));
    }
    let d = f.project(a.direction);
    let normal = d
        .perp()
        .normalized()
        .expect("non-parallel direction has a planar component");
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for p in &projected {
        let s = p.dot(normal);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Shadow::Slab(Slab2 { normal, lo, hi })
}

/// A cylinder together with its own-axis frame and cross-section. The
/// pipeline evaluates O(n^2) predicates, so these are computed once.
#[derive(Clone, Debug)]
pub struct Prepared<T: Copy> {
    pub cylinder: Cylinder3<T>,
    pub frame: Frame<T>,
    pub section: ConvexPolygon<T>,
}

impl<T: Scalar> Prepared<T> {
    pub fn new(cylinder: Cylinder3<T>, tol: Tolerance<T>) -> Result<Self> {
        cylinder.validate()?;
        let frame = make_frame(cylinder.direction)?;
        let projected: Vec<Point2<T>> = cylinder.generators.iter().map(|&g| frame.project(g)).collect();
        let section = convex_hull(&projected, tol)?;
        Ok(Prepared {
            cylinder,
            frame,
            section,
        })
    }

    pub fn width(&self, tol: Tolerance<T>) -> T {
        min_width_slab(&self.section, tol).1
    }

    /// Shadow of `other` in this cylinder's frame.
    pub fn shadow_of(&self, other: &Cylinder3<T>, tol: Tolerance<T>) -> Shadow<T> {
        shadow(other, &self.frame, tol)
    }

    /// Whether `other` meets this cylinder.
    pub fn is_met_by(&self, other: &Cylinder3<T>, tol: Tolerance<T>) -> bool {
        match self.shadow_of(other, tol) {
            Shadow::Poly(k) => polygons_intersect(&k, &self.section, tol),
            Shadow::Slab(s) => classify_slab(&self.section, &s, tol) != SlabRelation::Disjoint,
        }
    }

    /// Whether `other \ self` is disconnected.
    pub fn severs(&self, other: &Cylinder3<T>, tol: Tolerance<T>) -> Result<bool> {
        match self.shadow_of(other, tol) {
            Shadow::Poly(_) => Err(Error::ParallelAxes),
            Shadow::Slab(s) => Ok(classify_slab(&self.section, &s, tol) == SlabRelation::Crosses),
        }
    }

    /// The line parallel to the axis through the lift of `p`.
    pub fn fiber(&self, p: Point2<T>) -> Line3<T> {
        Line3 {
            point: self.frame.lift(p),
            direction: self.frame.u,
        }
    }

    pub fn hit_by(&self, line: &Line3<T>, tol: Tolerance<T>) -> bool {
        let p = self.frame.project(line.point);
        if parallel(line.direction, self.frame.u, tol) {
            return self.section.contains(p, tol);
        }
        let d = self.frame.project(line.direction);
        line_hits_polygon(p, d, &self.section, tol).expect("non-parallel line has a planar component")
    }
}

pub fn intersects<T: Scalar>(a: &Cylinder3<T>, b: &Cylinder3<T>, tol: Tolerance<T>) -> Result<bool> {
    Ok(Prepared::new(b.clone(), tol)?.is_met_by(a, tol))
}

/// Whether `a \ b` is disconnected. Requires non-parallel axes.
pub fn crosses<T: Scalar>(a: &Cylinder3<T>, b: &Cylinder3<T>, tol: Tolerance<T>) -> Result<bool> {
    a.validate()?;
    Prepared::new(b.clone(), tol)?.severs(a, tol)
}

/// Signed distance from a flip of `crosses(a, b)`: positive when `b`'s
/// cross-section spans `a`'s shadow slab with that much room.
pub fn crossing_margin<T: Scalar>(a: &Cylinder3<T>, b: &Prepared<T>, tol: Tolerance<T>) -> Result<T> {
    match b.shadow_of(a, tol) {
        Shadow::Poly(_) => Err(Error::ParallelAxes),
        Shadow::Slab(s) => Ok(slab_crossing_margin(&b.section, &s)),
    }
}

/// Signed overlap of `a`'s shadow with `b`'s cross-section; positive when
/// the cylinders intersect with that much room.
pub fn intersection_margin<T: Scalar>(a: &Cylinder3<T>, b: &Prepared<T>, tol: Tolerance<T>) -> T {
    match b.shadow_of(a, tol) {
        Shadow::Slab(s) => overlap_margin(&b.section, &s),
        Shadow::Poly(k) => {
            let mut margin = T::infinity();
            for poly in [&k, &b.section] {
                for (p, q) in poly.edges() {
                    if let Some(n) = (q - p).perp().normalized() {
                        let (alo, ahi) = k.extent(n);
                        let (blo, bhi) = b.section.extent(n);
                        margin = margin.min((ahi - blo).min(bhi - alo));
                    }
                }
            }
            if margin == T::infinity() {
                -k.vertices()[0].dist(b.section.vertices()[0])
            } else {
                margin
            }
        }
    }
}

pub fn cylinder_width<T: Scalar>(a: &Cylinder3<T>, tol: Tolerance<T>) -> Result<T> {
    Ok(Prepared::new(a.clone(), tol)?.width(tol))
}

pub fn line_hits_cylinder<T: Scalar>(line: &Line3<T>, a: &Cylinder3<T>, tol: Tolerance<T>) -> Result<bool> {
    if line.direction.normalized().is_none() {
        return Err(Error::ZeroDirection);
    }
    Ok(Prepared::new(a.clone(), tol)?.hit_by(line, tol))
}
