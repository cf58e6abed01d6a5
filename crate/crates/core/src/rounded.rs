//! Line covers for pairwise-intersecting families of well-rounded bodies.
//!
//! A body is well-rounded with parameter `D` when it is sandwiched between
//! concentric balls of radii `r <= R <= D r`. Taking the body with the
//! smallest inner ball as the origin, a line through the origin within angle
//! `arcsin(1 / 2D)` of a body's center passes within `r` of that center, so
//! it meets the body. Greedily netting the center directions at that angle
//! gives pairwise separated directions, hence at most `32 D^2` lines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundedBody<T: Copy> {
    pub center: Vec3<T>,
    /// Inner radius.
    pub r: T,
    /// Outer radius.
    #[serde(rename = "R")]
    pub r_outer: T,
}

impl<T: Scalar> RoundedBody<T> {
    pub fn new(center: Vec3<T>, r: T, r_outer: T) -> Result<Self> {
        let b = RoundedBody { center, r, r_outer };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() || !self.r.is_finite() || !self.r_outer.is_finite() {
            return Err(Error::InvalidParameter("non-finite body".into()));
        }
        if !(self.r > T::zero()) || self.r_outer < self.r {
            return Err(Error::InvalidParameter("radii must satisfy 0 < r <= R".into()));
        }
        Ok(())
    }
}

/// How the distance between a body and the reference body is checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precondition {
    /// The outer balls must meet the reference body's `D r0` ball:
    /// `|a - a0| <= D r0 + R`.
    #[default]
    Strict,
    /// Only the bound the covering argument needs: `|a - a0| <= 2 r D`.
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineCover<T: Copy> {
    pub origin: Vec3<T>,
    /// Unit directions of the lines through `origin`.
    pub directions: Vec<Vec3<T>>,
    /// Index into `directions` for every body.
    pub assignment: Vec<usize>,
    pub phi: T,
    #[serde(rename = "D")]
    pub d: T,
}

/// `arcsin(1 / 2D)`.
pub fn phi_angle<T: Scalar>(d: T) -> Result<T> {
    if !(d >= T::one()) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("D must be at least 1, got {d}")));
    }
    Ok((T::one() / (T::two() * d)).asin())
}

/// The stated bound `32 D^2` on the number of lines.
pub fn line_bound<T: Scalar>(d: T) -> T {
    T::lit(32.0) * d * d
}

/// Count bound from cap packing, `2 / sin^2(phi / 2)`; never above
/// [`line_bound`].
pub fn cap_bound<T: Scalar>(d: T) -> Result<T> {
    let s = (phi_angle(d)? * T::half()).sin();
    Ok(T::two() / (s * s))
}

/// Covers `bodies` by lines through the center of the body with the
/// smallest inner radius.
pub fn cover_lines<T: Scalar>(
    bodies: &[RoundedBody<T>],
    d: T,
    pre: Precondition,
    tol: Tolerance<T>,
) -> Result<LineCover<T>> {
    if bodies.is_empty() {
        return Err(Error::EmptyInput);
    }
    let phi = phi_angle(d)?;
    for (i, b) in bodies.iter().enumerate() {
        b.validate()?;
        if b.r_outer > d * b.r + tol.eps {
            return Err(Error::NotWellRounded(i));
        }
    }
    let mut origin_idx = 0;
    for (i, b) in bodies.iter().enumerate() {
        if b.r < bodies[origin_idx].r {
            origin_idx = i;
        }
    }
    let origin = bodies[origin_idx].center;
    let r0 = bodies[origin_idx].r;
    for (i, b) in bodies.iter().enumerate() {
        let reach = match pre {
            Precondition::Strict => d * r0 + b.r_outer,
            Precondition::Lenient => T::two() * b.r * d,
        };
        if (b.center - origin).norm() > reach + tol.eps {
            return Err(Error::NotPairwiseIntersectable(i));
        }
    }

    let cos_phi = phi.cos();
    let mut directions: Vec<Vec3<T>> = Vec::new();
    let mut assignment = vec![0; bodies.len()];
    for (i, b) in bodies.iter().enumerate() {
        let v = b.center - origin;
        if v.norm() <= tol.eps {
            continue;
        }
        let v = v.normalized().ok_or(Error::ZeroDirection)?;
        match directions.iter().position(|u| u.dot(v).abs() >= cos_phi) {
            Some(j) => assignment[i] = j,
            None => {
                assignment[i] = directions.len();
                directions.push(v);
            }
        }
    }
    if directions.is_empty() {
        directions.push(Vec3::axis(2));
    }
    if T::lit(directions.len() as f64) > line_bound(d) {
        return Err(Error::InvariantViolated(format!(
            "{} lines exceed the bound {}",
            directions.len(),
            line_bound(d)
        )));
    }
    Ok(LineCover {
        origin,
        directions,
        assignment,
        phi,
        d,
    })
}

/// Distance from `p` to the line through `origin` along unit `u`.
pub fn distance_to_line<T: Scalar>(p: Vec3<T>, origin: Vec3<T>, u: Vec3<T>) -> T {
    let v = p - origin;
    (v - u * v.dot(u)).norm()
}

/// Checks that every inner ball meets its assigned line, the line count is
/// within `32 D^2`, and the directions are pairwise more than `phi` apart.
pub fn verify_cover<T: Scalar>(bodies: &[RoundedBody<T>], cover: &LineCover<T>, tol: Tolerance<T>) -> bool {
    if cover.assignment.len() != bodies.len() || cover.directions.is_empty() {
        return false;
    }
    if T::lit(cover.directions.len() as f64) > line_bound(cover.d) {
        return false;
    }
    let Ok(phi) = phi_angle(cover.d) else {
        return false;
    };
    if cover
        .directions
        .iter()
        .any(|u| !u.is_finite() || (u.norm() - T::one()).abs() > tol.eps)
    {
        return false;
    }
    for (i, u) in cover.directions.iter().enumerate() {
        for v in &cover.directions[i + 1..] {
            if u.line_angle(*v) <= phi - tol.eps {
                return false;
            }
        }
    }
    bodies.iter().zip(&cover.assignment).all(|(b, &j)| {
        j < cover.directions.len() && distance_to_line(b.center, cover.origin, cover.directions[j]) <= b.r + tol.eps
    })
}
