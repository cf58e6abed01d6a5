//! Line transversals for pairwise-intersecting families of convex cylinders.
//!
//! Every family of pairwise-intersecting cylinders `conv(points) + line` in
//! 3-space admits a line meeting at least `1/28` of its members. [`solve`]
//! constructs one and recounts it against the input; [`solve_bipartite`]
//! does the same for two families whose cross pairs intersect. The planar
//! kernel ([`planar`]), the twelve-point slab piercing construction
//! ([`piercing`]) and the line cover for well-rounded bodies ([`rounded`])
//! are usable on their own.
//!
//! The geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which the generators and the command line use.
//!
//! ```
//! use stabbing::{gen_stack, solve, Branch, SolveOptions};
//!
//! let family = gen_stack(28, 2).unwrap();
//! let report = solve(&family, SolveOptions::default()).unwrap();
//! assert_eq!(report.branch, Branch::EarlyExit);
//! assert_eq!(report.hits.len(), 28);
//! ```

pub mod error;
pub mod instances;
pub mod piercing;
pub mod planar;
pub mod rounded;
pub mod scalar;
pub mod solid;
pub mod transversal;
pub mod vec3;

pub use error::{Error, Result};
pub use instances::{
    gen_common_point, gen_coplanar_lines, gen_hyperboloid, gen_pairs, gen_rounded, gen_stack, generate,
    mc_crossing_oracle, GenKind, GenSpec, Instance,
};
pub use piercing::{piercing_points, verify_piercing, SlabSampler, MAX_PIERCING_POINTS};
pub use planar::{classify_slab, convex_hull, min_width_slab, SlabRelation};
pub use rounded::{cover_lines, phi_angle, verify_cover, Precondition};
pub use scalar::{Scalar, Tolerance};
pub use solid::{crosses, cylinder_width, intersects, line_hits_cylinder, make_frame, shadow};
pub use transversal::{
    build_digraph, guarantee, perturb_directions, solve, solve_bipartite, verify_report, verify_report_bipartite,
    Branch, Digraph, Side, SolveOptions,
};

pub type Point2 = planar::Point2<f64>;
pub type Vec3 = vec3::Vec3<f64>;
pub type ConvexPolygon = planar::ConvexPolygon<f64>;
pub type Slab2 = planar::Slab2<f64>;
pub type Cylinder3 = solid::Cylinder3<f64>;
pub type Line3 = solid::Line3<f64>;
pub type Frame = solid::Frame<f64>;
pub type Shadow = solid::Shadow<f64>;
pub type PiercingSet = piercing::PiercingSet<f64>;
pub type RoundedBody = rounded::RoundedBody<f64>;
pub type LineCover = rounded::LineCover<f64>;
pub type TransversalReport = transversal::TransversalReport<f64>;
