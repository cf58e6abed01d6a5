//! Line transversals for pairwise-intersecting cylinder families.
//!
//! The solver builds the crossing digraph (`i -> j` when `A_i \ A_j` is
//! disconnected) and takes one of two routes:
//!
//! * some cylinder is crossed out of many others: any line inside it hits
//!   all of them, so its fiber through the centroid of its cross-section is
//!   returned;
//! * otherwise the narrowest cylinder `C` with small indegree is chosen, the
//!   survivors are projected along `C`'s axis to slabs that meet but do not
//!   cross `C`'s cross-section `K`, and the piercing points of `K` are lifted
//!   back to lines parallel to `C`.
//!
//! Either way every candidate line is recounted against the original input.
//! Parallel axes are separated first by a tiny deterministic rotation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piercing::{piercing_points, PiercingSet, MAX_PIERCING_POINTS};
use crate::planar::{classify_slab, Slab2, SlabRelation};
use crate::scalar::{Scalar, Tolerance};
use crate::solid::{make_frame, Cylinder3, Line3, Prepared, Shadow};
use crate::vec3::Vec3;

/// Denominator of the guaranteed hit fraction.
pub const ALPHA_INV: usize = 28;

/// Minimum hit count promised for a family of `n` cylinders.
pub fn guarantee(n: usize) -> usize {
    (n / ALPHA_INV).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub n: usize,
    /// Sorted `(i, j)` pairs, `i -> j` meaning `A_i \ A_j` is disconnected.
    pub arcs: Vec<(usize, usize)>,
    pub outdeg: Vec<usize>,
    pub indeg: Vec<usize>,
}

impl Digraph {
    fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut arcs = Vec::new();
        let mut outdeg = vec![0; n];
        let mut indeg = vec![0; n];
        for (i, row) in rows.into_iter().enumerate() {
            outdeg[i] = row.len();
            for j in row {
                indeg[j] += 1;
                arcs.push((i, j));
            }
        }
        Digraph { n, arcs, outdeg, indeg }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    EarlyExit,
    PlanarPiercing,
    DegenerateSegment,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::EarlyExit => "EarlyExit",
            Branch::PlanarPiercing => "PlanarPiercing",
            Branch::DegenerateSegment => "DegenerateSegment",
        })
    }
}

/// Which family of a bipartite instance the guarantee refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    F,
    G,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::F => "f",
            Side::G => "g",
        })
    }
}

/// Piercing points used by the planar branch, with the number of projected
/// slabs containing each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiercingRecord<T: Copy> {
    pub set: PiercingSet<T>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation<T: Copy> {
    pub seed: u64,
    pub magnitude: T,
    /// Rotation angle applied to each axis, in radians.
    pub deltas: Vec<T>,
}

/// Quantities the planar branch is required to satisfy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats<T: Copy> {
    pub n: usize,
    pub arcs: usize,
    pub max_outdeg: usize,
    /// Size of the low-indegree subfamily (planar branch only).
    pub f_prime: Option<usize>,
    /// Survivors after removing the cylinders crossed out of `C`, `C`
    /// included for single families.
    pub f_star: Option<usize>,
    pub slabs: Option<usize>,
    /// `min slab width - width(C)`.
    pub width_slack: Option<T>,
    pub max_piercing_count: Option<usize>,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalReport<T: Copy> {
    pub branch: Branch,
    pub line: Line3<T>,
    /// Sorted indices of hit cylinders in the original input. For bipartite
    /// input the indices run over `f` followed by `g`.
    pub hits: Vec<usize>,
    pub pivot: usize,
    pub piercing: Option<PiercingRecord<T>>,
    pub perturbation: Option<Perturbation<T>>,
    pub side: Option<Side>,
    pub stats: SolveStats<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T: Copy> {
    pub seed: u64,
    /// Initial rotation magnitude for separating parallel axes, radians.
    pub perturb: T,
    pub tol: Tolerance<T>,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub jobs: usize,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            perturb: T::lit(1e-7),
            tol: Tolerance::default(),
            jobs: 0,
        }
    }
}

/// Runs `f` on a pool of `jobs` threads, or on the ambient pool if `jobs`
/// is 0.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn is_parallel<T: Scalar>(a: Vec3<T>, b: Vec3<T>, tol: Tolerance<T>) -> bool {
    a.line_sine(b) <= tol.angle.sin()
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const PERTURB_ATTEMPTS: u32 = 8;
const PERTURB_MAX_FACTOR: u32 = 16;

/// Separates parallel axis directions.
///
/// Cylinders are grouped by parallel axes; the first member of each group is
/// left alone and the others are tilted by at most `magnitude` on a
/// sunflower pattern around it, with a seeded phase. If the result still
/// has parallel pairs the magnitude is doubled, up to 16 times the
/// original, over at most 8 attempts.
pub fn perturb_directions<T: Scalar>(
    family: &[Cylinder3<T>],
    seed: u64,
    magnitude: T,
    tol: Tolerance<T>,
) -> Result<(Vec<Cylinder3<T>>, Vec<T>)> {
    if !(magnitude > T::zero()) {
        return Err(Error::InvalidParameter(
            "perturbation magnitude must be positive".into(),
        ));
    }
    for c in family {
        c.validate()?;
    }
    let mut leaders: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, c) in family.iter().enumerate() {
        match leaders
            .iter()
            .position(|&l| is_parallel(family[l].direction, c.direction, tol))
        {
            Some(g) => groups[g].push(i),
            None => {
                leaders.push(i);
                groups.push(vec![i]);
            }
        }
    }
    if groups.iter().all(|g| g.len() == 1) {
        return Ok((family.to_vec(), vec![T::zero(); family.len()]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..PERTURB_ATTEMPTS {
        let factor = T::lit(f64::from(2u32.pow(attempt).min(PERTURB_MAX_FACTOR)));
        let radius = magnitude * factor;
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut out = family.to_vec();
        let mut deltas = vec![T::zero(); family.len()];
        for group in groups.iter().filter(|g| g.len() > 1) {
            let lead = family[group[0]].direction.normalized().ok_or(Error::ZeroDirection)?;
            let frame = make_frame(lead)?;
            let m = group.len() - 1;
            for (k, &i) in group.iter().enumerate().skip(1) {
                let r = radius * T::lit((k as f64 / m as f64).sqrt());
                let psi = T::lit(phase + GOLDEN_ANGLE * k as f64);
                let tilt = frame.e1 * psi.cos() + frame.e2 * psi.sin();
                let mut dir = lead * r.cos() + tilt * r.sin();
                if family[i].direction.dot(lead) < T::zero() {
                    dir = -dir;
                }
                out[i].direction = dir;
                deltas[i] = r;
            }
        }
        if pairwise_non_parallel(&out, tol) {
            return Ok((out, deltas));
        }
    }
    Err(Error::PerturbationFailed)
}

fn pairwise_non_parallel<T: Scalar>(family: &[Cylinder3<T>], tol: Tolerance<T>) -> bool {
    (0..family.len()).into_par_iter().all(|i| {
        family[i + 1..]
            .iter()
            .all(|b| !is_parallel(family[i].direction, b.direction, tol))
    })
}

fn prepare_all<T: Scalar>(family: &[Cylinder3<T>], tol: Tolerance<T>) -> Result<Vec<Prepared<T>>> {
    family.par_iter().map(|c| Prepared::new(c.clone(), tol)).collect()
}

/// Crossing digraph restricted to pairs accepted by `linked`.
fn digraph_of<T: Scalar>(
    prepared: &[Prepared<T>],
    linked: impl Fn(usize, usize) -> bool + Sync,
    tol: Tolerance<T>,
) -> Result<Digraph> {
    let rows: Result<Vec<Vec<usize>>> = (0..prepared.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for (j, b) in prepared.iter().enumerate() {
                if i != j && linked(i, j) && b.severs(&prepared[i].cylinder, tol)? {
                    row.push(j);
                }
            }
            Ok(row)
        })
        .collect();
    Ok(Digraph::from_rows(rows?))
}

/// Crossing digraph of a family with pairwise non-parallel axes.
pub fn build_digraph<T: Scalar>(family: &[Cylinder3<T>], tol: Tolerance<T>) -> Result<Digraph> {
    digraph_of(&prepare_all(family, tol)?, |_, _| true, tol)
}

/// Crossing digraph on `f` followed by `g`, with arcs only between the two.
pub fn build_bipartite_digraph<T: Scalar>(
    f: &[Cylinder3<T>],
    g: &[Cylinder3<T>],
    tol: Tolerance<T>,
) -> Result<Digraph> {
    let all: Vec<Cylinder3<T>> = f.iter().chain(g).cloned().collect();
    let nf = f.len();
    digraph_of(&prepare_all(&all, tol)?, |i, j| (i < nf) != (j < nf), tol)
}

/// First non-intersecting pair `(i, j)` with `i` in `0..split` and `j` in
/// `split..`, or with `i < j` overall when `split` is `None`.
fn first_disjoint_pair<T: Scalar>(
    prepared: &[Prepared<T>],
    split: Option<usize>,
    tol: Tolerance<T>,
) -> Option<(usize, usize)> {
    let n = prepared.len();
    let rows = match split {
        Some(s) => 0..s,
        None => 0..n,
    };
    rows.into_par_iter()
        .filter_map(|i| {
            let start = split.unwrap_or(i + 1);
            (start..n)
                .find(|&j| !prepared[j].is_met_by(&prepared[i].cylinder, tol))
                .map(|j| (i, j))
        })
        .min()
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Class structure of an instance: one class, or `f` and `g`.
#[derive(Clone, Copy)]
struct Classes {
    split: Option<usize>,
    n: usize,
}

impl Classes {
    fn class(&self, i: usize) -> usize {
        match self.split {
            Some(s) if i >= s => 1,
            _ => 0,
        }
    }

    fn size(&self, class: usize) -> usize {
        match self.split {
            None => self.n,
            Some(s) if class == 0 => s,
            Some(s) => self.n - s,
        }
    }

    /// Size of the class whose members can be crossed out of `i`.
    fn opposite_size(&self, i: usize) -> usize {
        match self.split {
            None => self.n,
            Some(_) => self.size(1 - self.class(i)),
        }
    }

    fn linked(&self, i: usize, j: usize) -> bool {
        self.split.is_none() || self.class(i) != self.class(j)
    }

    fn side(&self, class: usize) -> Option<Side> {
        self.split.map(|_| if class == 0 { Side::F } else { Side::G })
    }

    fn members(&self, class: usize) -> std::ops::Range<usize> {
        match self.split {
            None => 0..self.n,
            Some(s) if class == 0 => 0..s,
            Some(s) => s..self.n,
        }
    }
}

struct Outcome<T: Copy> {
    branch: Branch,
    pivot: usize,
    candidates: Vec<Line3<T>>,
    piercing: Option<PiercingRecord<T>>,
    /// Class on which the guarantee is counted.
    guarantee_class: usize,
    stats: SolveStats<T>,
}

fn violated<T>(what: impl Into<String>) -> Result<T> {
    Err(Error::InvariantViolated(what.into()))
}

/// One pass of the pipeline on a family with pairwise non-parallel axes.
fn pipeline<T: Scalar>(prepared: &[Prepared<T>], classes: Classes, tol: Tolerance<T>) -> Result<Outcome<T>> {
    let n = prepared.len();
    let graph = digraph_of(prepared, |i, j| classes.linked(i, j), tol)?;
    let mut stats = SolveStats {
        n,
        arcs: graph.arcs.len(),
        max_outdeg: graph.outdeg.iter().copied().max().unwrap_or(0),
        ..SolveStats::default()
    };

    // Early exit: a cylinder crossed out of enough others.
    let mut pivot: Option<usize> = None;
    for i in 0..n {
        let other = classes.opposite_size(i);
        let qualifies = ALPHA_INV * graph.outdeg[i] >= other || (n == 1);
        if qualifies && pivot.is_none_or(|p| graph.outdeg[i] > graph.outdeg[p]) {
            pivot = Some(i);
        }
    }
    if let Some(p) = pivot {
        let a = &prepared[p];
        let line = a.fiber(a.section.centroid());
        let guarantee_class = match classes.split {
            None => 0,
            Some(_) => 1 - classes.class(p),
        };
        return Ok(Outcome {
            branch: Branch::EarlyExit,
            pivot: p,
            candidates: vec![line],
            piercing: None,
            guarantee_class,
            stats,
        });
    }

    // Every outdegree is below a 28th of the opposite class, so the arcs
    // are fewer than a 28th of the linked pairs.
    let linked: usize = (0..n).map(|i| classes.opposite_size(i)).sum();
    if ALPHA_INV * graph.arcs.len() >= linked {
        return violated(format!("{} arcs after the early exit failed", graph.arcs.len()));
    }

    // Low-indegree subfamily and its narrowest member.
    let low: Vec<usize> = (0..n)
        .filter(|&i| (ALPHA_INV / 2) * graph.indeg[i] <= classes.opposite_size(i))
        .collect();
    for class in 0..if classes.split.is_some() { 2 } else { 1 } {
        let members = low.iter().filter(|&&i| classes.class(i) == class).count();
        if members < ceil_div(classes.size(class), 2) {
            return violated(format!(
                "low-indegree subfamily has {members} of {} members",
                classes.size(class)
            ));
        }
    }
    stats.f_prime = Some(low.len());
    let widths: Vec<T> = low.par_iter().map(|&i| prepared[i].width(tol)).collect();
    let mut best = 0;
    for (k, &w) in widths.iter().enumerate() {
        if w < widths[best] {
            best = k;
        }
    }
    let c = low[best];
    let width_c = widths[best];
    let cyl_c = &prepared[c];

    // Survivors: not crossed out of C; for bipartite input only the class
    // opposite to C.
    let target_class = match classes.split {
        None => 0,
        Some(_) => 1 - classes.class(c),
    };
    let crossed_into_c: Vec<bool> = {
        let mut v = vec![false; n];
        for &(i, j) in &graph.arcs {
            if j == c {
                v[i] = true;
            }
        }
        v
    };
    let survivors: Vec<usize> = low
        .iter()
        .copied()
        .filter(|&i| classes.class(i) == target_class && !crossed_into_c[i])
        .collect();
    let f_star = survivors.len() + usize::from(classes.split.is_some());
    let n_target = classes.size(target_class);
    let survivors_required = match classes.split {
        // |F*| > 3n/7 - 1
        None => 7 * f_star + 7 > 3 * n_target,
        // survivors from the opposite class, C excluded: > 3n/7 - 1
        Some(_) => 7 * survivors.len() + 7 > 3 * n_target,
    };
    if !survivors_required {
        return violated(format!("{} survivors out of {n_target}", survivors.len()));
    }
    stats.f_star = Some(match classes.split {
        None => f_star,
        Some(_) => survivors.len(),
    });

    // Projection along C's axis.
    let k = &cyl_c.section;
    let slabs: Vec<Slab2<T>> = survivors
        .iter()
        .filter(|&&i| i != c)
        .map(|&i| match cyl_c.shadow_of(&prepared[i].cylinder, tol) {
            Shadow::Slab(s) => Ok(s),
            Shadow::Poly(_) => Err(Error::ParallelAxes),
        })
        .collect::<Result<_>>()?;
    stats.slabs = Some(slabs.len());
    let mut slack = T::infinity();
    for s in &slabs {
        slack = slack.min(s.width() - width_c);
        if s.width() < width_c - tol.eps {
            return violated("projected slab narrower than C");
        }
        if classify_slab(k, s, tol) != SlabRelation::Meets {
            return violated("projected slab does not just meet K");
        }
    }
    if !slabs.is_empty() {
        stats.width_slack = Some(slack);
    }

    let set = piercing_points(k, tol);
    let counts: Vec<usize> = set
        .points
        .iter()
        .map(|&t| slabs.iter().filter(|s| s.contains(t, tol.eps)).count())
        .collect();
    let max_count = counts.iter().copied().max().unwrap_or(0);
    if max_count < ceil_div(slabs.len(), MAX_PIERCING_POINTS) {
        return violated(format!(
            "best piercing point lies in {max_count} of {} slabs",
            slabs.len()
        ));
    }
    stats.max_piercing_count = Some(max_count);
    let candidates = set.points.iter().map(|&t| cyl_c.fiber(t)).collect();
    let branch = if set.width > T::zero() {
        Branch::PlanarPiercing
    } else {
        Branch::DegenerateSegment
    };
    Ok(Outcome {
        branch,
        pivot: c,
        candidates,
        piercing: Some(PiercingRecord { set, counts }),
        guarantee_class: target_class,
        stats,
    })
}

fn hit_set<T: Scalar>(line: &Line3<T>, prepared: &[Prepared<T>], tol: Tolerance<T>) -> Vec<usize> {
    let flags: Vec<bool> = prepared.par_iter().map(|p| p.hit_by(line, tol)).collect();
    flags.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i).collect()
}

fn count_in(hits: &[usize], range: std::ops::Range<usize>) -> usize {
    hits.iter().filter(|&&i| range.contains(&i)).count()
}

fn solve_classes<T: Scalar>(
    family: &[Cylinder3<T>],
    classes: Classes,
    opts: SolveOptions<T>,
) -> Result<TransversalReport<T>> {
    let tol = opts.tol;
    let original = prepare_all(family, tol)?;
    if let Some((i, j)) = first_disjoint_pair(&original, classes.split, tol) {
        return Err(match classes.split {
            None => Error::NotPairwiseIntersecting(i, j),
            Some(s) => Error::NotCrossIntersecting(i, j - s),
        });
    }
    let mut magnitude = opts.perturb;
    let mut last_miss = None;
    for attempt in 0..=PERTURB_ATTEMPTS {
        let (moved, deltas) = perturb_directions(family, opts.seed, magnitude, tol)?;
        let perturbed = deltas.iter().any(|&d| d != T::zero());
        let working = if perturbed {
            prepare_all(&moved, tol)?
        } else {
            original.clone()
        };
        let mut outcome = pipeline(&working, classes, tol)?;
        outcome.stats.attempts = attempt as usize + 1;

        let scored: Vec<Vec<usize>> = outcome
            .candidates
            .iter()
            .map(|line| hit_set(line, &original, tol))
            .collect();
        let range = classes.members(outcome.guarantee_class);
        let mut best = 0;
        for (k, hits) in scored.iter().enumerate() {
            if count_in(hits, range.clone()) > count_in(&scored[best], range.clone()) {
                best = k;
            }
        }
        let hits = scored[best].clone();
        let required = guarantee(classes.size(outcome.guarantee_class));
        let achieved = count_in(&hits, range);
        if achieved >= required && !hits.is_empty() {
            return Ok(TransversalReport {
                branch: outcome.branch,
                line: outcome.candidates[best],
                hits,
                pivot: outcome.pivot,
                piercing: outcome.piercing,
                perturbation: perturbed.then(|| Perturbation {
                    seed: opts.seed,
                    magnitude,
                    deltas,
                }),
                side: classes.side(outcome.guarantee_class),
                stats: outcome.stats,
            });
        }
        last_miss = Some(Error::GuaranteeMissed {
            hits: achieved,
            required,
        });
        if !perturbed {
            break;
        }
        magnitude = magnitude * T::half();
    }
    Err(last_miss.unwrap_or(Error::PerturbationFailed))
}

/// Finds a line meeting at least `max(1, n / 28)` members of a pairwise
/// intersecting family.
pub fn solve<T: Scalar>(family: &[Cylinder3<T>], opts: SolveOptions<T>) -> Result<TransversalReport<T>> {
    if family.is_empty() {
        return Err(Error::EmptyInput);
    }
    with_jobs(opts.jobs, || {
        solve_classes(
            family,
            Classes {
                split: None,
                n: family.len(),
            },
            opts,
        )
    })
}

/// Finds a line meeting at least `max(1, n / 28)` members of one of `f` and
/// `g`, where `n` is the size of that family, given that every member of
/// `f` meets every member of `g`.
pub fn solve_bipartite<T: Scalar>(
    f: &[Cylinder3<T>],
    g: &[Cylinder3<T>],
    opts: SolveOptions<T>,
) -> Result<TransversalReport<T>> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyInput);
    }
    let all: Vec<Cylinder3<T>> = f.iter().chain(g).cloned().collect();
    let classes = Classes {
        split: Some(f.len()),
        n: all.len(),
    };
    with_jobs(opts.jobs, || solve_classes(&all, classes, opts))
}

fn recount<T: Scalar>(family: &[Cylinder3<T>], line: &Line3<T>, tol: Tolerance<T>) -> Option<Vec<usize>> {
    if !line.point.is_finite() || !line.direction.is_finite() || line.direction.normalized().is_none() {
        return None;
    }
    let prepared = prepare_all(family, tol).ok()?;
    Some(hit_set(line, &prepared, tol))
}

fn claims_hold(claimed: &[usize], actual: &[usize]) -> bool {
    !claimed.is_empty()
        && claimed.windows(2).all(|w| w[0] < w[1])
        && claimed.iter().all(|i| actual.binary_search(i).is_ok())
}

/// Recounts the report's line against `family` and checks its claims.
pub fn verify_report<T: Scalar>(family: &[Cylinder3<T>], report: &TransversalReport<T>, tol: Tolerance<T>) -> bool {
    let Some(actual) = recount(family, &report.line, tol) else {
        return false;
    };
    claims_hold(&report.hits, &actual) && report.hits.len() >= guarantee(family.len())
}

/// Bipartite counterpart of [`verify_report`]; the guarantee is checked on
/// the reported side.
pub fn verify_report_bipartite<T: Scalar>(
    f: &[Cylinder3<T>],
    g: &[Cylinder3<T>],
    report: &TransversalReport<T>,
    tol: Tolerance<T>,
) -> bool {
    let all: Vec<Cylinder3<T>> = f.iter().chain(g).cloned().collect();
    let Some(actual) = recount(&all, &report.line, tol) else {
        return false;
    };
    let (range, n) = match report.side {
        Some(Side::F) => (0..f.len(), f.len()),
        Some(Side::G) => (f.len()..all.len(), g.len()),
        None => return false,
    };
    claims_hold(&report.hits, &actual) && count_in(&report.hits, range) >= guarantee(n)
}
