//! Extreme-point engines.
//!
//! Two interchangeable paths compute `ext(conv(S))` for a finite point
//! set `S`: a 2-D monotone-chain scan with exact or tolerance-guarded
//! orientation tests, and a general-dimension path that solves one
//! separation LP per candidate point. Both dedup their input first: the
//! separation LP reports a duplicated vertex as non-extreme, which would
//! wrongly discard true vertices, so exactly one representative of each
//! coincident group is kept.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::lp::{lp_solve, LpConstraint, LpProblem, LpStatus, Relation, VarKind};
use crate::num::{eq_tol, sign_tol, Num};

/// Tolerance policy for float-mode geometry. Exact mode ignores both
/// fields. `eps` guards orientation predicates and LP pivots; a point is
/// declared extreme when its separation value exceeds `eps_extreme`.
#[derive(Clone, Copy, Debug)]
pub struct HullOptions {
    pub eps: f64,
    pub eps_extreme: f64,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions { eps: 1e-9, eps_extreme: 1e-9 }
    }
}

/// A finite set of points sharing one dimension and scalar domain.
/// Duplicates are allowed on input; engines dedup internally.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<T: Num> {
    pub dim: usize,
    pub points: Vec<Vector<T>>,
}

impl<T: Num> PointSet<T> {
    pub fn new(dim: usize, points: Vec<Vector<T>>) -> Result<Self> {
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
        }
        Ok(PointSet { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Separating-hyperplane certificate for one candidate point: if
/// `value > 0` the hyperplane `normal . x = offset` has the candidate
/// strictly on its positive side and every other retained point on the
/// non-positive side.
#[derive(Clone, Debug)]
pub struct SeparationCertificate<T: Num> {
    pub normal: Vector<T>,
    pub offset: T,
    pub value: T,
}

/// Lexicographic sort + adjacent merge. Returns the retained points in
/// canonical order.
pub fn dedup_points<T: Num>(points: &[Vector<T>], opts: &HullOptions) -> Vec<Vector<T>> {
    let mut sorted: Vec<&Vector<T>> = points.iter().collect();
    sorted.sort_by(|a, b| a.lex_cmp(b));
    let mut out: Vec<Vector<T>> = Vec::with_capacity(sorted.len());
    for p in sorted {
        let dup = out.last().is_some_and(|q| {
            p.entries().iter().zip(q.entries()).all(|(a, b)| eq_tol(a, b, opts.eps))
        });
        if !dup {
            out.push(p.clone());
        }
    }
    out
}

fn cross_sign<T: Num>(o: &Vector<T>, a: &Vector<T>, b: &Vector<T>, eps: f64) -> i8 {
    let t1 = a.get(0).sub(o.get(0)).mul(&b.get(1).sub(o.get(1)));
    let t2 = a.get(1).sub(o.get(1)).mul(&b.get(0).sub(o.get(0)));
    let scale = t1.abs().add(&t2.abs());
    sign_tol(&t1.sub(&t2), eps, &scale)
}

/// Monotone-chain hull over a deduplicated, lexicographically sorted
/// slice. Returns indices into the slice in counter-clockwise order
/// starting from the lexicographically smallest point. Strictly convex
/// turns only: collinear interior points of an edge are excluded.
pub fn extreme_indices_2d<T: Num>(points: &[Vector<T>], opts: &HullOptions) -> Vec<usize> {
    let l = points.len();
    if l <= 2 {
        return (0..l).collect();
    }
    let mut lower: Vec<usize> = Vec::new();
    for i in 0..l {
        while lower.len() >= 2 {
            let o = lower[lower.len() - 2];
            let a = lower[lower.len() - 1];
            if cross_sign(&points[o], &points[a], &points[i], opts.eps) <= 0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for i in (0..l).rev() {
        while upper.len() >= 2 {
            let o = upper[upper.len() - 2];
            let a = upper[upper.len() - 1];
            if cross_sign(&points[o], &points[a], &points[i], opts.eps) <= 0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// 2-D extreme points via Graham-style scanning, counter-clockwise from
/// the lexicographically smallest point.
pub fn extreme_points_2d<T: Num>(set: &PointSet<T>, opts: &HullOptions) -> Result<PointSet<T>> {
    if set.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: set.dim });
    }
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dedup = dedup_points(&set.points, opts);
    let idx = extreme_indices_2d(&dedup, opts);
    PointSet::new(2, idx.into_iter().map(|i| dedup[i].clone()).collect())
}

/// Separation LP for candidate `j` of a deduplicated set: find the
/// hyperplane maximizing the candidate's violation, capped at 1. The
/// certificate value is positive exactly when the candidate is a vertex
/// of the hull. Solved in the convex-combination (dual) form, which has
/// only `dim + 1` rows; the hyperplane is read from the dual multipliers.
pub fn lp_separation<T: Num>(
    points: &[Vector<T>],
    j: usize,
    opts: &HullOptions,
) -> Result<SeparationCertificate<T>> {
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(lp_separation_over(points, &all, j, opts)?.0)
}

/// As [`lp_separation`], restricted to the points named by `columns`
/// (which must include `j`). Sound whenever the excluded points lie in
/// the convex hull of the included ones. Also returns the optimal
/// combination weights, indexed parallel to `columns`.
fn lp_separation_over<T: Num>(
    points: &[Vector<T>],
    columns: &[usize],
    j: usize,
    opts: &HullOptions,
) -> Result<(SeparationCertificate<T>, Vec<T>)> {
    let l = columns.len();
    let j_pos = columns.iter().position(|&c| c == j).expect("candidate among columns");
    let dim = points[j].dim();
    let mut rows = Vec::with_capacity(dim + 1);
    for r in 0..dim {
        rows.push(LpConstraint {
            coeffs: columns.iter().map(|&i| points[i].get(r).clone()).collect(),
            rel: Relation::Eq,
            rhs: points[j].get(r).clone(),
        });
    }
    rows.push(LpConstraint {
        coeffs: vec![T::one(); l],
        rel: Relation::Eq,
        rhs: T::one(),
    });
    let mut objective = vec![T::zero(); l];
    objective[j_pos] = T::one().neg();
    let problem = LpProblem { num_vars: l, objective, var_kinds: vec![VarKind::NonNeg; l], rows };
    let sol = lp_solve(&problem, opts.eps)?;
    if sol.status != LpStatus::Optimal {
        // the combination lambda_j = 1 is always feasible and the
        // objective is bounded in [-1, 0]; anything else is a solver
        // failure, not a geometric answer
        return Err(Error::LpFailure { point: j, message: format!("status {:?}", sol.status) });
    }
    let normal = Vector::new(sol.duals[..dim].iter().map(|y| y.neg()).collect());
    let offset = sol.duals[dim].clone();
    let value = sol.objective.neg();
    Ok((SeparationCertificate { normal, offset, value }, sol.primal))
}

/// Resolves one candidate of an exact-domain set with a float LP as a
/// guide, trusting the float verdict only once an exact certificate
/// confirms it: a rationalized strictly separating hyperplane for
/// "extreme", or a re-solved separation over the (tiny) float support
/// for "interior". `None` means no confirmation could be built and the
/// caller must fall back to the exact LP.
fn float_guided_extreme<T: Num>(
    points: &[Vector<T>],
    guide: &[Vector<f64>],
    active: &[usize],
    j: usize,
    opts: &HullOptions,
) -> Option<bool> {
    let dim = points[j].dim();
    let (cert, primal) = lp_separation_over(guide, active, j, opts).ok()?;
    if cert.value > 0.5 {
        let normal: Vec<T> =
            cert.normal.entries().iter().map(|&x| T::from_f64(x)).collect::<Option<_>>()?;
        let dot = |p: &Vector<T>| -> T {
            let mut acc = T::zero();
            for (h, e) in normal.iter().zip(p.entries()) {
                acc = acc.add(&h.mul(e));
            }
            acc
        };
        let side_j = dot(&points[j]);
        for &i in active {
            if i != j && side_j.total_cmp(&dot(&points[i])) != std::cmp::Ordering::Greater {
                return None;
            }
        }
        Some(true)
    } else {
        let mut support: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|&(pos, &i)| i != j && primal[pos] > 1e-9)
            .map(|(_, &i)| i)
            .collect();
        if support.is_empty() || support.len() > dim + 1 {
            return None;
        }
        support.push(j);
        let (confirm, _) = lp_separation_over(points, &support, j, opts).ok()?;
        confirm.value.is_zero().then_some(false)
    }
}

/// Indices of the extreme points of a deduplicated slice, via one
/// separation LP per point. Input order is preserved in the output.
/// Points proven interior are dropped from later LPs — their removal
/// leaves the hull unchanged and shrinks each subsequent problem.
pub fn extreme_indices_lp<T: Num>(points: &[Vector<T>], opts: &HullOptions) -> Result<Vec<usize>> {
    // small-norm points are the likeliest interior ones; testing them
    // first empties the active set fastest
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].max_abs().total_cmp(&points[b].max_abs()));
    let mut alive = vec![true; points.len()];
    let mut out = Vec::new();
    // exact domains first solve each separation in cheap f64 and only
    // fall back to the exact LP when the float verdict cannot be
    // confirmed by an exact certificate
    let guide: Option<Vec<Vector<f64>>> = if T::EXACT {
        let f: Vec<Vector<f64>> = points
            .iter()
            .map(|p| Vector::new(p.entries().iter().map(Num::to_f64).collect()))
            .collect();
        f.iter().all(|p| p.entries().iter().all(|x| x.is_finite())).then_some(f)
    } else {
        None
    };
    for &j in &order {
        let active: Vec<usize> = (0..points.len()).filter(|&i| alive[i]).collect();
        let verdict =
            guide.as_ref().and_then(|g| float_guided_extreme(points, g, &active, j, opts));
        let extreme = match verdict {
            Some(v) => v,
            None => {
                let (cert, _) = lp_separation_over(points, &active, j, opts).map_err(|e| {
                    match e {
                        Error::LpFailure { message, .. } => {
                            Error::LpFailure { point: j, message }
                        }
                        other => other,
                    }
                })?;
                sign_tol(&cert.value, opts.eps_extreme, &T::one()) > 0
            }
        };
        if !extreme {
            alive[j] = false;
        }
    }
    out.extend((0..points.len()).filter(|&i| alive[i]));
    Ok(out)
}

/// General-dimension extreme points; output in canonical lexicographic
/// order regardless of engine internals.
pub fn extreme_points_lp<T: Num>(set: &PointSet<T>, opts: &HullOptions) -> Result<PointSet<T>> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dedup = dedup_points(&set.points, opts);
    let idx = extreme_indices_lp(&dedup, opts)?;
    PointSet::new(set.dim, idx.into_iter().map(|i| dedup[i].clone()).collect())
}
