//! Instrumentation for vertex-count growth.
//!
//! Tools for studying how the number of layer vertices N_k grows with the
//! horizon: per-layer traces, classification of 2-D vertices by the
//! quadrant their outer normal cone meets, counts of reachable points off
//! the diagonal quadrants, similarity transforms (which leave N_k
//! invariant), and checkers for the concrete polynomial bounds that hold
//! for the catalogued binary matrix pairs and for structured families
//! (rank-one, shared-eigenvector, commuting, projections).

use crate::error::{Error, Result};
use crate::hull::{dedup_points, extreme_indices_2d, HullOptions};
use crate::instance::{Instance, Objective};
use crate::linalg::{Matrix, Vector};
use crate::num::{sign_tol, Num, Rational};
use crate::solver::{layers, SolverOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NkTrace {
    pub label: String,
    /// `counts[k]` = number of layer-k vertices.
    pub counts: Vec<usize>,
}

/// Vertex counts N_k for k = 0..=horizon. The objective plays no role.
pub fn trace_nk<T: Num>(
    label: &str,
    matrices: &[Matrix<T>],
    a: &Vector<T>,
    horizon: usize,
    options: &SolverOptions,
) -> Result<NkTrace> {
    let inst = Instance::new(matrices.to_vec(), a.clone(), horizon, Objective::L1)?;
    let (all, _) = layers(&inst, horizon, options)?;
    Ok(NkTrace { label: label.to_string(), counts: all.iter().map(|l| l.points.len()).collect() })
}

pub fn nk_csv(trace: &NkTrace) -> String {
    let mut out = String::from("k,N_k\n");
    for (k, n) in trace.counts.iter().enumerate() {
        out.push_str(&format!("{},{}\n", k, n));
    }
    out
}

/// Least-squares slope of ln N_k against ln k over k >= 1. An empirical
/// growth exponent for traces where no proven constant is available;
/// reported, never asserted.
pub fn fit_log_log_exponent(counts: &[usize]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &n)| ((k as f64).ln(), (n.max(1) as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

// ---------------------------------------------------------------------
// vertex classification by outer normal cone (n = 2)

/// The five direction classes of a 2-D vertex: `sets[0]` holds vertices
/// whose closed normal cone contains an axis direction, `sets[i]`
/// (i = 1..4) those whose cone interior meets the open quadrant Q_i. The
/// sets may overlap and jointly cover every vertex.
#[derive(Clone, Debug)]
pub struct VertexClassification<T: Num> {
    pub sets: [Vec<Vector<T>>; 5],
}

fn cross2<T: Num>(a: &Vector<T>, b: &Vector<T>) -> (T, T) {
    let t1 = a.get(0).mul(b.get(1));
    let t2 = a.get(1).mul(b.get(0));
    (t1, t2)
}

fn cross2_sign<T: Num>(a: &Vector<T>, b: &Vector<T>, eps: f64) -> i8 {
    let (t1, t2) = cross2(a, b);
    let scale = t1.abs().add(&t2.abs());
    sign_tol(&t1.sub(&t2), eps, &scale)
}

/// A cone of directions as a CCW arc from `start` to `end`, width in
/// (0, pi].
#[derive(Clone, Debug)]
struct Arc<T: Num> {
    start: Vector<T>,
    end: Vector<T>,
}

impl<T: Num> Arc<T> {
    fn strictly_contains(&self, p: &Vector<T>, eps: f64) -> bool {
        cross2_sign(&self.start, p, eps) > 0 && cross2_sign(p, &self.end, eps) > 0
    }

    fn closed_contains(&self, p: &Vector<T>, eps: f64) -> bool {
        cross2_sign(&self.start, p, eps) >= 0 && cross2_sign(p, &self.end, eps) >= 0
    }

    /// An interior direction: the chord midpoint, or the 90-degree
    /// rotation of `start` when the arc is a half-plane.
    fn witness(&self, eps: f64) -> Vector<T> {
        let mid = Vector::new(vec![
            self.start.get(0).add(self.end.get(0)),
            self.start.get(1).add(self.end.get(1)),
        ]);
        let scale = mid.max_abs();
        let degenerate = sign_tol(mid.get(0), eps, &scale) == 0 && sign_tol(mid.get(1), eps, &scale) == 0;
        if degenerate {
            Vector::new(vec![self.start.get(1).neg(), self.start.get(0).clone()])
        } else {
            mid
        }
    }

    /// Open-arc intersection for two arcs of width <= pi: some endpoint
    /// of one lies strictly inside the other, or (nested/equal cases) an
    /// interior witness does.
    fn meets_open(&self, other: &Arc<T>, eps: f64) -> bool {
        self.strictly_contains(&other.start, eps)
            || self.strictly_contains(&other.end, eps)
            || other.strictly_contains(&self.start, eps)
            || other.strictly_contains(&self.end, eps)
            || self.strictly_contains(&other.witness(eps), eps)
            || other.strictly_contains(&self.witness(eps), eps)
    }
}

fn quadrant_arc<T: Num>(i: usize) -> Arc<T> {
    let axes = [
        Vector::from_i64(&[1, 0]),
        Vector::from_i64(&[0, 1]),
        Vector::from_i64(&[-1, 0]),
        Vector::from_i64(&[0, -1]),
    ];
    Arc { start: axes[i - 1].clone(), end: axes[i % 4].clone() }
}

fn outward_normal<T: Num>(from: &Vector<T>, to: &Vector<T>) -> Vector<T> {
    // CCW traversal: rotate the edge direction clockwise
    let dx = to.get(0).sub(from.get(0));
    let dy = to.get(1).sub(from.get(1));
    Vector::new(vec![dy, dx.neg()])
}

/// Classifies the vertices of a 2-D layer by outer normal cone. Input
/// may be any point set; the hull is (re)computed internally. A single
/// point has the whole plane as its cone and lands in all five sets; the
/// endpoints of a two-point layer get half-plane cones.
pub fn classify_vertices<T: Num>(
    points: &[Vector<T>],
    opts: &HullOptions,
) -> Result<VertexClassification<T>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if points[0].dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: points[0].dim() });
    }
    let dedup = dedup_points(points, opts);
    let hull: Vec<Vector<T>> = extreme_indices_2d(&dedup, opts)
        .into_iter()
        .map(|i| dedup[i].clone())
        .collect();
    let mut sets: [Vec<Vector<T>>; 5] = Default::default();
    let h = hull.len();
    if h == 1 {
        for s in &mut sets {
            s.push(hull[0].clone());
        }
        return Ok(VertexClassification { sets });
    }
    let axes: [Vector<T>; 4] = [
        Vector::from_i64(&[1, 0]),
        Vector::from_i64(&[0, 1]),
        Vector::from_i64(&[-1, 0]),
        Vector::from_i64(&[0, -1]),
    ];
    for (i, v) in hull.iter().enumerate() {
        let cone = if h == 2 {
            // half-plane of directions favoring this endpoint
            let o = &hull[1 - i];
            let dx = v.get(0).sub(o.get(0));
            let dy = v.get(1).sub(o.get(1));
            Arc {
                start: Vector::new(vec![dy.clone(), dx.neg()]),
                end: Vector::new(vec![dy.neg(), dx]),
            }
        } else {
            let prev = &hull[(i + h - 1) % h];
            let next = &hull[(i + 1) % h];
            Arc { start: outward_normal(prev, v), end: outward_normal(v, next) }
        };
        if axes.iter().any(|ax| cone.closed_contains(ax, opts.eps)) {
            sets[0].push(v.clone());
        }
        for q in 1..=4 {
            if cone.meets_open(&quadrant_arc(q), opts.eps) {
                sets[q].push(v.clone());
            }
        }
    }
    Ok(VertexClassification { sets })
}

pub fn classification_csv(rows: &[(usize, [usize; 5])]) -> String {
    let mut out = String::from("k,e0,e1,e2,e3,e4\n");
    for (k, e) in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", k, e[0], e[1], e[2], e[3], e[4]));
    }
    out
}

// ---------------------------------------------------------------------
// reachable-set enumeration off the diagonal quadrants

/// Number of distinct k-step reachable points strictly inside quadrants
/// 2 and 4 (sign patterns (-,+) and (+,-)). Enumerates the reachable set
/// with per-step dedup; refuses to grow past the enumeration cap.
pub fn count_offdiagonal_reachable<T: Num>(
    inst: &Instance<T>,
    k: usize,
    options: &SolverOptions,
) -> Result<usize> {
    if inst.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: inst.dim });
    }
    let mut current = vec![inst.start.clone()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(current.len() * inst.num_matrices());
        for m in &inst.matrices {
            for x in &current {
                next.push(m.mat_vec(x)?);
            }
        }
        current = dedup_points(&next, &options.hull);
        if current.len() as u128 > options.brute_force_cap as u128 {
            return Err(Error::EnumerationCap {
                candidates: current.len() as u128,
                cap: options.brute_force_cap,
            });
        }
    }
    let eps = options.hull.eps;
    let count = current
        .iter()
        .filter(|x| {
            let s0 = sign_tol(x.get(0), eps, &T::one());
            let s1 = sign_tol(x.get(1), eps, &T::one());
            (s0 > 0 && s1 < 0) || (s0 < 0 && s1 > 0)
        })
        .count();
    Ok(count)
}

// ---------------------------------------------------------------------
// similarity transforms

/// Conjugates every matrix: A -> S A S^{-1}. Errors on singular S.
pub fn similarity_transform<T: Num>(
    matrices: &[Matrix<T>],
    s: &Matrix<T>,
) -> Result<Vec<Matrix<T>>> {
    let s_inv = s.inverse()?;
    matrices.iter().map(|m| s.mat_mul(m)?.mat_mul(&s_inv)).collect()
}

/// The vertex counts N_k are invariant under conjugating the matrix set
/// and mapping the start vector: this checks the two traces agree up to
/// the horizon.
pub fn check_similarity_invariance<T: Num>(
    matrices: &[Matrix<T>],
    s: &Matrix<T>,
    a: &Vector<T>,
    horizon: usize,
    options: &SolverOptions,
) -> Result<bool> {
    let conj = similarity_transform(matrices, s)?;
    let sa = s.mat_vec(a)?;
    let t1 = trace_nk("base", matrices, a, horizon, options)?;
    let t2 = trace_nk("conjugated", &conj, &sa, horizon, options)?;
    Ok(t1.counts == t2.counts)
}

// ---------------------------------------------------------------------
// the binary-pair catalog

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairId {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl PairId {
    pub fn parse(s: &str) -> Option<PairId> {
        match s {
            "1" | "s1" | "sigma1" => Some(PairId::S1),
            "2" | "s2" | "sigma2" => Some(PairId::S2),
            "3" | "s3" | "sigma3" => Some(PairId::S3),
            "4" | "s4" | "sigma4" => Some(PairId::S4),
            "5" | "s5" | "sigma5" => Some(PairId::S5),
            _ => None,
        }
    }
}

/// The five rank-two binary 2x2 matrices A1..A5 (index 0 = A1).
pub fn binary_matrices<T: Num>() -> [Matrix<T>; 5] {
    [
        Matrix::from_rows_i64(&[&[0, 1], &[1, 0]]),
        Matrix::from_rows_i64(&[&[1, 1], &[0, 1]]),
        Matrix::from_rows_i64(&[&[1, 0], &[1, 1]]),
        Matrix::from_rows_i64(&[&[1, 1], &[1, 0]]),
        Matrix::from_rows_i64(&[&[0, 1], &[1, 1]]),
    ]
}

pub fn binary_pair<T: Num>(id: PairId) -> [Matrix<T>; 2] {
    let a = binary_matrices::<T>();
    let (i, j) = match id {
        PairId::S1 => (0, 1),
        PairId::S2 => (0, 3),
        PairId::S3 => (1, 2),
        PairId::S4 => (3, 4),
        PairId::S5 => (1, 3),
    };
    [a[i].clone(), a[j].clone()]
}

// ---------------------------------------------------------------------
// growth-bound checkers

/// One bound violation: (k, observed N_k, allowed bound).
pub type Violation = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub pair: PairId,
    pub counts: Vec<usize>,
    pub violations: Vec<Violation>,
    pub fitted_exponent: Option<f64>,
}

fn in_open_q1(a: &Vector<Rational>) -> bool {
    a.get(0) > &Rational::zero() && a.get(1) > &Rational::zero()
}

fn in_closed_q1(a: &Vector<Rational>) -> bool {
    a.get(0) >= &Rational::zero()
        && a.get(1) >= &Rational::zero()
        && !(a.get(0).is_zero() && a.get(1).is_zero())
}

/// Checks the proven per-pair vertex-count bounds against a computed
/// trace:
///
/// - pair 1, start in the open first quadrant: N_k <= k^2 + 5k + 3
/// - pair 2, any nonzero start: N_k <= 8k - 12 for k >= 2
/// - pair 3, start in the first quadrant: N_k <= 12k - 6 for k >= 3
/// - pair 4, start in the first quadrant: N_k <= 2 N_{k-1} for odd k and
///   N_k equal to the pair-3 count for even k
/// - pair 5, start with a1 >= a2 >= 0: N_k <= 6k + 8
pub fn check_growth_bounds(
    pair: PairId,
    a: &Vector<Rational>,
    horizon: usize,
    options: &SolverOptions,
) -> Result<GrowthReport> {
    let region_ok = match pair {
        PairId::S1 => in_open_q1(a),
        PairId::S2 => !(a.get(0).is_zero() && a.get(1).is_zero()),
        PairId::S3 | PairId::S4 => in_closed_q1(a),
        PairId::S5 => a.get(0) >= a.get(1) && a.get(1) >= &Rational::zero() && !a.get(0).is_zero(),
    };
    if !region_ok {
        return Err(Error::Unsupported(format!(
            "start vector {:?} outside the admissible region for pair {:?}",
            a.entries(),
            pair
        )));
    }
    let mats = binary_pair::<Rational>(pair);
    let trace = trace_nk(&format!("{:?}", pair), &mats, a, horizon, options)?;
    let counts = trace.counts;
    let mut violations = Vec::new();
    match pair {
        PairId::S1 => {
            for (k, &n) in counts.iter().enumerate() {
                let bound = k * k + 5 * k + 3;
                if n > bound {
                    violations.push((k, n, bound));
                }
            }
        }
        PairId::S2 => {
            for (k, &n) in counts.iter().enumerate().skip(2) {
                let bound = 8 * k - 12;
                if n > bound {
                    violations.push((k, n, bound));
                }
            }
        }
        PairId::S3 => {
            for (k, &n) in counts.iter().enumerate().skip(3) {
                let bound = 12 * k - 6;
                if n > bound {
                    violations.push((k, n, bound));
                }
            }
        }
        PairId::S5 => {
            for (k, &n) in counts.iter().enumerate() {
                let bound = 6 * k + 8;
                if n > bound {
                    violations.push((k, n, bound));
                }
            }
        }
        PairId::S4 => {
            let s3 = trace_nk("S3", &binary_pair::<Rational>(PairId::S3), a, horizon, options)?;
            for (k, &n) in counts.iter().enumerate().skip(1) {
                if k % 2 == 1 {
                    let bound = 2 * counts[k - 1];
                    if n > bound {
                        violations.push((k, n, bound));
                    }
                } else if n != s3.counts[k] {
                    violations.push((k, n, s3.counts[k]));
                }
            }
        }
    }
    let fitted_exponent = fit_log_log_exponent(&counts);
    Ok(GrowthReport { pair, counts, violations, fitted_exponent })
}

// ---------------------------------------------------------------------
// structured families

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// All matrices rank one except at most one: N_k <= N_0 + 2k(m-1).
    RankOne,
    /// Common eigenvector in 2-D: N_k <= 2k for k >= 1.
    SharedEigenvector,
    /// Commuting pair: at most k+1 distinct products, so N_k <= k+1.
    Commuting,
    /// Two rank-one projections; the rank-one bound applies.
    ProjectionPair,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Option<FamilyKind> {
        match s {
            "rank-one" => Some(FamilyKind::RankOne),
            "shared-eigenvector" => Some(FamilyKind::SharedEigenvector),
            "commuting" => Some(FamilyKind::Commuting),
            "projection-pair" => Some(FamilyKind::ProjectionPair),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub kind: FamilyKind,
    pub counts: Vec<usize>,
    pub violations: Vec<Violation>,
}

fn det2(m: &Matrix<Rational>) -> Rational {
    m.get(0, 0).mul(m.get(1, 1)).sub(&m.get(0, 1).mul(m.get(1, 0)))
}

fn family_matrices(kind: FamilyKind) -> Vec<Matrix<Rational>> {
    let half = Rational::one().div(&Rational::from_i64(2));
    match kind {
        FamilyKind::RankOne => vec![
            Matrix::from_rows_i64(&[&[2, 1], &[1, 1]]),
            // (1,2)^T (1,1), rank one
            Matrix::from_rows_i64(&[&[1, 1], &[2, 2]]),
        ],
        FamilyKind::SharedEigenvector => vec![
            Matrix::from_rows_i64(&[&[2, 1], &[0, 1]]),
            Matrix::from_rows_i64(&[&[1, 3], &[0, 2]]),
        ],
        FamilyKind::Commuting => {
            let a: Matrix<Rational> = Matrix::from_rows_i64(&[&[1, 1], &[1, 0]]);
            let a2 = a.mat_mul(&a).unwrap();
            vec![a, a2]
        }
        FamilyKind::ProjectionPair => {
            let onto_diag =
                Matrix::new(2, vec![half.clone(), half.clone(), half.clone(), half]).unwrap();
            vec![Matrix::from_rows_i64(&[&[1, 0], &[0, 0]]), onto_diag]
        }
    }
}

/// Generates the canonical instance of the requested family, verifies
/// its structural precondition, and checks the associated vertex-count
/// bound for k up to the horizon.
pub fn structured_family_bounds(
    kind: FamilyKind,
    horizon: usize,
    options: &SolverOptions,
) -> Result<FamilyReport> {
    let mats = family_matrices(kind);
    let structural_ok = match kind {
        FamilyKind::RankOne => det2(&mats[1]).is_zero() && !det2(&mats[0]).is_zero(),
        FamilyKind::SharedEigenvector => {
            // e1 is an eigenvector of both
            mats.iter().all(|m| m.get(1, 0).is_zero() && !m.get(0, 0).is_zero())
        }
        FamilyKind::Commuting => {
            mats[0].mat_mul(&mats[1]).unwrap() == mats[1].mat_mul(&mats[0]).unwrap()
        }
        FamilyKind::ProjectionPair => mats
            .iter()
            .all(|m| m.mat_mul(m).unwrap() == *m && det2(m).is_zero()),
    };
    if !structural_ok {
        return Err(Error::Unsupported(format!(
            "generated family fails its structural precondition: {:?}",
            kind
        )));
    }
    let a = Vector::from_i64(&[2, 1]);
    let trace = trace_nk(&format!("{:?}", kind), &mats, &a, horizon, options)?;
    let counts = trace.counts;
    let mut violations = Vec::new();
    for (k, &n) in counts.iter().enumerate() {
        let bound = match kind {
            FamilyKind::RankOne | FamilyKind::ProjectionPair => counts[0] + 2 * k,
            FamilyKind::SharedEigenvector => {
                if k == 0 {
                    1
                } else {
                    2 * k
                }
            }
            FamilyKind::Commuting => k + 1,
        };
        if n > bound {
            violations.push((k, n, bound));
        }
    }
    Ok(FamilyReport { kind, counts, violations })
}
