//! The layered dynamic program.
//!
//! Layer k holds the extreme points of the convex hull of all states
//! reachable in exactly k steps. Each step applies every matrix to every
//! layer point, dedups, and keeps the hull vertices; maximizing a convex
//! objective over the final reachable set equals maximizing it over the
//! final layer, and the optimal switching sequence is read back through
//! per-point parent pointers.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::hull::{dedup_points, extreme_indices_2d, extreme_indices_lp, HullOptions, PointSet};
use crate::instance::{Instance, Objective};
use crate::linalg::Vector;
use crate::num::{eq_tol, Num};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// 2-D scan when n = 2, LP separation otherwise.
    #[default]
    Auto,
    Graham,
    Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    Maximize,
    /// Rejected by the solver: hull vertices do not carry convex minima.
    Minimize,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub engine: Engine,
    /// Divide each layer by its max-abs coordinate and accumulate the
    /// factor. Only valid for objectives with a declared homogeneity
    /// degree; prevents float overflow/underflow on long horizons.
    pub rescale: bool,
    pub sense: Sense,
    pub hull: HullOptions,
    /// Guard for the enumeration oracle: refuse more than this many
    /// sequences.
    pub brute_force_cap: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            engine: Engine::Auto,
            rescale: false,
            sense: Sense::Maximize,
            hull: HullOptions::default(),
            brute_force_cap: 1 << 24,
        }
    }
}

/// One vertex of a layer, with provenance for sequence reconstruction.
#[derive(Clone, Debug)]
pub struct LayerPoint<T: Num> {
    pub x: Vector<T>,
    /// Index into the previous layer (none for layer 0).
    pub parent: Option<usize>,
    /// Matrix that produced this point (none for layer 0).
    pub matrix_index: Option<usize>,
}

/// Extreme points of the k-step reachable hull, in canonical
/// lexicographic order, with the accumulated rescaling factor.
#[derive(Clone, Debug)]
pub struct Layer<T: Num> {
    pub k: usize,
    pub points: Vec<LayerPoint<T>>,
    pub scale: T,
}

#[derive(Clone, Debug, Default)]
pub struct LayerStats {
    pub points: usize,
    pub lp_calls: usize,
    pub micros: u128,
}

#[derive(Clone, Debug)]
pub struct SolveResult<T: Num> {
    pub value: T,
    pub final_state: Vector<T>,
    /// Matrix indices in time order: `sequence[0]` is applied first.
    pub sequence: Vec<usize>,
    /// `nk_trace[k]` is the vertex count of layer k.
    pub nk_trace: Vec<usize>,
    pub stats: Vec<LayerStats>,
}

/// Queries the objective value at a point.
pub fn evaluate_objective<T: Num>(objective: &Objective<T>, x: &Vector<T>) -> Result<T> {
    match objective {
        Objective::Linear(c) => c.dot(x),
        Objective::L1 => {
            let mut acc = T::zero();
            for e in x.entries() {
                acc = acc.add(&e.abs());
            }
            Ok(acc)
        }
        Objective::L2Sq => {
            let mut acc = T::zero();
            for e in x.entries() {
                acc = acc.add(&e.mul(e));
            }
            Ok(acc)
        }
        Objective::LInf => Ok(x.max_abs()),
        Objective::External(name) => Err(Error::OracleMissing(name.clone())),
    }
}

struct Candidate<T: Num> {
    x: Vector<T>,
    parent: usize,
    matrix_index: usize,
}

fn advance_layer<T: Num>(
    inst: &Instance<T>,
    layer: &Layer<T>,
    options: &SolverOptions,
) -> Result<(Layer<T>, LayerStats)> {
    let start = Instant::now();
    let mut candidates: Vec<Candidate<T>> = Vec::with_capacity(inst.num_matrices() * layer.points.len());
    for (mi, mat) in inst.matrices.iter().enumerate() {
        for (pi, p) in layer.points.iter().enumerate() {
            candidates.push(Candidate { x: mat.mat_vec(&p.x)?, parent: pi, matrix_index: mi });
        }
    }
    // canonical order: coincident points collapse onto the candidate
    // with the smallest (matrix, parent) pair
    candidates.sort_by(|a, b| {
        a.x.lex_cmp(&b.x)
            .then(a.matrix_index.cmp(&b.matrix_index))
            .then(a.parent.cmp(&b.parent))
    });
    let mut dedup: Vec<Candidate<T>> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let dup = dedup.last().is_some_and(|q| {
            c.x.entries()
                .iter()
                .zip(q.x.entries())
                .all(|(a, b)| eq_tol(a, b, options.hull.eps))
        });
        if !dup {
            dedup.push(c);
        }
    }
    let points: Vec<Vector<T>> = dedup.iter().map(|c| c.x.clone()).collect();
    let use_graham = inst.dim == 2 && !matches!(options.engine, Engine::Lp);
    let (mut keep, lp_calls) = if use_graham {
        (extreme_indices_2d(&points, &options.hull), 0)
    } else {
        if inst.dim != 2 && matches!(options.engine, Engine::Graham) {
            return Err(Error::Unsupported(format!(
                "graham engine requires n = 2 (instance has n = {})",
                inst.dim
            )));
        }
        let idx = extreme_indices_lp(&points, &options.hull)?;
        let calls = points.len();
        (idx, calls)
    };
    keep.sort_unstable();

    let mut new_points: Vec<LayerPoint<T>> = keep
        .into_iter()
        .map(|i| LayerPoint {
            x: dedup[i].x.clone(),
            parent: Some(dedup[i].parent),
            matrix_index: Some(dedup[i].matrix_index),
        })
        .collect();

    let mut scale = layer.scale.clone();
    if options.rescale {
        let mut max_abs = T::zero();
        for p in &new_points {
            let m = p.x.max_abs();
            if m.total_cmp(&max_abs) == std::cmp::Ordering::Greater {
                max_abs = m;
            }
        }
        if !max_abs.is_zero() && max_abs != T::one() {
            for p in &mut new_points {
                p.x = Vector::new(p.x.entries().iter().map(|e| e.div(&max_abs)).collect());
            }
            scale = scale.mul(&max_abs);
        }
    }

    let stats = LayerStats {
        points: new_points.len(),
        lp_calls,
        micros: start.elapsed().as_micros(),
    };
    Ok((Layer { k: layer.k + 1, points: new_points, scale }, stats))
}

/// Runs the forward DP and returns every layer 0..=K. Exposed for the
/// instrumentation in [`crate::analysis`].
pub fn layers<T: Num>(
    inst: &Instance<T>,
    horizon: usize,
    options: &SolverOptions,
) -> Result<(Vec<Layer<T>>, Vec<LayerStats>)> {
    let mut all = Vec::with_capacity(horizon + 1);
    let mut stats = vec![LayerStats { points: 1, lp_calls: 0, micros: 0 }];
    all.push(Layer {
        k: 0,
        points: vec![LayerPoint { x: inst.start.clone(), parent: None, matrix_index: None }],
        scale: T::one(),
    });
    for _ in 0..horizon {
        let (next, stat) = advance_layer(inst, all.last().unwrap(), options)?;
        stats.push(stat);
        all.push(next);
    }
    Ok((all, stats))
}

/// Per-layer rescaling factors applied between consecutive layers.
fn layer_factors<T: Num>(layers: &[Layer<T>]) -> Vec<T> {
    let mut factors = Vec::new();
    for w in layers.windows(2) {
        factors.push(w[1].scale.div(&w[0].scale));
    }
    factors
}

/// Solves the instance: the optimal value, final state, and one optimal
/// switching sequence.
pub fn solve<T: Num>(inst: &Instance<T>, options: &SolverOptions) -> Result<SolveResult<T>> {
    solve_with_oracle(inst, options, None)
}

/// As [`solve`], with an optional value oracle backing an external
/// objective.
pub fn solve_with_oracle<T: Num>(
    inst: &Instance<T>,
    options: &SolverOptions,
    oracle: Option<&dyn Fn(&Vector<T>) -> T>,
) -> Result<SolveResult<T>> {
    if options.sense == Sense::Minimize {
        return Err(Error::MinimizeRefused);
    }
    let degree = inst.objective.homogeneity_degree();
    if options.rescale && degree.is_none() {
        return Err(Error::RescaleNonHomogeneous);
    }
    let eval = |x: &Vector<T>| -> Result<T> {
        match (&inst.objective, oracle) {
            (Objective::External(_), Some(f)) => Ok(f(x)),
            _ => evaluate_objective(&inst.objective, x),
        }
    };

    let (all, stats) = layers(inst, inst.horizon, options)?;
    let last = all.last().unwrap();

    // argmax over the final layer; every scaled point shares the same
    // positive factor, so scaled-space comparison is faithful
    let mut best: Option<(usize, T)> = None;
    for (i, p) in last.points.iter().enumerate() {
        let v = eval(&p.x)?;
        let replace = match &best {
            None => true,
            Some((bi, bv)) => match v.total_cmp(bv) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => {
                    p.x.lex_cmp(&last.points[*bi].x) == std::cmp::Ordering::Less
                }
                std::cmp::Ordering::Less => false,
            },
        };
        if replace {
            best = Some((i, v));
        }
    }
    let (best_idx, scaled_value) = best.expect("layers are never empty");

    // walk parent pointers back to layer 0
    let mut sequence = Vec::with_capacity(inst.horizon);
    let mut idx = best_idx;
    for k in (1..=inst.horizon).rev() {
        let p = &all[k].points[idx];
        sequence.push(p.matrix_index.expect("non-initial layer point has provenance"));
        idx = p.parent.expect("non-initial layer point has provenance");
    }
    sequence.reverse();

    // undo rescaling factor by factor: partial products stay between the
    // scaled and the true magnitudes, so nothing overflows spuriously
    let factors = layer_factors(&all);
    let mut final_state = last.points[best_idx].x.clone();
    for f in &factors {
        final_state = final_state.scale(f);
    }
    let mut value = scaled_value;
    if let Some(d) = degree {
        for f in &factors {
            for _ in 0..d {
                value = value.mul(f);
            }
        }
    }

    Ok(SolveResult {
        value,
        final_state,
        sequence,
        nk_trace: all.iter().map(|l| l.points.len()).collect(),
        stats,
    })
}

/// Machine-integer enumeration for all-integer exact instances: same
/// tie-breaking and results as the generic path, orders of magnitude
/// faster. Returns `Ok(None)` when the data is not integral, the
/// objective needs non-integer evaluation, or any intermediate would
/// overflow an `i128` — the caller then runs the generic enumeration.
fn brute_force_i128<T: Num>(inst: &Instance<T>) -> Result<Option<(T, Vec<usize>, PointSet<T>)>> {
    let n = inst.dim;
    let to_ints = |v: &Vector<T>| -> Option<Vec<i128>> {
        v.entries().iter().map(Num::to_i128).collect()
    };
    let Some(start) = to_ints(&inst.start) else { return Ok(None) };
    let mut mats: Vec<Vec<i128>> = Vec::with_capacity(inst.num_matrices());
    for mat in &inst.matrices {
        let mut flat = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                match mat.get(i, j).to_i128() {
                    Some(e) => flat.push(e),
                    None => return Ok(None),
                }
            }
        }
        mats.push(flat);
    }
    let linear: Option<Vec<i128>> = match &inst.objective {
        Objective::Linear(c) => match to_ints(c) {
            Some(c) => Some(c),
            None => return Ok(None),
        },
        Objective::L1 | Objective::L2Sq | Objective::LInf => None,
        Objective::External(_) => return Ok(None),
    };
    let eval = |x: &[i128]| -> Option<i128> {
        match &inst.objective {
            Objective::Linear(_) => {
                let c = linear.as_ref().unwrap();
                let mut acc = 0i128;
                for (ci, xi) in c.iter().zip(x) {
                    acc = acc.checked_add(ci.checked_mul(*xi)?)?;
                }
                Some(acc)
            }
            Objective::L1 => {
                let mut acc = 0i128;
                for xi in x {
                    acc = acc.checked_add(xi.checked_abs()?)?;
                }
                Some(acc)
            }
            Objective::L2Sq => {
                let mut acc = 0i128;
                for xi in x {
                    acc = acc.checked_add(xi.checked_mul(*xi)?)?;
                }
                Some(acc)
            }
            Objective::LInf => x.iter().map(|xi| xi.checked_abs()).max().unwrap_or(Some(0)),
            Objective::External(_) => None,
        }
    };

    struct Best {
        value: i128,
        x: Vec<i128>,
        seq: Vec<usize>,
    }
    let mut best: Option<Best> = None;
    let mut reached: Vec<Vec<i128>> = Vec::new();
    let mut seq = vec![0usize; inst.horizon];
    let mut stack: Vec<Vec<i128>> = vec![start];

    // depth-first over sequences; an explicit work vector per depth
    // avoids re-deriving prefixes
    fn recurse(
        n: usize,
        horizon: usize,
        mats: &[Vec<i128>],
        eval: &dyn Fn(&[i128]) -> Option<i128>,
        depth: usize,
        stack: &mut Vec<Vec<i128>>,
        seq: &mut Vec<usize>,
        best: &mut Option<Best>,
        reached: &mut Vec<Vec<i128>>,
    ) -> Option<()> {
        if depth == horizon {
            let x = stack.last().unwrap();
            let v = eval(x)?;
            let replace = match best {
                None => true,
                Some(b) => v > b.value || (v == b.value && x < &b.x),
            };
            if replace {
                *best = Some(Best { value: v, x: x.clone(), seq: seq.clone() });
            }
            reached.push(x.clone());
            return Some(());
        }
        for mi in 0..mats.len() {
            let mut next = vec![0i128; n];
            {
                let x = stack.last().unwrap();
                let m = &mats[mi];
                for (i, slot) in next.iter_mut().enumerate() {
                    let mut acc = 0i128;
                    for j in 0..n {
                        acc = acc.checked_add(m[i * n + j].checked_mul(x[j])?)?;
                    }
                    *slot = acc;
                }
            }
            seq[depth] = mi;
            stack.push(next);
            let r = recurse(n, horizon, mats, eval, depth + 1, stack, seq, best, reached);
            stack.pop();
            r?;
        }
        Some(())
    }
    if recurse(n, inst.horizon, &mats, &eval, 0, &mut stack, &mut seq, &mut best, &mut reached)
        .is_none()
    {
        return Ok(None);
    }

    let best = best.expect("at least one sequence exists");
    reached.sort_unstable();
    reached.dedup();
    let points: Vec<Vector<T>> = reached
        .into_iter()
        .map(|x| Vector::new(x.into_iter().map(T::from_i128).collect()))
        .collect();
    Ok(Some((
        T::from_i128(best.value),
        best.seq,
        PointSet::new(inst.dim, points)?,
    )))
}

/// Full-enumeration oracle: the exact maximizer over all `m^K`
/// sequences, plus the deduplicated reachable set at the horizon.
pub fn brute_force<T: Num>(
    inst: &Instance<T>,
    options: &SolverOptions,
) -> Result<(T, Vec<usize>, PointSet<T>)> {
    let m = inst.num_matrices() as u128;
    let mut count: u128 = 1;
    for _ in 0..inst.horizon {
        count = count.saturating_mul(m);
        if count > options.brute_force_cap as u128 {
            return Err(Error::EnumerationCap { candidates: count, cap: options.brute_force_cap });
        }
    }

    if T::EXACT {
        if let Some(fast) = brute_force_i128(inst)? {
            return Ok(fast);
        }
    }

    struct Best<T: Num> {
        value: T,
        x: Vector<T>,
        seq: Vec<usize>,
    }
    let mut best: Option<Best<T>> = None;
    let mut reached: Vec<Vector<T>> = Vec::new();
    let mut seq = vec![0usize; inst.horizon];

    fn recurse<T: Num>(
        inst: &Instance<T>,
        depth: usize,
        x: Vector<T>,
        seq: &mut Vec<usize>,
        best: &mut Option<Best<T>>,
        reached: &mut Vec<Vector<T>>,
    ) -> Result<()> {
        if depth == inst.horizon {
            let v = evaluate_objective(&inst.objective, &x)?;
            let replace = match best {
                None => true,
                Some(b) => match v.total_cmp(&b.value) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => x.lex_cmp(&b.x) == std::cmp::Ordering::Less,
                    std::cmp::Ordering::Less => false,
                },
            };
            if replace {
                *best = Some(Best { value: v, x: x.clone(), seq: seq.clone() });
            }
            reached.push(x);
            return Ok(());
        }
        for (mi, mat) in inst.matrices.iter().enumerate() {
            seq[depth] = mi;
            recurse(inst, depth + 1, mat.mat_vec(&x)?, seq, best, reached)?;
        }
        Ok(())
    }
    recurse(inst, 0, inst.start.clone(), &mut seq, &mut best, &mut reached)?;

    let best = best.expect("at least one sequence exists");
    let x_k = dedup_points(&reached, &options.hull);
    Ok((best.value, best.seq, PointSet::new(inst.dim, x_k)?))
}
