//! Constructive reductions in and out of the switching problem.
//!
//! 3-SAT embeds into the problem with two block-diagonal binary matrices
//! (the hardness side); conversely, k-step mortality of a non-negative
//! family and a lower bound on the joint spectral radius are obtained by
//! running the solver with a particular start vector and objective. A
//! mixed-integer nonlinear formulation can be exported as AMPL text for
//! cross-checking against general-purpose solvers.

use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::linalg::{Matrix, Vector};
use crate::num::Num;
use crate::solver::{solve, SolverOptions};

// ---------------------------------------------------------------------
// 3-CNF formulas

/// A 3-CNF formula: clauses of exactly three literals, where literal
/// `v > 0` means variable v and `-v` its negation (variables 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &lit in c {
                let v = lit.unsigned_abs() as usize;
                if lit == 0 || v > num_vars {
                    return Err(Error::MalformedClause(format!(
                        "literal {} out of range for {} variables",
                        lit, num_vars
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }
}

/// Parses DIMACS CNF text. Clauses must have exactly three literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut num_vars = None;
    let mut lits: Vec<i32> = Vec::new();
    let mut clauses: Vec<[i32; 3]> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(Error::Schema {
                    field: "p".into(),
                    message: format!("bad problem line: {}", line),
                });
            }
            num_vars = Some(parts[1].parse::<usize>().map_err(|e| Error::Schema {
                field: "p".into(),
                message: e.to_string(),
            })?);
            continue;
        }
        for tok in line.split_whitespace() {
            if tok == "0" {
                if lits.len() != 3 {
                    return Err(Error::MalformedClause(format!(
                        "clause with {} literals (exactly 3 required)",
                        lits.len()
                    )));
                }
                clauses.push([lits[0], lits[1], lits[2]]);
                lits.clear();
            } else {
                lits.push(tok.parse::<i32>().map_err(|e| Error::Schema {
                    field: "clause".into(),
                    message: e.to_string(),
                })?);
            }
        }
    }
    if !lits.is_empty() {
        return Err(Error::MalformedClause("unterminated clause".into()));
    }
    let num_vars = num_vars.ok_or(Error::Schema {
        field: "p".into(),
        message: "missing problem line".into(),
    })?;
    CnfFormula::new(num_vars, clauses)
}

/// Number of clauses satisfied by a full assignment (`assignment[v-1]`
/// is the value of variable v).
pub fn count_satisfied(f: &CnfFormula, assignment: &[bool]) -> usize {
    f.clauses
        .iter()
        .filter(|c| {
            c.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    assignment[v]
                } else {
                    !assignment[v]
                }
            })
        })
        .count()
}

/// Complete satisfiability oracle: plain DPLL with unit propagation.
/// Intended for small formulas only (tens of variables).
pub fn dpll_satisfiable(f: &CnfFormula) -> bool {
    fn value(lit: i32, assign: &[Option<bool>]) -> Option<bool> {
        let v = lit.unsigned_abs() as usize - 1;
        assign[v].map(|b| if lit > 0 { b } else { !b })
    }
    fn recurse(clauses: &[[i32; 3]], assign: &mut Vec<Option<bool>>) -> bool {
        // unit propagation
        loop {
            let mut unit = None;
            for c in clauses {
                let mut unassigned = None;
                let mut satisfied = false;
                let mut free = 0;
                for &lit in c {
                    match value(lit, assign) {
                        Some(true) => satisfied = true,
                        Some(false) => {}
                        None => {
                            free += 1;
                            unassigned = Some(lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                if free == 0 {
                    return false;
                }
                if free == 1 {
                    unit = unassigned;
                    break;
                }
            }
            match unit {
                Some(lit) => {
                    let v = lit.unsigned_abs() as usize - 1;
                    assign[v] = Some(lit > 0);
                }
                None => break,
            }
        }
        let Some(branch) = assign.iter().position(|a| a.is_none()) else {
            return clauses.iter().all(|c| c.iter().any(|&l| value(l, assign) == Some(true)));
        };
        for b in [true, false] {
            let saved = assign.clone();
            assign[branch] = Some(b);
            if recurse(clauses, assign) {
                return true;
            }
            *assign = saved;
        }
        false
    }
    let mut assign = vec![None; f.num_vars];
    recurse(&f.clauses, &mut assign)
}

// ---------------------------------------------------------------------
// 3-SAT -> switching instance

/// A switching instance encoding a 3-CNF formula. The formula with m
/// clauses over n variables is satisfiable exactly when the optimal
/// value reaches `threshold` = m; each sequence's value counts its
/// satisfied clauses.
#[derive(Clone, Debug)]
pub struct ReductionArtifact<T: Num> {
    pub instance: Instance<T>,
    pub threshold: T,
    /// True for the row-stochastic variant (transposed matrices with
    /// start and cost vectors swapped, sequence read in reverse time).
    pub transposed: bool,
    num_vars: usize,
}

impl<T: Num> ReductionArtifact<T> {
    /// Truth assignment encoded by a switching sequence: variable t is
    /// true when the first matrix is applied at (forward time) step t.
    pub fn assignment_from_sequence(&self, seq: &[usize]) -> Vec<bool> {
        assert_eq!(seq.len(), self.num_vars);
        (0..self.num_vars)
            .map(|t| {
                let idx = if self.transposed { self.num_vars - 1 - t } else { t };
                seq[idx] == 0
            })
            .collect()
    }
}

/// Per-clause walk gadget on 2n+1 nodes. Matrix convention: entry
/// (u, v) = 1 when the gadget graph has an arc u -> v, so applying the
/// matrix to an indicator vector moves mass from a node to the source of
/// its unique incoming arc. Node l < 2n has incoming arc from l+1, except
/// that node l <= n has it from n+l+1 when the clause contains the
/// gadget's literal for variable l; node 2n+1 carries a self-loop. A walk
/// that starts at node 1 climbs one node per step and reaches the
/// absorbing node 2n+1 within n steps exactly when some step's literal
/// satisfies the clause.
fn clause_block<T: Num>(clause: &[i32; 3], num_vars: usize, negated: bool) -> Matrix<T> {
    let size = 2 * num_vars + 1;
    let mut m = Matrix::zeros(size);
    // incoming arc of node l (1-based): source s means entry (s-1, l-1)
    for l in 1..=2 * num_vars {
        let lit = if negated { -(l as i32) } else { l as i32 };
        let source = if l <= num_vars && clause.contains(&lit) { num_vars + l + 1 } else { l + 1 };
        m.set(source - 1, l - 1, T::one());
    }
    m.set(size - 1, size - 1, T::one());
    m
}

fn block_diagonal<T: Num>(blocks: &[Matrix<T>]) -> Matrix<T> {
    let total: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut m = Matrix::zeros(total);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.dim() {
            for c in 0..b.dim() {
                if !b.get(r, c).is_zero() {
                    m.set(off + r, off + c, b.get(r, c).clone());
                }
            }
        }
        off += b.dim();
    }
    m
}

/// Builds the switching instance whose optimum decides the formula: two
/// column-stochastic binary matrices of size m(2n+1), horizon n, linear
/// objective summing the per-clause absorbing coordinates. Set
/// `transposed` for the row-stochastic variant.
pub fn sat_to_instance<T: Num>(f: &CnfFormula, transposed: bool) -> Result<ReductionArtifact<T>> {
    let n = f.num_vars;
    if n == 0 || f.clauses.is_empty() {
        return Err(Error::MalformedClause("empty formula".into()));
    }
    let block = 2 * n + 1;
    let total = f.num_clauses() * block;
    let blocks_a: Vec<Matrix<T>> = f.clauses.iter().map(|c| clause_block(c, n, false)).collect();
    let blocks_b: Vec<Matrix<T>> = f.clauses.iter().map(|c| clause_block(c, n, true)).collect();
    let mut mat_a = block_diagonal(&blocks_a);
    let mut mat_b = block_diagonal(&blocks_b);
    let mut start = vec![T::zero(); total];
    let mut cost = vec![T::zero(); total];
    for j in 0..f.num_clauses() {
        start[j * block] = T::one();
        cost[j * block + block - 1] = T::one();
    }
    let (mut a, mut c) = (Vector::new(start), Vector::new(cost));
    if transposed {
        mat_a = mat_a.transpose();
        mat_b = mat_b.transpose();
        std::mem::swap(&mut a, &mut c);
    }
    let instance = Instance::new(vec![mat_a, mat_b], a, n, Objective::Linear(c))?;
    Ok(ReductionArtifact {
        instance,
        threshold: T::from_i64(f.num_clauses() as i64),
        transposed,
        num_vars: n,
    })
}

// ---------------------------------------------------------------------
// mortality

/// Whether some length-k product of the (entrywise non-negative)
/// matrices is the zero matrix: equivalently, whether the maximum of
/// -1.x(k) from the all-ones start vector is 0.
pub fn check_k_mortal<T: Num>(
    matrices: &[Matrix<T>],
    k: usize,
    options: &SolverOptions,
) -> Result<bool> {
    let n = matrices.first().ok_or(Error::EmptyPointSet)?.dim();
    for m in matrices {
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                if *m.get(r, c) < T::zero() {
                    return Err(Error::NegativeEntries);
                }
            }
        }
    }
    let ones = Vector::new(vec![T::one(); n]);
    let neg_ones = Vector::new(vec![T::one().neg(); n]);
    let inst = Instance::new(matrices.to_vec(), ones, k, Objective::Linear(neg_ones))?;
    let r = solve(&inst, options)?;
    Ok(r.value.is_zero())
}

// ---------------------------------------------------------------------
// joint spectral radius

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormP {
    L1,
    L2,
    LInf,
}

/// Lower bound on the k-step joint spectral radius estimate: the k-th
/// root of the maximal final-state p-norm from a unit-norm start vector.
pub fn jsr_lower_bound<T: Num>(
    matrices: &[Matrix<T>],
    k: usize,
    a: &Vector<T>,
    p: NormP,
    options: &SolverOptions,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Unsupported("k must be positive".into()));
    }
    let norm = match p {
        NormP::L1 => a.entries().iter().map(|e| e.abs().to_f64()).sum::<f64>(),
        NormP::L2 => a.entries().iter().map(|e| e.to_f64().powi(2)).sum::<f64>().sqrt(),
        NormP::LInf => a.max_abs().to_f64(),
    };
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitNorm(format!("{:?}", p)));
    }
    let objective = match p {
        NormP::L1 => Objective::L1,
        NormP::L2 => Objective::L2Sq,
        NormP::LInf => Objective::LInf,
    };
    let inst = Instance::new(matrices.to_vec(), a.clone(), k, objective)?;
    let r = solve(&inst, options)?;
    let v = r.value.to_f64();
    Ok(match p {
        NormP::L2 => v.powf(1.0 / (2.0 * k as f64)),
        _ => v.powf(1.0 / k as f64),
    })
}

// ---------------------------------------------------------------------
// MINLP export

#[derive(Clone, Debug)]
pub struct MinlpExport {
    pub model: String,
    pub data: String,
}

fn format_scalar<T: Num>(v: &T) -> Result<String> {
    if !T::EXACT {
        return Ok(format!("{}", v.to_f64()));
    }
    // exact mode prints terminating decimals only
    let s = format!("{}", v);
    match s.split_once('/') {
        None => Ok(s),
        Some((num, den)) => {
            let mut d: u128 = den.parse().map_err(|_| {
                Error::Unsupported(format!("denominator {} too large for decimal export", den))
            })?;
            let mut shift = 0u32;
            while d % 2 == 0 {
                d /= 2;
                shift += 1;
            }
            let mut fives = 0u32;
            while d % 5 == 0 {
                d /= 5;
                fives += 1;
            }
            if d != 1 {
                return Err(Error::Unsupported(format!(
                    "exact value {} has no terminating decimal expansion",
                    s
                )));
            }
            let digits = shift.max(fives);
            let num: i128 = num.parse().map_err(|_| {
                Error::Unsupported(format!("numerator {} too large for decimal export", num))
            })?;
            let den: i128 = den.parse().unwrap();
            let scaled = num * 10i128.pow(digits) / den;
            let neg = scaled < 0;
            let mag = scaled.unsigned_abs().to_string();
            let mag = if mag.len() <= digits as usize {
                format!("0.{}{}", "0".repeat(digits as usize - mag.len()), mag)
            } else {
                let (int, frac) = mag.split_at(mag.len() - digits as usize);
                format!("{}.{}", int, frac)
            };
            Ok(if neg { format!("-{}", mag) } else { mag })
        }
    }
}

/// AMPL text for the bilinear mixed-integer formulation: state variables
/// x[i,k], assignment binaries z[k,l], dynamics
/// x[i,k] = sum_l z[k,l] * (row i of A_l applied to x[.,k-1]), and the
/// terminal objective. Constraints are emitted fully expanded, one per
/// (state, step); the data file repeats the dimensions, matrices, and
/// start vector for mechanical consumption. Output is byte-stable for a
/// given instance. Only linear and squared-norm objectives export.
pub fn export_minlp<T: Num>(inst: &Instance<T>) -> Result<MinlpExport> {
    let n = inst.dim;
    let m = inst.num_matrices();
    let k_max = inst.horizon;
    let obj = match &inst.objective {
        Objective::L2Sq => (1..=n)
            .map(|i| format!("x[{},{}]^2", i, k_max))
            .collect::<Vec<_>>()
            .join(" + "),
        Objective::Linear(c) => {
            let terms: Result<Vec<String>> = (1..=n)
                .map(|i| Ok(format!("{}*x[{},{}]", format_scalar(c.get(i - 1))?, i, k_max)))
                .collect();
            terms?.join(" + ")
        }
        other => {
            return Err(Error::Unsupported(format!(
                "objective {:?} has no bilinear export",
                other
            )))
        }
    };
    let mut model = String::new();
    model.push_str(&format!("# switching MINLP: n={} m={} K={}\n", n, m, k_max));
    model.push_str(&format!("var x{{1..{}, 0..{}}};\n", n, k_max));
    if k_max > 0 {
        model.push_str(&format!("var z{{1..{}, 1..{}}} binary;\n", k_max, m));
    }
    model.push_str(&format!("maximize obj: {};\n", obj));
    for i in 1..=n {
        model.push_str(&format!(
            "s.t. init_{}: x[{},0] = {};\n",
            i,
            i,
            format_scalar(inst.start.get(i - 1))?
        ));
    }
    for k in 1..=k_max {
        for i in 1..=n {
            let mut parts = Vec::with_capacity(m);
            for (l, mat) in inst.matrices.iter().enumerate() {
                let row: Result<Vec<String>> = (1..=n)
                    .map(|j| {
                        Ok(format!("{}*x[{},{}]", format_scalar(mat.get(i - 1, j - 1))?, j, k - 1))
                    })
                    .collect();
                parts.push(format!("z[{},{}]*({})", k, l + 1, row?.join(" + ")));
            }
            model.push_str(&format!(
                "s.t. dyn_{}_{}: x[{},{}] = {};\n",
                i,
                k,
                i,
                k,
                parts.join(" + ")
            ));
        }
        let assign: Vec<String> = (1..=m).map(|l| format!("z[{},{}]", k, l)).collect();
        model.push_str(&format!("s.t. assign_{}: {} = 1;\n", k, assign.join(" + ")));
    }

    let mut data = String::new();
    data.push_str(&format!("param n := {};\n", n));
    data.push_str(&format!("param m := {};\n", m));
    data.push_str(&format!("param K := {};\n", k_max));
    data.push_str("param a :=\n");
    for i in 1..=n {
        data.push_str(&format!("{} {}\n", i, format_scalar(inst.start.get(i - 1))?));
    }
    data.push_str(";\nparam A :=\n");
    for (l, mat) in inst.matrices.iter().enumerate() {
        for i in 1..=n {
            for j in 1..=n {
                data.push_str(&format!(
                    "[{},{},{}] {}\n",
                    l + 1,
                    i,
                    j,
                    format_scalar(mat.get(i - 1, j - 1))?
                ));
            }
        }
    }
    data.push_str(";\n");
    Ok(MinlpExport { model, data })
}
