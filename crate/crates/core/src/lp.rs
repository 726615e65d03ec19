//! Dense two-phase primal simplex, generic over the scalar domain.
//!
//! In exact mode every pivot is rational and entering columns are chosen
//! by Bland's rule, so the method terminates on degenerate problems and
//! returns exact optima. In float mode the same code runs with an
//! absolute pivot/reduced-cost tolerance.
//!
//! The solution carries dual multipliers for every constraint row; the
//! hull module reads its separating hyperplanes out of them.

use crate::error::{Error, Result};
use crate::num::{sign_tol, Num};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    NonNeg,
    Free,
}

#[derive(Clone, Debug)]
pub struct LpConstraint<T: Num> {
    pub coeffs: Vec<T>,
    pub rel: Relation,
    pub rhs: T,
}

/// `maximize objective . x` subject to the rows; variables are
/// non-negative unless marked free.
#[derive(Clone, Debug)]
pub struct LpProblem<T: Num> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub var_kinds: Vec<VarKind>,
    pub rows: Vec<LpConstraint<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T: Num> {
    pub status: LpStatus,
    pub objective: T,
    /// Values of the original variables (empty unless optimal).
    pub primal: Vec<T>,
    /// One multiplier per constraint row (empty unless optimal).
    pub duals: Vec<T>,
}

struct Tableau<T: Num> {
    rows: Vec<Vec<T>>, // m x ncols
    rhs: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
    eps: f64,
}

impl<T: Num> Tableau<T> {
    fn sign(&self, v: &T) -> i8 {
        sign_tol(v, self.eps, &T::one())
    }

    fn pivot(&mut self, row: usize, col: usize, obj: &mut Vec<T>, obj_val: &mut T) {
        let p = self.rows[row][col].clone();
        for c in 0..self.ncols {
            self.rows[row][c] = self.rows[row][c].div(&p);
        }
        self.rhs[row] = self.rhs[row].div(&p);
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let f = self.rows[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..self.ncols {
                let v = self.rows[r][c].sub(&f.mul(&self.rows[row][c]));
                self.rows[r][c] = v;
            }
            self.rhs[r] = self.rhs[r].sub(&f.mul(&self.rhs[row]));
        }
        let f = obj[col].clone();
        if !f.is_zero() {
            for c in 0..self.ncols {
                obj[c] = obj[c].sub(&f.mul(&self.rows[row][c]));
            }
            *obj_val = obj_val.sub(&f.mul(&self.rhs[row]));
        }
        self.basis[row] = col;
    }

    /// Entering column by steepest reduced cost at first; after enough
    /// iterations without finishing, fall back to Bland's rule (lowest
    /// eligible index, lowest-index basic variable on ratio ties), which
    /// cannot cycle. The ratio test always breaks ties Bland-style.
    fn optimize(&mut self, obj: &mut Vec<T>, obj_val: &mut T, allowed: &[bool]) -> Result<LpStatus> {
        let bland_after = 100 + 20 * self.rows.len();
        let max_iters = bland_after + 1000 + 50 * (self.rows.len() + self.ncols) * (self.rows.len() + 1);
        for iter in 0..max_iters {
            let mut entering: Option<usize> = None;
            if iter < bland_after {
                for c in 0..self.ncols {
                    if allowed[c] && self.sign(&obj[c]) < 0 {
                        let steeper = match entering {
                            None => true,
                            Some(e) => obj[c].total_cmp(&obj[e]) == std::cmp::Ordering::Less,
                        };
                        if steeper {
                            entering = Some(c);
                        }
                    }
                }
            } else {
                for c in 0..self.ncols {
                    if allowed[c] && self.sign(&obj[c]) < 0 {
                        entering = Some(c);
                        break;
                    }
                }
            }
            let Some(col) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                if self.sign(&self.rows[r][col]) <= 0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(lr) => {
                        // compare rhs[r]/a[r] vs rhs[lr]/a[lr] without division
                        let lhs = self.rhs[r].mul(&self.rows[lr][col]);
                        let rhs = self.rhs[lr].mul(&self.rows[r][col]);
                        match self.sign(&lhs.sub(&rhs)) {
                            -1 => true,
                            0 => self.basis[r] < self.basis[lr],
                            _ => false,
                        }
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            let Some(row) = leave else {
                return Ok(LpStatus::Unbounded);
            };
            self.pivot(row, col, obj, obj_val);
        }
        Err(Error::LpStatus("iteration limit reached (cycling?)".into()))
    }
}

/// Solves the problem with a two-phase dense simplex. `eps` is the float
/// pivot tolerance; exact mode ignores it.
pub fn lp_solve<T: Num>(p: &LpProblem<T>, eps: f64) -> Result<LpSolution<T>> {
    assert_eq!(p.objective.len(), p.num_vars);
    assert_eq!(p.var_kinds.len(), p.num_vars);

    // column layout: structural columns (free vars split into +/-),
    // then one slack/surplus per Le/Ge row, then artificials.
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(p.num_vars);
    let mut nstruct = 0usize;
    for kind in &p.var_kinds {
        match kind {
            VarKind::NonNeg => {
                col_of_var.push((nstruct, None));
                nstruct += 1;
            }
            VarKind::Free => {
                col_of_var.push((nstruct, Some(nstruct + 1)));
                nstruct += 2;
            }
        }
    }
    let m = p.rows.len();
    let mut naux = 0usize; // slack + surplus
    for row in &p.rows {
        if matches!(row.rel, Relation::Le | Relation::Ge) {
            naux += 1;
        }
    }
    // worst case: every row gets an artificial
    let ncols = nstruct + naux + m;

    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut negated: Vec<bool> = Vec::with_capacity(m);
    let mut dual_col: Vec<usize> = Vec::with_capacity(m);
    let mut artificial = vec![false; ncols];
    let mut next_aux = nstruct;
    let mut next_art = nstruct + naux;

    for con in &p.rows {
        assert_eq!(con.coeffs.len(), p.num_vars);
        let flip = sign_tol(&con.rhs, 0.0, &T::one()) < 0;
        let mut rel = con.rel;
        if flip {
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        let mut row = vec![T::zero(); ncols];
        for (v, coef) in con.coeffs.iter().enumerate() {
            let c = if flip { coef.neg() } else { coef.clone() };
            let (plus, minus) = col_of_var[v];
            row[plus] = row[plus].add(&c);
            if let Some(mc) = minus {
                row[mc] = row[mc].sub(&c);
            }
        }
        let b = if flip { con.rhs.neg() } else { con.rhs.clone() };
        match rel {
            Relation::Le => {
                row[next_aux] = T::one();
                basis.push(next_aux);
                dual_col.push(next_aux);
                next_aux += 1;
            }
            Relation::Ge => {
                row[next_aux] = T::one().neg();
                next_aux += 1;
                row[next_art] = T::one();
                artificial[next_art] = true;
                basis.push(next_art);
                dual_col.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = T::one();
                artificial[next_art] = true;
                basis.push(next_art);
                dual_col.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
        negated.push(flip);
    }

    let mut tab = Tableau { rows, rhs, basis, ncols, eps };

    // phase 1: maximize -(sum of artificials)
    let needs_phase1 = artificial.iter().any(|&a| a);
    if needs_phase1 {
        let mut obj = vec![T::zero(); ncols];
        let mut obj_val = T::zero();
        // reduced costs z_j - c_j with the initial (identity) basis
        for r in 0..m {
            if artificial[tab.basis[r]] {
                for c in 0..ncols {
                    obj[c] = obj[c].sub(&tab.rows[r][c]);
                }
                obj_val = obj_val.sub(&tab.rhs[r]);
            }
        }
        for (c, flag) in artificial.iter().enumerate() {
            if *flag {
                obj[c] = obj[c].add(&T::one());
            }
        }
        let allowed = vec![true; ncols];
        let status = tab.optimize(&mut obj, &mut obj_val, &allowed)?;
        debug_assert_eq!(status, LpStatus::Optimal);
        // obj_val is -(phase-1 optimum); nonzero artificial sum = infeasible
        if sign_tol(&obj_val, eps * 10.0, &T::one()) < 0 {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: T::zero(),
                primal: vec![],
                duals: vec![],
            });
        }
        // drive basic artificials out where possible
        for r in 0..m {
            if !artificial[tab.basis[r]] {
                continue;
            }
            let mut obj_dummy = vec![T::zero(); ncols];
            let mut val_dummy = T::zero();
            if let Some(c) = (0..nstruct + naux).find(|&c| tab.sign(&tab.rows[r][c]) != 0) {
                tab.pivot(r, c, &mut obj_dummy, &mut val_dummy);
            }
        }
    }

    // phase 2
    let mut cost = vec![T::zero(); ncols];
    for (v, coef) in p.objective.iter().enumerate() {
        let (plus, minus) = col_of_var[v];
        cost[plus] = cost[plus].add(coef);
        if let Some(mc) = minus {
            cost[mc] = cost[mc].sub(coef);
        }
    }
    let mut obj = vec![T::zero(); ncols];
    let mut obj_val = T::zero();
    for r in 0..m {
        let cb = &cost[tab.basis[r]];
        if cb.is_zero() {
            continue;
        }
        for c in 0..ncols {
            obj[c] = obj[c].add(&cb.mul(&tab.rows[r][c]));
        }
        obj_val = obj_val.add(&cb.mul(&tab.rhs[r]));
    }
    for c in 0..ncols {
        obj[c] = obj[c].sub(&cost[c]);
    }
    let allowed: Vec<bool> = artificial.iter().map(|&a| !a).collect();
    match tab.optimize(&mut obj, &mut obj_val, &allowed)? {
        LpStatus::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: T::zero(),
                primal: vec![],
                duals: vec![],
            })
        }
        LpStatus::Optimal => {}
        LpStatus::Infeasible => unreachable!(),
    }

    let mut col_val = vec![T::zero(); ncols];
    for r in 0..m {
        col_val[tab.basis[r]] = tab.rhs[r].clone();
    }
    let mut primal = Vec::with_capacity(p.num_vars);
    for &(plus, minus) in &col_of_var {
        let v = match minus {
            Some(mc) => col_val[plus].sub(&col_val[mc]),
            None => col_val[plus].clone(),
        };
        primal.push(v);
    }
    // for a max problem the dual of row i is the reduced cost of its
    // original slack/artificial column (cost 0), negated back if the row
    // was normalized by -1
    let mut duals = Vec::with_capacity(m);
    for r in 0..m {
        let y = obj[dual_col[r]].clone();
        duals.push(if negated[r] { y.neg() } else { y });
    }

    Ok(LpSolution { status: LpStatus::Optimal, objective: obj_val, primal, duals })
}
