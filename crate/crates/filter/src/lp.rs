//! Dense revised simplex for small inequality-form linear programs.
//!
//! `min c.x  s.t.  A x <= b` with free `x` is solved through its dual
//! `min b.y  s.t.  A^T y = -c, y >= 0`, which has one row per primal variable.
//! The primal solution is read off the simplex multipliers of the dual basis,
//! so the basis stays tiny even with thousands of constraints.

use nalgebra::{DMatrix, DVector};

use crate::FilterError;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const MAX_ITER: usize = 50_000;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves `min c.x s.t. rows[i].x <= b[i]` for free `x`.
pub fn minimize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, FilterError> {
    let m = c.len();
    let n = rows.len();
    assert_eq!(b.len(), n);
    // Standard form: M y = e, y >= 0 with M = A^T, e = -c, costs d = b.
    // Columns: n dual variables followed by m artificials.
    let mut sign = vec![1.0; m];
    for i in 0..m {
        if -c[i] < 0.0 {
            sign[i] = -1.0;
        }
    }
    let col = |j: usize| -> DVector<f64> {
        if j < n {
            DVector::from_fn(m, |i, _| sign[i] * rows[j][i])
        } else {
            let mut v = DVector::zeros(m);
            v[j - n] = 1.0;
            v
        }
    };
    let e = DVector::from_fn(m, |i, _| sign[i] * -c[i]);
    let columns: Vec<DVector<f64>> = (0..n + m).map(col).collect();

    let mut basis: Vec<usize> = (n..n + m).collect();
    let phase1_cost = |j: usize| if j >= n { 1.0 } else { 0.0 };
    let mut iterations = run_simplex(&columns, &e, &mut basis, &phase1_cost, n + m, 0)?;

    let binv = basis_inverse(&columns, &basis)?;
    let xb = &binv * &e;
    let infeas: f64 = basis.iter().zip(xb.iter()).filter(|(&j, _)| j >= n).map(|(_, v)| *v).sum();
    if infeas > 1e-8 {
        return Err(FilterError::LpFailed(format!("dual infeasible (phase I residual {infeas:e})")));
    }
    // Pivot zero-level artificials out where possible.
    for r in 0..m {
        if basis[r] < n {
            continue;
        }
        let binv = basis_inverse(&columns, &basis)?;
        let row = binv.row(r);
        if let Some(j) = (0..n).filter(|j| !basis.contains(j)).find(|&j| (row * &columns[j])[0].abs() > 1e-7) {
            basis[r] = j;
        }
    }

    let phase2_cost = |j: usize| if j < n { b[j] } else { f64::INFINITY };
    iterations += run_simplex(&columns, &e, &mut basis, &phase2_cost, n, iterations)?;

    let binv = basis_inverse(&columns, &basis)?;
    let cb = DVector::from_fn(m, |i, _| if basis[i] < n { b[basis[i]] } else { 0.0 });
    let pi = binv.transpose() * cb;
    let x: Vec<f64> = (0..m).map(|i| sign[i] * pi[i]).collect();
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective, iterations })
}

fn basis_inverse(columns: &[DVector<f64>], basis: &[usize]) -> Result<DMatrix<f64>, FilterError> {
    let m = basis.len();
    let bm = DMatrix::from_fn(m, m, |i, k| columns[basis[k]][i]);
    bm.try_inverse().ok_or_else(|| FilterError::LpFailed("singular basis".into()))
}

/// Runs simplex iterations over columns `0..n_enter`; returns the iteration count.
fn run_simplex(
    columns: &[DVector<f64>],
    e: &DVector<f64>,
    basis: &mut [usize],
    cost: &dyn Fn(usize) -> f64,
    n_enter: usize,
    start_iter: usize,
) -> Result<usize, FilterError> {
    let m = basis.len();
    let mut degenerate_run = 0usize;
    for it in 0.. {
        if start_iter + it > MAX_ITER {
            return Err(FilterError::LpFailed("iteration limit".into()));
        }
        let binv = basis_inverse(columns, basis)?;
        let xb = &binv * e;
        let cb = DVector::from_fn(m, |i, _| {
            let c = cost(basis[i]);
            if c.is_finite() {
                c
            } else {
                0.0
            }
        });
        let pi = binv.transpose() * cb;
        let bland = degenerate_run > 50;
        let mut entering = None;
        let mut best = -COST_TOL;
        for j in 0..n_enter {
            if basis.contains(&j) {
                continue;
            }
            let cj = cost(j);
            if !cj.is_finite() {
                continue;
            }
            let r = cj - pi.dot(&columns[j]);
            if r < best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = r;
            }
        }
        let Some(q) = entering else {
            return Ok(it);
        };
        let u = &binv * &columns[q];
        let tol = PIVOT_TOL * u.amax().max(1.0);
        let mut leave: Option<usize> = None;
        let mut ratio = f64::INFINITY;
        for i in 0..m {
            if u[i] > tol {
                let t = xb[i].max(0.0) / u[i];
                let tie = (t - ratio).abs() <= 1e-12;
                let better_tie = leave.map_or(true, |l| if bland { basis[i] < basis[l] } else { u[i] > u[l] });
                if (t < ratio && !tie) || (tie && better_tie) {
                    ratio = ratio.min(t);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(FilterError::LpFailed("unbounded dual (primal infeasible)".into()));
        };
        degenerate_run = if ratio < 1e-12 { degenerate_run + 1 } else { 0 };
        basis[r] = q;
    }
    unreachable!()
}
