use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::detect::CollisionConstraint;
use crate::rig::CollisionKind;
use crate::{Error, Result};

pub const DEFAULT_W1: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Free,
    Lower,
    Upper,
}

/// Minimizes `w1 * |A x - b|^2 + lambda * |x|^2` subject to `lo <= x <= hi`
/// with a primal active-set method. Each free subproblem is solved by
/// Cholesky factorization, falling back to the minimum-norm pseudo-inverse
/// solution when the reduced normal matrix is singular.
pub fn box_ridge_lsq(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    w1: f64,
    lambda: f64,
    lo: &[f64],
    hi: &[f64],
) -> Result<DVector<f64>> {
    let n = a.ncols();
    if a.nrows() != b.len() || lo.len() != n || hi.len() != n {
        return Err(Error::invalid("inconsistent least-squares dimensions"));
    }
    if lo.iter().zip(hi).any(|(l, h)| l.partial_cmp(h).is_none_or(|o| o.is_gt())) {
        return Err(Error::invalid("lower bound exceeds upper bound"));
    }
    let q = a.transpose() * a * w1 + DMatrix::identity(n, n) * lambda;
    let c = -(a.transpose() * b) * w1;
    let scale = q.diagonal().amax().max(c.amax()).max(1.0);
    let tol = 1e-12 * scale;

    let mut x = DVector::from_fn(n, |i, _| 0.0f64.clamp(lo[i], hi[i]));
    let mut state: Vec<Bound> = (0..n)
        .map(|i| {
            if x[i] == lo[i] {
                Bound::Lower
            } else if x[i] == hi[i] {
                Bound::Upper
            } else {
                Bound::Free
            }
        })
        .collect();

    for _ in 0..(100 + 20 * n) {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == Bound::Free).collect();
        let y = solve_free(&q, &c, &x, &free)?;
        let feasible = free
            .iter()
            .zip(y.iter())
            .all(|(&i, &v)| v >= lo[i] - 1e-14 && v <= hi[i] + 1e-14);
        if feasible {
            for (&i, &v) in free.iter().zip(y.iter()) {
                x[i] = v.clamp(lo[i], hi[i]);
            }
            let g = &q * &x + &c;
            let mut worst = None;
            let mut worst_violation = tol;
            for i in 0..n {
                if lo[i] == hi[i] {
                    continue;
                }
                let violation = match state[i] {
                    Bound::Free => continue,
                    Bound::Lower => -g[i],
                    Bound::Upper => g[i],
                };
                if violation > worst_violation {
                    worst_violation = violation;
                    worst = Some(i);
                }
            }
            match worst {
                Some(i) => state[i] = Bound::Free,
                None => return Ok(x),
            }
        } else {
            let mut alpha = 1.0;
            let mut blocking = None;
            for (&i, &v) in free.iter().zip(y.iter()) {
                let step = v - x[i];
                let (limit, side) = if v < lo[i] {
                    (lo[i], Bound::Lower)
                } else if v > hi[i] {
                    (hi[i], Bound::Upper)
                } else {
                    continue;
                };
                let t = if step == 0.0 { 0.0 } else { (limit - x[i]) / step };
                if t < alpha || blocking.is_none() {
                    alpha = t.clamp(0.0, 1.0);
                    blocking = Some((i, side));
                }
            }
            for (&i, &v) in free.iter().zip(y.iter()) {
                x[i] = (x[i] + alpha * (v - x[i])).clamp(lo[i], hi[i]);
            }
            if let Some((i, side)) = blocking {
                x[i] = if side == Bound::Lower { lo[i] } else { hi[i] };
                state[i] = side;
            }
        }
    }
    Err(Error::Numerical("active-set iteration limit reached".into()))
}

fn solve_free(q: &DMatrix<f64>, c: &DVector<f64>, x: &DVector<f64>, free: &[usize]) -> Result<DVector<f64>> {
    let k = free.len();
    if k == 0 {
        return Ok(DVector::zeros(0));
    }
    let n = q.nrows();
    let qff = DMatrix::from_fn(k, k, |r, s| q[(free[r], free[s])]);
    let rhs = DVector::from_fn(k, |r, _| {
        let i = free[r];
        let fixed: f64 = (0..n)
            .filter(|j| !free.contains(j))
            .map(|j| q[(i, j)] * x[j])
            .sum();
        -(c[i] + fixed)
    });
    if let Some(ch) = qff.clone().cholesky() {
        let y = ch.solve(&rhs);
        if y.iter().all(|v| v.is_finite()) {
            return Ok(y);
        }
    }
    let eps = 1e-12 * qff.amax().max(1.0);
    qff.svd(true, true)
        .solve(&rhs, eps)
        .map_err(|e| Error::Numerical(e.to_string()))
}

/// Corrective objective `w1 |A w - b|^2 + (1 - w1) M |w|^2` over all constraints.
pub fn corrective_cost(constraints: &[CollisionConstraint], w: &[f64; 8], w1: f64) -> f64 {
    let m = constraints.len() as f64;
    let data: f64 = constraints
        .iter()
        .map(|c| {
            let r: f64 = c.coeffs.iter().zip(w).map(|(a, x)| a * x).sum::<f64>() - c.depth;
            r * r
        })
        .sum();
    let reg: f64 = w.iter().map(|x| x * x).sum();
    w1 * data + (1.0 - w1) * m * reg
}

/// One masked solve: the rows of `kind` (all rows when `None`) against that
/// kind's corrective columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvePass {
    pub kind: Option<CollisionKind>,
    pub w: [f64; 8],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub w: [f64; 8],
    pub cost: f64,
    pub passes: Vec<SolvePass>,
}

/// Solves for the eight collision-corrective weights in `[0, 1]`.
pub fn solve_correctives(constraints: &[CollisionConstraint], w1: f64) -> Result<SolveOutput> {
    solve_correctives_bounded(constraints, w1, &[1.0; 8])
}

/// As [`solve_correctives`] with per-column upper bounds. When both collision
/// types are present the lip rows are solved first for the lip columns, then
/// the teeth rows for the teeth columns, each pass treating the other type's
/// current contribution as a constant.
pub fn solve_correctives_bounded(
    constraints: &[CollisionConstraint],
    w1: f64,
    upper: &[f64; 8],
) -> Result<SolveOutput> {
    if constraints.is_empty() {
        return Err(Error::NoConstraints);
    }
    if !(0.0..=1.0).contains(&w1) {
        return Err(Error::invalid(format!("w1 = {w1} outside [0, 1]")));
    }
    let lambda = (1.0 - w1) * constraints.len() as f64;
    let has = |k: CollisionKind| constraints.iter().any(|c| c.kind == k);
    let plan: Vec<Option<CollisionKind>> = if has(CollisionKind::Lip) && has(CollisionKind::Teeth) {
        vec![Some(CollisionKind::Lip), Some(CollisionKind::Teeth)]
    } else {
        vec![None]
    };

    let mut w = [0.0; 8];
    let mut passes = Vec::with_capacity(plan.len());
    for kind in plan {
        let rows: Vec<&CollisionConstraint> = constraints
            .iter()
            .filter(|c| kind.is_none_or(|k| c.kind == k))
            .collect();
        let cols: Vec<usize> = match kind {
            None => (0..8).collect(),
            Some(k) => (k.index() * 4..k.index() * 4 + 4).collect(),
        };
        let a = DMatrix::from_fn(rows.len(), cols.len(), |r, s| rows[r].coeffs[cols[s]]);
        let b = DVector::from_fn(rows.len(), |r, _| {
            let fixed: f64 = (0..8)
                .filter(|j| !cols.contains(j))
                .map(|j| rows[r].coeffs[j] * w[j])
                .sum();
            rows[r].depth - fixed
        });
        let lo = vec![0.0; cols.len()];
        let hi: Vec<f64> = cols.iter().map(|&j| upper[j]).collect();
        let x = box_ridge_lsq(&a, &b, w1, lambda, &lo, &hi)?;
        for (s, &j) in cols.iter().enumerate() {
            w[j] = x[s];
        }
        let pass_cost = w1 * (&a * &x - &b).norm_squared() + lambda * x.norm_squared();
        passes.push(SolvePass { kind, w, cost: pass_cost });
    }
    Ok(SolveOutput {
        w,
        cost: corrective_cost(constraints, &w, w1),
        passes,
    })
}
