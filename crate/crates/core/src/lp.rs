//! Small dense simplex solver for `maximize c·x  s.t.  A x ≤ b, x ≥ 0` with
//! `b ≥ 0`, so the origin is always a feasible starting vertex.
//!
//! Pivoting uses Bland's rule, which cannot cycle on the degenerate
//! vertices that the support-restricted leak programs produce. Once an
//! optimal basis is found, the basic solution is recomputed from the
//! original (unscaled) data by an LU solve, so round-off accumulated in the
//! tableau does not leak into the reported optimum.

use thiserror::Error;

const PIVOT_TOLERANCE: f64 = 1e-12;
const COST_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint matrix has {rows} rows but {bounds} bounds")]
    ShapeMismatch { rows: usize, bounds: usize },
    #[error("row {0} has the wrong number of coefficients")]
    RaggedRow(usize),
    #[error("bound {index} = {value} must be finite and nonnegative")]
    InvalidBound { index: usize, value: f64 },
    #[error("non-finite coefficient in the program")]
    NonFinite,
    #[error("objective is unbounded along variable {0}")]
    Unbounded(usize),
    #[error("no convergence after {0} pivots")]
    IterationLimit(usize),
    #[error("optimal basis is singular")]
    SingularBasis,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `b - A x` per constraint.
    pub slack: Vec<f64>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, bounds: Vec<f64>) -> Result<Self, LpError> {
        if rows.len() != bounds.len() {
            return Err(LpError::ShapeMismatch {
                rows: rows.len(),
                bounds: bounds.len(),
            });
        }
        if let Some(i) = rows.iter().position(|r| r.len() != objective.len()) {
            return Err(LpError::RaggedRow(i));
        }
        if let Some((index, &value)) = bounds
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(LpError::InvalidBound { index, value });
        }
        if !objective.iter().chain(rows.iter().flatten()).all(|v| v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        Ok(Self {
            objective,
            rows,
            bounds,
        })
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let m = self.rows.len();
        let n = self.objective.len();
        let width = n + m + 1;

        // Equilibrate each row so its largest coefficient is 1.
        let mut tableau = vec![0.0; m * width];
        for (i, row) in self.rows.iter().enumerate() {
            let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            for j in 0..n {
                tableau[i * width + j] = row[j] * scale;
            }
            tableau[i * width + n + i] = scale;
            tableau[i * width + n + m] = self.bounds[i] * scale;
        }
        let cost_scale = self.objective.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut reduced: Vec<f64> = self.objective.clone();
        reduced.resize(n + m, 0.0);
        let mut basis: Vec<usize> = (n..n + m).collect();

        let limit = 50 * (n + m).max(10);
        let mut pivots = 0;
        while let Some(enter) = (0..n + m).find(|&j| reduced[j] > COST_TOLERANCE * cost_scale.max(1e-300)) {
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                let a = tableau[i * width + enter];
                if a > PIVOT_TOLERANCE {
                    let ratio = tableau[i * width + n + m] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => ratio < best || (ratio == best && basis[i] < basis[l]),
                    };
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(row) = leave else {
                return Err(LpError::Unbounded(enter));
            };
            pivot(&mut tableau, width, m, row, enter, &mut reduced);
            basis[row] = enter;
            pivots += 1;
            if pivots > limit {
                return Err(LpError::IterationLimit(pivots));
            }
        }

        let x = self.basic_solution(&basis)?;
        let objective = self.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        let slack = self
            .rows
            .iter()
            .zip(&self.bounds)
            .map(|(row, b)| b - row.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>())
            .collect();
        Ok(LpSolution {
            x,
            objective,
            slack,
            pivots,
        })
    }

    /// Solves `B x_B = b` for the columns of `[A | I]` listed in `basis`.
    fn basic_solution(&self, basis: &[usize]) -> Result<Vec<f64>, LpError> {
        let m = self.rows.len();
        let n = self.objective.len();
        let mut mat = vec![0.0; m * m];
        for (col, &var) in basis.iter().enumerate() {
            for i in 0..m {
                mat[i * m + col] = if var < n {
                    self.rows[i][var]
                } else if var - n == i {
                    1.0
                } else {
                    0.0
                };
            }
        }
        let xb = lu_solve(&mut mat, self.bounds.clone(), m).ok_or(LpError::SingularBasis)?;
        let mut x = vec![0.0; n];
        for (col, &var) in basis.iter().enumerate() {
            if var < n {
                x[var] = xb[col].max(0.0);
            }
        }
        Ok(x)
    }
}

fn pivot(tableau: &mut [f64], width: usize, m: usize, row: usize, col: usize, reduced: &mut [f64]) {
    let p = tableau[row * width + col];
    for v in &mut tableau[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = tableau[row * width..(row + 1) * width].to_vec();
    for i in 0..m {
        if i == row {
            continue;
        }
        let f = tableau[i * width + col];
        if f != 0.0 {
            for (v, pv) in tableau[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            tableau[i * width + col] = 0.0;
        }
    }
    let f = reduced[col];
    for (r, pv) in reduced.iter_mut().zip(&pivot_row) {
        *r -= f * pv;
    }
    reduced[col] = 0.0;
}

/// Gaussian elimination with partial pivoting on a row-major `m×m` matrix.
fn lu_solve(a: &mut [f64], mut b: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i * m + k].abs().total_cmp(&a[j * m + k].abs()))?;
        if a[p * m + k] == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..m {
                a.swap(k * m + j, p * m + j);
            }
            b.swap(k, p);
        }
        for i in k + 1..m {
            let f = a[i * m + k] / a[k * m + k];
            if f != 0.0 {
                for j in k..m {
                    a[i * m + j] -= f * a[k * m + j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|j| a[k * m + j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k * m + k];
    }
    Some(x)
}
