//! Max-plus matrix algebra and the alternating residuation method for
//! two-sided systems `A ⊗ x = B ⊗ y`.
//!
//! Residuation (`A \ z`, the greatest `x` with `A ⊗ x ≤ z`) is the
//! max-plus substitute for division. The alternating method shrinks a
//! starting pair monotonically; its fixed points are exact solutions,
//! and for integer data it terminates in finitely many sweeps. A floor
//! breach certifies that no solution exists below the start.

use crate::error::{Error, Result};
use crate::scalar::MaxScalar;

/// Dense max-plus matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusMatrix {
    rows: usize,
    cols: usize,
    data: Vec<MaxScalar>,
}

impl MaxPlusMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<MaxScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(MaxPlusMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<MaxScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(MaxPlusMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// The max-plus identity: `0` on the diagonal, bottom elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![MaxScalar::Bottom; n * n];
        for i in 0..n {
            data[i * n + i] = MaxScalar::UNIT;
        }
        MaxPlusMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> MaxScalar {
        self.data[i * self.cols + j]
    }

    /// `(A ⊗ x)_i = max_j (A_ij + x_j)`.
    pub fn mat_vec(&self, x: &[MaxScalar]) -> Result<Vec<MaxScalar>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = MaxScalar::Bottom;
                for (j, &xj) in x.iter().enumerate() {
                    acc = acc.oplus(self.get(i, j).otimes(xj));
                }
                acc
            })
            .collect())
    }

    fn mat_vec_ext(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let mut acc = f64::NEG_INFINITY;
                for (j, &xj) in x.iter().enumerate() {
                    let a = self.get(i, j).to_f64();
                    if a != f64::NEG_INFINITY && xj != f64::NEG_INFINITY {
                        acc = acc.max(a + xj);
                    }
                }
                acc
            })
            .collect()
    }

    /// Residuation `A \ z`: the greatest `x` with `A ⊗ x ≤ z`,
    /// componentwise `x_j = min_i (z_i − A_ij)` over rows with finite
    /// `A_ij`. Unconstrained coordinates come out as `+inf`, which the
    /// caller must clamp before the value leaves this module.
    fn residual_ext(&self, z: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| {
                let mut best = f64::INFINITY;
                for (i, &zi) in z.iter().enumerate() {
                    let a = self.get(i, j).to_f64();
                    if a == f64::NEG_INFINITY {
                        continue;
                    }
                    best = best.min(zi - a);
                }
                best
            })
            .collect()
    }

    /// Public residuation, clamped to a finite ceiling so the result is
    /// a genuine max-plus vector.
    pub fn residual(&self, z: &[MaxScalar], ceiling: f64) -> Result<Vec<MaxScalar>> {
        if z.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, target has {}",
                self.rows,
                z.len()
            )));
        }
        let zf: Vec<f64> = z.iter().map(|v| v.to_f64()).collect();
        self.residual_ext(&zf)
            .into_iter()
            .map(|v| MaxScalar::from_f64(v.min(ceiling)))
            .collect()
    }
}

/// Outcome of the alternating method.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoSidedOutcome {
    /// An exact solution at or below the starting pair.
    Solution {
        x: Vec<MaxScalar>,
        y: Vec<MaxScalar>,
    },
    /// The iteration fell through the floor: no solution exists at or
    /// below the starting pair.
    NoSolutionBelowStart,
    /// Sweep cap reached without reaching a fixed point.
    Cap,
}

/// Alternating residuation for `A ⊗ x = B ⊗ y`, started at
/// `(start_x, start_y)` and monotone decreasing. Terminates at the
/// greatest solution below the start when one exists (guaranteed to be
/// found in finitely many sweeps for integer data), reports
/// `NoSolutionBelowStart` when a coordinate falls below `floor`, and
/// `Cap` when `max_sweeps` run out.
pub fn solve_two_sided(
    a: &MaxPlusMatrix,
    b: &MaxPlusMatrix,
    start_x: &[MaxScalar],
    start_y: &[MaxScalar],
    floor: f64,
    max_sweeps: usize,
) -> Result<TwoSidedOutcome> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(
            "two-sided system needs equal row counts".into(),
        ));
    }
    if start_x.len() != a.cols() || start_y.len() != b.cols() {
        return Err(Error::DimensionMismatch("start vectors mismatch".into()));
    }
    let mut x: Vec<f64> = start_x.iter().map(|v| v.to_f64()).collect();
    let sx = x.clone();
    let sy: Vec<f64> = start_y.iter().map(|v| v.to_f64()).collect();
    let mut y = sy.clone();

    let clamp = |v: Vec<f64>, cap: &[f64]| -> Vec<f64> {
        v.into_iter().zip(cap).map(|(a, &c)| a.min(c)).collect()
    };

    for _ in 0..max_sweeps {
        let zx = a.mat_vec_ext(&x);
        let y_next = clamp(b.residual_ext(&zx), &sy);
        let zy = b.mat_vec_ext(&y_next);
        let x_next = clamp(a.residual_ext(&zy), &sx);
        let stalled = x_next == x && y_next == y;
        x = x_next;
        y = y_next;
        if x.iter().chain(&y).any(|&v| v < floor) {
            return Ok(TwoSidedOutcome::NoSolutionBelowStart);
        }
        if stalled {
            break;
        }
    }
    // Fixed point or cap: solution iff both sides agree exactly.
    if a.mat_vec_ext(&x) == b.mat_vec_ext(&y) {
        let to_scalars = |v: Vec<f64>| -> Result<Vec<MaxScalar>> {
            v.into_iter().map(MaxScalar::from_f64).collect()
        };
        return Ok(TwoSidedOutcome::Solution {
            x: to_scalars(x)?,
            y: to_scalars(y)?,
        });
    }
    Ok(TwoSidedOutcome::Cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> MaxScalar {
        MaxScalar::num(v)
    }

    fn bot() -> MaxScalar {
        MaxScalar::Bottom
    }

    #[test]
    fn mat_vec_identity() {
        let id = MaxPlusMatrix::identity(3);
        let x = vec![s(1.0), s(-2.0), bot()];
        assert_eq!(id.mat_vec(&x).unwrap(), x);
    }

    #[test]
    fn residuation_galois_connection() {
        // A ⊗ (A \ z) ≤ z and A \ (A ⊗ x) ≥ x.
        let a = MaxPlusMatrix::from_rows(vec![
            vec![s(0.0), s(2.0)],
            vec![s(-1.0), s(1.0)],
            vec![s(3.0), bot()],
        ])
        .unwrap();
        let z = vec![s(1.0), s(0.0), s(2.0)];
        let x = a.residual(&z, 1e9).unwrap();
        let ax = a.mat_vec(&x).unwrap();
        for (lhs, rhs) in ax.iter().zip(&z) {
            assert!(lhs.leq(*rhs));
        }
        let x0 = vec![s(-1.0), s(-3.0)];
        let back = a.residual(&a.mat_vec(&x0).unwrap(), 1e9).unwrap();
        for (lo, hi) in x0.iter().zip(&back) {
            assert!(lo.leq(*hi));
        }
    }

    #[test]
    fn two_sided_solvable_integer_system() {
        // A ⊗ x = B ⊗ y with a known integer solution.
        let a = MaxPlusMatrix::from_rows(vec![vec![s(0.0), s(1.0)], vec![s(2.0), s(0.0)]]).unwrap();
        let b = MaxPlusMatrix::from_rows(vec![vec![s(1.0)], vec![s(0.0)]]).unwrap();
        let start_x = vec![s(10.0), s(10.0)];
        let start_y = vec![s(10.0)];
        match solve_two_sided(&a, &b, &start_x, &start_y, -1e6, 10_000).unwrap() {
            TwoSidedOutcome::Solution { x, y } => {
                assert_eq!(a.mat_vec(&x).unwrap(), b.mat_vec(&y).unwrap());
            }
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn two_sided_unsolvable_system_hits_floor() {
        // Row 2 forces y below any floor: A's second row is bottom while
        // B's is finite, so B ⊗ y must sink forever.
        let a = MaxPlusMatrix::from_rows(vec![vec![s(0.0)], vec![bot()]]).unwrap();
        let b = MaxPlusMatrix::from_rows(vec![vec![s(0.0)], vec![s(0.0)]]).unwrap();
        let out = solve_two_sided(&a, &b, &[s(5.0)], &[s(5.0)], -1e3, 10_000).unwrap();
        assert_eq!(out, TwoSidedOutcome::NoSolutionBelowStart);
    }

    #[test]
    fn dimension_checks() {
        let a = MaxPlusMatrix::identity(2);
        let b = MaxPlusMatrix::identity(3);
        assert!(solve_two_sided(&a, &b, &[s(0.0); 2], &[s(0.0); 3], -1e3, 10).is_err());
        assert!(a.mat_vec(&[s(0.0); 3]).is_err());
        assert!(MaxPlusMatrix::new(2, 2, vec![s(0.0); 3]).is_err());
    }
}
