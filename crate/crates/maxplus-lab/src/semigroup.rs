//! The one-parameter operator-semigroup abstraction and the reference
//! translation semigroup.
//!
//! Every operator in this crate implements [`Semigroup`]: a family
//! `T(t)`, `t ≥ 0`, acting on grid functions, with `T(0) = Id` bit-for-bit,
//! grid preservation, and finite functions mapping to finite functions.

use crate::error::{Error, Result};
use crate::space::{dist, Grid, GridFunction, Norm};

/// A one-parameter family `t ↦ T(t)` of operators on grid functions.
pub trait Semigroup {
    /// Applies `T(t)` to `f`. Must return `f` unchanged when `t = 0`.
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction>;

    /// Human-readable operator name used in reports.
    fn label(&self) -> &str;

    /// The norm the operator's contraction/isometry statements live in.
    fn native_norm(&self) -> Norm;
}

impl<T: Semigroup + ?Sized> Semigroup for &T {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        (**self).evolve(t, f)
    }
    fn label(&self) -> &str {
        (**self).label()
    }
    fn native_norm(&self) -> Norm {
        (**self).native_norm()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::TimeOutOfRange {
            t,
            what: "[0, ∞)".into(),
        });
    }
    Ok(())
}

/// The trivial semigroup `T(t) = Id`.
#[derive(Debug, Clone)]
pub struct IdentitySemigroup;

impl Semigroup for IdentitySemigroup {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        Ok(f.clone())
    }

    fn label(&self) -> &str {
        "identity"
    }

    fn native_norm(&self) -> Norm {
        Norm::Sup
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Translation semigroup on periodic grids: `T(t)f(s) = f(s + t)` for
/// the left variant, `f(s − t)` for the right variant.
///
/// A shift by an exact multiple of `Δx` is a circular permutation of the
/// cells; other shifts interpolate linearly between the two bracketing
/// cells. Shifts within `1e−9` cells of an integer are snapped, so times
/// computed as `k·Δx` stay exact under floating-point drift.
#[derive(Debug, Clone)]
pub struct TranslationSemigroup {
    direction: Direction,
    label: String,
}

impl TranslationSemigroup {
    pub fn new(direction: Direction) -> Self {
        let label = match direction {
            Direction::Left => "translation-left",
            Direction::Right => "translation-right",
        };
        TranslationSemigroup { direction, label: label.to_string() }
    }

    fn shift_cells(&self, grid: &Grid, t: f64) -> f64 {
        let raw = t / grid.dx();
        match self.direction {
            Direction::Left => raw,
            Direction::Right => -raw,
        }
    }
}

impl Semigroup for TranslationSemigroup {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(f.clone());
        }
        let grid = f.grid();
        if !grid.periodic() {
            return Err(Error::NonPeriodicGrid);
        }
        let n = grid.len();
        let sigma = self.shift_cells(grid, t);
        let k = sigma.round();
        let frac = sigma - k;
        let base = k.rem_euclid(n as f64) as usize % n;
        if frac.abs() < 1e-9 {
            // Pure circular permutation: bit-exact.
            let vals: Vec<_> = (0..n).map(|i| f.get((i + base) % n)).collect();
            return GridFunction::new(grid.clone(), vals);
        }
        // Linear interpolation between the bracketing cells. Interpolating
        // a bottom neighbour yields bottom, keeping the max-plus zero
        // element absorbing rather than inventing finite values.
        let (lo, alpha) = if frac >= 0.0 {
            (base, frac)
        } else {
            ((base + n - 1) % n, 1.0 + frac)
        };
        let vals: Vec<_> = (0..n)
            .map(|i| {
                let a = f.get((i + lo) % n);
                let b = f.get((i + lo + 1) % n);
                match (a.value(), b.value()) {
                    (Some(a), Some(b)) => {
                        crate::scalar::MaxScalar::num((1.0 - alpha) * a + alpha * b)
                    }
                    _ => crate::scalar::MaxScalar::Bottom,
                }
            })
            .collect();
        GridFunction::new(grid.clone(), vals)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        Norm::Sup
    }
}

/// Sampled lower bound on the Lipschitz seminorm of `T(t)`:
/// the largest `‖T(t)f − T(t)g‖ / ‖f − g‖` over the given pairs.
pub fn lip_seminorm_estimate<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    pairs: &[(GridFunction, GridFunction)],
    norm: Norm,
) -> Result<f64> {
    check_time(t)?;
    if pairs.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut worst = 0.0f64;
    for (f, g) in pairs {
        let denom = dist(f, g, norm)?;
        if denom == 0.0 {
            return Err(Error::DegeneratePair);
        }
        let tf = op.evolve(t, f)?;
        let tg = op.evolve(t, g)?;
        let num = dist(&tf, &tg, norm)?;
        worst = worst.max(num / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn pgrid(n: usize) -> Grid {
        Grid::new(0.0, std::f64::consts::TAU, n, true).unwrap()
    }

    #[test]
    fn evolve_zero_is_identity_bitwise() {
        let g = pgrid(64);
        let f = GridFunction::from_fn(&g, |x| x.sin()).unwrap();
        let op = TranslationSemigroup::new(Direction::Left);
        assert_eq!(op.evolve(0.0, &f).unwrap(), f);
    }

    #[test]
    fn full_period_is_identity() {
        let g = pgrid(128);
        let f = GridFunction::from_fn(&g, |x| (2.0 * x).cos()).unwrap();
        let op = TranslationSemigroup::new(Direction::Left);
        // One full period = n cells exactly.
        let t = g.dx() * g.len() as f64;
        assert_eq!(op.evolve(t, &f).unwrap(), f);
    }

    #[test]
    fn one_cell_shift_moves_bump() {
        let g = pgrid(32);
        let mut vals = vec![crate::scalar::MaxScalar::num(0.0); 32];
        vals[10] = crate::scalar::MaxScalar::num(1.0);
        let f = GridFunction::new(g.clone(), vals).unwrap();
        let op = TranslationSemigroup::new(Direction::Left);
        let shifted = op.evolve(g.dx(), &f).unwrap();
        assert_eq!(shifted.get(9).value().unwrap(), 1.0);
        assert_eq!(shifted.get(10).value().unwrap(), 0.0);
    }

    #[test]
    fn analytic_shift_of_sine() {
        let g = pgrid(512);
        let f = GridFunction::from_fn(&g, |x| x.sin()).unwrap();
        let op = TranslationSemigroup::new(Direction::Left);
        let t = std::f64::consts::FRAC_PI_2;
        let out = op.evolve(t, &f).unwrap();
        let dx = g.dx();
        // Off-grid shift: linear interpolation error is O(Δx²).
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            let expect = (g.center(i) + t).sin(); // = cos at shifted point
            worst = worst.max((out.get(i).value().unwrap() - expect).abs());
        }
        assert!(worst <= dx * dx, "sup error {worst} vs dx^2 {}", dx * dx);
    }

    #[test]
    fn right_translation_inverts_left_on_grid_shifts() {
        let g = pgrid(64);
        let f = GridFunction::from_fn(&g, |x| (x - 1.0).powi(2).min(2.0)).unwrap();
        let left = TranslationSemigroup::new(Direction::Left);
        let right = TranslationSemigroup::new(Direction::Right);
        let t = 5.0 * g.dx();
        let round = right.evolve(t, &left.evolve(t, &f).unwrap()).unwrap();
        assert_eq!(round, f);
    }

    #[test]
    fn rejects_non_periodic() {
        let g = Grid::new(0.0, 1.0, 16, false).unwrap();
        let f = GridFunction::theta(&g);
        let op = TranslationSemigroup::new(Direction::Left);
        assert!(matches!(op.evolve(0.5, &f), Err(Error::NonPeriodicGrid)));
    }

    #[test]
    fn lip_estimate_identity_is_one() {
        let g = pgrid(64);
        let pairs = samples::mixed_pairs(&g, 16, 5);
        let est = lip_seminorm_estimate(&IdentitySemigroup, 0.0, &pairs, Norm::Sup).unwrap();
        assert_eq!(est, 1.0);
    }

    #[test]
    fn lip_estimate_translation_is_one_on_grid_shifts() {
        let g = pgrid(64);
        let pairs = samples::mixed_pairs(&g, 16, 6);
        let op = TranslationSemigroup::new(Direction::Left);
        for norm in [Norm::Sup, Norm::L1] {
            let est = lip_seminorm_estimate(&op, 7.0 * g.dx(), &pairs, norm).unwrap();
            assert_eq!(est, 1.0, "grid shifts permute cells, so an isometry");
        }
    }

    #[test]
    fn lip_estimate_rejects_bad_samples() {
        let g = pgrid(16);
        let f = GridFunction::theta(&g);
        assert!(matches!(
            lip_seminorm_estimate(&IdentitySemigroup, 0.0, &[], Norm::Sup),
            Err(Error::EmptySamples)
        ));
        assert!(matches!(
            lip_seminorm_estimate(&IdentitySemigroup, 0.0, &[(f.clone(), f)], Norm::Sup),
            Err(Error::DegeneratePair)
        ));
    }
}
