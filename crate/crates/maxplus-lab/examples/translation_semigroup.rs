//! The left translation semigroup as the reference max-plus linear
//! operator family, run through the full property harness.
//!
//! ```bash
//! cargo run --example translation_semigroup
//! ```

use maxplus_lab::harness::{
    check_contraction, check_isometry_l1, continuity_modulus, defect_max_additivity,
    defect_plus_homogeneity, defect_semigroup_law, Budget,
};
use maxplus_lab::samples;
use maxplus_lab::semigroup::{Direction, TranslationSemigroup};
use maxplus_lab::space::Grid;
use maxplus_lab::MaxScalar;

fn main() -> maxplus_lab::Result<()> {
    let grid = Grid::new(0.0, std::f64::consts::TAU, 256, true)?;
    let op = TranslationSemigroup::new(Direction::Left);
    let budget = Budget::new(5.0, grid.dx());
    let pairs = samples::mixed_pairs(&grid, 32, 42);
    let fs: Vec<_> = pairs.iter().map(|(f, _)| f.clone()).collect();

    // Grid-multiple shifts are pure cell permutations: every defect is
    // exactly zero and every norm is exactly preserved.
    let t = 16.0 * grid.dx();
    let rep = defect_max_additivity(&op, t, &pairs, budget)?;
    println!("{}", rep.csv_row());
    let rep = defect_plus_homogeneity(&op, t, MaxScalar::num(1.5), &fs, budget)?;
    println!("{}", rep.csv_row());
    let rep = defect_semigroup_law(&op, t, 2.0 * t, &fs, budget)?;
    println!("{}", rep.csv_row());
    let rep = check_contraction(&op, &[t, 4.0 * t], &pairs, 0.0, 1e-12, budget)?;
    println!("{}", rep.csv_row());
    let rep = check_isometry_l1(&op, t, &pairs, budget)?;
    println!("{}", rep.csv_row());

    // Strong continuity: the orbit modulus decays linearly for
    // Lipschitz data (off-grid shifts interpolate).
    let f = maxplus_lab::GridFunction::from_fn(&grid, |x| x.sin())?;
    println!("\norbit modulus t ↦ ‖T(t)f − f‖_sup:");
    for (t, m) in continuity_modulus(&op, &f, &[0.4, 0.2, 0.1, 0.05])? {
        println!("  t = {t:<5}: {m:.6}");
    }
    Ok(())
}
