//! The conservation-law semigroup on Burgers' equation: shock speed,
//! rarefaction fan, mass conservation, L¹ contraction, and the Kružkov
//! entropy detector telling a real shock from a manufactured
//! entropy-violating one.
//!
//! ```bash
//! cargo run --example burgers
//! ```

use maxplus_lab::conservation::{
    kruzkov_residual, mass_integral, ConservationLawSemigroup, Flux, TestBump, Trajectory,
};
use maxplus_lab::samples;
use maxplus_lab::space::{dist, Grid, GridFunction, Norm};
use maxplus_lab::Semigroup;

fn main() -> maxplus_lab::Result<()> {
    let flux = Flux::burgers();
    let op = ConservationLawSemigroup::new(flux.clone());

    // Shock: states (1, 0) travel at the Rankine–Hugoniot speed 1/2.
    let grid = Grid::new(-2.0, 2.0, 512, true)?;
    let step = GridFunction::from_fn(&grid, |x| if x < -1.0 { 1.0 } else { 0.0 })?;
    let u = op.evolve(1.0, &step)?;
    let vals = u.finite_values()?;
    let mut shock_x = f64::NAN;
    for i in 0..vals.len() - 1 {
        if vals[i] > 0.5 && vals[i + 1] <= 0.5 {
            shock_x = grid.center(i);
            break;
        }
    }
    println!("shock at t=1: x ≈ {shock_x:.4} (exact −0.5, Δx = {:.4})", grid.dx());

    // Mass is conserved to roundoff.
    let m0 = mass_integral(&step)?;
    let m1 = mass_integral(&u)?;
    println!("mass drift after evolve: {:.3e}", (m1 - m0).abs());

    // Rarefaction: states (0, 1) open into the self-similar fan x/t.
    let rgrid = Grid::new(-2.0, 3.0, 1024, true)?;
    let rare = GridFunction::from_fn(&rgrid, |x| if x < 0.0 { 0.0 } else { 1.0 })?;
    let ur = op.evolve(1.0, &rare)?;
    let mut sup = 0.0f64;
    for (i, v) in ur.finite_values()?.iter().enumerate() {
        let x = rgrid.center(i);
        if (-1.0..=2.0).contains(&x) {
            sup = sup.max((v - (x / 1.0).clamp(0.0, 1.0)).abs());
        }
    }
    println!("rarefaction sup error: {sup:.4e} (Δx·ln n = {:.4e})", rgrid.dx() * (rgrid.len() as f64).ln());

    // L¹ contraction on random pairs.
    let mut worst_ratio = 0.0f64;
    for (f, g) in samples::mixed_pairs(&grid, 16, 5) {
        let before = dist(&f, &g, Norm::L1)?;
        let after = dist(&op.evolve(0.5, &f)?, &op.evolve(0.5, &g)?, Norm::L1)?;
        worst_ratio = worst_ratio.max(after / before);
    }
    println!("worst L¹ ratio over 16 pairs: {worst_ratio:.12}");

    // Kružkov residual: nonnegative (up to O(Δx)) on the Godunov shock,
    // negative and resolution-independent on the expansion shock.
    let kgrid = Grid::new(-2.0, 2.0, 256, true)?;
    let dt = 0.5 * kgrid.dx();
    let steps = (1.0 / dt).ceil() as usize;
    let t_end = dt * steps as f64;
    let shock0 = GridFunction::from_fn(&kgrid, |x| if x < -0.5 { 1.0 } else { 0.0 })?;
    let good = Trajectory::record(&flux, &shock0, dt, steps)?;
    let psi = TestBump::separable(&good, 0.5 * t_end, 0.4 * t_end, -0.25, 0.75)?;
    println!(
        "entropy residual, Godunov shock:   {:+.4e}",
        kruzkov_residual(&flux, &good, 0.5, &psi)?
    );
    let bad = Trajectory::from_fn(&kgrid, dt, steps, |_, x| if x < 0.0 { 0.0 } else { 1.0 })?;
    let psi_bad = TestBump::separable(&bad, 0.5 * t_end, 0.4 * t_end, 0.0, 0.75)?;
    println!(
        "entropy residual, expansion shock: {:+.4e}  (flagged)",
        kruzkov_residual(&flux, &bad, 0.5, &psi_bad)?
    );
    Ok(())
}
