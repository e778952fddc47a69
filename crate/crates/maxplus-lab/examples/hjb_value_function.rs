//! The Bellman value-function semigroup: the velocity-controlled
//! integrator against its windowed-max oracle, the cross-check against
//! the Hopf–Lax representation, and the 2-D double integrator.
//!
//! ```bash
//! cargo run --example hjb_value_function
//! ```

use maxplus_lab::control::{
    evolve_hjb_2d, hamiltonian_eval, hj_consistency_check, ControlProblem, ControlProblem2,
    HjbSemigroup,
};
use maxplus_lab::space::{Grid, Grid2, GridFunction, GridFunction2};
use maxplus_lab::Semigroup;

fn main() -> maxplus_lab::Result<()> {
    let problem = ControlProblem::integrator((-3.0, 3.0), 2.0);

    // The Bellman Hamiltonian of the integrator is |p|.
    for p in [-2.0, 0.0, 1.5] {
        println!("H(0, {p:+}) = {:.6}", hamiltonian_eval(&problem, 0.0, p)?);
    }

    // Value function vs the reachable-set (windowed max) oracle.
    let grid = Grid::new(-3.0, 3.0, 300, false)?;
    let dp = HjbSemigroup::new(problem.clone(), grid.dx())?;
    let phi = GridFunction::from_fn(&grid, |x| -x * x)?;
    let t = 1.0;
    let v = dp.evolve(t, &phi)?;
    let mut sup = 0.0f64;
    for i in 0..grid.len() {
        let x = grid.center(i);
        let mut oracle = f64::NEG_INFINITY;
        for j in 0..grid.len() {
            if (grid.center(j) - x).abs() <= t + 1e-12 {
                oracle = oracle.max(phi.get(j).value().unwrap());
            }
        }
        sup = sup.max((v.get(i).value().unwrap() - oracle).abs());
    }
    println!("\nintegrator, t = 1: sup distance to windowed max = {sup:.3e}");
    println!("value at x = 0: {:.6} (analytic 0)", v.get(150).value().unwrap());

    // Consistency with the Hopf–Lax path driven by the induced H.
    for (n, dt) in [(240usize, 0.0175), (480, 0.00875)] {
        let g = Grid::new(-3.0, 3.0, n, false)?;
        let phi_n = GridFunction::from_fn(&g, |x| -x * x)?;
        let dp_n = HjbSemigroup::new(problem.clone(), dt)?;
        let d = hj_consistency_check(&problem, &dp_n, &phi_n, 1.0)?;
        println!("consistency vs Hopf–Lax, n = {n:<4} dt = {dt}: {d:.4e}");
    }

    // Double integrator on a 2-D state grid.
    let gx = Grid::new(-2.0, 2.0, 41, false)?;
    let gv = Grid::new(-1.5, 1.5, 31, false)?;
    let g2 = Grid2::new(gx, gv);
    let di = ControlProblem2::double_integrator((-2.0, 2.0), (-1.5, 1.5), 1.0);
    let phi2 = GridFunction2::from_fn(&g2, |x, v| -(x * x) - v * v)?;
    let val = evolve_hjb_2d(&di, &phi2, 0.4, 0.02)?;
    println!(
        "\ndouble integrator, t = 0.4: value at (0,0) = {:.4} (idling keeps it near 0)",
        val.get(20, 15).value().unwrap()
    );
    Ok(())
}
