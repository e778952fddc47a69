//! Infinitesimal-generator probes: difference quotients with Richardson
//! extrapolation, translation invariance, the max-additivity
//! counterexample, and the resolvent dissipativity check.
//!
//! ```bash
//! cargo run --example generator_probe
//! ```

use maxplus_lab::generator::{
    check_translation_invariance, dissipativity_probe, generator_estimate,
    generator_max_additivity_counterexample, DiscreteGenerator,
};
use maxplus_lab::hamilton_jacobi::{HjSemigroup, Lagrangian};
use maxplus_lab::samples;
use maxplus_lab::semigroup::{Direction, TranslationSemigroup};
use maxplus_lab::space::{Grid, GridFunction};
use maxplus_lab::MaxScalar;

fn main() -> maxplus_lab::Result<()> {
    // Translation: the generator is the spatial derivative.
    let grid = Grid::new(0.0, std::f64::consts::TAU, 1024, true)?;
    let f = GridFunction::from_fn(&grid, |x| x.sin())?;
    let op = TranslationSemigroup::new(Direction::Left);
    let est = generator_estimate(&op, &f, &[4e-3, 2e-3, 1e-3])?;
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        if let Some(v) = est.af.get(i).value() {
            worst = worst.max((v - grid.center(i).cos()).abs());
        }
    }
    println!("translation generator of sin: sup error vs cos = {worst:.3e}");
    println!("richardson order {}, masked fraction {:.3}", est.richardson_order, est.mask_fraction);

    // The generator never sees additive constants.
    let d = check_translation_invariance(&op, &f, MaxScalar::num(-1.0), &[4e-3, 2e-3, 1e-3])?;
    println!("A(a ⊗ f) vs Af: sup distance {d:.3e}");

    // It is NOT max-additive: the classical two-bump counterexample.
    let rep = generator_max_additivity_counterexample(2049, 1e-3)?;
    println!(
        "\ncounterexample: f ⪯ g everywhere = {}, witness x = {:.4}",
        rep.ordered_everywhere, rep.witness_x
    );
    println!(
        "  (Af ⊕ Ag − Ag)(witness) = {:.4} (analytic {:.4}); largest gap {:.4} at x = {:.3}",
        rep.witness_gap, rep.analytic_gap, rep.max_gap, rep.max_gap_x
    );

    // Dissipativity of the discrete Hopf–Lax generator.
    let hj_grid = Grid::new(-4.0, 4.0, 256, false)?;
    let hl = HjSemigroup::hopf_lax(Lagrangian::quadratic());
    let gen = DiscreteGenerator::new(hl, 0.25)?;
    let pairs = samples::mixed_pairs(&hj_grid, 32, 11);
    let probe = dissipativity_probe(&gen, 0.1, &pairs, 1e-8, 50_000)?;
    println!(
        "\nresolvent probe (α = 0.1): Lip estimate {:.12} [{}]",
        probe.lip_estimate,
        probe.verdict.as_str()
    );
    Ok(())
}
