//! Building new semigroups from old: rescaling (both readings of the
//! prefactor), commutation-checked products, invariance-checked
//! restrictions, and similarity conjugation.
//!
//! ```bash
//! cargo run --example constructions_demo
//! ```

use maxplus_lab::constructions::{
    conjugate, product, rescale, restrict, GridMap, RescaleVariant,
};
use maxplus_lab::harness::{defect_plus_homogeneity, Budget};
use maxplus_lab::samples;
use maxplus_lab::semigroup::{Direction, IdentitySemigroup, TranslationSemigroup};
use maxplus_lab::space::{Grid, GridFunction};
use maxplus_lab::{MaxScalar, Semigroup};

fn main() -> maxplus_lab::Result<()> {
    let grid = Grid::new(0.0, 4.0, 128, true)?;
    let budget = Budget::new(5.0, grid.dx());
    let mut rng = samples::Rng::new(1);
    let members = vec![
        samples::smooth_bump(&grid, &mut rng),
        samples::piecewise_linear(&grid, &mut rng),
    ];

    // Additive rescaling is a max-plus operation and changes nothing
    // about linearity; the literal e^{βt} scaling is not.
    let add = rescale(IdentitySemigroup, 1.0, 1.0, RescaleVariant::Additive)?;
    let mul = rescale(IdentitySemigroup, 1.0, 1.0, RescaleVariant::Multiplicative)?;
    let one = GridFunction::constant(&grid, 1.0)?;
    let rep = defect_plus_homogeneity(&add, 1.0, MaxScalar::num(1.0), std::slice::from_ref(&one), budget)?;
    println!("additive rescale:       plus-homogeneity defect {} [{}]", rep.defect, rep.verdict.as_str());
    let rep = defect_plus_homogeneity(&mul, 1.0, MaxScalar::num(1.0), &[one], budget)?;
    println!(
        "multiplicative rescale: plus-homogeneity defect {:.6} [{}]  (e − 1 = {:.6})",
        rep.defect,
        rep.verdict.as_str(),
        std::f64::consts::E - 1.0
    );

    // Product of two translations is the doubled translation.
    let t = 4.0 * grid.dx();
    let prod = product(
        TranslationSemigroup::new(Direction::Left),
        TranslationSemigroup::new(Direction::Left),
        &[t],
        &members,
        1e-12,
    )?;
    let direct = TranslationSemigroup::new(Direction::Left).evolve(2.0 * t, &members[0])?;
    assert_eq!(prod.evolve(t, &members[0])?, direct);
    println!("\nproduct(translation, translation) = translation by 2t  ✓");

    // Restriction to the nonpositive class under translation.
    let nonpositive =
        |f: &GridFunction| f.values().iter().all(|v| v.value().is_none_or(|x| x <= 0.0));
    let shifted: Vec<GridFunction> = members
        .iter()
        .map(|f| {
            let vals: Vec<f64> = f.finite_values().unwrap().iter().map(|v| v - 4.0).collect();
            GridFunction::from_f64_values(&grid, &vals).unwrap()
        })
        .collect();
    let restricted = restrict(
        TranslationSemigroup::new(Direction::Left),
        "nonpositive",
        nonpositive,
        &shifted,
        &[t],
    )?;
    println!("restriction to nonpositive functions accepted; outsider rejected: {}",
        restricted.evolve(t, &members[0]).is_err());

    // Conjugating the left translation by the reflection x ↦ −x gives
    // the right translation.
    let v = GridMap::reflection(grid.len());
    let conj = conjugate(
        TranslationSemigroup::new(Direction::Left),
        v.clone(),
        v.inverse(),
        &members,
    )?;
    let right = TranslationSemigroup::new(Direction::Right);
    assert_eq!(conj.evolve(t, &members[1])?, right.evolve(t, &members[1])?);
    println!("reflection ∘ left-translation ∘ reflection = right translation  ✓");
    Ok(())
}
