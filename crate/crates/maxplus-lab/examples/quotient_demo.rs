//! Finite-dimensional max-plus quotient spaces: deciding equivalence
//! modulo a generated subspace by alternating residuation, and pushing
//! a max-plus linear map down to the quotient.
//!
//! ```bash
//! cargo run --example quotient_demo
//! ```

use maxplus_lab::quotient::{
    quotient_apply, quotient_equivalent, Equivalence, FiniteMaxVector, FiniteSubspace,
};
use maxplus_lab::residuation::MaxPlusMatrix;
use maxplus_lab::MaxScalar;

fn show(name: &str, f1: &FiniteMaxVector, f2: &FiniteMaxVector, eq: &Equivalence) {
    match eq {
        Equivalence::Equivalent { g1, g2, .. } => {
            let m = f1.oplus(g1).unwrap();
            debug_assert_eq!(m, f2.oplus(g2).unwrap());
            println!("{name}: EQUIVALENT   [{f1}] ⊕ [{g1}] = [{m}] = [{f2}] ⊕ [{g2}]");
        }
        other => println!("{name}: {}", other.as_str()),
    }
}

fn main() -> maxplus_lab::Result<()> {
    let theta = FiniteSubspace::new(vec![FiniteMaxVector::from_f64(&[0.0, 0.0])?])?;

    // Reflexivity.
    let f = FiniteMaxVector::from_f64(&[3.0, 1.0])?;
    show("reflexive        ", &f, &f, &quotient_equivalent(&f, &f, &theta, 10_000)?);

    // Two crossing vectors joined by lifting the Θ generator.
    let f1 = FiniteMaxVector::from_f64(&[0.0, -1.0])?;
    let f2 = FiniteMaxVector::from_f64(&[-1.0, 0.0])?;
    show("theta join       ", &f1, &f2, &quotient_equivalent(&f1, &f2, &theta, 10_000)?);

    // A generator with a bottom coordinate cannot mask differences there.
    let partial = FiniteSubspace::new(vec!["0 -inf".parse()?])?;
    let g1: FiniteMaxVector = "-inf 0".parse()?;
    let g2: FiniteMaxVector = "-inf 1".parse()?;
    show("unreachable coord", &g1, &g2, &quotient_equivalent(&g1, &g2, &partial, 10_000)?);

    // Quotient action of a max-plus matrix: T = [[0,−1],[−1,0]] modulo
    // the Θ line; equivalent representatives map to equivalent images.
    let t = MaxPlusMatrix::from_rows(vec![
        vec![MaxScalar::num(0.0), MaxScalar::num(-1.0)],
        vec![MaxScalar::num(-1.0), MaxScalar::num(0.0)],
    ])?;
    let rep = FiniteMaxVector::from_f64(&[1.0, 0.0])?;
    let image = quotient_apply(&t, &rep, &theta, 10_000)?;
    println!("\nS[f] = [T ⊗ f]: T ⊗ [{rep}] = [{image}]");
    let alt = FiniteMaxVector::from_f64(&[2.0, 2.0])?;
    let alt_image = quotient_apply(&t, &alt, &theta, 10_000)?;
    match quotient_equivalent(&image, &alt_image, &theta, 10_000)? {
        Equivalence::Equivalent { .. } => {
            println!("alternate representative [{alt}] maps to the same class  ✓")
        }
        other => println!("well-definedness violated?! {}", other.as_str()),
    }
    Ok(())
}
