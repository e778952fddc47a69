//! Finite-dimensional max-plus quotient spaces.
//!
//! Two vectors are equivalent modulo a subspace `𝒟` when
//! `f₁ ⊕ g₁ = f₂ ⊕ g₂` for some `g₁, g₂` in the span of `𝒟`'s
//! generators. The decision runs the alternating residuation method on
//! the two-sided system `[f₁ | D] ⊗ (0, a) = [f₂ | D] ⊗ (0, b)`: the
//! start pins the first coefficients at `0` and puts the rest high
//! enough that any witness lies below it, so the greatest solution
//! below the start either exhibits the pinned coefficients (equivalent,
//! with verified witnesses) or proves no pinned witness exists.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::residuation::{solve_two_sided, MaxPlusMatrix, TwoSidedOutcome};
use crate::scalar::MaxScalar;

/// A finite-dimensional max-plus vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMaxVector(pub Vec<MaxScalar>);

impl FiniteMaxVector {
    pub fn from_f64(vals: &[f64]) -> Result<Self> {
        Ok(FiniteMaxVector(
            vals.iter()
                .map(|&v| MaxScalar::from_f64(v))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn oplus(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("vector lengths differ".into()));
        }
        Ok(FiniteMaxVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.oplus(b))
                .collect(),
        ))
    }

    pub fn otimes(&self, a: MaxScalar) -> Self {
        FiniteMaxVector(self.0.iter().map(|&v| a.otimes(v)).collect())
    }

    fn max_abs_finite(&self) -> f64 {
        self.0
            .iter()
            .filter_map(|v| v.value())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl fmt::Display for FiniteMaxVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for FiniteMaxVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let vals = s
            .split_whitespace()
            .map(|tok| tok.parse::<MaxScalar>())
            .collect::<Result<Vec<_>>>()?;
        if vals.is_empty() {
            return Err(Error::InvalidArgument("empty vector".into()));
        }
        Ok(FiniteMaxVector(vals))
    }
}

/// A max-plus subspace given by a finite generator family.
#[derive(Debug, Clone)]
pub struct FiniteSubspace {
    generators: Vec<FiniteMaxVector>,
}

impl FiniteSubspace {
    pub fn new(generators: Vec<FiniteMaxVector>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("subspace needs at least one generator".into()));
        }
        let n = generators[0].len();
        if generators.iter().any(|g| g.len() != n) {
            return Err(Error::DimensionMismatch("generators of unequal length".into()));
        }
        Ok(FiniteSubspace { generators })
    }

    /// One generator per line, entries whitespace-separated with `-inf`.
    pub fn parse(text: &str) -> Result<Self> {
        let generators = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.parse())
            .collect::<Result<Vec<_>>>()?;
        FiniteSubspace::new(generators)
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }

    pub fn generators(&self) -> &[FiniteMaxVector] {
        &self.generators
    }

    /// `D ⊗ a = ⊕_j a_j ⊗ d_j`.
    pub fn combine(&self, coeffs: &[MaxScalar]) -> Result<FiniteMaxVector> {
        if coeffs.len() != self.generators.len() {
            return Err(Error::DimensionMismatch("coefficient count mismatch".into()));
        }
        let mut acc = FiniteMaxVector(vec![MaxScalar::Bottom; self.dim()]);
        for (g, &c) in self.generators.iter().zip(coeffs) {
            acc = acc.oplus(&g.otimes(c))?;
        }
        Ok(acc)
    }
}

/// Verdict of the equivalence decision, carrying verified witnesses on
/// success.
#[derive(Debug, Clone, PartialEq)]
pub enum Equivalence {
    Equivalent {
        /// Span elements witnessing `f₁ ⊕ g₁ = f₂ ⊕ g₂` …
        g1: FiniteMaxVector,
        g2: FiniteMaxVector,
        /// … and their coefficient vectors.
        a: Vec<MaxScalar>,
        b: Vec<MaxScalar>,
    },
    NotEquivalent,
    /// Iteration cap hit without convergence (non-integer instances).
    Unknown,
}

impl Equivalence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Equivalence::Equivalent { .. } => "EQUIVALENT",
            Equivalence::NotEquivalent => "NOT_EQUIVALENT",
            Equivalence::Unknown => "UNKNOWN",
        }
    }
}

fn bordered(f: &FiniteMaxVector, d: &FiniteSubspace) -> MaxPlusMatrix {
    // Columns: [f | d₁ … d_p].
    let n = f.len();
    let p = d.generators.len();
    let mut data = Vec::with_capacity(n * (p + 1));
    for i in 0..n {
        data.push(f.0[i]);
        for g in &d.generators {
            data.push(g.0[i]);
        }
    }
    MaxPlusMatrix::new(n, p + 1, data).expect("dimensions agree by construction")
}

/// Decides `f₁ ∼ f₂` modulo the subspace, searching for coefficient
/// vectors `a, b` with `f₁ ⊕ (D ⊗ a) = f₂ ⊕ (D ⊗ b)`; the iteration
/// budget caps alternating sweeps.
pub fn quotient_equivalent(
    f1: &FiniteMaxVector,
    f2: &FiniteMaxVector,
    d: &FiniteSubspace,
    budget: usize,
) -> Result<Equivalence> {
    if f1.len() != f2.len() || f1.len() != d.dim() {
        return Err(Error::DimensionMismatch(
            "vectors and subspace must share one dimension".into(),
        ));
    }
    // Witnesses can always be taken of the single-scale form c ⊗ w with
    // w the join of the generators: the scale only has to lift w above
    // f₁ ⊕ f₂ on the coordinates where the two vectors differ. If w has
    // no support on a differing coordinate, no span element can ever
    // mask the difference.
    let join = {
        let mut acc = d.generators[0].clone();
        for g in &d.generators[1..] {
            acc = acc.oplus(g)?;
        }
        acc
    };
    let h = f1.oplus(f2)?;
    let mut level = 0.0f64;
    for i in 0..f1.len() {
        if f1.0[i] == f2.0[i] {
            continue;
        }
        match (h.0[i].value(), join.0[i].value()) {
            (Some(hv), Some(wv)) => level = level.max(hv - wv),
            (Some(_), None) => return Ok(Equivalence::NotEquivalent),
            (None, _) => unreachable!("differing coordinates cannot both be bottom"),
        }
    }
    let a_mat = bordered(f1, d);
    let b_mat = bordered(f2, d);
    let floor = -8.0 * (level.abs() + f1.max_abs_finite() + f2.max_abs_finite() + 16.0);
    let p = d.generators.len();
    let mut start = vec![MaxScalar::num(level); p + 1];
    start[0] = MaxScalar::UNIT;
    match solve_two_sided(&a_mat, &b_mat, &start, &start, floor, budget)? {
        TwoSidedOutcome::Solution { x, y } => {
            let pinned = |v: &[MaxScalar]| matches!(v[0], MaxScalar::Finite(c) if c == 0.0);
            if !pinned(&x) || !pinned(&y) {
                // The greatest solution below the start dropped the
                // pinned coefficient: no witness with it exists.
                return Ok(Equivalence::NotEquivalent);
            }
            let a = x[1..].to_vec();
            let b = y[1..].to_vec();
            let g1 = d.combine(&a)?;
            let g2 = d.combine(&b)?;
            let lhs = f1.oplus(&g1)?;
            let rhs = f2.oplus(&g2)?;
            if lhs != rhs {
                // Should be unreachable; refuse to return an unverified
                // witness.
                return Ok(Equivalence::Unknown);
            }
            Ok(Equivalence::Equivalent { g1, g2, a, b })
        }
        TwoSidedOutcome::NoSolutionBelowStart => Ok(Equivalence::NotEquivalent),
        TwoSidedOutcome::Cap => Ok(Equivalence::Unknown),
    }
}

/// Applies a max-plus linear map to a class representative after
/// checking that the subspace is invariant under the map (each
/// generator's image must be equivalent to the zero class, probed via
/// [`quotient_equivalent`] against the generator itself).
pub fn quotient_apply(
    t_matrix: &MaxPlusMatrix,
    class_rep: &FiniteMaxVector,
    d: &FiniteSubspace,
    budget: usize,
) -> Result<FiniteMaxVector> {
    if t_matrix.cols() != d.dim() {
        return Err(Error::DimensionMismatch("map and subspace dimension differ".into()));
    }
    for (j, g) in d.generators().iter().enumerate() {
        let image = FiniteMaxVector(t_matrix.mat_vec(&g.0)?);
        match quotient_equivalent(&image, g, d, budget)? {
            Equivalence::Equivalent { .. } => {}
            other => {
                return Err(Error::ConstructionRefused(format!(
                    "subspace not invariant: generator {j} maps outside its class ({})",
                    other.as_str()
                )))
            }
        }
    }
    Ok(FiniteMaxVector(t_matrix.mat_vec(&class_rep.0)?))
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

    fn vecmp(vals: &[f64]) -> FiniteMaxVector {
        FiniteMaxVector::from_f64(vals).unwrap()
    }

    /// Brute-force oracle: search integer coefficient grids for a pair
    /// (a, b) with f₁ ⊕ D⊗a = f₂ ⊕ D⊗b, bottom included.
    fn brute_force_equivalent(
        f1: &FiniteMaxVector,
        f2: &FiniteMaxVector,
        d: &FiniteSubspace,
        lo: i64,
        hi: i64,
    ) -> bool {
        let p = d.generators().len();
        let mut choices: Vec<Vec<MaxScalar>> = Vec::new();
        let options: Vec<MaxScalar> = std::iter::once(bot())
            .chain((lo..=hi).map(|k| s(k as f64)))
            .collect();
        fn enumerate(
            options: &[MaxScalar],
            p: usize,
            prefix: &mut Vec<MaxScalar>,
            out: &mut Vec<Vec<MaxScalar>>,
        ) {
            if prefix.len() == p {
                out.push(prefix.clone());
                return;
            }
            for &o in options {
                prefix.push(o);
                enumerate(options, p, prefix, out);
                prefix.pop();
            }
        }
        enumerate(&options, p, &mut Vec::new(), &mut choices);
        for a in &choices {
            let g1 = d.combine(a).unwrap();
            let lhs = f1.oplus(&g1).unwrap();
            for b in &choices {
                let g2 = d.combine(b).unwrap();
                if lhs == f2.oplus(&g2).unwrap() {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn reflexive_equivalence() {
        let d = FiniteSubspace::new(vec![vecmp(&[0.0, 0.0])]).unwrap();
        let f = vecmp(&[3.0, 1.0]);
        match quotient_equivalent(&f, &f, &d, 1000).unwrap() {
            Equivalence::Equivalent { g1, g2, .. } => {
                assert_eq!(f.oplus(&g1).unwrap(), f.oplus(&g2).unwrap());
            }
            other => panic!("reflexivity failed: {other:?}"),
        }
    }

    #[test]
    fn theta_subspace_merges_crossing_vectors() {
        // D = span{(0,0)}: f₁ = (0,−1) and f₂ = (−1,0) join at (0,0).
        let d = FiniteSubspace::new(vec![vecmp(&[0.0, 0.0])]).unwrap();
        let f1 = vecmp(&[0.0, -1.0]);
        let f2 = vecmp(&[-1.0, 0.0]);
        match quotient_equivalent(&f1, &f2, &d, 1000).unwrap() {
            Equivalence::Equivalent { g1, g2, .. } => {
                let lhs = f1.oplus(&g1).unwrap();
                assert_eq!(lhs, f2.oplus(&g2).unwrap());
                assert_eq!(lhs, vecmp(&[0.0, 0.0]));
            }
            other => panic!("expected equivalence, got {other:?}"),
        }
        assert!(brute_force_equivalent(&f1, &f2, &d, -5, 5));
    }

    #[test]
    fn unreachable_coordinate_blocks_equivalence() {
        // D = span{(0, −inf)} can never alter the second coordinate, so
        // (−inf, 0) and (−inf, 1) stay distinct.
        let d =
            FiniteSubspace::new(vec![FiniteMaxVector(vec![s(0.0), bot()])]).unwrap();
        let f1 = FiniteMaxVector(vec![bot(), s(0.0)]);
        let f2 = FiniteMaxVector(vec![bot(), s(1.0)]);
        assert_eq!(
            quotient_equivalent(&f1, &f2, &d, 1000).unwrap(),
            Equivalence::NotEquivalent
        );
        assert!(!brute_force_equivalent(&f1, &f2, &d, -6, 6));
    }

    #[test]
    fn equivalence_is_symmetric_on_answers() {
        let d = FiniteSubspace::new(vec![vecmp(&[0.0, -1.0]), vecmp(&[-1.0, 0.0])]).unwrap();
        let f1 = vecmp(&[2.0, 0.0]);
        let f2 = vecmp(&[0.0, 2.0]);
        let fwd = quotient_equivalent(&f1, &f2, &d, 1000).unwrap();
        let bwd = quotient_equivalent(&f2, &f1, &d, 1000).unwrap();
        assert_eq!(
            matches!(fwd, Equivalence::Equivalent { .. }),
            matches!(bwd, Equivalence::Equivalent { .. })
        );
        assert_eq!(
            matches!(fwd, Equivalence::Equivalent { .. }),
            brute_force_equivalent(&f1, &f2, &d, -8, 8)
        );
    }

    #[test]
    fn random_instances_agree_with_brute_force() {
        let mut rng = crate::samples::Rng::new(1234);
        for _ in 0..40 {
            let dim = 2 + rng.usize_below(2);
            let gens = 1 + rng.usize_below(2);
            let rand_vec = |rng: &mut crate::samples::Rng| {
                FiniteMaxVector(
                    (0..dim)
                        .map(|_| {
                            if rng.usize_below(5) == 0 {
                                bot()
                            } else {
                                s((rng.usize_below(7) as f64) - 3.0)
                            }
                        })
                        .collect(),
                )
            };
            let d = FiniteSubspace::new((0..gens).map(|_| rand_vec(&mut rng)).collect());
            let d = match d {
                Ok(d) => d,
                Err(_) => continue,
            };
            let f1 = rand_vec(&mut rng);
            let f2 = rand_vec(&mut rng);
            let fast = quotient_equivalent(&f1, &f2, &d, 100_000).unwrap();
            let slow = brute_force_equivalent(&f1, &f2, &d, -12, 12);
            match fast {
                Equivalence::Equivalent { ref g1, ref g2, .. } => {
                    assert!(slow, "solver found witness, brute force none: {f1} / {f2}");
                    assert_eq!(f1.oplus(g1).unwrap(), f2.oplus(g2).unwrap());
                }
                Equivalence::NotEquivalent => {
                    assert!(!slow, "brute force found witness, solver refused: {f1} / {f2}");
                }
                Equivalence::Unknown => panic!("integer instance must decide"),
            }
        }
    }

    #[test]
    fn quotient_apply_identity_map() {
        let d = FiniteSubspace::new(vec![vecmp(&[0.0, 0.0])]).unwrap();
        let rep = vecmp(&[1.0, 0.0]);
        let id = MaxPlusMatrix::identity(2);
        assert_eq!(quotient_apply(&id, &rep, &d, 1000).unwrap(), rep);
    }

    #[test]
    fn quotient_apply_whole_space_collapses() {
        // D spanned by the unit vectors is everything: all images land
        // in the single class, and invariance holds for any map.
        let d = FiniteSubspace::new(vec![
            FiniteMaxVector(vec![s(0.0), bot()]),
            FiniteMaxVector(vec![bot(), s(0.0)]),
        ])
        .unwrap();
        let t = MaxPlusMatrix::from_rows(vec![
            vec![s(0.0), s(-1.0)],
            vec![s(-1.0), s(0.0)],
        ])
        .unwrap();
        let img1 = quotient_apply(&t, &vecmp(&[1.0, 0.0]), &d, 1000).unwrap();
        let img2 = quotient_apply(&t, &vecmp(&[-3.0, 2.0]), &d, 1000).unwrap();
        match quotient_equivalent(&img1, &img2, &d, 1000).unwrap() {
            Equivalence::Equivalent { .. } => {}
            other => panic!("whole space must identify everything: {other:?}"),
        }
    }

    #[test]
    fn quotient_apply_integer_example_well_defined() {
        // T = [[0,−1],[−1,0]], D = span{(0,0)}: rep (1,0) maps to (1,0);
        // the equivalent rep (2,2) maps to an equivalent image.
        let d = FiniteSubspace::new(vec![vecmp(&[0.0, 0.0])]).unwrap();
        let t = MaxPlusMatrix::from_rows(vec![
            vec![s(0.0), s(-1.0)],
            vec![s(-1.0), s(0.0)],
        ])
        .unwrap();
        let rep = vecmp(&[1.0, 0.0]);
        let image = quotient_apply(&t, &rep, &d, 1000).unwrap();
        assert_eq!(image, vecmp(&[1.0, 0.0]));

        let alt = vecmp(&[2.0, 2.0]);
        assert!(matches!(
            quotient_equivalent(&rep, &alt, &d, 1000).unwrap(),
            Equivalence::Equivalent { .. }
        ));
        let alt_image = quotient_apply(&t, &alt, &d, 1000).unwrap();
        assert!(matches!(
            quotient_equivalent(&image, &alt_image, &d, 1000).unwrap(),
            Equivalence::Equivalent { .. }
        ));
    }

    #[test]
    fn quotient_apply_refuses_non_invariant_subspace() {
        // D = span{(0,−inf)} but T swaps coordinates: the image
        // (−inf, 0) cannot be matched inside the class.
        let d = FiniteSubspace::new(vec![FiniteMaxVector(vec![s(0.0), bot()])]).unwrap();
        let swap = MaxPlusMatrix::from_rows(vec![
            vec![bot(), s(0.0)],
            vec![s(0.0), bot()],
        ])
        .unwrap();
        assert!(matches!(
            quotient_apply(&swap, &vecmp(&[0.0, 0.0]), &d, 1000),
            Err(Error::ConstructionRefused(_))
        ));
    }

    #[test]
    fn vector_text_round_trip() {
        let v = FiniteMaxVector(vec![s(1.5), bot(), s(-0.25)]);
        let text = v.to_string();
        assert_eq!(text, "1.5 -inf -0.25");
        let back: FiniteMaxVector = text.parse().unwrap();
        assert_eq!(back, v);
        let sub = FiniteSubspace::parse("0 -inf\n-inf 0\n").unwrap();
        assert_eq!(sub.generators().len(), 2);
    }
}
