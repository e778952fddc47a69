//! Standard constructions on semigroups: rescaling, products,
//! restrictions to invariant subclasses, and similarity conjugation.
//!
//! Each construction's hypotheses (commutation, invariance, inverse
//! consistency) are enforced by sampled checks that refuse the
//! construction on failure; nothing is silently assumed.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::MaxScalar;
use crate::semigroup::Semigroup;
use crate::space::{dist, GridFunction, Norm};

/// Reading of the rescaled semigroup `S(t) = e^{βt} T(αt)`.
///
/// The additive variant interprets the prefactor through the max-plus
/// scalar action (`βt ⊗ ·`, a pointwise shift); the multiplicative one
/// takes the formula literally (real scaling by `e^{βt}`), which is not
/// a max-plus operation and demonstrably breaks plus-homogeneity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescaleVariant {
    Additive,
    Multiplicative,
}

/// The rescaled semigroup `S(t) = βt ⊗ T(αt)` (additive) or
/// `S(t) = e^{βt} · T(αt)` (multiplicative).
#[derive(Debug, Clone)]
pub struct Rescaled<S> {
    inner: S,
    alpha: f64,
    beta: f64,
    variant: RescaleVariant,
    label: String,
}

pub fn rescale<S: Semigroup>(
    inner: S,
    alpha: f64,
    beta: f64,
    variant: RescaleVariant,
) -> Result<Rescaled<S>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("rescale needs alpha > 0, got {alpha}")));
    }
    let tag = match variant {
        RescaleVariant::Additive => "add",
        RescaleVariant::Multiplicative => "mul",
    };
    let label = format!("rescale-{tag}({alpha},{beta})-{}", inner.label());
    Ok(Rescaled { inner, alpha, beta, variant, label })
}

impl<S: Semigroup> Semigroup for Rescaled<S> {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if t == 0.0 {
            return Ok(f.clone());
        }
        let base = self.inner.evolve(self.alpha * t, f)?;
        match self.variant {
            RescaleVariant::Additive => Ok(base.pw_otimes(MaxScalar::finite(self.beta * t)?)),
            RescaleVariant::Multiplicative => {
                let factor = (self.beta * t).exp();
                let vals: Vec<MaxScalar> = base
                    .values()
                    .iter()
                    .map(|v| match v.value() {
                        Some(x) => MaxScalar::num(factor * x),
                        None => MaxScalar::Bottom,
                    })
                    .collect();
                GridFunction::new(base.grid().clone(), vals)
            }
        }
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        self.inner.native_norm()
    }
}

/// The product semigroup `S(t) = T(t) U(t)`, admissible only when the
/// factors commute; commutation is measured on samples before the
/// operator is handed out.
#[derive(Debug, Clone)]
pub struct ProductSemigroup<T, U> {
    first: T,
    second: U,
    label: String,
}

pub fn product<T: Semigroup, U: Semigroup>(
    first: T,
    second: U,
    times: &[f64],
    commutation_samples: &[GridFunction],
    budget: f64,
) -> Result<ProductSemigroup<T, U>> {
    if commutation_samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let norm = first.native_norm();
    for &t in times {
        for f in commutation_samples {
            let tu = first.evolve(t, &second.evolve(t, f)?)?;
            let ut = second.evolve(t, &first.evolve(t, f)?)?;
            let defect = dist(&tu, &ut, norm)?;
            if defect > budget {
                return Err(Error::ConstructionRefused(format!(
                    "product refused: commutation defect {defect} exceeds budget {budget} at t = {t}"
                )));
            }
        }
    }
    let label = format!("product({},{})", first.label(), second.label());
    Ok(ProductSemigroup { first, second, label })
}

impl<T: Semigroup, U: Semigroup> Semigroup for ProductSemigroup<T, U> {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if t == 0.0 {
            return Ok(f.clone());
        }
        self.first.evolve(t, &self.second.evolve(t, f)?)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        self.first.native_norm()
    }
}

type Predicate = Arc<dyn Fn(&GridFunction) -> bool + Send + Sync>;

/// The restriction of a semigroup to a predicate-defined subclass;
/// evolve rejects inputs outside the class.
#[derive(Clone)]
pub struct Restricted<S> {
    inner: S,
    predicate: Predicate,
    label: String,
}

impl<S: std::fmt::Debug> std::fmt::Debug for Restricted<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Restricted").field("inner", &self.inner).finish()
    }
}

/// Builds the restriction after verifying, on the given samples and
/// times, that the class members stay in the class under evolution.
pub fn restrict<S: Semigroup>(
    inner: S,
    class_name: &str,
    predicate: impl Fn(&GridFunction) -> bool + Send + Sync + 'static,
    invariance_samples: &[GridFunction],
    times: &[f64],
) -> Result<Restricted<S>> {
    if invariance_samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let predicate: Predicate = Arc::new(predicate);
    for (k, f) in invariance_samples.iter().enumerate() {
        if !predicate(f) {
            return Err(Error::InvalidArgument(format!(
                "invariance sample {k} is not a member of class `{class_name}`"
            )));
        }
        for &t in times {
            let out = inner.evolve(t, f)?;
            if !predicate(&out) {
                return Err(Error::ConstructionRefused(format!(
                    "restriction refused: sample {k} leaves class `{class_name}` at t = {t}"
                )));
            }
        }
    }
    let label = format!("restrict({},{class_name})", inner.label());
    Ok(Restricted { inner, predicate, label })
}

impl<S: Semigroup> Semigroup for Restricted<S> {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(self.predicate)(f) {
            return Err(Error::InvalidArgument(
                "input outside the restricted subclass".into(),
            ));
        }
        self.inner.evolve(t, f)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        self.inner.native_norm()
    }
}

/// A max-plus linear grid isomorphism: a cell permutation composed with
/// a fixed `⊗`-shift, `(Vf)_i = shift ⊗ f_{perm[i]}`.
#[derive(Debug, Clone)]
pub struct GridMap {
    perm: Vec<usize>,
    shift: MaxScalar,
}

impl GridMap {
    pub fn new(perm: Vec<usize>, shift: MaxScalar) -> Result<Self> {
        if shift.is_bottom() {
            return Err(Error::InvalidArgument(
                "a grid map with bottom shift is not invertible".into(),
            ));
        }
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(GridMap { perm, shift })
    }

    pub fn identity(n: usize) -> Self {
        GridMap {
            perm: (0..n).collect(),
            shift: MaxScalar::UNIT,
        }
    }

    /// The reflection `x ↦ −x` (cell `i ↦ n−1−i`).
    pub fn reflection(n: usize) -> Self {
        GridMap {
            perm: (0..n).rev().collect(),
            shift: MaxScalar::UNIT,
        }
    }

    /// Pure `⊗`-shift by `c`.
    pub fn otimes_shift(n: usize, c: f64) -> Result<Self> {
        Ok(GridMap {
            perm: (0..n).collect(),
            shift: MaxScalar::finite(c)?,
        })
    }

    /// The inverse map (inverse permutation, negated shift).
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        let shift = match self.shift {
            MaxScalar::Finite(c) => MaxScalar::Finite(-c),
            MaxScalar::Bottom => unreachable!("validated at construction"),
        };
        GridMap { perm: inv, shift }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.len() != self.perm.len() {
            return Err(Error::DimensionMismatch(format!(
                "grid map on {} cells applied to {} cells",
                self.perm.len(),
                f.len()
            )));
        }
        let vals: Vec<MaxScalar> = self
            .perm
            .iter()
            .map(|&p| self.shift.otimes(f.get(p)))
            .collect();
        GridFunction::new(f.grid().clone(), vals)
    }
}

/// The conjugated semigroup `S(t) = V⁻¹ T(t) V`.
#[derive(Debug, Clone)]
pub struct Conjugated<S> {
    inner: S,
    v: GridMap,
    vinv: GridMap,
    label: String,
}

/// Builds the conjugation after verifying on samples that `v` and
/// `vinv` really invert each other (bit-for-bit on permutations, up to
/// strict equality of the composed values in general).
pub fn conjugate<S: Semigroup>(
    inner: S,
    v: GridMap,
    vinv: GridMap,
    samples: &[GridFunction],
) -> Result<Conjugated<S>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    for (k, f) in samples.iter().enumerate() {
        let round1 = vinv.apply(&v.apply(f)?)?;
        let round2 = v.apply(&vinv.apply(f)?)?;
        if dist(&round1, f, Norm::Sup)? > 1e-12 || dist(&round2, f, Norm::Sup)? > 1e-12 {
            return Err(Error::ConstructionRefused(format!(
                "conjugation refused: V∘V⁻¹ differs from the identity on sample {k}"
            )));
        }
    }
    let label = format!("conjugate({})", inner.label());
    Ok(Conjugated { inner, v, vinv, label })
}

impl<S: Semigroup> Semigroup for Conjugated<S> {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if t == 0.0 {
            return Ok(f.clone());
        }
        self.vinv.apply(&self.inner.evolve(t, &self.v.apply(f)?)?)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        self.inner.native_norm()
    }
}
