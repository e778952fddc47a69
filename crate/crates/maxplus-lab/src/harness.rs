//! Property harness: measures, for a given operator family, the defect
//! of every algebraic and metric property it is supposed to satisfy,
//! and classifies the defect as exact, within scheme error, or a
//! genuine violation.
//!
//! Defects are measured in the operator's native norm. Classification
//! uses two thresholds: an exactness tolerance `1e−12 · scale` (with
//! `scale = max(1, ‖inputs‖_∞)`), and a scheme-error budget `C · Δx`
//! with configurable `C`. A defect that does not shrink under grid
//! refinement is upgraded to a violation by the refinement machinery.

use crate::error::{Error, Result};
use crate::scalar::MaxScalar;
use crate::semigroup::{lip_seminorm_estimate, Semigroup};
use crate::space::{dist, GridFunction, Norm};

pub const EXACT_RTOL: f64 = 1e-12;

/// Which property a report speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    MaxAdditivity,
    PlusHomogeneity,
    Monotonicity,
    SemigroupLaw,
    StrongContinuity,
    Contraction,
    IsometryL1,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::MaxAdditivity => "max-additivity",
            Property::PlusHomogeneity => "plus-homogeneity",
            Property::Monotonicity => "monotonicity",
            Property::SemigroupLaw => "semigroup-law",
            Property::StrongContinuity => "strong-continuity",
            Property::Contraction => "contraction",
            Property::IsometryL1 => "isometry-l1",
        }
    }
}

impl std::str::FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-additivity" => Ok(Property::MaxAdditivity),
            "plus-homogeneity" => Ok(Property::PlusHomogeneity),
            "monotonicity" => Ok(Property::Monotonicity),
            "semigroup-law" => Ok(Property::SemigroupLaw),
            "strong-continuity" => Ok(Property::StrongContinuity),
            "contraction" => Ok(Property::Contraction),
            "isometry-l1" => Ok(Property::IsometryL1),
            other => Err(Error::InvalidArgument(format!("unknown property `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exact,
    WithinSchemeError,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Exact => "EXACT",
            Verdict::WithinSchemeError => "WITHIN_SCHEME_ERROR",
            Verdict::Violated => "VIOLATED",
        }
    }
}

/// Error budget used to classify measured defects.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Scheme-error constant: a defect up to `c · Δx · scale` counts as
    /// discretization error.
    pub c: f64,
    /// Cell width of the grid the samples live on.
    pub dx: f64,
}

impl Budget {
    pub fn new(c: f64, dx: f64) -> Self {
        Budget { c, dx }
    }

    fn classify(&self, defect: f64, scale: f64) -> Verdict {
        if defect <= EXACT_RTOL * scale {
            Verdict::Exact
        } else if defect <= self.c * self.dx * scale {
            Verdict::WithinSchemeError
        } else {
            Verdict::Violated
        }
    }
}

/// Measured defect of one property for one operator.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: Property,
    pub operator: String,
    pub t: f64,
    pub norm: Norm,
    pub defect: f64,
    pub samples: usize,
    pub verdict: Verdict,
    pub details: String,
}

impl PropertyReport {
    pub const CSV_HEADER: &'static str = "property,operator,t,norm,defect,samples,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{},{:?},{},{}",
            self.property.as_str(),
            self.operator,
            self.t,
            self.norm.as_str(),
            self.defect,
            self.samples,
            self.verdict.as_str()
        )
    }
}

fn scale_of(fs: &[&GridFunction]) -> f64 {
    let mut s = 1.0f64;
    for f in fs {
        for v in f.values() {
            if let Some(v) = v.value() {
                s = s.max(v.abs());
            }
        }
    }
    s
}

/// Worst tier wins: per-pair classification aggregated over samples.
struct Aggregator {
    budget: Budget,
    defect: f64,
    verdict: Verdict,
    samples: usize,
}

impl Aggregator {
    fn new(budget: Budget) -> Self {
        Aggregator {
            budget,
            defect: 0.0,
            verdict: Verdict::Exact,
            samples: 0,
        }
    }

    fn add(&mut self, defect: f64, scale: f64) {
        self.samples += 1;
        self.defect = self.defect.max(defect);
        let v = self.budget.classify(defect, scale);
        self.verdict = match (self.verdict, v) {
            (Verdict::Violated, _) | (_, Verdict::Violated) => Verdict::Violated,
            (Verdict::WithinSchemeError, _) | (_, Verdict::WithinSchemeError) => {
                Verdict::WithinSchemeError
            }
            _ => Verdict::Exact,
        };
    }
}

/// Defect of `T(t)(f ⊕ g) = T(t)f ⊕ T(t)g` over the sample pairs.
pub fn defect_max_additivity<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    pairs: &[(GridFunction, GridFunction)],
    budget: Budget,
) -> Result<PropertyReport> {
    let norm = op.native_norm();
    let mut agg = Aggregator::new(budget);
    for (f, g) in pairs {
        let lhs = op.evolve(t, &f.pw_oplus(g)?)?;
        let rhs = op.evolve(t, f)?.pw_oplus(&op.evolve(t, g)?)?;
        let d = dist(&lhs, &rhs, norm)?;
        agg.add(d, scale_of(&[f, g]));
    }
    Ok(PropertyReport {
        property: Property::MaxAdditivity,
        operator: op.label().to_string(),
        t,
        norm,
        defect: agg.defect,
        samples: agg.samples,
        verdict: agg.verdict,
        details: String::new(),
    })
}

/// Defect of `T(t)(a ⊗ f) = a ⊗ T(t)f` over the samples.
pub fn defect_plus_homogeneity<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    a: MaxScalar,
    samples: &[GridFunction],
    budget: Budget,
) -> Result<PropertyReport> {
    let a_val = a
        .value()
        .ok_or_else(|| Error::InvalidArgument("plus-homogeneity probe needs finite a".into()))?;
    let norm = op.native_norm();
    let mut agg = Aggregator::new(budget);
    for f in samples {
        let lhs = op.evolve(t, &f.pw_otimes(a))?;
        let rhs = op.evolve(t, f)?.pw_otimes(a);
        let d = dist(&lhs, &rhs, norm)?;
        agg.add(d, scale_of(&[f]).max(a_val.abs()));
    }
    Ok(PropertyReport {
        property: Property::PlusHomogeneity,
        operator: op.label().to_string(),
        t,
        norm,
        defect: agg.defect,
        samples: agg.samples,
        verdict: agg.verdict,
        details: format!("a={a_val}"),
    })
}

/// Order-preservation defect: for pairs with `f ⪯ g`, the positive part
/// of `T(t)f − T(t)g` measured in the native norm.
///
/// Pairs not satisfying `f ⪯ g` are rejected.
pub fn defect_monotonicity<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    ordered_pairs: &[(GridFunction, GridFunction)],
    budget: Budget,
) -> Result<PropertyReport> {
    let norm = op.native_norm();
    let mut agg = Aggregator::new(budget);
    for (f, g) in ordered_pairs {
        if !f.leq(g)? {
            return Err(Error::InvalidArgument(
                "monotonicity probe needs pairs with f ⪯ g".into(),
            ));
        }
        let tf = op.evolve(t, f)?;
        let tg = op.evolve(t, g)?;
        let (pos, _, _) = tf.sub(&tg)?.lattice_decompose()?;
        let d = pos.norm(norm)?;
        agg.add(d, scale_of(&[f, g]));
    }
    Ok(PropertyReport {
        property: Property::Monotonicity,
        operator: op.label().to_string(),
        t,
        norm,
        defect: agg.defect,
        samples: agg.samples,
        verdict: agg.verdict,
        details: String::new(),
    })
}

/// Defect of the semigroup law `T(t+s) = T(t)T(s)` over the samples.
pub fn defect_semigroup_law<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    s: f64,
    samples: &[GridFunction],
    budget: Budget,
) -> Result<PropertyReport> {
    let norm = op.native_norm();
    let mut agg = Aggregator::new(budget);
    for f in samples {
        let direct = op.evolve(t + s, f)?;
        let composed = op.evolve(t, &op.evolve(s, f)?)?;
        let d = dist(&direct, &composed, norm)?;
        agg.add(d, scale_of(&[f]));
    }
    Ok(PropertyReport {
        property: Property::SemigroupLaw,
        operator: op.label().to_string(),
        t: t + s,
        norm,
        defect: agg.defect,
        samples: agg.samples,
        verdict: agg.verdict,
        details: format!("t={t},s={s}"),
    })
}

/// Sampled modulus of strong continuity: `(t, ‖T(t)f − f‖)` for each
/// requested time, in the native norm.
pub fn continuity_modulus<S: Semigroup + ?Sized>(
    op: &S,
    f: &GridFunction,
    t_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let norm = op.native_norm();
    t_list
        .iter()
        .map(|&t| {
            let tf = op.evolve(t, f)?;
            Ok((t, dist(&tf, f, norm)?))
        })
        .collect()
}

/// Checks `‖T(t)‖_Lip ≤ e^{ωt}` at every requested time, via the
/// sampled lower-bound estimator. `tol` absorbs rounding in the
/// quotients; the defect is the worst positive excess.
pub fn check_contraction<S: Semigroup + ?Sized>(
    op: &S,
    t_list: &[f64],
    pairs: &[(GridFunction, GridFunction)],
    omega: f64,
    tol: f64,
    budget: Budget,
) -> Result<PropertyReport> {
    let norm = op.native_norm();
    let mut worst_excess = 0.0f64;
    let mut worst_t = t_list.first().copied().unwrap_or(0.0);
    let mut details = Vec::new();
    for &t in t_list {
        let est = lip_seminorm_estimate(op, t, pairs, norm)?;
        let bound = (omega * t).exp();
        let excess = (est - bound - tol).max(0.0);
        details.push(format!("t={t}:est={est}"));
        if excess > worst_excess {
            worst_excess = excess;
            worst_t = t;
        }
    }
    let verdict = if worst_excess == 0.0 {
        Verdict::Exact
    } else {
        budget.classify(worst_excess, 1.0)
    };
    Ok(PropertyReport {
        property: Property::Contraction,
        operator: op.label().to_string(),
        t: worst_t,
        norm,
        defect: worst_excess,
        samples: pairs.len() * t_list.len(),
        verdict,
        details: details.join(";"),
    })
}

/// Checks that `T(t)` preserves L¹ distances on the sample pairs:
/// the defect is `max |‖T(t)f − T(t)g‖₁ − ‖f − g‖₁|`.
///
/// Meaningful only for integral-preserving operators; the caller asserts
/// that (see the conservation-law mass integral).
pub fn check_isometry_l1<S: Semigroup + ?Sized>(
    op: &S,
    t: f64,
    pairs: &[(GridFunction, GridFunction)],
    budget: Budget,
) -> Result<PropertyReport> {
    let mut agg = Aggregator::new(budget);
    for (f, g) in pairs {
        let before = dist(f, g, Norm::L1)?;
        let tf = op.evolve(t, f)?;
        let tg = op.evolve(t, g)?;
        let after = dist(&tf, &tg, Norm::L1)?;
        agg.add((after - before).abs(), scale_of(&[f, g]));
    }
    Ok(PropertyReport {
        property: Property::IsometryL1,
        operator: op.label().to_string(),
        t,
        norm: Norm::L1,
        defect: agg.defect,
        samples: agg.samples,
        verdict: agg.verdict,
        details: String::new(),
    })
}

/// One point of a refinement study: cell count and measured defect.
#[derive(Debug, Clone, Copy)]
pub struct RefinementPoint {
    pub n: usize,
    pub defect: f64,
    pub scale: f64,
}

/// Classifies a defect curve across grid refinements.
///
/// A defect at exactness level everywhere is `Exact`. Otherwise the
/// curve must shrink by at least `min_shrink` per doubling to count as
/// scheme error; a defect that stalls or grows is a genuine violation.
pub fn refinement_verdict(points: &[RefinementPoint], min_shrink: f64) -> Verdict {
    if points.is_empty() {
        return Verdict::Violated;
    }
    if points
        .iter()
        .all(|p| p.defect <= EXACT_RTOL * p.scale)
    {
        return Verdict::Exact;
    }
    for w in points.windows(2) {
        let coarse = w[0].defect.max(EXACT_RTOL * w[0].scale);
        if w[1].defect > min_shrink * coarse {
            return Verdict::Violated;
        }
    }
    Verdict::WithinSchemeError
}
