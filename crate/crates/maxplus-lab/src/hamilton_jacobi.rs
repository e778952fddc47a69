//! Hamilton–Jacobi semigroup in the maximization orientation
//! `u_t = H(x, ∇u)`.
//!
//! Two realizations:
//!
//! * the discrete Hopf–Lax formula
//!   `u(t, x_i) = max_j [ h(x_j) − t·L((x_i − x_j)/t) ]`
//!   with `L` the convex conjugate of a state-independent convex `H`.
//!   Because the sup runs over grid nodes only, the operator is exactly
//!   max-plus linear at the discrete level;
//! * a monotone Lax–Friedrichs finite-difference scheme for general
//!   `H(x, p)`. The scheme itself advances `w_t + G(x, ∇w) = 0`; the
//!   semigroup dispatch hands it `G = −H`, which is the single place
//!   the sign bridge between the two orientations lives.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::MaxScalar;
use crate::semigroup::Semigroup;
use crate::space::{GridFunction, Norm};

type XpFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type QFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const HP_SAMPLES: usize = 129;

/// A Hamiltonian `H(x, p)`, continuous, with a finite bound on
/// `|∂H/∂p|` over any queried range.
#[derive(Clone)]
pub struct Hamiltonian {
    h: XpFn,
    /// State-independent (`H(x,p) = H(p)`) and convex in `p`; such
    /// Hamiltonians unlock the Hopf–Lax path.
    p_only_convex: bool,
    /// Closed-form conjugate, when known.
    conjugate: Option<Lagrangian>,
    name: String,
}

impl std::fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hamiltonian").field("name", &self.name).finish()
    }
}

impl Hamiltonian {
    /// `H(p) = p²/2`, conjugate `L(q) = q²/2`.
    pub fn quadratic() -> Self {
        Hamiltonian {
            h: Arc::new(|_, p| 0.5 * p * p),
            p_only_convex: true,
            conjugate: Some(Lagrangian::quadratic()),
            name: "quadratic".into(),
        }
    }

    /// `H(p) = |p|`, conjugate the indicator of `[−1, 1]`.
    pub fn abs() -> Self {
        Hamiltonian {
            h: Arc::new(|_, p| p.abs()),
            p_only_convex: true,
            conjugate: Some(Lagrangian::indicator(1.0)),
            name: "abs".into(),
        }
    }

    /// State-independent convex Hamiltonian from a closure; the
    /// conjugate is computed numerically on demand.
    pub fn p_only_convex(name: &str, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Hamiltonian {
            h: Arc::new(move |_, p| h(p)),
            p_only_convex: true,
            conjugate: None,
            name: name.into(),
        }
    }

    /// General state-dependent Hamiltonian; only the finite-difference
    /// path applies.
    pub fn general(name: &str, h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Hamiltonian {
            h: Arc::new(h),
            p_only_convex: false,
            conjugate: None,
            name: name.into(),
        }
    }

    /// Hamiltonian from sampled `(p, H(p))` pairs, linearly interpolated
    /// (clamped extrapolation by the boundary slopes).
    pub fn from_table(name: &str, mut table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidArgument("hamiltonian table needs >= 2 samples".into()));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        let tbl = Arc::new(table);
        let t2 = tbl.clone();
        Ok(Hamiltonian {
            h: Arc::new(move |_, p| {
                let t = &*t2;
                let k = t.partition_point(|&(pp, _)| pp <= p).clamp(1, t.len() - 1);
                let (p0, h0) = t[k - 1];
                let (p1, h1) = t[k];
                h0 + (h1 - h0) * (p - p0) / (p1 - p0)
            }),
            p_only_convex: false,
            conjugate: None,
            name: name.into(),
        })
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        (self.h)(x, p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_p_only_convex(&self) -> bool {
        self.p_only_convex
    }

    /// Sampled overestimate of `|∂H/∂p|` for `|p| ≤ p_max`, `x` ranging
    /// over the given states.
    pub fn p_lipschitz_bound(&self, xs: &[f64], p_max: f64) -> f64 {
        let p_max = p_max.max(1e-6);
        let h = p_max / ((HP_SAMPLES - 1) as f64 / 2.0);
        let mut worst = 0.0f64;
        let probe_xs: &[f64] = if xs.is_empty() { &[0.0] } else { xs };
        for &x in probe_xs {
            for k in 0..HP_SAMPLES - 1 {
                let p0 = -p_max + h * k as f64;
                let p1 = p0 + h;
                let slope = (self.eval(x, p1) - self.eval(x, p0)) / h;
                worst = worst.max(slope.abs());
            }
        }
        1.25 * worst + 1e-9
    }
}

/// A Lagrangian `L(q)`, lower semicontinuous and convex on its
/// effective domain; the value `+inf` encodes hard velocity constraints
/// and drops the corresponding terms out of the Hopf–Lax sup.
#[derive(Clone)]
pub struct Lagrangian {
    eval: QFn,
    domain: (f64, f64),
    name: String,
}

impl std::fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lagrangian")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Lagrangian {
    /// `L(q) = q²/2`.
    pub fn quadratic() -> Self {
        Lagrangian {
            eval: Arc::new(|q| 0.5 * q * q),
            domain: (f64::NEG_INFINITY, f64::INFINITY),
            name: "quadratic".into(),
        }
    }

    /// Indicator of `[−r, r]`: `0` inside, `+inf` outside.
    pub fn indicator(r: f64) -> Self {
        Lagrangian {
            eval: Arc::new(move |q| if q.abs() <= r { 0.0 } else { f64::INFINITY }),
            domain: (-r, r),
            name: format!("indicator({r})"),
        }
    }

    /// Arbitrary closure (must be convex; not validated).
    pub fn from_fn(
        name: &str,
        domain: (f64, f64),
        l: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Lagrangian { eval: Arc::new(l), domain, name: name.into() }
    }

    pub fn eval(&self, q: f64) -> f64 {
        (self.eval)(q)
    }

    pub fn effective_domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Numerical Legendre–Fenchel transform: `L(q) = sup_p (p·q − H(p))`
/// with the sup over `n_p` samples of `[p_min, p_max]`. Values above
/// `cap` are reported as `+inf` (outside the effective domain).
///
/// Fails if the sampled midpoint test detects non-convexity of `H`.
pub fn legendre_transform(
    h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    p_min: f64,
    p_max: f64,
    n_p: usize,
    cap: f64,
) -> Result<Lagrangian> {
    if !(p_min < p_max) || n_p < 3 {
        return Err(Error::InvalidArgument(
            "legendre transform needs p_min < p_max and n_p >= 3".into(),
        ));
    }
    let dp = (p_max - p_min) / (n_p - 1) as f64;
    let ps: Vec<f64> = (0..n_p).map(|k| p_min + dp * k as f64).collect();
    let hs: Vec<f64> = ps.iter().map(|&p| h(p)).collect();
    let scale = hs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for k in 1..n_p - 1 {
        let mid = hs[k];
        let chord = 0.5 * (hs[k - 1] + hs[k + 1]);
        if mid > chord + 1e-9 * scale {
            return Err(Error::NonConvex(format!(
                "midpoint test failed at p = {}: H = {mid} > chord {chord}",
                ps[k]
            )));
        }
    }
    // Effective domain estimate: the conjugate stays below the cap
    // roughly for q in the range of sampled slopes.
    let lo_slope = (hs[1] - hs[0]) / dp;
    let hi_slope = (hs[n_p - 1] - hs[n_p - 2]) / dp;
    let name = "conjugate".to_string();
    Ok(Lagrangian {
        eval: Arc::new(move |q| {
            let mut best = f64::NEG_INFINITY;
            for (p, hv) in ps.iter().zip(&hs) {
                best = best.max(p * q - hv);
            }
            if best > cap {
                f64::INFINITY
            } else {
                best
            }
        }),
        domain: (lo_slope, hi_slope),
        name,
    })
}

/// Discrete Hopf–Lax evolution:
/// `u(t, x_i) = max_j [ h(x_j) − t·L((x_i − x_j)/t) ]` for `t > 0`,
/// `u(0, ·) = h`. Bottom cells of `h` and `L = +inf` simply drop out of
/// the max; an output cell that no finite term reaches is bottom.
///
/// The grid is treated as a plain box (no periodic wrap in the sup).
pub fn hopf_lax_evolve(l: &Lagrangian, h: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::TimeOutOfRange { t, what: "[0, ∞)".into() });
    }
    if t == 0.0 {
        return Ok(h.clone());
    }
    let grid = h.grid();
    let n = grid.len();
    let dx = grid.dx();
    // Displacements x_i − x_j take only the 2n−1 values k·Δx; the kernel
    // −t·L(k·Δx/t) is tabulated once per evolve.
    let kernel: Vec<f64> = (-(n as i64 - 1)..=(n as i64 - 1))
        .map(|k| {
            let q = k as f64 * dx / t;
            let lv = l.eval(q);
            if lv.is_finite() {
                -t * lv
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let hv = h.values_f64();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut best = f64::NEG_INFINITY;
        let base = i + n - 1;
        for j in 0..n {
            // kernel index for displacement (i − j)·Δx
            let cand = hv[j] + kernel[base - j];
            if cand > best {
                best = cand;
            }
        }
        out.push(best);
    }
    GridFunction::from_f64_values(grid, &out)
}

/// One monotone Lax–Friedrichs update for `u_t + H(x, ∇u) = 0`:
///
/// `u_i ← u_i − dt·[ H(x_i, D⁰u_i) − θ·(u_{i+1} − 2u_i + u_{i−1})/(2Δx) ]`
///
/// where `D⁰` is the central difference and `θ` the artificial
/// viscosity. Monotone iff `θ` dominates `|∂H/∂p|` over the observed
/// gradient range and `dt·θ/Δx ≤ 1/2`; both are enforced.
pub fn lax_friedrichs_step(
    h: &Hamiltonian,
    u: &GridFunction,
    dt: f64,
    artificial_viscosity: f64,
) -> Result<GridFunction> {
    let centers: Vec<f64> = u.grid().centers().collect();
    lax_friedrichs_step_with_probe(h, u, dt, artificial_viscosity, &centers)
}

fn lax_friedrichs_step_with_probe(
    h: &Hamiltonian,
    u: &GridFunction,
    dt: f64,
    artificial_viscosity: f64,
    probe_xs: &[f64],
) -> Result<GridFunction> {
    let grid = u.grid();
    let dx = grid.dx();
    let vals = u.finite_values()?;
    let p_obs = max_central_difference(&vals, dx, grid.periodic());
    let needed = h.p_lipschitz_bound(probe_xs, p_obs);
    if artificial_viscosity < needed {
        return Err(Error::MonotonicityBound(format!(
            "viscosity {artificial_viscosity} below required bound {needed}"
        )));
    }
    if dt * artificial_viscosity / dx > 0.5 {
        return Err(Error::CflViolation {
            dt,
            limit: 0.5 * dx / artificial_viscosity,
        });
    }
    lax_friedrichs_step_unchecked(h, u, dt, artificial_viscosity)
}

/// The same update with no stability validation. Exists so the harness
/// can run deliberately CFL-breaking experiments and watch monotonicity
/// fail.
pub fn lax_friedrichs_step_unchecked(
    h: &Hamiltonian,
    u: &GridFunction,
    dt: f64,
    artificial_viscosity: f64,
) -> Result<GridFunction> {
    let grid = u.grid();
    let dx = grid.dx();
    let vals = u.finite_values()?;
    let n = vals.len();
    let at = |i: i64| -> f64 {
        if grid.periodic() {
            vals[(i.rem_euclid(n as i64)) as usize]
        } else {
            // Constant extrapolation outside the box.
            vals[i.clamp(0, n as i64 - 1) as usize]
        }
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let up = at(i + 1);
        let um = at(i - 1);
        let u0 = at(i);
        let p = (up - um) / (2.0 * dx);
        let diff = (up - 2.0 * u0 + um) / (2.0 * dx);
        let x = grid.center(i as usize);
        out.push(u0 - dt * (h.eval(x, p) - artificial_viscosity * diff));
    }
    GridFunction::from_f64_values(grid, &out)
}

fn max_central_difference(vals: &[f64], dx: f64, periodic: bool) -> f64 {
    let n = vals.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let up = if periodic {
            vals[(i + 1) % n]
        } else {
            vals[(i + 1).min(n - 1)]
        };
        let um = if periodic {
            vals[(i + n - 1) % n]
        } else {
            vals[i.saturating_sub(1)]
        };
        worst = worst.max(((up - um) / (2.0 * dx)).abs());
    }
    worst
}

#[derive(Clone, Debug)]
enum HjPath {
    HopfLax(Lagrangian),
    LaxFriedrichs { hamiltonian: Hamiltonian, courant: f64 },
}

/// The Hamilton–Jacobi evolution semigroup for `u_t = H(x, ∇u)`.
///
/// For state-independent convex Hamiltonians it dispatches to the exact
/// discrete Hopf–Lax formula; otherwise it substeps the monotone
/// Lax–Friedrichs scheme, handing it the negated Hamiltonian (the
/// scheme integrates `w_t + G = 0`, and `G = −H` makes `w_t = H`).
#[derive(Clone, Debug)]
pub struct HjSemigroup {
    path: HjPath,
    label: String,
}

impl HjSemigroup {
    /// Picks the Hopf–Lax path when the Hamiltonian allows it, the
    /// Lax–Friedrichs path otherwise.
    pub fn from_hamiltonian(h: &Hamiltonian) -> Result<Self> {
        if h.is_p_only_convex() {
            let lagrangian = match &h.conjugate {
                Some(l) => l.clone(),
                None => legendre_transform(
                    {
                        let hf = h.h.clone();
                        move |p| hf(0.0, p)
                    },
                    -20.0,
                    20.0,
                    2001,
                    1e9,
                )?,
            };
            Ok(HjSemigroup {
                label: format!("hopf-lax-{}", h.name()),
                path: HjPath::HopfLax(lagrangian),
            })
        } else {
            Ok(Self::lax_friedrichs(h.clone()))
        }
    }

    /// Exact discrete Hopf–Lax semigroup for a given Lagrangian.
    pub fn hopf_lax(l: Lagrangian) -> Self {
        HjSemigroup {
            label: format!("hopf-lax-{}", l.name()),
            path: HjPath::HopfLax(l),
        }
    }

    /// Lax–Friedrichs semigroup for a general Hamiltonian, stated in the
    /// maximization orientation `u_t = H(x, ∇u)`.
    pub fn lax_friedrichs(h: Hamiltonian) -> Self {
        HjSemigroup {
            label: format!("lax-friedrichs-{}", h.name()),
            path: HjPath::LaxFriedrichs { hamiltonian: h, courant: 0.9 },
        }
    }

    pub fn lagrangian(&self) -> Option<&Lagrangian> {
        match &self.path {
            HjPath::HopfLax(l) => Some(l),
            _ => None,
        }
    }
}

impl Semigroup for HjSemigroup {
    fn evolve(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::TimeOutOfRange { t, what: "[0, ∞)".into() });
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        match &self.path {
            HjPath::HopfLax(l) => hopf_lax_evolve(l, f, t),
            HjPath::LaxFriedrichs { hamiltonian, courant } => {
                // Sign bridge: advance w_t + (−H) = 0, i.e. u_t = H(x, ∇u).
                let neg = Hamiltonian {
                    h: {
                        let inner = hamiltonian.h.clone();
                        Arc::new(move |x, p| -inner(x, p))
                    },
                    p_only_convex: false,
                    conjugate: None,
                    name: hamiltonian.name.clone(),
                };
                let grid = f.grid();
                let dx = grid.dx();
                // Subsampled state probe for the gradient bound; the
                // cached bound is refreshed only when the observed
                // gradient range outgrows its margin.
                let stride = (grid.len() / 33).max(1);
                let xs: Vec<f64> = (0..grid.len())
                    .step_by(stride)
                    .map(|i| grid.center(i))
                    .collect();
                let mut p_cap = 0.0f64;
                let mut theta = 0.0f64;
                let mut u = f.clone();
                let mut remaining = t;
                while remaining > 0.0 {
                    let vals = u.finite_values()?;
                    let p_obs = max_central_difference(&vals, dx, grid.periodic());
                    if theta == 0.0 || p_obs > p_cap {
                        p_cap = 1.25 * p_obs + 0.1;
                        theta = neg.p_lipschitz_bound(&xs, p_cap);
                    }
                    let dt = (courant * 0.5 * dx / theta).min(remaining);
                    u = lax_friedrichs_step_with_probe(&neg, &u, dt, theta, &xs)?;
                    remaining -= dt;
                }
                Ok(u)
            }
        }
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        Norm::Sup
    }
}

/// Plus-homogeneity scalar used in several tests; kept here so examples
/// and the harness agree on the value.
pub fn default_shift() -> MaxScalar {
    MaxScalar::num(2.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::space::{dist, Grid};

    fn grid(n: usize) -> Grid {
        Grid::new(-4.0, 4.0, n, false).unwrap()
    }

    /// Brute-force sup over a y-grid 8x denser than the solution grid,
    /// independent of the kernel-table path in `hopf_lax_evolve`.
    fn dense_sup_oracle(
        l: &Lagrangian,
        h: impl Fn(f64) -> f64,
        g: &Grid,
        t: f64,
        x: f64,
    ) -> f64 {
        let fine = 8 * g.len();
        let dy = (g.xmax() - g.xmin()) / fine as f64;
        let mut best = f64::NEG_INFINITY;
        for j in 0..fine {
            let y = g.xmin() + (j as f64 + 0.5) * dy;
            let lv = l.eval((x - y) / t);
            if lv.is_finite() {
                best = best.max(h(y) - t * lv);
            }
        }
        best
    }

    #[test]
    fn legendre_quadratic_is_self_conjugate() {
        let l = legendre_transform(|p| 0.5 * p * p, -20.0, 20.0, 4001, 1e9).unwrap();
        for q in [-3.0, -1.0, 0.0, 0.5, 2.5] {
            let expect = 0.5 * q * q;
            assert!(
                (l.eval(q) - expect).abs() < 1e-3,
                "L({q}) = {} vs {expect}",
                l.eval(q)
            );
        }
    }

    #[test]
    fn legendre_abs_is_indicator() {
        let l = legendre_transform(|p| p.abs(), -1e4, 1e4, 20001, 1e2).unwrap();
        assert!(l.eval(0.0).abs() < 1e-9);
        assert!(l.eval(0.9).abs() < 1e-9 + 0.9 * 2e-4 * 1e4, "inside the unit ball");
        assert!(l.eval(1.5).is_infinite());
        assert!(l.eval(-2.0).is_infinite());
    }

    #[test]
    fn legendre_of_constant_is_origin_indicator() {
        let l = legendre_transform(|_| 0.0, -100.0, 100.0, 2001, 1e3).unwrap();
        assert_eq!(l.eval(0.0), 0.0);
        assert!(l.eval(20.0).is_infinite());
    }

    #[test]
    fn legendre_rejects_nonconvex() {
        let r = legendre_transform(|p| -(p * p), -2.0, 2.0, 101, 1e9);
        assert!(matches!(r, Err(Error::NonConvex(_))));
    }

    #[test]
    fn hopf_lax_zero_time_identity() {
        let g = grid(64);
        let h = GridFunction::from_fn(&g, |x| -0.5 * x * x).unwrap();
        let out = hopf_lax_evolve(&Lagrangian::quadratic(), &h, 0.0).unwrap();
        assert_eq!(out, h);
    }

    #[test]
    fn hopf_lax_quadratic_matches_analytic() {
        // h(x) = −x²/2 evolves to −x²/(2(1+t)).
        let g = grid(1024);
        let h = GridFunction::from_fn(&g, |x| -0.5 * x * x).unwrap();
        let t = 1.0;
        let u = hopf_lax_evolve(&Lagrangian::quadratic(), &h, t).unwrap();
        let mut sup = 0.0f64;
        for (i, v) in u.finite_values().unwrap().iter().enumerate() {
            let x = g.center(i);
            sup = sup.max((v - (-x * x / (2.0 * (1.0 + t)))).abs());
        }
        assert!(sup <= 5.0 * g.dx(), "sup error {sup}");
        // Spot value from the closed form: u(1, 2) = −1.
        let i = (0..g.len()).min_by_key(|&i| ((g.center(i) - 2.0).abs() * 1e9) as u64).unwrap();
        assert!((u.get(i).value().unwrap() + 1.0).abs() < 1e-2);
    }

    #[test]
    fn hopf_lax_agrees_with_dense_sup_oracle() {
        let g = grid(256);
        let hf = |x: f64| (-(x - 0.5) * (x - 0.5)).exp();
        let h = GridFunction::from_fn(&g, hf).unwrap();
        let t = 0.7;
        let u = hopf_lax_evolve(&Lagrangian::quadratic(), &h, t).unwrap();
        for i in [10usize, 64, 128, 200] {
            let oracle = dense_sup_oracle(&Lagrangian::quadratic(), hf, &g, t, g.center(i));
            assert!(
                (u.get(i).value().unwrap() - oracle).abs() < 5.0 * g.dx(),
                "cell {i}"
            );
        }
    }

    #[test]
    fn hopf_lax_constants_are_stationary() {
        let g = grid(64);
        let c = GridFunction::constant(&g, 3.25).unwrap();
        for l in [Lagrangian::quadratic(), Lagrangian::indicator(1.0)] {
            let u = hopf_lax_evolve(&l, &c, 0.8).unwrap();
            assert_eq!(u, c, "L(0) = 0 and L ≥ 0 keep constants fixed");
        }
    }

    #[test]
    fn hopf_lax_indicator_is_windowed_max() {
        let g = grid(256);
        let hf = |x: f64| (2.0 * x).sin() - 0.1 * x * x;
        let h = GridFunction::from_fn(&g, hf).unwrap();
        let t = 0.5;
        let u = hopf_lax_evolve(&Lagrangian::indicator(1.0), &h, t).unwrap();
        // Oracle: brute-force max over grid nodes within |y − x| ≤ t.
        for i in (0..g.len()).step_by(17) {
            let x = g.center(i);
            let mut best = f64::NEG_INFINITY;
            for j in 0..g.len() {
                if (g.center(j) - x).abs() <= t {
                    best = best.max(hf(g.center(j)));
                }
            }
            assert_eq!(u.get(i).value().unwrap(), best, "cell {i}");
        }
    }

    #[test]
    fn hopf_lax_all_bottom_stays_bottom() {
        let g = grid(32);
        let zero = GridFunction::all_bottom(&g);
        let u = hopf_lax_evolve(&Lagrangian::quadratic(), &zero, 1.0).unwrap();
        assert!(u.is_all_bottom());
    }

    #[test]
    fn hopf_lax_bottom_cells_drop_out() {
        let g = grid(64);
        let vals: Vec<MaxScalar> = (0..g.len())
            .map(|i| {
                if i % 2 == 0 {
                    MaxScalar::Bottom
                } else {
                    MaxScalar::num(1.0)
                }
            })
            .collect();
        let h = GridFunction::new(g.clone(), vals).unwrap();
        let u = hopf_lax_evolve(&Lagrangian::quadratic(), &h, 0.5).unwrap();
        assert!(u.is_finite(), "finite nodes reach every cell through the sup");
    }

    #[test]
    fn hopf_lax_is_exactly_max_additive() {
        let g = grid(256);
        let op = HjSemigroup::hopf_lax(Lagrangian::quadratic());
        for (f, h) in samples::mixed_pairs(&g, 12, 19) {
            let lhs = op.evolve(0.5, &f.pw_oplus(&h).unwrap()).unwrap();
            let rhs = op
                .evolve(0.5, &f)
                .unwrap()
                .pw_oplus(&op.evolve(0.5, &h).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "max of sups equals sup of maxes, bitwise");
        }
    }

    #[test]
    fn hopf_lax_plus_homogeneity_within_rounding() {
        let g = grid(256);
        let op = HjSemigroup::hopf_lax(Lagrangian::quadratic());
        let a = default_shift();
        for (f, _) in samples::mixed_pairs(&g, 8, 23) {
            let lhs = op.evolve(0.5, &f.pw_otimes(a)).unwrap();
            let rhs = op.evolve(0.5, &f).unwrap().pw_otimes(a);
            let d = dist(&lhs, &rhs, Norm::Sup).unwrap();
            assert!(d <= 1e-12, "defect {d}");
        }
    }

    #[test]
    fn hopf_lax_nonexpansive_in_sup() {
        let g = grid(256);
        let op = HjSemigroup::hopf_lax(Lagrangian::quadratic());
        let pairs = samples::mixed_pairs(&g, 32, 41);
        let est = crate::semigroup::lip_seminorm_estimate(&op, 0.5, &pairs, Norm::Sup).unwrap();
        assert!(est <= 1.0 + 1e-12, "estimate {est}");
    }

    #[test]
    fn lax_friedrichs_constant_fixed_point() {
        let g = grid(64);
        let u = GridFunction::constant(&g, 1.5).unwrap();
        let h = Hamiltonian::quadratic();
        let out = lax_friedrichs_step(&h, &u, 1e-3, 1.0).unwrap();
        assert_eq!(out, u, "H(x, 0) = 0 keeps constants fixed");
    }

    #[test]
    fn lax_friedrichs_validates_bounds() {
        let g = grid(64);
        let u = GridFunction::from_fn(&g, |x| x.sin()).unwrap();
        let h = Hamiltonian::quadratic();
        // Viscosity below the gradient bound.
        assert!(matches!(
            lax_friedrichs_step(&h, &u, 1e-3, 1e-6),
            Err(Error::MonotonicityBound(_))
        ));
        // Time step beyond dx/(2θ).
        assert!(matches!(
            lax_friedrichs_step(&h, &u, 1.0, 2.0),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn lax_friedrichs_plus_homogeneous_on_dyadic_data() {
        // Only differences of u enter the update, so with dyadic data
        // and a dyadic shift every operation is exact and the identity
        // holds bitwise.
        // Power-of-two grid, viscosity and step keep every operation on a
        // dyadic lattice, so no rounding occurs anywhere in the update.
        let g = Grid::new(-2.0, 2.0, 128, false).unwrap();
        let mut rng = samples::Rng::new(9);
        let u = samples::piecewise_constant(&g, &mut rng);
        let h = Hamiltonian::quadratic();
        let a = MaxScalar::num(0.5);
        let theta = 64.0;
        let dt = g.dx() / (4.0 * theta);
        let lhs = lax_friedrichs_step(&h, &u.pw_otimes(a), dt, theta).unwrap();
        let rhs = lax_friedrichs_step(&h, &u, dt, theta).unwrap().pw_otimes(a);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hj_semigroup_dispatch() {
        let quad = Hamiltonian::quadratic();
        let op = HjSemigroup::from_hamiltonian(&quad).unwrap();
        assert!(op.label().starts_with("hopf-lax"));
        let xdep = Hamiltonian::general("xdep", |x, p| (1.0 + 0.5 * x.sin()) * p * p * 0.5);
        let op = HjSemigroup::from_hamiltonian(&xdep).unwrap();
        assert!(op.label().starts_with("lax-friedrichs"));
    }

    #[test]
    fn cross_solver_consistency_under_refinement() {
        // Capped parabola keeps gradients bounded and the boundary
        // inactive up to t = 1; both solvers approximate the same
        // viscosity solution, so their sup distance is o(√Δx).
        let data = |x: f64| (-0.5 * x * x).max(-2.0);
        let t = 1.0;
        let mut errs = Vec::new();
        for n in [192usize, 384] {
            let g = Grid::new(-6.0, 6.0, n, false).unwrap();
            let h = GridFunction::from_fn(&g, data).unwrap();
            let hl = HjSemigroup::hopf_lax(Lagrangian::quadratic())
                .evolve(t, &h)
                .unwrap();
            let lf = HjSemigroup::lax_friedrichs(Hamiltonian::quadratic())
                .evolve(t, &h)
                .unwrap();
            let d = dist(&hl, &lf, Norm::Sup).unwrap();
            let c = d / g.dx().sqrt();
            assert!(c <= 1.0, "n={n}: distance {d}, C = {c}");
            errs.push(d);
        }
        assert!(errs[1] <= 0.8 * errs[0], "distance must shrink: {errs:?}");
    }

    #[test]
    fn harness_detects_monotonicity_loss_without_cfl() {
        // A deliberately under-damped stepper must show up as a
        // positive monotonicity defect in the harness.
        struct Unstable;
        impl crate::semigroup::Semigroup for Unstable {
            fn evolve(&self, t: f64, f: &GridFunction) -> crate::error::Result<GridFunction> {
                if t == 0.0 {
                    return Ok(f.clone());
                }
                let theta = 0.3;
                let dt = 0.5 * f.grid().dx();
                let steps = (t / dt).ceil() as usize;
                let mut u = f.clone();
                for _ in 0..steps {
                    u = lax_friedrichs_step_unchecked(&Hamiltonian::quadratic(), &u, dt, theta)?;
                }
                Ok(u)
            }
            fn label(&self) -> &str {
                "lax-friedrichs-unstable"
            }
            fn native_norm(&self) -> Norm {
                Norm::Sup
            }
        }
        let g = Grid::new(-6.0, 6.0, 256, false).unwrap();
        let f = GridFunction::from_fn(&g, |x| (-0.5 * x * x).max(-2.0)).unwrap();
        let spiked: Vec<f64> = f
            .finite_values()
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 16 == 0 { v + 0.1 } else { *v })
            .collect();
        let gsp = GridFunction::from_f64_values(&g, &spiked).unwrap();
        let budget = crate::harness::Budget::new(5.0, g.dx());
        let rep = crate::harness::defect_monotonicity(
            &Unstable,
            4.0 * 0.5 * g.dx(),
            &[(f, gsp)],
            budget,
        )
        .unwrap();
        assert!(rep.defect > 0.0, "harness must detect the violation");
    }

    #[test]
    fn hamiltonian_table_interpolates() {
        let table: Vec<(f64, f64)> = (-10..=10).map(|k| {
            let p = k as f64 * 0.2;
            (p, 0.5 * p * p)
        }).collect();
        let h = Hamiltonian::from_table("custom", table).unwrap();
        assert!((h.eval(0.0, 0.5) - 0.125).abs() < 0.01);
        assert!((h.eval(3.0, -1.0) - 0.5).abs() < 0.02);
    }
}
