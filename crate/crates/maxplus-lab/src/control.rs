//! Hamilton–Jacobi–Bellman value-function semigroup by discrete-time
//! dynamic programming.
//!
//! `S(t)φ` is the optimal reward-to-go of the finite-horizon problem
//! with terminal reward `φ`, running reward `ℓ` and dynamics `ẋ = f`,
//! computed by iterating one-step Bellman updates
//!
//! `v'(x) = max_u [ dt·ℓ(x,u) + v(x + dt·f(x,u)) ]`
//!
//! with linear interpolation for off-grid states and clamping to the
//! state box. The finite max over control samples commutes with
//! pointwise max and additive constants, which is what makes the
//! discrete operator (nearly) max-plus linear; linear interpolation is
//! monotone and constant-preserving, so monotonicity and
//! plus-homogeneity survive exactly, while max-additivity picks up an
//! `O(Δx)` defect on pairs that cross between grid nodes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamilton_jacobi::{hopf_lax_evolve, legendre_transform};
use crate::scalar::MaxScalar;
use crate::semigroup::Semigroup;
use crate::space::{dist, GridFunction, GridFunction2, Norm};

type XuFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Default number of control samples per control dimension.
pub const DEFAULT_CONTROL_SAMPLES: usize = 33;

/// Evenly spaced control samples covering `[lo, hi]`, endpoints included.
pub fn control_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

/// A deterministic finite-horizon optimal control problem with 1-D
/// state: box, sampled control set, dynamics, running reward, horizon.
#[derive(Clone)]
pub struct ControlProblem {
    state_box: (f64, f64),
    controls: Vec<f64>,
    dynamics: XuFn,
    running_reward: XuFn,
    horizon: f64,
    x_independent: bool,
    name: String,
}

impl std::fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlProblem")
            .field("name", &self.name)
            .field("state_box", &self.state_box)
            .field("controls", &self.controls.len())
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl ControlProblem {
    pub fn new(
        name: &str,
        state_box: (f64, f64),
        controls: Vec<f64>,
        dynamics: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        running_reward: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        horizon: f64,
    ) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::EmptyControlSet);
        }
        if !(state_box.0 < state_box.1) {
            return Err(Error::InvalidArgument("state box must be a proper interval".into()));
        }
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        let problem = ControlProblem {
            state_box,
            controls,
            dynamics: Arc::new(dynamics),
            running_reward: Arc::new(running_reward),
            horizon,
            x_independent: false,
            name: name.into(),
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Velocity-controlled integrator: `ẋ = u`, `ℓ ≡ 0`,
    /// `U = [−1, 1]` sampled at the default resolution.
    pub fn integrator(state_box: (f64, f64), horizon: f64) -> Self {
        let mut p = ControlProblem::new(
            "integrator",
            state_box,
            control_grid(-1.0, 1.0, DEFAULT_CONTROL_SAMPLES),
            |_, u| u,
            |_, _| 0.0,
            horizon,
        )
        .expect("integrator preset is well-formed");
        p.x_independent = true;
        p
    }

    /// Marks the problem as state-independent (`f` and `ℓ` ignore `x`),
    /// which unlocks the Hopf–Lax consistency check. Verified by
    /// sampling.
    pub fn assert_x_independent(mut self) -> Result<Self> {
        let (lo, hi) = self.state_box;
        for k in 0..17 {
            let x = lo + (hi - lo) * k as f64 / 16.0;
            for &u in &self.controls {
                if ((self.dynamics)(x, u) - (self.dynamics)(lo, u)).abs() > 1e-12
                    || ((self.running_reward)(x, u) - (self.running_reward)(lo, u)).abs() > 1e-12
                {
                    return Err(Error::InvalidArgument(
                        "problem is not state-independent".into(),
                    ));
                }
            }
        }
        self.x_independent = true;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        // Sampled sanity: dynamics Lipschitz estimate finite, reward
        // bounded on the box times the control sample.
        let (lo, hi) = self.state_box;
        let h = (hi - lo) / 64.0;
        for k in 0..=64 {
            let x = lo + h * k as f64;
            for &u in &self.controls {
                let fx = (self.dynamics)(x, u);
                let rw = (self.running_reward)(x, u);
                if !fx.is_finite() || !rw.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "dynamics/reward not finite at (x={x}, u={u})"
                    )));
                }
                if k < 64 {
                    let slope = ((self.dynamics)(x + h, u) - fx) / h;
                    if !slope.is_finite() {
                        return Err(Error::InvalidArgument(
                            "dynamics not Lipschitz on the state box".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn state_box(&self) -> (f64, f64) {
        self.state_box
    }

    pub fn controls(&self) -> &[f64] {
        &self.controls
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_x_independent(&self) -> bool {
        self.x_independent
    }

    pub fn dynamics(&self, x: f64, u: f64) -> f64 {
        (self.dynamics)(x, u)
    }

    pub fn running_reward(&self, x: f64, u: f64) -> f64 {
        (self.running_reward)(x, u)
    }
}

/// The Bellman Hamiltonian `H(x,p) = max_u (ℓ(x,u) + p·f(x,u))` over the
/// control sample.
pub fn hamiltonian_eval(problem: &ControlProblem, x: f64, p: f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &u in problem.controls() {
        best = best.max(problem.running_reward(x, u) + p * problem.dynamics(x, u));
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::EmptyControlSet);
    }
    Ok(best)
}

/// Linear interpolation of `v` at `x`, clamped to the cell-center range
/// (constant extrapolation outside). A query between a bottom cell and
/// a finite cell is bottom; a query exactly on a node returns the node
/// value bit-for-bit.
fn interp_clamped(v: &GridFunction, x: f64) -> MaxScalar {
    let grid = v.grid();
    let n = grid.len();
    let dx = grid.dx();
    let first = grid.center(0);
    let pos = (x - first) / dx;
    if pos <= 0.0 {
        return v.get(0);
    }
    if pos >= (n - 1) as f64 {
        return v.get(n - 1);
    }
    // Queries within 1e−9 cells of a node are snapped, so steps that
    // are meant to land on nodes survive floating-point drift.
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return v.get(nearest as usize);
    }
    let i = pos.floor() as usize;
    let alpha = pos - i as f64;
    match (v.get(i).value(), v.get(i + 1).value()) {
        (Some(a), Some(b)) => MaxScalar::num((1.0 - alpha) * a + alpha * b),
        _ => MaxScalar::Bottom,
    }
}

/// One explicit Bellman update with step `dt`.
pub fn dp_step(problem: &ControlProblem, v: &GridFunction, dt: f64) -> Result<GridFunction> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("need dt > 0, got {dt}")));
    }
    let grid = v.grid();
    let (lo, hi) = problem.state_box();
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.center(i);
        let mut best = MaxScalar::Bottom;
        for &u in problem.controls() {
            let target = (x + dt * problem.dynamics(x, u)).clamp(lo, hi);
            let cont = interp_clamped(v, target);
            let cand = match cont.value() {
                Some(c) => MaxScalar::num(dt * problem.running_reward(x, u) + c),
                None => MaxScalar::Bottom,
            };
            best = best.oplus(cand);
        }
        out.push(best);
    }
    GridFunction::new(grid.clone(), out)
}

/// The Lax–Oleinik (value-function) semigroup `S(t)φ = v(·, t)` realized
/// by iterating [`dp_step`] at uniform substeps of at most `dt_max`.
#[derive(Debug, Clone)]
pub struct HjbSemigroup {
    problem: ControlProblem,
    dt_max: f64,
    label: String,
}

impl HjbSemigroup {
    pub fn new(problem: ControlProblem, dt_max: f64) -> Result<Self> {
        if !(dt_max > 0.0) {
            return Err(Error::InvalidArgument("dt_max must be positive".into()));
        }
        let label = format!("hjb-dp-{}", problem.name());
        Ok(HjbSemigroup { problem, dt_max, label })
    }

    pub fn problem(&self) -> &ControlProblem {
        &self.problem
    }
}

impl Semigroup for HjbSemigroup {
    fn evolve(&self, t: f64, phi: &GridFunction) -> Result<GridFunction> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::TimeOutOfRange { t, what: "[0, ∞)".into() });
        }
        if t > self.problem.horizon() {
            return Err(Error::TimeOutOfRange {
                t,
                what: format!("[0, horizon = {}]", self.problem.horizon()),
            });
        }
        if t == 0.0 {
            return Ok(phi.clone());
        }
        let steps = (t / self.dt_max).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut v = phi.clone();
        for _ in 0..steps {
            v = dp_step(&self.problem, &v, dt)?;
        }
        Ok(v)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn native_norm(&self) -> Norm {
        Norm::Sup
    }
}

/// Sup-distance between the DP evolution and the Hopf–Lax evolution
/// driven by the problem's Bellman Hamiltonian.
///
/// Requires a state-independent problem (refused otherwise); the
/// induced `H(p) = max_u (ℓ(u) + p·f(u))` is a finite max of affine
/// functions, hence convex, so the Hopf–Lax path applies.
pub fn hj_consistency_check(
    problem: &ControlProblem,
    dp: &HjbSemigroup,
    phi: &GridFunction,
    t: f64,
) -> Result<f64> {
    if !problem.is_x_independent() {
        return Err(Error::InvalidArgument(
            "consistency check needs a state-independent problem".into(),
        ));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let x0 = problem.state_box().0;
    let p_max = {
        // Conjugate support: |p| up to a generous multiple of the
        // largest velocity and reward scale.
        let vmax = problem
            .controls()
            .iter()
            .map(|&u| problem.dynamics(x0, u).abs())
            .fold(0.0f64, f64::max);
        20.0 * (1.0 + vmax)
    };
    let prob = problem.clone();
    let lagrangian = legendre_transform(
        move |p| {
            let mut best = f64::NEG_INFINITY;
            for &u in prob.controls() {
                best = best.max(prob.running_reward(x0, u) + p * prob.dynamics(x0, u));
            }
            best
        },
        -p_max,
        p_max,
        4001,
        1e9,
    )?;
    let hl = hopf_lax_evolve(&lagrangian, phi, t)?;
    let dp_out = dp.evolve(t, phi)?;
    dist(&hl, &dp_out, Norm::Sup)
}

type Xu2Fn = Arc<dyn Fn(f64, f64, f64) -> (f64, f64) + Send + Sync>;
type R2Fn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Two-dimensional state variant, enough for the double integrator.
#[derive(Clone)]
pub struct ControlProblem2 {
    state_box: ((f64, f64), (f64, f64)),
    controls: Vec<f64>,
    dynamics: Xu2Fn,
    running_reward: R2Fn,
    horizon: f64,
    name: String,
}

impl std::fmt::Debug for ControlProblem2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlProblem2").field("name", &self.name).finish()
    }
}

impl ControlProblem2 {
    pub fn new(
        name: &str,
        state_box: ((f64, f64), (f64, f64)),
        controls: Vec<f64>,
        dynamics: impl Fn(f64, f64, f64) -> (f64, f64) + Send + Sync + 'static,
        running_reward: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        horizon: f64,
    ) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::EmptyControlSet);
        }
        Ok(ControlProblem2 {
            state_box,
            controls,
            dynamics: Arc::new(dynamics),
            running_reward: Arc::new(running_reward),
            horizon,
            name: name.into(),
        })
    }

    /// Double integrator: state `(x, v)`, `ẋ = v`, `v̇ = u`, `ℓ ≡ 0`,
    /// `U = [−1, 1]`.
    pub fn double_integrator(
        position_box: (f64, f64),
        velocity_box: (f64, f64),
        horizon: f64,
    ) -> Self {
        ControlProblem2::new(
            "double-integrator",
            (position_box, velocity_box),
            control_grid(-1.0, 1.0, DEFAULT_CONTROL_SAMPLES),
            |_, v, u| (v, u),
            |_, _, _| 0.0,
            horizon,
        )
        .expect("double integrator preset is well-formed")
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

fn interp2_clamped(v: &GridFunction2, x: f64, y: f64) -> MaxScalar {
    let gx = v.grid().x();
    let gy = v.grid().y();
    let fx = ((x - gx.center(0)) / gx.dx()).clamp(0.0, (gx.len() - 1) as f64);
    let fy = ((y - gy.center(0)) / gy.dx()).clamp(0.0, (gy.len() - 1) as f64);
    let i = (fx.floor() as usize).min(gx.len() - 2);
    let j = (fy.floor() as usize).min(gy.len() - 2);
    let ax = fx - i as f64;
    let ay = fy - j as f64;
    let corners = [
        (v.get(i, j), (1.0 - ax) * (1.0 - ay)),
        (v.get(i + 1, j), ax * (1.0 - ay)),
        (v.get(i, j + 1), (1.0 - ax) * ay),
        (v.get(i + 1, j + 1), ax * ay),
    ];
    let mut acc = 0.0;
    for (val, w) in corners {
        if w == 0.0 {
            continue;
        }
        match val.value() {
            Some(c) => acc += w * c,
            None => return MaxScalar::Bottom,
        }
    }
    MaxScalar::num(acc)
}

/// One Bellman update on a 2-D state grid (bilinear interpolation,
/// clamped to the box).
pub fn dp_step_2d(problem: &ControlProblem2, v: &GridFunction2, dt: f64) -> Result<GridFunction2> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("need dt > 0, got {dt}")));
    }
    let grid = v.grid().clone();
    let ((x_lo, x_hi), (y_lo, y_hi)) = problem.state_box;
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.y().len() {
        for i in 0..grid.x().len() {
            let (x, y) = grid.center(i, j);
            let mut best = MaxScalar::Bottom;
            for &u in &problem.controls {
                let (dx, dy) = (problem.dynamics)(x, y, u);
                let tx = (x + dt * dx).clamp(x_lo, x_hi);
                let ty = (y + dt * dy).clamp(y_lo, y_hi);
                let cont = interp2_clamped(v, tx, ty);
                let cand = match cont.value() {
                    Some(c) => MaxScalar::num(dt * (problem.running_reward)(x, y, u) + c),
                    None => MaxScalar::Bottom,
                };
                best = best.oplus(cand);
            }
            out.push(best);
        }
    }
    GridFunction2::new(grid, out)
}

/// Value evolution on a 2-D state grid.
pub fn evolve_hjb_2d(
    problem: &ControlProblem2,
    phi: &GridFunction2,
    t: f64,
    dt_max: f64,
) -> Result<GridFunction2> {
    if !(t >= 0.0) || t > problem.horizon() {
        return Err(Error::TimeOutOfRange {
            t,
            what: format!("[0, horizon = {}]", problem.horizon()),
        });
    }
    if t == 0.0 {
        return Ok(phi.clone());
    }
    let steps = (t / dt_max).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut v = phi.clone();
    for _ in 0..steps {
        v = dp_step_2d(problem, &v, dt)?;
    }
    Ok(v)
}
