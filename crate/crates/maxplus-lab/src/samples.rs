//! Deterministic seeded sample families used by the property harness.
//!
//! Reports must be reproducible byte-for-byte, so sampling is driven by
//! a self-contained splitmix64 generator instead of an external RNG.
//!
//! Two flavours of randomness are provided:
//!
//! * *dyadic* samples take values on the lattice `2⁻²⁰·ℤ` restricted to
//!   a moderate range, so every `⊗`-sum and pointwise difference that
//!   the algebra tests form is exact in `f64`;
//! * *smooth* samples (bumps, sines, piecewise-linear ramps) feed the
//!   PDE solvers, where exactness is neither possible nor claimed.

use crate::space::{Grid, GridFunction};

/// Splitmix64: tiny, fast, reproducible.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn usize_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform on the dyadic lattice `2⁻²⁰·ℤ ∩ [lo, hi]` (lo, hi dyadic).
    pub fn dyadic(&mut self, lo: f64, hi: f64) -> f64 {
        const SCALE: f64 = (1u64 << 20) as f64;
        let k_lo = (lo * SCALE) as i64;
        let k_hi = (hi * SCALE) as i64;
        let span = (k_hi - k_lo) as u64 + 1;
        let k = k_lo + (self.next_u64() % span) as i64;
        k as f64 / SCALE
    }
}

/// Random function with dyadic values; sums and differences of any two
/// of these are exact doubles.
pub fn dyadic_function(grid: &Grid, rng: &mut Rng) -> GridFunction {
    let vals: Vec<f64> = (0..grid.len()).map(|_| rng.dyadic(-2.0, 2.0)).collect();
    GridFunction::from_f64_values(grid, &vals).expect("dyadic values are finite")
}

/// Smooth bump `a·exp(−(x−c)²/w²) + b`.
pub fn smooth_bump(grid: &Grid, rng: &mut Rng) -> GridFunction {
    let span = grid.xmax() - grid.xmin();
    let c = rng.range(grid.xmin() + 0.2 * span, grid.xmax() - 0.2 * span);
    let w = rng.range(0.05 * span, 0.25 * span);
    let a = rng.range(-1.5, 1.5);
    let b = rng.range(-0.5, 0.5);
    GridFunction::from_fn(grid, |x| a * (-((x - c) / w).powi(2)).exp() + b)
        .expect("bump values are finite")
}

/// Piecewise constant with 2..6 plateaus.
pub fn piecewise_constant(grid: &Grid, rng: &mut Rng) -> GridFunction {
    let pieces = 2 + rng.usize_below(5);
    let mut breaks: Vec<usize> = (0..pieces - 1).map(|_| rng.usize_below(grid.len())).collect();
    breaks.sort_unstable();
    let levels: Vec<f64> = (0..pieces).map(|_| rng.dyadic(-1.0, 2.0)).collect();
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            let piece = breaks.iter().take_while(|&&b| b <= i).count();
            levels[piece]
        })
        .collect();
    GridFunction::from_f64_values(grid, &vals).expect("levels are finite")
}

/// Random piecewise-linear function through 3..8 knots.
pub fn piecewise_linear(grid: &Grid, rng: &mut Rng) -> GridFunction {
    let knots = 3 + rng.usize_below(6);
    let mut xs: Vec<f64> = (0..knots).map(|_| rng.range(grid.xmin(), grid.xmax())).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[0] = grid.xmin();
    xs[knots - 1] = grid.xmax();
    let ys: Vec<f64> = (0..knots).map(|_| rng.range(-1.5, 1.5)).collect();
    GridFunction::from_fn(grid, |x| {
        let j = xs.partition_point(|&k| k <= x).clamp(1, knots - 1);
        let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        ys[j - 1] + t.clamp(0.0, 1.0) * (ys[j] - ys[j - 1])
    })
    .expect("piecewise-linear values are finite")
}

/// Mixed family used by the generic property suites.
pub fn mixed(grid: &Grid, rng: &mut Rng) -> GridFunction {
    match rng.usize_below(3) {
        0 => smooth_bump(grid, rng),
        1 => piecewise_constant(grid, rng),
        _ => piecewise_linear(grid, rng),
    }
}

/// `count` distinct sample pairs from the mixed family.
pub fn mixed_pairs(grid: &Grid, count: usize, seed: u64) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| {
            let f = mixed(grid, &mut rng);
            let mut g = mixed(grid, &mut rng);
            // Degenerate pairs break the Lipschitz-quotient estimators.
            if f == g {
                g = g.pw_otimes(crate::scalar::MaxScalar::num(0.5));
            }
            (f, g)
        })
        .collect()
}

/// `count` pairs of dyadic-valued functions (exact `⊗`-arithmetic).
pub fn dyadic_pairs(grid: &Grid, count: usize, seed: u64) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| {
            let f = dyadic_function(grid, &mut rng);
            let mut g = dyadic_function(grid, &mut rng);
            if f == g {
                g = g.pw_otimes(crate::scalar::MaxScalar::num(0.5));
            }
            (f, g)
        })
        .collect()
}

/// Ordered pairs `f ⪯ g`, built as `g = f ⊕ h` for a second sample `h`.
pub fn ordered_pairs(grid: &Grid, count: usize, seed: u64) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| {
            let f = mixed(grid, &mut rng);
            let h = mixed(grid, &mut rng);
            let g = f.pw_oplus(&h).expect("same grid");
            (f, g)
        })
        .collect()
}

/// Smooth ordered pairs suitable for the conservation-law solver.
pub fn smooth_ordered_pairs(
    grid: &Grid,
    count: usize,
    seed: u64,
) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| {
            let f = smooth_bump(grid, &mut rng);
            let lift = rng.range(0.1, 0.8);
            let g = GridFunction::from_f64_values(
                grid,
                &f.finite_values()
                    .unwrap()
                    .iter()
                    .map(|v| v + lift)
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            (f, g)
        })
        .collect()
}

/// Pairs of Riemann steps that cross each other, for probing
/// max-additivity of shock-forming dynamics.
pub fn crossing_riemann_pairs(
    grid: &Grid,
    count: usize,
    seed: u64,
) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = Rng::new(seed);
    let span = grid.xmax() - grid.xmin();
    (0..count)
        .map(|_| {
            let x1 = rng.range(grid.xmin() + 0.25 * span, grid.xmin() + 0.45 * span);
            let x2 = rng.range(grid.xmin() + 0.55 * span, grid.xmin() + 0.75 * span);
            let hi = rng.range(0.8, 1.2);
            let lo = rng.range(-0.2, 0.1);
            // f steps down at x1, g steps up at x2: the graphs cross.
            let f = GridFunction::from_fn(grid, |x| if x < x1 { hi } else { lo }).unwrap();
            let g = GridFunction::from_fn(grid, |x| if x < x2 { lo } else { hi }).unwrap();
            (f, g)
        })
        .collect()
}
