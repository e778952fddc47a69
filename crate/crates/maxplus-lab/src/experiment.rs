//! Batch experiment runner behind the command-line interface:
//! flat-text configs, named operator/initial-data presets, property
//! suites, refinement studies, and deterministic CSV artifacts.
//!
//! Identical config and seed produce byte-identical outputs; every
//! artifact header embeds the crate version and a hash of the effective
//! configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::conservation::{mass_integral, ConservationLawSemigroup, Flux, Trajectory};
use crate::control::{ControlProblem, HjbSemigroup};
use crate::error::{Error, Result};
use crate::generator::{
    dissipativity_probe, generator_estimate, generator_max_additivity_counterexample,
    DiscreteGenerator,
};
use crate::hamilton_jacobi::{Hamiltonian, HjSemigroup};
use crate::harness::{
    check_contraction, check_isometry_l1, defect_max_additivity, defect_monotonicity,
    defect_plus_homogeneity, defect_semigroup_law, Budget, Property, PropertyReport, Verdict,
};
use crate::quotient::{quotient_equivalent, Equivalence, FiniteMaxVector, FiniteSubspace};
use crate::samples;
use crate::scalar::MaxScalar;
use crate::semigroup::{Direction, IdentitySemigroup, Semigroup, TranslationSemigroup};
use crate::space::{Grid, GridFunction};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

fn cfg_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

/// FNV-1a, for embedding a config fingerprint in output headers.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Exact,
    SchemeError,
    Violated,
    Any,
}

impl Expectation {
    fn parse(s: &str, path: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Expectation::Exact),
            "scheme-error" => Ok(Expectation::SchemeError),
            "violated" => Ok(Expectation::Violated),
            "any" => Ok(Expectation::Any),
            other => Err(cfg_err(path, format!("unknown expectation `{other}`"))),
        }
    }

    /// Whether a measured verdict meets this expectation.
    pub fn admits(self, v: Verdict) -> bool {
        match self {
            Expectation::Exact => v == Verdict::Exact,
            Expectation::SchemeError => v != Verdict::Violated,
            Expectation::Violated => v == Verdict::Violated,
            Expectation::Any => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub properties: Vec<Property>,
    pub times: Vec<f64>,
    pub pairs: usize,
    pub budget_c: f64,
    pub omega: f64,
    pub shift: f64,
    pub default_expect: Expectation,
    pub expect: BTreeMap<String, Expectation>,
}

impl CheckSpec {
    pub fn expectation_for(&self, p: Property) -> Expectation {
        self.expect
            .get(p.as_str())
            .copied()
            .unwrap_or(self.default_expect)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub levels: usize,
    pub hash: u64,
    grid: BTreeMap<String, String>,
    operator: BTreeMap<String, String>,
    initial: BTreeMap<String, String>,
    pub check: Option<CheckSpec>,
    evolve: BTreeMap<String, String>,
    generator: BTreeMap<String, String>,
    resolvent: BTreeMap<String, String>,
    base_dir: PathBuf,
}

const SECTIONS: &[&str] = [
    "experiment",
    "grid",
    "operator",
    "initial",
    "check",
    "evolve",
    "generator",
    "resolvent",
]
.as_slice();

fn parse_sections(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(cfg_err(&name, "unknown section"));
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let section = current
            .clone()
            .ok_or_else(|| Error::Parse { line: idx + 1, msg: "key outside any section".into() })?;
        sections
            .get_mut(&section)
            .unwrap()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

fn take_f64(map: &BTreeMap<String, String>, section: &str, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| cfg_err(&format!("{section}.{key}"), format!("bad number `{v}`"))),
    }
}

fn take_usize(
    map: &BTreeMap<String, String>,
    section: &str,
    key: &str,
    default: usize,
) -> Result<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| cfg_err(&format!("{section}.{key}"), format!("bad integer `{v}`"))),
    }
}

fn known_keys(map: &BTreeMap<String, String>, section: &str, allowed: &[&str]) -> Result<()> {
    for key in map.keys() {
        let base = key.split('.').next().unwrap_or(key);
        if !allowed.contains(&key.as_str()) && !allowed.contains(&base) {
            return Err(cfg_err(
                &format!("{section}.{key}"),
                "unknown key".to_string(),
            ));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_file(
        path: impl AsRef<Path>,
        seed_override: Option<u64>,
        levels_override: Option<usize>,
    ) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_text(&text, base_dir, seed_override, levels_override)
    }

    pub fn from_text(
        text: &str,
        base_dir: PathBuf,
        seed_override: Option<u64>,
        levels_override: Option<usize>,
    ) -> Result<Self> {
        let sections = parse_sections(text)?;
        let experiment = sections.get("experiment").cloned().unwrap_or_default();
        known_keys(&experiment, "experiment", &["name", "seed", "levels"])?;
        let name = experiment
            .get("name")
            .cloned()
            .unwrap_or_else(|| "experiment".to_string());
        let seed = match seed_override {
            Some(s) => s,
            None => take_usize(&experiment, "experiment", "seed", 42)? as u64,
        };
        let levels = match levels_override {
            Some(l) => l,
            None => take_usize(&experiment, "experiment", "levels", 1)?,
        };
        if levels == 0 {
            return Err(cfg_err("experiment.levels", "need at least one level"));
        }

        let check = match sections.get("check") {
            None => None,
            Some(map) => Some(Self::parse_check(map)?),
        };

        // Hash of the effective configuration: raw text plus overrides.
        let mut canon = text.to_string();
        let _ = write!(canon, "\n@seed={seed}\n@levels={levels}\n");
        let hash = fnv1a(canon.as_bytes());

        let config = ExperimentConfig {
            name,
            seed,
            levels,
            hash,
            grid: sections.get("grid").cloned().unwrap_or_default(),
            operator: sections.get("operator").cloned().unwrap_or_default(),
            initial: sections.get("initial").cloned().unwrap_or_default(),
            check,
            evolve: sections.get("evolve").cloned().unwrap_or_default(),
            generator: sections.get("generator").cloned().unwrap_or_default(),
            resolvent: sections.get("resolvent").cloned().unwrap_or_default(),
            base_dir,
        };
        config.validate_sections()?;
        Ok(config)
    }

    fn parse_check(map: &BTreeMap<String, String>) -> Result<CheckSpec> {
        known_keys(
            map,
            "check",
            &["properties", "times", "pairs", "budget-c", "omega", "shift", "expect"],
        )?;
        let list = map
            .get("properties")
            .ok_or_else(|| cfg_err("check.properties", "required"))?;
        let properties = list
            .split(',')
            .map(|s| s.trim().parse::<Property>())
            .collect::<Result<Vec<_>>>()?;
        if properties.is_empty() {
            return Err(cfg_err("check.properties", "must not be empty"));
        }
        let times = map
            .get("times")
            .map(|s| {
                s.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| cfg_err("check.times", format!("bad time `{tok}`")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()?
            .unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
        if times.is_empty() {
            return Err(cfg_err("check.times", "must not be empty"));
        }
        let mut expect = BTreeMap::new();
        let mut default_expect = Expectation::SchemeError;
        for (key, value) in map {
            if key == "expect" {
                default_expect = Expectation::parse(value, "check.expect")?;
            } else if let Some(prop) = key.strip_prefix("expect.") {
                prop.parse::<Property>()
                    .map_err(|_| cfg_err(&format!("check.{key}"), "unknown property"))?;
                expect.insert(
                    prop.to_string(),
                    Expectation::parse(value, &format!("check.{key}"))?,
                );
            }
        }
        Ok(CheckSpec {
            properties,
            times,
            pairs: take_usize(map, "check", "pairs", 64)?,
            budget_c: take_f64(map, "check", "budget-c", 5.0)?,
            omega: take_f64(map, "check", "omega", 0.0)?,
            shift: take_f64(map, "check", "shift", 2.5)?,
            default_expect,
            expect,
        })
    }

    fn validate_sections(&self) -> Result<()> {
        known_keys(
            &self.grid,
            "grid",
            &["xmin", "xmax", "n", "periodic", "vmin", "vmax", "vn"],
        )?;
        known_keys(
            &self.operator,
            "operator",
            &[
                "kind",
                "hamiltonian",
                "table",
                "flux",
                "speed",
                "preset",
                "horizon",
                "dt",
                "controls",
                "alpha",
                "beta",
                "variant",
            ],
        )?;
        known_keys(&self.initial, "initial", &["preset", "file", "amplitude", "uL", "uR", "x0"])?;
        known_keys(&self.evolve, "evolve", &["t-final", "snapshots"])?;
        known_keys(&self.generator, "generator", &["t-min"])?;
        known_keys(&self.resolvent, "resolvent", &["alpha", "h", "pairs"])?;
        // Referenced files must resolve before any computation starts.
        for (section, map) in [("operator", &self.operator), ("initial", &self.initial)] {
            for key in ["table", "file"] {
                if let Some(rel) = map.get(key) {
                    let path = self.base_dir.join(rel);
                    if !path.exists() {
                        return Err(cfg_err(
                            &format!("{section}.{key}"),
                            format!("file `{}` not found", path.display()),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid_at_level(0)
    }

    /// Refinement level `k` doubles the cell count `k` times.
    pub fn grid_at_level(&self, level: usize) -> Result<Grid> {
        let xmin = take_f64(&self.grid, "grid", "xmin", -4.0)?;
        let xmax = take_f64(&self.grid, "grid", "xmax", 4.0)?;
        let n = take_usize(&self.grid, "grid", "n", 256)?;
        let periodic = match self.grid.get("periodic").map(String::as_str) {
            None => false,
            Some("true") => true,
            Some("false") => false,
            Some(other) => {
                return Err(cfg_err("grid.periodic", format!("bad boolean `{other}`")))
            }
        };
        Grid::new(xmin, xmax, n << level, periodic)
    }

    pub fn operator_kind(&self) -> Result<&str> {
        self.operator
            .get("kind")
            .map(String::as_str)
            .ok_or_else(|| cfg_err("operator.kind", "required"))
    }

    pub fn build_operator(&self, grid: &Grid) -> Result<Box<dyn Semigroup>> {
        match self.operator_kind()? {
            "identity" => Ok(Box::new(IdentitySemigroup)),
            "translation-left" => Ok(Box::new(TranslationSemigroup::new(Direction::Left))),
            "translation-right" => Ok(Box::new(TranslationSemigroup::new(Direction::Right))),
            "godunov" => {
                let flux = match self.operator.get("flux").map(String::as_str) {
                    None | Some("burgers") => Flux::burgers(),
                    Some("linear") => {
                        Flux::linear(take_f64(&self.operator, "operator", "speed", 1.0)?)
                    }
                    Some(other) => {
                        return Err(cfg_err("operator.flux", format!("unknown flux `{other}`")))
                    }
                };
                Ok(Box::new(ConservationLawSemigroup::new(flux)))
            }
            "hopf-lax" | "lax-friedrichs" => {
                let h = self.build_hamiltonian()?;
                let op = if self.operator_kind()? == "hopf-lax" {
                    HjSemigroup::from_hamiltonian(&h)?
                } else {
                    HjSemigroup::lax_friedrichs(h)
                };
                Ok(Box::new(op))
            }
            "hjb-dp" => {
                let problem = self.build_control_problem(grid)?;
                let dt = take_f64(&self.operator, "operator", "dt", 0.7 * grid.dx())?;
                Ok(Box::new(HjbSemigroup::new(problem, dt)?))
            }
            other => Err(cfg_err("operator.kind", format!("unknown operator `{other}`"))),
        }
    }

    fn build_hamiltonian(&self) -> Result<Hamiltonian> {
        match self.operator.get("hamiltonian").map(String::as_str) {
            None | Some("quadratic") => Ok(Hamiltonian::quadratic()),
            Some("abs") => Ok(Hamiltonian::abs()),
            Some("custom-table") => {
                let rel = self
                    .operator
                    .get("table")
                    .ok_or_else(|| cfg_err("operator.table", "required for custom-table"))?;
                let text = std::fs::read_to_string(self.base_dir.join(rel))?;
                let mut rows = Vec::new();
                for (idx, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let mut toks = line.split_whitespace();
                    let p: f64 = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Parse { line: idx + 1, msg: "bad p".into() })?;
                    let hv: f64 = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Parse { line: idx + 1, msg: "bad H(p)".into() })?;
                    rows.push((p, hv));
                }
                Hamiltonian::from_table("custom-table", rows)
            }
            Some(other) => Err(cfg_err(
                "operator.hamiltonian",
                format!("unknown hamiltonian `{other}`"),
            )),
        }
    }

    fn build_control_problem(&self, grid: &Grid) -> Result<ControlProblem> {
        let horizon = take_f64(&self.operator, "operator", "horizon", 2.0)?;
        let controls = take_usize(
            &self.operator,
            "operator",
            "controls",
            crate::control::DEFAULT_CONTROL_SAMPLES,
        )?;
        match self.operator.get("preset").map(String::as_str) {
            None | Some("integrator") => {
                let mut p = ControlProblem::new(
                    "integrator",
                    (grid.xmin(), grid.xmax()),
                    crate::control::control_grid(-1.0, 1.0, controls),
                    |_, u| u,
                    |_, _| 0.0,
                    horizon,
                )?;
                p = p.assert_x_independent()?;
                Ok(p)
            }
            Some("custom-table") => {
                let rel = self
                    .operator
                    .get("table")
                    .ok_or_else(|| cfg_err("operator.table", "required for custom-table"))?;
                let text = std::fs::read_to_string(self.base_dir.join(rel))?;
                build_table_problem(&text, grid, horizon)
            }
            Some("double-integrator") => Err(cfg_err(
                "operator.preset",
                "double-integrator has 2-D state: only the evolve command supports it \
                 (the property harness drives 1-D operators)",
            )),
            Some(other) => Err(cfg_err("operator.preset", format!("unknown preset `{other}`"))),
        }
    }

    pub fn build_initial(&self, grid: &Grid) -> Result<GridFunction> {
        match self.initial.get("preset").map(String::as_str) {
            None | Some("parabola") => GridFunction::from_fn(grid, |x| -0.5 * x * x),
            Some("bump") => {
                let a = take_f64(&self.initial, "initial", "amplitude", 1.0)?;
                GridFunction::from_fn(grid, move |x| a * (-x * x).exp())
            }
            Some("sine") => {
                let span = grid.xmax() - grid.xmin();
                GridFunction::from_fn(grid, move |x| {
                    (std::f64::consts::TAU * (x - grid.xmin()) / span).sin()
                })
            }
            Some("abs-slope") => GridFunction::from_fn(grid, |x| -x.abs()),
            Some("riemann") => {
                let left = take_f64(&self.initial, "initial", "uL", 1.0)?;
                let right = take_f64(&self.initial, "initial", "uR", 0.0)?;
                let x0 = take_f64(&self.initial, "initial", "x0", 0.0)?;
                GridFunction::from_fn(grid, move |x| if x < x0 { left } else { right })
            }
            Some("file") => {
                let rel = self
                    .initial
                    .get("file")
                    .ok_or_else(|| cfg_err("initial.file", "required for preset=file"))?;
                let f = crate::io::read_grid_function(self.base_dir.join(rel))?;
                if f.grid() != grid {
                    return Err(cfg_err(
                        "initial.file",
                        "grid in file does not match [grid] section",
                    ));
                }
                Ok(f)
            }
            Some(other) => Err(cfg_err("initial.preset", format!("unknown preset `{other}`"))),
        }
    }
}

/// Control problem from a sampled table: blocks of
/// `control <u>` followed by `n` dynamics values and `n` reward values
/// on the config grid.
fn build_table_problem(text: &str, grid: &Grid, horizon: f64) -> Result<ControlProblem> {
    #[derive(Clone)]
    struct Row {
        u: f64,
        f: Vec<f64>,
        l: Vec<f64>,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut numbers: Vec<f64> = Vec::new();
    let mut pending: Option<f64> = None;
    let n = grid.len();
    let flush = |pending: &mut Option<f64>, numbers: &mut Vec<f64>, rows: &mut Vec<Row>| -> Result<()> {
        if let Some(u) = pending.take() {
            if numbers.len() != 2 * n {
                return Err(Error::InvalidArgument(format!(
                    "control block u={u} needs {} values, found {}",
                    2 * n,
                    numbers.len()
                )));
            }
            rows.push(Row {
                u,
                f: numbers[..n].to_vec(),
                l: numbers[n..].to_vec(),
            });
            numbers.clear();
        }
        Ok(())
    };
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("control ") {
            flush(&mut pending, &mut numbers, &mut rows)?;
            pending = Some(rest.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad control value `{rest}`"))
            })?);
        } else {
            for tok in line.split_whitespace() {
                numbers.push(tok.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad table number `{tok}`"))
                })?);
            }
        }
    }
    flush(&mut pending, &mut numbers, &mut rows)?;
    if rows.is_empty() {
        return Err(Error::EmptyControlSet);
    }
    let controls: Vec<f64> = rows.iter().map(|r| r.u).collect();
    let g = grid.clone();
    let rows2 = rows.clone();
    let lookup = move |rows: &[Row], x: f64, u: f64, which: bool| -> f64 {
        let row = rows
            .iter()
            .min_by(|a, b| (a.u - u).abs().total_cmp(&(b.u - u).abs()))
            .expect("nonempty");
        let vals = if which { &row.f } else { &row.l };
        let pos = ((x - g.center(0)) / g.dx()).clamp(0.0, (g.len() - 1) as f64);
        let i = (pos.floor() as usize).min(g.len() - 2);
        let a = pos - i as f64;
        (1.0 - a) * vals[i] + a * vals[i + 1]
    };
    let lookup2 = lookup.clone();
    ControlProblem::new(
        "custom-table",
        (grid.xmin(), grid.xmax()),
        controls,
        move |x, u| lookup(&rows, x, u, true),
        move |x, u| lookup2(&rows2, x, u, false),
        horizon,
    )
}

fn artifact_header(config: &ExperimentConfig) -> String {
    format!(
        "# maxplus-lab {} config={:016x} seed={} name={}\n",
        ARTIFACT_VERSION, config.hash, config.seed, config.name
    )
}

/// Outcome of a `check` run: the reports plus the exit status derived
/// from the declared expectations.
#[derive(Debug)]
pub struct CheckOutcome {
    pub reports: Vec<PropertyReport>,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Runs the configured property suite on the configured operator.
pub fn run_check(config: &ExperimentConfig, out_dir: &Path) -> Result<CheckOutcome> {
    let spec = config
        .check
        .as_ref()
        .ok_or_else(|| cfg_err("check", "section required for the check command"))?;
    std::fs::create_dir_all(out_dir)?;

    let mut reports = Vec::new();
    for level in 0..config.levels {
        let grid = config.grid_at_level(level)?;
        let op = config.build_operator(&grid)?;
        let budget = Budget::new(spec.budget_c, grid.dx());
        let pairs = samples::mixed_pairs(&grid, spec.pairs, config.seed);
        let fs: Vec<GridFunction> = pairs.iter().map(|(f, _)| f.clone()).collect();
        let ordered = samples::ordered_pairs(&grid, spec.pairs, config.seed ^ 0x5eed);
        let shift = MaxScalar::finite(spec.shift)?;

        for &t in &spec.times {
            for &prop in &spec.properties {
                let report = match prop {
                    Property::MaxAdditivity => {
                        defect_max_additivity(op.as_ref(), t, &pairs, budget)?
                    }
                    Property::PlusHomogeneity => {
                        defect_plus_homogeneity(op.as_ref(), t, shift, &fs, budget)?
                    }
                    Property::Monotonicity => {
                        defect_monotonicity(op.as_ref(), t, &ordered, budget)?
                    }
                    Property::SemigroupLaw => {
                        defect_semigroup_law(op.as_ref(), t * 0.5, t * 0.5, &fs, budget)?
                    }
                    Property::StrongContinuity => {
                        // Sampled modulus on the first function; the
                        // defect is the smallest measured modulus, which
                        // must shrink with t.
                        let t_list = [t, t / 2.0, t / 4.0, t / 8.0];
                        let modulus = crate::harness::continuity_modulus(
                            op.as_ref(),
                            &fs[0],
                            &t_list,
                        )?;
                        let decreasing = modulus.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
                        let last = modulus.last().unwrap().1;
                        PropertyReport {
                            property: Property::StrongContinuity,
                            operator: op.label().to_string(),
                            t,
                            norm: op.native_norm(),
                            defect: last,
                            samples: t_list.len(),
                            verdict: if !decreasing {
                                Verdict::Violated
                            } else if last <= 1e-12 {
                                Verdict::Exact
                            } else {
                                Verdict::WithinSchemeError
                            },
                            details: modulus
                                .iter()
                                .map(|(t, m)| format!("t={t}:modulus={m}"))
                                .collect::<Vec<_>>()
                                .join(";"),
                        }
                    }
                    Property::Contraction => check_contraction(
                        op.as_ref(),
                        &spec.times,
                        &pairs,
                        spec.omega,
                        1e-10,
                        budget,
                    )?,
                    Property::IsometryL1 => {
                        check_isometry_l1(op.as_ref(), t, &ordered, budget)?
                    }
                };
                reports.push((level, grid.len(), report));
            }
        }
    }

    let mut csv = artifact_header(config);
    csv.push_str(PropertyReport::CSV_HEADER);
    csv.push_str(",level,n\n");
    for (level, n, rep) in &reports {
        let _ = writeln!(csv, "{},{level},{n}", rep.csv_row());
    }
    std::fs::write(out_dir.join("properties.csv"), &csv)?;

    let mut failures = Vec::new();
    for (level, n, rep) in &reports {
        let expect = spec.expectation_for(rep.property);
        if !expect.admits(rep.verdict) {
            failures.push(format!(
                "level {level} (n={n}): {} measured {} against expectation {:?}",
                rep.property.as_str(),
                rep.verdict.as_str(),
                expect
            ));
        }
    }

    let mut summary = artifact_header(config);
    let _ = writeln!(summary, "check `{}`: {} reports", config.name, reports.len());
    for (level, n, rep) in &reports {
        let _ = writeln!(
            summary,
            "  level {level} n={n} t={} {}: defect {:e} [{}]",
            rep.t,
            rep.property.as_str(),
            rep.defect,
            rep.verdict.as_str()
        );
    }
    if failures.is_empty() {
        let _ = writeln!(summary, "all expectations met");
    } else {
        for f in &failures {
            let _ = writeln!(summary, "FAILED: {f}");
        }
    }
    std::fs::write(out_dir.join("summary.txt"), summary)?;

    Ok(CheckOutcome {
        reports: reports.into_iter().map(|(_, _, r)| r).collect(),
        failures,
    })
}

/// Runs a single trajectory and dumps it in the trajectory format.
pub fn run_evolve(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    if config.operator_kind()? == "hjb-dp"
        && config.operator.get("preset").map(String::as_str) == Some("double-integrator")
    {
        return run_evolve_double_integrator(config, out_dir);
    }
    let grid = config.grid()?;
    let op = config.build_operator(&grid)?;
    let initial = config.build_initial(&grid)?;
    let t_final = take_f64(&config.evolve, "evolve", "t-final", 1.0)?;
    let snapshots = take_usize(&config.evolve, "evolve", "snapshots", 8)?.max(1);
    let dt = t_final / snapshots as f64;
    let mut states = vec![initial.clone()];
    for k in 1..=snapshots {
        states.push(op.evolve(dt * k as f64, &initial)?);
    }
    let traj = Trajectory { t0: 0.0, dt, states };
    let mut text = artifact_header(config);
    text.push_str(&crate::io::format_trajectory(&traj));
    let path = out_dir.join("trajectory.txt");
    std::fs::write(&path, text)?;

    // Mass log for conservation-law runs.
    if config.operator_kind()? == "godunov" {
        let mut csv = artifact_header(config);
        csv.push_str("t,mass\n");
        for (k, state) in traj.states.iter().enumerate() {
            let _ = writeln!(csv, "{:?},{:?}", traj.time(k), mass_integral(state)?);
        }
        std::fs::write(out_dir.join("mass.csv"), csv)?;
    }
    Ok(path)
}

/// 2-D evolve path for the double integrator: position axis from
/// [grid], velocity axis from the vmin/vmax/vn keys, snapshots in the
/// `grid2` format.
fn run_evolve_double_integrator(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    let gx = config.grid()?;
    let vmin = take_f64(&config.grid, "grid", "vmin", -1.5)?;
    let vmax = take_f64(&config.grid, "grid", "vmax", 1.5)?;
    let vn = take_usize(&config.grid, "grid", "vn", 31)?;
    let gv = Grid::new(vmin, vmax, vn, false)?;
    let g2 = crate::space::Grid2::new(gx.clone(), gv);
    let horizon = take_f64(&config.operator, "operator", "horizon", 2.0)?;
    let problem = crate::control::ControlProblem2::double_integrator(
        (gx.xmin(), gx.xmax()),
        (vmin, vmax),
        horizon,
    );
    let phi = match config.initial.get("preset").map(String::as_str) {
        None | Some("parabola") => {
            crate::space::GridFunction2::from_fn(&g2, |x, v| -(x * x) - v * v)?
        }
        Some("bump") => {
            let a = take_f64(&config.initial, "initial", "amplitude", 1.0)?;
            crate::space::GridFunction2::from_fn(&g2, move |x, v| a * (-(x * x) - v * v).exp())?
        }
        Some(other) => {
            return Err(cfg_err(
                "initial.preset",
                format!("preset `{other}` has no 2-D analogue"),
            ))
        }
    };
    let t_final = take_f64(&config.evolve, "evolve", "t-final", 1.0)?;
    let snapshots = take_usize(&config.evolve, "evolve", "snapshots", 4)?.max(1);
    let dt_step = take_f64(&config.operator, "operator", "dt", 0.02)?;
    let mut text = artifact_header(config);
    for k in 0..=snapshots {
        let t = t_final * k as f64 / snapshots as f64;
        let val = crate::control::evolve_hjb_2d(&problem, &phi, t, dt_step)?;
        let _ = writeln!(text, "t {t:?}");
        text.push_str(&crate::io::format_grid_function_2d(&val));
    }
    let path = out_dir.join("trajectory2.txt");
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Defect-versus-resolution study for the configured operator and
/// properties.
pub fn run_convergence(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    let spec = config
        .check
        .as_ref()
        .ok_or_else(|| cfg_err("check", "section required for the convergence command"))?;
    std::fs::create_dir_all(out_dir)?;
    // Restricted to the defect-valued properties; others in the list
    // are simply skipped here (the check command covers them).
    let tracked: Vec<Property> = spec
        .properties
        .iter()
        .copied()
        .filter(|p| {
            matches!(
                p,
                Property::MaxAdditivity | Property::PlusHomogeneity | Property::SemigroupLaw
            )
        })
        .collect();
    if tracked.is_empty() {
        return Err(cfg_err(
            "check.properties",
            "convergence studies need at least one defect property \
             (max-additivity, plus-homogeneity or semigroup-law)",
        ));
    }
    let mut csv = artifact_header(config);
    csv.push_str("property,operator,norm,t,n,defect\n");
    for level in 0..config.levels.max(2) {
        let grid = config.grid_at_level(level)?;
        let op = config.build_operator(&grid)?;
        let budget = Budget::new(spec.budget_c, grid.dx());
        let pairs = samples::mixed_pairs(&grid, spec.pairs, config.seed);
        let fs: Vec<GridFunction> = pairs.iter().map(|(f, _)| f.clone()).collect();
        let shift = MaxScalar::finite(spec.shift)?;
        for &t in &spec.times {
            for &prop in &tracked {
                let report = match prop {
                    Property::MaxAdditivity => {
                        defect_max_additivity(op.as_ref(), t, &pairs, budget)?
                    }
                    Property::PlusHomogeneity => {
                        defect_plus_homogeneity(op.as_ref(), t, shift, &fs, budget)?
                    }
                    Property::SemigroupLaw => {
                        defect_semigroup_law(op.as_ref(), t * 0.5, t * 0.5, &fs, budget)?
                    }
                    _ => unreachable!("filtered above"),
                };
                let _ = writeln!(
                    csv,
                    "{},{},{},{:?},{},{:?}",
                    report.property.as_str(),
                    report.operator,
                    report.norm.as_str(),
                    t,
                    grid.len(),
                    report.defect
                );
            }
        }
    }
    let path = out_dir.join("convergence.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// Generator estimation report in the generator CSV schema.
pub fn run_generator(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let grid = config.grid()?;
    let op = config.build_operator(&grid)?;
    let f = config.build_initial(&grid)?;
    let t_min = take_f64(&config.generator, "generator", "t-min", 1e-3)?;
    let t_seq = [4.0 * t_min, 2.0 * t_min, t_min];
    let est = generator_estimate(op.as_ref(), &f, &t_seq)?;

    // Self-consistency error: sup distance between the extrapolant and
    // the raw finest quotient on unmasked cells.
    let finest = op.evolve(t_min, &f)?;
    let fv = f.finite_values()?;
    let tv = finest.finite_values()?;
    let mut sup_error = 0.0f64;
    for (i, v) in est.af.values().iter().enumerate() {
        if let Some(a) = v.value() {
            let raw = (tv[i] - fv[i]) / t_min;
            sup_error = sup_error.max((a - raw).abs());
        }
    }

    let label = config.initial.get("preset").cloned().unwrap_or_else(|| "parabola".into());
    let mut csv = artifact_header(config);
    csv.push_str("operator,f_label,t_min,order,sup_error,domain_mask_fraction\n");
    let _ = writeln!(
        csv,
        "{},{label},{:?},{},{:?},{:?}",
        op.label(),
        est.t_used,
        est.richardson_order,
        sup_error,
        est.mask_fraction
    );
    let path = out_dir.join("generator.csv");
    std::fs::write(&path, csv)?;

    let mut gf = artifact_header(config);
    gf.push_str(&crate::io::format_grid_function(&est.af));
    std::fs::write(out_dir.join("generator_af.txt"), gf)?;
    Ok(path)
}

/// Resolvent dissipativity probe.
pub fn run_resolvent(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let grid = config.grid()?;
    let op = config.build_operator(&grid)?;
    let alpha = take_f64(&config.resolvent, "resolvent", "alpha", 0.1)?;
    let h = take_f64(&config.resolvent, "resolvent", "h", 0.25)?;
    let pairs_n = take_usize(&config.resolvent, "resolvent", "pairs", 16)?;
    let pairs = samples::mixed_pairs(&grid, pairs_n, config.seed);
    let gen = DiscreteGenerator::new(op.as_ref(), h)?;
    let rep = dissipativity_probe(&gen, alpha, &pairs, 1e-8, 50_000)?;
    let mut csv = artifact_header(config);
    csv.push_str("operator,alpha,h,lip_estimate,samples,verdict\n");
    let _ = writeln!(
        csv,
        "{},{:?},{:?},{:?},{},{}",
        rep.operator,
        rep.alpha,
        h,
        rep.lip_estimate,
        rep.samples,
        rep.verdict.as_str()
    );
    let path = out_dir.join("resolvent.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// The three documented quotient instances with their expected verdicts.
pub fn run_quotient_demo(out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let mut csv = String::from("# maxplus-lab quotient demo\ninstance,verdict,common_value\n");

    // Reflexivity.
    let theta = FiniteSubspace::new(vec![FiniteMaxVector::from_f64(&[0.0, 0.0])?])?;
    let f = FiniteMaxVector::from_f64(&[3.0, 1.0])?;
    let r1 = quotient_equivalent(&f, &f, &theta, 10_000)?;
    push_quotient_row(&mut csv, "reflexive", &f, &f, &r1)?;

    // Crossing pair joined by the Θ line.
    let f1 = FiniteMaxVector::from_f64(&[0.0, -1.0])?;
    let f2 = FiniteMaxVector::from_f64(&[-1.0, 0.0])?;
    let r2 = quotient_equivalent(&f1, &f2, &theta, 10_000)?;
    push_quotient_row(&mut csv, "theta-join", &f1, &f2, &r2)?;

    // Unreachable coordinate.
    let partial = FiniteSubspace::new(vec!["0 -inf".parse()?])?;
    let g1: FiniteMaxVector = "-inf 0".parse()?;
    let g2: FiniteMaxVector = "-inf 1".parse()?;
    let r3 = quotient_equivalent(&g1, &g2, &partial, 10_000)?;
    push_quotient_row(&mut csv, "unreachable-coordinate", &g1, &g2, &r3)?;

    let path = out_dir.join("quotient.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

fn push_quotient_row(
    csv: &mut String,
    name: &str,
    f1: &FiniteMaxVector,
    f2: &FiniteMaxVector,
    eq: &Equivalence,
) -> Result<()> {
    match eq {
        Equivalence::Equivalent { g1, g2, .. } => {
            let lhs = f1.oplus(g1)?;
            let rhs = f2.oplus(g2)?;
            if lhs != rhs {
                return Err(Error::InvalidArgument(
                    "unverified witness escaped the solver".into(),
                ));
            }
            let _ = writeln!(csv, "{name},EQUIVALENT,{lhs}");
        }
        other => {
            let _ = writeln!(csv, "{name},{},", other.as_str());
        }
    }
    Ok(())
}

/// Convenience wrapper used by the acceptance suite: build, run and
/// collect one counterexample row.
pub fn run_counterexample(out_dir: &Path, n: usize, t_min: f64) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let rep = generator_max_additivity_counterexample(n, t_min)?;
    let mut csv = String::from(
        "# maxplus-lab generator counterexample\nordered,witness_x,witness_gap,analytic_gap,max_gap_x,max_gap\n",
    );
    let _ = writeln!(
        csv,
        "{},{:?},{:?},{:?},{:?},{:?}",
        rep.ordered_everywhere,
        rep.witness_x,
        rep.witness_gap,
        rep.analytic_gap,
        rep.max_gap_x,
        rep.max_gap
    );
    let path = out_dir.join("counterexample.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}
