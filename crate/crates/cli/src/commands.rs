//! The five subcommands. Each resolves its parameters, computes, and hands
//! back the files to write; nothing here touches the filesystem.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::Context;
use colmix::collision::DISSIPATION_IDENTITY_TOL;
use colmix::io::{gap_plot_csv, gap_plot_svg, sweep_csv, DistributionJson, MatrixJson, Units};
use colmix::mixing::{convergence_sweep, log2_grid, FitModel, SweepOptions};
use colmix::verify::{random_distribution, verify_with_timings, Status, VerifyConfig};
use colmix::{
    classical_mixing_increase_formula, gibbs_state, insertion_factor, random_density, random_haar_unitary,
    random_hermitian, relative_entropy, run_collision_sequence, typicality_entropy_check, von_neumann_entropy,
    ClassicalDistribution, CollisionSpec, DensityOperator, HermitianOperator, InverseTemperature, MixingMethod,
    UnitaryOperator,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::ExperimentConfig;
use crate::Invalid;

pub const COMMANDS: [&str; 5] = ["gibbs", "collide", "mix-sweep", "appendix", "verify"];

/// What a command produced.
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    /// Human-readable summary for stdout.
    pub lines: Vec<String>,
    /// False when a checked invariant failed (exit code 1).
    pub ok: bool,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Outcome {
    fn new() -> Self {
        Self { files: Vec::new(), lines: Vec::new(), ok: true, timings_ms: BTreeMap::new() }
    }

    fn file(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.file(name, text);
        Ok(())
    }
}

/// A matrix given inline or by name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorParam {
    Named(String),
    Matrix(MatrixJson),
}

/// A state given by name, as a distribution, or as a matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateParam {
    Named(String),
    Distribution(DistributionJson),
    Matrix(MatrixJson),
}

fn qubit_hamiltonian() -> OperatorParam {
    OperatorParam::Matrix(MatrixJson { dim: 2, re: vec![vec![0.0, 0.0], vec![0.0, 1.0]], im: None })
}

fn dist_param(p: &[f64]) -> StateParam {
    StateParam::Distribution(DistributionJson { p: p.to_vec() })
}

/// Dimension implied by explicit `dim` or the first inline matrix; 2 otherwise.
fn infer_dim(dim: Option<usize>, candidates: &[Option<usize>]) -> usize {
    dim.or_else(|| candidates.iter().flatten().next().copied()).unwrap_or(2)
}

impl OperatorParam {
    fn dim(&self) -> Option<usize> {
        match self {
            OperatorParam::Matrix(m) => Some(m.dim),
            OperatorParam::Named(_) => None,
        }
    }

    fn hamiltonian(&self, d: usize, seed: u64) -> anyhow::Result<HermitianOperator<f64>> {
        match self {
            OperatorParam::Matrix(m) => Ok(m.to_hermitian()?),
            OperatorParam::Named(n) => match n.as_str() {
                "random" => Ok(random_hermitian(seed, d)?),
                "zero" => Ok(HermitianOperator::zeros(d)?),
                other => Err(Invalid::new(format!("unknown hamiltonian {other:?} (random, zero or a matrix)")).into()),
            },
        }
    }

    fn unitary(&self, d: usize, seed: u64) -> anyhow::Result<UnitaryOperator<f64>> {
        match self {
            OperatorParam::Matrix(m) => Ok(m.to_unitary()?),
            OperatorParam::Named(n) => match n.as_str() {
                "random" => Ok(random_haar_unitary(seed, d)?),
                "identity" => Ok(UnitaryOperator::identity(d)?),
                // Reverses the level order; the swap for a qubit.
                "exchange" => Ok(UnitaryOperator::permutation(&(0..d).rev().collect::<Vec<_>>())?),
                other => {
                    Err(Invalid::new(format!("unknown unitary {other:?} (random, identity, exchange or a matrix)"))
                        .into())
                }
            },
        }
    }
}

impl StateParam {
    fn dim(&self) -> Option<usize> {
        match self {
            StateParam::Named(_) => None,
            StateParam::Distribution(p) => Some(p.p.len()),
            StateParam::Matrix(m) => Some(m.dim),
        }
    }

    fn state(&self, d: usize, seed: u64) -> anyhow::Result<DensityOperator<f64>> {
        match self {
            StateParam::Distribution(p) => Ok(DensityOperator::diagonal(&p.to_distribution()?)),
            StateParam::Matrix(m) => Ok(m.to_density()?),
            StateParam::Named(n) => match n.as_str() {
                "random" => Ok(random_density(seed, d)?),
                "maximally-mixed" => Ok(DensityOperator::maximally_mixed(d)?),
                other => Err(Invalid::new(format!(
                    "unknown state {other:?} (random, maximally-mixed, a distribution or a matrix)"
                ))
                .into()),
            },
        }
    }
}

/// Deserializes the command's parameters (defaults filled in) and writes the
/// resolved set back into the config so the manifest records it.
fn params<P: DeserializeOwned + Serialize>(config: &mut ExperimentConfig) -> anyhow::Result<P> {
    let raw = Value::Object(std::mem::take(&mut config.command.params));
    let p: P = serde_json::from_value(raw)
        .map_err(|e| Invalid::new(format!("parameters for {}: {e}", config.command.name)))?;
    let Value::Object(resolved) = serde_json::to_value(&p)? else { unreachable!("params are structs") };
    config.command.params = resolved;
    Ok(p)
}

pub fn run(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    match config.command.name.as_str() {
        "gibbs" => gibbs(config),
        "collide" => collide(config),
        "mix-sweep" => mix_sweep(config),
        "appendix" => appendix(config),
        "verify" => verify(config),
        other => Err(Invalid::new(format!("unknown command {other:?}; expected one of {COMMANDS:?}")).into()),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GibbsParams {
    pub hamiltonian: OperatorParam,
    pub beta: f64,
    pub dim: Option<usize>,
}

impl Default for GibbsParams {
    fn default() -> Self {
        Self { hamiltonian: qubit_hamiltonian(), beta: 1.0, dim: None }
    }
}

#[derive(Serialize)]
struct GibbsOutput {
    beta: f64,
    units: Units,
    entropy: f64,
    eigenvalues: Vec<f64>,
    state: MatrixJson,
}

fn gibbs(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    let p: GibbsParams = params(config)?;
    let start = Instant::now();
    let d = infer_dim(p.dim, &[p.hamiltonian.dim()]);
    let h = p.hamiltonian.hamiltonian(d, config.seed)?;
    let rho = gibbs_state(&h, InverseTemperature::new(p.beta)?)?;
    let entropy = von_neumann_entropy(&rho)? * config.units.scale();
    let mut out = Outcome::new();
    out.timings_ms.insert("compute".into(), elapsed_ms(start));
    out.json(
        "gibbs.json",
        &GibbsOutput {
            beta: p.beta,
            units: config.units,
            entropy,
            eigenvalues: rho.eigenvalues().iter().copied().collect(),
            state: MatrixJson::from_matrix(rho.matrix()),
        },
    )?;
    out.lines.push(format!("gibbs state d={} beta={}: S = {entropy:.6} {}", h.dim(), p.beta, config.units.suffix()));
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollideParams {
    pub hamiltonian: OperatorParam,
    pub unitary: OperatorParam,
    pub beta: f64,
    pub collisions: usize,
    pub reservoir: usize,
    pub dim: Option<usize>,
}

impl Default for CollideParams {
    fn default() -> Self {
        Self {
            hamiltonian: qubit_hamiltonian(),
            unitary: OperatorParam::Named("exchange".into()),
            beta: 1.0,
            collisions: 5,
            reservoir: 10,
            dim: None,
        }
    }
}

#[derive(Serialize)]
struct CollideSummary {
    units: Units,
    collisions: usize,
    reservoir: usize,
    delta_e: f64,
    beta_delta_e: f64,
    relative_entropy: f64,
    identity_residual: f64,
    /// Absent when beta <= 0, where the identity does not apply.
    identity_holds: Option<bool>,
    commutator_norm: f64,
    reservoir_entropy: f64,
}

fn collide(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    let p: CollideParams = params(config)?;
    let start = Instant::now();
    let d = infer_dim(p.dim, &[p.hamiltonian.dim(), p.unitary.dim()]);
    let h = p.hamiltonian.hamiltonian(d, config.seed)?;
    let u = p.unitary.unitary(d, config.seed.wrapping_add(1))?;
    let spec = CollisionSpec::new(h, InverseTemperature::new(p.beta)?, u, p.collisions, p.reservoir)?;
    let ledger = run_collision_sequence(&spec)?;
    let scale = config.units.scale();
    let first = ledger.rows.first().context("no collisions")?;
    let holds = ledger
        .beta_is_positive()
        .then(|| ledger.identity_residual <= DISSIPATION_IDENTITY_TOL * ledger.relative_entropy.abs() + 1e-13);
    let summary = CollideSummary {
        units: config.units,
        collisions: p.collisions,
        reservoir: p.reservoir,
        delta_e: first.delta_e,
        beta_delta_e: first.dirr_s * scale,
        relative_entropy: ledger.relative_entropy * scale,
        identity_residual: ledger.identity_residual * scale,
        identity_holds: holds,
        commutator_norm: ledger.commutator_norm,
        reservoir_entropy: ledger.initial_entropy * scale,
    };
    let mut out = Outcome::new();
    out.timings_ms.insert("compute".into(), elapsed_ms(start));
    out.file("ledger.csv", ledger.to_csv(scale));
    out.json("collide.json", &summary)?;
    out.lines.push(match holds {
        Some(h) => format!(
            "identity beta*dE = S[sigma|rho]: {:e} vs {:e} {}, residual {:e} ({})",
            summary.beta_delta_e,
            summary.relative_entropy,
            config.units.suffix(),
            summary.identity_residual,
            if h { "holds" } else { "VIOLATED" }
        ),
        None => format!("beta = {} <= 0: identity not applicable; dE = {:e}", p.beta, summary.delta_e),
    });
    out.ok = holds != Some(false);
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Log2,
    Linear,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixSweepParams {
    pub sigma: StateParam,
    pub rho: StateParam,
    pub method: MixingMethod,
    /// Explicit list of n; overrides `grid` and `n_max`.
    pub n: Option<Vec<usize>>,
    pub grid: Grid,
    pub n_max: usize,
    pub dim: Option<usize>,
    pub svg: bool,
}

impl Default for MixSweepParams {
    fn default() -> Self {
        Self {
            sigma: dist_param(&[0.3, 0.7]),
            rho: dist_param(&[0.7, 0.3]),
            method: MixingMethod::Auto,
            n: None,
            grid: Grid::Log2,
            n_max: 4096,
            dim: None,
            svg: true,
        }
    }
}

#[derive(Serialize)]
struct ExtrapolationOutput {
    model: FitModel,
    a: f64,
    limit: f64,
    residual: f64,
    relative_entropy: f64,
    units: Units,
}

fn mix_sweep(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    let p: MixSweepParams = params(config)?;
    let start = Instant::now();
    let d = infer_dim(p.dim, &[p.sigma.dim(), p.rho.dim()]);
    let sigma = p.sigma.state(d, config.seed)?;
    let rho = p.rho.state(d, config.seed.wrapping_add(1))?;
    let grid = match (&p.n, p.grid) {
        (Some(list), _) => list.clone(),
        (None, Grid::Log2) => log2_grid(p.n_max),
        (None, Grid::Linear) => (1..=p.n_max).collect(),
    };
    let sweep = convergence_sweep(&sigma, &rho, &grid, p.method, SweepOptions { dense_cap: config.dense_cap })?;
    let k = config.units.scale();
    let s_rel = relative_entropy(&sigma, &rho)?;
    let x = &sweep.extrapolation;
    let mut out = Outcome::new();
    out.timings_ms.insert("compute".into(), elapsed_ms(start));
    for pt in &sweep.points {
        out.timings_ms.insert(format!("n={}", pt.record.n), pt.wall_time_ms);
    }
    out.file("sweep.csv", sweep_csv(&sweep.points, config.units, true));
    out.json(
        "extrapolation.json",
        &ExtrapolationOutput {
            model: x.model,
            a: x.a * k,
            limit: x.limit * k,
            residual: x.residual * k,
            relative_entropy: s_rel * k,
            units: config.units,
        },
    )?;
    out.file("gap_plot.csv", gap_plot_csv(&sweep, config.units));
    if p.svg {
        out.file("gap_plot.svg", gap_plot_svg(&sweep));
    }
    let (first, last) = (sweep.points.first().unwrap().record, sweep.points.last().unwrap().record);
    out.lines.push(format!(
        "{} points, gap {:e} (n={}) -> {:e} (n={}) {u}; limit {:.6} ({}) vs S[sigma|rho] {:.6} {u}",
        sweep.points.len(),
        first.gap * k,
        first.n,
        last.gap * k,
        last.n,
        x.limit * k,
        x.model.as_str(),
        s_rel * k,
        u = config.units.suffix()
    ));
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixParams {
    pub rho: Vec<f64>,
    pub typicality_n: Vec<usize>,
    pub insertion_n: Vec<usize>,
    pub insertion_rho: Vec<f64>,
    pub formula_pairs: usize,
}

impl Default for AppendixParams {
    fn default() -> Self {
        Self {
            rho: vec![0.5, 0.5],
            typicality_n: vec![100, 1000, 10_000],
            insertion_n: vec![10, 100, 1000, 10_000],
            insertion_rho: vec![0.05, 0.1, 0.25, 0.5, 0.9],
            formula_pairs: 50,
        }
    }
}

#[derive(Serialize)]
struct TypicalityRow {
    n: usize,
    lhs_per_symbol: f64,
    #[serde(rename = "S_rho")]
    s_rho: f64,
    deficit: f64,
}

#[derive(Serialize)]
struct InsertionRow {
    n: usize,
    rho_a: f64,
    exact: f64,
    limit: f64,
    rel_err: f64,
    bound: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct AppendixReport {
    units: Units,
    typicality: Vec<TypicalityRow>,
    typicality_decreasing: bool,
    insertion: Vec<InsertionRow>,
    insertion_within_bounds: bool,
    formula_pairs: usize,
    formula_max_abs_diff: f64,
    formula_tolerance: f64,
    formula_agrees: bool,
    passed: bool,
}

const FORMULA_TOL: f64 = 1e-12;

fn appendix(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    let p: AppendixParams = params(config)?;
    let start = Instant::now();
    let k = config.units.scale();
    let rho = ClassicalDistribution::new(p.rho.clone())?;

    let mut ns = p.typicality_n.clone();
    ns.sort_unstable();
    let typicality = ns
        .iter()
        .map(|&n| {
            typicality_entropy_check(&rho, n).map(|c| TypicalityRow {
                n,
                lhs_per_symbol: c.lhs_per_symbol * k,
                s_rho: c.s_rho * k,
                deficit: c.deficit * k,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let typicality_decreasing = typicality.windows(2).all(|w| w[1].deficit < w[0].deficit);

    let mut insertion = Vec::new();
    for &n in &p.insertion_n {
        for &rho_a in &p.insertion_rho {
            let f = insertion_factor(n, rho_a)?;
            let bound = 2.0 / (n as f64 * rho_a);
            insertion.push(InsertionRow {
                n,
                rho_a,
                exact: f.exact,
                limit: f.limit,
                rel_err: f.rel_err,
                bound,
                within_bound: f.rel_err < bound,
            });
        }
    }
    let insertion_within_bounds = insertion.iter().all(|r| r.within_bound);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut max_diff = 0.0f64;
    for _ in 0..p.formula_pairs {
        let d = 2 + (rand::Rng::random::<u32>(&mut rng) % 5) as usize;
        let sigma = random_distribution(&mut rng, d, 0.0);
        let r = random_distribution(&mut rng, d, 0.05);
        let formula = classical_mixing_increase_formula(&sigma, &r)?;
        let direct = relative_entropy(&DensityOperator::diagonal(&sigma), &DensityOperator::diagonal(&r))?;
        max_diff = max_diff.max((formula - direct).abs());
    }
    let formula_agrees = max_diff <= FORMULA_TOL;
    let passed = typicality_decreasing && insertion_within_bounds && formula_agrees;

    let mut out = Outcome::new();
    out.timings_ms.insert("compute".into(), elapsed_ms(start));
    out.lines.push(format!(
        "typicality deficit {} ({}); insertion factor {}; formula vs relative entropy max diff {:e} ({})",
        if typicality_decreasing { "decreasing" } else { "NOT decreasing" },
        typicality.last().map_or("no rows".into(), |r| format!(
            "{:e} {} at n={}",
            r.deficit,
            config.units.suffix(),
            r.n
        )),
        if insertion_within_bounds { "within 2/(n rho_a)" } else { "OUT OF BOUNDS" },
        max_diff * k,
        if formula_agrees { "ok" } else { "FAILED" },
    ));
    out.json(
        "appendix.json",
        &AppendixReport {
            units: config.units,
            typicality,
            typicality_decreasing,
            insertion,
            insertion_within_bounds,
            formula_pairs: p.formula_pairs,
            formula_max_abs_diff: max_diff * k,
            formula_tolerance: FORMULA_TOL * k,
            formula_agrees,
            passed,
        },
    )?;
    out.ok = passed;
    Ok(out)
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub tolerance_override: Option<f64>,
}

fn verify(config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    let p: VerifyParams = params(config)?;
    let vc = VerifyConfig { seed: config.seed, dense_cap: config.dense_cap, tolerance_override: p.tolerance_override };
    let (report, timings) = verify_with_timings(&vc);
    let mut out = Outcome::new();
    for (id, t) in timings {
        out.timings_ms.insert(format!("criterion_{id}"), t.as_secs_f64() * 1e3);
    }
    for c in &report.criteria {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let mut line = format!("[{tag}] {}. {}", c.id, c.name);
        if let Some(r) = &c.reason {
            line.push_str(&format!(" ({r})"));
        }
        for r in c.residuals.iter().filter(|r| !r.pass) {
            line.push_str(&format!("; {} = {:e}, limit {:e}", r.name, r.value, r.limit));
        }
        out.lines.push(line);
    }
    out.file("verify.json", report.to_json());
    out.ok = report.passed;
    Ok(out)
}

/// Parameter names accepted by each command, for `--help`.
pub fn describe_params() -> String {
    let mut s = String::new();
    let entries: [(&str, Value); 5] = [
        ("gibbs", serde_json::to_value(GibbsParams::default()).unwrap()),
        ("collide", serde_json::to_value(CollideParams::default()).unwrap()),
        ("mix-sweep", serde_json::to_value(MixSweepParams::default()).unwrap()),
        ("appendix", serde_json::to_value(AppendixParams::default()).unwrap()),
        ("verify", serde_json::to_value(VerifyParams::default()).unwrap()),
    ];
    for (name, v) in entries {
        let obj: Map<String, Value> = v.as_object().cloned().unwrap_or_default();
        let keys: Vec<String> = obj.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!("  {name}: {}\n", keys.join(" ")));
    }
    s
}
