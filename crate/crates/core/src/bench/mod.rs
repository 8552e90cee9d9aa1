//! Multi-restart campaigns, metrics and sweeps.

mod cli;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::circuit::{build_dcqaoa, build_qaoa, select_cd_term, CdPool, CdTerm, CircuitIR, FieldForm, Flavor};
use crate::error::{Error, Result};
use crate::ising::{encode, Bitstring, IsingHamiltonian};
use crate::ligraph::{
    build_big, build_ldg, BigOptions, BindingInteractionGraph, InteractionParams, PotentialTable, Profile,
};
use crate::oracle::{self, CliqueSolution};
use crate::pharmio::{parse_pdb_atoms, parse_pharmacophore_spec, resolve_points, PharmacophorePoint};
use crate::qng::{optimize, MetricKind, OptimizerConfig, Termination};
use crate::sim::{run, run_noisy_trajectory, sample, NoiseModel, ShotCounts, Statevector};

pub use cli::{main_with_args, Cli, Command, Flags};
pub use report::{emit_report, load_report, recompute_p_true, verify_manifest, Manifest, ManifestEntry, PAYLOADS};

fn on_off<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Flag {
        Bool(bool),
        Word(String),
    }
    match Flag::deserialize(d)? {
        Flag::Bool(b) => Ok(b),
        Flag::Word(w) => parse_on_off(&w).map_err(serde::de::Error::custom),
    }
}

pub(crate) fn parse_on_off(w: &str) -> std::result::Result<bool, String> {
    match w.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(format!("expected on or off, got {w:?}")),
    }
}

/// Flat campaign configuration; field names double as `--config` JSON keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// BIG in JSON form; takes precedence over every other problem source.
    pub graph: Option<PathBuf>,
    pub ligand: Option<PathBuf>,
    pub ligand_pdb: Option<PathBuf>,
    pub protein: Option<PathBuf>,
    pub protein_pdb: Option<PathBuf>,
    pub synthetic_vertices: Option<usize>,
    /// With a gap the synthetic instance is near-degenerate, otherwise plain random.
    pub synthetic_gap: Option<f64>,
    pub synthetic_density: f64,
    pub synthetic_seed: Option<u64>,

    pub profile: Profile,
    pub tau: Option<f64>,
    pub eps: Option<f64>,
    pub eps_s: Option<f64>,
    pub allow_shared_points: bool,

    pub penalty: f64,
    #[serde(deserialize_with = "on_off")]
    pub normalize: bool,

    pub ansatz: Flavor,
    pub layers: usize,
    pub multi_angle: bool,
    /// Explicit CD pool; chosen from the field structure when absent.
    pub cd_pool: Option<Vec<CdTerm>>,

    pub eta: f64,
    pub reg_lambda: f64,
    pub metric: MetricKind,
    pub grad_tol: Option<f64>,
    /// Overrides both per-flavor budgets.
    pub max_iters: Option<usize>,
    pub iters_qaoa: usize,
    pub iters_dcqaoa: usize,

    pub restarts: usize,
    pub shots: u64,
    pub noise_p1: f64,
    pub noise_p2: f64,
    pub trajectories: usize,
    pub noise_skip_prep: bool,

    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: None,
            ligand: None,
            ligand_pdb: None,
            protein: None,
            protein_pdb: None,
            synthetic_vertices: None,
            synthetic_gap: None,
            synthetic_density: 0.8,
            synthetic_seed: None,
            profile: Profile::Skh8,
            tau: None,
            eps: None,
            eps_s: None,
            allow_shared_points: false,
            penalty: 8.0,
            normalize: true,
            ansatz: Flavor::DcQaoa,
            layers: 3,
            multi_angle: true,
            cd_pool: None,
            eta: 0.1,
            reg_lambda: 1e-4,
            metric: MetricKind::Full,
            grad_tol: None,
            max_iters: None,
            iters_qaoa: 1500,
            iters_dcqaoa: 500,
            restarts: 500,
            shots: 5000,
            noise_p1: 0.0,
            noise_p2: 0.0,
            trajectories: 100,
            noise_skip_prep: false,
            seed: 0,
            workers: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if self.layers == 0 {
            return bad("layers must be at least 1".into());
        }
        if !(self.penalty > 0.0) || !self.penalty.is_finite() {
            return bad(format!("penalty must be positive, got {}", self.penalty));
        }
        if self.trajectories == 0 {
            return bad("trajectories must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        self.noise()?;
        self.optimizer().validate()?;
        self.interaction_params()?;
        Ok(())
    }

    pub fn interaction_params(&self) -> Result<InteractionParams> {
        let base = self.profile.params();
        InteractionParams::new(
            self.tau.unwrap_or(base.tau),
            self.eps.unwrap_or(base.eps_default),
            self.eps_s.unwrap_or(base.eps_hbond),
        )
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        let mut n = NoiseModel::new(self.noise_p1, self.noise_p2)?;
        n.skip_prep = self.noise_skip_prep;
        Ok(n)
    }

    pub fn budget(&self) -> usize {
        self.max_iters.unwrap_or(match self.ansatz {
            Flavor::Qaoa => self.iters_qaoa,
            Flavor::DcQaoa => self.iters_dcqaoa,
        })
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            eta: self.eta,
            max_iters: self.budget(),
            grad_tol: self.grad_tol,
            reg_lambda: self.reg_lambda,
            metric: self.metric,
            ..OptimizerConfig::default()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn load_points(spec: &Path, pdb: Option<&Path>) -> Result<Vec<PharmacophorePoint>> {
    let spec = parse_pharmacophore_spec(&read(spec)?)?;
    let atoms = match pdb {
        Some(p) => parse_pdb_atoms(&read(p)?)?,
        None => Vec::new(),
    };
    resolve_points(&spec, &atoms)
}

/// Plain random graph with weights drawn from the distinct table values.
pub fn random_big<R: rand::Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<BindingInteractionGraph> {
    use rand::seq::IndexedRandom;
    let values = PotentialTable::default().distinct_values();
    let weights: Vec<f64> = (0..n).map(|_| *values.choose(rng).expect("non-empty table")).collect();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|_| rng.random::<f64>() < density)
        .collect();
    BindingInteractionGraph::from_edges((0..n).map(|i| format!("v{i}")).collect(), weights, &edges)
}

/// Resolves the configured problem source into a BIG.
pub fn load_graph(cfg: &ExperimentConfig) -> Result<BindingInteractionGraph> {
    if let Some(path) = &cfg.graph {
        return BindingInteractionGraph::from_json(&read(path)?);
    }
    if let (Some(lig), Some(prot)) = (&cfg.ligand, &cfg.protein) {
        let l = build_ldg(&load_points(lig, cfg.ligand_pdb.as_deref())?)?;
        let p = build_ldg(&load_points(prot, cfg.protein_pdb.as_deref())?)?;
        let options = BigOptions {
            allow_shared_points: cfg.allow_shared_points,
        };
        return build_big(&l, &p, &cfg.interaction_params()?, &PotentialTable::default(), options);
    }
    if let Some(n) = cfg.synthetic_vertices {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.synthetic_seed.unwrap_or(cfg.seed));
        return match cfg.synthetic_gap {
            Some(gap) => oracle::make_near_degenerate_instance_with(
                n,
                gap,
                cfg.synthetic_density,
                &PotentialTable::default(),
                &mut rng,
            ),
            None => random_big(n, cfg.synthetic_density, &mut rng),
        };
    }
    Err(Error::InvalidArgument(
        "no problem source: give graph, ligand+protein, or synthetic_vertices".into(),
    ))
}

/// Everything a campaign needs, derived once from the config.
#[derive(Debug, Clone)]
pub struct Problem {
    pub big: BindingInteractionGraph,
    /// Hamiltonian as optimized (normalized when configured).
    pub hamiltonian: IsingHamiltonian,
    pub energy: Vec<f64>,
    pub ground_energy: f64,
    pub clique: CliqueSolution,
    /// Basis indices of every maximum-weight clique.
    pub targets: Vec<usize>,
    pub circuit: CircuitIR,
}

pub fn build_circuit(cfg: &ExperimentConfig, h: &IsingHamiltonian) -> Result<CircuitIR> {
    match cfg.ansatz {
        Flavor::Qaoa => build_qaoa(h, cfg.layers, cfg.multi_angle),
        Flavor::DcQaoa => {
            let pool = match &cfg.cd_pool {
                Some(terms) => CdPool::new(terms)?,
                None => select_cd_term(FieldForm::of(h))?,
            };
            build_dcqaoa(h, cfg.layers, &pool, cfg.multi_angle)
        }
    }
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Problem> {
    cfg.validate()?;
    let big = load_graph(cfg)?;
    prepare_with(cfg, big)
}

pub fn prepare_with(cfg: &ExperimentConfig, big: BindingInteractionGraph) -> Result<Problem> {
    if big.is_empty() {
        return Err(Error::Infeasible("graph has no vertices, so no clique to target".into()));
    }
    let raw = encode(&big, cfg.penalty)?;
    let hamiltonian = if cfg.normalize { raw.normalized() } else { raw };
    let energy = hamiltonian.energy_vector()?;
    let ground_energy = energy.iter().copied().fold(f64::INFINITY, f64::min);
    let clique = oracle::max_weight_clique(&big)?;
    let targets: Vec<usize> = clique
        .optima
        .iter()
        .map(|c| Bitstring::from_vertices(big.len(), c).index())
        .collect();
    if targets.is_empty() {
        return Err(Error::Infeasible("oracle found no clique".into()));
    }
    let circuit = build_circuit(cfg, &hamiltonian)?;
    Ok(Problem {
        big,
        hamiltonian,
        energy,
        ground_energy,
        clique,
        targets,
        circuit,
    })
}

/// Seed of restart `k`: word 0 of stream `k` under the master seed.
pub fn restart_seed(master: u64, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(k as u64);
    rng.next_u64()
}

fn aux_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fraction of sample sets whose modal outcome (any of them, on ties) is a target.
pub fn success_ratio(samples: &[&ShotCounts], targets: &[usize]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no restarts to score".into()));
    }
    let hits = samples.iter().filter(|s| modal_hits(s, targets)).count();
    Ok(hits as f64 / samples.len() as f64)
}

fn modal_hits(s: &ShotCounts, targets: &[usize]) -> bool {
    s.modal_set().iter().any(|z| targets.contains(z))
}

/// Probability mass on the target set.
pub fn overlap_metric(state: &Statevector, targets: &[usize]) -> f64 {
    state.overlap(targets)
}

/// First iteration whose excess loss is at most a tenth of the initial excess.
pub fn iterations_to_threshold(curve: &[f64], ground: f64) -> Option<usize> {
    let gap0 = curve.first()? - ground;
    curve.iter().position(|l| l - ground <= 0.1 * gap0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub index: usize,
    pub seed: u64,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub iterations_used: usize,
    pub termination: Termination,
    pub fallback_steps: usize,
    pub iters_to_threshold: Option<usize>,
    pub modal: Vec<String>,
    pub success: bool,
    pub overlap: f64,
    pub overlap_stderr: Option<f64>,
    /// Fraction of shots that landed on a target.
    pub success_probability: f64,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub loss_curve: Vec<f64>,
    #[serde(skip)]
    pub samples: Option<ShotCounts>,
    #[serde(skip)]
    pub final_params: Vec<f64>,
}

fn run_restart(cfg: &ExperimentConfig, problem: &Problem, index: usize) -> Result<RestartOutcome> {
    let start = Instant::now();
    let seed = restart_seed(cfg.seed, index);
    let record = optimize(&problem.circuit, &problem.energy, &cfg.optimizer(), seed)?;
    let n = problem.big.len();
    let noise = cfg.noise()?;
    let mut rng = aux_rng(seed, 1);
    let (counts, overlap, overlap_stderr) = if noise.is_noiseless() {
        let state = run(&problem.circuit, &record.final_params)?;
        (sample(&state, cfg.shots, &mut rng)?, overlap_metric(&state, &problem.targets), None)
    } else {
        let t = cfg.trajectories as u64;
        let mut merged = ShotCounts {
            n_qubits: n,
            counts: Default::default(),
            total: 0,
        };
        let mut overlaps = Vec::with_capacity(cfg.trajectories);
        for k in 0..t {
            let s = run_noisy_trajectory(&problem.circuit, &record.final_params, &noise, &mut rng)?;
            overlaps.push(overlap_metric(&s, &problem.targets));
            let per = cfg.shots / t + u64::from(k < cfg.shots % t);
            if per == 0 {
                continue;
            }
            let c = sample(&s, per, &mut rng)?;
            for (z, k) in c.counts {
                *merged.counts.entry(z).or_insert(0) += k;
            }
            merged.total += c.total;
        }
        let (m, v) = mean_var(&overlaps);
        (merged, m, Some((v / overlaps.len() as f64).sqrt()))
    };
    log::debug!("restart {index} seed {seed} final loss {:.6}", record.final_loss());
    let on_target: u64 = problem.targets.iter().map(|z| counts.counts.get(z).copied().unwrap_or(0)).sum();
    Ok(RestartOutcome {
        index,
        seed,
        initial_loss: record.loss_curve[0],
        final_loss: record.final_loss(),
        iterations_used: record.iterations_used,
        termination: record.termination,
        fallback_steps: record.fallback_steps,
        iters_to_threshold: iterations_to_threshold(&record.loss_curve, problem.ground_energy),
        modal: counts.modal_set().into_iter().map(|z| Bitstring::from_index(z, n).to_string()).collect(),
        success: modal_hits(&counts, &problem.targets),
        overlap,
        overlap_stderr,
        success_probability: on_target as f64 / counts.total as f64,
        wall_seconds: start.elapsed().as_secs_f64(),
        loss_curve: record.loss_curve,
        samples: Some(counts),
        final_params: record.final_params,
    })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    (mean, xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Median and quartiles of the loss at each iteration, over the restarts
/// that reached it.
pub fn aggregate_curves(curves: &[&[f64]]) -> Vec<CurvePoint> {
    let len = curves.iter().map(|c| c.len()).max().unwrap_or(0);
    (0..len)
        .map(|t| {
            let mut v: Vec<f64> = curves.iter().filter_map(|c| c.get(t).copied()).collect();
            v.sort_by(f64::total_cmp);
            CurvePoint {
                iteration: t,
                median: quantile(&v, 0.5),
                q1: quantile(&v, 0.25),
                q3: quantile(&v, 0.75),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub p_true: f64,
    pub mean_overlap: f64,
    pub overlap_variance: f64,
    pub mean_success_probability: f64,
    pub median_iters_to_threshold: Option<f64>,
    /// Restarts that never reached the threshold.
    pub threshold_misses: usize,
    pub mean_final_loss: f64,
}

impl Metrics {
    /// Binomial standard error of `p_true`.
    pub fn p_true_stderr(&self, restarts: usize) -> f64 {
        (self.p_true * (1.0 - self.p_true) / restarts as f64).sqrt()
    }

    pub fn overlap_stderr(&self, restarts: usize) -> f64 {
        (self.overlap_variance / restarts as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallStats {
    pub total_seconds: f64,
    pub mean_restart_seconds: f64,
    pub max_restart_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub vertices: usize,
    pub edges: usize,
    pub complement_edges: usize,
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub max_clique: Vec<usize>,
    pub max_clique_weight: f64,
    pub runner_up_weight: Option<f64>,
    pub unique_max: bool,
    pub targets: Vec<String>,
    pub ground_energy: f64,
    pub scale: f64,
    pub n_params: usize,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub iteration_budget: usize,
}

impl ProblemSummary {
    fn of(cfg: &ExperimentConfig, p: &Problem) -> Self {
        let (single, two) = crate::circuit::gate_counts(&p.circuit);
        let n = p.big.len();
        ProblemSummary {
            vertices: n,
            edges: p.big.edges().len(),
            complement_edges: p.big.complement_edges().len(),
            labels: p.big.labels().iter().map(|s| s.to_string()).collect(),
            weights: p.big.weights().to_vec(),
            max_clique: p.clique.vertices.clone(),
            max_clique_weight: p.clique.total_weight,
            runner_up_weight: p.clique.runner_up_weight,
            unique_max: p.clique.is_unique_max,
            targets: p.targets.iter().map(|&z| Bitstring::from_index(z, n).to_string()).collect(),
            ground_energy: p.ground_energy,
            scale: p.hamiltonian.scale,
            n_params: p.circuit.n_params,
            single_qubit_gates: single,
            two_qubit_gates: two,
            iteration_budget: cfg.budget(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub problem: Option<ProblemSummary>,
    pub restarts: Vec<RestartOutcome>,
    pub metrics: Option<Metrics>,
    pub loss_aggregate: Vec<CurvePoint>,
    pub wall: WallStats,
    pub created_unix: u64,
    #[serde(default)]
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub(crate) cliques_csv: Option<String>,
}

impl ExperimentReport {
    /// Skeleton with no restarts.
    pub fn empty(config: ExperimentConfig) -> Self {
        ExperimentReport {
            config,
            problem: None,
            restarts: Vec::new(),
            metrics: None,
            loss_aggregate: Vec::new(),
            wall: WallStats {
                total_seconds: 0.0,
                mean_restart_seconds: 0.0,
                max_restart_seconds: 0.0,
            },
            created_unix: now_unix(),
            artifacts: Vec::new(),
            cliques_csv: None,
        }
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn metrics_of(restarts: &[RestartOutcome], targets: &[usize]) -> Result<Metrics> {
    let samples: Vec<&ShotCounts> = restarts.iter().filter_map(|r| r.samples.as_ref()).collect();
    let p_true = if samples.len() == restarts.len() {
        success_ratio(&samples, targets)?
    } else {
        if restarts.is_empty() {
            return Err(Error::InvalidArgument("no restarts to score".into()));
        }
        restarts.iter().filter(|r| r.success).count() as f64 / restarts.len() as f64
    };
    let overlaps: Vec<f64> = restarts.iter().map(|r| r.overlap).collect();
    let (mean_overlap, overlap_variance) = mean_var(&overlaps);
    let mut its: Vec<f64> = restarts.iter().filter_map(|r| r.iters_to_threshold.map(|t| t as f64)).collect();
    its.sort_by(f64::total_cmp);
    let n = restarts.len() as f64;
    Ok(Metrics {
        p_true,
        mean_overlap,
        overlap_variance,
        mean_success_probability: restarts.iter().map(|r| r.success_probability).sum::<f64>() / n,
        median_iters_to_threshold: (!its.is_empty()).then(|| quantile(&its, 0.5)),
        threshold_misses: restarts.len() - its.len(),
        mean_final_loss: restarts.iter().map(|r| r.final_loss).sum::<f64>() / n,
    })
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Full campaign on an already prepared problem.
pub fn run_prepared(cfg: &ExperimentConfig, problem: &Problem) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let restarts: Vec<RestartOutcome> = in_pool(cfg.workers, || {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|k| run_restart(cfg, problem, k))
            .collect::<Result<Vec<_>>>()
    })??;
    let metrics = metrics_of(&restarts, &problem.targets)?;
    let curves: Vec<&[f64]> = restarts.iter().map(|r| r.loss_curve.as_slice()).collect();
    let secs: Vec<f64> = restarts.iter().map(|r| r.wall_seconds).collect();
    let cliques = if problem.big.len() <= oracle::EXHAUSTIVE_CAP {
        Some(oracle::cliques_csv(&problem.big, &oracle::enumerate_cliques(&problem.big, 3, false)?)?)
    } else {
        None
    };
    Ok(ExperimentReport {
        config: cfg.clone(),
        problem: Some(ProblemSummary::of(cfg, problem)),
        loss_aggregate: aggregate_curves(&curves),
        wall: WallStats {
            total_seconds: start.elapsed().as_secs_f64(),
            mean_restart_seconds: mean_var(&secs).0,
            max_restart_seconds: secs.iter().copied().fold(0.0, f64::max),
        },
        restarts,
        metrics: Some(metrics),
        created_unix: now_unix(),
        artifacts: Vec::new(),
        cliques_csv: cliques,
    })
}

/// Builds the problem, runs every restart and aggregates. Writes the report
/// when `out` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let problem = prepare(cfg)?;
    let mut report = run_prepared(cfg, &problem)?;
    if let Some(dir) = &cfg.out {
        let manifest = emit_report(&report, dir)?;
        report.artifacts = manifest.files.iter().map(|f| f.name.clone()).collect();
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPoint {
    Layers(usize),
    Penalty(f64),
    Noise { p1: f64, p2: f64 },
}

impl SweepPoint {
    pub fn apply(&self, cfg: &ExperimentConfig) -> ExperimentConfig {
        let mut c = cfg.clone();
        match *self {
            SweepPoint::Layers(p) => c.layers = p,
            SweepPoint::Penalty(p) => c.penalty = p,
            SweepPoint::Noise { p1, p2 } => {
                c.noise_p1 = p1;
                c.noise_p2 = p2;
            }
        }
        c
    }

    pub fn axis(&self) -> &'static str {
        match self {
            SweepPoint::Layers(_) => "layers",
            SweepPoint::Penalty(_) => "penalty",
            SweepPoint::Noise { .. } => "noise",
        }
    }

    pub fn value(&self) -> String {
        match self {
            SweepPoint::Layers(p) => p.to_string(),
            SweepPoint::Penalty(p) => p.to_string(),
            SweepPoint::Noise { p1, p2 } => format!("{p1}:{p2}"),
        }
    }

    /// `axis` is `layers`, `penalty` or `noise`; noise values read `p1:p2`.
    pub fn parse_list(axis: &str, values: &str) -> Result<Vec<SweepPoint>> {
        let bad = |v: &str| Error::InvalidArgument(format!("bad {axis} sweep value {v:?}"));
        values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| match axis {
                "layers" => v.parse().map(SweepPoint::Layers).map_err(|_| bad(v)),
                "penalty" => v.parse().map(SweepPoint::Penalty).map_err(|_| bad(v)),
                "noise" => {
                    let (a, b) = v.split_once(':').ok_or_else(|| bad(v))?;
                    Ok(SweepPoint::Noise {
                        p1: a.parse().map_err(|_| bad(v))?,
                        p2: b.parse().map_err(|_| bad(v))?,
                    })
                }
                _ => Err(Error::InvalidArgument(format!("unknown sweep axis {axis:?}"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub restarts: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "axis",
            "value",
            "restarts",
            "p_true",
            "mean_overlap",
            "overlap_variance",
            "mean_success_probability",
            "median_iters_to_threshold",
        ])?;
        for r in &self.rows {
            let m = &r.metrics;
            w.write_record([
                r.axis.clone(),
                r.value.clone(),
                r.restarts.to_string(),
                m.p_true.to_string(),
                m.mean_overlap.to_string(),
                m.overlap_variance.to_string(),
                m.mean_success_probability.to_string(),
                m.median_iters_to_threshold.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// One campaign per point, all under the same master seed. With `out` set,
/// each point's report goes to `point_k/` and the table to `sweep.csv`.
pub fn sweep(cfg: &ExperimentConfig, points: &[SweepPoint]) -> Result<(SweepTable, Vec<ExperimentReport>)> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    let base = prepare(cfg)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut reports = Vec::with_capacity(points.len());
    for (k, pt) in points.iter().enumerate() {
        let mut c = pt.apply(cfg);
        c.out = cfg.out.as_ref().map(|d| d.join(format!("point_{k}")));
        c.validate()?;
        let problem = match pt {
            SweepPoint::Noise { .. } => base.clone(),
            _ => prepare_with(&c, base.big.clone())?,
        };
        let mut report = run_prepared(&c, &problem)?;
        if let Some(dir) = &c.out {
            let manifest = emit_report(&report, dir)?;
            report.artifacts = manifest.files.iter().map(|f| f.name.clone()).collect();
        }
        rows.push(SweepRow {
            axis: pt.axis().into(),
            value: pt.value(),
            restarts: c.restarts,
            metrics: report.metrics.clone().expect("campaign has restarts"),
        });
        reports.push(report);
    }
    let table = SweepTable { rows };
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("sweep.csv");
        std::fs::write(&path, table.to_csv()?).map_err(|e| Error::io(&path, e))?;
    }
    Ok((table, reports))
}
