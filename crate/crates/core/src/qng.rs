//! Quantum natural gradient descent.
//!
//! The loss is `<psi(theta)|H|psi(theta)>` for a diagonal `H` given as an
//! energy vector. Updates follow `theta <- theta - eta (M + lambda I)^-1 C`
//! where `M` is the real part of the quantum geometric tensor.
//!
//! [`QngEngine`] compiles a circuit into stages (runs of commuting diagonal
//! gates, runs of single-qubit gates fused per qubit, and lone two-qubit
//! rotations) and builds the Jacobian `J[j] = d psi / d theta_j` at the end of
//! the circuit in one forward sweep. Loss, gradient and metric all come from
//! `psi` and `J`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{BlockKind, CircuitIR, Pauli};
use crate::error::{Error, Result};
use crate::sim::kernels::{self, generator_string, matrix_1q, mul2, Mat2};
use crate::sim::soa;
use crate::sim::{check_params, run, Statevector};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    #[default]
    Full,
    /// Keep only entries whose parameters sit in the same circuit block.
    BlockDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryPolicy {
    #[default]
    Endpoints,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub eta: f64,
    pub max_iters: usize,
    /// Stop once `max |C_j|` falls below this.
    pub grad_tol: Option<f64>,
    pub reg_lambda: f64,
    pub metric: MetricKind,
    pub history: HistoryPolicy,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            eta: 0.1,
            max_iters: 500,
            grad_tol: Some(1e-6),
            reg_lambda: 1e-4,
            metric: MetricKind::Full,
            history: HistoryPolicy::Endpoints,
        }
    }
}

impl OptimizerConfig {
    /// Fixed iteration budget, no early stop.
    pub fn fixed_budget(max_iters: usize) -> Self {
        OptimizerConfig {
            max_iters,
            grad_tol: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {}", self.eta)));
        }
        if !(self.reg_lambda >= 0.0) || !self.reg_lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "regularization must be non-negative, got {}",
                self.reg_lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIters,
    GradTol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub config: OptimizerConfig,
    /// Loss before the first step, then after every step.
    pub loss_curve: Vec<f64>,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_history: Option<Vec<Vec<f64>>>,
    pub iterations_used: usize,
    pub termination: Termination,
    /// Steps where the regularized solve failed and a plain gradient step was taken.
    pub fallback_steps: usize,
}

impl RunRecord {
    pub fn final_loss(&self) -> f64 {
        *self.loss_curve.last().expect("loss curve is never empty")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run record serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_energy(circuit: &CircuitIR, energy: &[f64]) -> Result<()> {
    let dim = 1usize << circuit.n_qubits;
    if energy.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: energy.len(),
        });
    }
    Ok(())
}

/// Exact gradient by reverse-mode sweep over the gates.
pub fn gradient(circuit: &CircuitIR, params: &[f64], energy: &[f64]) -> Result<Vec<f64>> {
    check_energy(circuit, energy)?;
    let mut psi = run(circuit, params)?;
    let mut lambda: Vec<C64> = psi.amps.iter().zip(energy).map(|(a, e)| a * e).collect();
    let mut grad = vec![0.0; circuit.n_params];
    let mut tmp = vec![ZERO; psi.amps.len()];
    for g in circuit.gates.iter().rev() {
        let theta = g.angle(params);
        if let Some(slot) = g.param_slot {
            // d/dθ <psi|E|psi> = c Im <lambda|P|psi> at the gate output
            tmp.copy_from_slice(&psi.amps);
            generator_string(g.kind, &g.qubits).expect("parametric").apply(&mut tmp);
            let inner: C64 = lambda.iter().zip(&tmp).map(|(l, t)| l.conj() * t).sum();
            grad[slot] += g.coeff * inner.im;
        }
        let undo = if g.kind.is_parametric() { -theta } else { 0.0 };
        kernels::apply_gate_raw(&mut psi.amps, g.kind, &g.qubits, undo, 0, false);
        kernels::apply_gate_raw(&mut lambda, g.kind, &g.qubits, undo, 0, false);
    }
    Ok(grad)
}

#[derive(Debug, Clone)]
enum Stage {
    /// Commuting diagonal rotations.
    Diag(Vec<usize>),
    /// Single-qubit gates, `per_qubit[q]` in application order.
    Local(Vec<Vec<usize>>),
    Single(usize),
}

fn compile(circuit: &CircuitIR) -> Vec<Stage> {
    let n = circuit.n_qubits;
    let mut stages: Vec<Stage> = Vec::new();
    for (k, g) in circuit.gates.iter().enumerate() {
        let local = g.kind.arity() == 1 && !g.kind.is_diagonal();
        match stages.last_mut() {
            Some(Stage::Diag(v)) if g.kind.is_diagonal() => v.push(k),
            Some(Stage::Local(per)) if local => per[g.qubits[0]].push(k),
            _ if g.kind.is_diagonal() => stages.push(Stage::Diag(vec![k])),
            _ if local => {
                let mut per = vec![Vec::new(); n];
                per[g.qubits[0]].push(k);
                stages.push(Stage::Local(per));
            }
            _ => stages.push(Stage::Single(k)),
        }
    }
    stages
}

fn pauli_mat(p: Pauli) -> Mat2 {
    let (o, i) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match p {
        Pauli::I => [[o, ZERO], [ZERO, o]],
        Pauli::X => [[ZERO, o], [o, ZERO]],
        Pauli::Y => [[ZERO, -i], [i, ZERO]],
        Pauli::Z => [[o, ZERO], [ZERO, -o]],
    }
}

fn dagger(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn zmask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | 1 << q)
}

#[inline]
fn parity_sign(z: usize, mask: usize) -> f64 {
    if (z & mask).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Derivative term a slot picks up at one stage, applied to the state after
/// that stage and scaled by `-i kappa`.
#[derive(Debug, Clone)]
enum Term {
    Parity(usize, f64),
    Local(usize, Mat2, f64),
    Pauli(usize, f64),
}

#[derive(Debug, Clone)]
enum StageOp {
    Phase(Vec<f64>, Vec<f64>),
    Units(Vec<(usize, Mat2)>),
    Gate(usize, f64),
}

impl StageOp {
    fn apply(&self, buf: &mut [f64]) {
        let (re, im) = split(buf);
        match self {
            StageOp::Phase(pr, pi) => soa::apply_phase(re, im, pr, pi),
            StageOp::Units(units) => soa::apply_units(re, im, units),
            StageOp::Gate(..) => unreachable!("gate stages need the circuit"),
        }
    }

    fn apply_with(&self, buf: &mut [f64], circuit: &CircuitIR) {
        match self {
            StageOp::Gate(k, theta) => {
                let g = &circuit.gates[*k];
                with_complex(buf, |amps| kernels::apply_gate_raw(amps, g.kind, &g.qubits, *theta, 0, false));
            }
            _ => self.apply(buf),
        }
    }
}

fn with_complex(buf: &mut [f64], f: impl FnOnce(&mut [C64])) {
    let (re, im) = split(buf);
    let mut amps: Vec<C64> = re.iter().zip(im.iter()).map(|(&r, &i)| C64::new(r, i)).collect();
    f(&mut amps);
    for (z, a) in amps.iter().enumerate() {
        re[z] = a.re;
        im[z] = a.im;
    }
}

/// `row += -i kappa * src`.
fn add_rotated(row: &mut [f64], kappa: f64, src: &[f64]) {
    let dim = src.len() / 2;
    let (rr, ri) = row.split_at_mut(dim);
    let (sr, si) = src.split_at(dim);
    rr.iter_mut().zip(si).for_each(|(r, y)| *r += kappa * y);
    ri.iter_mut().zip(sr).for_each(|(r, x)| *r -= kappa * x);
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub loss: f64,
    pub grad: Vec<f64>,
    pub metric: Option<DMatrix<f64>>,
    pub state: Statevector,
}

/// Reusable Jacobian workspace for one circuit. Rows are stored as the real
/// parts followed by the imaginary parts.
#[derive(Debug, Clone)]
pub struct QngEngine {
    circuit: CircuitIR,
    stages: Vec<Stage>,
    jac: Vec<f64>,
    groups: Vec<usize>,
}

fn split(row: &mut [f64]) -> (&mut [f64], &mut [f64]) {
    let half = row.len() / 2;
    row.split_at_mut(half)
}

impl QngEngine {
    pub fn new(circuit: &CircuitIR) -> Result<Self> {
        if circuit.n_qubits > crate::sim::STATE_QUBIT_CAP {
            return Err(Error::ResourceCap {
                what: "statevector qubits",
                requested: circuit.n_qubits,
                cap: crate::sim::STATE_QUBIT_CAP,
                hint: "",
            });
        }
        let mut groups = vec![usize::MAX; circuit.n_params];
        for (b, block) in circuit.blocks.iter().enumerate() {
            for g in &circuit.gates[block.gates.clone()] {
                if let Some(s) = g.param_slot {
                    if groups[s] == usize::MAX {
                        groups[s] = b;
                    }
                }
            }
        }
        Ok(QngEngine {
            circuit: circuit.clone(),
            stages: compile(circuit),
            jac: Vec::new(),
            groups,
        })
    }

    pub fn circuit(&self) -> &CircuitIR {
        &self.circuit
    }

    fn dim(&self) -> usize {
        1 << self.circuit.n_qubits
    }

    /// Final state; fills the Jacobian rows, one per parameter.
    ///
    /// A forward pass records every stage's operator, the state after each
    /// stage and the derivative terms each slot picks up there. Rows are then
    /// built one at a time and carried through the remaining stages while
    /// they stay in cache.
    fn sweep(&mut self, params: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let np = self.circuit.n_params;
        let mut psi = vec![0.0; 2 * dim];
        psi[0] = 1.0;
        let mut ops: Vec<StageOp> = Vec::with_capacity(self.stages.len());
        let mut snaps: Vec<Vec<f64>> = Vec::with_capacity(self.stages.len());
        let mut terms: Vec<Vec<(usize, Term)>> = vec![Vec::new(); np];
        for (s, stage) in self.stages.iter().enumerate() {
            match stage {
                Stage::Diag(gates) => {
                    let mut acc = vec![0.0; dim];
                    for &k in gates {
                        let g = &self.circuit.gates[k];
                        let (theta, mask) = (g.angle(params), zmask(&g.qubits));
                        acc.iter_mut().enumerate().for_each(|(z, a)| *a += theta * parity_sign(z, mask));
                        if let Some(slot) = g.param_slot {
                            terms[slot].push((s, Term::Parity(mask, 0.5 * g.coeff)));
                        }
                    }
                    let (pi, pr): (Vec<f64>, Vec<f64>) = acc.iter().map(|a| (-0.5 * a).sin_cos()).unzip();
                    let op = StageOp::Phase(pr, pi);
                    op.apply(&mut psi);
                    ops.push(op);
                }
                Stage::Local(per) => {
                    let mut units: Vec<(usize, Mat2)> = Vec::new();
                    for (q, list) in per.iter().enumerate() {
                        if list.is_empty() {
                            continue;
                        }
                        let mats: Vec<Mat2> = list
                            .iter()
                            .map(|&k| matrix_1q(self.circuit.gates[k].kind, self.circuit.gates[k].angle(params)))
                            .collect();
                        let mut suffix = pauli_mat(Pauli::I);
                        for (idx, &k) in list.iter().enumerate().rev() {
                            let g = &self.circuit.gates[k];
                            if let (Some(slot), Some((p, _))) = (g.param_slot, g.kind.generator()) {
                                let conj = mul2(&mul2(&suffix, &pauli_mat(p)), &dagger(&suffix));
                                terms[slot].push((s, Term::Local(q, conj, 0.5 * g.coeff)));
                            }
                            suffix = mul2(&suffix, &mats[idx]);
                        }
                        units.push((q, suffix));
                    }
                    let op = StageOp::Units(units);
                    op.apply(&mut psi);
                    ops.push(op);
                }
                Stage::Single(k) => {
                    let g = &self.circuit.gates[*k];
                    if let Some(slot) = g.param_slot {
                        terms[slot].push((s, Term::Pauli(*k, 0.5 * g.coeff)));
                    }
                    let op = StageOp::Gate(*k, g.angle(params));
                    op.apply_with(&mut psi, &self.circuit);
                    ops.push(op);
                }
            }
            snaps.push(psi.clone());
        }

        self.jac.clear();
        self.jac.resize(np * 2 * dim, 0.0);
        let mut scratch = vec![0.0; 2 * dim];
        for (slot, row) in self.jac.chunks_exact_mut(2 * dim).enumerate() {
            let list = &terms[slot];
            let Some(&(first, _)) = list.first() else {
                continue;
            };
            let mut next = 0;
            for (s, op) in ops.iter().enumerate().skip(first) {
                if s > first {
                    op.apply_with(row, &self.circuit);
                }
                while next < list.len() && list[next].0 == s {
                    let src = &snaps[s];
                    match &list[next].1 {
                        Term::Parity(mask, kappa) => {
                            let (rr, ri) = row.split_at_mut(dim);
                            let (sr, si) = src.split_at(dim);
                            for z in 0..dim {
                                let k = kappa * parity_sign(z, *mask);
                                rr[z] += k * si[z];
                                ri[z] -= k * sr[z];
                            }
                        }
                        Term::Local(q, m, kappa) => {
                            scratch.copy_from_slice(src);
                            let (re, im) = split(&mut scratch);
                            soa::apply_1q(re, im, *q, m);
                            add_rotated(row, *kappa, &scratch);
                        }
                        Term::Pauli(k, kappa) => {
                            scratch.copy_from_slice(src);
                            let g = &self.circuit.gates[*k];
                            with_complex(&mut scratch, |amps| {
                                generator_string(g.kind, &g.qubits).expect("parametric").apply(amps)
                            });
                            add_rotated(row, *kappa, &scratch);
                        }
                    }
                    next += 1;
                }
            }
        }
        psi
    }

    /// Loss, gradient and (optionally) the metric at `params`.
    pub fn evaluate(&mut self, params: &[f64], energy: &[f64], metric: Option<MetricKind>) -> Result<Evaluation> {
        check_params(&self.circuit, params)?;
        check_energy(&self.circuit, energy)?;
        let psi = self.sweep(params);
        let dim = self.dim();
        let (pr, pi) = psi.split_at(dim);
        let loss = pr.iter().zip(pi).zip(energy).map(|((r, i), e)| (r * r + i * i) * e).sum();
        let weighted: Vec<f64> = pr.iter().chain(pi).zip(energy.iter().chain(energy)).map(|(a, e)| a * e).collect();
        let grad = self
            .jac
            .chunks_exact(2 * dim)
            .map(|row| 2.0 * row.iter().zip(&weighted).map(|(j, v)| j * v).sum::<f64>())
            .collect();
        let metric = metric.map(|kind| self.metric_from_jacobian(&psi, kind));
        Ok(Evaluation {
            loss,
            grad,
            metric,
            state: Statevector {
                n_qubits: self.circuit.n_qubits,
                amps: pr.iter().zip(pi).map(|(&r, &i)| C64::new(r, i)).collect(),
            },
        })
    }

    fn metric_from_jacobian(&self, psi: &[f64], kind: MetricKind) -> DMatrix<f64> {
        let width = 2 * self.dim();
        let dim = self.dim();
        let np = self.circuit.n_params;
        // Im <psi|d_j psi>
        let berry: Vec<f64> = self
            .jac
            .chunks_exact(width)
            .map(|row| {
                let (jr, ji) = row.split_at(dim);
                let (pr, pi) = psi.split_at(dim);
                (0..dim).map(|z| pr[z] * ji[z] - pi[z] * jr[z]).sum()
            })
            .collect();
        let mut m = match kind {
            MetricKind::Full => gram(&self.jac, np, width),
            MetricKind::BlockDiagonal => {
                let mut m = DMatrix::zeros(np, np);
                for j in 0..np {
                    for k in j..np {
                        if self.groups[j] == self.groups[k] {
                            let a = &self.jac[j * width..(j + 1) * width];
                            let b = &self.jac[k * width..(k + 1) * width];
                            let v: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                            m[(j, k)] = v;
                            m[(k, j)] = v;
                        }
                    }
                }
                m
            }
        };
        for j in 0..np {
            for k in 0..np {
                if kind == MetricKind::Full || self.groups[j] == self.groups[k] {
                    m[(j, k)] -= berry[j] * berry[k];
                }
            }
        }
        m
    }
}

/// `A A^T` for `np` real rows of length `width`. Only upper-triangular
/// tiles are computed.
fn gram(a: &[f64], np: usize, width: usize) -> DMatrix<f64> {
    const TILE: usize = 64;
    let k = width;
    let mut out = vec![0.0f64; np * np];
    for i0 in (0..np).step_by(TILE) {
        let mi = TILE.min(np - i0);
        for j0 in (i0..np).step_by(TILE) {
            let nj = TILE.min(np - j0);
            // SAFETY: the operands span mi x k, k x nj and mi x nj elements
            // at the given strides, all inside `a` and `out`.
            unsafe {
                matrixmultiply::dgemm(
                    mi,
                    k,
                    nj,
                    1.0,
                    a.as_ptr().add(i0 * k),
                    k as isize,
                    1,
                    a.as_ptr().add(j0 * k),
                    1,
                    k as isize,
                    0.0,
                    out.as_mut_ptr().add(i0 * np + j0),
                    np as isize,
                    1,
                );
            }
        }
    }
    for i in 0..np {
        for j in 0..i {
            out[i * np + j] = out[j * np + i];
        }
    }
    DMatrix::from_row_slice(np, np, &out)
}

/// The full metric `M` at `params`.
pub fn qgt(circuit: &CircuitIR, params: &[f64]) -> Result<DMatrix<f64>> {
    let mut engine = QngEngine::new(circuit)?;
    let zeros = vec![0.0; 1 << circuit.n_qubits];
    let eval = engine.evaluate(params, &zeros, Some(MetricKind::Full))?;
    Ok(eval.metric.expect("metric requested"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub params: Vec<f64>,
    pub fallback: bool,
}

/// `params - eta (M + lambda I)^-1 C`, falling back to `params - eta C`
/// when the system cannot be solved.
pub fn step(params: &[f64], grad: &[f64], metric: &DMatrix<f64>, config: &OptimizerConfig) -> Result<StepOutcome> {
    let np = params.len();
    if grad.len() != np || metric.nrows() != np || metric.ncols() != np {
        return Err(Error::DimensionMismatch {
            expected: np,
            found: grad.len().max(metric.nrows()),
        });
    }
    if params.iter().chain(grad).chain(metric.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in natural-gradient step".into()));
    }
    let mut a = metric.clone();
    for j in 0..np {
        a[(j, j)] += config.reg_lambda;
    }
    let c = DVector::from_column_slice(grad);
    let solved = a
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&c))
        .or_else(|| a.clone().lu().solve(&c))
        .filter(|x| x.iter().all(|v| v.is_finite()));
    let (x, fallback) = match solved {
        Some(x) => (x, false),
        None => {
            log::debug!("natural-gradient solve failed; taking a plain gradient step");
            (c, true)
        }
    };
    Ok(StepOutcome {
        params: params.iter().zip(x.iter()).map(|(p, d)| p - config.eta * d).collect(),
        fallback,
    })
}

/// Random `U(0,1)` start drawn from `seed`, then [`optimize_from`].
pub fn optimize(circuit: &CircuitIR, energy: &[f64], config: &OptimizerConfig, seed: u64) -> Result<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<f64> = (0..circuit.n_params).map(|_| rng.random::<f64>()).collect();
    optimize_from(circuit, energy, config, seed, init)
}

pub fn optimize_from(
    circuit: &CircuitIR,
    energy: &[f64],
    config: &OptimizerConfig,
    seed: u64,
    init: Vec<f64>,
) -> Result<RunRecord> {
    config.validate()?;
    let mut engine = QngEngine::new(circuit)?;
    let mut params = init.clone();
    let mut history = (config.history == HistoryPolicy::Full).then(|| vec![params.clone()]);
    let mut eval = engine.evaluate(&params, energy, Some(config.metric))?;
    let mut curve = vec![eval.loss];
    let mut iters = 0;
    let mut fallback_steps = 0;
    let termination = loop {
        let gmax = eval.grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if config.grad_tol.is_some_and(|tol| gmax < tol) {
            break Termination::GradTol;
        }
        if iters == config.max_iters {
            break Termination::MaxIters;
        }
        let out = step(&params, &eval.grad, eval.metric.as_ref().expect("metric requested"), config)?;
        fallback_steps += usize::from(out.fallback);
        params = out.params;
        iters += 1;
        if let Some(h) = history.as_mut() {
            h.push(params.clone());
        }
        if iters == config.max_iters {
            let psi = run(circuit, &params)?;
            curve.push(crate::sim::expectation(&psi, energy)?);
            break Termination::MaxIters;
        }
        eval = engine.evaluate(&params, energy, Some(config.metric))?;
        curve.push(eval.loss);
    };
    Ok(RunRecord {
        seed,
        config: *config,
        loss_curve: curve,
        initial_params: init,
        final_params: params,
        param_history: history,
        iterations_used: iters,
        termination,
        fallback_steps,
    })
}

/// Parameters whose gates all sit in blocks of the given kind.
pub fn slots_in(circuit: &CircuitIR, kind: BlockKind) -> Vec<usize> {
    let mut v: Vec<usize> = circuit
        .blocks
        .iter()
        .filter(|b| b.kind == kind)
        .flat_map(|b| circuit.gates[b.gates.clone()].iter().filter_map(|g| g.param_slot))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}
