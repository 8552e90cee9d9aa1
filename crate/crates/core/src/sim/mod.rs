//! Exact statevector simulation, sampling and depolarizing-noise trajectories.

pub mod density;
pub mod kernels;
pub mod noise;
pub mod soa;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::circuit::{CircuitIR, GateOp};
use crate::error::{Error, Result};
use crate::ising::Bitstring;

pub use noise::{estimate_noisy, run_noisy_trajectory, NoiseModel, NoisyEstimate};

pub const STATE_QUBIT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amps: Vec<C64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("a state needs at least one qubit".into()));
    }
    if n > STATE_QUBIT_CAP {
        return Err(Error::ResourceCap {
            what: "statevector qubits",
            requested: n,
            cap: STATE_QUBIT_CAP,
            hint: "",
        });
    }
    Ok(())
}

pub fn init_plus_state(n: usize) -> Result<Statevector> {
    check_qubits(n)?;
    let a = C64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    Ok(Statevector {
        n_qubits: n,
        amps: vec![a; 1 << n],
    })
}

impl Statevector {
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Statevector { n_qubits: n, amps })
    }

    pub fn basis(n: usize, z: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if z >= s.amps.len() {
            return Err(Error::InvalidArgument(format!("basis index {z} out of range for {n} qubits")));
        }
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[z] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total probability on the given basis indices.
    pub fn overlap(&self, targets: &[usize]) -> f64 {
        targets.iter().map(|&z| self.amps[z].norm_sqr()).sum()
    }

    /// `theta` must be given exactly for parametric gates.
    pub fn apply_gate(&mut self, gate: &GateOp, theta: Option<f64>) -> Result<()> {
        if gate.qubits.len() != gate.kind.arity() || gate.qubits.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "{:?} on qubits {:?} does not fit a {}-qubit state",
                gate.kind, gate.qubits, self.n_qubits
            )));
        }
        if gate.kind.arity() == 2 && gate.qubits[0] == gate.qubits[1] {
            return Err(Error::InvalidArgument(format!("{:?} needs two distinct qubits", gate.kind)));
        }
        let theta = match (gate.kind.is_parametric(), theta) {
            (true, Some(t)) => t,
            (false, None) => 0.0,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "{:?} angle must be given iff the gate is parametric",
                    gate.kind
                )))
            }
        };
        kernels::apply_gate_raw(&mut self.amps, gate.kind, &gate.qubits, theta, 0, false);
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &GateOp, params: &[f64]) {
        kernels::apply_gate_raw(&mut self.amps, gate.kind, &gate.qubits, gate.angle(params), 0, false);
    }
}

pub(crate) fn check_params(circuit: &CircuitIR, params: &[f64]) -> Result<()> {
    if params.len() != circuit.n_params {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_params,
            found: params.len(),
        });
    }
    Ok(())
}

/// Runs every gate in order from `|0...0>`.
pub fn run(circuit: &CircuitIR, params: &[f64]) -> Result<Statevector> {
    check_params(circuit, params)?;
    let mut s = Statevector::zero(circuit.n_qubits)?;
    for g in &circuit.gates {
        s.apply_unchecked(g, params);
    }
    Ok(s)
}

pub fn expectation(state: &Statevector, energy: &[f64]) -> Result<f64> {
    if energy.len() != state.amps.len() {
        return Err(Error::DimensionMismatch {
            expected: state.amps.len(),
            found: energy.len(),
        });
    }
    Ok(state.amps.iter().zip(energy).map(|(a, e)| a.norm_sqr() * e).sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub n_qubits: usize,
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl ShotCounts {
    /// Most frequent outcome; ties go to the smaller basis index.
    pub fn modal(&self) -> Option<usize> {
        self.counts
            .iter()
            .fold(None, |best: Option<(usize, u64)>, (&z, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((z, c)),
            })
            .map(|(z, _)| z)
    }

    /// Every outcome sharing the top count, ascending.
    pub fn modal_set(&self) -> Vec<usize> {
        let top = self.counts.values().copied().max().unwrap_or(0);
        self.counts.iter().filter(|(_, &c)| c == top && c > 0).map(|(&z, _)| z).collect()
    }

    pub fn frequency(&self, z: usize) -> f64 {
        self.counts.get(&z).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn bitstring(&self, z: usize) -> Bitstring {
        Bitstring::from_index(z, self.n_qubits)
    }
}

/// Draws `shots` basis outcomes from `|a_z|^2`.
pub fn sample<R: Rng + ?Sized>(state: &Statevector, shots: u64, rng: &mut R) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut cdf = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let z = cdf.partition_point(|&c| c <= u).min(last);
        *counts.entry(z).or_insert(0) += 1;
    }
    Ok(ShotCounts {
        n_qubits: state.n_qubits,
        counts,
        total: shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dcqaoa, build_qaoa, CdPool, Flavor, GateKind};
    use crate::ising::IsingHamiltonian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn ham(n: usize, couplings: &[(usize, usize)]) -> IsingHamiltonian {
        IsingHamiltonian::new(
            (0..n).map(|i| 0.3 - 0.1 * i as f64).collect(),
            couplings.iter().map(|&(i, j)| (i, j, 0.75)).collect(),
            0.0,
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn plus_states() {
        let s = init_plus_state(2).unwrap();
        assert!(s.amps.iter().all(|a| (a - C64::new(0.5, 0.0)).norm() < 1e-15));
        let s = init_plus_state(1).unwrap();
        assert!((s.amps[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((init_plus_state(7).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(init_plus_state(21).unwrap_err().exit_code(), 4);
        assert!(init_plus_state(0).is_err());
    }

    #[test]
    fn identity_and_flip_rotations() {
        let mut s = init_plus_state(3).unwrap();
        let before = s.clone();
        s.apply_gate(&GateOp::rot(GateKind::RX, &[1], 0, 1.0), Some(0.0)).unwrap();
        assert!(close(&s.amps, &before.amps, 1e-15));

        let mut s = Statevector::zero(1).unwrap();
        s.apply_gate(&GateOp::rot(GateKind::RY, &[0], 0, 1.0), Some(std::f64::consts::PI)).unwrap();
        assert!((s.amps[1].norm() - 1.0).abs() < 1e-15);
        assert!(s.amps[0].norm() < 1e-15);
    }

    #[test]
    fn rzz_phase_on_basis_states() {
        let theta = 0.6;
        for z in 0..4 {
            let mut s = Statevector::basis(2, z).unwrap();
            s.apply_gate(&GateOp::rot(GateKind::RZZ, &[0, 1], 0, 1.0), Some(theta)).unwrap();
            let sign = if z == 0 || z == 3 { -1.0 } else { 1.0 };
            assert!((s.amps[z] - C64::from_polar(1.0, sign * theta / 2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_gate_errors() {
        let mut s = Statevector::zero(2).unwrap();
        assert!(s.apply_gate(&GateOp::rot(GateKind::RX, &[2], 0, 1.0), Some(0.1)).is_err());
        assert!(s.apply_gate(&GateOp::rot(GateKind::RX, &[0], 0, 1.0), None).is_err());
        assert!(s.apply_gate(&GateOp::h(0), Some(0.1)).is_err());
        assert!(s.apply_gate(&GateOp::h(0), None).is_ok());
    }

    #[test]
    fn zero_params_give_uniform_superposition() {
        let c = build_qaoa(&ham(4, &[(0, 1), (2, 3)]), 2, true).unwrap();
        let s = run(&c, &vec![0.0; c.n_params]).unwrap();
        assert!(close(&s.amps, &init_plus_state(4).unwrap().amps, 1e-14));
        assert!(run(&c, &[0.0]).is_err());
    }

    #[test]
    fn one_qubit_circuit_against_matrix_product() {
        let (t, f) = (0.4, 1.1);
        let c = CircuitIR::from_gates(
            1,
            vec![GateOp::h(0), GateOp::rot(GateKind::RZ, &[0], 0, 1.0), GateOp::rot(GateKind::RX, &[0], 1, 1.0)],
            Flavor::Qaoa,
        )
        .unwrap();
        let s = run(&c, &[t, f]).unwrap();
        let m = kernels::mul2(
            &kernels::matrix_1q(GateKind::RX, f),
            &kernels::mul2(&kernels::matrix_1q(GateKind::RZ, t), &kernels::matrix_1q(GateKind::H, 0.0)),
        );
        assert!(close(&s.amps, &[m[0][0], m[1][0]], 1e-15));
    }

    #[test]
    fn twelve_qubit_norm() {
        let couplings: Vec<(usize, usize)> = (0..11).map(|i| (i, i + 1)).chain([(0, 11), (2, 7)]).collect();
        let c = build_dcqaoa(&ham(12, &couplings), 13, &CdPool::y(), true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params: Vec<f64> = (0..c.n_params).map(|_| rng.random::<f64>()).collect();
        let s = run(&c, &params).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expectation_examples() {
        let e = vec![1.0, -2.0, 0.5, 3.0];
        let s = Statevector::basis(2, 2).unwrap();
        assert_eq!(expectation(&s, &e).unwrap(), 0.5);
        let u = init_plus_state(2).unwrap();
        assert!((expectation(&u, &e).unwrap() - 0.625).abs() < 1e-15);
        assert!(expectation(&u, &[1.0]).is_err());
    }

    #[test]
    fn expectation_matches_dense_form() {
        let c = build_dcqaoa(&ham(5, &[(0, 3), (1, 2), (2, 4)]), 2, &CdPool::y(), true).unwrap();
        let params: Vec<f64> = (0..c.n_params).map(|k| (k as f64 * 0.37).sin()).collect();
        let s = run(&c, &params).unwrap();
        let e: Vec<f64> = (0..32).map(|z| (z as f64 * 0.7).cos()).collect();
        let dense: C64 = s.amps.iter().zip(&e).map(|(a, &ez)| a.conj() * ez * a).sum();
        assert!((expectation(&s, &e).unwrap() - dense.re).abs() < 1e-12);
        assert!(dense.im.abs() < 1e-15);
    }

    #[test]
    fn sampling_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Statevector::basis(3, 5).unwrap();
        let counts = sample(&s, 100, &mut rng).unwrap();
        assert_eq!(counts.counts.len(), 1);
        assert_eq!(counts.counts[&5], 100);
        assert_eq!(counts.modal(), Some(5));
        assert_eq!(counts.bitstring(5).to_string(), "101");
        assert!(sample(&s, 0, &mut rng).is_err());

        let u = init_plus_state(3).unwrap();
        let a = sample(&u, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&u, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.values().sum::<u64>(), 500);
    }

    #[test]
    fn uniform_frequencies_within_four_sigma() {
        let u = init_plus_state(2).unwrap();
        let shots = 100_000u64;
        let counts = sample(&u, shots, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let sigma = (0.25f64 * 0.75 / shots as f64).sqrt();
        for z in 0..4 {
            assert!((counts.frequency(z) - 0.25).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn sampling_total_variation() {
        let c = build_dcqaoa(&ham(6, &[(0, 1), (2, 5), (3, 4)]), 2, &CdPool::y(), true).unwrap();
        let params: Vec<f64> = (0..c.n_params).map(|k| (k as f64 * 1.3).cos()).collect();
        let s = run(&c, &params).unwrap();
        let probs = s.probabilities();
        let mut good = 0;
        for seed in 0..100 {
            let counts = sample(&s, 5000, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let tv: f64 = probs.iter().enumerate().map(|(z, p)| (counts.frequency(z) - p).abs()).sum::<f64>() / 2.0;
            if tv < 0.05 {
                good += 1;
            }
        }
        assert!(good >= 99, "{good}");
    }

    #[test]
    fn cost_block_order_is_irrelevant() {
        let h = ham(4, &[(0, 2), (1, 3), (0, 3)]);
        let c = build_qaoa(&h, 1, true).unwrap();
        let params: Vec<f64> = (0..c.n_params).map(|k| 0.2 + 0.1 * k as f64).collect();
        let mut gates = c.gates.clone();
        let cost = c.blocks[1].gates.clone();
        gates[cost].reverse();
        let shuffled = CircuitIR { gates, ..c.clone() };
        let a = run(&c, &params).unwrap();
        let b = run(&shuffled, &params).unwrap();
        assert!(close(&a.amps, &b.amps, 1e-10));
    }

    #[test]
    fn zero_cd_angles_reduce_to_qaoa() {
        let h = ham(4, &[(0, 2), (1, 3)]);
        let q = build_qaoa(&h, 3, true).unwrap();
        let d = build_dcqaoa(&h, 3, &CdPool::y(), true).unwrap();
        let mut params: Vec<f64> = (0..d.n_params).map(|k| (k as f64).sin()).collect();
        params[q.n_params..].iter_mut().for_each(|p| *p = 0.0);
        let a = run(&q, &params[..q.n_params]).unwrap();
        let b = run(&d, &params).unwrap();
        assert!(close(&a.amps, &b.amps, 1e-12));
    }
}
