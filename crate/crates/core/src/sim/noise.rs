//! Depolarizing noise as stochastic Pauli trajectories.

use rand::Rng;

use super::kernels::PauliString;
use super::{check_params, sample, Statevector};
use crate::circuit::{BlockKind, CircuitIR, Pauli};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    /// Leave the state-preparation gates noiseless.
    #[serde(default)]
    pub skip_prep: bool,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("noise probability {p} outside [0, 1]")));
            }
        }
        Ok(NoiseModel {
            p1,
            p2,
            skip_prep: false,
        })
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

pub(crate) const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

pub(crate) fn prep_mask(circuit: &CircuitIR) -> Vec<bool> {
    let mut mask = vec![false; circuit.gates.len()];
    for b in circuit.blocks.iter().filter(|b| b.kind == BlockKind::Prep) {
        mask[b.gates.clone()].iter_mut().for_each(|m| *m = true);
    }
    mask
}

/// One trajectory: after each gate, with probability p1 (p2) a uniformly
/// random non-identity Pauli hits the gate's qubit (pair).
pub fn run_noisy_trajectory<R: Rng + ?Sized>(
    circuit: &CircuitIR,
    params: &[f64],
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Statevector> {
    check_params(circuit, params)?;
    let prep = prep_mask(circuit);
    let mut s = Statevector::zero(circuit.n_qubits)?;
    for (k, g) in circuit.gates.iter().enumerate() {
        s.apply_unchecked(g, params);
        if noise.skip_prep && prep[k] {
            continue;
        }
        let p = if g.qubits.len() == 1 { noise.p1 } else { noise.p2 };
        if p == 0.0 || rng.random::<f64>() >= p {
            continue;
        }
        let string = if g.qubits.len() == 1 {
            PauliString::new(&[(g.qubits[0], PAULIS[rng.random_range(1..4)])])
        } else {
            let idx = rng.random_range(1..16);
            PauliString::new(&[(g.qubits[0], PAULIS[idx % 4]), (g.qubits[1], PAULIS[idx / 4])])
        };
        string.apply(&mut s.amps);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoisyEstimate {
    pub mean_overlap: f64,
    pub overlap_stderr: f64,
    /// Fraction of trajectories whose most frequent sampled outcome is a target.
    pub mean_success_indicator: f64,
    pub success_stderr: f64,
    pub trajectories: usize,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn estimate_noisy<R: Rng + ?Sized>(
    circuit: &CircuitIR,
    params: &[f64],
    noise: &NoiseModel,
    trajectories: usize,
    shots_per: u64,
    targets: &[usize],
    rng: &mut R,
) -> Result<NoisyEstimate> {
    if trajectories == 0 {
        return Err(Error::InvalidArgument("trajectories must be at least 1".into()));
    }
    let mut overlaps = Vec::with_capacity(trajectories);
    let mut hits = Vec::with_capacity(trajectories);
    for _ in 0..trajectories {
        let s = run_noisy_trajectory(circuit, params, noise, rng)?;
        overlaps.push(s.overlap(targets));
        let counts = sample(&s, shots_per, rng)?;
        let hit = counts.modal().is_some_and(|z| targets.contains(&z));
        hits.push(if hit { 1.0 } else { 0.0 });
    }
    let (mean_overlap, overlap_stderr) = mean_stderr(&overlaps);
    let (mean_success_indicator, success_stderr) = mean_stderr(&hits);
    Ok(NoisyEstimate {
        mean_overlap,
        overlap_stderr,
        mean_success_indicator,
        success_stderr,
        trajectories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dcqaoa, CdPool, Flavor, GateKind, GateOp};
    use crate::ising::IsingHamiltonian;
    use crate::sim::density::run_density;
    use crate::sim::run;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_circuit() -> (CircuitIR, Vec<f64>) {
        let h = IsingHamiltonian::new(vec![0.4, -0.2, 0.1], vec![(0, 2, 0.5), (1, 2, 0.5)], 0.0, 2.0).unwrap();
        let c = build_dcqaoa(&h, 2, &CdPool::y(), true).unwrap();
        let params = (0..c.n_params).map(|k| 0.3 + 0.17 * k as f64).collect();
        (c, params)
    }

    #[test]
    fn probabilities_validated() {
        assert!(NoiseModel::new(-0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.5).is_err());
        assert!(NoiseModel::new(1.0, 0.0).is_ok());
    }

    #[test]
    fn zero_noise_is_bit_identical() {
        let (c, params) = small_circuit();
        let clean = run(&c, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noisy = run_noisy_trajectory(&c, &params, &NoiseModel::default(), &mut rng).unwrap();
        assert_eq!(clean, noisy);
    }

    #[test]
    fn certain_noise_picks_each_pauli_uniformly() {
        let c = CircuitIR::from_gates(1, vec![GateOp::rot(GateKind::RY, &[0], 0, 1.0)], Flavor::Qaoa).unwrap();
        let theta = 0.8;
        let noise = NoiseModel::new(1.0, 0.0).unwrap();
        let base = run(&c, &[theta]).unwrap();
        let variants: Vec<Vec<C64>> = [Pauli::X, Pauli::Y, Pauli::Z]
            .iter()
            .map(|&p| {
                let mut a = base.amps.clone();
                PauliString::new(&[(0, p)]).apply(&mut a);
                a
            })
            .collect();
        let mut hist = [0u32; 3];
        let trials = 10_000;
        for seed in 0..trials {
            let s = run_noisy_trajectory(&c, &[theta], &noise, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let k = variants
                .iter()
                .position(|v| v.iter().zip(&s.amps).all(|(a, b)| (a - b).norm() < 1e-12))
                .expect("one of the three corrupted states");
            hist[k] += 1;
        }
        let expect = trials as f64 / 3.0;
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for h in hist {
            assert!((h as f64 - expect).abs() < 4.0 * sigma, "{hist:?}");
        }
    }

    #[test]
    fn trajectories_converge_to_channel() {
        let (c, params) = small_circuit();
        let noise = NoiseModel::new(0.02, 0.04).unwrap();
        let target = 5usize;
        let exact = run_density(&c, &params, &noise).unwrap().population(target);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let est = estimate_noisy(&c, &params, &noise, 4000, 1, &[target], &mut rng).unwrap();
        assert!(
            (est.mean_overlap - exact).abs() < 4.0 * est.overlap_stderr + 1e-3,
            "{} vs {exact} (se {})",
            est.mean_overlap,
            est.overlap_stderr
        );
    }

    #[test]
    fn skip_prep_matches_channel() {
        let (c, params) = small_circuit();
        let noise = NoiseModel {
            p1: 0.05,
            p2: 0.05,
            skip_prep: true,
        };
        let exact = run_density(&c, &params, &noise).unwrap().population(2);
        let est = estimate_noisy(&c, &params, &noise, 4000, 1, &[2], &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        assert!((est.mean_overlap - exact).abs() < 4.0 * est.overlap_stderr + 1e-3);
    }

    #[test]
    fn estimate_bounds_and_noiseless_case() {
        let (c, params) = small_circuit();
        let s = run(&c, &params).unwrap();
        let modal = s.probabilities().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let est = estimate_noisy(&c, &params, &NoiseModel::default(), 1, 5000, &[modal], &mut rng).unwrap();
        assert!((est.mean_overlap - s.overlap(&[modal])).abs() < 1e-15);
        assert_eq!(est.mean_success_indicator, 1.0);
        let noisy = estimate_noisy(&c, &params, &NoiseModel::new(0.1, 0.1).unwrap(), 50, 100, &[modal], &mut rng).unwrap();
        assert!((0.0..=1.0).contains(&noisy.mean_overlap));
        assert!((0.0..=1.0).contains(&noisy.mean_success_indicator));
        assert!(estimate_noisy(&c, &params, &NoiseModel::default(), 0, 10, &[0], &mut rng).is_err());
    }

    #[test]
    fn overlap_decreases_with_noise() {
        let (c, params) = small_circuit();
        let s = run(&c, &params).unwrap();
        let modal = s.probabilities().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let mut prev: Option<NoisyEstimate> = None;
        for p in [0.0, 0.002, 0.01] {
            let noise = NoiseModel::new(p, p).unwrap();
            let est = estimate_noisy(&c, &params, &noise, 3000, 1, &[modal], &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
            if let Some(q) = prev {
                let tol = 2.0 * (q.overlap_stderr.powi(2) + est.overlap_stderr.powi(2)).sqrt();
                assert!(est.mean_overlap <= q.mean_overlap + tol);
            }
            prev = Some(est);
        }
    }
}
