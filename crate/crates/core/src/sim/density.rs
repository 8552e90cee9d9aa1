//! Dense density-matrix simulation with exact depolarizing channels.
//! Reference for the trajectory sampler; small qubit counts only.

use num_complex::Complex64 as C64;

use super::check_params;
use super::kernels::{apply_gate_raw, PauliString};
use super::noise::{prep_mask, NoiseModel, PAULIS};
use crate::circuit::CircuitIR;
use crate::error::{Error, Result};

pub const DENSITY_QUBIT_CAP: usize = 6;

/// `rho[r | c << n]` holds `<r|rho|c>`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub rho: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > DENSITY_QUBIT_CAP {
            return Err(Error::ResourceCap {
                what: "density matrix qubits",
                requested: n,
                cap: DENSITY_QUBIT_CAP,
                hint: "; use noise trajectories instead",
            });
        }
        let mut rho = vec![C64::new(0.0, 0.0); 1 << (2 * n)];
        rho[0] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits: n, rho })
    }

    pub fn population(&self, z: usize) -> f64 {
        self.rho[z | z << self.n_qubits].re
    }

    pub fn trace(&self) -> f64 {
        (0..1usize << self.n_qubits).map(|z| self.population(z)).sum()
    }

    fn conjugate_by(&self, p: PauliString) -> Vec<C64> {
        let mut out = self.rho.clone();
        p.apply(&mut out);
        p.conj().shifted(self.n_qubits).apply(&mut out);
        out
    }

    fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let strings: Vec<PauliString> = if qubits.len() == 1 {
            PAULIS[1..].iter().map(|&a| PauliString::new(&[(qubits[0], a)])).collect()
        } else {
            (1..16)
                .map(|k| PauliString::new(&[(qubits[0], PAULIS[k % 4]), (qubits[1], PAULIS[k / 4])]))
                .collect()
        };
        let w = p / strings.len() as f64;
        let mut acc: Vec<C64> = self.rho.iter().map(|x| x * (1.0 - p)).collect();
        for s in strings {
            for (a, b) in acc.iter_mut().zip(self.conjugate_by(s)) {
                *a += b * w;
            }
        }
        self.rho = acc;
    }
}

pub fn run_density(circuit: &CircuitIR, params: &[f64], noise: &NoiseModel) -> Result<DensityMatrix> {
    check_params(circuit, params)?;
    let mut dm = DensityMatrix::zero(circuit.n_qubits)?;
    let n = circuit.n_qubits;
    let prep = prep_mask(circuit);
    for (k, g) in circuit.gates.iter().enumerate() {
        let theta = g.angle(params);
        apply_gate_raw(&mut dm.rho, g.kind, &g.qubits, theta, 0, false);
        apply_gate_raw(&mut dm.rho, g.kind, &g.qubits, theta, n, true);
        if noise.skip_prep && prep[k] {
            continue;
        }
        let p = if g.qubits.len() == 1 { noise.p1 } else { noise.p2 };
        dm.depolarize(&g.qubits, p);
    }
    Ok(dm)
}
