//! Diagonal Ising cost Hamiltonian for the weighted max-clique BQP.
//!
//! Conventions: bit 1 selects a vertex and corresponds to Z eigenvalue -1,
//! so `s_i = 1 - 2 x_i`. Qubit 0 is the least significant bit of a basis
//! index. For every basis state `E(z) = -objective(z) + c`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ligraph::BindingInteractionGraph;

pub const ENERGY_VECTOR_CAP: usize = 20;

/// Vertex selection, `bits[i]` is `x_i`. Printed in vertex order, `x_0` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(pub Vec<bool>);

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Bitstring((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn from_vertices(n: usize, vertices: &[usize]) -> Self {
        let mut b = Self::zeros(n);
        for &v in vertices {
            b.0[v] = true;
        }
        b
    }

    pub fn index(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn selected(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("bitstring {s:?} contains {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

/// `sum w_i x_i - P * sum over non-adjacent pairs x_i x_j`.
pub fn objective_of(big: &BindingInteractionGraph, z: &Bitstring, penalty: f64) -> Result<f64> {
    if z.len() != big.len() {
        return Err(Error::DimensionMismatch {
            expected: big.len(),
            found: z.len(),
        });
    }
    let sel = z.selected();
    let mut value: f64 = sel.iter().map(|&i| big.weights()[i]).sum();
    for (k, &i) in sel.iter().enumerate() {
        for &j in &sel[k + 1..] {
            if !big.is_edge(i, j) {
                value -= penalty;
            }
        }
    }
    Ok(value)
}

#[derive(Debug, Clone)]
pub struct IsingHamiltonian {
    pub n_qubits: usize,
    pub linear: Vec<f64>,
    /// `(i, j, J_ij)` with `i < j`, each pair once.
    pub couplings: Vec<(usize, usize, f64)>,
    pub constant: f64,
    pub penalty: f64,
    /// Factor the coefficients were divided by; 1 when not normalized.
    pub scale: f64,
    pub source: Option<Arc<BindingInteractionGraph>>,
}

pub fn encode(big: &BindingInteractionGraph, penalty: f64) -> Result<IsingHamiltonian> {
    if !(penalty > 0.0) || !penalty.is_finite() {
        return Err(Error::InvalidArgument(format!("penalty must be positive, got {penalty}")));
    }
    let n = big.len();
    let quarter = penalty / 4.0;
    let complement = big.complement_edges();
    let mut linear: Vec<f64> = big.weights().iter().map(|w| w / 2.0).collect();
    for &(i, j) in &complement {
        linear[i] -= quarter;
        linear[j] -= quarter;
    }
    let constant = -big.weights().iter().sum::<f64>() / 2.0 + quarter * complement.len() as f64;
    Ok(IsingHamiltonian {
        n_qubits: n,
        linear,
        couplings: complement.into_iter().map(|(i, j)| (i, j, quarter)).collect(),
        constant,
        penalty,
        scale: 1.0,
        source: Some(Arc::new(big.clone())),
    })
}

#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    linear: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
    constant: f64,
    penalty: f64,
    #[serde(default = "one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

impl IsingHamiltonian {
    /// A Hamiltonian not tied to a graph.
    pub fn new(linear: Vec<f64>, couplings: Vec<(usize, usize, f64)>, constant: f64, penalty: f64) -> Result<Self> {
        let n = linear.len();
        if n == 0 {
            return Err(Error::InvalidArgument("Hamiltonian needs at least one qubit".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j, _) in &couplings {
            if i >= j || j >= n {
                return Err(Error::InvalidArgument(format!("coupling ({i},{j}) must satisfy i < j < {n}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidArgument(format!("coupling ({i},{j}) listed twice")));
            }
        }
        Ok(Self {
            n_qubits: n,
            linear,
            couplings,
            constant,
            penalty,
            scale: 1.0,
            source: None,
        })
    }

    /// Divide every coefficient by the largest |h_i| or |J_ij|.
    pub fn normalized(&self) -> Self {
        let max = self
            .linear
            .iter()
            .chain(self.couplings.iter().map(|c| &c.2))
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return self.clone();
        }
        Self {
            linear: self.linear.iter().map(|h| h / max).collect(),
            couplings: self.couplings.iter().map(|&(i, j, c)| (i, j, c / max)).collect(),
            constant: self.constant / max,
            scale: self.scale * max,
            ..self.clone()
        }
    }

    pub fn without_constant(&self) -> Self {
        Self {
            constant: 0.0,
            ..self.clone()
        }
    }

    /// Energy of basis index `z`. Works for any qubit count.
    pub fn energy_of_index(&self, z: usize) -> f64 {
        let s = |i: usize| if z >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = self.constant;
        for (i, h) in self.linear.iter().enumerate() {
            e += h * s(i);
        }
        for &(i, j, c) in &self.couplings {
            e += c * s(i) * s(j);
        }
        e
    }

    pub fn energy_of(&self, z: &Bitstring) -> Result<f64> {
        if z.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: z.len(),
            });
        }
        Ok(self.energy_of_index(z.index()))
    }

    pub fn energy_vector(&self) -> Result<Vec<f64>> {
        self.energy_vector_capped(ENERGY_VECTOR_CAP)
    }

    pub fn energy_vector_capped(&self, cap: usize) -> Result<Vec<f64>> {
        let n = self.n_qubits;
        if n > cap {
            return Err(Error::ResourceCap {
                what: "energy vector qubits",
                requested: n,
                cap,
                hint: "; evaluate energies one basis state at a time with energy_of instead",
            });
        }
        let dim = 1usize << n;
        let mut e = vec![self.constant; dim];
        for (i, &h) in self.linear.iter().enumerate() {
            if h == 0.0 {
                continue;
            }
            for (z, v) in e.iter_mut().enumerate() {
                *v += if z >> i & 1 == 1 { -h } else { h };
            }
        }
        for &(i, j, c) in &self.couplings {
            for (z, v) in e.iter_mut().enumerate() {
                *v += if (z >> i ^ z >> j) & 1 == 1 { -c } else { c };
            }
        }
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        let doc = HamiltonianJson {
            n: self.n_qubits,
            linear: self.linear.clone(),
            couplings: self.couplings.clone(),
            constant: self.constant,
            penalty: self.penalty,
            scale: self.scale,
        };
        serde_json::to_string_pretty(&doc).expect("Hamiltonian serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HamiltonianJson = serde_json::from_str(text)?;
        if doc.linear.len() != doc.n {
            return Err(Error::DimensionMismatch {
                expected: doc.n,
                found: doc.linear.len(),
            });
        }
        let mut h = Self::new(doc.linear, doc.couplings, doc.constant, doc.penalty)?;
        h.scale = doc.scale;
        Ok(h)
    }
}
