//! Gate-level IR for multi-angle QAOA and DC-QAOA.
//!
//! Rotations follow `R_P(theta) = exp(-i theta/2 P)` and two-qubit Pauli
//! rotations `R_AB(theta) = exp(-i theta/2 A_q0 B_q1)`. A parametric gate
//! applies `theta = coeff * params[param_slot]`.

use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    RZZ,
    RZY,
    RYZ,
    RXY,
    RYX,
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            _ => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        self != GateKind::H
    }

    /// Pauli factors of the rotation generator, `None` for H.
    pub fn generator(self) -> Option<(Pauli, Pauli)> {
        use Pauli::*;
        Some(match self {
            GateKind::H => return None,
            GateKind::RX => (X, I),
            GateKind::RY => (Y, I),
            GateKind::RZ => (Z, I),
            GateKind::RZZ => (Z, Z),
            GateKind::RZY => (Z, Y),
            GateKind::RYZ => (Y, Z),
            GateKind::RXY => (X, Y),
            GateKind::RYX => (Y, X),
        })
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::RZ | GateKind::RZZ)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub param_slot: Option<usize>,
    #[serde(default = "unit")]
    pub coeff: f64,
}

fn unit() -> f64 {
    1.0
}

impl GateOp {
    pub fn h(q: usize) -> Self {
        GateOp {
            kind: GateKind::H,
            qubits: vec![q],
            param_slot: None,
            coeff: 1.0,
        }
    }

    pub fn rot(kind: GateKind, qubits: &[usize], slot: usize, coeff: f64) -> Self {
        GateOp {
            kind,
            qubits: qubits.to_vec(),
            param_slot: Some(slot),
            coeff,
        }
    }

    pub fn angle(&self, params: &[f64]) -> f64 {
        self.param_slot.map_or(0.0, |s| self.coeff * params[s])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "qaoa")]
    Qaoa,
    #[serde(rename = "dcqaoa")]
    DcQaoa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Prep,
    Cost,
    Mixer,
    Cd,
}

/// A contiguous run of gates belonging to one unitary factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub layer: usize,
    pub gates: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
    pub n_params: usize,
    /// Start index of each layer (layer 0 is state preparation), then `gates.len()`.
    pub layer_marks: Vec<usize>,
    pub blocks: Vec<Block>,
    pub flavor: Flavor,
    pub multi_angle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CdTerm {
    Y,
    ZY,
    YZ,
    XY,
    YX,
}

impl CdTerm {
    fn gate(self) -> GateKind {
        match self {
            CdTerm::Y => GateKind::RY,
            CdTerm::ZY => GateKind::RZY,
            CdTerm::YZ => GateKind::RYZ,
            CdTerm::XY => GateKind::RXY,
            CdTerm::YX => GateKind::RYX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdPool(Vec<CdTerm>);

impl CdPool {
    pub fn new(terms: &[CdTerm]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("counterdiabatic pool is empty".into()));
        }
        let mut v: Vec<CdTerm> = Vec::new();
        for &t in terms {
            if !v.contains(&t) {
                v.push(t);
            }
        }
        Ok(CdPool(v))
    }

    pub fn y() -> Self {
        CdPool(vec![CdTerm::Y])
    }

    pub fn terms(&self) -> &[CdTerm] {
        &self.0
    }
}

/// Which field families a spin Hamiltonian carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldForm {
    pub longitudinal: bool,
    pub transverse: bool,
}

impl FieldForm {
    /// Diagonal Hamiltonians carry no transverse field.
    pub fn of(h: &IsingHamiltonian) -> Self {
        FieldForm {
            longitudinal: h.linear.iter().any(|&v| v != 0.0),
            transverse: false,
        }
    }
}

pub fn select_cd_term(form: FieldForm) -> Result<CdPool> {
    match (form.longitudinal, form.transverse) {
        (true, false) => Ok(CdPool::y()),
        (false, true) => CdPool::new(&[CdTerm::ZY, CdTerm::YZ]),
        (true, true) => {
            log::warn!("mixed longitudinal and transverse fields; using the single-body Y pool");
            Ok(CdPool::y())
        }
        (false, false) => Err(Error::InvalidArgument(
            "no longitudinal or transverse field to select a counterdiabatic term from".into(),
        )),
    }
}

struct Builder {
    gates: Vec<GateOp>,
    blocks: Vec<Block>,
    layer_marks: Vec<usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            gates: Vec::new(),
            blocks: Vec::new(),
            layer_marks: Vec::new(),
        }
    }

    fn block(&mut self, kind: BlockKind, layer: usize, gates: impl IntoIterator<Item = GateOp>) {
        let start = self.gates.len();
        self.gates.extend(gates);
        self.blocks.push(Block {
            kind,
            layer,
            gates: start..self.gates.len(),
        });
    }
}

fn next(count: &mut usize) -> usize {
    let s = *count;
    *count += 1;
    s
}

fn check_layers(h: &IsingHamiltonian, p: usize) -> Result<()> {
    if p < 1 {
        return Err(Error::InvalidArgument("circuits need at least one layer".into()));
    }
    if h.n_qubits == 0 {
        return Err(Error::InvalidArgument("circuits need at least one qubit".into()));
    }
    Ok(())
}

pub fn build_qaoa(h: &IsingHamiltonian, p: usize, multi_angle: bool) -> Result<CircuitIR> {
    build(h, p, multi_angle, None)
}

pub fn build_dcqaoa(h: &IsingHamiltonian, p: usize, pool: &CdPool, multi_angle: bool) -> Result<CircuitIR> {
    build(h, p, multi_angle, Some(pool))
}

fn build(h: &IsingHamiltonian, p: usize, multi_angle: bool, pool: Option<&CdPool>) -> Result<CircuitIR> {
    check_layers(h, p)?;
    let n = h.n_qubits;
    let mut b = Builder::new();
    b.layer_marks.push(0);
    b.block(BlockKind::Prep, 0, (0..n).map(GateOp::h));

    let mut slot = 0usize;
    let qaoa_per_layer = if multi_angle { h.couplings.len() + 2 * n } else { 2 };
    let n_qaoa = p * qaoa_per_layer;
    let mut cd_slot = n_qaoa;

    for layer in 1..=p {
        b.layer_marks.push(b.gates.len());
        let mut cost = Vec::with_capacity(h.couplings.len() + n);
        let gamma = if multi_angle { 0 } else { next(&mut slot) };
        for &(i, j, c) in &h.couplings {
            cost.push(if multi_angle {
                GateOp::rot(GateKind::RZZ, &[i, j], next(&mut slot), 1.0)
            } else {
                GateOp::rot(GateKind::RZZ, &[i, j], gamma, 2.0 * c)
            });
        }
        for (q, &hq) in h.linear.iter().enumerate() {
            cost.push(if multi_angle {
                GateOp::rot(GateKind::RZ, &[q], next(&mut slot), 1.0)
            } else {
                GateOp::rot(GateKind::RZ, &[q], gamma, 2.0 * hq)
            });
        }
        b.block(BlockKind::Cost, layer, cost);

        let beta = if multi_angle { 0 } else { next(&mut slot) };
        let mixer: Vec<GateOp> = (0..n)
            .map(|q| GateOp::rot(GateKind::RX, &[q], if multi_angle { next(&mut slot) } else { beta }, if multi_angle { 1.0 } else { 2.0 }))
            .collect();
        b.block(BlockKind::Mixer, layer, mixer);

        if let Some(pool) = pool {
            let alpha = if multi_angle { 0 } else { next(&mut cd_slot) };
            let coeff = if multi_angle { 1.0 } else { 2.0 };
            let pick = |c: &mut usize| if multi_angle { next(c) } else { alpha };
            let mut cd = Vec::new();
            for &term in pool.terms().iter().filter(|&&t| t != CdTerm::Y) {
                for &(i, j, _) in &h.couplings {
                    cd.push(GateOp::rot(term.gate(), &[i, j], pick(&mut cd_slot), coeff));
                }
            }
            if pool.terms().contains(&CdTerm::Y) {
                for q in 0..n {
                    cd.push(GateOp::rot(GateKind::RY, &[q], pick(&mut cd_slot), coeff));
                }
            }
            b.block(BlockKind::Cd, layer, cd);
        }
    }
    debug_assert_eq!(slot, n_qaoa);
    b.layer_marks.push(b.gates.len());
    Ok(CircuitIR {
        n_qubits: n,
        gates: b.gates,
        n_params: if pool.is_some() { cd_slot } else { n_qaoa },
        layer_marks: b.layer_marks,
        blocks: b.blocks,
        flavor: if pool.is_some() { Flavor::DcQaoa } else { Flavor::Qaoa },
        multi_angle,
    })
}

/// `p (|E'| + 2n)` for multi-angle QAOA, `2p` shared.
pub fn qaoa_param_count(n: usize, n_couplings: usize, p: usize, multi_angle: bool) -> usize {
    if multi_angle {
        p * (n_couplings + 2 * n)
    } else {
        2 * p
    }
}

/// Returns (single-qubit, two-qubit) gate counts, H included.
pub fn gate_counts(c: &CircuitIR) -> (usize, usize) {
    let two = c.gates.iter().filter(|g| g.kind.arity() == 2).count();
    (c.gates.len() - two, two)
}

impl CircuitIR {
    /// An IR from an explicit gate list, as one block per layer-free segment.
    pub fn from_gates(n_qubits: usize, gates: Vec<GateOp>, flavor: Flavor) -> Result<Self> {
        let mut n_params = 0;
        for g in &gates {
            if g.qubits.len() != g.kind.arity() {
                return Err(Error::InvalidArgument(format!("{:?} takes {} qubits", g.kind, g.kind.arity())));
            }
            if g.qubits.iter().any(|&q| q >= n_qubits) {
                return Err(Error::InvalidArgument(format!("{:?} on {:?} is out of range", g.kind, g.qubits)));
            }
            if g.kind.arity() == 2 && g.qubits[0] == g.qubits[1] {
                return Err(Error::InvalidArgument(format!("{:?} needs two distinct qubits", g.kind)));
            }
            if g.kind.is_parametric() != g.param_slot.is_some() {
                return Err(Error::InvalidArgument(format!("{:?} parameter slot mismatch", g.kind)));
            }
            if let Some(s) = g.param_slot {
                n_params = n_params.max(s + 1);
            }
        }
        let len = gates.len();
        Ok(CircuitIR {
            n_qubits,
            gates,
            n_params,
            layer_marks: vec![0, len],
            blocks: vec![Block {
                kind: BlockKind::Cost,
                layer: 0,
                gates: 0..len,
            }],
            flavor,
            multi_angle: true,
        })
    }

    pub fn layers(&self) -> usize {
        self.layer_marks.len().saturating_sub(2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One gate per line: `RZZ 0 3 slot=12 coeff=1`.
    pub fn text_dump(&self) -> String {
        let mut out = String::new();
        let mut marks = self.layer_marks.iter().peekable();
        let mut layer = 0;
        for (k, g) in self.gates.iter().enumerate() {
            while marks.peek().is_some_and(|&&m| m == k) {
                marks.next();
                let _ = writeln!(out, "# layer {layer}");
                layer += 1;
            }
            let qs: Vec<String> = g.qubits.iter().map(|q| q.to_string()).collect();
            let _ = write!(out, "{:?} {}", g.kind, qs.join(" "));
            if let Some(s) = g.param_slot {
                let _ = write!(out, " slot={s} coeff={}", g.coeff);
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ham(n: usize, couplings: &[(usize, usize)]) -> IsingHamiltonian {
        IsingHamiltonian::new(
            (0..n).map(|i| 0.1 * (i + 1) as f64).collect(),
            couplings.iter().map(|&(i, j)| (i, j, 1.5)).collect(),
            0.0,
            6.0,
        )
        .unwrap()
    }

    fn ten_pairs() -> Vec<(usize, usize)> {
        vec![(0, 1), (0, 2), (1, 3), (2, 5), (3, 4), (3, 7), (4, 6), (5, 6), (5, 7), (6, 7)]
    }

    #[test]
    fn eight_qubit_gate_budgets() {
        let h = ham(8, &ten_pairs());
        let dc = build_dcqaoa(&h, 8, &CdPool::y(), true).unwrap();
        assert_eq!(gate_counts(&dc), (200, 80));
        let qa = build_qaoa(&h, 24, true).unwrap();
        assert_eq!(gate_counts(&qa), (392, 240));
    }

    #[test]
    fn complete_graph_has_no_rzz() {
        let c = build_qaoa(&ham(4, &[]), 1, true).unwrap();
        assert!(c.gates.iter().all(|g| g.kind != GateKind::RZZ));
        assert_eq!(gate_counts(&c), (12, 0));
    }

    #[test]
    fn smallest_dc_circuit() {
        let c = build_dcqaoa(&ham(2, &[(0, 1)]), 1, &CdPool::y(), true).unwrap();
        let kinds: Vec<GateKind> = c.gates.iter().map(|g| g.kind).collect();
        use GateKind::*;
        assert_eq!(kinds, vec![H, H, RZZ, RZ, RZ, RX, RX, RY, RY]);
        let slots: Vec<Option<usize>> = c.gates.iter().map(|g| g.param_slot).collect();
        assert_eq!(slots, vec![None, None, Some(0), Some(1), Some(2), Some(3), Some(4), Some(5), Some(6)]);
        assert_eq!(c.layer_marks, vec![0, 2, 9]);
    }

    #[test]
    fn shared_angle_coefficients() {
        let h = ham(2, &[(0, 1)]);
        let c = build_dcqaoa(&h, 2, &CdPool::y(), false).unwrap();
        assert_eq!(c.n_params, 6);
        let g = &c.gates[2];
        assert_eq!((g.kind, g.param_slot, g.coeff), (GateKind::RZZ, Some(0), 3.0));
        let rz = &c.gates[4];
        assert_eq!((rz.kind, rz.param_slot), (GateKind::RZ, Some(0)));
        assert!((rz.coeff - 0.4).abs() < 1e-15);
        assert_eq!(c.gates[5].param_slot, Some(1));
        assert_eq!(c.gates[5].coeff, 2.0);
        assert_eq!(c.gates[7].param_slot, Some(4));
        assert_eq!(c.gates.last().unwrap().param_slot, Some(5));
    }

    #[test]
    fn zero_layers_rejected() {
        assert!(build_qaoa(&ham(2, &[]), 0, true).is_err());
        assert!(CdPool::new(&[]).is_err());
    }

    #[test]
    fn cd_selection() {
        let lf = FieldForm { longitudinal: true, transverse: false };
        assert_eq!(select_cd_term(lf).unwrap(), CdPool::y());
        let tf = FieldForm { longitudinal: false, transverse: true };
        assert_eq!(select_cd_term(tf).unwrap().terms(), &[CdTerm::ZY, CdTerm::YZ]);
        let mixed = FieldForm { longitudinal: true, transverse: true };
        assert_eq!(select_cd_term(mixed).unwrap(), CdPool::y());
        assert!(select_cd_term(FieldForm { longitudinal: false, transverse: false }).is_err());
        assert_eq!(FieldForm::of(&ham(3, &[(0, 1)])), lf);
    }

    #[test]
    fn two_body_pool_uses_coupling_pairs() {
        let h = ham(3, &[(0, 2)]);
        let pool = CdPool::new(&[CdTerm::ZY, CdTerm::Y, CdTerm::YX]).unwrap();
        let c = build_dcqaoa(&h, 1, &pool, true).unwrap();
        let cd: Vec<GateKind> = c.gates[c.blocks.last().unwrap().gates.clone()].iter().map(|g| g.kind).collect();
        use GateKind::*;
        assert_eq!(cd, vec![RZY, RYX, RY, RY, RY]);
        assert_eq!(gate_counts(&c), (3 + 6 + 3, 1 + 2));
    }

    #[test]
    fn json_and_text() {
        let c = build_dcqaoa(&ham(2, &[(0, 1)]), 1, &CdPool::y(), true).unwrap();
        assert_eq!(CircuitIR::from_json(&c.to_json()).unwrap(), c);
        let text = c.text_dump();
        assert!(text.starts_with("# layer 0\nH 0\nH 1\n# layer 1\nRZZ 0 1 slot=0 coeff=1\n"));
    }

    #[test]
    fn from_gates_validation() {
        assert!(CircuitIR::from_gates(2, vec![GateOp::rot(GateKind::RZZ, &[0, 0], 0, 1.0)], Flavor::Qaoa).is_err());
        assert!(CircuitIR::from_gates(2, vec![GateOp::rot(GateKind::RX, &[2], 0, 1.0)], Flavor::Qaoa).is_err());
        let c = CircuitIR::from_gates(2, vec![GateOp::h(0), GateOp::rot(GateKind::RX, &[1], 3, 1.0)], Flavor::Qaoa).unwrap();
        assert_eq!(c.n_params, 4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = (IsingHamiltonian, usize)> {
            (1usize..7, 1usize..5).prop_flat_map(|(n, p)| {
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
                let len = pairs.len();
                prop::collection::vec(any::<bool>(), len).prop_map(move |mask| {
                    let chosen: Vec<_> = pairs.iter().zip(&mask).filter(|(_, m)| **m).map(|(e, _)| *e).collect();
                    (ham(n, &chosen), p)
                })
            })
        }

        proptest! {
            #[test]
            fn structural_counts((h, p) in instance(), multi in any::<bool>()) {
                let n = h.n_qubits;
                let e = h.couplings.len();
                let q = build_qaoa(&h, p, multi).unwrap();
                prop_assert_eq!(gate_counts(&q), (n + 2 * p * n, p * e));
                prop_assert_eq!(q.n_params, qaoa_param_count(n, e, p, multi));
                let d = build_dcqaoa(&h, p, &CdPool::y(), multi).unwrap();
                prop_assert_eq!(gate_counts(&d), (n + 3 * p * n, p * e));
                prop_assert_eq!(d.n_params, q.n_params + if multi { p * n } else { p });
                if multi {
                    for c in [&q, &d] {
                        let mut slots: Vec<usize> = c.gates.iter().filter_map(|g| g.param_slot).collect();
                        slots.sort();
                        prop_assert_eq!(slots, (0..c.n_params).collect::<Vec<_>>());
                    }
                }
            }

            #[test]
            fn dropping_cd_gates_gives_qaoa((h, p) in instance(), multi in any::<bool>()) {
                let q = build_qaoa(&h, p, multi).unwrap();
                let d = build_dcqaoa(&h, p, &CdPool::y(), multi).unwrap();
                let stripped: Vec<&GateOp> = d.gates.iter().filter(|g| g.kind != GateKind::RY).collect();
                prop_assert_eq!(stripped.len(), q.gates.len());
                for (a, b) in stripped.iter().zip(&q.gates) {
                    prop_assert_eq!(*a, b);
                }
                prop_assert_eq!(d.layer_marks.len(), p + 2);
                for l in 1..=p {
                    let end = d.layer_marks[l + 1];
                    let n = h.n_qubits;
                    prop_assert!(d.gates[end - n..end].iter().all(|g| g.kind == GateKind::RY));
                }
                prop_assert_eq!(*d.layer_marks.last().unwrap(), d.gates.len());
            }
        }
    }
}
