//! Labeled distance graphs and the binding interaction graph (BIG).
//!
//! A BIG vertex is a (ligand point, protein point) contact. Two contacts are
//! joined when the ligand-side and protein-side distances agree to within
//! `tau + eps_a + eps_b`, i.e. when the interaction strength
//! `(tau + eps_a + eps_b) - |d_lig - d_prot|` is strictly positive.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pharmio::{distance, PharmacophoreKind, PharmacophorePoint, Role};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDistanceGraph {
    pub role: Role,
    pub points: Vec<PharmacophorePoint>,
    dist: Vec<f64>,
}

impl LabeledDistanceGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }
}

pub fn build_ldg(points: &[PharmacophorePoint]) -> Result<LabeledDistanceGraph> {
    let first = points
        .first()
        .ok_or_else(|| Error::Graph("a labeled distance graph needs at least one point".into()))?;
    if let Some(p) = points.iter().find(|p| p.role != first.role) {
        return Err(Error::Graph(format!(
            "mixed roles: {:?} is {:?} but {:?} is {:?}",
            first.label, first.role, p.label, p.role
        )));
    }
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(&points[i].position, &points[j].position);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(LabeledDistanceGraph {
        role: first.role,
        points: points.to_vec(),
        dist,
    })
}

/// Distance tolerances in Å.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub tau: f64,
    pub eps_default: f64,
    /// Used for contacts whose two kinds are both hydrogen-bond donors/acceptors.
    pub eps_hbond: f64,
}

impl InteractionParams {
    pub fn new(tau: f64, eps_default: f64, eps_hbond: f64) -> Result<Self> {
        if [tau, eps_default, eps_hbond].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "tau and interaction distances must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            tau,
            eps_default,
            eps_hbond,
        })
    }

    pub fn eps_for(&self, contact: (PharmacophoreKind, PharmacophoreKind)) -> f64 {
        if contact.0.is_hbond() && contact.1.is_hbond() {
            self.eps_hbond
        } else {
            self.eps_default
        }
    }
}

/// Named parameter presets for the three reference complexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[serde(rename = "8skh")]
    Skh8,
    #[serde(rename = "3hac")]
    Hac3,
    #[serde(rename = "5f4l")]
    F4l5,
}

impl Profile {
    pub fn params(self) -> InteractionParams {
        match self {
            Profile::Skh8 => InteractionParams {
                tau: 0.6,
                eps_default: 4.0,
                eps_hbond: 3.0,
            },
            Profile::Hac3 => InteractionParams {
                tau: 0.1,
                eps_default: 3.1,
                eps_hbond: 2.5,
            },
            Profile::F4l5 => InteractionParams {
                tau: 0.1,
                eps_default: 2.8,
                eps_hbond: 2.5,
            },
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "8skh" => Ok(Profile::Skh8),
            "3hac" => Ok(Profile::Hac3),
            "5f4l" => Ok(Profile::F4l5),
            _ => Err(Error::InvalidArgument(format!(
                "unknown profile {s:?}; expected 8skh, 3hac or 5f4l"
            ))),
        }
    }
}

/// Connectivity strength of the BIG edge between contacts `a` and `b`.
/// Each contact is given as (ligand kind, protein kind).
pub fn interaction_strength(
    params: &InteractionParams,
    a: (PharmacophoreKind, PharmacophoreKind),
    b: (PharmacophoreKind, PharmacophoreKind),
    d1: f64,
    d2: f64,
) -> f64 {
    (params.tau + params.eps_for(a) + params.eps_for(b)) - (d1 - d2).abs()
}

/// Knowledge-based pharmacophore potential, rows = ligand kind, columns =
/// protein kind, both in HD, HA, HP, AR order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialTable(pub [[f64; 4]; 4]);

impl Default for PotentialTable {
    fn default() -> Self {
        PotentialTable([
            [0.5244, 0.6686, 0.1453, 0.1091],
            [0.6686, 0.5478, 0.2317, 0.0770],
            [0.1453, 0.2317, 0.0504, 0.0795],
            [0.1091, 0.0770, 0.0795, 0.1943],
        ])
    }
}

impl PotentialTable {
    pub fn new(weights: [[f64; 4]; 4]) -> Result<Self> {
        if weights.iter().flatten().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("potential weights must be non-negative".into()));
        }
        Ok(PotentialTable(weights))
    }

    /// Every distinct value in the table, ascending.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

pub fn vertex_weight(table: &PotentialTable, ligand: PharmacophoreKind, protein: PharmacophoreKind) -> f64 {
    table.0[ligand.index()][protein.index()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactVertex {
    pub ligand_index: usize,
    pub protein_index: usize,
    pub label: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigOptions {
    /// Allow an edge between two contacts that reuse a ligand or protein point.
    pub allow_shared_points: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingInteractionGraph {
    vertices: Vec<ContactVertex>,
    adjacency: Vec<bool>,
    weights: Vec<f64>,
    ligand_size: usize,
    protein_size: usize,
}

pub fn build_big(
    ligand: &LabeledDistanceGraph,
    protein: &LabeledDistanceGraph,
    params: &InteractionParams,
    table: &PotentialTable,
    options: BigOptions,
) -> Result<BindingInteractionGraph> {
    if ligand.is_empty() || protein.is_empty() {
        return Err(Error::Graph("both distance graphs must be non-empty".into()));
    }
    let (n, m) = (ligand.len(), protein.len());
    let mut vertices = Vec::with_capacity(n * m);
    let mut weights = Vec::with_capacity(n * m);
    let mut kinds = Vec::with_capacity(n * m);
    for (li, lp) in ligand.points.iter().enumerate() {
        for (pi, pp) in protein.points.iter().enumerate() {
            vertices.push(ContactVertex {
                ligand_index: li,
                protein_index: pi,
                label: format!("{}-{}", lp.label, pp.label),
            });
            weights.push(vertex_weight(table, lp.kind, pp.kind));
            kinds.push((lp.kind, pp.kind));
        }
    }
    let size = n * m;
    let mut adjacency = vec![false; size * size];
    for u in 0..size {
        for v in (u + 1)..size {
            let (a, b) = (&vertices[u], &vertices[v]);
            let shares = a.ligand_index == b.ligand_index || a.protein_index == b.protein_index;
            if shares && !options.allow_shared_points {
                continue;
            }
            let d1 = ligand.dist(a.ligand_index, b.ligand_index);
            let d2 = protein.dist(a.protein_index, b.protein_index);
            if interaction_strength(params, kinds[u], kinds[v], d1, d2) > 0.0 {
                adjacency[u * size + v] = true;
                adjacency[v * size + u] = true;
            }
        }
    }
    Ok(BindingInteractionGraph {
        vertices,
        adjacency,
        weights,
        ligand_size: n,
        protein_size: m,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct BigJson {
    n: usize,
    m: usize,
    labels: Vec<String>,
    weights: Vec<f64>,
    edges: Vec<[usize; 2]>,
}

impl BindingInteractionGraph {
    /// A graph without pharmacophore geometry, e.g. from a synthetic generator.
    /// It is laid out as `N` ligand points against a single protein point.
    pub fn from_edges(labels: Vec<String>, weights: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        Self::from_layout(n, 1, labels, weights, edges)
    }

    fn from_layout(
        ligand_size: usize,
        protein_size: usize,
        labels: Vec<String>,
        weights: Vec<f64>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let size = labels.len();
        if size == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        if ligand_size * protein_size != size {
            return Err(Error::Graph(format!(
                "{size} labels do not match n*m = {ligand_size}*{protein_size}"
            )));
        }
        if weights.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Graph("vertex weights must be finite and non-negative".into()));
        }
        let mut adjacency = vec![false; size * size];
        for &(u, v) in edges {
            if u >= size || v >= size {
                return Err(Error::Graph(format!("edge ({u},{v}) out of range for {size} vertices")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop on vertex {u}")));
            }
            adjacency[u * size + v] = true;
            adjacency[v * size + u] = true;
        }
        let vertices = labels
            .into_iter()
            .enumerate()
            .map(|(v, label)| ContactVertex {
                ligand_index: v / protein_size,
                protein_index: v % protein_size,
                label,
            })
            .collect();
        Ok(Self {
            vertices,
            adjacency,
            weights,
            ligand_size,
            protein_size,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn ligand_size(&self) -> usize {
        self.ligand_size
    }

    pub fn protein_size(&self) -> usize {
        self.protein_size
    }

    pub fn vertices(&self) -> &[ContactVertex] {
        &self.vertices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Vec<&str> {
        self.vertices.iter().map(|v| v.label.as_str()).collect()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u * self.len() + v]
    }

    /// Edges as `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.is_edge(u, v))
            .collect()
    }

    /// Non-adjacent distinct pairs `(u, v)` with `u < v`, lexicographic.
    pub fn complement_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !self.is_edge(u, v))
            .collect()
    }

    /// Neighbour bitmasks; only meaningful for graphs of at most 64 vertices.
    pub fn neighbor_masks(&self) -> Result<Vec<u64>> {
        let n = self.len();
        if n > 64 {
            return Err(Error::ResourceCap {
                what: "bitmask adjacency",
                requested: n,
                cap: 64,
                hint: "",
            });
        }
        Ok((0..n)
            .map(|u| (0..n).filter(|&v| self.is_edge(u, v)).fold(0u64, |m, v| m | (1 << v)))
            .collect())
    }

    /// True when `members` (vertex indices) are pairwise adjacent.
    pub fn is_clique(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(k, &u)| members[k + 1..].iter().all(|&v| u != v && self.is_edge(u, v)))
    }

    pub fn to_json(&self) -> String {
        let doc = BigJson {
            n: self.ligand_size,
            m: self.protein_size,
            labels: self.vertices.iter().map(|v| v.label.clone()).collect(),
            weights: self.weights.clone(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BigJson = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_layout(doc.n, doc.m, doc.labels, doc.weights, &edges)
    }

    /// Plain-text adjacency matrix: a header of labels, then one 0/1 row per vertex.
    pub fn adjacency_text(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.labels().join(" "));
        for u in 0..n {
            let row: Vec<&str> = (0..n).map(|v| if self.is_edge(u, v) { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}
