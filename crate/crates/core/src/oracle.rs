//! Exact classical references: max-weight cliques, clique rankings and
//! diagonal ground states.
//!
//! Ties are broken toward the smallest basis index, i.e. the clique whose
//! membership mask is numerically smallest.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{Bitstring, IsingHamiltonian};
use crate::ligraph::{BindingInteractionGraph, PotentialTable};

pub const EXHAUSTIVE_CAP: usize = 20;
pub const EXACT_CAP: usize = 24;
const REL_TOL: f64 = 1e-12;

fn same_weight(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clique {
    pub vertices: Vec<usize>,
    pub weight: f64,
}

impl Clique {
    fn from_mask(mask: u32, weights: &[f64]) -> Self {
        let vertices: Vec<usize> = (0..32).filter(|&v| mask >> v & 1 == 1).collect();
        let weight = vertices.iter().map(|&v| weights[v]).sum();
        Clique { vertices, weight }
    }

    pub fn mask(&self) -> usize {
        self.vertices.iter().fold(0, |m, &v| m | 1 << v)
    }

    pub fn bitstring(&self, n: usize) -> Bitstring {
        Bitstring::from_vertices(n, &self.vertices)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueSolution {
    pub vertices: Vec<usize>,
    pub total_weight: f64,
    pub is_unique_max: bool,
    /// Best clique that is not contained in the reported one.
    pub runner_up_weight: Option<f64>,
    /// Every clique reaching the maximum weight, smallest mask first.
    pub optima: Vec<Vec<usize>>,
}

fn masks32(big: &BindingInteractionGraph) -> Result<Vec<u32>> {
    Ok(big.neighbor_masks()?.into_iter().map(|m| m as u32).collect())
}

fn cap(big: &BindingInteractionGraph, limit: usize) -> Result<()> {
    if big.len() > limit {
        return Err(Error::ResourceCap {
            what: "exact clique search vertices",
            requested: big.len(),
            cap: limit,
            hint: "; heuristic clique search is not provided",
        });
    }
    Ok(())
}

/// Calls `f(mask, weight, common_neighbours)` for every non-empty clique,
/// in increasing mask order.
fn for_each_clique(big: &BindingInteractionGraph, mut f: impl FnMut(u32, f64, u32)) -> Result<()> {
    cap(big, EXHAUSTIVE_CAP)?;
    let n = big.len();
    let adj = masks32(big)?;
    let w = big.weights();
    let size = 1usize << n;
    let all = (size - 1) as u32;
    let mut common = vec![0u32; size];
    let mut weight = vec![0.0f64; size];
    let mut ok = vec![false; size];
    common[0] = all;
    ok[0] = true;
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        if ok[rest] && common[rest] >> low & 1 == 1 {
            ok[s] = true;
            common[s] = common[rest] & adj[low];
            weight[s] = weight[rest] + w[low];
            f(s as u32, weight[s], common[s]);
        }
    }
    Ok(())
}

fn solution_from(optima: Vec<u32>, best: f64, runner_up: Option<f64>, weights: &[f64]) -> CliqueSolution {
    let first = Clique::from_mask(optima[0], weights);
    CliqueSolution {
        vertices: first.vertices,
        total_weight: best,
        is_unique_max: optima.len() == 1,
        runner_up_weight: runner_up,
        optima: optima.iter().map(|&m| Clique::from_mask(m, weights).vertices).collect(),
    }
}

fn exhaustive(big: &BindingInteractionGraph) -> Result<CliqueSolution> {
    let mut all: Vec<(u32, f64)> = Vec::new();
    for_each_clique(big, |m, w, _| all.push((m, w)))?;
    let best = all.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let optima: Vec<u32> = all.iter().filter(|c| same_weight(c.1, best)).map(|c| c.0).collect();
    let a = optima[0];
    let runner_up = all
        .iter()
        .filter(|c| c.0 & !a != 0)
        .map(|c| c.1)
        .fold(None, |m: Option<f64>, w| Some(m.map_or(w, |m| m.max(w))));
    Ok(solution_from(optima, best, runner_up, big.weights()))
}

struct Bnb<'a> {
    adj: &'a [u32],
    w: &'a [f64],
    best: f64,
    optima: Vec<u32>,
}

impl Bnb<'_> {
    fn bound(&self, cand: u32) -> f64 {
        (0..32).filter(|&v| cand >> v & 1 == 1).map(|v| self.w[v]).sum()
    }

    fn search(&mut self, current: u32, weight: f64, cand: u32) {
        if current != 0 {
            if self.optima.is_empty() || (weight > self.best && !same_weight(weight, self.best)) {
                self.best = weight;
                self.optima = vec![current];
            } else if same_weight(weight, self.best) {
                self.optima.push(current);
            }
        }
        if cand == 0 {
            return;
        }
        let bound = weight + self.bound(cand);
        if !self.optima.is_empty() && bound < self.best && !same_weight(bound, self.best) {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // extend with v, keeping later candidates only, so every clique is visited once
            self.search(current | 1 << v, weight + self.w[v], rest & self.adj[v]);
        }
    }
}

fn branch_and_bound(big: &BindingInteractionGraph) -> Result<CliqueSolution> {
    cap(big, EXACT_CAP)?;
    let n = big.len();
    let adj = masks32(big)?;
    let mut bnb = Bnb {
        adj: &adj,
        w: big.weights(),
        best: f64::NEG_INFINITY,
        optima: Vec::new(),
    };
    bnb.search(0, 0.0, ((1u64 << n) - 1) as u32);
    let best = bnb.best;
    let mut optima = bnb.optima;
    optima.sort_unstable();
    optima.dedup();
    let a = optima[0];
    // best clique holding some vertex outside `a`
    let mut runner_up: Option<f64> = None;
    for v in (0..n).filter(|&v| a >> v & 1 == 0) {
        let mut sub = Bnb {
            adj: &adj,
            w: big.weights(),
            best: f64::NEG_INFINITY,
            optima: Vec::new(),
        };
        sub.search(1 << v, big.weights()[v], adj[v]);
        runner_up = Some(runner_up.map_or(sub.best, |r: f64| r.max(sub.best)));
    }
    Ok(solution_from(optima, best, runner_up, big.weights()))
}

/// Exhaustive up to 20 vertices, branch and bound up to 24.
pub fn max_weight_clique(big: &BindingInteractionGraph) -> Result<CliqueSolution> {
    if big.len() <= EXHAUSTIVE_CAP {
        exhaustive(big)
    } else {
        branch_and_bound(big)
    }
}

/// Same as [`max_weight_clique`] but always by branch and bound.
pub fn max_weight_clique_bnb(big: &BindingInteractionGraph) -> Result<CliqueSolution> {
    branch_and_bound(big)
}

/// All cliques with at least `min_size` members, heaviest first, ties by
/// smallest mask.
pub fn enumerate_cliques(big: &BindingInteractionGraph, min_size: usize, maximal_only: bool) -> Result<Vec<Clique>> {
    let mut found: Vec<(u32, f64)> = Vec::new();
    for_each_clique(big, |m, w, common| {
        if (m.count_ones() as usize) < min_size {
            return;
        }
        if maximal_only && common & !m != 0 {
            return;
        }
        found.push((m, w));
    })?;
    found.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(found.into_iter().map(|(m, _)| Clique::from_mask(m, big.weights())).collect())
}

/// All minimizers of the diagonal energy, by increasing basis index.
pub fn exact_ground_states(h: &IsingHamiltonian) -> Result<Vec<Bitstring>> {
    let e = h.energy_vector()?;
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(e.iter()
        .enumerate()
        .filter(|(_, &v)| same_weight(v, min))
        .map(|(z, _)| Bitstring::from_index(z, h.n_qubits))
        .collect())
}

/// Random graph with Table-style weights whose two heaviest cliques differ by
/// exactly `gap`. Edges appear with probability 0.8.
pub fn make_near_degenerate_instance<R: Rng + ?Sized>(n: usize, gap: f64, rng: &mut R) -> Result<BindingInteractionGraph> {
    make_near_degenerate_instance_with(n, gap, 0.8, &PotentialTable::default(), rng)
}

pub fn make_near_degenerate_instance_with<R: Rng + ?Sized>(
    n: usize,
    gap: f64,
    edge_probability: f64,
    table: &PotentialTable,
    rng: &mut R,
) -> Result<BindingInteractionGraph> {
    const ATTEMPTS: usize = 200;
    if n < 8 {
        return Err(Error::InvalidArgument(format!("near-degenerate instances need n >= 8, got {n}")));
    }
    if n > EXHAUSTIVE_CAP {
        return Err(Error::ResourceCap {
            what: "near-degenerate instance vertices",
            requested: n,
            cap: EXHAUSTIVE_CAP,
            hint: "",
        });
    }
    if !(gap > 0.0) || !gap.is_finite() {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidArgument(format!("edge probability {edge_probability} outside [0, 1]")));
    }
    let values = table.distinct_values();
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for _ in 0..ATTEMPTS {
        let mut weights: Vec<f64> = (0..n).map(|_| *values.choose(rng).expect("table is non-empty")).collect();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|_| rng.random::<f64>() < edge_probability)
            .collect();
        let g = BindingInteractionGraph::from_edges(labels.clone(), weights.clone(), &edges)?;
        let sol = max_weight_clique(&g)?;
        let Some(runner_up) = sol.runner_up_weight else { continue };
        let a = sol.vertices.iter().fold(0usize, |m, &v| m | 1 << v);
        let min_in_a = sol.vertices.iter().map(|&v| weights[v]).fold(f64::INFINITY, f64::min);
        let delta = sol.total_weight - gap - runner_up;
        if !sol.is_unique_max || delta < 0.0 || min_in_a < gap {
            continue;
        }
        // lift one vertex of the runner-up outside the optimum
        let runner = enumerate_cliques(&g, 1, false)?
            .into_iter()
            .find(|c| c.mask() & !a != 0 && same_weight(c.weight, runner_up))
            .expect("runner-up clique exists");
        let v = *runner.vertices.iter().find(|&&v| a >> v & 1 == 0).expect("vertex outside optimum");
        weights[v] += delta;
        let g = BindingInteractionGraph::from_edges(labels.clone(), weights, &edges)?;
        let ranked = enumerate_cliques(&g, 1, false)?;
        if ranked.len() >= 2 && (ranked[0].weight - ranked[1].weight - gap).abs() < 1e-9 && ranked[0].mask() == a {
            return Ok(g);
        }
    }
    Err(Error::Infeasible(format!(
        "no {n}-vertex instance with a top-two clique gap of {gap} after {ATTEMPTS} attempts"
    )))
}

/// `rank,weight,members` with members as `;`-joined vertex labels.
pub fn cliques_csv(big: &BindingInteractionGraph, cliques: &[Clique]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "weight", "members"])?;
    let labels = big.labels();
    for (k, c) in cliques.iter().enumerate() {
        let members: Vec<&str> = c.vertices.iter().map(|&v| labels[v]).collect();
        w.write_record([(k + 1).to_string(), format!("{:.6}", c.weight), members.join(";")])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
