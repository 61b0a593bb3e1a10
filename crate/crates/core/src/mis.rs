//! Maximum independent set solvers.
//!
//! The exact solver is a bitmask branch-and-bound: degree-0/1 vertices are
//! taken greedily, otherwise it branches on a maximum-degree vertex and prunes
//! with a greedy clique-cover bound. Among optimal sets it returns the
//! lexicographically smallest bit vector (compared from site 0 upwards).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::DuggInstance;

pub const DEFAULT_ORACLE_CAP: usize = 30;
/// Hard ceiling from the 64-bit vertex masks.
pub const MAX_ORACLE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisSolution {
    pub selected: Vec<bool>,
    pub cost: u64,
    pub is_valid: bool,
}

impl MisSolution {
    pub fn from_selection(selected: Vec<bool>, instance: &DuggInstance) -> Self {
        let is_valid = is_independent(&selected, &instance.edges);
        let cost = selected.iter().filter(|&&b| b).count() as u64;
        Self { selected, cost, is_valid }
    }
}

pub fn is_independent(selected: &[bool], edges: &[(usize, usize)]) -> bool {
    edges.iter().all(|&(i, j)| !(selected[i] && selected[j]))
}

/// Bitmask view of a graph with at most 64 vertices.
#[derive(Debug, Clone)]
pub struct MaskGraph {
    n: usize,
    adj: Vec<u64>,
}

impl MaskGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n <= MAX_ORACLE_CAP);
        let mut adj = vec![0u64; n];
        for &(i, j) in edges {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Self { n, adj }
    }

    fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Size of a maximum independent set inside `mask`.
    pub fn max_independent_size(&self, mask: u64) -> u32 {
        let mut best = 0;
        self.branch(mask, 0, &mut best);
        best
    }

    fn clique_cover_bound(&self, mut mask: u64) -> u32 {
        let mut cliques = 0;
        while mask != 0 {
            let v = mask.trailing_zeros() as usize;
            let mut clique = 1u64 << v;
            let mut cand = self.adj[v] & mask;
            while cand != 0 {
                let u = cand.trailing_zeros() as usize;
                clique |= 1 << u;
                cand &= self.adj[u];
            }
            mask &= !clique;
            cliques += 1;
        }
        cliques
    }

    fn branch(&self, mut mask: u64, mut current: u32, best: &mut u32) {
        loop {
            if mask == 0 {
                *best = (*best).max(current);
                return;
            }
            if current + mask.count_ones() <= *best
                || current + self.clique_cover_bound(mask) <= *best
            {
                return;
            }
            // Pick the min- and max-degree vertices in the remaining graph.
            let (mut min_v, mut min_d, mut max_v, mut max_d) = (0, u32::MAX, 0, 0);
            let mut m = mask;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let d = (self.adj[v] & mask).count_ones();
                if d < min_d {
                    (min_v, min_d) = (v, d);
                }
                if d > max_d {
                    (max_v, max_d) = (v, d);
                }
            }
            if min_d <= 1 {
                // Some maximum set always contains a vertex of degree <= 1.
                mask &= !(1u64 << min_v) & !self.adj[min_v];
                current += 1;
                continue;
            }
            self.branch(mask & !(1u64 << max_v) & !self.adj[max_v], current + 1, best);
            mask &= !(1u64 << max_v);
        }
    }

    /// Lexicographically smallest maximum independent set and its size.
    pub fn lex_smallest_maximum(&self) -> (u64, u32) {
        let size = self.max_independent_size(self.all());
        let (mut mask, mut chosen, mut need) = (self.all(), 0u64, size);
        for v in 0..self.n {
            let bit = 1u64 << v;
            if mask & bit == 0 {
                continue;
            }
            if self.max_independent_size(mask & !bit) >= need {
                mask &= !bit;
            } else {
                chosen |= bit;
                mask &= !bit & !self.adj[v];
                need -= 1;
            }
        }
        (chosen, size)
    }

    /// Every independent set of size `size` (ascending as integers of the
    /// reversed bit order, i.e. in search order).
    pub fn all_of_size(&self, size: u32) -> Vec<u64> {
        let mut out = Vec::new();
        self.enumerate(self.all(), 0, 0, size, &mut out);
        out
    }

    fn enumerate(&self, mask: u64, chosen: u64, count: u32, size: u32, out: &mut Vec<u64>) {
        if count == size {
            out.push(chosen);
            return;
        }
        if mask == 0 || count + self.clique_cover_bound(mask) < size {
            return;
        }
        let v = mask.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.enumerate(mask & !bit & !self.adj[v], chosen | bit, count + 1, size, out);
        self.enumerate(mask & !bit, chosen, count, size, out);
    }
}

fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

pub fn solve_mis_exact(instance: &DuggInstance) -> Result<MisSolution> {
    solve_mis_exact_capped(instance, DEFAULT_ORACLE_CAP)
}

pub fn solve_mis_exact_capped(instance: &DuggInstance, cap: usize) -> Result<MisSolution> {
    let n = instance.n_qubits();
    let cap = cap.min(MAX_ORACLE_CAP);
    if n > cap {
        return Err(Error::OracleCapExceeded { n_qubits: n, cap });
    }
    let graph = MaskGraph::new(n, &instance.edges);
    let (mask, size) = graph.lex_smallest_maximum();
    Ok(MisSolution { selected: mask_to_bits(mask, n), cost: size as u64, is_valid: true })
}

/// All maximum independent sets as bit vectors (the optimal set used by the
/// success-probability metric).
pub fn all_maximum_sets(instance: &DuggInstance, cap: usize) -> Result<Vec<Vec<bool>>> {
    let n = instance.n_qubits();
    let cap = cap.min(MAX_ORACLE_CAP);
    if n > cap {
        return Err(Error::OracleCapExceeded { n_qubits: n, cap });
    }
    let graph = MaskGraph::new(n, &instance.edges);
    let size = graph.max_independent_size(graph.all());
    Ok(graph.all_of_size(size).into_iter().map(|m| mask_to_bits(m, n)).collect())
}

/// Minimum-degree greedy; always valid, any size.
pub fn solve_mis_greedy(instance: &DuggInstance) -> MisSolution {
    let n = instance.n_qubits();
    let adj = instance.adjacency();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut selected = vec![false; n];
    let remove = |v: usize, alive: &mut Vec<bool>, degree: &mut Vec<usize>| {
        alive[v] = false;
        for &u in &adj[v] {
            if alive[u] {
                degree[u] -= 1;
            }
        }
    };
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (degree[v], v)) {
        selected[v] = true;
        remove(v, &mut alive, &mut degree);
        for &u in &adj[v].clone() {
            if alive[u] {
                remove(u, &mut alive, &mut degree);
            }
        }
    }
    MisSolution::from_selection(selected, instance)
}
