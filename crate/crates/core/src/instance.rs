//! DUGG instances: random-dropout square grids whose graph connects
//! horizontal, vertical and diagonal neighbours.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{bernoulli, rng_from_seed};

/// Relative slack on the unit-disk radius.
pub const DISK_REL_TOL: f64 = 1e-9;

/// Grid offsets (row, col) that form an edge and come after the origin in
/// row-major order.
const FORWARD_NEIGHBOURS: [(i64, i64); 4] = [(0, 1), (1, -1), (1, 0), (1, 1)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuggInstance {
    pub id: String,
    pub rows: usize,
    pub cols: usize,
    pub spacing_um: f64,
    #[serde(default)]
    pub occupation_prob: f64,
    pub seed: u64,
    pub sites: Vec<(usize, usize)>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_cost: Option<u64>,
}

impl DuggInstance {
    /// Builds an instance from explicit occupied cells, deriving the edge set.
    pub fn from_sites(
        id: impl Into<String>,
        rows: usize,
        cols: usize,
        spacing_um: f64,
        sites: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("grid must have at least one row and one column"));
        }
        if !(spacing_um > 0.0) {
            return Err(invalid(format!("spacing must be positive, got {spacing_um}")));
        }
        let mut index = HashMap::with_capacity(sites.len());
        for (i, &(r, c)) in sites.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(invalid(format!("site ({r}, {c}) outside {rows}x{cols} grid")));
            }
            if let Some(j) = index.insert((r, c), i) {
                return Err(Error::DuplicatePosition(j, i));
            }
        }
        let mut edges = Vec::new();
        for (i, &(r, c)) in sites.iter().enumerate() {
            for (dr, dc) in FORWARD_NEIGHBOURS {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < 0 || nc < 0 {
                    continue;
                }
                if let Some(&j) = index.get(&(nr as usize, nc as usize)) {
                    edges.push((i.min(j), i.max(j)));
                }
            }
        }
        edges.sort_unstable();
        Ok(Self {
            id: id.into(),
            rows,
            cols,
            spacing_um,
            occupation_prob: 1.0,
            seed: 0,
            sites,
            edges,
            optimal_cost: None,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.sites.len()
    }

    /// Atom positions in micrometres, `(row * a, col * a)`.
    pub fn positions_um(&self) -> Vec<(f64, f64)> {
        self.sites
            .iter()
            .map(|&(r, c)| (r as f64 * self.spacing_um, c as f64 * self.spacing_um))
            .collect()
    }

    pub fn unit_disk_radius_um(&self) -> f64 {
        SQRT_2 * self.spacing_um
    }

    /// Neighbour lists indexed by site.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_qubits()];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Same graph laid out at a different lattice constant.
    pub fn with_spacing(&self, spacing_um: f64) -> Self {
        Self { spacing_um, ..self.clone() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            line: source.line(),
            source,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Samples a DUGG by occupying each cell of a `rows x cols` grid, in row-major
/// order, with probability `occupation_prob`.
pub fn generate_dugg(
    rows: usize,
    cols: usize,
    occupation_prob: f64,
    spacing_um: f64,
    seed: u64,
) -> Result<DuggInstance> {
    if rows == 0 || cols == 0 {
        return Err(invalid("rows * cols must be at least 1"));
    }
    if !(0.0..=1.0).contains(&occupation_prob) {
        return Err(invalid(format!(
            "occupation probability must be in [0, 1], got {occupation_prob}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut sites = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if bernoulli(&mut rng, occupation_prob) {
                sites.push((r, c));
            }
        }
    }
    if sites.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let id = format!("dugg_{rows}x{cols}_p{occupation_prob}_s{seed}");
    let mut inst = DuggInstance::from_sites(id, rows, cols, spacing_um, sites)?;
    inst.occupation_prob = occupation_prob;
    inst.seed = seed;
    Ok(inst)
}

/// Unit-disk edges by pairwise distance: `(i, j)` with `i < j` whenever
/// `|p_i - p_j| <= radius * (1 + DISK_REL_TOL)`.
pub fn edges_from_positions(
    positions: &[(f64, f64)],
    disk_radius_um: f64,
) -> Result<Vec<(usize, usize)>> {
    let limit = disk_radius_um * (1.0 + DISK_REL_TOL);
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let (dx, dy) = (positions[i].0 - positions[j].0, positions[i].1 - positions[j].1);
            let d = dx.hypot(dy);
            if d == 0.0 {
                return Err(Error::DuplicatePosition(i, j));
            }
            if d <= limit {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}
