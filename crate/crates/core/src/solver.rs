//! Direct solver for the reduced symmetric positive definite system.
//!
//! Free DOFs are renumbered with reverse Cuthill-McKee and factorized with an
//! envelope (skyline) Cholesky. The symbolic structure depends only on the sparsity
//! pattern and the free set, so it is built once and refactorized every iteration.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Pivots below this fraction of the original diagonal are treated as singular.
const PIVOT_TOL: f64 = 1e-11;

/// Symbolic envelope structure of a reduced system.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// global DOF -> position in the factor, `None` if constrained
    slot: Vec<Option<usize>>,
    /// position in the factor -> global DOF
    dof: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
}

/// Numeric Cholesky factor `L Lᵀ` over a [`ReducedSystem`].
#[derive(Clone, Debug)]
pub struct Factorization<'a> {
    sys: &'a ReducedSystem,
    l: Vec<f64>,
}

impl ReducedSystem {
    /// `free` lists the global DOFs kept in the system.
    pub fn new(pattern: &CsrMatrix, free: &[usize]) -> Self {
        let n_global = pattern.dim();
        let mut local = vec![usize::MAX; n_global];
        for (k, &d) in free.iter().enumerate() {
            local[d] = k;
        }
        let adj: Vec<Vec<usize>> = free
            .iter()
            .map(|&d| {
                pattern
                    .row(d)
                    .filter_map(|(c, _)| (local[c] != usize::MAX && c != d).then_some(local[c]))
                    .collect()
            })
            .collect();
        let order = reverse_cuthill_mckee(&adj);
        let mut pos = vec![0; order.len()];
        for (p, &k) in order.iter().enumerate() {
            pos[k] = p;
        }
        let mut slot = vec![None; n_global];
        let mut dof = vec![0; free.len()];
        let mut first = vec![0; free.len()];
        for (k, &d) in free.iter().enumerate() {
            slot[d] = Some(pos[k]);
            dof[pos[k]] = d;
            first[pos[k]] = adj[k].iter().map(|&m| pos[m]).filter(|&p| p < pos[k]).min().unwrap_or(pos[k]);
        }
        let mut start = Vec::with_capacity(free.len() + 1);
        let mut acc = 0;
        for (i, &f) in first.iter().enumerate() {
            start.push(acc);
            acc += i - f + 1;
        }
        start.push(acc);
        Self { slot, dof, first, start }
    }

    pub fn len(&self) -> usize {
        self.dof.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof.is_empty()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        *self.start.last().unwrap_or(&0)
    }

    /// Global DOFs in factor order.
    pub fn dofs(&self) -> &[usize] {
        &self.dof
    }

    pub fn slot(&self, global: usize) -> Option<usize> {
        self.slot[global]
    }

    /// Extracts the reduced part of a global vector, in factor order.
    pub fn restrict(&self, global: &[f64]) -> Vec<f64> {
        self.dof.iter().map(|&d| global[d]).collect()
    }

    /// Scatters a reduced vector back to global length, zero on constrained DOFs.
    pub fn expand(&self, reduced: &[f64], n_global: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_global];
        for (&d, &v) in self.dof.iter().zip(reduced) {
            out[d] = v;
        }
        out
    }

    /// Factorizes `K - shift·diag(m)` restricted to the free DOFs.
    pub fn factor<'a>(&'a self, k: &CsrMatrix, diag_shift: Option<(&[f64], f64)>) -> Result<Factorization<'a>> {
        let n = self.len();
        let mut l = vec![0.0; self.envelope_size()];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let d = self.dof[i];
            for (c, v) in k.row(d) {
                if let Some(j) = self.slot[c] {
                    if j <= i {
                        debug_assert!(j >= self.first[i]);
                        l[self.start[i] + j - self.first[i]] += v;
                    }
                }
            }
            if let Some((m, sigma)) = diag_shift {
                l[self.start[i] + i - self.first[i]] -= sigma * m[d];
            }
            diag[i] = l[self.start[i] + i - self.first[i]];
        }
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..i {
                let k0 = fi.max(self.first[j]);
                let sj = self.start[j];
                let fj = self.first[j];
                // row j is stored before row i
                let (head, tail) = l.split_at_mut(si);
                let (row_i, row_j) = (&mut tail[..i - fi + 1], &head[sj..sj + j - fj + 1]);
                let dot: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(a, b)| a * b)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
            }
            let row_i = &mut l[si..si + i - fi + 1];
            let (off, d) = row_i.split_at_mut(i - fi);
            let s = d[0] - off.iter().map(|v| v * v).sum::<f64>();
            if !(s > PIVOT_TOL * diag[i].abs()) || !s.is_finite() {
                return Err(Error::InsufficientConstraints { equation: self.dof[i] });
            }
            d[0] = s.sqrt();
        }
        Ok(Factorization { sys: self, l })
    }
}

impl Factorization<'_> {
    pub fn system(&self) -> &ReducedSystem {
        self.sys
    }

    /// Solves with a right-hand side in factor order.
    pub fn solve_reduced(&self, b: &[f64]) -> Vec<f64> {
        let sys = self.sys;
        let n = sys.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let fi = sys.first[i];
            let row = &self.l[sys.start[i]..sys.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = sys.first[i];
            let row = &self.l[sys.start[i]..sys.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (yk, lk) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= lk * xi;
            }
        }
        y
    }
}

/// Reverse Cuthill-McKee ordering; returns the nodes in new order.
fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let degree = |v: usize| adj[v].len();
    while order.len() < n {
        let seed = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (degree(v), v))
            .expect("unvisited node remains");
        let root = pseudo_peripheral(adj, seed);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree(w), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeated BFS from the farthest, lowest-degree node until eccentricity stops growing.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize) -> usize {
    let farthest = |root: usize| {
        let levels = bfs_levels(adj, root);
        let ecc = levels.iter().filter_map(|&l| l).max().unwrap_or(0);
        let v = (0..adj.len())
            .filter(|&v| levels[v] == Some(ecc))
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap_or(root);
        (ecc, v)
    };
    let mut root = start;
    let (mut ecc, mut candidate) = farthest(root);
    loop {
        let (next_ecc, next_candidate) = farthest(candidate);
        if next_ecc <= ecc {
            return root;
        }
        root = candidate;
        ecc = next_ecc;
        candidate = next_candidate;
    }
}

fn bfs_levels(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].unwrap();
        for &w in &adj[v] {
            if level[w].is_none() {
                level[w] = Some(lv + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// `‖A x − b‖ / ‖b‖` over the reduced DOFs of `sys` (absolute norm when `b = 0`).
pub fn reduced_residual(k: &CsrMatrix, sys: &ReducedSystem, x_global: &[f64], b_global: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &d in sys.dofs() {
        let ax: f64 = k.row(d).filter(|(c, _)| sys.slot(*c).is_some()).map(|(c, v)| v * x_global[c]).sum();
        num += (ax - b_global[d]).powi(2);
        den += b_global[d].powi(2);
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
