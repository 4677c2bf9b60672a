//! Envelope (skyline) Cholesky factorization with reverse Cuthill-McKee
//! ordering, used for shift-invert on sparse FEM pairs.

use std::collections::VecDeque;

use super::sparse::Csr;
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn rcm(a: &Csr) -> Vec<usize> {
    let n = a.n;
    let deg: Vec<usize> = (0..n).map(|i| a.indptr[i + 1] - a.indptr[i]).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nbrs = Vec::new();
    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| deg[i]).unwrap();
        let start = pseudo_peripheral(a, seed, &visited);
        visited[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (deg[j], j));
            for &j in &nbrs {
                visited[j] = true;
                q.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &Csr, start: usize, blocked: &[bool]) -> (Vec<usize>, usize) {
    let mut level = vec![usize::MAX; a.n];
    level[start] = 0;
    let mut q = VecDeque::from([start]);
    let mut last = start;
    while let Some(v) = q.pop_front() {
        last = v;
        for (j, _) in a.row(v) {
            if !blocked[j] && level[j] == usize::MAX {
                level[j] = level[v] + 1;
                q.push_back(j);
            }
        }
    }
    (level, last)
}

fn pseudo_peripheral(a: &Csr, seed: usize, blocked: &[bool]) -> usize {
    let mut v = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (lv, far) = bfs_levels(a, v, blocked);
        if lv[far] <= ecc {
            break;
        }
        ecc = lv[far];
        v = far;
    }
    v
}

/// Lower-triangular Cholesky factor stored row by row from the first
/// structurally nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct Skyline {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl Skyline {
    pub fn factor(a: &Csr) -> Result<Skyline> {
        let n = a.n;
        let perm = rcm(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, &i) in inv.iter().enumerate() {
            for (j_old, _) in a.row(old) {
                let j = inv[j_old];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for old in 0..n {
            let i = inv[old];
            for (j_old, v) in a.row(old) {
                let j = inv[j_old];
                if j <= i {
                    data[start[i] + (j - first[i])] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (ri, rj) = (start[i], start[j]);
                let mut s = data[ri + (j - fi)];
                for k in lo..j {
                    s -= data[ri + (k - fi)] * data[rj + (k - fj)];
                }
                data[ri + (j - fi)] = s / data[rj + (j - fj)];
            }
            let ri = start[i];
            let mut d = data[ri + (i - fi)];
            for k in fi..i {
                let l = data[ri + (k - fi)];
                d -= l * l;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            data[ri + (i - fi)] = d.sqrt();
        }
        Ok(Skyline { n, perm, first, start, data })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Overwrite `x` with the solution of (L L^T) y = x.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&o| x[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.data[ri + (k - fi)] * y[k];
            }
            y[i] = s / self.data[ri + (i - fi)];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.start[i];
            let yi = y[i] / self.data[ri + (i - fi)];
            y[i] = yi;
            for k in fi..i {
                y[k] -= self.data[ri + (k - fi)] * yi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
    }
}
