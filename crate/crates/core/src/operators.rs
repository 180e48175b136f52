//! Sparse linear operators of the discrete space and a direct solver for
//! `K + σM`, where `K` is the stiffness (kinetic) matrix and `M` the exact
//! mass matrix of the piecewise-linear elements.
//!
//! The solver eliminates the interior nodes of every edge (a tridiagonal
//! chain, identical on all edges) and factors the remaining vertex system,
//! which has the bandwidth of a 5-point lattice stencil.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::GridGraph;

/// `K u`, so that `uᵀ K u = ∫ |u'|²`.
pub fn stiffness_apply(graph: &GridGraph, u: &[f64]) -> Vec<f64> {
    let inv_h = 1.0 / graph.step();
    let mut out = vec![0.0; graph.dof_count()];
    graph.accumulate_segments(u, &mut out, |a, b| {
        let d = (b - a) * inv_h;
        (-d, d)
    });
    out
}

/// `M u`, so that `uᵀ M u = ∫ |u|²`.
pub fn mass_apply(graph: &GridGraph, u: &[f64]) -> Vec<f64> {
    let h = graph.step();
    let mut out = vec![0.0; graph.dof_count()];
    graph.accumulate_segments(u, &mut out, |a, b| (h * (2.0 * a + b) / 6.0, h * (a + 2.0 * b) / 6.0));
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric positive definite band matrix stored by lower diagonals,
/// factored in place as `L Lᵀ`.
#[derive(Debug, Clone)]
struct BandCholesky {
    n: usize,
    bw: usize,
    // row-major: band[i * (bw + 1) + (i - j)] holds L[i][j] for i - bw <= j <= i
    band: Vec<f64>,
}

impl BandCholesky {
    fn zeros(n: usize, bw: usize) -> Self {
        BandCholesky { n, bw, band: vec![0.0; n * (bw + 1)] }
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(j <= i && i - j <= self.bw);
        &mut self.band[i * (self.bw + 1) + (i - j)]
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.band[i * (self.bw + 1) + (i - j)]
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        *self.at(i, j) += v;
    }

    fn factor(&mut self) -> Result<()> {
        let bw = self.bw;
        for i in 0..self.n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = self.get(i, j);
                for k in k0..j {
                    s -= self.get(i, k) * self.get(j, k);
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::InvalidParameter("shifted Laplacian is not positive definite".into()));
                    }
                    *self.at(i, i) = s.sqrt();
                } else {
                    *self.at(i, j) = s / self.get(j, j);
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, x: &mut [f64]) {
        let bw = self.bw;
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.get(i, k) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + bw + 1).min(self.n) {
                s -= self.get(k, i) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
    }
}

/// Direct solver for `(K + σM) x = r` on a fixed grid.
#[derive(Debug, Clone)]
pub struct ShiftedLaplacian {
    graph: Arc<GridGraph>,
    sigma: f64,
    off: f64,
    // forward-elimination factors of the constant tridiagonal edge block
    thomas_c: Vec<f64>,
    thomas_d: Vec<f64>,
    // first and last columns of the inverse edge block
    first_col: Vec<f64>,
    vertex: BandCholesky,
}

impl ShiftedLaplacian {
    pub fn new(graph: Arc<GridGraph>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("shift must be positive, got {sigma}")));
        }
        let h = graph.step();
        let m = graph.mesh();
        // element matrix of one segment: [[diag, off], [off, diag]]
        let diag = 1.0 / h + sigma * h / 3.0;
        let off = -1.0 / h + sigma * h / 6.0;
        let n_inner = m - 1;

        let inner_diag = 2.0 * diag;
        let mut thomas_c = vec![0.0; n_inner];
        let mut thomas_d = vec![0.0; n_inner];
        for i in 0..n_inner {
            let denom = if i == 0 { inner_diag } else { inner_diag - off * thomas_c[i - 1] };
            thomas_d[i] = denom;
            thomas_c[i] = off / denom;
        }

        let mut solver = ShiftedLaplacian {
            graph: graph.clone(),
            sigma,
            off,
            thomas_c,
            thomas_d,
            first_col: Vec::new(),
            vertex: BandCholesky::zeros(0, 0),
        };
        if n_inner > 0 {
            let mut e1 = vec![0.0; n_inner];
            e1[0] = 1.0;
            solver.tridiag_solve(&mut e1);
            solver.first_col = e1;
        }

        // condensed 2x2 element per edge
        let (self_term, cross_term) = if n_inner == 0 {
            (diag, off)
        } else {
            let t11 = solver.first_col[0];
            let t1n = solver.first_col[n_inner - 1];
            (diag - off * off * t11, -off * off * t1n)
        };
        let nv = graph.vertex_dof_count();
        let bw = (2 * graph.half_width()).saturating_sub(1).max(1);
        let mut band = BandCholesky::zeros(nv, bw);
        for edge in graph.edges() {
            let s = graph.vertex_dof(edge.start);
            let t = graph.vertex_dof(edge.end);
            if let Some(s) = s {
                band.add(s, s, self_term);
            }
            if let Some(t) = t {
                band.add(t, t, self_term);
            }
            if let (Some(s), Some(t)) = (s, t) {
                band.add(s, t, cross_term);
            }
        }
        band.factor()?;
        solver.vertex = band;
        Ok(solver)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn tridiag_solve(&self, x: &mut [f64]) {
        let n = x.len();
        if n == 0 {
            return;
        }
        x[0] /= self.thomas_d[0];
        for i in 1..n {
            x[i] = (x[i] - self.off * x[i - 1]) / self.thomas_d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.thomas_c[i] * x[i + 1];
        }
    }

    /// `(K + σM) x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let k = stiffness_apply(&self.graph, x);
        let m = mass_apply(&self.graph, x);
        k.iter().zip(&m).map(|(a, b)| a + self.sigma * b).collect()
    }

    /// Solves `(K + σM) x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let g = &self.graph;
        let m = g.mesh();
        let n_inner = m - 1;
        let nv = g.vertex_dof_count();
        let mut x = rhs.to_vec();

        // eliminate edge interiors: y_e = T⁻¹ r_e, r_v -= off * y_e[end]
        for (e, edge) in g.edges().iter().enumerate() {
            if n_inner == 0 {
                break;
            }
            let base = g.edge_base(e);
            let (head, tail) = x.split_at_mut(base);
            let chain = &mut tail[..n_inner];
            self.tridiag_solve(chain);
            if let Some(s) = g.vertex_dof(edge.start) {
                head[s] -= self.off * chain[0];
            }
            if let Some(t) = g.vertex_dof(edge.end) {
                head[t] -= self.off * chain[n_inner - 1];
            }
        }

        self.vertex.solve_in_place(&mut x[..nv]);

        if n_inner > 0 {
            for (e, edge) in g.edges().iter().enumerate() {
                let xs = g.vertex_dof(edge.start).map_or(0.0, |d| x[d]);
                let xt = g.vertex_dof(edge.end).map_or(0.0, |d| x[d]);
                if xs == 0.0 && xt == 0.0 {
                    continue;
                }
                let base = g.edge_base(e);
                for i in 0..n_inner {
                    // T⁻¹ e_n is the first column reversed
                    let corr = xs * self.first_col[i] + xt * self.first_col[n_inner - 1 - i];
                    x[base + i] -= self.off * corr;
                }
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_grid, GraphFunction, GridSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_values(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn quadratic_forms_match_integrals() {
        let g = build_grid(GridSpec::new(2, 3).unwrap()).unwrap();
        let v = random_values(g.dof_count(), 1);
        let u = GraphFunction::new(g.clone(), v.clone()).unwrap();
        let ku = stiffness_apply(&g, &v);
        let mu = mass_apply(&g, &v);
        assert!((dot(&v, &ku) - u.kinetic()).abs() < 1e-12 * u.kinetic());
        assert!((dot(&v, &mu) - u.mass()).abs() < 1e-12 * u.mass());
    }

    #[test]
    fn solve_inverts_apply() {
        for (l, m, sigma) in [(1, 1, 1.0), (1, 2, 0.3), (3, 4, 1.0), (5, 7, 4.0)] {
            let g = build_grid(GridSpec::new(l, m).unwrap()).unwrap();
            let solver = ShiftedLaplacian::new(g.clone(), sigma).unwrap();
            let x = random_values(g.dof_count(), 7);
            let r = solver.apply(&x);
            let y = solver.solve(&r);
            let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9, "L={l} m={m}: {err}");
        }
    }
}
