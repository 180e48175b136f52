//! The truncated square-grid metric graph and piecewise-linear functions on it.
//!
//! The grid is the window `[-L, L]²` of the lattice `ℤ²`, with one unit edge
//! between each pair of adjacent lattice points. Each edge is split into `m`
//! uniform subintervals. A function is stored by its nodal values: one value
//! per interior vertex (shared by all incident edges, so continuity at
//! vertices holds by construction) and `m - 1` values per edge. Vertices on
//! the window boundary carry a homogeneous Dirichlet condition and own no
//! degree of freedom.
//!
//! Integrals are computed exactly for the piecewise-linear interpolant of the
//! nodal values (see [`crate::segment`]).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segment;

/// Truncation half-width and mesh density of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of unit cells from the origin to the boundary in each direction.
    pub half_width: usize,
    /// Uniform subintervals per unit edge.
    pub mesh: usize,
}

impl GridSpec {
    pub fn new(half_width: usize, mesh: usize) -> Result<Self> {
        let spec = GridSpec { half_width, mesh };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_width == 0 {
            return Err(Error::InvalidGrid("half-width must be at least 1 (L=0 has no edges)".into()));
        }
        if self.mesh == 0 {
            return Err(Error::InvalidGrid("mesh must be at least 1".into()));
        }
        Ok(())
    }

    /// Side length `2L + 1` of the vertex lattice.
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.side() * self.side()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.side() * 2 * self.half_width
    }

    pub fn boundary_vertex_count(&self) -> usize {
        4 * 2 * self.half_width
    }

    pub fn dof_count(&self) -> usize {
        self.vertex_count() + self.edge_count() * (self.mesh - 1) - self.boundary_vertex_count()
    }
}

/// Lattice point `(j, k)`; `j` runs along the horizontal axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub j: i64,
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A unit edge, oriented from `start` to `end` in the positive axis direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    pub orientation: Orientation,
}

/// Immutable truncated grid with its degree-of-freedom map.
#[derive(Debug)]
pub struct GridGraph {
    spec: GridSpec,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    boundary: Vec<bool>,
    vertex_dof: Vec<Option<usize>>,
    interior_vertices: Vec<usize>,
    incident: Vec<Vec<usize>>,
    n_dofs: usize,
}

/// Builds the truncated grid. Fails for `L = 0` or `m = 0`.
pub fn build_grid(spec: GridSpec) -> Result<Arc<GridGraph>> {
    GridGraph::new(spec).map(Arc::new)
}

impl GridGraph {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let l = spec.half_width as i64;
        let side = spec.side();

        let mut vertices = Vec::with_capacity(spec.vertex_count());
        let mut boundary = Vec::with_capacity(spec.vertex_count());
        for k in -l..=l {
            for j in -l..=l {
                vertices.push(Vertex { j, k });
                boundary.push(j.abs() == l || k.abs() == l);
            }
        }

        let index = |j: i64, k: i64| ((k + l) as usize) * side + (j + l) as usize;
        let mut edges = Vec::with_capacity(spec.edge_count());
        for k in -l..=l {
            for j in -l..l {
                edges.push(Edge { start: index(j, k), end: index(j + 1, k), orientation: Orientation::Horizontal });
            }
        }
        for j in -l..=l {
            for k in -l..l {
                edges.push(Edge { start: index(j, k), end: index(j, k + 1), orientation: Orientation::Vertical });
            }
        }

        let mut vertex_dof = vec![None; vertices.len()];
        let mut interior_vertices = Vec::new();
        for (v, &on_boundary) in boundary.iter().enumerate() {
            if !on_boundary {
                vertex_dof[v] = Some(interior_vertices.len());
                interior_vertices.push(v);
            }
        }

        let mut incident = vec![Vec::with_capacity(4); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            incident[edge.start].push(e);
            incident[edge.end].push(e);
        }

        let n_dofs = interior_vertices.len() + edges.len() * (spec.mesh - 1);
        debug_assert_eq!(n_dofs, spec.dof_count());
        Ok(GridGraph { spec, vertices, edges, boundary, vertex_dof, interior_vertices, incident, n_dofs })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn half_width(&self) -> usize {
        self.spec.half_width
    }

    pub fn mesh(&self) -> usize {
        self.spec.mesh
    }

    /// Subinterval length `1/m`.
    pub fn step(&self) -> f64 {
        1.0 / self.spec.mesh as f64
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn dof_count(&self) -> usize {
        self.n_dofs
    }

    pub fn vertex_dof_count(&self) -> usize {
        self.interior_vertices.len()
    }

    /// Interior vertices, in vertex-dof order.
    pub fn interior_vertices(&self) -> &[usize] {
        &self.interior_vertices
    }

    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dof[v]
    }

    /// Edges incident to vertex `v`.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Vertex index of a lattice point, if inside the window.
    pub fn vertex_index(&self, j: i64, k: i64) -> Option<usize> {
        let l = self.spec.half_width as i64;
        if j.abs() > l || k.abs() > l {
            return None;
        }
        Some(((k + l) as usize) * self.spec.side() + (j + l) as usize)
    }

    /// Edge joining `(j, k)` to its right (horizontal) or upper (vertical) neighbour.
    pub fn edge_index(&self, j: i64, k: i64, orientation: Orientation) -> Option<usize> {
        let l = self.spec.half_width as i64;
        let n = 2 * l;
        match orientation {
            Orientation::Horizontal => {
                if !(-l..l).contains(&j) || k.abs() > l {
                    return None;
                }
                Some(((k + l) * n + (j + l)) as usize)
            }
            Orientation::Vertical => {
                if !(-l..l).contains(&k) || j.abs() > l {
                    return None;
                }
                let offset = (2 * l + 1) * n;
                Some((offset + (j + l) * n + (k + l)) as usize)
            }
        }
    }

    /// First dof of the interior nodes of edge `e`; local node `i` in `1..m` maps to `base + i - 1`.
    #[inline]
    pub fn edge_base(&self, e: usize) -> usize {
        self.interior_vertices.len() + e * (self.spec.mesh - 1)
    }

    /// Global dof of local node `i ∈ 0..=m` on edge `e`, or `None` at a boundary vertex.
    pub fn node_dof(&self, e: usize, i: usize) -> Option<usize> {
        let m = self.spec.mesh;
        assert!(i <= m, "local node {i} out of range 0..={m}");
        let edge = &self.edges[e];
        if i == 0 {
            self.vertex_dof[edge.start]
        } else if i == m {
            self.vertex_dof[edge.end]
        } else {
            Some(self.edge_base(e) + i - 1)
        }
    }

    /// Position of local node `i` of edge `e` in the plane.
    pub fn node_position(&self, e: usize, i: usize) -> (f64, f64) {
        let edge = &self.edges[e];
        let v = self.vertices[edge.start];
        let s = i as f64 / self.spec.mesh as f64;
        match edge.orientation {
            Orientation::Horizontal => (v.j as f64 + s, v.k as f64),
            Orientation::Vertical => (v.j as f64, v.k as f64 + s),
        }
    }

    /// Position in the plane of global dof `d`.
    pub fn dof_position(&self, d: usize) -> (f64, f64) {
        let nv = self.interior_vertices.len();
        if d < nv {
            let v = self.vertices[self.interior_vertices[d]];
            return (v.j as f64, v.k as f64);
        }
        let per_edge = self.spec.mesh - 1;
        self.node_position((d - nv) / per_edge, (d - nv) % per_edge + 1)
    }

    /// Lumped (trapezoidal) quadrature weight of every dof.
    ///
    /// These weights define the discrete inner product used for gradients.
    pub fn lumped_weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.n_dofs];
        for (d, &v) in self.interior_vertices.iter().enumerate() {
            w[d] = 0.5 * h * self.degree(v) as f64;
        }
        w
    }

    /// Visits every subinterval `(edge, local index, left value, right value)`.
    #[inline]
    pub fn for_each_segment<F: FnMut(usize, usize, f64, f64)>(&self, values: &[f64], mut f: F) {
        let m = self.spec.mesh;
        for (e, edge) in self.edges.iter().enumerate() {
            let start = self.vertex_dof[edge.start].map_or(0.0, |d| values[d]);
            let end = self.vertex_dof[edge.end].map_or(0.0, |d| values[d]);
            let base = self.edge_base(e);
            let inner = &values[base..base + m - 1];
            let mut left = start;
            for (i, &right) in inner.iter().enumerate() {
                f(e, i, left, right);
                left = right;
            }
            f(e, m - 1, left, end);
        }
    }

    /// Scatters per-segment endpoint contributions back onto dofs.
    #[inline]
    pub(crate) fn accumulate_segments<F: FnMut(f64, f64) -> (f64, f64)>(
        &self,
        values: &[f64],
        out: &mut [f64],
        mut f: F,
    ) {
        let m = self.spec.mesh;
        for (e, edge) in self.edges.iter().enumerate() {
            let sd = self.vertex_dof[edge.start];
            let ed = self.vertex_dof[edge.end];
            let base = self.edge_base(e);
            let node = |i: usize| -> Option<usize> {
                if i == 0 {
                    sd
                } else if i == m {
                    ed
                } else {
                    Some(base + i - 1)
                }
            };
            for i in 0..m {
                let (ld, rd) = (node(i), node(i + 1));
                let a = ld.map_or(0.0, |d| values[d]);
                let b = rd.map_or(0.0, |d| values[d]);
                let (ga, gb) = f(a, b);
                if let Some(d) = ld {
                    out[d] += ga;
                }
                if let Some(d) = rd {
                    out[d] += gb;
                }
            }
        }
    }
}

/// A continuous piecewise-linear function on a [`GridGraph`].
#[derive(Clone, Debug)]
pub struct GraphFunction {
    graph: Arc<GridGraph>,
    values: Vec<f64>,
}

impl PartialEq for GraphFunction {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.graph, &other.graph) || self.graph.spec == other.graph.spec) && self.values == other.values
    }
}

impl GraphFunction {
    pub fn new(graph: Arc<GridGraph>, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.dof_count() {
            return Err(Error::DimensionMismatch { expected: graph.dof_count(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GraphFunction { graph, values })
    }

    pub fn zeros(graph: Arc<GridGraph>) -> Self {
        let n = graph.dof_count();
        GraphFunction { graph, values: vec![0.0; n] }
    }

    /// Nodal interpolant of `f(x, y)` evaluated at every node position.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(graph: Arc<GridGraph>, f: F) -> Result<Self> {
        let mut values = vec![0.0; graph.dof_count()];
        for (d, &v) in graph.interior_vertices().iter().enumerate() {
            let p = graph.vertices()[v];
            values[d] = f(p.j as f64, p.k as f64);
        }
        let m = graph.mesh();
        for e in 0..graph.edges().len() {
            let base = graph.edge_base(e);
            for i in 1..m {
                let (x, y) = graph.node_position(e, i);
                values[base + i - 1] = f(x, y);
            }
        }
        GraphFunction::new(graph, values)
    }

    pub fn graph(&self) -> &Arc<GridGraph> {
        &self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same graph, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        GraphFunction::new(self.graph.clone(), values)
    }

    /// Value at local node `i ∈ 0..=m` of edge `e`.
    pub fn node_value(&self, e: usize, i: usize) -> f64 {
        self.graph.node_dof(e, i).map_or(0.0, |d| self.values[d])
    }

    /// All `m + 1` nodal values along edge `e`, endpoints included.
    pub fn edge_profile(&self, e: usize) -> Vec<f64> {
        (0..=self.graph.mesh()).map(|i| self.node_value(e, i)).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        GraphFunction { graph: self.graph.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn abs(&self) -> Self {
        GraphFunction { graph: self.graph.clone(), values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `∫ |u|²`.
    pub fn mass(&self) -> f64 {
        let h = self.graph.step();
        let mut total = 0.0;
        self.graph.for_each_segment(&self.values, |_, _, a, b| total += segment::mass(a, b, h));
        total
    }

    /// `∫ |u'|²`.
    pub fn kinetic(&self) -> f64 {
        let h = self.graph.step();
        let mut total = 0.0;
        self.graph.for_each_segment(&self.values, |_, _, a, b| total += segment::kinetic(a, b, h));
        total
    }

    /// `∫ |u|^p` (the p-th power of the norm).
    pub fn lp_power(&self, p: f64) -> f64 {
        let h = self.graph.step();
        let mut total = 0.0;
        self.graph.for_each_segment(&self.values, |_, _, a, b| total += segment::power(a, b, h, p));
        total
    }

    /// `‖u‖_p` for `p ≥ 1`.
    pub fn norm_lp(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p == 2.0 {
            return Ok(self.mass().sqrt());
        }
        Ok(self.lp_power(p).powf(1.0 / p))
    }

    /// `‖u‖_∞`, the largest nodal magnitude.
    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// `‖u'‖_1`.
    pub fn grad_l1(&self) -> f64 {
        let mut total = 0.0;
        self.graph.for_each_segment(&self.values, |_, _, a, b| total += (b - a).abs());
        total
    }

    /// Checks that every edge endpoint evaluates to the same value at a shared vertex
    /// and that boundary vertices read 0.
    pub fn vertex_continuity_holds(&self) -> bool {
        let m = self.graph.mesh();
        for v in 0..self.graph.vertices().len() {
            let mut seen: Option<f64> = None;
            for &e in self.graph.incident_edges(v) {
                let edge = self.graph.edges()[e];
                let i = if edge.start == v { 0 } else { m };
                let val = self.node_value(e, i);
                match seen {
                    None => seen = Some(val),
                    Some(s) if s.to_bits() != val.to_bits() => return false,
                    _ => {}
                }
            }
            if self.graph.is_boundary(v) && seen.is_some_and(|s| s != 0.0) {
                return false;
            }
        }
        true
    }

    /// Lattice translation by `(dj, dk)`. Values pushed outside the window or
    /// onto a boundary vertex are dropped; vacated nodes become 0.
    pub fn translate(&self, dj: i64, dk: i64) -> GraphFunction {
        let g = &self.graph;
        let mut out = vec![0.0; g.dof_count()];
        for (d, &v) in g.interior_vertices().iter().enumerate() {
            let p = g.vertices()[v];
            if let Some(dst) = g.vertex_index(p.j + dj, p.k + dk).and_then(|w| g.vertex_dof(w)) {
                out[dst] = self.values[d];
            }
        }
        let m = g.mesh();
        if m > 1 {
            for (e, edge) in g.edges().iter().enumerate() {
                let p = g.vertices()[edge.start];
                if let Some(dst) = g.edge_index(p.j + dj, p.k + dk, edge.orientation) {
                    let (sb, db) = (g.edge_base(e), g.edge_base(dst));
                    out[db..db + m - 1].copy_from_slice(&self.values[sb..sb + m - 1]);
                }
            }
        }
        GraphFunction { graph: g.clone(), values: out }
    }
}

/// Places `profile` (the `m + 1` nodal values along one edge, zero at both
/// ends) on edge `edge` and extends by zero elsewhere.
pub fn embed_edge_function(graph: &Arc<GridGraph>, edge: usize, profile: &[f64]) -> Result<GraphFunction> {
    let m = graph.mesh();
    if edge >= graph.edges().len() {
        return Err(Error::InvalidParameter(format!("edge {edge} out of range")));
    }
    if profile.len() != m + 1 {
        return Err(Error::DimensionMismatch { expected: m + 1, got: profile.len() });
    }
    if profile[0] != 0.0 || profile[m] != 0.0 {
        return Err(Error::InvalidParameter("edge profile must vanish at both endpoints".into()));
    }
    let mut values = vec![0.0; graph.dof_count()];
    let base = graph.edge_base(edge);
    values[base..base + m - 1].copy_from_slice(&profile[1..m]);
    GraphFunction::new(graph.clone(), values)
}

/// Edge through the centre of the window: the horizontal edge from `(0,0)` to `(1,0)`.
pub fn central_edge(graph: &GridGraph) -> usize {
    graph.edge_index(0, 0, Orientation::Horizontal).expect("L >= 1 always has a central edge")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent(graph: &Arc<GridGraph>) -> GraphFunction {
        let m = graph.mesh();
        let profile: Vec<f64> = (0..=m)
            .map(|i| {
                let s = i as f64 / m as f64;
                s.min(1.0 - s)
            })
            .collect();
        embed_edge_function(graph, central_edge(graph), &profile).unwrap()
    }

    #[test]
    fn counts_small_grids() {
        let g = build_grid(GridSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(g.vertices().len(), 9);
        assert_eq!(g.edges().len(), 12);

        let g = build_grid(GridSpec::new(2, 4).unwrap()).unwrap();
        assert_eq!(g.vertices().len(), 25);
        assert_eq!(g.edges().len(), 40);
        assert_eq!(g.dof_count(), 129);
    }

    #[test]
    fn dof_count_matches_enumeration() {
        // brute force: collect every distinct node position not on the boundary
        for (l, m) in [(1, 1), (1, 3), (2, 4), (3, 2)] {
            let g = build_grid(GridSpec::new(l, m).unwrap()).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for e in 0..g.edges().len() {
                for i in 0..=m {
                    let (x, y) = g.node_position(e, i);
                    let on_boundary = x.abs() == l as f64 || y.abs() == l as f64;
                    let is_vertex = i == 0 || i == m;
                    if !(on_boundary && is_vertex) {
                        seen.insert(((x * 1e6).round() as i64, (y * 1e6).round() as i64));
                    }
                }
            }
            assert_eq!(seen.len(), g.dof_count(), "L={l} m={m}");
        }
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(GridSpec::new(0, 4).is_err());
        assert!(GridSpec::new(2, 0).is_err());
    }

    #[test]
    fn interior_vertices_have_degree_four() {
        let g = build_grid(GridSpec::new(3, 2).unwrap()).unwrap();
        for &v in g.interior_vertices() {
            assert_eq!(g.degree(v), 4);
        }
    }

    #[test]
    fn every_dof_is_hit_once() {
        let g = build_grid(GridSpec::new(2, 3).unwrap()).unwrap();
        let mut hits = vec![0usize; g.dof_count()];
        for &v in g.interior_vertices() {
            hits[g.vertex_dof(v).unwrap()] += 1;
        }
        for e in 0..g.edges().len() {
            for i in 1..g.mesh() {
                hits[g.node_dof(e, i).unwrap()] += 1;
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
    }

    #[test]
    fn dof_position_agrees_with_node_position() {
        let g = build_grid(GridSpec::new(2, 3).unwrap()).unwrap();
        for e in 0..g.edges().len() {
            for i in 0..=g.mesh() {
                if let Some(d) = g.node_dof(e, i) {
                    assert_eq!(g.dof_position(d), g.node_position(e, i));
                }
            }
        }
    }

    #[test]
    fn tent_norms() {
        let g = build_grid(GridSpec::new(1, 64).unwrap()).unwrap();
        let u = tent(&g);
        assert!((u.mass() - 1.0 / 12.0).abs() < 1e-14);
        assert!((u.kinetic() - 1.0).abs() < 1e-12);
        assert!((u.norm_lp(4.0).unwrap() - (1.0f64 / 80.0).powf(0.25)).abs() < 1e-12);
        assert!((u.grad_l1() - 1.0).abs() < 1e-12);
        assert_eq!(u.norm_linf(), 0.5);
    }

    #[test]
    fn zero_function_norms() {
        let g = build_grid(GridSpec::new(2, 3).unwrap()).unwrap();
        let z = GraphFunction::zeros(g);
        assert_eq!(z.mass(), 0.0);
        assert_eq!(z.kinetic(), 0.0);
        assert_eq!(z.norm_lp(3.5).unwrap(), 0.0);
        assert_eq!(z.norm_linf(), 0.0);
    }

    #[test]
    fn norm_rejects_small_p() {
        let g = build_grid(GridSpec::new(1, 2).unwrap()).unwrap();
        assert!(GraphFunction::zeros(g).norm_lp(0.5).is_err());
    }

    #[test]
    fn embed_rejects_nonzero_endpoints() {
        let g = build_grid(GridSpec::new(1, 4).unwrap()).unwrap();
        assert!(embed_edge_function(&g, 0, &[0.1, 0.2, 0.3, 0.2, 0.0]).is_err());
        let z = embed_edge_function(&g, 0, &[0.0; 5]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn translate_round_trip() {
        let g = build_grid(GridSpec::new(4, 3).unwrap()).unwrap();
        let u = GraphFunction::from_fn(g.clone(), |x, y| (-(x * x + y * y)).exp() * (x.abs() < 1.5 && y.abs() < 1.5) as u8 as f64).unwrap();
        assert_eq!(u.translate(0, 0), u);
        let back = u.translate(1, -2).translate(-1, 2);
        assert_eq!(back, u);
        assert!((u.translate(1, -2).mass() - u.mass()).abs() < 1e-15);
    }

    #[test]
    fn translate_drops_mass_at_boundary() {
        let g = build_grid(GridSpec::new(2, 3).unwrap()).unwrap();
        let u = GraphFunction::from_fn(g.clone(), |x, y| 1.0 + 0.1 * x - 0.05 * y).unwrap();
        for (dj, dk) in [(1, 0), (0, -1), (2, 1)] {
            assert!(u.translate(dj, dk).mass() <= u.mass());
        }
    }

    #[test]
    fn continuity_is_structural() {
        let g = build_grid(GridSpec::new(2, 2).unwrap()).unwrap();
        let u = GraphFunction::from_fn(g, |x, y| x.sin() + y.cos()).unwrap();
        assert!(u.vertex_continuity_holds());
    }
}
