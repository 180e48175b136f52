//! Flat-file dumps of graph functions.
//!
//! A dump is a CSV with header `edge_id,local_s,value` holding every node of
//! every edge (endpoints included, so shared vertices appear once per incident
//! edge), plus a JSON sidecar `{L, m, mass, kinetic}`. Floats are written with
//! 17 significant digits, which makes dump → load → dump byte-identical.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_grid, GraphFunction, GridGraph, GridSpec};

/// Contents of the JSON sidecar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpMeta {
    #[serde(rename = "L")]
    pub half_width: usize,
    pub m: usize,
    pub mass: f64,
    pub kinetic: f64,
}

impl DumpMeta {
    pub fn of(u: &GraphFunction) -> Self {
        let g = u.graph();
        DumpMeta { half_width: g.half_width(), m: g.mesh(), mass: u.mass(), kinetic: u.kinetic() }
    }
}

/// Round-trip float formatting used by every output file of the crate.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// The sidecar sitting next to a CSV dump: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_csv<W: Write>(u: &GraphFunction, out: W) -> Result<()> {
    let g = u.graph();
    let m = g.mesh();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "local_s", "value"])?;
    for e in 0..g.edges().len() {
        for i in 0..=m {
            let s = i as f64 / m as f64;
            w.write_record([e.to_string(), fmt_f64(s), fmt_f64(u.node_value(e, i))])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_meta<W: Write>(u: &GraphFunction, mut out: W) -> Result<()> {
    let meta = DumpMeta::of(u);
    let text = format!(
        "{{\"L\":{},\"m\":{},\"mass\":{},\"kinetic\":{}}}\n",
        meta.half_width,
        meta.m,
        fmt_f64(meta.mass),
        fmt_f64(meta.kinetic)
    );
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Reads a CSV dump on `graph`. Every edge node must appear exactly once, the
/// copies of a vertex on its incident edges must agree exactly, and boundary
/// vertices must be zero.
pub fn read_csv<R: Read>(graph: &Arc<GridGraph>, input: R) -> Result<GraphFunction> {
    let m = graph.mesh();
    let n_edges = graph.edges().len();
    let mut nodes: Vec<Option<f64>> = vec![None; n_edges * (m + 1)];
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["edge_id", "local_s", "value"] {
        return Err(Error::Format(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Format(format!("row {row}: expected 3 fields, got {}", rec.len())));
        }
        let field = |k: usize| -> Result<f64> {
            rec[k].trim().parse::<f64>().map_err(|e| Error::Format(format!("row {row}: {e}")))
        };
        let e: usize = rec[0].trim().parse().map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if e >= n_edges {
            return Err(Error::Format(format!("row {row}: edge {e} out of range")));
        }
        let s = field(1)?;
        let i = (s * m as f64).round();
        if !(0.0..=m as f64).contains(&i) || (s - i / m as f64).abs() > 1e-12 {
            return Err(Error::Format(format!("row {row}: local_s = {s} is not a mesh node")));
        }
        let value = field(2)?;
        if !value.is_finite() {
            return Err(Error::Format(format!("row {row}: non-finite value")));
        }
        let slot = &mut nodes[e * (m + 1) + i as usize];
        if slot.is_some() {
            return Err(Error::Format(format!("row {row}: duplicate node ({e}, {s})")));
        }
        *slot = Some(value);
    }
    if let Some(k) = nodes.iter().position(Option::is_none) {
        return Err(Error::Format(format!("missing node {} on edge {}", k % (m + 1), k / (m + 1))));
    }

    let mut values = vec![0.0; graph.dof_count()];
    let mut vertex_value: Vec<Option<f64>> = vec![None; graph.vertices().len()];
    for (e, edge) in graph.edges().iter().enumerate() {
        let at = |i: usize| nodes[e * (m + 1) + i].unwrap();
        for (v, i) in [(edge.start, 0), (edge.end, m)] {
            let x = at(i);
            match vertex_value[v] {
                Some(prev) if prev != x => {
                    let vx = graph.vertices()[v];
                    return Err(Error::Format(format!(
                        "discontinuous at vertex ({}, {}): {prev} vs {x}",
                        vx.j, vx.k
                    )));
                }
                _ => vertex_value[v] = Some(x),
            }
        }
        for i in 1..m {
            if let Some(d) = graph.node_dof(e, i) {
                values[d] = at(i);
            }
        }
    }
    for (v, x) in vertex_value.iter().enumerate() {
        let x = x.unwrap_or(0.0);
        match graph.vertex_dof(v) {
            Some(d) => values[d] = x,
            None if x != 0.0 => {
                let vx = graph.vertices()[v];
                return Err(Error::Format(format!("boundary vertex ({}, {}) holds {x}", vx.j, vx.k)));
            }
            None => {}
        }
    }
    GraphFunction::new(graph.clone(), values)
}

pub fn read_meta<R: Read>(input: R) -> Result<DumpMeta> {
    Ok(serde_json::from_reader(input)?)
}

/// Writes `u` to `csv_path` and its sidecar.
pub fn dump(u: &GraphFunction, csv_path: &Path) -> Result<()> {
    let mut csv_bytes = Vec::new();
    write_csv(u, &mut csv_bytes)?;
    fs::write(csv_path, csv_bytes)?;
    let mut meta = Vec::new();
    write_meta(u, &mut meta)?;
    fs::write(sidecar_path(csv_path), meta)?;
    Ok(())
}

/// Loads a dump written by [`dump`], rebuilding the grid from the sidecar.
pub fn load(csv_path: &Path) -> Result<GraphFunction> {
    let meta = read_meta(fs::File::open(sidecar_path(csv_path))?)?;
    let graph = build_grid(GridSpec::new(meta.half_width, meta.m)?)?;
    let u = read_csv(&graph, fs::File::open(csv_path)?)?;
    let mass = u.mass();
    if (mass - meta.mass).abs() > 1e-9 * meta.mass.abs().max(1.0) {
        return Err(Error::Format(format!("sidecar mass {} but the data integrates to {mass}", meta.mass)));
    }
    Ok(u)
}
