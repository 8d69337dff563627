//! Plain-text triplet format for operator meshes.
//!
//! ```text
//! dirlab-mesh 1
//! space <SpaceModel as JSON>
//! domain <Domain as JSON>
//! h <f64>
//! spacing <f64> <f64> <f64>
//! nodes <n>
//! entries <nnz>
//! <i> <j> <value>          nnz rows, entries of M = W⁻¹K, row-major
//! <x> <y> <z> <weight>     n rows
//! ```
//!
//! Floats use Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::OperatorMesh;
use crate::error::{Error, Result};
use crate::space::{Domain, SpaceModel};
use crate::sparse::CsrMatrix;

pub fn write_triplet_file(mesh: &OperatorMesh, path: &Path) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "dirlab-mesh 1").unwrap();
    writeln!(s, "space {}", serde_json::to_string(&mesh.domain.space)?).unwrap();
    writeln!(s, "domain {}", serde_json::to_string(&mesh.domain)?).unwrap();
    writeln!(s, "h {:?}", mesh.h).unwrap();
    writeln!(s, "spacing {:?} {:?} {:?}", mesh.spacing[0], mesh.spacing[1], mesh.spacing[2]).unwrap();
    writeln!(s, "nodes {}", mesh.n()).unwrap();
    writeln!(s, "entries {}", mesh.stiffness.nnz()).unwrap();
    for (i, j, v) in mesh.stiffness.triplets() {
        writeln!(s, "{i} {j} {:?}", v / mesh.weights[i]).unwrap();
    }
    for (p, w) in mesh.nodes.iter().zip(&mesh.weights) {
        writeln!(s, "{:?} {:?} {:?} {:?}", p[0], p[1], p[2], w).unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Format(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| Error::Format(format!("expected `{key}`, found {line:?}")))
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Format(format!("bad number {s:?}")))
}

pub fn read_triplet_file(path: &Path) -> Result<OperatorMesh> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some("dirlab-mesh 1") {
        return Err(Error::Format("not a dirlab mesh file".into()));
    }
    let space: SpaceModel = serde_json::from_str(field(lines.next(), "space")?)?;
    let mut domain: Domain = serde_json::from_str(field(lines.next(), "domain")?)?;
    domain.space = space;
    let h: f64 = num(field(lines.next(), "h")?)?;
    let sp: Vec<f64> = field(lines.next(), "spacing")?
        .split_whitespace()
        .map(num)
        .collect::<Result<_>>()?;
    if sp.len() != 3 {
        return Err(Error::Format("spacing needs three values".into()));
    }
    let n: usize = num(field(lines.next(), "nodes")?)?;
    let nnz: usize = num(field(lines.next(), "entries")?)?;
    let mut entries = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let l = lines.next().ok_or_else(|| Error::Format("truncated entries".into()))?;
        let mut it = l.split_whitespace();
        let i: usize = num(it.next().unwrap_or(""))?;
        let j: usize = num(it.next().unwrap_or(""))?;
        let v: f64 = num(it.next().unwrap_or(""))?;
        if i >= n || j >= n {
            return Err(Error::Format(format!("entry ({i}, {j}) outside {n} nodes")));
        }
        entries.push((i, j, v));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        let l = lines.next().ok_or_else(|| Error::Format("truncated nodes".into()))?;
        let v: Vec<f64> = l.split_whitespace().map(num).collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(Error::Format(format!("node row needs four values: {l:?}")));
        }
        nodes.push([v[0], v[1], v[2]]);
        weights.push(v[3]);
    }
    let trip = entries.into_iter().map(|(i, j, v)| (i, j, v * weights[i])).collect();
    Ok(OperatorMesh {
        nodes,
        native: None,
        weights,
        stiffness: CsrMatrix::from_triplets(n, trip),
        h,
        spacing: [sp[0], sp[1], sp[2]],
        label: format!("file:{}", path.display()),
        domain,
        lattice: None,
    })
}
