//! Level-m Sierpiński gasket graphs with Dirichlet corners.

use std::collections::HashMap;

use super::OperatorMesh;
use crate::error::{invalid, Result};
use crate::space::{make_domain, Point, Shape, SpaceModel};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct GasketGraph {
    pub level: u32,
    /// Integer coordinates in the basis `2^{-m}(1, 0)`, `2^{-m}(½, √3/2)`.
    pub vertices: Vec<(i64, i64)>,
    pub edges: Vec<(usize, usize)>,
    pub corners: [usize; 3],
}

impl GasketGraph {
    pub fn position(&self, v: usize) -> Point {
        let s = 0.5f64.powi(self.level as i32);
        let (i, j) = self.vertices[v];
        [s * (i as f64 + 0.5 * j as f64), s * j as f64 * 3f64.sqrt() / 2.0, 0.0]
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }
}

pub fn gasket_graph(level: u32) -> GasketGraph {
    let side = 1i64 << level;
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut id = |v: (i64, i64), vertices: &mut Vec<(i64, i64)>| -> usize {
        *ids.entry(v).or_insert_with(|| {
            vertices.push(v);
            vertices.len() - 1
        })
    };
    let mut stack = vec![(0i64, 0i64, side)];
    while let Some((i, j, s)) = stack.pop() {
        if s == 1 {
            let a = id((i, j), &mut vertices);
            let b = id((i + 1, j), &mut vertices);
            let c = id((i, j + 1), &mut vertices);
            edges.push((a, b));
            edges.push((b, c));
            edges.push((a, c));
        } else {
            let h = s / 2;
            stack.push((i, j + h, h));
            stack.push((i + h, j, h));
            stack.push((i, j, h));
        }
    }
    let corners = [ids[&(0, 0)], ids[&(side, 0)], ids[&(0, side)]];
    GasketGraph {
        level,
        vertices,
        edges,
        corners,
    }
}

/// `5^m` times the graph Laplacian on the non-corner vertices, written as
/// stiffness `(5/3)^m L` over node masses `3^{-m}`.
pub fn assemble_gasket(level: u32) -> Result<OperatorMesh> {
    if !(1..=8).contains(&level) {
        return invalid(format!("gasket level must be in 1..=8, got {level}"));
    }
    let g = gasket_graph(level);
    let mut map = vec![usize::MAX; g.vertices.len()];
    let mut nodes = Vec::new();
    for v in 0..g.vertices.len() {
        if !g.corners.contains(&v) {
            map[v] = nodes.len();
            nodes.push(g.position(v));
        }
    }
    let energy = (5.0f64 / 3.0).powi(level as i32);
    let mut trip = Vec::with_capacity(4 * g.edges.len());
    for &(a, b) in &g.edges {
        let (i, j) = (map[a], map[b]);
        if i != usize::MAX {
            trip.push((i, i, energy));
        }
        if j != usize::MAX {
            trip.push((j, j, energy));
        }
        if i != usize::MAX && j != usize::MAX {
            trip.push((i, j, -energy));
            trip.push((j, i, -energy));
        }
    }
    let n = nodes.len();
    let weights = vec![3.0f64.powi(-(level as i32)); n];
    let domain = make_domain(SpaceModel::gasket(level), Shape::GasketCells { words: vec![] })?;
    Ok(OperatorMesh {
        nodes,
        native: None,
        weights,
        stiffness: CsrMatrix::from_triplets(n, trip),
        h: 0.5f64.powi(level as i32),
        spacing: [0.5f64.powi(level as i32), 0.0, 0.0],
        domain,
        lattice: None,
        label: format!("gasket:m={level}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_and_edge_counts() {
        for m in 0..6u32 {
            let g = gasket_graph(m);
            assert_eq!(g.vertices.len(), (3usize.pow(m + 1) + 3) / 2);
            assert_eq!(g.edges.len(), 3usize.pow(m + 1));
            let d = g.degree();
            for (v, deg) in d.iter().enumerate() {
                let expect = if g.corners.contains(&v) { 2 } else { 4 };
                assert_eq!(*deg, expect);
            }
        }
    }

    #[test]
    fn constants_only_feel_the_corners() {
        let m = assemble_gasket(3).unwrap();
        let ones = vec![1.0; m.n()];
        let mv = m.apply(&ones);
        let g = gasket_graph(3);
        let corner_pos: Vec<Point> = g.corners.iter().map(|&c| g.position(c)).collect();
        for (p, v) in m.nodes.iter().zip(&mv) {
            let adjacent = corner_pos
                .iter()
                .any(|c| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() < 0.13);
            if adjacent {
                assert!(*v > 0.0);
            } else {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn level_range() {
        assert!(assemble_gasket(0).is_err());
        assert!(assemble_gasket(9).is_err());
    }
}
