//! Adjacency, degree and Laplacian matrices of a level mesh, and the graph
//! energy `E(u, v) = Σ_{x~y} (u(x)-u(y))(v(x)-v(y)) = Uᵀ Δ V`.

use crate::error::{Error, Result};
use crate::mesh::LevelMesh;
use crate::sparse::SparseMatrix;

/// Real values indexed by mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalVector {
    pub values: Vec<f64>,
    pub mesh_level: usize,
}

impl NodalVector {
    pub fn new(values: Vec<f64>, mesh_level: usize) -> Self {
        NodalVector { values, mesh_level }
    }

    pub fn zeros(mesh: &LevelMesh) -> Self {
        Self::constant(mesh, 0.0)
    }

    pub fn constant(mesh: &LevelMesh, c: f64) -> Self {
        NodalVector {
            values: vec![c; mesh.vertex_count()],
            mesh_level: mesh.level(),
        }
    }

    /// Samples `f` at every vertex.
    pub fn from_fn(mesh: &LevelMesh, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        NodalVector {
            values: mesh.vertices().iter().map(|p| f(p.coords())).collect(),
            mesh_level: mesh.level(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check(&self, mesh: &LevelMesh) -> Result<()> {
        if self.values.len() != mesh.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: mesh.vertex_count(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

pub fn adjacency(mesh: &LevelMesh) -> SparseMatrix {
    let n = mesh.vertex_count();
    let t = mesh
        .edges()
        .iter()
        .flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)])
        .collect();
    SparseMatrix::from_triplets(n, n, t).expect("edge indices are validated by the mesh")
}

/// Vertex degrees counted from the edge list.
pub fn degrees(mesh: &LevelMesh) -> Vec<usize> {
    let mut deg = vec![0usize; mesh.vertex_count()];
    for &(a, b) in mesh.edges() {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

pub fn degree(mesh: &LevelMesh) -> SparseMatrix {
    let n = mesh.vertex_count();
    let t = degrees(mesh)
        .into_iter()
        .enumerate()
        .map(|(i, d)| (i, i, d as f64))
        .collect();
    SparseMatrix::from_triplets(n, n, t).expect("diagonal indices are in range")
}

/// `Δ = P - A`.
pub fn graph_laplacian(mesh: &LevelMesh) -> SparseMatrix {
    let n = mesh.vertex_count();
    let mut t: Vec<(usize, usize, f64)> = degrees(mesh)
        .into_iter()
        .enumerate()
        .map(|(i, d)| (i, i, d as f64))
        .collect();
    t.extend(
        mesh.edges()
            .iter()
            .flat_map(|&(a, b)| [(a, b, -1.0), (b, a, -1.0)]),
    );
    SparseMatrix::from_triplets(n, n, t).expect("edge indices are validated by the mesh")
}

/// `Uᵀ L V`.
pub fn energy(lap: &SparseMatrix, u: &NodalVector, v: &NodalVector) -> Result<f64> {
    if u.len() != lap.ncols() || v.len() != lap.nrows() {
        return Err(Error::DimensionMismatch {
            expected: lap.nrows(),
            found: if u.len() != lap.ncols() {
                u.len()
            } else {
                v.len()
            },
        });
    }
    Ok(lap
        .entries()
        .iter()
        .map(|&(r, c, a)| u.values[r] * a * v.values[c])
        .sum())
}
