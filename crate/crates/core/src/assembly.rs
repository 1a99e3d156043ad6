//! Vertex weights, load vectors and stiffness matrices for the three
//! discretizations: graph differences, edge-integral elements and
//! area-integral elements.
//!
//! Element integrals are evaluated in closed form, so the only error is
//! floating-point rounding. Length and area are the plain Euclidean measures of
//! the level-n approximation (not rescaled to unit total mass).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::graph::{graph_laplacian, NodalVector};
use crate::mesh::LevelMesh;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// Equal mass on every level-n copy of the seed, split over its vertices.
    SelfSimilar,
    /// Length measure on the edges of `W_n`.
    EdgeLength,
    /// Area measure on the triangular cells of `W_n`.
    TriangleArea,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeights {
    pub weights: Vec<f64>,
    pub kind: MeasureKind,
    pub level: usize,
}

impl VertexWeights {
    /// Compensated (Neumaier) sum, so the total of thousands of equal small
    /// weights stays within a few ulps of the exact mass.
    pub fn total(&self) -> f64 {
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for &w in &self.weights {
            let t = s + w;
            c += if s.abs() >= w.abs() {
                (s - t) + w
            } else {
                (w - t) + s
            };
            s = t;
        }
        s + c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    FdGraph,
    FemEdge,
    FemArea,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::FdGraph => "fd_graph",
            Formulation::FemEdge => "fem_edge",
            Formulation::FemArea => "fem_area",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd_graph" | "fd-graph" => Ok(Formulation::FdGraph),
            "fem_edge" | "fem-edge" => Ok(Formulation::FemEdge),
            "fem_area" | "fem-area" => Ok(Formulation::FemArea),
            _ => Err(Error::Parse(format!("unknown formulation `{s}`"))),
        }
    }
}

/// A symmetric positive semidefinite operator that annihilates constants.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMatrix {
    pub matrix: SparseMatrix,
    pub formulation: Formulation,
    pub level: usize,
}

fn triangle_area(mesh: &LevelMesh, c: &[usize; 3]) -> f64 {
    let v = mesh.vertices();
    let e1 = v[c[1]].sub(&v[c[0]]);
    let e2 = v[c[2]].sub(&v[c[0]]);
    let cross = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    0.5 * cross.norm()
}

fn require_cells(mesh: &LevelMesh) -> Result<()> {
    if mesh.cells().is_empty() {
        Err(Error::MissingCells)
    } else {
        Ok(())
    }
}

pub fn vertex_weights(mesh: &LevelMesh, kind: MeasureKind) -> Result<VertexWeights> {
    let mut w = vec![0.0; mesh.vertex_count()];
    match kind {
        MeasureKind::SelfSimilar => {
            // the copies of the seed are the cells when tracked, otherwise the
            // edges (every non-cell family has a single-segment seed)
            let mut count = vec![0u32; w.len()];
            let (copies, per_copy) = if mesh.cells().is_empty() {
                for &(a, b) in mesh.edges() {
                    count[a] += 1;
                    count[b] += 1;
                }
                (mesh.edges().len(), 2.0)
            } else {
                for c in mesh.cells() {
                    c.iter().for_each(|&i| count[i] += 1);
                }
                (mesh.cells().len(), 3.0)
            };
            let share = 1.0 / (copies as f64 * per_copy);
            for (wi, &k) in w.iter_mut().zip(&count) {
                *wi = k as f64 * share;
            }
        }
        MeasureKind::EdgeLength => {
            for (e, &(a, b)) in mesh.edges().iter().enumerate() {
                let half = 0.5 * mesh.edge_length(e);
                w[a] += half;
                w[b] += half;
            }
        }
        MeasureKind::TriangleArea => {
            require_cells(mesh)?;
            for c in mesh.cells() {
                let third = triangle_area(mesh, c) / 3.0;
                c.iter().for_each(|&i| w[i] += third);
            }
        }
    }
    Ok(VertexWeights {
        weights: w,
        kind,
        level: mesh.level(),
    })
}

/// `b_x = ∫ g φ_x` with `g` replaced by its piecewise-linear interpolant
/// (edge and area measures) or sampled at vertices (self-similar measure).
pub fn load_vector(mesh: &LevelMesh, kind: MeasureKind, g: &NodalVector) -> Result<NodalVector> {
    g.check(mesh)?;
    let gv = &g.values;
    let mut b = vec![0.0; mesh.vertex_count()];
    match kind {
        MeasureKind::SelfSimilar => {
            let w = vertex_weights(mesh, kind)?;
            for ((bi, wi), gi) in b.iter_mut().zip(&w.weights).zip(gv) {
                *bi = wi * gi;
            }
        }
        MeasureKind::EdgeLength => {
            for (e, &(x, y)) in mesh.edges().iter().enumerate() {
                let len = mesh.edge_length(e);
                b[x] += len * (gv[x] / 3.0 + gv[y] / 6.0);
                b[y] += len * (gv[y] / 3.0 + gv[x] / 6.0);
            }
        }
        MeasureKind::TriangleArea => {
            require_cells(mesh)?;
            for c in mesh.cells() {
                let s = triangle_area(mesh, c);
                let sum = gv[c[0]] + gv[c[1]] + gv[c[2]];
                for &i in c {
                    b[i] += s * (sum + gv[i]) / 12.0;
                }
            }
        }
    }
    Ok(NodalVector::new(b, mesh.level()))
}

pub fn fd_graph_stiffness(mesh: &LevelMesh) -> StiffnessMatrix {
    StiffnessMatrix {
        matrix: graph_laplacian(mesh),
        formulation: Formulation::FdGraph,
        level: mesh.level(),
    }
}

/// Piecewise-linear elements along the edges: each edge of length `L`
/// contributes `1/L · [[1, -1], [-1, 1]]`.
pub fn fem_edge_stiffness(mesh: &LevelMesh) -> Result<StiffnessMatrix> {
    if mesh.edges().is_empty() {
        return Err(Error::InvalidMesh("mesh has no edges".into()));
    }
    let mut t = Vec::with_capacity(4 * mesh.edges().len());
    for (e, &(a, b)) in mesh.edges().iter().enumerate() {
        let len = mesh.edge_length(e);
        if len <= 0.0 {
            return Err(Error::ZeroLengthEdge(e));
        }
        let k = 1.0 / len;
        t.extend([(a, a, k), (b, b, k), (a, b, -k), (b, a, -k)]);
    }
    let n = mesh.vertex_count();
    Ok(StiffnessMatrix {
        matrix: SparseMatrix::from_triplets(n, n, t)?,
        formulation: Formulation::FemEdge,
        level: mesh.level(),
    })
}

/// Linear-triangle element matrix `∫ ∇φ_i·∇φ_j` for a triangle embedded in R² or R³.
///
/// With `F(ξ) = J ξ + x₁` mapping the reference triangle (0,0),(1,0),(0,1)
/// onto the cell, `∇φ_i = J G⁻¹ ĝ_i` where `G = JᵀJ` and `ĝ_i` are the
/// reference gradients, so the entry is `ĝ_iᵀ G⁻¹ ĝ_j · √det G / 2`.
pub fn triangle_element_matrix(p: [&[f64]; 3]) -> Option<[[f64; 3]; 3]> {
    let d = p[0].len();
    let col = |k: usize| -> Vec<f64> { (0..d).map(|i| p[k][i] - p[0][i]).collect() };
    let (j1, j2) = (col(1), col(2));
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (g11, g12, g22) = (dot(&j1, &j1), dot(&j1, &j2), dot(&j2, &j2));
    let det = g11 * g22 - g12 * g12;
    if !(det > f64::EPSILON * g11 * g22) {
        return None;
    }
    let inv = [[g22 / det, -g12 / det], [-g12 / det, g11 / det]];
    let area = 0.5 * det.sqrt();
    let grads = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let gi = grads[i];
            let gj = grads[j];
            let q = gi[0] * (inv[0][0] * gj[0] + inv[0][1] * gj[1])
                + gi[1] * (inv[1][0] * gj[0] + inv[1][1] * gj[1]);
            k[i][j] = area * q;
        }
    }
    Some(k)
}

pub fn fem_area_stiffness(mesh: &LevelMesh) -> Result<StiffnessMatrix> {
    require_cells(mesh)?;
    let v = mesh.vertices();
    let mut t = Vec::with_capacity(9 * mesh.cells().len());
    for (ci, c) in mesh.cells().iter().enumerate() {
        let k = triangle_element_matrix([v[c[0]].coords(), v[c[1]].coords(), v[c[2]].coords()])
            .ok_or(Error::DegenerateCell(ci))?;
        for (a, row) in k.iter().enumerate() {
            for (b, &val) in row.iter().enumerate() {
                t.push((c[a], c[b], val));
            }
        }
    }
    let n = mesh.vertex_count();
    Ok(StiffnessMatrix {
        matrix: SparseMatrix::from_triplets(n, n, t)?,
        formulation: Formulation::FemArea,
        level: mesh.level(),
    })
}

/// Assembles the stiffness matrix of `formulation` on `mesh`.
pub fn stiffness(mesh: &LevelMesh, formulation: Formulation) -> Result<StiffnessMatrix> {
    match formulation {
        Formulation::FdGraph => Ok(fd_graph_stiffness(mesh)),
        Formulation::FemEdge => fem_edge_stiffness(mesh),
        Formulation::FemArea => fem_area_stiffness(mesh),
    }
}
