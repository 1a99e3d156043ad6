//! Numerical analysis on post-critically finite self-similar fractals.
//!
//! The crate builds graph approximations of the Sierpinski gasket, the Koch
//! curve and two Hata trees, assembles graph Laplacians and finite element
//! stiffness matrices on them, estimates renormalization constants by
//! comparing un-normalized solutions at consecutive levels, and solves
//! renormalized Dirichlet problems.
//!
//! ```
//! use fraclap::{estimate_fd_q, Family};
//!
//! let q = estimate_fd_q(Family::Sierpinski, 3).unwrap();
//! assert!((q.mean - 5.0).abs() < 1e-6);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod graph;
pub mod ifs;
pub mod io;
pub mod mesh;
pub mod renorm;
pub mod solver;
pub mod sparse;

pub use assembly::{
    fd_graph_stiffness, fem_area_stiffness, fem_edge_stiffness, load_vector, stiffness,
    vertex_weights, Formulation, MeasureKind, StiffnessMatrix, VertexWeights,
};
pub use error::{Error, ErrorKind, Result};
pub use expr::RhsExpression;
pub use geometry::{apply_map, AffineMap, Point};
pub use graph::{adjacency, degree, energy, graph_laplacian, NodalVector};
pub use ifs::{builtin, builtin_named, Family, IFSystem};
pub use mesh::{embed, iterate, EmbeddingMap, LevelMesh};
pub use renorm::{
    estimate, estimate_energy_r, estimate_fd_q, estimate_range, renormalize, solve_online,
    Direction, EstimateMethod, OnlineMethod, RenormEstimate, RenormalizedOperator,
};
pub use solver::{linear_solve, partition, solve_dirichlet, DirichletProblem, Solution};
pub use sparse::SparseMatrix;
