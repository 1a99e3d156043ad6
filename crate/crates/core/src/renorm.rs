//! Numerical renormalization constants and renormalized solves.
//!
//! The constant is estimated by solving the un-normalized model problem
//! (unit forcing, zero boundary data) at two consecutive levels and comparing
//! the solutions at the vertices the levels share. Once known, the level-n
//! operator is scaled by `constantⁿ` and the actual problem is solved.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{
    fd_graph_stiffness, fem_area_stiffness, fem_edge_stiffness, load_vector, Formulation,
    MeasureKind, StiffnessMatrix,
};
use crate::error::{Error, Result};
use crate::graph::NodalVector;
use crate::ifs::{builtin, Family};
use crate::mesh::{embed, iterate, LevelMesh};
use crate::solver::{solve_dirichlet_with, DirichletProblem, Solution, SolverOptions};
use crate::sparse::SparseMatrix;

/// Ratios whose denominator is below this fraction of `‖z_n‖_∞` are skipped.
pub const DENOMINATOR_GUARD: f64 = 1e-14;

/// Which model problem an estimate is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    /// Graph Laplacian with pointwise unit load (`q`).
    FdQ,
    /// Graph Laplacian with self-similar measure load (`r`).
    GraphEnergy,
    /// Edge-integral stiffness with edge-length load.
    FemEdge,
    /// Area-integral stiffness with triangle-area load.
    FemArea,
}

impl EstimateMethod {
    pub fn name(self) -> &'static str {
        match self {
            EstimateMethod::FdQ => "fd",
            EstimateMethod::GraphEnergy => "energy",
            EstimateMethod::FemEdge => "fem-edge",
            EstimateMethod::FemArea => "fem-area",
        }
    }
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(EstimateMethod::FdQ),
            "energy" | "graph_energy" => Ok(EstimateMethod::GraphEnergy),
            "fem-edge" | "fem_edge" => Ok(EstimateMethod::FemEdge),
            "fem-area" | "fem_area" => Ok(EstimateMethod::FemArea),
            _ => Err(Error::Parse(format!("unknown estimate method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `z_{n+1}(x) / z_n(x)`.
    FineOverCoarse,
    /// `z_n(x) / z_{n+1}(x)`.
    CoarseOverFine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenormEstimate {
    pub level_pair: (usize, usize),
    /// `(coarse vertex index, ratio)` for every coarse interior vertex kept.
    pub ratios: Vec<(usize, f64)>,
    pub max: f64,
    pub mean: f64,
    pub min: f64,
    pub direction: Direction,
    pub method: EstimateMethod,
    pub excluded_count: usize,
}

/// Operator and load of the model problem `A z = b`, `z = 0` on `V_0`, with
/// unit forcing integrated against the method's measure.
pub fn model_problem(
    mesh: &LevelMesh,
    method: EstimateMethod,
) -> Result<(SparseMatrix, NodalVector)> {
    let one = NodalVector::constant(mesh, 1.0);
    let (op, load) = match method {
        EstimateMethod::FdQ => (fd_graph_stiffness(mesh), one),
        EstimateMethod::GraphEnergy => (
            fd_graph_stiffness(mesh),
            load_vector(mesh, MeasureKind::SelfSimilar, &one)?,
        ),
        EstimateMethod::FemEdge => (
            fem_edge_stiffness(mesh)?,
            load_vector(mesh, MeasureKind::EdgeLength, &one)?,
        ),
        EstimateMethod::FemArea => {
            if mesh.cells().is_empty() {
                return Err(Error::MethodMismatch {
                    method: method.name().into(),
                    family: mesh.family().name().into(),
                });
            }
            (
                fem_area_stiffness(mesh)?,
                load_vector(mesh, MeasureKind::TriangleArea, &one)?,
            )
        }
    };
    Ok((op.matrix, load))
}

/// Solves the model problem with homogeneous boundary data.
pub fn model_solution(mesh: &LevelMesh, op: SparseMatrix, load: NodalVector) -> Result<Vec<f64>> {
    let zeros = vec![0.0; mesh.boundary_indices().len()];
    let problem = DirichletProblem::new(mesh, op, load, &zeros)?;
    Ok(solve_dirichlet_with(&problem, &SolverOptions::default())?
        .values
        .values)
}

/// Forms `z_fine(x) / z_coarse(x)` over the coarse interior vertices.
pub fn ratio_estimate(
    coarse: &LevelMesh,
    fine: &LevelMesh,
    z_coarse: &[f64],
    z_fine: &[f64],
    method: EstimateMethod,
) -> Result<RenormEstimate> {
    let map = embed(coarse, fine)?;
    let scale = z_coarse.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut ratios = Vec::new();
    let mut excluded = 0;
    for x in coarse.interior_indices() {
        let den = z_coarse[x];
        if !(den.abs() >= DENOMINATOR_GUARD * scale) || den == 0.0 {
            excluded += 1;
            continue;
        }
        ratios.push((x, z_fine[map.fine_index(x)] / den));
    }
    if ratios.is_empty() {
        return Err(Error::AllExcluded);
    }
    let values = ratios.iter().map(|r| r.1);
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = values.clone().fold(f64::INFINITY, f64::min);
    let mean = values.sum::<f64>() / ratios.len() as f64;
    Ok(RenormEstimate {
        level_pair: (coarse.level(), fine.level()),
        ratios,
        max,
        mean: mean.clamp(min, max),
        min,
        direction: Direction::FineOverCoarse,
        method,
        excluded_count: excluded,
    })
}

/// Estimate from levels `(n, n+1)` of `family`.
pub fn estimate(family: Family, n: usize, method: EstimateMethod) -> Result<RenormEstimate> {
    if n < 1 {
        return Err(Error::InvalidLevel(
            "the coarse level of an estimate must be at least 1".into(),
        ));
    }
    if method == EstimateMethod::FemArea && !builtin(family).cell_generation() {
        return Err(Error::MethodMismatch {
            method: method.name().into(),
            family: family.name().into(),
        });
    }
    let ifs = builtin(family);
    let coarse = iterate(&ifs, n)?;
    let fine = iterate(&ifs, n + 1)?;
    let (op_c, b_c) = model_problem(&coarse, method)?;
    let (op_f, b_f) = model_problem(&fine, method)?;
    let z_c = model_solution(&coarse, op_c, b_c)?;
    let z_f = model_solution(&fine, op_f, b_f)?;
    ratio_estimate(&coarse, &fine, &z_c, &z_f, method)
}

/// `q_{n,n+1}` for the graph Laplacian with pointwise unit forcing.
pub fn estimate_fd_q(family: Family, n: usize) -> Result<RenormEstimate> {
    estimate(family, n, EstimateMethod::FdQ)
}

/// `r_{n,n+1}` for an energy formulation; `formulation` selects the operator
/// and its natural measure.
pub fn estimate_energy_r(
    family: Family,
    n: usize,
    formulation: Formulation,
) -> Result<RenormEstimate> {
    let method = match formulation {
        Formulation::FdGraph => EstimateMethod::GraphEnergy,
        Formulation::FemEdge => EstimateMethod::FemEdge,
        Formulation::FemArea => EstimateMethod::FemArea,
    };
    estimate(family, n, method)
}

/// Estimates for every consecutive pair in `from..=to`.
pub fn estimate_range(
    family: Family,
    from: usize,
    to: usize,
    method: EstimateMethod,
) -> Result<Vec<RenormEstimate>> {
    if to <= from {
        return Err(Error::InvalidLevel(format!(
            "level range {from}:{to} needs at least two levels"
        )));
    }
    (from..to).map(|n| estimate(family, n, method)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizedOperator {
    pub base: StiffnessMatrix,
    pub constant: f64,
    pub level: usize,
    pub scaled: SparseMatrix,
}

/// `constantⁿ · base`.
pub fn renormalize(
    base: &StiffnessMatrix,
    constant: f64,
    n: usize,
) -> Result<RenormalizedOperator> {
    if !(constant > 0.0) || !constant.is_finite() {
        return Err(Error::NonPositiveConstant(constant));
    }
    let factor = constant.powi(n as i32);
    if !factor.is_finite() || factor == 0.0 {
        return Err(Error::ScaleOverflow { constant, level: n });
    }
    Ok(RenormalizedOperator {
        base: base.clone(),
        constant,
        level: n,
        scaled: base.matrix.scaled(factor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OnlineMethod {
    /// Renormalized graph Laplacian, forcing sampled at vertices.
    Rfd,
    /// Renormalized edge-integral elements.
    Rfem1d,
    /// Renormalized area-integral elements.
    Rfem2d,
}

impl OnlineMethod {
    pub fn name(self) -> &'static str {
        match self {
            OnlineMethod::Rfd => "rfd",
            OnlineMethod::Rfem1d => "rfem1d",
            OnlineMethod::Rfem2d => "rfem2d",
        }
    }

    /// Model problem whose ratio estimates this method's constant.
    pub fn estimate_method(self) -> EstimateMethod {
        match self {
            OnlineMethod::Rfd => EstimateMethod::FdQ,
            OnlineMethod::Rfem1d => EstimateMethod::FemEdge,
            OnlineMethod::Rfem2d => EstimateMethod::FemArea,
        }
    }
}

impl fmt::Display for OnlineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OnlineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rfd" => Ok(OnlineMethod::Rfd),
            "rfem1d" => Ok(OnlineMethod::Rfem1d),
            "rfem2d" => Ok(OnlineMethod::Rfem2d),
            _ => Err(Error::Parse(format!("unknown solve method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OnlineOptions {
    /// Multiplies the edge-length load of `rfem1d`. The default `0.5` converts
    /// edge length to the self-similar measure (`∫f dμ_n ≈ ½∫f dν_n`).
    pub edge_load_factor: f64,
    pub solver: SolverOptions,
}

impl Default for OnlineOptions {
    fn default() -> Self {
        OnlineOptions {
            edge_load_factor: 0.5,
            solver: SolverOptions::default(),
        }
    }
}

/// Level pair used to estimate the constant for a solve at level `n`.
pub fn auto_estimate_pair(n: usize) -> (usize, usize) {
    if n >= 3 {
        (n - 2, n - 1)
    } else {
        (1, 2)
    }
}

/// Estimates the constant for `method` on `family` ahead of a solve at level `n`.
pub fn auto_constant(family: Family, n: usize, method: OnlineMethod) -> Result<RenormEstimate> {
    let (coarse, _) = auto_estimate_pair(n);
    estimate(family, coarse, method.estimate_method())
}

/// Solves `constantⁿ A u = b(g)` on the interior with `u = h` on `V_0`.
pub fn solve_online(
    mesh: &LevelMesh,
    method: OnlineMethod,
    constant: f64,
    g: &NodalVector,
    h: &[f64],
) -> Result<Solution> {
    solve_online_with(mesh, method, constant, g, h, &OnlineOptions::default())
}

pub fn solve_online_with(
    mesh: &LevelMesh,
    method: OnlineMethod,
    constant: f64,
    g: &NodalVector,
    h: &[f64],
    opts: &OnlineOptions,
) -> Result<Solution> {
    g.check(mesh)?;
    let (base, load) = match method {
        OnlineMethod::Rfd => (fd_graph_stiffness(mesh), g.clone()),
        OnlineMethod::Rfem1d => {
            let mut b = load_vector(mesh, MeasureKind::EdgeLength, g)?;
            b.values
                .iter_mut()
                .for_each(|v| *v *= opts.edge_load_factor);
            (fem_edge_stiffness(mesh)?, b)
        }
        OnlineMethod::Rfem2d => {
            if mesh.cells().is_empty() {
                return Err(Error::MethodMismatch {
                    method: method.name().into(),
                    family: mesh.family().name().into(),
                });
            }
            (
                fem_area_stiffness(mesh)?,
                load_vector(mesh, MeasureKind::TriangleArea, g)?,
            )
        }
    };
    let op = renormalize(&base, constant, mesh.level())?;
    let problem = DirichletProblem::new(mesh, op.scaled, load, h)?;
    let mut sol = solve_dirichlet_with(&problem, &opts.solver)?;
    sol.method = method.name().into();
    sol.renorm_constant = Some(constant);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_laplacian;

    #[test]
    fn level_zero_rejected() {
        assert!(matches!(
            estimate_fd_q(Family::Sierpinski, 0),
            Err(Error::InvalidLevel(_))
        ));
    }

    #[test]
    fn area_method_needs_cells() {
        assert!(matches!(
            estimate_energy_r(Family::Koch, 2, Formulation::FemArea),
            Err(Error::MethodMismatch { .. })
        ));
        let m = iterate(&builtin(Family::Koch), 2).unwrap();
        let g = NodalVector::zeros(&m);
        assert!(matches!(
            solve_online(&m, OnlineMethod::Rfem2d, 1.0, &g, &[1.0, 0.0]),
            Err(Error::MethodMismatch { .. })
        ));
    }

    #[test]
    fn renormalize_scales() {
        let m = iterate(&builtin(Family::Sierpinski), 2).unwrap();
        let base = fd_graph_stiffness(&m);
        let same = renormalize(&base, 1.0, 2).unwrap();
        assert_eq!(same.scaled, base.matrix);
        let five = renormalize(&base, 5.0, 2).unwrap();
        for (&(r, c, v), &(r2, c2, w)) in base.matrix.entries().iter().zip(five.scaled.entries()) {
            assert_eq!((r, c), (r2, c2));
            assert_eq!(w, 25.0 * v);
        }
        assert!(matches!(
            renormalize(&base, 0.0, 2),
            Err(Error::NonPositiveConstant(_))
        ));
        assert!(matches!(
            renormalize(&base, -1.0, 2),
            Err(Error::NonPositiveConstant(_))
        ));
    }

    #[test]
    fn edge_renormalization_is_five_halves_power() {
        let n = 3;
        let m = iterate(&builtin(Family::Sierpinski), n).unwrap();
        let a1 = fem_edge_stiffness(&m).unwrap();
        let op = renormalize(&a1, 1.25, n).unwrap();
        let expected = graph_laplacian(&m).scaled(2.5f64.powi(n as i32));
        for (&(_, _, v), &(_, _, w)) in op.scaled.entries().iter().zip(expected.entries()) {
            assert!((v - w).abs() <= 1e-12 * w.abs());
        }
    }

    #[test]
    fn auto_pair() {
        assert_eq!(auto_estimate_pair(5), (3, 4));
        assert_eq!(auto_estimate_pair(3), (1, 2));
        assert_eq!(auto_estimate_pair(2), (1, 2));
        assert_eq!(auto_estimate_pair(0), (1, 2));
    }

    #[test]
    fn all_excluded_when_coarse_solution_vanishes() {
        let c = iterate(&builtin(Family::Koch), 1).unwrap();
        let f = iterate(&builtin(Family::Koch), 2).unwrap();
        let zc = vec![0.0; c.vertex_count()];
        let zf = vec![1.0; f.vertex_count()];
        assert!(matches!(
            ratio_estimate(&c, &f, &zc, &zf, EstimateMethod::FdQ),
            Err(Error::AllExcluded)
        ));
    }
}
