//! Dirichlet problems `A u = f` on `V_n \ V_0` with `u = h` on `V_0`, solved
//! through the interior block system `A_II U_I = f_I - A_I0 U_0`.

use std::collections::{BTreeMap, VecDeque};

use sprs::{FillInReduction, SymmetryCheck};
use sprs_ldl::Ldl;

use crate::error::{Error, Result};
use crate::graph::NodalVector;
use crate::mesh::LevelMesh;
use crate::sparse::SparseMatrix;

/// Interior/boundary block split of a square operator.
#[derive(Debug, Clone)]
pub struct Partition {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub a_ii: SparseMatrix,
    pub a_i0: SparseMatrix,
}

pub fn partition(a: &SparseMatrix, boundary: &[usize]) -> Result<Partition> {
    let n = a.nrows();
    let mut is_boundary = vec![false; n];
    for &b in boundary {
        if b >= n {
            return Err(Error::BoundaryValues(format!(
                "boundary index {b} outside a {n}x{n} operator"
            )));
        }
        is_boundary[b] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&i| !is_boundary[i]).collect();
    if interior.is_empty() {
        return Err(Error::EmptyInterior);
    }
    Ok(Partition {
        a_ii: a.select(&interior, &interior),
        a_i0: a.select(&interior, boundary),
        interior,
        boundary: boundary.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Systems with at most this many unknowns are factorized directly.
    pub direct_limit: usize,
    pub cg_relative_tolerance: f64,
    /// Conjugate gradient stops after `cg_iteration_factor · N` iterations.
    pub cg_iteration_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            direct_limit: 100_000,
            cg_relative_tolerance: 1e-12,
            cg_iteration_factor: 20,
        }
    }
}

/// Residual bound every successful solve satisfies.
pub fn residual_tolerance(b: &[f64]) -> f64 {
    1e-10 * norm_inf(b).max(1.0)
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x).expect("solution length matches the operator");
    b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect()
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn linear_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    linear_solve_with(a, b, &SolverOptions::default()).map(|(x, _)| x)
}

pub fn linear_solve_with(
    a: &SparseMatrix,
    b: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolverKind)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSpd(format!(
            "{}x{} matrix is not square",
            n,
            a.ncols()
        )));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if !a.is_symmetric(1e-12) {
        return Err(Error::NotSpd("matrix is not symmetric".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), SolverKind::Direct));
    }
    let (x, kind) = if n <= opts.direct_limit {
        (ldl_solve(a, b)?, SolverKind::Direct)
    } else {
        (
            conjugate_gradient(a, b, opts)?,
            SolverKind::ConjugateGradient,
        )
    };
    let r = norm_inf(&residual(a, &x, b));
    let tol = residual_tolerance(b);
    if !(r <= tol) {
        return Err(Error::ResidualTooLarge {
            residual: r,
            tolerance: tol,
        });
    }
    Ok((x, kind))
}

fn ldl_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    // sprs-ldl cannot factor a 1x1 matrix
    if b.len() == 1 {
        let d = a.get(0, 0);
        if !(d > 0.0) {
            return Err(Error::NotSpd(format!("non-positive pivot {d:e}")));
        }
        return Ok(vec![b[0] / d]);
    }
    let csc = a.to_csc();
    let ldl = Ldl::new()
        .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
        .check_symmetry(SymmetryCheck::DontCheckSymmetry)
        .numeric(csc.view())
        .map_err(|e| Error::NotSpd(format!("factorization failed: {e}")))?;
    if let Some(d) = ldl.d().iter().find(|&&d| !(d > 0.0)) {
        return Err(Error::NotSpd(format!("non-positive pivot {d:e}")));
    }
    let mut x: Vec<f64> = ldl.solve(b);
    // two rounds of iterative refinement recover digits lost to scaling
    for _ in 0..2 {
        let r = residual(a, &x, b);
        if norm_inf(&r) <= 1e-3 * residual_tolerance(b) {
            break;
        }
        let dx: Vec<f64> = ldl.solve(&r);
        x.iter_mut().zip(dx).for_each(|(xi, di)| *xi += di);
    }
    Ok(x)
}

/// Unpreconditioned conjugate gradient from a zero initial guess.
pub fn conjugate_gradient(a: &SparseMatrix, b: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    let n = b.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = opts.cg_relative_tolerance * b_norm;
    let max_iter = opts.cg_iteration_factor.saturating_mul(n).max(1);
    for _ in 0..max_iter {
        if rr.sqrt() <= target {
            return Ok(x);
        }
        let ap = a.mul_vec(&p)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotSpd(format!(
                "search direction with pᵀAp = {pap:e}"
            )));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr.sqrt() <= target {
        return Ok(x);
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: rr.sqrt(),
    })
}

#[derive(Debug, Clone)]
pub struct DirichletProblem<'a> {
    pub mesh: &'a LevelMesh,
    pub operator: SparseMatrix,
    /// Right-hand side on every vertex; boundary entries are ignored.
    pub load: NodalVector,
    /// Prescribed values `h` on `V_0`, keyed by vertex index.
    pub boundary_values: BTreeMap<usize, f64>,
}

impl<'a> DirichletProblem<'a> {
    /// `h` lists the boundary values in the order of `mesh.boundary_indices()`.
    pub fn new(
        mesh: &'a LevelMesh,
        operator: SparseMatrix,
        load: NodalVector,
        h: &[f64],
    ) -> Result<Self> {
        let boundary = mesh.boundary_indices();
        if h.len() != boundary.len() {
            return Err(Error::BoundaryValues(format!(
                "expected {} boundary values, got {}",
                boundary.len(),
                h.len()
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::BoundaryValues("non-finite boundary value".into()));
        }
        let boundary_values = boundary.iter().copied().zip(h.iter().copied()).collect();
        let p = DirichletProblem {
            mesh,
            operator,
            load,
            boundary_values,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.mesh.vertex_count();
        if self.operator.nrows() != n || self.operator.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.operator.nrows(),
            });
        }
        self.load.check(self.mesh)?;
        let keys: Vec<usize> = self.boundary_values.keys().copied().collect();
        let mut expected = self.mesh.boundary_indices().to_vec();
        expected.sort_unstable();
        if keys != expected {
            return Err(Error::BoundaryValues(
                "boundary values must cover exactly the boundary vertices".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: NodalVector,
    pub method: String,
    pub level: usize,
    pub renorm_constant: Option<f64>,
    /// `‖A_II U_I - (f_I - A_I0 U_0)‖_∞`.
    pub solver_residual: f64,
    pub solver: SolverKind,
}

/// Interior vertices that cannot reach the boundary through the operator's
/// sparsity graph.
fn unanchored_interior(part: &Partition) -> usize {
    let m = part.interior.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(r, c, v) in part.a_ii.entries() {
        if r != c && v != 0.0 {
            adj[r].push(c);
        }
    }
    let mut seen = vec![false; m];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &(r, _, v) in part.a_i0.entries() {
        if v != 0.0 && !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.iter().filter(|s| !**s).count()
}

pub fn solve_dirichlet(p: &DirichletProblem) -> Result<Solution> {
    solve_dirichlet_with(p, &SolverOptions::default())
}

pub fn solve_dirichlet_with(p: &DirichletProblem, opts: &SolverOptions) -> Result<Solution> {
    p.validate()?;
    let boundary: Vec<usize> = p.boundary_values.keys().copied().collect();
    let u0: Vec<f64> = p.boundary_values.values().copied().collect();
    let part = partition(&p.operator, &boundary)?;
    let loose = unanchored_interior(&part);
    if loose > 0 {
        return Err(Error::SingularInterior(loose));
    }
    let coupling = part.a_i0.mul_vec(&u0)?;
    let rhs: Vec<f64> = part
        .interior
        .iter()
        .zip(&coupling)
        .map(|(&i, c)| p.load.values[i] - c)
        .collect();
    let (ui, solver) = linear_solve_with(&part.a_ii, &rhs, opts)?;
    let solver_residual = norm_inf(&residual(&part.a_ii, &ui, &rhs));

    let mut values = vec![0.0; p.mesh.vertex_count()];
    for (&b, &h) in &p.boundary_values {
        values[b] = h;
    }
    for (&i, &u) in part.interior.iter().zip(&ui) {
        values[i] = u;
    }
    Ok(Solution {
        values: NodalVector::new(values, p.mesh.level()),
        method: "dirichlet".into(),
        level: p.mesh.level(),
        renorm_constant: None,
        solver_residual,
        solver,
    })
}
