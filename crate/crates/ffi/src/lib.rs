//! C ABI for `fraclap`.
//!
//! Meshes and solutions cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns a [`FraclapStatus`]; on failure a human-readable message is
//! available from [`fraclap_last_error`] on the same thread.
//!
//! Array accessors copy into caller-provided buffers and fail with
//! `FRACLAP_STATUS_BUFFER_TOO_SMALL` when `len` is short; query sizes first
//! with [`fraclap_mesh_counts`] or [`fraclap_solution_len`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fraclap::renorm::{auto_constant, EstimateMethod, OnlineMethod};
use fraclap::{
    builtin, estimate, iterate, ErrorKind, Family, LevelMesh, NodalVector, RhsExpression,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FraclapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Io = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Level-n approximation of a built-in fractal.
pub struct FraclapMesh {
    inner: LevelMesh,
}

/// Solution of a renormalized Dirichlet problem.
pub struct FraclapSolution {
    values: Vec<f64>,
    constant: f64,
    residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FraclapMeshCounts {
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub boundary: usize,
}

/// Statistics of one renormalization estimate over a level pair.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FraclapEstimate {
    pub coarse_level: usize,
    pub fine_level: usize,
    pub max: f64,
    pub mean: f64,
    pub min: f64,
    pub excluded_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FraclapStatus, String);

impl From<fraclap::Error> for Failure {
    fn from(e: fraclap::Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Usage => FraclapStatus::InvalidArgument,
            ErrorKind::Numerical => FraclapStatus::Numerical,
            ErrorKind::Io => FraclapStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FraclapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FraclapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FraclapStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(FraclapStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            FraclapStatus::InvalidArgument,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

unsafe fn parse_arg<T: std::str::FromStr<Err = fraclap::Error>>(
    p: *const c_char,
    what: &str,
) -> Result<T, Failure> {
    Ok(str_arg(p, what)?.parse()?)
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, len: usize) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(null("out"));
    }
    if len < src.len() {
        return Err(Failure(
            FraclapStatus::BufferTooSmall,
            format!("buffer holds {len} items, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next `fraclap_*` call on the same thread.
#[no_mangle]
pub extern "C" fn fraclap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the level-`level` mesh of `family` (`"sierpinski"`, `"koch"`,
/// `"hata2d"`, `"hata3d"`).
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_new(
    family: *const c_char,
    level: usize,
    out: *mut *mut FraclapMesh,
) -> FraclapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let family: Family = parse_arg(family, "family")?;
        let inner = iterate(&builtin(family), level)?;
        *out = Box::into_raw(Box::new(FraclapMesh { inner }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must come from [`fraclap_mesh_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_free(mesh: *mut FraclapMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

unsafe fn mesh_ref<'a>(mesh: *const FraclapMesh) -> Result<&'a LevelMesh, Failure> {
    mesh.as_ref().map(|m| &m.inner).ok_or_else(|| null("mesh"))
}

/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_counts(
    mesh: *const FraclapMesh,
    out: *mut FraclapMeshCounts,
) -> FraclapStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = FraclapMeshCounts {
            dimension: m.dim(),
            vertices: m.vertex_count(),
            edges: m.edges().len(),
            cells: m.cells().len(),
            boundary: m.boundary_indices().len(),
        };
        Ok(())
    })
}

/// Row-major coordinates, `vertices * dimension` values.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_vertices(
    mesh: *const FraclapMesh,
    out: *mut f64,
    len: usize,
) -> FraclapStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let flat: Vec<f64> = m
            .vertices()
            .iter()
            .flat_map(|p| p.coords().to_vec())
            .collect();
        copy_out(&flat, out, len)
    })
}

/// Edge endpoint pairs, `2 * edges` indices.
///
/// # Safety
/// `out` must point to `len` writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_edges(
    mesh: *const FraclapMesh,
    out: *mut usize,
    len: usize,
) -> FraclapStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let flat: Vec<usize> = m.edges().iter().flat_map(|&(a, b)| [a, b]).collect();
        copy_out(&flat, out, len)
    })
}

/// Boundary vertex indices, `boundary` entries.
///
/// # Safety
/// `out` must point to `len` writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_boundary(
    mesh: *const FraclapMesh,
    out: *mut usize,
    len: usize,
) -> FraclapStatus {
    guard(|| copy_out(mesh_ref(mesh)?.boundary_indices(), out, len))
}

/// Writes the mesh document (JSON) to `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fraclap_mesh_write(
    mesh: *const FraclapMesh,
    path: *const c_char,
) -> FraclapStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let path = str_arg(path, "path")?;
        let file = std::fs::File::create(path).map_err(fraclap::Error::from)?;
        let mut w = std::io::BufWriter::new(file);
        fraclap::io::write_mesh(m, &mut w)?;
        w.flush().map_err(fraclap::Error::from)?;
        Ok(())
    })
}

/// Renormalization estimate for the pair `(level, level + 1)`. `method` is
/// one of `"fd"`, `"energy"`, `"fem-edge"`, `"fem-area"`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fraclap_estimate(
    family: *const c_char,
    level: usize,
    method: *const c_char,
    out: *mut FraclapEstimate,
) -> FraclapStatus {
    guard(|| {
        let family: Family = parse_arg(family, "family")?;
        let method: EstimateMethod = parse_arg(method, "method")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let e = estimate(family, level, method)?;
        *out = FraclapEstimate {
            coarse_level: e.level_pair.0,
            fine_level: e.level_pair.1,
            max: e.max,
            mean: e.mean,
            min: e.min,
            excluded_count: e.excluded_count,
        };
        Ok(())
    })
}

/// Solves the renormalized problem on `mesh` with forcing `rhs` (an
/// expression in `x`, `y`, `z`) and `bc_len` boundary values. Pass a NaN
/// `constant` to estimate it from two coarser levels.
///
/// # Safety
/// `mesh` must be live, strings NUL-terminated, `bc` must hold `bc_len`
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solve(
    mesh: *const FraclapMesh,
    method: *const c_char,
    constant: f64,
    rhs: *const c_char,
    bc: *const f64,
    bc_len: usize,
    out: *mut *mut FraclapSolution,
) -> FraclapStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let method: OnlineMethod = parse_arg(method, "method")?;
        let rhs = RhsExpression::parse(str_arg(rhs, "rhs")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let h: &[f64] = match (bc.is_null(), bc_len) {
            (_, 0) => &[],
            (true, _) => return Err(null("bc")),
            (false, n) => std::slice::from_raw_parts(bc, n),
        };
        let constant = if constant.is_nan() {
            auto_constant(m.family(), m.level(), method)?.mean
        } else {
            constant
        };
        let g = m
            .vertices()
            .iter()
            .map(|p| rhs.eval_finite(p.coords()))
            .collect::<fraclap::Result<Vec<_>>>()?;
        let sol = fraclap::solve_online(m, method, constant, &NodalVector::new(g, m.level()), h)?;
        *out = Box::into_raw(Box::new(FraclapSolution {
            values: sol.values.values,
            constant,
            residual: sol.solver_residual,
        }));
        Ok(())
    })
}

/// # Safety
/// `solution` must come from [`fraclap_solve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solution_free(solution: *mut FraclapSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of values (one per mesh vertex); 0 for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solution_len(solution: *const FraclapSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.values.len())
}

/// Constant used by the solve; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solution_constant(solution: *const FraclapSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.constant)
}

/// Max-norm residual of the interior system; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solution_residual(solution: *const FraclapSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.residual)
}

/// Copies the nodal values in mesh vertex order.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclap_solution_values(
    solution: *const FraclapSolution,
    out: *mut f64,
    len: usize,
) -> FraclapStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        copy_out(&s.values, out, len)
    })
}
