#ifndef FRACLAP_H
#define FRACLAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FraclapStatus {
  FRACLAP_STATUS_OK = 0,
  FRACLAP_STATUS_NULL_POINTER = 1,
  FRACLAP_STATUS_INVALID_ARGUMENT = 2,
  FRACLAP_STATUS_NUMERICAL = 3,
  FRACLAP_STATUS_IO = 4,
  FRACLAP_STATUS_BUFFER_TOO_SMALL = 5,
  FRACLAP_STATUS_PANIC = 6,
} FraclapStatus;

/**
 * Level-n approximation of a built-in fractal.
 */
typedef struct FraclapMesh FraclapMesh;

/**
 * Solution of a renormalized Dirichlet problem.
 */
typedef struct FraclapSolution FraclapSolution;

typedef struct FraclapMeshCounts {
  size_t dimension;
  size_t vertices;
  size_t edges;
  size_t cells;
  size_t boundary;
} FraclapMeshCounts;

/**
 * Statistics of one renormalization estimate over a level pair.
 */
typedef struct FraclapEstimate {
  size_t coarse_level;
  size_t fine_level;
  double max;
  double mean;
  double min;
  size_t excluded_count;
} FraclapEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next `fraclap_*` call on the same thread.
 */
const char *fraclap_last_error(void);

/**
 * Builds the level-`level` mesh of `family` (`"sierpinski"`, `"koch"`,
 * `"hata2d"`, `"hata3d"`).
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be writable.
 */
enum FraclapStatus fraclap_mesh_new(const char *family, size_t level, struct FraclapMesh **out);

/**
 * # Safety
 * `mesh` must come from [`fraclap_mesh_new`] and not be freed twice.
 */
void fraclap_mesh_free(struct FraclapMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle; `out` must be writable.
 */
enum FraclapStatus fraclap_mesh_counts(const struct FraclapMesh *mesh,
                                       struct FraclapMeshCounts *out);

/**
 * Row-major coordinates, `vertices * dimension` values.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FraclapStatus fraclap_mesh_vertices(const struct FraclapMesh *mesh, double *out, size_t len);

/**
 * Edge endpoint pairs, `2 * edges` indices.
 *
 * # Safety
 * `out` must point to `len` writable `size_t`.
 */
enum FraclapStatus fraclap_mesh_edges(const struct FraclapMesh *mesh, size_t *out, size_t len);

/**
 * Boundary vertex indices, `boundary` entries.
 *
 * # Safety
 * `out` must point to `len` writable `size_t`.
 */
enum FraclapStatus fraclap_mesh_boundary(const struct FraclapMesh *mesh, size_t *out, size_t len);

/**
 * Writes the mesh document (JSON) to `path`.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum FraclapStatus fraclap_mesh_write(const struct FraclapMesh *mesh, const char *path);

/**
 * Renormalization estimate for the pair `(level, level + 1)`. `method` is
 * one of `"fd"`, `"energy"`, `"fem-edge"`, `"fem-area"`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum FraclapStatus fraclap_estimate(const char *family,
                                    size_t level,
                                    const char *method,
                                    struct FraclapEstimate *out);

/**
 * Solves the renormalized problem on `mesh` with forcing `rhs` (an
 * expression in `x`, `y`, `z`) and `bc_len` boundary values. Pass a NaN
 * `constant` to estimate it from two coarser levels.
 *
 * # Safety
 * `mesh` must be live, strings NUL-terminated, `bc` must hold `bc_len`
 * doubles, and `out` must be writable.
 */
enum FraclapStatus fraclap_solve(const struct FraclapMesh *mesh,
                                 const char *method,
                                 double constant,
                                 const char *rhs,
                                 const double *bc,
                                 size_t bc_len,
                                 struct FraclapSolution **out);

/**
 * # Safety
 * `solution` must come from [`fraclap_solve`] and not be freed twice.
 */
void fraclap_solution_free(struct FraclapSolution *solution);

/**
 * Number of values (one per mesh vertex); 0 for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t fraclap_solution_len(const struct FraclapSolution *solution);

/**
 * Constant used by the solve; NaN for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double fraclap_solution_constant(const struct FraclapSolution *solution);

/**
 * Max-norm residual of the interior system; NaN for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double fraclap_solution_residual(const struct FraclapSolution *solution);

/**
 * Copies the nodal values in mesh vertex order.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FraclapStatus fraclap_solution_values(const struct FraclapSolution *solution,
                                           double *out,
                                           size_t len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FRACLAP_H */
