//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fraclap::{builtin, iterate, Family, LevelMesh, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn mesh(family: Family, n: usize) -> LevelMesh {
    iterate(&builtin(family), n).unwrap()
}

/// Every mesh of every family with at most `max_vertices` vertices, from level 1 up.
pub fn small_meshes(max_vertices: usize) -> Vec<LevelMesh> {
    let mut out = Vec::new();
    for f in Family::ALL {
        for n in 1.. {
            let m = mesh(f, n);
            if m.vertex_count() > max_vertices {
                break;
            }
            out.push(m);
        }
    }
    out
}

/// Brute-force level-n approximation: expand every map word of length n,
/// apply it to the seed edges, then merge points with an O(N²) scan.
/// Returns (points, edges as sorted index pairs without duplicates).
pub fn brute_force_graph(family: Family, n: usize) -> (Vec<Vec<f64>>, Vec<(usize, usize)>) {
    let ifs = builtin(family);
    let mut segments: Vec<(Point, Point)> = ifs.seed_edges().to_vec();
    for _ in 0..n {
        let mut next = Vec::new();
        for m in ifs.maps() {
            for (a, b) in &segments {
                next.push((m.apply(a).unwrap(), m.apply(b).unwrap()));
            }
        }
        segments = next;
    }
    let tol = 1e-7 * 3f64.powi(-(n as i32));
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let index_of = |p: &Point, pts: &mut Vec<Vec<f64>>| -> usize {
        for (i, q) in pts.iter().enumerate() {
            let d: f64 = q
                .iter()
                .zip(p.coords())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            if d < tol {
                return i;
            }
        }
        pts.push(p.coords().to_vec());
        pts.len() - 1
    };
    let mut edges = Vec::new();
    for (a, b) in &segments {
        let i = index_of(a, &mut pts);
        let j = index_of(b, &mut pts);
        edges.push((i.min(j), i.max(j)));
    }
    edges.sort_unstable();
    edges.dedup();
    (pts, edges)
}

/// Dense Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Dirichlet solve through the dense oracle: eliminate the boundary, solve
/// the interior block, splice the boundary values back in.
pub fn dense_dirichlet(a: &[Vec<f64>], f: &[f64], boundary: &[usize], h: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut u = vec![0.0; n];
    for (&b, &v) in boundary.iter().zip(h) {
        u[b] = v;
    }
    let interior: Vec<usize> = (0..n).filter(|i| !boundary.contains(i)).collect();
    let aii: Vec<Vec<f64>> = interior
        .iter()
        .map(|&i| interior.iter().map(|&j| a[i][j]).collect())
        .collect();
    let rhs: Vec<f64> = interior
        .iter()
        .map(|&i| f[i] - boundary.iter().map(|&b| a[i][b] * u[b]).sum::<f64>())
        .collect();
    for (k, x) in dense_solve(aii, rhs).into_iter().enumerate() {
        u[interior[k]] = x;
    }
    u
}

/// Mirror image across the gasket's axis through (0,0) and the midpoint of
/// the opposite side; it swaps (1,0) and (1/2, √3/2).
pub fn reflect_sierpinski(p: &[f64]) -> Point {
    let (dx, dy) = (3f64.sqrt() / 2.0, 0.5);
    let t = p[0] * dx + p[1] * dy;
    Point::xy(2.0 * t * dx - p[0], 2.0 * t * dy - p[1])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
