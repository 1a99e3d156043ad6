mod common;

use common::{mesh, random_vec, rng};
use fraclap::{
    energy, fd_graph_stiffness, fem_area_stiffness, fem_edge_stiffness, graph_laplacian,
    load_vector, vertex_weights, Family, MeasureKind, NodalVector, SparseMatrix,
};
use proptest::prelude::*;

fn edge_sum(m: &fraclap::LevelMesh, u: &[f64], v: &[f64]) -> f64 {
    m.edges()
        .iter()
        .map(|&(a, b)| (u[a] - u[b]) * (v[a] - v[b]))
        .sum()
}

#[test]
fn laplacian_symmetric_psd_with_constant_kernel() {
    let mut r = rng(7);
    for f in Family::ALL {
        for n in 0..=5 {
            if f == Family::Hata3d && n == 5 {
                continue; // 7777 vertices; the shape of the test is already covered
            }
            let m = mesh(f, n);
            let lap = graph_laplacian(&m);
            assert!(lap.is_symmetric(0.0), "{f} {n}");
            let ones = vec![1.0; m.vertex_count()];
            assert!(lap.mul_vec(&ones).unwrap().iter().all(|x| *x == 0.0));
            for _ in 0..100 {
                let u = random_vec(&mut r, m.vertex_count());
                let au = lap.mul_vec(&u).unwrap();
                let q: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
                assert!(q >= -1e-12, "{f} {n}: {q}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_matches_edge_sum(seed in any::<u64>(), n in 0usize..=4, fi in 0usize..4) {
        let f = Family::ALL[fi];
        let m = mesh(f, n);
        let mut r = rng(seed);
        let u = random_vec(&mut r, m.vertex_count());
        let v = random_vec(&mut r, m.vertex_count());
        let lap = graph_laplacian(&m);
        let e = energy(&lap, &NodalVector::new(u.clone(), n), &NodalVector::new(v.clone(), n)).unwrap();
        let want = edge_sum(&m, &u, &v);
        prop_assert!((e - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}

fn assert_scaled(a: &SparseMatrix, b: &SparseMatrix, factor: f64) {
    assert_eq!(a.nrows(), b.nrows());
    let d = a.sub(&b.scaled(factor)).unwrap();
    for &(r, c, v) in d.entries() {
        let reference = (factor * b.get(r, c)).abs().max(a.get(r, c).abs());
        assert!(v.abs() <= 1e-12 * reference, "entry ({r},{c}) off by {v}");
    }
}

#[test]
fn sierpinski_stiffness_identities() {
    for n in 1..=6 {
        let m = mesh(Family::Sierpinski, n);
        let lap = fd_graph_stiffness(&m).matrix;
        assert_scaled(
            &fem_edge_stiffness(&m).unwrap().matrix,
            &lap,
            2f64.powi(n as i32),
        );
        assert_scaled(
            &fem_area_stiffness(&m).unwrap().matrix,
            &lap,
            3f64.sqrt() / 6.0,
        );
    }
}

#[test]
fn stiffness_annihilates_constants() {
    for f in Family::ALL {
        for n in 1..=4 {
            let m = mesh(f, n);
            let ones = vec![1.0; m.vertex_count()];
            let mut ops = vec![
                fd_graph_stiffness(&m).matrix,
                fem_edge_stiffness(&m).unwrap().matrix,
            ];
            if !m.cells().is_empty() {
                ops.push(fem_area_stiffness(&m).unwrap().matrix);
            }
            for a in ops {
                let r = a.mul_vec(&ones).unwrap();
                let worst = r.iter().fold(0.0f64, |s, x| s.max(x.abs()));
                assert!(worst <= 1e-12 * a.norm_inf());
            }
        }
    }
}

#[test]
fn unit_load_equals_weights() {
    for f in Family::ALL {
        let m = mesh(f, 3);
        let one = NodalVector::constant(&m, 1.0);
        let mut kinds = vec![MeasureKind::SelfSimilar, MeasureKind::EdgeLength];
        if !m.cells().is_empty() {
            kinds.push(MeasureKind::TriangleArea);
        }
        for k in kinds {
            let w = vertex_weights(&m, k).unwrap();
            let b = load_vector(&m, k, &one).unwrap();
            assert!(
                common::max_abs_diff(&w.weights, &b.values) <= 1e-15,
                "{f} {k:?}"
            );
        }
    }
}

#[test]
fn sierpinski_loads_and_weights() {
    for n in 1..=6 {
        let m = mesh(Family::Sierpinski, n);
        let one = NodalVector::constant(&m, 1.0);
        let edge = load_vector(&m, MeasureKind::EdgeLength, &one).unwrap();
        let area = load_vector(&m, MeasureKind::TriangleArea, &one).unwrap();
        let w = vertex_weights(&m, MeasureKind::SelfSimilar).unwrap();
        let third = 3f64.powi(-(n as i32));
        for v in m.interior_indices() {
            let e = 2f64.powi(-(n as i32 - 1));
            let a = 3f64.sqrt() / 6.0 * 2f64.powi(-2 * n as i32);
            assert!((edge.values[v] - e).abs() <= 1e-14 * e);
            assert!((area.values[v] - a).abs() <= 1e-14 * a);
            assert!((w.weights[v] - 2.0 / 3.0 * third).abs() <= 1e-14 * third);
        }
        for &b in m.boundary_indices() {
            assert!((w.weights[b] - third / 3.0).abs() <= 1e-14 * third);
        }
        assert!((w.total() - 1.0).abs() <= 1e-14);
    }
}
