use std::collections::VecDeque;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use fraclap::io::{read_mesh, read_solution, read_table_csv, TableRow};
use fraclap::{builtin, estimate_range, iterate, EstimateMethod, Family, LevelMesh};

fn fraclap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(args)
        .output()
        .expect("spawn fraclap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn solve_file(dir: &Path, args: &[&str]) -> Vec<(Vec<f64>, f64)> {
    let out = dir.join("u.csv");
    let mut all = vec!["solve"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let o = fraclap(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    read_solution(BufReader::new(File::open(out).unwrap()))
        .unwrap()
        .1
}

/// Values in mesh vertex order, matched through coordinates.
fn by_vertex(m: &LevelMesh, rows: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let mut u = vec![f64::NAN; m.vertex_count()];
    for (p, v) in rows {
        u[m.locate(&fraclap::Point::new(p).unwrap()).unwrap()] = *v;
    }
    u
}

#[test]
fn generate_prints_counts_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sg3.json");
    let o = fraclap(&[
        "generate",
        "--family",
        "sierpinski",
        "--level",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("42 vertices, 81 edges, 27 cells"),
        "{}",
        stdout(&o)
    );
    let back = read_mesh(File::open(&path).unwrap()).unwrap();
    assert_eq!(back, iterate(&builtin(Family::Sierpinski), 3).unwrap());

    let o = fraclap(&[
        "generate",
        "--family",
        "koch",
        "--level",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("2 vertices, 1 edges, 0 cells"));

    let o = fraclap(&[
        "generate",
        "--family",
        "hata3d",
        "--level",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_reader(File::open(&path).unwrap()).unwrap();
    assert_eq!(doc["dimension"], 3);
    assert!(doc["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_array().unwrap().len() == 3));
}

#[test]
fn renorm_table_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    for (family, method, em, levels) in [
        ("sierpinski", "fd", EstimateMethod::FdQ, (3, 6)),
        ("sierpinski", "fem-edge", EstimateMethod::FemEdge, (4, 7)),
        ("koch", "fem-edge", EstimateMethod::FemEdge, (3, 6)),
    ] {
        let path = dir.path().join(format!("{family}-{method}.csv"));
        let range = format!("{}:{}", levels.0, levels.1);
        let o = fraclap(&[
            "renorm",
            "--family",
            family,
            "--method",
            method,
            "--levels",
            &range,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let rows = read_table_csv(File::open(&path).unwrap()).unwrap();
        let want: Vec<TableRow> = estimate_range(family.parse().unwrap(), levels.0, levels.1, em)
            .unwrap()
            .iter()
            .map(TableRow::from)
            .collect();
        assert_eq!(rows, want);
    }
}

#[test]
fn sierpinski_solve_file_shape() {
    let dir = tempfile::tempdir().unwrap();
    let rows = solve_file(
        dir.path(),
        &[
            "--family",
            "sierpinski",
            "--level",
            "5",
            "--method",
            "rfd",
            "--rhs",
            "sin(x+y)",
            "--bc",
            "1,0,0",
        ],
    );
    assert_eq!(rows.len(), (3usize.pow(6) + 3) / 2);
    assert_eq!(rows[0].1, 1.0);
    assert_eq!(rows[1].1, 0.0);
    assert_eq!(rows[2].1, 0.0);
    let text = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    for key in [
        "# method: rfd",
        "# level: 5",
        "# constant: ",
        "# residual: ",
    ] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn koch_harmonic_is_monotone_along_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let m = iterate(&builtin(Family::Koch), 3).unwrap();
    let u = by_vertex(
        &m,
        &solve_file(
            dir.path(),
            &[
                "--family", "koch", "--level", "3", "--method", "rfem1d", "--rhs", "0", "--bc",
                "1,0",
            ],
        ),
    );
    // walk the path graph from the first boundary vertex
    let mut adj = vec![Vec::new(); m.vertex_count()];
    for &(a, b) in m.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let (mut prev, mut cur) = (usize::MAX, 0);
    let mut walk = vec![0];
    while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
        walk.push(next);
        prev = cur;
        cur = next;
    }
    assert_eq!(walk.len(), m.vertex_count());
    assert_eq!(*walk.last().unwrap(), 1);
    for w in walk.windows(2) {
        assert!(u[w[1]] < u[w[0]]);
    }
}

#[test]
fn hata_harmonic_is_constant_on_dead_branches() {
    let dir = tempfile::tempdir().unwrap();
    let m = iterate(&builtin(Family::Hata2d), 3).unwrap();
    let u = by_vertex(
        &m,
        &solve_file(
            dir.path(),
            &[
                "--family", "hata2d", "--level", "3", "--method", "rfd", "--rhs", "0", "--bc",
                "1,0",
            ],
        ),
    );
    let mut adj = vec![Vec::new(); m.vertex_count()];
    for &(a, b) in m.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    // trunk: the unique path between the two boundary vertices
    let mut parent = vec![usize::MAX; m.vertex_count()];
    let mut q = VecDeque::from([0]);
    parent[0] = 0;
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                q.push_back(w);
            }
        }
    }
    let mut on_trunk = vec![false; m.vertex_count()];
    let mut v = 1;
    while v != 0 {
        on_trunk[v] = true;
        v = parent[v];
    }
    on_trunk[0] = true;
    // every branch vertex takes the value of the trunk vertex it hangs from
    let mut anchor: Vec<usize> = (0..m.vertex_count())
        .map(|v| if on_trunk[v] { v } else { usize::MAX })
        .collect();
    let mut q: VecDeque<usize> = (0..m.vertex_count()).filter(|&v| on_trunk[v]).collect();
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if anchor[w] == usize::MAX {
                anchor[w] = anchor[v];
                q.push_back(w);
            }
        }
    }
    let branch = (0..m.vertex_count()).filter(|&v| !on_trunk[v]).count();
    assert!(branch > 0);
    for v in 0..m.vertex_count() {
        assert!((u[v] - u[anchor[v]]).abs() <= 1e-10, "vertex {v}");
    }
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();
    assert_eq!(
        fraclap(&["generate", "--family", "cantor", "--level", "1", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fraclap(&[
            "solve",
            "--family",
            "sierpinski",
            "--level",
            "3",
            "--method",
            "rfd",
            "--rhs",
            "1",
            "--bc",
            "1,0",
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        fraclap(&[
            "solve", "--family", "koch", "--level", "3", "--method", "rfem2d", "--rhs", "1",
            "--bc", "1,0", "--out", out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        fraclap(&[
            "solve",
            "--family",
            "sierpinski",
            "--level",
            "3",
            "--method",
            "rfd",
            "--constant",
            "-1",
            "--rhs",
            "1",
            "--bc",
            "1,0,0",
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        fraclap(&[
            "solve",
            "--family",
            "sierpinski",
            "--level",
            "5",
            "--method",
            "rfd",
            "--constant",
            "1e300",
            "--rhs",
            "1",
            "--bc",
            "1,0,0",
            "--out",
            out
        ])
        .status
        .code(),
        Some(3)
    );
    let missing = dir.path().join("no/such/dir/m.json");
    assert_eq!(
        fraclap(&[
            "generate",
            "--family",
            "koch",
            "--level",
            "1",
            "--out",
            missing.to_str().unwrap()
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        fraclap(&["generate", "--family", "koch", "--level", "1", "--out", out])
            .status
            .code(),
        Some(0)
    );
}
