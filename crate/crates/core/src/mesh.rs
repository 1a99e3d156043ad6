//! Level-n approximations `W_n` of a self-similar set.
//!
//! `W_{n+1}` is the union of the images of `W_n` under every map of the IFS.
//! Coincident vertices produced by different maps are merged with a spatial
//! hash whose cell size equals the dedup tolerance, so lookups only inspect the
//! 3^d neighbouring cells. Vertex order is fixed: boundary vertices (in the
//! order of the IFS boundary points) first, then every other vertex in
//! discovery order (map index major, parent vertex index minor).

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ifs::{Family, IFSystem};

/// Relative dedup tolerance: vertices closer than this times the minimum edge
/// length are the same vertex.
pub const DEDUP_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelMesh {
    family: Family,
    level: usize,
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    cells: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    dedup_tolerance: f64,
}

impl LevelMesh {
    /// Assembles a mesh from raw parts, checking the structural invariants.
    /// Boundary indices must match the family's boundary points geometrically.
    pub fn from_parts(
        family: Family,
        level: usize,
        vertices: Vec<Point>,
        edges: Vec<(usize, usize)>,
        cells: Vec<[usize; 3]>,
        boundary: Vec<usize>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let dim = crate::ifs::builtin(family).dim();
        if let Some(p) = vertices.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= nv || b >= nv {
                return Err(Error::InvalidMesh(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidMesh(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidMesh(format!("duplicate edge ({a}, {b})")));
            }
        }
        for c in &cells {
            if c.iter().any(|&i| i >= nv) || c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return Err(Error::InvalidMesh(format!("bad cell {c:?}")));
            }
            for (a, b) in [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])] {
                if !seen.contains(&(a.min(b), a.max(b))) {
                    return Err(Error::InvalidMesh(format!(
                        "cell {c:?} side ({a}, {b}) is not an edge"
                    )));
                }
            }
        }
        let min_len = edges
            .iter()
            .map(|&(a, b)| vertices[a].distance(&vertices[b]))
            .fold(f64::INFINITY, f64::min);
        if !(min_len > 0.0) {
            return Err(Error::InvalidMesh(
                "mesh needs edges of positive length".into(),
            ));
        }
        let tol = DEDUP_RELATIVE_TOLERANCE * min_len;
        let ifs = crate::ifs::builtin(family);
        if boundary.len() != ifs.boundary_points().len() {
            return Err(Error::InvalidMesh(format!(
                "expected {} boundary vertices, found {}",
                ifs.boundary_points().len(),
                boundary.len()
            )));
        }
        for (&b, p) in boundary.iter().zip(ifs.boundary_points()) {
            if b >= nv || vertices[b].distance(p) > tol {
                return Err(Error::InvalidMesh(format!(
                    "boundary index {b} does not sit on boundary point {:?}",
                    p.coords()
                )));
            }
        }
        Ok(LevelMesh {
            family,
            level,
            vertices,
            edges,
            cells,
            boundary,
            dedup_tolerance: tol,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    /// Indices of `V_0`, ordered like the IFS boundary points.
    pub fn boundary_indices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn dedup_tolerance(&self) -> f64 {
        self.dedup_tolerance
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }

    /// Indices of `V_n \ V_0` in increasing order.
    pub fn interior_indices(&self) -> Vec<usize> {
        let mut mask = vec![true; self.vertices.len()];
        for &b in &self.boundary {
            mask[b] = false;
        }
        (0..self.vertices.len()).filter(|&i| mask[i]).collect()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edges[e];
        self.vertices[a].distance(&self.vertices[b])
    }

    /// Vertex lookup within the dedup tolerance.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let grid = SpatialHash::build(&self.vertices, self.dedup_tolerance);
        grid.nearest(&self.vertices, p)
            .filter(|&(_, d)| d <= self.dedup_tolerance)
            .map(|(i, _)| i)
    }
}

/// Coarse-to-fine vertex correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingMap {
    pub coarse_level: usize,
    pub fine_level: usize,
    /// `index_map[i]` is the fine index of coarse vertex `i`.
    pub index_map: Vec<usize>,
}

impl EmbeddingMap {
    pub fn fine_index(&self, coarse: usize) -> usize {
        self.index_map[coarse]
    }
}

struct SpatialHash {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl SpatialHash {
    fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn build(points: &[Point], cell: f64) -> Self {
        let mut h = SpatialHash::new(cell);
        for (i, p) in points.iter().enumerate() {
            h.insert(p, i);
        }
        h
    }

    fn key(&self, p: &Point) -> [i64; 3] {
        let r = p.raw();
        [
            (r[0] / self.cell).floor() as i64,
            (r[1] / self.cell).floor() as i64,
            (r[2] / self.cell).floor() as i64,
        ]
    }

    fn insert(&mut self, p: &Point, idx: usize) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(idx);
    }

    /// Nearest stored point among the neighbouring cells, with its distance.
    fn nearest(&self, points: &[Point], p: &Point) -> Option<(usize, f64)> {
        let k = self.key(p);
        let mut best: Option<(usize, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = [k[0] + dx, k[1] + dy, k[2] + dz];
                    let Some(bucket) = self.buckets.get(&key) else {
                        continue;
                    };
                    for &i in bucket {
                        let d = points[i].distance(p);
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((i, d));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Incremental vertex set with tolerance-based merging.
struct VertexPool {
    points: Vec<Point>,
    hash: SpatialHash,
    tol: f64,
}

impl VertexPool {
    fn new(tol: f64) -> Self {
        VertexPool {
            points: Vec::new(),
            hash: SpatialHash::new(tol),
            tol,
        }
    }

    fn lookup(&self, p: &Point) -> Result<Option<usize>> {
        match self.hash.nearest(&self.points, p) {
            Some((i, d)) if d <= self.tol / 10.0 => Ok(Some(i)),
            Some((_, d)) if d <= self.tol => Err(Error::DedupAmbiguity {
                distance: d,
                tolerance: self.tol,
            }),
            _ => Ok(None),
        }
    }

    fn insert(&mut self, p: Point) -> Result<usize> {
        if let Some(i) = self.lookup(&p)? {
            return Ok(i);
        }
        let i = self.points.len();
        self.hash.insert(&p, i);
        self.points.push(p);
        Ok(i)
    }
}

/// Raw geometry for one level before boundary-first reordering.
struct RawLevel {
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    cells: Vec<[usize; 3]>,
}

fn seed_level(ifs: &IFSystem) -> Result<RawLevel> {
    let min_len = ifs
        .seed_edges()
        .iter()
        .map(|(a, b)| a.distance(b))
        .fold(f64::INFINITY, f64::min);
    let mut pool = VertexPool::new(DEDUP_RELATIVE_TOLERANCE * min_len);
    for p in ifs.boundary_points() {
        pool.insert(*p)?;
    }
    let mut edges = Vec::new();
    for (a, b) in ifs.seed_edges() {
        let (i, j) = (pool.insert(*a)?, pool.insert(*b)?);
        edges.push((i.min(j), i.max(j)));
    }
    let cells = if ifs.cell_generation() {
        let (a, b) = edges[0];
        let third = edges[1..]
            .iter()
            .flat_map(|&(x, y)| [x, y])
            .find(|&v| v != a && v != b)
            .ok_or_else(|| Error::InvalidIfs("seed edges do not form a triangle".into()))?;
        vec![[a, b, third]]
    } else {
        Vec::new()
    };
    Ok(RawLevel {
        vertices: pool.points,
        edges,
        cells,
    })
}

fn refine(ifs: &IFSystem, prev: &RawLevel) -> Result<RawLevel> {
    let images: Vec<Vec<Point>> = ifs
        .maps()
        .iter()
        .map(|m| prev.vertices.iter().map(|p| m.apply_unchecked(p)).collect())
        .collect();
    let min_len = images
        .iter()
        .flat_map(|img| {
            prev.edges
                .iter()
                .map(move |&(a, b)| img[a].distance(&img[b]))
        })
        .fold(f64::INFINITY, f64::min);
    if !(min_len > 0.0) {
        return Err(Error::InvalidIfs("image edges collapse to points".into()));
    }
    let mut pool = VertexPool::new(DEDUP_RELATIVE_TOLERANCE * min_len);
    let mut edges = Vec::with_capacity(prev.edges.len() * images.len());
    let mut edge_set = HashSet::with_capacity(edges.capacity());
    let mut cells = Vec::with_capacity(prev.cells.len() * images.len());
    for img in images {
        let idx = img
            .into_iter()
            .map(|p| pool.insert(p))
            .collect::<Result<Vec<_>>>()?;
        for &(a, b) in &prev.edges {
            let (i, j) = (idx[a], idx[b]);
            let key = (i.min(j), i.max(j));
            if edge_set.insert(key) {
                edges.push(key);
            }
        }
        cells.extend(prev.cells.iter().map(|c| [idx[c[0]], idx[c[1]], idx[c[2]]]));
    }
    Ok(RawLevel {
        vertices: pool.points,
        edges,
        cells,
    })
}

/// Builds `W_n` by applying the union map `n` times to the seed.
pub fn iterate(ifs: &IFSystem, n: usize) -> Result<LevelMesh> {
    let mut raw = seed_level(ifs)?;
    for _ in 0..n {
        raw = refine(ifs, &raw)?;
    }
    let min_len = raw
        .edges
        .iter()
        .map(|&(a, b)| raw.vertices[a].distance(&raw.vertices[b]))
        .fold(f64::INFINITY, f64::min);
    let tol = DEDUP_RELATIVE_TOLERANCE * min_len;

    let grid = SpatialHash::build(&raw.vertices, tol);
    let mut boundary_old = Vec::with_capacity(ifs.boundary_points().len());
    for p in ifs.boundary_points() {
        match grid.nearest(&raw.vertices, p) {
            Some((i, d)) if d <= tol => boundary_old.push(i),
            _ => {
                return Err(Error::InvalidIfs(format!(
                    "boundary point {:?} is missing from level {n}",
                    p.coords()
                )))
            }
        }
    }

    // boundary first, then interior in discovery order
    let nv = raw.vertices.len();
    let mut new_index = vec![usize::MAX; nv];
    let mut order = Vec::with_capacity(nv);
    for &b in &boundary_old {
        new_index[b] = order.len();
        order.push(b);
    }
    for (i, slot) in new_index.iter_mut().enumerate() {
        if *slot == usize::MAX {
            *slot = order.len();
            order.push(i);
        }
    }
    let vertices = order.iter().map(|&i| raw.vertices[i]).collect();
    let edges = raw
        .edges
        .iter()
        .map(|&(a, b)| {
            let (i, j) = (new_index[a], new_index[b]);
            (i.min(j), i.max(j))
        })
        .collect();
    let cells = raw
        .cells
        .iter()
        .map(|c| [new_index[c[0]], new_index[c[1]], new_index[c[2]]])
        .collect();
    Ok(LevelMesh {
        family: ifs.family(),
        level: n,
        vertices,
        edges,
        cells,
        boundary: (0..boundary_old.len()).collect(),
        dedup_tolerance: tol,
    })
}

/// Matches every coarse vertex to the fine vertex at the same position.
pub fn embed(coarse: &LevelMesh, fine: &LevelMesh) -> Result<EmbeddingMap> {
    if coarse.family != fine.family {
        return Err(Error::IncompatibleMeshes(format!(
            "families differ ({} vs {})",
            coarse.family, fine.family
        )));
    }
    if fine.level < coarse.level {
        return Err(Error::IncompatibleMeshes(format!(
            "fine level {} is below coarse level {}",
            fine.level, coarse.level
        )));
    }
    let tol = coarse.dedup_tolerance.max(fine.dedup_tolerance);
    let grid = SpatialHash::build(&fine.vertices, tol);
    let mut used = vec![false; fine.vertices.len()];
    let mut index_map = Vec::with_capacity(coarse.vertices.len());
    for (i, p) in coarse.vertices.iter().enumerate() {
        match grid.nearest(&fine.vertices, p) {
            Some((j, d)) if d <= tol && !used[j] => {
                used[j] = true;
                index_map.push(j);
            }
            _ => return Err(Error::UnmatchedVertex(i)),
        }
    }
    Ok(EmbeddingMap {
        coarse_level: coarse.level,
        fine_level: fine.level,
        index_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::builtin;

    fn mesh(f: Family, n: usize) -> LevelMesh {
        iterate(&builtin(f), n).unwrap()
    }

    #[test]
    fn sierpinski_level_one() {
        let m = mesh(Family::Sierpinski, 1);
        assert_eq!(m.vertex_count(), 6);
        assert_eq!(m.edges().len(), 9);
        assert_eq!(m.cells().len(), 3);
        assert_eq!(m.boundary_indices(), &[0, 1, 2]);
        assert_eq!(m.interior_indices(), vec![3, 4, 5]);
    }

    #[test]
    fn sierpinski_level_zero_is_one_cell() {
        let m = mesh(Family::Sierpinski, 0);
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.edges().len(), 3);
        assert_eq!(m.cells().len(), 1);
    }

    #[test]
    fn hata2d_level_one_is_a_tree() {
        let m = mesh(Family::Hata2d, 1);
        assert_eq!(m.vertex_count(), 6);
        assert_eq!(m.edges().len(), 5);
        assert!(m.cells().is_empty());
    }

    #[test]
    fn boundary_vertices_lead() {
        for f in Family::ALL {
            let m = mesh(f, 2);
            let ifs = builtin(f);
            for (k, p) in ifs.boundary_points().iter().enumerate() {
                assert_eq!(m.boundary_indices()[k], k);
                assert!(m.vertices()[k].distance(p) <= m.dedup_tolerance());
            }
        }
    }

    #[test]
    fn embed_identity_and_unmatched() {
        let m = mesh(Family::Koch, 2);
        let e = embed(&m, &m).unwrap();
        assert_eq!(e.index_map, (0..m.vertex_count()).collect::<Vec<_>>());

        let fine = mesh(Family::Koch, 1);
        assert!(matches!(
            embed(&m, &fine),
            Err(Error::IncompatibleMeshes(_))
        ));

        // a level-2 Hata tree is not contained in a level-3 Koch curve
        let h = mesh(Family::Hata2d, 2);
        assert!(embed(&h, &mesh(Family::Koch, 3)).is_err());
    }

    #[test]
    fn unmatched_vertex_detected() {
        let coarse = mesh(Family::Koch, 2);
        let fine = mesh(Family::Koch, 3);
        let mut moved = coarse.clone();
        moved.vertices[5] = Point::xy(0.123, 0.456);
        assert!(matches!(
            embed(&moved, &fine),
            Err(Error::UnmatchedVertex(5))
        ));
    }

    #[test]
    fn pool_flags_ambiguous_distances() {
        let mut pool = VertexPool::new(1e-6);
        pool.insert(Point::xy(0.0, 0.0)).unwrap();
        assert_eq!(pool.insert(Point::xy(1e-8, 0.0)).unwrap(), 0);
        assert!(matches!(
            pool.insert(Point::xy(5e-7, 0.0)),
            Err(Error::DedupAmbiguity { .. })
        ));
        assert_eq!(pool.insert(Point::xy(1e-5, 0.0)).unwrap(), 1);
    }

    #[test]
    fn from_parts_validates() {
        let m = mesh(Family::Sierpinski, 1);
        let ok = LevelMesh::from_parts(
            m.family(),
            1,
            m.vertices().to_vec(),
            m.edges().to_vec(),
            m.cells().to_vec(),
            m.boundary_indices().to_vec(),
        )
        .unwrap();
        assert_eq!(ok, m);

        let mut edges = m.edges().to_vec();
        edges.push((edges[0].1, edges[0].0));
        let dup = LevelMesh::from_parts(
            m.family(),
            1,
            m.vertices().to_vec(),
            edges,
            vec![],
            m.boundary_indices().to_vec(),
        );
        assert!(matches!(dup, Err(Error::InvalidMesh(_))));

        let wrong_boundary = LevelMesh::from_parts(
            m.family(),
            1,
            m.vertices().to_vec(),
            m.edges().to_vec(),
            vec![],
            vec![0, 1, 3],
        );
        assert!(matches!(wrong_boundary, Err(Error::InvalidMesh(_))));
    }
}
