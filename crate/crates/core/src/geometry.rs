//! Points and affine contractions in the plane or in space.

use crate::error::{Error, Result};

/// A point in R² or R³. Planar points keep a zero third coordinate internally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Point { coords: c, dim })
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point {
            coords: [x, y, z],
            dim: 3,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Coordinate `i`, with missing coordinates reading as zero.
    pub fn get(&self, i: usize) -> f64 {
        self.coords.get(i).copied().unwrap_or(0.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }

    pub(crate) fn raw(&self) -> &[f64; 3] {
        &self.coords
    }

    pub(crate) fn sub(&self, other: &Point) -> [f64; 3] {
        [
            self.coords[0] - other.coords[0],
            self.coords[1] - other.coords[1],
            self.coords[2] - other.coords[2],
        ]
    }
}

pub(crate) trait Vec3 {
    fn dot(&self, other: &Self) -> f64;
    fn norm(&self) -> f64;
}

impl Vec3 for [f64; 3] {
    fn dot(&self, other: &Self) -> f64 {
        self[0] * other[0] + self[1] * other[1] + self[2] * other[2]
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// `x ↦ linear · x + translation`, required to be a strict contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: [[f64; 3]; 3],
    translation: Point,
}

impl AffineMap {
    /// Builds a map from a row-major `d × d` matrix and a translation in `R^d`.
    pub fn new(linear: &[&[f64]], translation: Point) -> Result<Self> {
        let dim = translation.dim();
        if linear.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: linear.len(),
            });
        }
        let mut m = [[0.0; 3]; 3];
        for (i, row) in linear.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            m[i][..dim].copy_from_slice(row);
        }
        let map = AffineMap {
            linear: m,
            translation,
        };
        let norm = map.operator_norm();
        if norm >= 1.0 {
            return Err(Error::NotContraction(norm));
        }
        Ok(map)
    }

    /// Similarity `x ↦ scale · rotation · x + translation`.
    pub(crate) fn similarity(
        scale: f64,
        rotation: [[f64; 3]; 3],
        translation: Point,
    ) -> Result<Self> {
        let dim = translation.dim();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| scale * rotation[i][j]).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        AffineMap::new(&refs, translation)
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn linear(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d).map(|i| self.linear[i][..d].to_vec()).collect()
    }

    /// Spectral norm of the linear part (power iteration on `LᵀL`).
    pub fn operator_norm(&self) -> f64 {
        let d = self.dim();
        let l = &self.linear;
        let mut ltl = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                ltl[i][j] = (0..d).map(|k| l[k][i] * l[k][j]).sum();
            }
        }
        let mut v = [1.0, 0.7, 0.3];
        v[d..].iter_mut().for_each(|c| *c = 0.0);
        let mut lambda = 0.0;
        for _ in 0..200 {
            let mut w = [0.0; 3];
            for i in 0..d {
                w[i] = (0..d).map(|j| ltl[i][j] * v[j]).sum();
            }
            let n = w.norm();
            if n == 0.0 {
                return 0.0;
            }
            lambda = n;
            v = [w[0] / n, w[1] / n, w[2] / n];
        }
        lambda.sqrt()
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        Ok(self.apply_unchecked(p))
    }

    pub(crate) fn apply_unchecked(&self, p: &Point) -> Point {
        let d = self.dim();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(d) {
            *o = (0..d).map(|j| self.linear[i][j] * p.coords[j]).sum::<f64>()
                + self.translation.coords[i];
        }
        Point {
            coords: out,
            dim: d,
        }
    }
}

/// Applies `m` to `p`, failing when their dimensions differ.
pub fn apply_map(m: &AffineMap, p: &Point) -> Result<Point> {
    m.apply(p)
}

/// Counter-clockwise rotation in the xy-plane.
pub(crate) fn planar_rotation(theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation by `angle` about the unit `axis` (Rodrigues).
pub(crate) fn axis_rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = axis;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

pub(crate) const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
