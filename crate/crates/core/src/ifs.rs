//! Iterated function systems for the built-in fractal families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{axis_rotation, planar_rotation, AffineMap, Point, IDENTITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Koch,
    Sierpinski,
    Hata2d,
    Hata3d,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Koch,
        Family::Sierpinski,
        Family::Hata2d,
        Family::Hata3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Koch => "koch",
            Family::Sierpinski => "sierpinski",
            Family::Hata2d => "hata2d",
            Family::Hata3d => "hata3d",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "koch" => Ok(Family::Koch),
            "sierpinski" => Ok(Family::Sierpinski),
            "hata2d" => Ok(Family::Hata2d),
            "hata3d" => Ok(Family::Hata3d),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// A finite family of contractions together with the seed set `W_0` and its
/// boundary points `V_0`.
#[derive(Debug, Clone)]
pub struct IFSystem {
    family: Family,
    maps: Vec<AffineMap>,
    seed_edges: Vec<(Point, Point)>,
    boundary_points: Vec<Point>,
    cell_generation: bool,
}

impl IFSystem {
    pub fn new(
        family: Family,
        maps: Vec<AffineMap>,
        seed_edges: Vec<(Point, Point)>,
        boundary_points: Vec<Point>,
        cell_generation: bool,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidIfs("no maps".into()));
        }
        if seed_edges.is_empty() {
            return Err(Error::InvalidIfs("empty seed".into()));
        }
        let dim = maps[0].dim();
        let dims_ok = maps.iter().all(|m| m.dim() == dim)
            && seed_edges
                .iter()
                .all(|(a, b)| a.dim() == dim && b.dim() == dim)
            && boundary_points.iter().all(|p| p.dim() == dim);
        if !dims_ok {
            return Err(Error::InvalidIfs("mixed dimensions".into()));
        }
        for p in &boundary_points {
            let is_endpoint = seed_edges.iter().any(|(a, b)| a == p || b == p);
            if !is_endpoint {
                return Err(Error::InvalidIfs(format!(
                    "boundary point {:?} is not a seed endpoint",
                    p.coords()
                )));
            }
        }
        if cell_generation && seed_edges.len() != 3 {
            return Err(Error::InvalidIfs(
                "cell generation needs a triangular seed".into(),
            ));
        }
        Ok(IFSystem {
            family,
            maps,
            seed_edges,
            boundary_points,
            cell_generation,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn family_name(&self) -> &'static str {
        self.family.name()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn seed_edges(&self) -> &[(Point, Point)] {
        &self.seed_edges
    }

    pub fn boundary_points(&self) -> &[Point] {
        &self.boundary_points
    }

    pub fn cell_generation(&self) -> bool {
        self.cell_generation
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }
}

/// The IFS of one of the built-in families.
pub fn builtin(family: Family) -> IFSystem {
    let build = match family {
        Family::Koch => koch(),
        Family::Sierpinski => sierpinski(),
        Family::Hata2d => hata2d(),
        Family::Hata3d => hata3d(),
    };
    build.expect("built-in IFS definitions are valid")
}

/// Looks a family up by name.
pub fn builtin_named(name: &str) -> Result<IFSystem> {
    Ok(builtin(name.parse()?))
}

const THIRD: f64 = 1.0 / 3.0;

fn sierpinski() -> Result<IFSystem> {
    let s3 = 3f64.sqrt();
    let a = [
        Point::xy(0.0, 0.0),
        Point::xy(1.0, 0.0),
        Point::xy(0.5, s3 / 2.0),
    ];
    // f_i(x) = (x - a_i)/2 + a_i
    let maps = a
        .iter()
        .map(|ai| AffineMap::similarity(0.5, IDENTITY, Point::xy(ai.get(0) / 2.0, ai.get(1) / 2.0)))
        .collect::<Result<Vec<_>>>()?;
    let seed = vec![(a[0], a[1]), (a[1], a[2]), (a[2], a[0])];
    IFSystem::new(Family::Sierpinski, maps, seed, a.to_vec(), true)
}

/// Standard Koch generator: four thirds at angles 0°, +60°, -60°, 0°.
fn koch() -> Result<IFSystem> {
    let s3 = 3f64.sqrt();
    let pi3 = std::f64::consts::FRAC_PI_3;
    let maps = vec![
        AffineMap::similarity(THIRD, IDENTITY, Point::xy(0.0, 0.0))?,
        AffineMap::similarity(THIRD, planar_rotation(pi3), Point::xy(THIRD, 0.0))?,
        AffineMap::similarity(THIRD, planar_rotation(-pi3), Point::xy(0.5, s3 / 6.0))?,
        AffineMap::similarity(THIRD, IDENTITY, Point::xy(2.0 * THIRD, 0.0))?,
    ];
    let (p, q) = (Point::xy(0.0, 0.0), Point::xy(1.0, 0.0));
    IFSystem::new(Family::Koch, maps, vec![(p, q)], vec![p, q], false)
}

fn hata2d() -> Result<IFSystem> {
    let r = planar_rotation(std::f64::consts::FRAC_PI_3);
    let maps = vec![
        AffineMap::similarity(THIRD, IDENTITY, Point::xy(0.0, 0.0))?,
        AffineMap::similarity(THIRD, r, Point::xy(THIRD, 0.0))?,
        AffineMap::similarity(THIRD, IDENTITY, Point::xy(THIRD, 0.0))?,
        AffineMap::similarity(THIRD, r, Point::xy(2.0 * THIRD, 0.0))?,
        AffineMap::similarity(THIRD, IDENTITY, Point::xy(2.0 * THIRD, 0.0))?,
    ];
    let (p, q) = (Point::xy(0.0, 0.0), Point::xy(1.0, 0.0));
    IFSystem::new(Family::Hata2d, maps, vec![(p, q)], vec![p, q], false)
}

/// Trunk along the z-axis with three side branches tilted by π/4 toward
/// `n1/2 + √3/2 n2`, `-n1/2 + √3/2 n2` and `-n1`, where `n1 = e_x`, `n2 = e_y`.
fn hata3d() -> Result<IFSystem> {
    let s3 = 3f64.sqrt();
    let tilt = std::f64::consts::FRAC_PI_4;
    let branch = |d: [f64; 2]| -> [[f64; 3]; 3] {
        // e_z × d, normalized; rotating e_z about it by `tilt` gives cos·e_z + sin·d
        let axis = [-d[1], d[0], 0.0];
        let n = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
        axis_rotation([axis[0] / n, axis[1] / n, 0.0], tilt)
    };
    let z = |h: f64| Point::xyz(0.0, 0.0, h);
    let maps = vec![
        AffineMap::similarity(THIRD, IDENTITY, z(0.0))?,
        AffineMap::similarity(THIRD, branch([0.5, s3 / 2.0]), z(THIRD))?,
        AffineMap::similarity(THIRD, IDENTITY, z(THIRD))?,
        AffineMap::similarity(THIRD, branch([-0.5, s3 / 2.0]), z(2.0 * THIRD))?,
        AffineMap::similarity(THIRD, branch([-1.0, 0.0]), z(2.0 * THIRD))?,
        AffineMap::similarity(THIRD, IDENTITY, z(2.0 * THIRD))?,
    ];
    let (p, q) = (z(0.0), z(1.0));
    IFSystem::new(Family::Hata3d, maps, vec![(p, q)], vec![p, q], false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::apply_map;

    fn close(p: &Point, q: &[f64]) -> bool {
        p.coords().iter().zip(q).all(|(a, b)| (a - b).abs() < 1e-15)
    }

    #[test]
    fn sierpinski_maps() {
        let ifs = builtin(Family::Sierpinski);
        assert_eq!(ifs.maps().len(), 3);
        assert_eq!(ifs.seed_edges().len(), 3);
        assert_eq!(ifs.boundary_points().len(), 3);
        assert!(ifs.cell_generation());
        let f = ifs.maps();
        assert!(close(
            &apply_map(&f[0], &Point::xy(1.0, 0.0)).unwrap(),
            &[0.5, 0.0]
        ));
        assert!(close(
            &apply_map(&f[1], &Point::xy(1.0, 0.0)).unwrap(),
            &[1.0, 0.0]
        ));
        let a2 = ifs.boundary_points()[2];
        assert!(close(&apply_map(&f[2], &a2).unwrap(), a2.coords()));
    }

    #[test]
    fn hata2d_branch_map() {
        let ifs = builtin(Family::Hata2d);
        assert_eq!(ifs.maps().len(), 5);
        assert_eq!(ifs.seed_edges().len(), 1);
        assert!(!ifs.cell_generation());
        let p = apply_map(&ifs.maps()[1], &Point::xy(1.0, 0.0)).unwrap();
        assert!(close(&p, &[0.5, 3f64.sqrt() / 6.0]));
    }

    #[test]
    fn koch_generator_is_continuous() {
        let ifs = builtin(Family::Koch);
        let (p, q) = (Point::xy(0.0, 0.0), Point::xy(1.0, 0.0));
        let f = ifs.maps();
        for i in 0..3 {
            let end = f[i].apply(&q).unwrap();
            let start = f[i + 1].apply(&p).unwrap();
            assert!(
                end.distance(&start) < 1e-15,
                "gap between piece {i} and {}",
                i + 1
            );
        }
        assert!(close(&f[3].apply(&q).unwrap(), &[1.0, 0.0]));
        assert!(close(&f[1].apply(&q).unwrap(), &[0.5, 3f64.sqrt() / 6.0]));
    }

    #[test]
    fn hata3d_branches() {
        let ifs = builtin(Family::Hata3d);
        assert_eq!(ifs.maps().len(), 6);
        assert_eq!(ifs.dim(), 3);
        let k = std::f64::consts::FRAC_1_SQRT_2 / 3.0;
        let s3 = 3f64.sqrt();
        let tip = ifs.maps()[1].apply(&Point::xyz(0.0, 0.0, 1.0)).unwrap();
        assert!(close(&tip, &[k * 0.5, k * s3 / 2.0, THIRD + k]));
        let tip = ifs.maps()[4].apply(&Point::xyz(0.0, 0.0, 1.0)).unwrap();
        assert!(close(&tip, &[-k, 0.0, 2.0 * THIRD + k]));
        for m in ifs.maps() {
            assert!((m.operator_norm() - THIRD).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_family() {
        assert!(matches!(
            builtin_named("cantor"),
            Err(Error::UnknownFamily(_))
        ));
        assert_eq!(builtin_named("Hata3D").unwrap().family(), Family::Hata3d);
    }
}
