//! Point-set ingestion and validated convex hull topology.

mod mesh;
mod quickhull;
mod validate;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geom::Vec3;

pub use mesh::{load_mesh, parse_obj, parse_ply};
pub use quickhull::build_hull;
pub use validate::{validate_topology, Check, ValidationReport};

/// Largest vertex or face count addressable with 16-bit indices once
/// `0xFFFF` is reserved as the empty-slot sentinel.
pub const MAX_ELEMENTS: usize = 0xFFFF;

/// An ordered set of input points with a label describing where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vec3>,
    pub source_label: String,
}

impl PointSet {
    /// Rejects sets containing non-finite coordinates.
    pub fn new(points: Vec<Vec3>, source_label: impl Into<String>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(PointSet {
            points,
            source_label: source_label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `n` points uniformly on the unit sphere. The same seed always
/// produces the same sequence.
pub fn sample_sphere(n: usize, seed: u64) -> Result<PointSet> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "sphere sampling needs at least 4 points, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let v = Vec3::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        );
        let len = v.norm();
        if len > 1e-6 {
            points.push(v / len);
        }
    }
    Ok(PointSet {
        points,
        source_label: format!("sphere-{n}-seed{seed}"),
    })
}

/// Enclosing sphere of a hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

/// Triangulated convex hull with vertex and face connectivity.
///
/// Faces are wound counter-clockwise seen from outside, so
/// `(v1 - v0) x (v2 - v0)` points out of the hull. `face_adjacency[f][i]` is the
/// face across the edge `(faces[f][i], faces[f][(i + 1) % 3])`. Coplanar
/// triangles that came from one planar facet share one normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HullTopology {
    pub vertices: Vec<Vec3>,
    /// Neighbor vertex indices per vertex, ascending.
    pub adjacency: Vec<Vec<u32>>,
    pub faces: Vec<[u32; 3]>,
    pub face_normals: Vec<Vec3>,
    pub face_adjacency: Vec<[u32; 3]>,
    pub bounding_sphere: Sphere,
}

impl HullTopology {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of undirected edges, counted from the vertex adjacency.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        (self.vertices[a as usize] + self.vertices[b as usize] + self.vertices[c as usize]) / 3.0
    }

    /// Vertex-averaged centroid.
    pub fn centroid(&self) -> Vec3 {
        let sum = self.vertices.iter().fold(Vec3::ZERO, |acc, &v| acc + v);
        sum / self.vertices.len() as f64
    }
}

/// Ritter's two-pass approximate bounding sphere: seed with the diameter
/// estimate from two farthest-point sweeps, then grow over every point.
pub fn ritter_sphere(points: &[Vec3]) -> Sphere {
    assert!(!points.is_empty(), "bounding sphere of an empty point set");
    let farthest = |from: Vec3| {
        points
            .iter()
            .copied()
            .fold((from, -1.0), |(best, bd), p| {
                let d = (p - from).norm_squared();
                if d > bd {
                    (p, d)
                } else {
                    (best, bd)
                }
            })
            .0
    };
    let b = farthest(points[0]);
    let c = farthest(b);
    let mut center = (b + c) * 0.5;
    let mut radius = (c - b).norm() * 0.5;

    for &p in points {
        let d = (p - center).norm();
        if d > radius {
            let new_radius = 0.5 * (radius + d);
            center += (p - center) * ((new_radius - radius) / d);
            radius = new_radius;
        }
    }
    // Rounding in the growth step can leave points a few ulps outside.
    let exact = points
        .iter()
        .map(|&p| (p - center).norm())
        .fold(0.0, f64::max);
    Sphere {
        center,
        radius: radius.max(exact),
    }
}

/// Bounding sphere of the hull's vertices (Ritter approximation).
pub fn bounding_sphere(hull: &HullTopology) -> Sphere {
    ritter_sphere(&hull.vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_sphere_points_are_unit() {
        let ps = sample_sphere(4, 1).unwrap();
        assert_eq!(ps.len(), 4);
        for p in &ps.points {
            assert!((p.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn sample_sphere_is_deterministic() {
        let a = sample_sphere(1024, 7).unwrap();
        let b = sample_sphere(1024, 7).unwrap();
        let bits = |ps: &PointSet| {
            ps.points
                .iter()
                .flat_map(|p| p.to_array().map(f64::to_bits))
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&sample_sphere(1024, 8).unwrap()));
    }

    #[test]
    fn sample_sphere_mean_is_near_origin() {
        // Mean of n uniform unit vectors has norm ~ 1/sqrt(n) = 0.01 here.
        let ps = sample_sphere(10_000, 3).unwrap();
        let mean = ps.points.iter().fold(Vec3::ZERO, |a, &p| a + p) / ps.len() as f64;
        assert!(mean.norm() < 0.05, "mean norm {}", mean.norm());
    }

    #[test]
    fn sample_sphere_rejects_small_n() {
        assert!(matches!(
            sample_sphere(3, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn point_set_rejects_nan() {
        let r = PointSet::new(vec![Vec3::new(0.0, f64::NAN, 0.0)], "bad");
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ritter_cube_is_circumsphere() {
        let pts: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let s = ritter_sphere(&pts);
        assert!((s.center - Vec3::new(0.5, 0.5, 0.5)).norm() <= 0.05);
        assert!(s.radius >= 0.866 && s.radius <= 1.3, "radius {}", s.radius);
    }
}
