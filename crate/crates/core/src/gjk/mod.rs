//! GJK distance and intersection queries between two posed convex shapes.

pub mod reference;
mod simplex;

pub use simplex::{closest_to_origin, Reduction};

use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::support::{Direction, SupportMap};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: u32 = 128;

/// Rigid placement of a shape: `world = rotation * local + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Mat3,
    translation: Vec3,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Pose> {
        let err = rotation.orthonormality_error();
        if !(err <= 1e-9) || !translation.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pose needs an orthonormal rotation and finite translation (RtR error {err:e})"
            )));
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }

    pub fn from_translation(t: Vec3) -> Result<Pose> {
        Pose::new(Mat3::IDENTITY, t)
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    #[inline]
    pub fn to_world(&self, p: Vec3) -> Vec3 {
        self.rotation.mul_vec(p) + self.translation
    }

    #[inline]
    pub fn dir_to_local(&self, d: Vec3) -> Vec3 {
        self.rotation.transpose_mul_vec(d)
    }

    /// The same pose shifted by `t` in world space.
    pub fn translated(&self, t: Vec3) -> Pose {
        Pose {
            rotation: self.rotation,
            translation: self.translation + t,
        }
    }
}

/// A point of the Minkowski difference `A - B` with its origins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsoPoint {
    pub w: Vec3,
    pub a: Vec3,
    pub b: Vec3,
    pub index_a: usize,
    pub index_b: usize,
}

/// One to four CSO points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    points: [CsoPoint; 4],
    len: usize,
}

impl Simplex {
    pub fn new(points: &[CsoPoint]) -> Result<Simplex> {
        if points.is_empty() || points.len() > 4 {
            return Err(Error::InvalidArgument(format!(
                "simplex needs 1 to 4 points, got {}",
                points.len()
            )));
        }
        let mut s = Simplex {
            points: [points[0]; 4],
            len: points.len(),
        };
        s.points[..points.len()].copy_from_slice(points);
        Ok(s)
    }

    pub fn points(&self) -> &[CsoPoint] {
        &self.points[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn contains(&self, p: &CsoPoint) -> bool {
        self.points()
            .iter()
            .any(|q| q.index_a == p.index_a && q.index_b == p.index_b)
    }

    fn push(&mut self, p: CsoPoint) {
        self.points[self.len] = p;
        self.len += 1;
    }
}

/// Closest point on a simplex to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexClosest {
    pub closest: Vec3,
    /// Weights of `reduced`'s points, in order.
    pub barycentric: [f64; 4],
    pub reduced: Simplex,
}

/// Signed Volumes sub-algorithm on a tagged simplex.
pub fn signed_volumes_closest(simplex: &Simplex) -> SimplexClosest {
    let ws: [Vec3; 4] = simplex.points.map(|p| p.w);
    let r = closest_to_origin(&ws[..simplex.len]);
    let mut reduced = Simplex {
        points: simplex.points,
        len: r.len,
    };
    for k in 0..r.len {
        reduced.points[k] = simplex.points[r.indices[k]];
    }
    SimplexClosest {
        closest: r.closest,
        barycentric: r.weights,
        reduced,
    }
}

/// Support point of `A - B` in world direction `d`.
pub fn minkowski_support<A, B>(
    a: &A,
    pose_a: &Pose,
    b: &B,
    pose_b: &Pose,
    d: &Direction,
) -> CsoPoint
where
    A: SupportMap + ?Sized,
    B: SupportMap + ?Sized,
{
    let dv = d.vec();
    // Rotations preserve length, so the local directions stay valid.
    let da = Direction::new(pose_a.dir_to_local(dv)).expect("rotated direction is nonzero");
    let db = Direction::new(-pose_b.dir_to_local(dv)).expect("rotated direction is nonzero");
    let sa = a.support(&da);
    let sb = b.support(&db);
    let pa = pose_a.to_world(sa.point);
    let pb = pose_b.to_world(sb.point);
    CsoPoint {
        w: pa - pb,
        a: pa,
        b: pb,
        index_a: sa.vertex_index,
        index_b: sb.vertex_index,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GjkStatus {
    Intersecting,
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GjkResult {
    pub status: GjkStatus,
    /// Zero when intersecting.
    pub distance: f64,
    pub witness_a: Vec3,
    pub witness_b: Vec3,
    pub iterations: u32,
    /// False when `max_iter` was reached first.
    pub converged: bool,
}

/// Distance between two posed shapes, or intersection.
pub fn gjk_query<A, B>(
    a: &A,
    pose_a: &Pose,
    b: &B,
    pose_b: &Pose,
    rel_tol: f64,
    max_iter: u32,
) -> Result<GjkResult>
where
    A: SupportMap + ?Sized,
    B: SupportMap + ?Sized,
{
    run(a, pose_a, b, pose_b, rel_tol, max_iter, &mut |_| {})
}

/// Like [`gjk_query`], also returning the lower bound on the distance
/// established at each iteration.
pub fn gjk_query_traced<A, B>(
    a: &A,
    pose_a: &Pose,
    b: &B,
    pose_b: &Pose,
    rel_tol: f64,
    max_iter: u32,
) -> Result<(GjkResult, Vec<f64>)>
where
    A: SupportMap + ?Sized,
    B: SupportMap + ?Sized,
{
    let mut bounds = Vec::new();
    let r = run(a, pose_a, b, pose_b, rel_tol, max_iter, &mut |lb| {
        bounds.push(lb)
    })?;
    Ok((r, bounds))
}

fn run<A, B>(
    a: &A,
    pose_a: &Pose,
    b: &B,
    pose_b: &Pose,
    rel_tol: f64,
    max_iter: u32,
    lower_bound: &mut dyn FnMut(f64),
) -> Result<GjkResult>
where
    A: SupportMap + ?Sized,
    B: SupportMap + ?Sized,
{
    if !(rel_tol > 0.0) || !rel_tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be positive".into()));
    }

    let init = pose_a.to_world(a.center()) - pose_b.to_world(b.center());
    let d0 = Direction::new(init).unwrap_or(Direction::new(Vec3::X).expect("+X is nonzero"));
    let first = minkowski_support(
        a,
        pose_a,
        b,
        pose_b,
        &Direction::new(-d0.vec()).expect("nonzero"),
    );
    let mut simplex = Simplex::new(&[first]).expect("one point");
    let mut weights = [1.0, 0.0, 0.0, 0.0];
    let mut v = first.w;
    let mut scale = first.w.norm();
    let mut iterations = 0;
    let mut converged = false;
    let mut intersecting = false;

    while iterations < max_iter {
        let vv = v.norm_squared();
        if vv <= 1e-24 * scale * scale {
            intersecting = true;
            converged = true;
            break;
        }
        iterations += 1;
        let dir = Direction::new(-v).expect("v is nonzero");
        let w = minkowski_support(a, pose_a, b, pose_b, &dir);
        scale = scale.max(w.w.norm());
        let vw = v.dot(w.w);
        lower_bound(if vw > 0.0 { vw / vv.sqrt() } else { 0.0 });
        if vv - vw <= rel_tol * vv || simplex.contains(&w) {
            converged = true;
            break;
        }
        let mut grown = simplex;
        grown.push(w);
        let c = signed_volumes_closest(&grown);
        if c.reduced.len() == 4 {
            simplex = c.reduced;
            weights = c.barycentric;
            intersecting = true;
            converged = true;
            break;
        }
        if c.closest.norm_squared() >= vv {
            // No progress: keep the previous, better estimate.
            converged = true;
            break;
        }
        simplex = c.reduced;
        weights = c.barycentric;
        v = c.closest;
    }

    let mut wa = Vec3::ZERO;
    let mut wb = Vec3::ZERO;
    for (p, &l) in simplex.points().iter().zip(&weights) {
        wa += p.a * l;
        wb += p.b * l;
    }
    Ok(if intersecting {
        GjkResult {
            status: GjkStatus::Intersecting,
            distance: 0.0,
            witness_a: wa,
            witness_b: wb,
            iterations,
            converged,
        }
    } else {
        GjkResult {
            status: GjkStatus::Separated,
            distance: (wa - wb).norm(),
            witness_a: wa,
            witness_b: wb,
            iterations,
            converged,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{build_hull, sample_sphere, PointSet};
    use crate::support::{BackendSet, Method, NaiveHull};

    fn unit_cube() -> NaiveHull {
        let pts = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        NaiveHull::new(&build_hull(&PointSet::new(pts, "cube").unwrap()).unwrap())
    }

    fn at(x: f64, y: f64, z: f64) -> Pose {
        Pose::from_translation(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn pose_validation() {
        let mut m = Mat3::IDENTITY;
        m.rows[0].x = 1.1;
        assert!(Pose::new(m, Vec3::ZERO).is_err());
        assert!(Pose::new(Mat3::IDENTITY, Vec3::new(f64::NAN, 0.0, 0.0)).is_err());
        assert!(Pose::new(Mat3::from_axis_angle(Vec3::Z, 0.3), Vec3::ZERO).is_ok());
    }

    #[test]
    fn cso_support_of_cubes() {
        let c = unit_cube();
        let d = Direction::new(Vec3::X).unwrap();
        let p = minkowski_support(&c, &Pose::IDENTITY, &c, &Pose::IDENTITY, &d);
        assert_eq!(p.w.x, 1.0);
    }

    #[test]
    fn overlapping_cubes_intersect() {
        let c = unit_cube();
        let r = gjk_query(
            &c,
            &Pose::IDENTITY,
            &c,
            &at(0.5, 0.0, 0.0),
            DEFAULT_REL_TOL,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        assert_eq!(r.status, GjkStatus::Intersecting);
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn separated_cubes() {
        let c = unit_cube();
        let r = gjk_query(
            &c,
            &Pose::IDENTITY,
            &c,
            &at(2.0, 0.0, 0.0),
            DEFAULT_REL_TOL,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        assert_eq!(r.status, GjkStatus::Separated);
        assert!((r.distance - 1.0).abs() < 1e-9, "{r:?}");
        assert!((r.witness_a.x - 1.0).abs() < 1e-9);
        assert!((r.witness_b.x - 2.0).abs() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn spheres_three_apart() {
        let h = build_hull(&sample_sphere(2048, 7).unwrap()).unwrap();
        let set = BackendSet::build(&h).unwrap();
        for m in Method::ALL {
            let s = set.get(m);
            let r = gjk_query(
                s,
                &Pose::IDENTITY,
                s,
                &at(3.0, 0.0, 0.0),
                DEFAULT_REL_TOL,
                DEFAULT_MAX_ITER,
            )
            .unwrap();
            assert_eq!(r.status, GjkStatus::Separated);
            assert!((r.distance - 1.0).abs() < 0.02, "{m}: {}", r.distance);
        }
    }

    #[test]
    fn bad_parameters() {
        let c = unit_cube();
        assert!(gjk_query(&c, &Pose::IDENTITY, &c, &Pose::IDENTITY, 0.0, 10).is_err());
        assert!(gjk_query(&c, &Pose::IDENTITY, &c, &Pose::IDENTITY, 1e-10, 0).is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let c = unit_cube();
        let rot = Pose::new(
            Mat3::from_axis_angle(Vec3::new(1.0, 2.0, 3.0), 0.4),
            Vec3::new(2.2, 0.3, 0.1),
        )
        .unwrap();
        let full = gjk_query(
            &c,
            &Pose::IDENTITY,
            &c,
            &rot,
            DEFAULT_REL_TOL,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        assert!(full.converged && full.iterations > 1);
        let r = gjk_query(&c, &Pose::IDENTITY, &c, &rot, DEFAULT_REL_TOL, 1).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(!r.converged);
        assert!(r.distance >= full.distance - 1e-12);
    }

    #[test]
    fn random_tetrahedra_match_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let pts: Vec<Vec3> = (0..4)
                .map(|_| {
                    Vec3::new(
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    )
                })
                .collect();
            let sv = closest_to_origin(&pts).closest;
            let brute = reference::closest_by_enumeration(&pts);
            assert!((sv - brute).norm() < 1e-9, "{pts:?}: {sv:?} vs {brute:?}");
        }
    }

    #[test]
    fn tagged_segment_reduction() {
        let p = |x: f64, i: usize| CsoPoint {
            w: Vec3::new(x, -1.0, 0.0),
            a: Vec3::ZERO,
            b: Vec3::ZERO,
            index_a: i,
            index_b: i,
        };
        let s = Simplex::new(&[p(-1.0, 0), p(1.0, 1)]).unwrap();
        let c = signed_volumes_closest(&s);
        assert_eq!(c.closest, Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(&c.barycentric[..2], &[0.5, 0.5]);
        assert_eq!(c.reduced.len(), 2);
        assert!(Simplex::new(&[]).is_err());
    }
}
