//! Support-point queries: a brute-force oracle and four hill-climbing
//! backends over different memory layouts.
//!
//! Every climb moves only on strict improvement of `d . v` and always to the
//! best neighbor, so it terminates without a visited set. On a convex
//! polytope a vertex with no strictly better neighbor is a global maximum.

use crate::error::{Error, Result};
use crate::fxtrig::decode_normal;
use crate::geom::Vec3;
use crate::hull::HullTopology;
use crate::layouts::{
    build_internally_connected, compute_warm_starts, face_traversing_with, spherical_with,
    FaceTraversingHull, InternallyConnectedHull, PackedVertexRecord, SphericalHull, WarmStartTable,
    DEFAULT_FILL_RADIUS_FRACTION, SENTINEL,
};

/// A nonzero, finite query direction. Need not be unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec3);

impl Direction {
    pub fn new(v: Vec3) -> Result<Self> {
        let m = v.abs();
        let largest = m.x.max(m.y).max(m.z);
        let norm = if largest > 0.0 {
            largest * (v / largest).norm()
        } else {
            0.0
        };
        if !v.is_finite() || !(norm > 1e-300) {
            return Err(Error::InvalidArgument(format!(
                "direction must be finite and nonzero, got {v:?}"
            )));
        }
        Ok(Direction(v))
    }

    #[inline(always)]
    pub fn vec(&self) -> Vec3 {
        self.0
    }
}

impl TryFrom<Vec3> for Direction {
    type Error = Error;
    fn try_from(v: Vec3) -> Result<Self> {
        Direction::new(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SupportStats {
    pub vertex_visits: u32,
    pub face_visits: u32,
    pub dot_products_evaluated: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportQueryResult {
    pub vertex_index: usize,
    pub point: Vec3,
    /// `direction . point`, computed with [`Vec3::dot`].
    pub support_value: f64,
    pub stats: SupportStats,
}

/// One accepted step of a climb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Face { index: usize, value: f64 },
    Vertex { index: usize, value: f64 },
}

/// Receives accepted climb steps. The unit type ignores them and compiles
/// away.
pub trait Observer {
    fn step(&mut self, s: Step);
}

impl Observer for () {
    #[inline(always)]
    fn step(&mut self, _: Step) {}
}

impl Observer for Vec<Step> {
    fn step(&mut self, s: Step) {
        self.push(s);
    }
}

/// Brute force over all vertices; ties go to the lowest index.
pub fn support_naive(hull: &HullTopology, d: &Direction) -> SupportQueryResult {
    naive(&hull.vertices, d.vec())
}

#[inline]
fn naive(vertices: &[Vec3], d: Vec3) -> SupportQueryResult {
    let mut best = 0;
    let mut best_dot = f64::NEG_INFINITY;
    for (i, v) in vertices.iter().enumerate() {
        let dot = d.dot(*v);
        if dot > best_dot {
            best = i;
            best_dot = dot;
        }
    }
    SupportQueryResult {
        vertex_index: best,
        point: vertices[best],
        support_value: best_dot,
        stats: SupportStats {
            vertex_visits: 0,
            face_visits: 0,
            dot_products_evaluated: vertices.len() as u32,
        },
    }
}

/// Hill climbing over the hull's adjacency lists from `start`.
pub fn support_hill_climb(
    hull: &HullTopology,
    d: &Direction,
    start: usize,
) -> Result<SupportQueryResult> {
    if start >= hull.vertex_count() {
        return Err(Error::InvalidArgument(format!(
            "start vertex {start} out of range for {} vertices",
            hull.vertex_count()
        )));
    }
    Ok(climb_lists(hull, d.vec(), start, &mut ()))
}

#[inline]
fn climb_lists<O: Observer>(
    hull: &HullTopology,
    d: Vec3,
    start: usize,
    obs: &mut O,
) -> SupportQueryResult {
    let verts = &hull.vertices;
    let mut stats = SupportStats::default();
    let mut cur = start;
    let mut cur_dot = d.dot(verts[cur]);
    stats.dot_products_evaluated += 1;
    stats.vertex_visits += 1;
    obs.step(Step::Vertex {
        index: cur,
        value: cur_dot,
    });
    loop {
        let mut best = cur;
        let mut best_dot = cur_dot;
        for &n in &hull.adjacency[cur] {
            let dot = d.dot(verts[n as usize]);
            stats.dot_products_evaluated += 1;
            if dot > best_dot {
                best = n as usize;
                best_dot = dot;
            }
        }
        if best == cur {
            break;
        }
        cur = best;
        cur_dot = best_dot;
        stats.vertex_visits += 1;
        obs.step(Step::Vertex {
            index: cur,
            value: cur_dot,
        });
    }
    SupportQueryResult {
        vertex_index: cur,
        point: verts[cur],
        support_value: cur_dot,
        stats,
    }
}

/// Climb over packed vertex records, following extension chains.
#[inline]
fn climb_packed<O: Observer>(
    ic: &InternallyConnectedHull,
    d: Vec3,
    start: usize,
    stats: &mut SupportStats,
    obs: &mut O,
) -> (usize, f64) {
    let verts: &[PackedVertexRecord] = &ic.vertices;
    let exts = &ic.extensions[..];
    let mut cur = start;
    let mut cur_dot = d.dot(verts[cur].point());
    stats.dot_products_evaluated += 1;
    stats.vertex_visits += 1;
    obs.step(Step::Vertex {
        index: cur,
        value: cur_dot,
    });
    loop {
        let rec = &verts[cur];
        let mut best = cur;
        let mut best_dot = cur_dot;
        for &n in &rec.neighbors {
            if n == SENTINEL {
                break;
            }
            let dot = d.dot(verts[n as usize].point());
            stats.dot_products_evaluated += 1;
            if dot > best_dot {
                best = n as usize;
                best_dot = dot;
            }
        }
        let mut ext = rec.extension;
        while ext != SENTINEL {
            let e = &exts[ext as usize];
            for &n in &e.neighbors {
                if n == SENTINEL {
                    break;
                }
                let dot = d.dot(verts[n as usize].point());
                stats.dot_products_evaluated += 1;
                if dot > best_dot {
                    best = n as usize;
                    best_dot = dot;
                }
            }
            ext = e.next;
        }
        if best == cur {
            return (cur, cur_dot);
        }
        cur = best;
        cur_dot = best_dot;
        stats.vertex_visits += 1;
        obs.step(Step::Vertex {
            index: cur,
            value: cur_dot,
        });
    }
}

/// Climb over face records, each face having exactly three neighbors.
#[inline]
fn climb_faces<O: Observer>(
    neighbors: impl Fn(usize) -> [u16; 3],
    normal: impl Fn(usize) -> Vec3,
    d: Vec3,
    start: usize,
    stats: &mut SupportStats,
    obs: &mut O,
) -> usize {
    let mut cur = start;
    let mut cur_dot = d.dot(normal(cur));
    stats.dot_products_evaluated += 1;
    stats.face_visits += 1;
    obs.step(Step::Face {
        index: cur,
        value: cur_dot,
    });
    loop {
        let mut best = cur;
        let mut best_dot = cur_dot;
        for g in neighbors(cur) {
            let dot = d.dot(normal(g as usize));
            stats.dot_products_evaluated += 1;
            if dot > best_dot {
                best = g as usize;
                best_dot = dot;
            }
        }
        if best == cur {
            return cur;
        }
        cur = best;
        cur_dot = best_dot;
        stats.face_visits += 1;
        obs.step(Step::Face {
            index: cur,
            value: cur_dot,
        });
    }
}

fn packed_result(
    ic: &InternallyConnectedHull,
    (v, dot): (usize, f64),
    stats: SupportStats,
) -> SupportQueryResult {
    SupportQueryResult {
        vertex_index: v,
        point: ic.vertices[v].point(),
        support_value: dot,
        stats,
    }
}

pub fn support_internally_connected(
    ic: &InternallyConnectedHull,
    d: &Direction,
) -> SupportQueryResult {
    ic_traced(ic, d.vec(), &mut ())
}

#[inline]
fn ic_traced<O: Observer>(
    ic: &InternallyConnectedHull,
    d: Vec3,
    obs: &mut O,
) -> SupportQueryResult {
    let mut stats = SupportStats::default();
    let start = ic.warm_starts.vertex_for(d) as usize;
    let found = climb_packed(ic, d, start, &mut stats, obs);
    packed_result(ic, found, stats)
}

/// Two phases: climb face normals to the face best aligned with `d`, then
/// climb vertices from that face's anchor.
pub fn support_face_traversing(ft: &FaceTraversingHull, d: &Direction) -> SupportQueryResult {
    ft_traced(ft, d.vec(), &mut ())
}

#[inline]
fn ft_traced<O: Observer>(ft: &FaceTraversingHull, d: Vec3, obs: &mut O) -> SupportQueryResult {
    let faces = &ft.faces[..];
    let mut stats = SupportStats::default();
    let f = climb_faces(
        |f| faces[f].neighbors,
        |f| Vec3::from_array(faces[f].normal),
        d,
        ft.warm_starts().face_for(d) as usize,
        &mut stats,
        obs,
    );
    let found = climb_packed(
        &ft.vertex_hull,
        d,
        faces[f].anchor as usize,
        &mut stats,
        obs,
    );
    packed_result(&ft.vertex_hull, found, stats)
}

/// Same as [`support_face_traversing`] with normals decoded from the
/// spherical encoding. The face phase is approximate; the vertex phase
/// makes the final answer exact.
pub fn support_spherical(se: &SphericalHull, d: &Direction) -> SupportQueryResult {
    se_traced(se, d.vec(), &mut ())
}

#[inline]
fn se_traced<O: Observer>(se: &SphericalHull, d: Vec3, obs: &mut O) -> SupportQueryResult {
    let faces = &se.faces[..];
    let mut stats = SupportStats::default();
    let f = climb_faces(
        |f| faces[f].neighbors,
        |f| decode_normal(faces[f].azimuth, faces[f].elevation),
        d,
        se.warm_starts().face_for(d) as usize,
        &mut stats,
        obs,
    );
    let found = climb_packed(
        &se.vertex_hull,
        d,
        faces[f].anchor as usize,
        &mut stats,
        obs,
    );
    packed_result(&se.vertex_hull, found, stats)
}

/// Anything that can answer support queries in its local frame.
pub trait SupportMap {
    fn support(&self, d: &Direction) -> SupportQueryResult;

    /// Like `support`, reporting every accepted climb step.
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult;

    /// A point inside the shape, used to seed GJK.
    fn center(&self) -> Vec3;

    fn vertex_count(&self) -> usize;
}

/// The brute-force method as a backend.
#[derive(Debug, Clone)]
pub struct NaiveHull {
    pub vertices: Vec<Vec3>,
    center: Vec3,
}

impl NaiveHull {
    pub fn new(hull: &HullTopology) -> Self {
        NaiveHull {
            vertices: hull.vertices.clone(),
            center: hull.centroid(),
        }
    }
}

impl SupportMap for NaiveHull {
    #[inline]
    fn support(&self, d: &Direction) -> SupportQueryResult {
        naive(&self.vertices, d.vec())
    }
    fn support_traced(&self, d: &Direction, _: &mut Vec<Step>) -> SupportQueryResult {
        self.support(d)
    }
    fn center(&self) -> Vec3 {
        self.center
    }
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// Baseline hill climbing as done by mainstream physics engines: unpacked
/// per-vertex index lists plus the six-entry warm-start table.
#[derive(Debug, Clone)]
pub struct HillClimbHull {
    pub hull: HullTopology,
    pub warm_starts: WarmStartTable,
    center: Vec3,
}

impl HillClimbHull {
    pub fn new(hull: &HullTopology) -> Self {
        HillClimbHull {
            hull: hull.clone(),
            warm_starts: compute_warm_starts(hull),
            center: hull.centroid(),
        }
    }
}

impl SupportMap for HillClimbHull {
    #[inline]
    fn support(&self, d: &Direction) -> SupportQueryResult {
        let start = self.warm_starts.vertex_for(d.vec()) as usize;
        climb_lists(&self.hull, d.vec(), start, &mut ())
    }
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult {
        let start = self.warm_starts.vertex_for(d.vec()) as usize;
        climb_lists(&self.hull, d.vec(), start, trace)
    }
    fn center(&self) -> Vec3 {
        self.center
    }
    fn vertex_count(&self) -> usize {
        self.hull.vertex_count()
    }
}

fn pool_center(ic: &InternallyConnectedHull) -> Vec3 {
    let sum = ic.vertices.iter().fold(Vec3::ZERO, |a, r| a + r.point());
    sum / ic.len().max(1) as f64
}

impl SupportMap for InternallyConnectedHull {
    #[inline]
    fn support(&self, d: &Direction) -> SupportQueryResult {
        support_internally_connected(self, d)
    }
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult {
        ic_traced(self, d.vec(), trace)
    }
    fn center(&self) -> Vec3 {
        self.center
    }
    fn vertex_count(&self) -> usize {
        self.len()
    }
}

impl SupportMap for FaceTraversingHull {
    #[inline]
    fn support(&self, d: &Direction) -> SupportQueryResult {
        support_face_traversing(self, d)
    }
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult {
        ft_traced(self, d.vec(), trace)
    }
    fn center(&self) -> Vec3 {
        self.vertex_hull.center
    }
    fn vertex_count(&self) -> usize {
        self.vertex_hull.len()
    }
}

impl SupportMap for SphericalHull {
    #[inline]
    fn support(&self, d: &Direction) -> SupportQueryResult {
        support_spherical(self, d)
    }
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult {
        se_traced(self, d.vec(), trace)
    }
    fn center(&self) -> Vec3 {
        self.vertex_hull.center
    }
    fn vertex_count(&self) -> usize {
        self.vertex_hull.len()
    }
}

impl InternallyConnectedHull {
    pub(crate) fn compute_center(&mut self) {
        self.center = pool_center(self);
    }
}

/// The five support methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Naive,
    HillClimb,
    InternallyConnected,
    FaceTraversing,
    Spherical,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Naive,
        Method::HillClimb,
        Method::InternallyConnected,
        Method::FaceTraversing,
        Method::Spherical,
    ];

    /// Stable key used in CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::HillClimb => "hill-climb",
            Method::InternallyConnected => "internally-connected",
            Method::FaceTraversing => "face-traversing",
            Method::Spherical => "spherical",
        }
    }

    pub fn from_key(key: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.key() == key)
    }

    pub fn is_climbing(self) -> bool {
        self != Method::Naive
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

/// All five backends built from one hull, sharing one artificial-edge
/// computation.
#[derive(Debug, Clone)]
pub struct BackendSet {
    pub naive: NaiveHull,
    pub hill_climb: HillClimbHull,
    pub internally_connected: InternallyConnectedHull,
    pub face_traversing: FaceTraversingHull,
    pub spherical: SphericalHull,
}

impl BackendSet {
    pub fn build(hull: &HullTopology) -> Result<Self> {
        Self::build_with_fraction(hull, DEFAULT_FILL_RADIUS_FRACTION)
    }

    pub fn build_with_fraction(hull: &HullTopology, fill_radius_fraction: f64) -> Result<Self> {
        let ic = build_internally_connected(hull, fill_radius_fraction)?;
        Ok(BackendSet {
            naive: NaiveHull::new(hull),
            hill_climb: HillClimbHull::new(hull),
            face_traversing: face_traversing_with(hull, ic.clone())?,
            spherical: spherical_with(hull, ic.clone())?,
            internally_connected: ic,
        })
    }

    pub fn get(&self, m: Method) -> &dyn SupportMap {
        match m {
            Method::Naive => &self.naive,
            Method::HillClimb => &self.hill_climb,
            Method::InternallyConnected => &self.internally_connected,
            Method::FaceTraversing => &self.face_traversing,
            Method::Spherical => &self.spherical,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{build_hull, sample_sphere, PointSet};
    use crate::layouts::{build_face_traversing, build_spherical};

    fn d(x: f64, y: f64, z: f64) -> Direction {
        Direction::new(Vec3::new(x, y, z)).unwrap()
    }

    fn cube() -> HullTopology {
        let pts = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        build_hull(&PointSet::new(pts, "cube").unwrap()).unwrap()
    }

    fn octahedron() -> HullTopology {
        let pts = vec![Vec3::X, -Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z, -Vec3::Z];
        build_hull(&PointSet::new(pts, "octa").unwrap()).unwrap()
    }

    #[test]
    fn zero_direction_rejected() {
        assert!(Direction::new(Vec3::ZERO).is_err());
        assert!(Direction::new(Vec3::new(f64::NAN, 1.0, 0.0)).is_err());
        assert!(Direction::new(Vec3::new(1e-320, 0.0, 0.0)).is_err());
        assert!(Direction::new(Vec3::new(1e-200, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn naive_examples() {
        let r = support_naive(&cube(), &d(1.0, 0.0, 0.0));
        assert_eq!(r.support_value, 1.0);
        assert_eq!(r.point.x, 1.0);
        assert_eq!(r.stats.dot_products_evaluated, 8);

        let r = support_naive(&octahedron(), &d(1.0, 2.0, 3.0));
        assert_eq!(r.point, Vec3::Z);
        assert_eq!(r.support_value, 3.0);
    }

    #[test]
    fn hill_climb_cube_diagonal() {
        let h = cube();
        let origin = h.vertices.iter().position(|&v| v == Vec3::ZERO).unwrap();
        let r = support_hill_climb(&h, &d(1.0, 1.0, 1.0), origin).unwrap();
        assert_eq!(r.point, Vec3::new(1.0, 1.0, 1.0));
        assert!(r.stats.vertex_visits <= 4);
        assert!(support_hill_climb(&h, &d(1.0, 1.0, 1.0), 8).is_err());
    }

    #[test]
    fn hill_climb_from_optimum_visits_once() {
        let h = build_hull(&sample_sphere(300, 3).unwrap()).unwrap();
        let dir = d(0.3, -0.2, 0.9);
        let best = support_naive(&h, &dir);
        let r = support_hill_climb(&h, &dir, best.vertex_index).unwrap();
        assert_eq!(r.stats.vertex_visits, 1);
        assert_eq!(r.vertex_index, best.vertex_index);
    }

    #[test]
    fn internally_connected_octahedron_warm_start() {
        let h = octahedron();
        let ic = build_internally_connected(&h, 0.2).unwrap();
        let r = support_internally_connected(&ic, &d(0.0, 0.0, -1.0));
        assert_eq!(r.point, -Vec3::Z);
        assert_eq!(r.stats.vertex_visits, 1);
    }

    #[test]
    fn face_traversing_cube_top() {
        let h = cube();
        let ft = build_face_traversing(&h).unwrap();
        let mut trace = Vec::new();
        let r = ft.support_traced(&d(0.0, 0.0, 1.0), &mut trace);
        assert_eq!(r.support_value, 1.0);
        let last_face = trace
            .iter()
            .rev()
            .find_map(|s| match *s {
                Step::Face { index, .. } => Some(index),
                _ => None,
            })
            .unwrap();
        assert_eq!(h.face_normals[last_face], Vec3::Z);
    }

    #[test]
    fn face_traversing_tetrahedron_aligned_normal() {
        let pts = vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z];
        let h = build_hull(&PointSet::new(pts, "tet").unwrap()).unwrap();
        let ft = build_face_traversing(&h).unwrap();
        for f in 0..4 {
            let mut trace = Vec::new();
            ft.support_traced(&Direction::new(h.face_normals[f]).unwrap(), &mut trace);
            let last_face = trace
                .iter()
                .rev()
                .find_map(|s| match *s {
                    Step::Face { index, .. } => Some(index),
                    _ => None,
                })
                .unwrap();
            assert_eq!(last_face, f);
        }
    }

    #[test]
    fn spherical_cube() {
        let h = cube();
        let se = build_spherical(&h).unwrap();
        for dir in [d(1.0, 0.0, 0.0), d(-1.0, 0.0, 0.0), d(0.0, 0.0, 1.0)] {
            let exact = support_naive(&h, &dir);
            assert_eq!(
                support_spherical(&se, &dir).support_value,
                exact.support_value
            );
        }
    }

    #[test]
    fn spherical_matches_internally_connected_on_z() {
        let h = build_hull(&sample_sphere(700, 21).unwrap()).unwrap();
        let set = BackendSet::build(&h).unwrap();
        let z = d(0.0, 0.0, 1.0);
        assert_eq!(
            set.spherical.support(&z).support_value,
            set.internally_connected.support(&z).support_value
        );
    }

    #[test]
    fn method_keys_roundtrip() {
        for m in Method::ALL {
            assert_eq!(Method::from_key(m.key()), Some(m));
        }
        assert_eq!(Method::from_key("parry"), None);
    }
}
