//! Incremental quickhull producing a triangulated hull.

use std::collections::HashMap;

use super::{ritter_sphere, HullTopology, PointSet, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::geom::Vec3;

const NONE: usize = usize::MAX;

/// Relative plane tolerance, scaled by the bounding-box diagonal.
const PLANE_EPS: f64 = 1e-10;

struct Face {
    v: [u32; 3],
    normal: Vec3,
    offset: f64,
    /// `neighbors[i]` shares the edge `(v[i], v[(i + 1) % 3])`.
    neighbors: [usize; 3],
    outside: Vec<u32>,
    alive: bool,
}

impl Face {
    fn new(pts: &[Vec3], v: [u32; 3]) -> Option<Face> {
        let [a, b, c] = v.map(|i| pts[i as usize]);
        let normal = (b - a).cross(c - a).try_normalize()?;
        let offset = normal.dot((a + b + c) / 3.0);
        Some(Face {
            v,
            normal,
            offset,
            neighbors: [NONE; 3],
            outside: Vec::new(),
            alive: true,
        })
    }

    #[inline]
    fn distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn edge_from(&self, a: u32) -> usize {
        self.v.iter().position(|&x| x == a).expect("vertex on face")
    }
}

struct Builder<'a> {
    pts: &'a [Vec3],
    eps: f64,
    faces: Vec<Face>,
}

struct HorizonEdge {
    a: u32,
    b: u32,
    across: usize,
    across_edge: usize,
}

/// Builds the convex hull of `points` with quickhull.
///
/// Points within `1e-10 x bbox diagonal` of a face plane count as on the
/// hull surface and are not added. The output keeps only extreme points,
/// ordered by their index in the input.
pub fn build_hull(points: &PointSet) -> Result<HullTopology> {
    let input = &points.points;
    if input.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "hull construction needs at least 4 points, got {}",
            input.len()
        )));
    }
    if let Some(i) = input.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "point {i} has a non-finite coordinate"
        )));
    }

    // Work in coordinates centered on the bounding box so the tolerance only
    // has to absorb the shape's extent, not its offset from the origin.
    let (lo, hi) = input
        .iter()
        .fold((input[0], input[0]), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    let center = (lo + hi) * 0.5;
    let diag = (hi - lo).norm();
    if !(diag > 0.0) || !diag.is_finite() {
        return Err(Error::DegenerateGeometry(
            "all input points coincide".into(),
        ));
    }
    let eps = PLANE_EPS * diag;
    let mut hull = build_once(input, center, eps)?;

    // Points that landed on a flat facet or edge within tolerance are
    // triangulation vertices but not corners. Drop them and rebuild.
    for _ in 0..4 {
        let keep = corner_mask(&hull);
        if keep.iter().all(|&k| k) {
            break;
        }
        let corners: Vec<Vec3> = hull
            .vertices
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(&p, _)| p)
            .collect();
        match build_once(&corners, center, eps) {
            Ok(h) => hull = h,
            Err(_) => break,
        }
    }
    Ok(hull)
}

fn build_once(input: &[Vec3], center: Vec3, eps: f64) -> Result<HullTopology> {
    let local: Vec<Vec3> = input.iter().map(|&p| p - center).collect();
    let mut b = Builder {
        pts: &local,
        eps,
        faces: Vec::new(),
    };
    b.initial_simplex()?;
    b.run()?;
    b.finish(input)
}

/// True for vertices touching at least three distinct facet planes.
/// Coplanar triangles share a bit-identical normal after merging.
fn corner_mask(hull: &HullTopology) -> Vec<bool> {
    let mut planes: Vec<Vec<[u64; 3]>> = vec![Vec::new(); hull.vertex_count()];
    for (f, tri) in hull.faces.iter().enumerate() {
        let key = hull.face_normals[f].to_array().map(f64::to_bits);
        for &v in tri {
            let list = &mut planes[v as usize];
            if !list.contains(&key) {
                list.push(key);
            }
        }
    }
    planes.iter().map(|p| p.len() >= 3).collect()
}

impl Builder<'_> {
    fn initial_simplex(&mut self) -> Result<()> {
        let pts = self.pts;
        let eps = self.eps;

        // Most separated pair among the per-axis extremes.
        let mut ext = [[0usize; 2]; 3];
        for (i, p) in pts.iter().enumerate() {
            for ax in 0..3 {
                if p[ax] < pts[ext[ax][0]][ax] {
                    ext[ax][0] = i;
                }
                if p[ax] > pts[ext[ax][1]][ax] {
                    ext[ax][1] = i;
                }
            }
        }
        let (mut i0, mut i1, mut best) = (0, 0, -1.0);
        for [a, b] in ext {
            let d = (pts[a] - pts[b]).norm_squared();
            if d > best {
                (i0, i1, best) = (a, b, d);
            }
        }
        if best.sqrt() <= eps {
            return Err(Error::DegenerateGeometry(
                "all input points coincide".into(),
            ));
        }

        let dir = (pts[i1] - pts[i0]) / best.sqrt();
        let (i2, d2) = argmax(pts, |p| {
            let r = p - pts[i0];
            (r - dir * r.dot(dir)).norm()
        });
        if d2 <= eps {
            return Err(Error::DegenerateGeometry(
                "input points are collinear".into(),
            ));
        }

        let n = (pts[i1] - pts[i0])
            .cross(pts[i2] - pts[i0])
            .try_normalize()
            .ok_or_else(|| Error::DegenerateGeometry("input points are collinear".into()))?;
        let (i3, d3) = argmax(pts, |p| n.dot(p - pts[i0]).abs());
        if d3 <= eps {
            return Err(Error::DegenerateGeometry(
                "input points are coplanar".into(),
            ));
        }

        let simplex = [i0, i1, i2, i3].map(|i| i as u32);
        let inner = simplex
            .iter()
            .fold(Vec3::ZERO, |acc, &i| acc + pts[i as usize])
            / 4.0;
        let tris = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        for t in tris {
            let mut v = t.map(|k| simplex[k]);
            let mut f = Face::new(pts, v)
                .ok_or_else(|| Error::DegenerateGeometry("degenerate initial simplex".into()))?;
            if f.distance(inner) > 0.0 {
                v.swap(1, 2);
                f = Face::new(pts, v).expect("flipped face stays valid");
            }
            self.faces.push(f);
        }
        self.link_by_edges(&[0, 1, 2, 3]);

        for (i, &p) in pts.iter().enumerate() {
            if simplex.contains(&(i as u32)) {
                continue;
            }
            self.assign(i as u32, p, &[0, 1, 2, 3]);
        }
        Ok(())
    }

    /// Pairs up every directed edge of `ids` with its reverse.
    fn link_by_edges(&mut self, ids: &[usize]) {
        let mut edges: HashMap<(u32, u32), (usize, usize)> = HashMap::new();
        for &f in ids {
            for i in 0..3 {
                let (a, b) = (self.faces[f].v[i], self.faces[f].v[(i + 1) % 3]);
                edges.insert((a, b), (f, i));
            }
        }
        for &f in ids {
            for i in 0..3 {
                let (a, b) = (self.faces[f].v[i], self.faces[f].v[(i + 1) % 3]);
                if let Some(&(g, _)) = edges.get(&(b, a)) {
                    self.faces[f].neighbors[i] = g;
                }
            }
        }
    }

    /// Puts `p` on the outside list of the candidate face it is farthest
    /// above, if any.
    fn assign(&mut self, idx: u32, p: Vec3, candidates: &[usize]) {
        let mut best = NONE;
        let mut best_d = self.eps;
        for &f in candidates {
            let d = self.faces[f].distance(p);
            if d > best_d {
                best = f;
                best_d = d;
            }
        }
        if best != NONE {
            self.faces[best].outside.push(idx);
        }
    }

    /// Farthest outside point of `f`. Points tied within tolerance lie on one
    /// supporting plane; the one farthest from the face centroid is a corner
    /// of that plane's point set, so coplanar points never become vertices.
    fn pick_eye(&self, f: usize) -> u32 {
        let face = &self.faces[f];
        let (_, top) = argmax_idx(&face.outside, |i| face.distance(self.pts[i as usize]));
        let centroid = face
            .v
            .iter()
            .fold(Vec3::ZERO, |a, &i| a + self.pts[i as usize])
            / 3.0;
        let mut best = face.outside[0];
        let mut best_r = f64::NEG_INFINITY;
        for &i in &face.outside {
            let p = self.pts[i as usize];
            if face.distance(p) >= top - self.eps {
                let r = (p - centroid).norm_squared();
                if r > best_r {
                    best = i;
                    best_r = r;
                }
            }
        }
        best
    }

    fn run(&mut self) -> Result<()> {
        let mut stack: Vec<usize> = (0..self.faces.len())
            .filter(|&f| !self.faces[f].outside.is_empty())
            .collect();
        let mut visible_mark: Vec<u32> = Vec::new();
        let mut stamp: u32 = 0;
        let mut visible: Vec<usize> = Vec::new();
        let mut horizon: Vec<HorizonEdge> = Vec::new();
        let mut dfs: Vec<usize> = Vec::new();

        while let Some(root) = stack.pop() {
            if !self.faces[root].alive || self.faces[root].outside.is_empty() {
                continue;
            }
            stamp += 1;
            visible_mark.resize(self.faces.len(), 0);

            let eye = self.pick_eye(root);
            let eye_p = self.pts[eye as usize];

            // Flood the connected region of faces that see the eye point.
            visible.clear();
            horizon.clear();
            dfs.clear();
            visible_mark[root] = stamp;
            visible.push(root);
            dfs.push(root);
            while let Some(f) = dfs.pop() {
                for i in 0..3 {
                    let nb = self.faces[f].neighbors[i];
                    if visible_mark[nb] == stamp {
                        continue;
                    }
                    if self.faces[nb].distance(eye_p) > self.eps {
                        visible_mark[nb] = stamp;
                        visible.push(nb);
                        dfs.push(nb);
                    } else {
                        let fv = self.faces[f].v;
                        let (a, b) = (fv[i], fv[(i + 1) % 3]);
                        horizon.push(HorizonEdge {
                            a,
                            b,
                            across: nb,
                            across_edge: self.faces[nb].edge_from(b),
                        });
                    }
                }
            }

            // Cone from the horizon to the eye point.
            let first_new = self.faces.len();
            let mut by_start: HashMap<u32, usize> = HashMap::with_capacity(horizon.len());
            let mut by_end: HashMap<u32, usize> = HashMap::with_capacity(horizon.len());
            for (k, e) in horizon.iter().enumerate() {
                let id = first_new + k;
                let mut f = Face::new(self.pts, [e.a, e.b, eye]).ok_or_else(|| {
                    Error::DegenerateGeometry(format!(
                        "point {eye} is collinear with a horizon edge"
                    ))
                })?;
                f.neighbors[0] = e.across;
                self.faces.push(f);
                self.faces[e.across].neighbors[e.across_edge] = id;
                if by_start.insert(e.a, id).is_some() || by_end.insert(e.b, id).is_some() {
                    return Err(non_simple_horizon(eye));
                }
            }
            for k in 0..horizon.len() {
                let id = first_new + k;
                let (a, b) = (self.faces[id].v[0], self.faces[id].v[1]);
                let next = *by_start.get(&b).ok_or_else(|| non_simple_horizon(eye))?;
                let prev = *by_end.get(&a).ok_or_else(|| non_simple_horizon(eye))?;
                self.faces[id].neighbors[1] = next;
                self.faces[id].neighbors[2] = prev;
            }
            // The horizon must be one closed loop.
            let mut steps = 0;
            let mut cur = first_new;
            loop {
                cur = self.faces[cur].neighbors[1];
                steps += 1;
                if cur == first_new || steps > horizon.len() {
                    break;
                }
            }
            if steps != horizon.len() {
                return Err(non_simple_horizon(eye));
            }

            let new_ids: Vec<usize> = (first_new..self.faces.len()).collect();
            for &f in &visible {
                let orphans = std::mem::take(&mut self.faces[f].outside);
                self.faces[f].alive = false;
                for idx in orphans {
                    if idx != eye {
                        self.assign(idx, self.pts[idx as usize], &new_ids);
                    }
                }
            }
            stack.extend(
                new_ids
                    .iter()
                    .copied()
                    .filter(|&f| !self.faces[f].outside.is_empty()),
            );
        }
        Ok(())
    }

    fn finish(self, input: &[Vec3]) -> Result<HullTopology> {
        let alive: Vec<usize> = (0..self.faces.len())
            .filter(|&f| self.faces[f].alive)
            .collect();
        let mut face_id = vec![NONE; self.faces.len()];
        for (k, &f) in alive.iter().enumerate() {
            face_id[f] = k;
        }

        let mut used = vec![false; input.len()];
        for &f in &alive {
            for v in self.faces[f].v {
                used[v as usize] = true;
            }
        }
        let mut vertex_id = vec![u32::MAX; input.len()];
        let mut vertices = Vec::new();
        for (i, _) in used.iter().enumerate().filter(|(_, &u)| u) {
            vertex_id[i] = vertices.len() as u32;
            vertices.push(input[i]);
        }
        if vertices.len() > MAX_ELEMENTS {
            return Err(Error::CapacityExceeded(format!(
                "hull has {} vertices, limit is {MAX_ELEMENTS}",
                vertices.len()
            )));
        }

        let faces: Vec<[u32; 3]> = alive
            .iter()
            .map(|&f| self.faces[f].v.map(|v| vertex_id[v as usize]))
            .collect();
        let mut face_adjacency = Vec::with_capacity(alive.len());
        for &f in &alive {
            let mut adj = [0u32; 3];
            for (slot, &nb) in adj.iter_mut().zip(&self.faces[f].neighbors) {
                if nb == NONE || face_id[nb] == NONE {
                    return Err(Error::DegenerateGeometry(
                        "hull surface is not closed".into(),
                    ));
                }
                *slot = face_id[nb] as u32;
            }
            face_adjacency.push(adj);
        }
        let face_normals = self.shared_normals(&alive);

        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
        for f in &faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }

        let bounding_sphere = ritter_sphere(&vertices);
        let hull = HullTopology {
            vertices,
            adjacency,
            faces,
            face_normals,
            face_adjacency,
            bounding_sphere,
        };
        check_closed_manifold(&hull)?;
        Ok(hull)
    }

    /// Per-face normals where coplanar neighboring triangles are merged into
    /// one facet sharing an area-weighted normal.
    fn shared_normals(&self, alive: &[usize]) -> Vec<Vec3> {
        let tol = 4.0 * self.eps;
        let mut local = vec![NONE; self.faces.len()];
        for (k, &f) in alive.iter().enumerate() {
            local[f] = k;
        }
        let mut parent: Vec<usize> = (0..alive.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }

        for (k, &f) in alive.iter().enumerate() {
            let face = &self.faces[f];
            for &g in &face.neighbors {
                let other = &self.faces[g];
                if local[g] <= k || face.normal.dot(other.normal) <= 0.0 {
                    continue;
                }
                let coplanar = other
                    .v
                    .iter()
                    .all(|&v| face.distance(self.pts[v as usize]).abs() <= tol);
                if coplanar {
                    let (ra, rb) = (root(&mut parent, k), root(&mut parent, local[g]));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }

        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for k in 0..alive.len() {
            let r = root(&mut parent, k);
            groups.entry(r).or_default().push(k);
        }

        let mut normals: Vec<Vec3> = alive.iter().map(|&f| self.faces[f].normal).collect();
        for members in groups.values().filter(|m| m.len() > 1) {
            let mut weighted = Vec3::ZERO;
            let mut centroid = Vec3::ZERO;
            let mut count = 0.0;
            for &k in members {
                let face = &self.faces[alive[k]];
                let [a, b, c] = face.v.map(|i| self.pts[i as usize]);
                weighted += (b - a).cross(c - a);
                centroid += a + b + c;
                count += 3.0;
            }
            let Some(n) = weighted.try_normalize() else {
                continue;
            };
            let centroid = centroid / count;
            let flat = members.iter().all(|&k| {
                self.faces[alive[k]]
                    .v
                    .iter()
                    .all(|&v| n.dot(self.pts[v as usize] - centroid).abs() <= 2.0 * tol)
            });
            if flat {
                for &k in members {
                    normals[k] = n;
                }
            }
        }
        normals
    }
}

fn non_simple_horizon(eye: u32) -> Error {
    Error::DegenerateGeometry(format!(
        "visible region from point {eye} is not a disk (numerically inconsistent input)"
    ))
}

fn argmax(pts: &[Vec3], f: impl Fn(Vec3) -> f64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &p) in pts.iter().enumerate() {
        let d = f(p);
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

fn argmax_idx(ids: &[u32], f: impl Fn(u32) -> f64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, &i) in ids.iter().enumerate() {
        let d = f(i);
        if d > best.1 {
            best = (k, d);
        }
    }
    best
}

/// Cheap structural checks run on every build: every directed edge has its
/// reverse on the recorded neighbor, and Euler's formula holds.
fn check_closed_manifold(hull: &HullTopology) -> Result<()> {
    for (f, tri) in hull.faces.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let g = hull.face_adjacency[f][i] as usize;
            let other = hull.faces[g];
            let has_reverse = (0..3).any(|j| other[j] == b && other[(j + 1) % 3] == a);
            if !has_reverse {
                return Err(Error::DegenerateGeometry(format!(
                    "face {f} edge {i} is not shared with its neighbor"
                )));
            }
        }
    }
    let (v, e, f) = (
        hull.vertex_count() as i64,
        hull.edge_count() as i64,
        hull.face_count() as i64,
    );
    if v - e + f != 2 || 2 * e != 3 * f {
        return Err(Error::DegenerateGeometry(format!(
            "hull is not a closed triangulated sphere (V={v}, E={e}, F={f})"
        )));
    }
    if hull.face_normals.iter().any(|n| !n.is_finite()) {
        return Err(Error::DegenerateGeometry("non-finite face normal".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{sample_sphere, validate_topology};

    fn cube() -> PointSet {
        let pts = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        PointSet::new(pts, "cube").unwrap()
    }

    #[test]
    fn cube_hull_counts() {
        let h = build_hull(&cube()).unwrap();
        assert_eq!(h.vertex_count(), 8);
        assert_eq!(h.face_count(), 12);
        assert_eq!(h.edge_count(), 18);
        let report = validate_topology(&h);
        assert!(report.all_passed(), "{report}");
        // Two triangles per cube side share the exact axis normal.
        for n in &h.face_normals {
            let a = n.abs();
            assert!((a.x.max(a.y).max(a.z) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_point_is_dropped() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.1, 0.1, 0.1),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let h = build_hull(&PointSet::new(pts, "tet+1").unwrap()).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert!(!h.vertices.contains(&Vec3::new(0.1, 0.1, 0.1)));
        assert_eq!(h.face_count(), 4);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let same = vec![Vec3::new(1.0, 1.0, 1.0); 5];
        let line: Vec<Vec3> = (0..6)
            .map(|i| Vec3::new(i as f64, 2.0 * i as f64, 0.0))
            .collect();
        let plane: Vec<Vec3> = (0..9)
            .map(|i| Vec3::new((i % 3) as f64, (i / 3) as f64, 5.0))
            .collect();
        for pts in [same, line, plane] {
            let r = build_hull(&PointSet::new(pts, "deg").unwrap());
            assert!(matches!(r, Err(Error::DegenerateGeometry(_))), "{r:?}");
        }
    }

    #[test]
    fn sphere_points_are_all_extreme() {
        let ps = sample_sphere(512, 1).unwrap();
        let h = build_hull(&ps).unwrap();
        assert_eq!(h.vertex_count(), 512);
        assert_eq!(h.vertices, ps.points);
        let mut face_count = vec![0usize; 512];
        for f in &h.faces {
            for &v in f {
                face_count[v as usize] += 1;
            }
        }
        assert!(face_count.iter().all(|&c| c >= 3));
        assert!(validate_topology(&h).all_passed());
    }

    #[test]
    fn lattice_with_coplanar_points() {
        // 5x5x5 grid: only the 8 corners are extreme, every side is a
        // coplanar sheet of 25 points.
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    pts.push(Vec3::new(i as f64, j as f64, k as f64));
                }
            }
        }
        let h = build_hull(&PointSet::new(pts, "grid").unwrap()).unwrap();
        let report = validate_topology(&h);
        assert!(report.all_passed(), "{report}");
        assert_eq!(h.vertex_count(), 8);
    }

    #[test]
    fn offset_coordinates_are_handled() {
        let mut ps = sample_sphere(256, 4).unwrap();
        for p in &mut ps.points {
            *p = *p * 1e-3 + Vec3::new(1e4, -2e4, 5e3);
        }
        let h = build_hull(&ps).unwrap();
        assert_eq!(h.vertex_count(), 256);
    }

    #[test]
    fn deterministic_rebuild() {
        let ps = sample_sphere(300, 11).unwrap();
        assert_eq!(build_hull(&ps).unwrap(), build_hull(&ps).unwrap());
    }
}
