use std::collections::HashSet;
use std::fmt;

use super::{HullTopology, MAX_ELEMENTS};

/// Outcome of a single invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, failure: Option<String>) {
        self.checks.push(Check {
            name,
            passed: failure.is_none(),
            detail: failure.unwrap_or_else(|| "ok".into()),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Checks every hull invariant and reports each one separately. Never
/// panics on malformed input: out-of-range indices are reported as failures.
pub fn validate_topology(hull: &HullTopology) -> ValidationReport {
    let mut r = ValidationReport::default();
    let v = hull.vertices.len();
    let f = hull.faces.len();
    let radius = hull.bounding_sphere.radius;

    r.push(
        "vertex-capacity",
        (v > MAX_ELEMENTS).then(|| format!("{v} vertices exceeds {MAX_ELEMENTS}")),
    );

    let indices_ok = hull.faces.iter().flatten().all(|&i| (i as usize) < v)
        && hull.adjacency.len() == v
        && hull.adjacency.iter().flatten().all(|&i| (i as usize) < v)
        && hull.face_normals.len() == f
        && hull.face_adjacency.len() == f
        && hull
            .face_adjacency
            .iter()
            .flatten()
            .all(|&g| (g as usize) < f);
    r.push(
        "index-ranges",
        (!indices_ok).then(|| "an index or array length is out of range".to_string()),
    );
    if !indices_ok {
        return r;
    }

    let mut face_edges: HashSet<(u32, u32)> = HashSet::new();
    for t in &hull.faces {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            face_edges.insert((a.min(b), a.max(b)));
        }
    }
    let e = face_edges.len() as i64;
    let euler = v as i64 - e + f as i64;
    r.push(
        "euler",
        (euler != 2).then(|| format!("V - E + F = {v} - {e} + {f} = {euler}")),
    );
    r.push(
        "edge-count",
        (2 * e != 3 * f as i64).then(|| format!("E = {e} but 3F/2 = {}", 3.0 * f as f64 / 2.0)),
    );

    let bad_unit = hull
        .face_normals
        .iter()
        .position(|n| !((n.norm() - 1.0).abs() <= 1e-9));
    r.push(
        "normal-unit",
        bad_unit.map(|i| format!("face {i} normal has length {}", hull.face_normals[i].norm())),
    );

    let tol = 1e-7 * radius;
    let mut outward = None;
    'faces: for fi in 0..f {
        let n = hull.face_normals[fi];
        let c = hull.face_centroid(fi);
        for (wi, &w) in hull.vertices.iter().enumerate() {
            let h = (w - c).dot(n);
            if !(h <= tol) {
                outward = Some(format!("vertex {wi} is {h:e} above face {fi}"));
                break 'faces;
            }
        }
    }
    r.push("normal-outward", outward);

    let mut symmetric = None;
    'verts: for (i, list) in hull.adjacency.iter().enumerate() {
        for &j in list {
            if j as usize == i {
                symmetric = Some(format!("vertex {i} lists itself"));
                break 'verts;
            }
            if !hull.adjacency[j as usize].contains(&(i as u32)) {
                symmetric = Some(format!(
                    "{j} in adjacency[{i}] but {i} not in adjacency[{j}]"
                ));
                break 'verts;
            }
        }
    }
    r.push("adjacency-symmetric", symmetric);

    let mut adj_edges: HashSet<(u32, u32)> = HashSet::new();
    for (i, list) in hull.adjacency.iter().enumerate() {
        for &j in list {
            let i = i as u32;
            adj_edges.insert((i.min(j), i.max(j)));
        }
    }
    r.push(
        "adjacency-matches-faces",
        (adj_edges != face_edges).then(|| {
            format!(
                "{} adjacency edges vs {} face edges",
                adj_edges.len(),
                face_edges.len()
            )
        }),
    );

    let mut face_adj = None;
    for (fi, nbs) in hull.face_adjacency.iter().enumerate() {
        let mine = hull.faces[fi];
        let distinct: HashSet<u32> = nbs.iter().copied().collect();
        if distinct.len() != 3 || distinct.contains(&(fi as u32)) {
            face_adj = Some(format!("face {fi} does not have 3 distinct neighbors"));
            break;
        }
        let shares_edge = nbs.iter().all(|&g| {
            let other = hull.faces[g as usize];
            mine.iter().filter(|v| other.contains(v)).count() == 2
        });
        if !shares_edge {
            face_adj = Some(format!("face {fi} has a neighbor not sharing an edge"));
            break;
        }
    }
    r.push("face-adjacency", face_adj);

    let s = hull.bounding_sphere;
    let outside = hull
        .vertices
        .iter()
        .position(|&p| !((p - s.center).norm() <= s.radius * (1.0 + 1e-9)));
    r.push(
        "bounding-sphere",
        outside.map(|i| format!("vertex {i} lies outside the bounding sphere")),
    );

    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::hull::{build_hull, PointSet};

    fn cube_hull() -> HullTopology {
        let pts = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        build_hull(&PointSet::new(pts, "cube").unwrap()).unwrap()
    }

    #[test]
    fn valid_cube_passes_everything() {
        let r = validate_topology(&cube_hull());
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn removed_adjacency_entry_breaks_symmetry() {
        let mut h = cube_hull();
        h.adjacency[0].remove(0);
        let r = validate_topology(&h);
        assert!(!r.get("adjacency-symmetric").unwrap().passed);
    }

    #[test]
    fn negated_normal_breaks_orientation() {
        let mut h = cube_hull();
        h.face_normals[3] = -h.face_normals[3];
        let r = validate_topology(&h);
        assert!(!r.get("normal-outward").unwrap().passed);
        assert!(r.get("normal-unit").unwrap().passed);
    }

    #[test]
    fn shrunken_sphere_is_reported() {
        let mut h = cube_hull();
        h.bounding_sphere.radius *= 0.5;
        assert!(!validate_topology(&h).get("bounding-sphere").unwrap().passed);
    }

    #[test]
    fn out_of_range_index_does_not_panic() {
        let mut h = cube_hull();
        h.faces[0][0] = 999;
        let r = validate_topology(&h);
        assert!(!r.all_passed());
    }
}
