//! Cache-line sized hull layouts.
//!
//! * [`InternallyConnectedHull`]: one 64-byte record per vertex holding its
//!   coordinates and 19 neighbor slots. Vertices with more neighbors chain
//!   32-byte extension records; unused slots are filled with artificial
//!   edges to vertices near a sphere around the vertex.
//! * [`FaceTraversingHull`]: 32-byte face records (normal, 3 neighbor
//!   faces, anchor vertex), two per cache line, plus the vertex pool above.
//! * [`SphericalHull`]: 16-byte face records with the normal stored as two
//!   Q1.31 angles, four per cache line.

mod pool;
mod serialize;

use std::mem::{align_of, size_of};

use crate::error::{Error, Result};
use crate::fxtrig::{encode_normal, Q31Angle};
use crate::geom::Vec3;
use crate::hull::{HullTopology, ValidationReport, MAX_ELEMENTS};

pub use pool::{CachePool, PoolRecord, CACHE_LINE};
pub use serialize::{decode_sections, RecordKind, Section, WireRecord, MAGIC};

/// Marks an empty neighbor slot or a missing extension.
pub const SENTINEL: u16 = 0xFFFF;
pub const BASE_SLOTS: usize = 19;
pub const EXTENSION_SLOTS: usize = 15;
/// Artificial-edge sphere radius as a fraction of the bounding radius.
pub const DEFAULT_FILL_RADIUS_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(C, align(64))]
pub struct PackedVertexRecord {
    pub position: [f64; 3],
    /// True neighbors first, then artificial ones, then [`SENTINEL`]s.
    pub neighbors: [u16; BASE_SLOTS],
    pub extension: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(C, align(32))]
pub struct ExtensionRecord {
    pub neighbors: [u16; EXTENSION_SLOTS],
    pub next: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(C, align(32))]
pub struct PackedFaceRecord {
    pub normal: [f64; 3],
    pub neighbors: [u16; 3],
    pub anchor: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(C, align(16))]
pub struct SphericalFaceRecord {
    pub azimuth: Q31Angle,
    pub elevation: Q31Angle,
    pub neighbors: [u16; 3],
    pub anchor: u16,
}

const _: () = {
    assert!(size_of::<PackedVertexRecord>() == 64 && align_of::<PackedVertexRecord>() == 64);
    assert!(size_of::<ExtensionRecord>() == 32);
    assert!(size_of::<PackedFaceRecord>() == 32);
    assert!(size_of::<SphericalFaceRecord>() == 16);
};

// SAFETY: all four are repr(C) plain data whose sizes divide 64.
unsafe impl PoolRecord for PackedVertexRecord {}
unsafe impl PoolRecord for ExtensionRecord {}
unsafe impl PoolRecord for PackedFaceRecord {}
unsafe impl PoolRecord for SphericalFaceRecord {}

impl PackedVertexRecord {
    #[inline(always)]
    pub fn point(&self) -> Vec3 {
        Vec3::from_array(self.position)
    }
}

/// Per-axis extreme vertices and faces, ordered +X, -X, +Y, -Y, +Z, -Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WarmStartTable {
    pub start_vertices: [u32; 6],
    pub start_faces: [u32; 6],
}

impl WarmStartTable {
    /// Table entry whose signed axis has the largest dot product with `d`:
    /// the axis of the largest-magnitude component, with that component's sign.
    #[inline]
    pub fn slot_for(d: Vec3) -> usize {
        let a = d.abs();
        let axis = if a.x >= a.y && a.x >= a.z {
            0
        } else if a.y >= a.z {
            1
        } else {
            2
        };
        2 * axis + usize::from(d[axis] < 0.0)
    }

    pub fn vertex_for(&self, d: Vec3) -> u32 {
        self.start_vertices[Self::slot_for(d)]
    }

    pub fn face_for(&self, d: Vec3) -> u32 {
        self.start_faces[Self::slot_for(d)]
    }
}

const AXES: [Vec3; 6] = [
    Vec3::X,
    Vec3::new(-1.0, 0.0, 0.0),
    Vec3::Y,
    Vec3::new(0.0, -1.0, 0.0),
    Vec3::Z,
    Vec3::new(0.0, 0.0, -1.0),
];

fn argmax_by(values: impl Iterator<Item = f64>) -> u32 {
    let mut best = (0u32, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i as u32, v);
        }
    }
    best.0
}

/// Argmax over vertices and face normals for each signed axis; ties go to
/// the lowest index.
pub fn compute_warm_starts(hull: &HullTopology) -> WarmStartTable {
    let mut t = WarmStartTable::default();
    for (k, axis) in AXES.iter().enumerate() {
        t.start_vertices[k] = argmax_by(hull.vertices.iter().map(|v| axis.dot(*v)));
        t.start_faces[k] = argmax_by(hull.face_normals.iter().map(|n| axis.dot(*n)));
    }
    t
}

/// Up to `count` vertices that are neither `vertex` nor one of its true
/// neighbors, ranked by how close they lie to the sphere of `radius` around
/// `vertex` (`| |c - v| - radius |`, ties by index).
pub fn select_artificial_neighbors(
    hull: &HullTopology,
    vertex: usize,
    count: usize,
    radius: f64,
) -> Vec<u32> {
    if count == 0 {
        return Vec::new();
    }
    let center = hull.vertices[vertex];
    let neighbors = &hull.adjacency[vertex];
    let mut best: Vec<(f64, u32)> = Vec::with_capacity(count + 1);
    for (i, &p) in hull.vertices.iter().enumerate() {
        if i == vertex || neighbors.binary_search(&(i as u32)).is_ok() {
            continue;
        }
        let score = ((p - center).norm() - radius).abs();
        if best.len() == count && score >= best[count - 1].0 {
            continue;
        }
        // Candidates arrive in index order, so equal scores go after.
        let at = best.partition_point(|&(s, _)| s <= score);
        best.insert(at, (score, i as u32));
        best.truncate(count);
    }
    best.into_iter().map(|(_, i)| i).collect()
}

/// Vertex pool with artificial edges and extension chains.
#[derive(Debug, Clone, PartialEq)]
pub struct InternallyConnectedHull {
    pub vertices: CachePool<PackedVertexRecord>,
    pub extensions: CachePool<ExtensionRecord>,
    pub warm_starts: WarmStartTable,
    /// Mean of the vertex positions.
    pub center: Vec3,
}

impl InternallyConnectedHull {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// All stored neighbors of `v`: base slots followed by each extension.
    pub fn combined_neighbors(&self, v: usize) -> Vec<u16> {
        let rec = &self.vertices[v];
        let mut out: Vec<u16> = rec
            .neighbors
            .iter()
            .copied()
            .take_while(|&n| n != SENTINEL)
            .collect();
        let mut ext = rec.extension;
        let mut hops = 0;
        while ext != SENTINEL && hops <= self.extensions.len() {
            let e = &self.extensions[ext as usize];
            out.extend(e.neighbors.iter().copied().take_while(|&n| n != SENTINEL));
            ext = e.next;
            hops += 1;
        }
        out
    }

    /// Reassembles a hull from decoded pools, rejecting dangling indices and
    /// cyclic extension chains.
    pub fn from_parts(
        vertices: CachePool<PackedVertexRecord>,
        extensions: CachePool<ExtensionRecord>,
        warm_starts: WarmStartTable,
    ) -> Result<Self> {
        let v = vertices.len();
        let bad = |m: String| Err(Error::Format(m));
        if v == 0 || v > MAX_ELEMENTS || extensions.len() > MAX_ELEMENTS {
            return bad(format!("vertex pool of {v} records is out of range"));
        }
        if warm_starts.start_vertices.iter().any(|&i| i as usize >= v) {
            return bad("warm-start vertex out of range".into());
        }
        let in_range = |n: u16| n == SENTINEL || (n as usize) < v;
        let mut owner = vec![false; extensions.len()];
        for (i, rec) in vertices.iter().enumerate() {
            if !rec.neighbors.iter().all(|&n| in_range(n)) {
                return bad(format!("vertex {i} references a missing vertex"));
            }
            let mut ext = rec.extension;
            while ext != SENTINEL {
                let e = ext as usize;
                if e >= extensions.len() {
                    return bad(format!("vertex {i} references missing extension {e}"));
                }
                if owner[e] {
                    return bad(format!("extension {e} is shared or cyclic"));
                }
                owner[e] = true;
                if !extensions[e].neighbors.iter().all(|&n| in_range(n)) {
                    return bad(format!("extension {e} references a missing vertex"));
                }
                ext = extensions[e].next;
            }
        }
        let mut ic = InternallyConnectedHull {
            vertices,
            extensions,
            warm_starts,
            center: Vec3::ZERO,
        };
        ic.compute_center();
        Ok(ic)
    }
}

/// Builds the vertex pool. Each vertex stores all true neighbors (spilling
/// into extension records past 19), and the free slots of its base record
/// or last extension are padded with artificial neighbors chosen on a sphere
/// of `fill_radius_fraction x bounding radius`.
pub fn build_internally_connected(
    hull: &HullTopology,
    fill_radius_fraction: f64,
) -> Result<InternallyConnectedHull> {
    if !(fill_radius_fraction > 0.0 && fill_radius_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fill radius fraction must be in (0, 1], got {fill_radius_fraction}"
        )));
    }
    let n = hull.vertex_count();
    if n > MAX_ELEMENTS {
        return Err(Error::CapacityExceeded(format!(
            "{n} vertices exceeds the 16-bit limit of {MAX_ELEMENTS}"
        )));
    }
    let radius = fill_radius_fraction * hull.bounding_sphere.radius;

    let mut records = Vec::with_capacity(n);
    let mut extensions: Vec<ExtensionRecord> = Vec::new();
    for v in 0..n {
        let true_nb = &hull.adjacency[v];
        let mut rec = PackedVertexRecord {
            position: hull.vertices[v].to_array(),
            neighbors: [SENTINEL; BASE_SLOTS],
            extension: SENTINEL,
        };

        if true_nb.len() <= BASE_SLOTS {
            let extra = select_artificial_neighbors(hull, v, BASE_SLOTS - true_nb.len(), radius);
            for (slot, &nb) in rec.neighbors.iter_mut().zip(true_nb.iter().chain(&extra)) {
                *slot = nb as u16;
            }
        } else {
            for (slot, &nb) in rec.neighbors.iter_mut().zip(true_nb) {
                *slot = nb as u16;
            }
            let rest = &true_nb[BASE_SLOTS..];
            let chunks = rest.len().div_ceil(EXTENSION_SLOTS);
            let spare = chunks * EXTENSION_SLOTS - rest.len();
            let extra = select_artificial_neighbors(hull, v, spare, radius);
            let mut fill = rest.iter().chain(&extra);

            let first = extensions.len();
            if first + chunks > MAX_ELEMENTS {
                return Err(Error::CapacityExceeded(
                    "extension pool exceeds the 16-bit limit".into(),
                ));
            }
            rec.extension = first as u16;
            for c in 0..chunks {
                let mut e = ExtensionRecord {
                    neighbors: [SENTINEL; EXTENSION_SLOTS],
                    next: if c + 1 < chunks {
                        (first + c + 1) as u16
                    } else {
                        SENTINEL
                    },
                };
                for slot in &mut e.neighbors {
                    match fill.next() {
                        Some(&nb) => *slot = nb as u16,
                        None => break,
                    }
                }
                extensions.push(e);
            }
        }
        records.push(rec);
    }

    let mut ic = InternallyConnectedHull {
        vertices: CachePool::from_slice(&records),
        extensions: CachePool::from_slice(&extensions),
        warm_starts: compute_warm_starts(hull),
        center: Vec3::ZERO,
    };
    ic.compute_center();
    Ok(ic)
}

/// Face pool with exact normals plus the vertex pool for the final climb.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceTraversingHull {
    pub faces: CachePool<PackedFaceRecord>,
    pub vertex_hull: InternallyConnectedHull,
}

/// Face pool with spherical-encoded normals plus the vertex pool.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalHull {
    pub faces: CachePool<SphericalFaceRecord>,
    pub vertex_hull: InternallyConnectedHull,
}

impl FaceTraversingHull {
    pub fn warm_starts(&self) -> &WarmStartTable {
        &self.vertex_hull.warm_starts
    }

    pub fn from_parts(
        faces: CachePool<PackedFaceRecord>,
        vertex_hull: InternallyConnectedHull,
    ) -> Result<Self> {
        check_face_refs(
            faces.iter().map(|f| (f.neighbors, f.anchor)),
            faces.len(),
            &vertex_hull,
        )?;
        Ok(FaceTraversingHull { faces, vertex_hull })
    }
}

impl SphericalHull {
    pub fn warm_starts(&self) -> &WarmStartTable {
        &self.vertex_hull.warm_starts
    }

    pub fn from_parts(
        faces: CachePool<SphericalFaceRecord>,
        vertex_hull: InternallyConnectedHull,
    ) -> Result<Self> {
        check_face_refs(
            faces.iter().map(|f| (f.neighbors, f.anchor)),
            faces.len(),
            &vertex_hull,
        )?;
        Ok(SphericalHull { faces, vertex_hull })
    }
}

fn check_face_refs(
    refs: impl Iterator<Item = ([u16; 3], u16)>,
    face_count: usize,
    vh: &InternallyConnectedHull,
) -> Result<()> {
    if face_count == 0 || face_count > MAX_ELEMENTS {
        return Err(Error::Format(format!(
            "face pool of {face_count} records is out of range"
        )));
    }
    if vh
        .warm_starts
        .start_faces
        .iter()
        .any(|&f| f as usize >= face_count)
    {
        return Err(Error::Format("warm-start face out of range".into()));
    }
    for (i, (nbs, anchor)) in refs.enumerate() {
        if nbs.iter().any(|&g| g as usize >= face_count) || anchor as usize >= vh.len() {
            return Err(Error::Format(format!(
                "face {i} has an out-of-range reference"
            )));
        }
    }
    Ok(())
}

fn face_capacity(hull: &HullTopology) -> Result<()> {
    let f = hull.face_count();
    if f > MAX_ELEMENTS {
        return Err(Error::CapacityExceeded(format!(
            "{f} faces exceeds the 16-bit limit of {MAX_ELEMENTS}"
        )));
    }
    Ok(())
}

/// The face vertex with the largest dot product against the face normal,
/// ties to the lowest vertex index.
fn anchor_vertex(hull: &HullTopology, f: usize) -> u16 {
    let n = hull.face_normals[f];
    let mut tri = hull.faces[f];
    tri.sort_unstable();
    let mut best = (tri[0], n.dot(hull.vertices[tri[0] as usize]));
    for &v in &tri[1..] {
        let d = n.dot(hull.vertices[v as usize]);
        if d > best.1 {
            best = (v, d);
        }
    }
    best.0 as u16
}

pub fn build_face_traversing(hull: &HullTopology) -> Result<FaceTraversingHull> {
    face_capacity(hull)?;
    let vertex_hull = build_internally_connected(hull, DEFAULT_FILL_RADIUS_FRACTION)?;
    face_traversing_with(hull, vertex_hull)
}

/// Like [`build_face_traversing`] but reuses an already built vertex pool.
pub fn face_traversing_with(
    hull: &HullTopology,
    vertex_hull: InternallyConnectedHull,
) -> Result<FaceTraversingHull> {
    face_capacity(hull)?;
    let faces = (0..hull.face_count())
        .map(|f| PackedFaceRecord {
            normal: hull.face_normals[f].to_array(),
            neighbors: hull.face_adjacency[f].map(|g| g as u16),
            anchor: anchor_vertex(hull, f),
        })
        .collect();
    Ok(FaceTraversingHull { faces, vertex_hull })
}

pub fn build_spherical(hull: &HullTopology) -> Result<SphericalHull> {
    face_capacity(hull)?;
    let vertex_hull = build_internally_connected(hull, DEFAULT_FILL_RADIUS_FRACTION)?;
    spherical_with(hull, vertex_hull)
}

/// Like [`build_spherical`] but reuses an already built vertex pool.
pub fn spherical_with(
    hull: &HullTopology,
    vertex_hull: InternallyConnectedHull,
) -> Result<SphericalHull> {
    face_capacity(hull)?;
    let mut faces = Vec::with_capacity(hull.face_count());
    for f in 0..hull.face_count() {
        let (azimuth, elevation) = encode_normal(hull.face_normals[f])?;
        faces.push(SphericalFaceRecord {
            azimuth,
            elevation,
            neighbors: hull.face_adjacency[f].map(|g| g as u16),
            anchor: anchor_vertex(hull, f),
        });
    }
    Ok(SphericalHull {
        faces: CachePool::from_slice(&faces),
        vertex_hull,
    })
}

/// Checks the packed vertex pool against the hull it was built from.
pub fn audit_internally_connected(
    ic: &InternallyConnectedHull,
    hull: &HullTopology,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut push = |name: &'static str, failure: Option<String>| {
        report.checks.push(crate::hull::Check {
            name,
            passed: failure.is_none(),
            detail: failure.unwrap_or_else(|| "ok".into()),
        });
    };

    push(
        "pool-length",
        (ic.len() != hull.vertex_count())
            .then(|| format!("{} records for {} vertices", ic.len(), hull.vertex_count())),
    );
    push(
        "pool-alignment",
        (!ic.vertices.base_address().is_multiple_of(CACHE_LINE)
            || !ic.extensions.base_address().is_multiple_of(CACHE_LINE))
        .then(|| "pool does not start on a cache line".to_string()),
    );
    if ic.len() != hull.vertex_count() {
        return report;
    }

    let mut superset = None;
    let mut dupes = None;
    let mut padding = None;
    for v in 0..ic.len() {
        let combined = ic.combined_neighbors(v);
        if let Some(&missing) = hull.adjacency[v]
            .iter()
            .find(|&&t| !combined.contains(&(t as u16)))
        {
            superset
                .get_or_insert_with(|| format!("vertex {v} is missing true neighbor {missing}"));
        }
        let mut sorted = combined.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != combined.len() || combined.contains(&(v as u16)) {
            dupes.get_or_insert_with(|| format!("vertex {v} has a duplicate or self reference"));
        }
        let degree = hull.adjacency[v].len();
        let candidates = hull.vertex_count() - 1 - degree;
        let rec = &ic.vertices[v];
        let empty = rec.neighbors.iter().filter(|&&n| n == SENTINEL).count();
        if degree < BASE_SLOTS && candidates >= BASE_SLOTS - degree && empty > 0 {
            padding.get_or_insert_with(|| format!("vertex {v} has {empty} unfilled base slots"));
        }
    }
    push("neighbor-superset", superset);
    push("no-duplicates", dupes);
    push("artificial-padding", padding);
    report
}
