//! Little-endian wire format for layout pools.
//!
//! A file is a sequence of sections. Each section is a 12-byte header
//! (`b"HCL1"`, record kind as `u32`, record count as `u32`) followed by
//! `count` records encoded field by field in declaration order, so on a
//! little-endian host the record bytes equal the in-memory representation.

use super::{
    CachePool, ExtensionRecord, FaceTraversingHull, InternallyConnectedHull, PackedFaceRecord,
    PackedVertexRecord, PoolRecord, SphericalFaceRecord, SphericalHull, WarmStartTable,
};
use crate::error::{format_err, Result};
use crate::fxtrig::Q31Angle;

pub const MAGIC: [u8; 4] = *b"HCL1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum RecordKind {
    Vertex = 1,
    Extension = 2,
    Face = 3,
    SphericalFace = 4,
    WarmStart = 5,
}

impl RecordKind {
    fn from_u32(k: u32) -> Option<Self> {
        Some(match k {
            1 => RecordKind::Vertex,
            2 => RecordKind::Extension,
            3 => RecordKind::Face,
            4 => RecordKind::SphericalFace,
            5 => RecordKind::WarmStart,
            _ => return None,
        })
    }
}

/// A record with a fixed-size little-endian encoding.
pub trait WireRecord: Sized {
    const KIND: RecordKind;
    const SIZE: usize;
    fn write(&self, out: &mut Vec<u8>);
    /// `b` is exactly `SIZE` bytes.
    fn read(b: &[u8]) -> Self;
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn u16(&mut self) -> u16 {
        let v = u16::from_le_bytes([self.0[0], self.0[1]]);
        self.0 = &self.0[2..];
        v
    }
    fn u32(&mut self) -> u32 {
        let v = u32::from_le_bytes(self.0[..4].try_into().unwrap());
        self.0 = &self.0[4..];
        v
    }
    fn f64(&mut self) -> f64 {
        let v = f64::from_le_bytes(self.0[..8].try_into().unwrap());
        self.0 = &self.0[8..];
        v
    }
    fn u16s<const N: usize>(&mut self) -> [u16; N] {
        std::array::from_fn(|_| self.u16())
    }
}

impl WireRecord for PackedVertexRecord {
    const KIND: RecordKind = RecordKind::Vertex;
    const SIZE: usize = 64;
    fn write(&self, out: &mut Vec<u8>) {
        self.position
            .iter()
            .for_each(|c| out.extend_from_slice(&c.to_le_bytes()));
        self.neighbors
            .iter()
            .for_each(|n| out.extend_from_slice(&n.to_le_bytes()));
        out.extend_from_slice(&self.extension.to_le_bytes());
    }
    fn read(b: &[u8]) -> Self {
        let mut r = Reader(b);
        PackedVertexRecord {
            position: [r.f64(), r.f64(), r.f64()],
            neighbors: r.u16s(),
            extension: r.u16(),
        }
    }
}

impl WireRecord for ExtensionRecord {
    const KIND: RecordKind = RecordKind::Extension;
    const SIZE: usize = 32;
    fn write(&self, out: &mut Vec<u8>) {
        self.neighbors
            .iter()
            .for_each(|n| out.extend_from_slice(&n.to_le_bytes()));
        out.extend_from_slice(&self.next.to_le_bytes());
    }
    fn read(b: &[u8]) -> Self {
        let mut r = Reader(b);
        ExtensionRecord {
            neighbors: r.u16s(),
            next: r.u16(),
        }
    }
}

impl WireRecord for PackedFaceRecord {
    const KIND: RecordKind = RecordKind::Face;
    const SIZE: usize = 32;
    fn write(&self, out: &mut Vec<u8>) {
        self.normal
            .iter()
            .for_each(|c| out.extend_from_slice(&c.to_le_bytes()));
        self.neighbors
            .iter()
            .for_each(|n| out.extend_from_slice(&n.to_le_bytes()));
        out.extend_from_slice(&self.anchor.to_le_bytes());
    }
    fn read(b: &[u8]) -> Self {
        let mut r = Reader(b);
        PackedFaceRecord {
            normal: [r.f64(), r.f64(), r.f64()],
            neighbors: r.u16s(),
            anchor: r.u16(),
        }
    }
}

impl WireRecord for SphericalFaceRecord {
    const KIND: RecordKind = RecordKind::SphericalFace;
    const SIZE: usize = 16;
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.azimuth.to_bits().to_le_bytes());
        out.extend_from_slice(&self.elevation.to_bits().to_le_bytes());
        self.neighbors
            .iter()
            .for_each(|n| out.extend_from_slice(&n.to_le_bytes()));
        out.extend_from_slice(&self.anchor.to_le_bytes());
    }
    fn read(b: &[u8]) -> Self {
        let mut r = Reader(b);
        SphericalFaceRecord {
            azimuth: Q31Angle::from_bits(r.u32()),
            elevation: Q31Angle::from_bits(r.u32()),
            neighbors: r.u16s(),
            anchor: r.u16(),
        }
    }
}

impl WireRecord for WarmStartTable {
    const KIND: RecordKind = RecordKind::WarmStart;
    const SIZE: usize = 48;
    fn write(&self, out: &mut Vec<u8>) {
        for i in self.start_vertices.iter().chain(&self.start_faces) {
            out.extend_from_slice(&i.to_le_bytes());
        }
    }
    fn read(b: &[u8]) -> Self {
        let mut r = Reader(b);
        WarmStartTable {
            start_vertices: std::array::from_fn(|_| r.u32()),
            start_faces: std::array::from_fn(|_| r.u32()),
        }
    }
}

/// Appends one section holding `records`.
pub fn write_section<R: WireRecord>(out: &mut Vec<u8>, records: &[R]) {
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(R::KIND as u32).to_le_bytes());
    out.extend_from_slice(&(records.len() as u32).to_le_bytes());
    for r in records {
        let before = out.len();
        r.write(out);
        debug_assert_eq!(out.len() - before, R::SIZE);
    }
}

/// One decoded section.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Vertices(CachePool<PackedVertexRecord>),
    Extensions(CachePool<ExtensionRecord>),
    Faces(CachePool<PackedFaceRecord>),
    SphericalFaces(CachePool<SphericalFaceRecord>),
    WarmStarts(Vec<WarmStartTable>),
}

impl Section {
    pub fn kind(&self) -> RecordKind {
        match self {
            Section::Vertices(_) => RecordKind::Vertex,
            Section::Extensions(_) => RecordKind::Extension,
            Section::Faces(_) => RecordKind::Face,
            Section::SphericalFaces(_) => RecordKind::SphericalFace,
            Section::WarmStarts(_) => RecordKind::WarmStart,
        }
    }
}

fn read_records<R: WireRecord>(body: &[u8]) -> Vec<R> {
    body.chunks_exact(R::SIZE).map(R::read).collect()
}

fn read_pool<R: WireRecord + PoolRecord>(body: &[u8]) -> CachePool<R> {
    CachePool::from_slice(&read_records::<R>(body))
}

/// Splits a byte stream into sections. Only structure is checked here;
/// cross-references are validated when a hull is assembled from sections.
pub fn decode_sections(mut bytes: &[u8]) -> Result<Vec<Section>> {
    let mut sections = Vec::new();
    while !bytes.is_empty() {
        if bytes.len() < HEADER_LEN {
            return Err(format_err("truncated section header"));
        }
        if bytes[..4] != MAGIC {
            return Err(format_err("bad section magic"));
        }
        let kind_raw = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let kind = RecordKind::from_u32(kind_raw)
            .ok_or_else(|| format_err(format!("unknown record kind {kind_raw}")))?;
        let size = match kind {
            RecordKind::Vertex => PackedVertexRecord::SIZE,
            RecordKind::Extension => ExtensionRecord::SIZE,
            RecordKind::Face => PackedFaceRecord::SIZE,
            RecordKind::SphericalFace => SphericalFaceRecord::SIZE,
            RecordKind::WarmStart => WarmStartTable::SIZE,
        };
        let body_len = count
            .checked_mul(size)
            .filter(|&n| n <= bytes.len() - HEADER_LEN)
            .ok_or_else(|| format_err(format!("section of {count} records is truncated")))?;
        let body = &bytes[HEADER_LEN..HEADER_LEN + body_len];
        sections.push(match kind {
            RecordKind::Vertex => Section::Vertices(read_pool(body)),
            RecordKind::Extension => Section::Extensions(read_pool(body)),
            RecordKind::Face => Section::Faces(read_pool(body)),
            RecordKind::SphericalFace => Section::SphericalFaces(read_pool(body)),
            RecordKind::WarmStart => Section::WarmStarts(read_records(body)),
        });
        bytes = &bytes[HEADER_LEN + body_len..];
    }
    Ok(sections)
}

fn take_unique<T>(
    sections: &[Section],
    kind: RecordKind,
    pick: impl Fn(&Section) -> Option<&T>,
) -> Result<T>
where
    T: Clone,
{
    let mut found = sections.iter().filter(|s| s.kind() == kind);
    let first = found
        .next()
        .ok_or_else(|| format_err(format!("missing {kind:?} section")))?;
    if found.next().is_some() {
        return Err(format_err(format!("duplicate {kind:?} section")));
    }
    Ok(pick(first).expect("kind matches variant").clone())
}

impl InternallyConnectedHull {
    pub fn write_sections(&self, out: &mut Vec<u8>) {
        write_section(out, &self.vertices);
        write_section(out, &self.extensions);
        write_section(out, std::slice::from_ref(&self.warm_starts));
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_sections(&mut out);
        out
    }

    pub fn from_sections(sections: &[Section]) -> Result<Self> {
        let vertices = take_unique(sections, RecordKind::Vertex, |s| match s {
            Section::Vertices(p) => Some(p),
            _ => None,
        })?;
        let extensions = take_unique(sections, RecordKind::Extension, |s| match s {
            Section::Extensions(p) => Some(p),
            _ => None,
        })?;
        let warm = take_unique(sections, RecordKind::WarmStart, |s| match s {
            Section::WarmStarts(t) => Some(t),
            _ => None,
        })?;
        let [warm] = warm[..] else {
            return Err(format_err("warm-start section must hold exactly one table"));
        };
        InternallyConnectedHull::from_parts(vertices, extensions, warm)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_sections(&decode_sections(bytes)?)
    }
}

impl FaceTraversingHull {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_section(&mut out, &self.faces);
        self.vertex_hull.write_sections(&mut out);
        out
    }

    pub fn from_sections(sections: &[Section]) -> Result<Self> {
        let faces = take_unique(sections, RecordKind::Face, |s| match s {
            Section::Faces(p) => Some(p),
            _ => None,
        })?;
        FaceTraversingHull::from_parts(faces, InternallyConnectedHull::from_sections(sections)?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_sections(&decode_sections(bytes)?)
    }
}

impl SphericalHull {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_section(&mut out, &self.faces);
        self.vertex_hull.write_sections(&mut out);
        out
    }

    pub fn from_sections(sections: &[Section]) -> Result<Self> {
        let faces = take_unique(sections, RecordKind::SphericalFace, |s| match s {
            Section::SphericalFaces(p) => Some(p),
            _ => None,
        })?;
        SphericalHull::from_parts(faces, InternallyConnectedHull::from_sections(sections)?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_sections(&decode_sections(bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::hull::{build_hull, sample_sphere};
    use crate::layouts::{build_face_traversing, build_spherical};

    #[test]
    fn header_layout() {
        let mut out = Vec::new();
        write_section::<ExtensionRecord>(&mut out, &[]);
        assert_eq!(out, b"HCL1\x02\x00\x00\x00\x00\x00\x00\x00");
    }

    #[test]
    fn vertex_record_bytes_match_memory_layout() {
        let rec = PackedVertexRecord {
            position: [1.0, -2.5, 3.25],
            neighbors: std::array::from_fn(|i| i as u16 * 3),
            extension: 0xFFFF,
        };
        let mut out = Vec::new();
        rec.write(&mut out);
        assert_eq!(out.len(), 64);
        if cfg!(target_endian = "little") {
            // SAFETY: plain-data record without padding.
            let mem: &[u8; 64] =
                unsafe { &*(&rec as *const PackedVertexRecord as *const [u8; 64]) };
            assert_eq!(&out[..], &mem[..]);
        }
        assert_eq!(PackedVertexRecord::read(&out), rec);
    }

    #[test]
    fn hull_bytes_roundtrip() {
        let h = build_hull(&sample_sphere(200, 2).unwrap()).unwrap();
        let ft = build_face_traversing(&h).unwrap();
        let bytes = ft.to_bytes();
        let back = FaceTraversingHull::from_bytes(&bytes).unwrap();
        assert_eq!(back, ft);
        assert_eq!(back.to_bytes(), bytes);

        let se = build_spherical(&h).unwrap();
        let bytes = se.to_bytes();
        assert_eq!(SphericalHull::from_bytes(&bytes).unwrap().to_bytes(), bytes);
    }

    #[test]
    fn malformed_streams_are_rejected() {
        let h = build_hull(&sample_sphere(50, 2).unwrap()).unwrap();
        let bytes = build_face_traversing(&h).unwrap().to_bytes();
        for cut in [1, 11, 13, bytes.len() - 1] {
            assert!(decode_sections(&bytes[..cut]).is_err(), "cut {cut}");
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_sections(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(decode_sections(&bad), Err(Error::Format(_))));
        // Missing sections.
        assert!(InternallyConnectedHull::from_bytes(&bytes[..12]).is_err());
    }

    #[test]
    fn dangling_reference_is_rejected() {
        let h = build_hull(&sample_sphere(50, 2).unwrap()).unwrap();
        let ic = crate::layouts::build_internally_connected(&h, 0.2).unwrap();
        let mut recs = ic.vertices.to_vec();
        recs[3].neighbors[0] = 50;
        let mut out = Vec::new();
        write_section(&mut out, &recs);
        write_section(&mut out, &ic.extensions);
        write_section(&mut out, &[ic.warm_starts]);
        assert!(InternallyConnectedHull::from_bytes(&out).is_err());

        recs[3].neighbors[0] = 1;
        recs[3].extension = 0;
        let mut out = Vec::new();
        write_section(&mut out, &recs);
        write_section(
            &mut out,
            &[ExtensionRecord {
                neighbors: [0xFFFF; 15],
                next: 0,
            }],
        );
        write_section(&mut out, &[ic.warm_starts]);
        assert!(
            InternallyConnectedHull::from_bytes(&out).is_err(),
            "cyclic chain"
        );
    }
}
