//! Vertex-position readers for OBJ and PLY meshes. Face data is ignored
//! because the hull is always rebuilt from the points.

use std::path::Path;

use super::PointSet;
use crate::error::{format_err, Error, Result};
use crate::geom::Vec3;

/// Reads the vertex positions of an OBJ or PLY file. PLY is recognized by
/// its magic line, OBJ by the `.obj` extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let is_obj = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("obj"));

    let mut points = if bytes.starts_with(b"ply") {
        parse_ply(&bytes)?
    } else if is_obj {
        parse_obj(&bytes)?
    } else {
        return Err(format_err(format!(
            "{}: not a PLY or OBJ file",
            path.display()
        )));
    };
    points.source_label = label;
    Ok(points)
}

/// Parses the `v x y z [w]` lines of an OBJ document.
pub fn parse_obj(bytes: &[u8]) -> Result<PointSet> {
    let text = String::from_utf8_lossy(bytes);
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut tok = line.split_whitespace();
        if tok.next() != Some("v") {
            continue;
        }
        let mut coord = [0.0; 3];
        for c in &mut coord {
            let t = tok.next().ok_or_else(|| {
                format_err(format!("line {}: vertex needs 3 coordinates", lineno + 1))
            })?;
            *c = parse_real(t, lineno + 1)?;
        }
        points.push(Vec3::from_array(coord));
    }
    if points.is_empty() {
        return Err(format_err("OBJ contains no vertices"));
    }
    Ok(PointSet {
        points,
        source_label: "obj".into(),
    })
}

fn parse_real(t: &str, lineno: usize) -> Result<f64> {
    let v: f64 = t
        .parse()
        .map_err(|_| format_err(format!("line {lineno}: bad number {t:?}")))?;
    if !v.is_finite() {
        return Err(format_err(format!("line {lineno}: non-finite coordinate")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Result<Scalar> {
        Ok(match s {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return Err(format_err(format!("unknown PLY scalar type {s:?}"))),
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar { ty: Scalar, name: String },
    List { count: Scalar, item: Scalar },
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

/// Parses vertex positions from an ASCII or binary little-endian PLY file.
pub fn parse_ply(bytes: &[u8]) -> Result<PointSet> {
    let (encoding, elements, body) = parse_ply_header(bytes)?;

    let vertex_pos = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| format_err("PLY has no vertex element"))?;
    let vertex = &elements[vertex_pos];
    if vertex.count == 0 {
        return Err(format_err("PLY has 0 vertices"));
    }
    let mut xyz = [usize::MAX; 3];
    for (slot, axis) in xyz.iter_mut().zip(["x", "y", "z"]) {
        let k = vertex
            .props
            .iter()
            .position(|p| matches!(p, Property::Scalar { name, .. } if name == axis))
            .ok_or_else(|| format_err(format!("vertex element lacks property {axis}")))?;
        match vertex.props[k] {
            Property::Scalar {
                ty: Scalar::F32 | Scalar::F64,
                ..
            } => *slot = k,
            _ => {
                return Err(format_err(format!(
                    "vertex property {axis} must be float or double"
                )))
            }
        }
    }

    let points = match encoding {
        Encoding::Ascii => read_ascii(body, &elements[..vertex_pos], vertex, xyz)?,
        Encoding::BinaryLe => read_binary(body, &elements[..vertex_pos], vertex, xyz)?,
    };
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(format_err(format!(
            "vertex {i} has a non-finite coordinate"
        )));
    }
    Ok(PointSet {
        points,
        source_label: "ply".into(),
    })
}

fn parse_ply_header(bytes: &[u8]) -> Result<(Encoding, Vec<Element>, &[u8])> {
    let mut pos = 0;
    let mut next_line = || -> Result<&str> {
        let rest = &bytes[pos..];
        let end = rest
            .iter()
            .position(|&c| c == b'\n')
            .ok_or_else(|| format_err("PLY header is not terminated"))?;
        pos += end + 1;
        let line =
            std::str::from_utf8(&rest[..end]).map_err(|_| format_err("PLY header is not ASCII"))?;
        Ok(line.trim_end_matches('\r'))
    };

    if next_line()?.trim() != "ply" {
        return Err(format_err("missing PLY magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let line = next_line()?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["end_header"] => break,
            [] | ["comment", ..] | ["obj_info", ..] => {}
            ["format", kind, _version] => {
                encoding = Some(match *kind {
                    "ascii" => Encoding::Ascii,
                    "binary_little_endian" => Encoding::BinaryLe,
                    other => return Err(format_err(format!("unsupported PLY encoding {other:?}"))),
                })
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| format_err(format!("bad element count {count:?}")))?,
                props: Vec::new(),
            }),
            ["property", "list", count, item, _name] => elements
                .last_mut()
                .ok_or_else(|| format_err("property before any element"))?
                .props
                .push(Property::List {
                    count: Scalar::parse(count)?,
                    item: Scalar::parse(item)?,
                }),
            ["property", ty, name] => elements
                .last_mut()
                .ok_or_else(|| format_err("property before any element"))?
                .props
                .push(Property::Scalar {
                    ty: Scalar::parse(ty)?,
                    name: name.to_string(),
                }),
            _ => return Err(format_err(format!("unrecognized PLY header line {line:?}"))),
        }
    }
    let encoding = encoding.ok_or_else(|| format_err("PLY header lacks a format line"))?;
    Ok((encoding, elements, &bytes[pos..]))
}

fn read_ascii(
    body: &[u8],
    before: &[Element],
    vertex: &Element,
    xyz: [usize; 3],
) -> Result<Vec<Vec3>> {
    let text = std::str::from_utf8(body).map_err(|_| format_err("ASCII PLY body is not UTF-8"))?;
    let mut tok = text.split_ascii_whitespace();
    let mut next =
        || -> Result<&str> { tok.next().ok_or_else(|| format_err("PLY body ends early")) };
    let number = |t: &str| -> Result<f64> {
        t.parse::<f64>()
            .map_err(|_| format_err(format!("bad PLY number {t:?}")))
    };

    for el in before {
        for _ in 0..el.count {
            for p in &el.props {
                match p {
                    Property::Scalar { .. } => {
                        next()?;
                    }
                    Property::List { .. } => {
                        let n = list_len(number(next()?)?)?;
                        for _ in 0..n {
                            next()?;
                        }
                    }
                }
            }
        }
    }

    // Every vertex needs at least three tokens.
    let mut points = Vec::with_capacity(vertex.count.min(body.len() / 6 + 1));
    for _ in 0..vertex.count {
        let mut c = [0.0; 3];
        for (k, p) in vertex.props.iter().enumerate() {
            match p {
                Property::Scalar { .. } => {
                    let v = number(next()?)?;
                    if let Some(axis) = xyz.iter().position(|&i| i == k) {
                        c[axis] = v;
                    }
                }
                Property::List { .. } => {
                    let n = list_len(number(next()?)?)?;
                    for _ in 0..n {
                        next()?;
                    }
                }
            }
        }
        points.push(Vec3::from_array(c));
    }
    Ok(points)
}

fn list_len(v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format_err(format!("bad PLY list length {v}")))
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| format_err("PLY body ends early"))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn scalar(&mut self, ty: Scalar) -> Result<f64> {
        Ok(ty.read_le(self.take(ty.size())?))
    }

    fn skip_list(&mut self, count: Scalar, item: Scalar) -> Result<()> {
        let n = list_len(self.scalar(count)?)?;
        self.take(
            n.checked_mul(item.size())
                .ok_or_else(|| format_err("list too long"))?,
        )?;
        Ok(())
    }
}

fn read_binary(
    body: &[u8],
    before: &[Element],
    vertex: &Element,
    xyz: [usize; 3],
) -> Result<Vec<Vec3>> {
    let mut cur = Cursor { data: body, pos: 0 };
    for el in before {
        for _ in 0..el.count {
            for p in &el.props {
                match *p {
                    Property::Scalar { ty, .. } => {
                        cur.take(ty.size())?;
                    }
                    Property::List { count, item } => cur.skip_list(count, item)?,
                }
            }
        }
    }

    let min_record: usize = vertex
        .props
        .iter()
        .map(|p| match *p {
            Property::Scalar { ty, .. } => ty.size(),
            Property::List { count, .. } => count.size(),
        })
        .sum();
    let available = (body.len() - cur.pos) / min_record.max(1);
    if vertex.count > available {
        return Err(Error::Format(format!(
            "PLY declares {} vertices but the body holds at most {available}",
            vertex.count
        )));
    }

    let mut points = Vec::with_capacity(vertex.count);
    for _ in 0..vertex.count {
        let mut c = [0.0; 3];
        for (k, p) in vertex.props.iter().enumerate() {
            match *p {
                Property::Scalar { ty, .. } => {
                    let v = cur.scalar(ty)?;
                    if let Some(axis) = xyz.iter().position(|&i| i == k) {
                        c[axis] = v;
                    }
                }
                Property::List { count, item } => cur.skip_list(count, item)?,
            }
        }
        points.push(Vec3::from_array(c));
    }
    Ok(points)
}
