use std::io::Write;

use hullcache::hull::{build_hull, load_mesh, sample_sphere, validate_topology};
use hullcache::layouts::{FaceTraversingHull, InternallyConnectedHull, SphericalHull};
use hullcache::support::{support_naive, BackendSet, Direction, SupportMap};
use hullcache::{Error, Vec3};

fn cube_corners() -> Vec<Vec3> {
    (0..8)
        .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect()
}

#[test]
fn obj_file_to_hull() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.obj");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# unit cube with a center point").unwrap();
    for p in cube_corners() {
        writeln!(f, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    writeln!(f, "v 0.5 0.5 0.5\nf 1 2 3").unwrap();
    drop(f);

    let ps = load_mesh(&path).unwrap();
    assert_eq!(ps.source_label, "box");
    assert_eq!(ps.len(), 9);
    let h = build_hull(&ps).unwrap();
    assert_eq!(h.vertex_count(), 8);
    assert!(validate_topology(&h).all_passed());
}

#[test]
fn binary_ply_file_to_hull() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.data");
    let pts = sample_sphere(100, 5).unwrap().points;
    let mut bytes = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nend_header\n",
        pts.len()
    )
    .into_bytes();
    for p in &pts {
        for c in [p.x, p.y, p.z] {
            bytes.extend_from_slice(&(c as f32).to_le_bytes());
        }
        bytes.push(7);
    }
    std::fs::write(&path, bytes).unwrap();

    let ps = load_mesh(&path).unwrap();
    assert_eq!(ps.len(), 100);
    assert_eq!(ps.points[3].x, pts[3].x as f32 as f64);
    assert_eq!(build_hull(&ps).unwrap().vertex_count(), 100);
}

#[test]
fn missing_and_unknown_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_mesh(dir.path().join("nope.obj")),
        Err(Error::Io(_))
    ));
    let other = dir.path().join("notes.txt");
    std::fs::write(&other, "hello").unwrap();
    assert!(matches!(load_mesh(&other), Err(Error::Format(_))));
}

#[test]
fn serialized_layouts_answer_identically() {
    let h = build_hull(&sample_sphere(3000, 99).unwrap()).unwrap();
    let set = BackendSet::build(&h).unwrap();
    let ic = InternallyConnectedHull::from_bytes(&set.internally_connected.to_bytes()).unwrap();
    let ft = FaceTraversingHull::from_bytes(&set.face_traversing.to_bytes()).unwrap();
    let se = SphericalHull::from_bytes(&set.spherical.to_bytes()).unwrap();
    assert_eq!(ic, set.internally_connected);
    assert_eq!(ft, set.face_traversing);
    assert_eq!(se, set.spherical);

    let dirs = sample_sphere(200, 1).unwrap().points;
    for d in dirs {
        let d = Direction::new(d).unwrap();
        let want = support_naive(&h, &d);
        for got in [ic.support(&d), ft.support(&d), se.support(&d)] {
            assert_eq!(got.support_value, want.support_value);
        }
    }
}

#[test]
fn truncated_stream_is_rejected() {
    let h = build_hull(&sample_sphere(64, 2).unwrap()).unwrap();
    let bytes = BackendSet::build(&h).unwrap().spherical.to_bytes();
    for cut in [0, 5, 12, bytes.len() / 2, bytes.len() - 1] {
        assert!(
            SphericalHull::from_bytes(&bytes[..cut]).is_err(),
            "cut at {cut}"
        );
    }
}
