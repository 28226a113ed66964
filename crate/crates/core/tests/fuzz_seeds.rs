use std::fs;
use std::path::PathBuf;

use hullcache::hull::{parse_obj, parse_ply};
use hullcache::layouts::{
    decode_sections, FaceTraversingHull, InternallyConnectedHull, SphericalHull,
};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn obj_seeds() {
    for (name, bytes) in seeds("parse_obj") {
        let r = parse_obj(&bytes);
        if name == "odd.obj" {
            assert!(r.is_err(), "{name}");
        } else {
            assert!(r.unwrap().len() >= 4, "{name}");
        }
    }
}

#[test]
fn ply_seeds() {
    for (name, bytes) in seeds("parse_ply") {
        let r = parse_ply(&bytes);
        if name.contains("_be") {
            assert!(r.is_err(), "{name}");
        } else {
            assert_eq!(r.unwrap().len(), 4, "{name}");
        }
    }
}

#[test]
fn hcl_seeds() {
    for (name, bytes) in seeds("hcl_decode") {
        assert!(decode_sections(&bytes).is_ok(), "{name}");
        let again = if name.contains(".ic.") {
            InternallyConnectedHull::from_bytes(&bytes)
                .unwrap()
                .to_bytes()
        } else if name.contains(".ft.") {
            FaceTraversingHull::from_bytes(&bytes).unwrap().to_bytes()
        } else {
            SphericalHull::from_bytes(&bytes).unwrap().to_bytes()
        };
        assert_eq!(again, bytes, "{name}");
    }
}
