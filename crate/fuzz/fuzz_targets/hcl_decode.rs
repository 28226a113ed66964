#![no_main]
use hullcache::layouts::{
    decode_sections, FaceTraversingHull, InternallyConnectedHull, SphericalHull,
};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_sections(data);
    // A stream that decodes must re-encode to the same bytes.
    if let Ok(h) = InternallyConnectedHull::from_bytes(data) {
        let b = h.to_bytes();
        assert_eq!(
            InternallyConnectedHull::from_bytes(&b).unwrap().to_bytes(),
            b
        );
    }
    if let Ok(h) = FaceTraversingHull::from_bytes(data) {
        let b = h.to_bytes();
        assert_eq!(FaceTraversingHull::from_bytes(&b).unwrap().to_bytes(), b);
    }
    if let Ok(h) = SphericalHull::from_bytes(data) {
        let b = h.to_bytes();
        assert_eq!(SphericalHull::from_bytes(&b).unwrap().to_bytes(), b);
    }
});
