#![no_main]
use hullcache::hull::{build_hull, parse_obj};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ps) = parse_obj(data) {
        assert!(ps.points.iter().all(|p| p.is_finite()));
        if ps.len() <= 256 {
            let _ = build_hull(&ps);
        }
    }
});
