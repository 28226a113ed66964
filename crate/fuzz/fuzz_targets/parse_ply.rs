#![no_main]
use hullcache::hull::parse_ply;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ps) = parse_ply(data) {
        assert!(ps.points.iter().all(|p| p.is_finite()));
    }
});
