//! Self-check suites run by the `verify` subcommand.

use std::f64::consts::PI;
use std::fmt;
use std::mem::size_of;

use hullcache::fxtrig::{
    approx_cos, approx_sin, decode_normal, encode_normal, taylor_sin, Q31Angle,
};
use hullcache::gjk::{
    closest_to_origin, gjk_query, reference::closest_by_enumeration, GjkStatus, Pose,
    DEFAULT_MAX_ITER, DEFAULT_REL_TOL,
};
use hullcache::hull::{build_hull, sample_sphere, validate_topology, HullTopology, PointSet};
use hullcache::layouts::{
    audit_internally_connected, CachePool, ExtensionRecord, FaceTraversingHull,
    InternallyConnectedHull, PackedFaceRecord, PackedVertexRecord, SphericalFaceRecord,
    SphericalHull, CACHE_LINE,
};
use hullcache::support::{support_naive, BackendSet, Direction, Method};
use hullcache::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::BenchConfig;
use crate::gjk_bench::place_pair;
use crate::support_bench::unit_directions;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Overwrites one true neighbor of vertex 0 in the first hull's packed
    /// pool, which the neighbor-superset suite must catch.
    pub inject_neighbor_corruption: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn get(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    fn push(&mut self, name: &'static str, failures: Vec<String>, ok_detail: String) {
        let passed = failures.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            failures.join("; ")
        };
        self.suites.push(SuiteResult {
            name,
            passed,
            detail,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            let tag = if s.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", s.name, s.detail)?;
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        write!(f, "{} suites, {failed} failed", self.suites.len())
    }
}

struct Fixture {
    size: usize,
    hull: HullTopology,
    set: BackendSet,
    dirs: Vec<Direction>,
}

/// Runs every suite. Failures are recorded in the report, never raised.
pub fn verify(cfg: &BenchConfig, opts: VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut fixtures = Vec::new();
    let mut build_failures = Vec::new();
    for &size in &cfg.hull_sizes {
        let built = sample_sphere(size, cfg.seed)
            .and_then(|ps| build_hull(&ps))
            .and_then(|h| BackendSet::build(&h).map(|set| (h, set)));
        match built {
            Ok((hull, set)) => fixtures.push(Fixture {
                size,
                hull,
                set,
                dirs: unit_directions(cfg.directions_per_hull, cfg.seed ^ size as u64),
            }),
            Err(hullcache::Error::CapacityExceeded(msg)) => {
                eprintln!("note: size {size} skipped: {msg}");
            }
            Err(e) => build_failures.push(format!("size {size}: {e}")),
        }
    }
    if opts.inject_neighbor_corruption {
        if let Some(fx) = fixtures.first_mut() {
            corrupt_first_vertex(&mut fx.set.internally_connected, &fx.hull);
        }
    }
    report.push(
        "build",
        build_failures,
        format!("{} hulls built", fixtures.len()),
    );

    layout_sizes(&mut report, &fixtures);
    hull_topology(&mut report, &fixtures);
    neighbor_superset(&mut report, &fixtures);
    oracle_equivalence(&mut report, &fixtures);
    visit_trend(&mut report, &fixtures);
    serialization(&mut report, &fixtures);
    trig_bounds(&mut report, cfg.seed);
    gjk_suite(&mut report, cfg.seed);
    report
}

fn corrupt_first_vertex(ic: &mut InternallyConnectedHull, hull: &HullTopology) {
    let mut recs = ic.vertices.to_vec();
    let true_first = hull.adjacency[0][0] as u16;
    let replacement = recs[0]
        .neighbors
        .iter()
        .copied()
        .find(|&n| n != true_first)
        .expect("vertex has several neighbors");
    for slot in recs[0].neighbors.iter_mut().filter(|s| **s == true_first) {
        *slot = replacement;
    }
    ic.vertices = CachePool::from_slice(&recs);
}

fn layout_sizes(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let mut fails = Vec::new();
    for (name, got, want) in [
        ("PackedVertexRecord", size_of::<PackedVertexRecord>(), 64),
        ("ExtensionRecord", size_of::<ExtensionRecord>(), 32),
        ("PackedFaceRecord", size_of::<PackedFaceRecord>(), 32),
        ("SphericalFaceRecord", size_of::<SphericalFaceRecord>(), 16),
    ] {
        if got != want {
            fails.push(format!("{name} is {got} bytes, expected {want}"));
        }
    }
    for fx in fixtures {
        let bases = [
            fx.set.internally_connected.vertices.base_address(),
            fx.set.internally_connected.extensions.base_address(),
            fx.set.face_traversing.faces.base_address(),
            fx.set.spherical.faces.base_address(),
        ];
        if bases.iter().any(|b| b % CACHE_LINE != 0) {
            fails.push(format!("size {}: pool not cache-line aligned", fx.size));
        }
    }
    report.push(
        "layout-sizes",
        fails,
        "64/32/32/16 bytes, pools 64-byte aligned".into(),
    );
}

fn hull_topology(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let fails = fixtures
        .iter()
        .filter_map(|fx| {
            let r = validate_topology(&fx.hull);
            (!r.all_passed()).then(|| {
                format!(
                    "size {}: {}",
                    fx.size,
                    r.failures().map(|c| c.name).collect::<Vec<_>>().join(", ")
                )
            })
        })
        .collect();
    report.push(
        "hull-topology",
        fails,
        format!("{} hulls valid", fixtures.len()),
    );
}

fn neighbor_superset(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let mut fails = Vec::new();
    for fx in fixtures {
        let r = audit_internally_connected(&fx.set.internally_connected, &fx.hull);
        for c in r.checks.iter().filter(|c| !c.passed) {
            fails.push(format!("size {}: {} ({})", fx.size, c.name, c.detail));
        }
    }
    report.push(
        "neighbor-superset",
        fails,
        "true adjacency stored for every vertex".into(),
    );
}

fn oracle_equivalence(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let mut fails = Vec::new();
    let mut checks = 0usize;
    let mut checksum_fails = Vec::new();
    for fx in fixtures {
        let mut sums = Vec::new();
        for m in Method::ALL {
            let b = fx.set.get(m);
            let mut sum = 0.0;
            let mut bad = 0usize;
            for d in &fx.dirs {
                let want = support_naive(&fx.hull, d).support_value;
                let got = b.support(d).support_value;
                if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
                    bad += 1;
                }
                sum += got;
                checks += 1;
            }
            if bad > 0 {
                fails.push(format!("size {} {m}: {bad} mismatches", fx.size));
            }
            sums.push(sum);
        }
        if sums.iter().any(|s| s.to_bits() != sums[0].to_bits()) {
            checksum_fails.push(format!("size {}: checksums {sums:?}", fx.size));
        }
    }
    report.push(
        "oracle-equivalence",
        fails,
        format!("{checks} queries agree with brute force"),
    );
    report.push(
        "checksum-equality",
        checksum_fails,
        "identical across methods".into(),
    );
}

fn mean_visits(fx: &Fixture, m: Method) -> f64 {
    let b = fx.set.get(m);
    let total: u64 = fx
        .dirs
        .iter()
        .map(|d| u64::from(b.support(d).stats.vertex_visits))
        .sum();
    total as f64 / fx.dirs.len() as f64
}

fn visit_trend(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    for fx in fixtures.iter().filter(|fx| fx.size >= 2048) {
        let ic = mean_visits(fx, Method::InternallyConnected);
        let hc = mean_visits(fx, Method::HillClimb);
        notes.push(format!("{}: {ic:.2} vs {hc:.2}", fx.size));
        if ic > hc {
            fails.push(format!(
                "size {}: internally-connected {ic:.2} > hill-climb {hc:.2}",
                fx.size
            ));
        }
    }
    if notes.is_empty() {
        notes.push("no sizes >= 2048 configured".into());
    }
    report.push("visit-trend", fails, notes.join(", "));
}

fn serialization(report: &mut VerifyReport, fixtures: &[Fixture]) {
    let mut fails = Vec::new();
    for fx in fixtures {
        let s = &fx.set;
        let ok = InternallyConnectedHull::from_bytes(&s.internally_connected.to_bytes()).ok()
            == Some(s.internally_connected.clone())
            && FaceTraversingHull::from_bytes(&s.face_traversing.to_bytes()).ok()
                == Some(s.face_traversing.clone())
            && SphericalHull::from_bytes(&s.spherical.to_bytes()).ok() == Some(s.spherical.clone());
        if !ok {
            fails.push(format!("size {}: round trip differs", fx.size));
        }
    }
    report.push(
        "serialization",
        fails,
        "layout pools round-trip exactly".into(),
    );
}

fn trig_bounds(report: &mut VerifyReport, seed: u64) {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    for _ in 0..1_000_000 {
        let x = Q31Angle(rng.random());
        max_err = max_err.max((approx_sin(x) - x.to_radians().sin()).abs());
        if approx_cos(x).to_bits() != approx_sin(x + Q31Angle::HALF_PI).to_bits() {
            fails.push(format!("cos shift mismatch at {:#x}", x.to_bits()));
            break;
        }
    }
    if max_err > 0.06 {
        fails.push(format!("max sine error {max_err}"));
    }
    for (raw, want) in [
        (i32::MIN, 0.0),
        (-0x4000_0000, -1.0),
        (0, 0.0),
        (0x4000_0000, 1.0),
    ] {
        if (approx_sin(Q31Angle(raw)) - want).abs() > 1e-12 {
            fails.push(format!("approx_sin not exact at {raw:#x}"));
        }
    }
    let taylor_err = (taylor_sin(PI, 3) - PI.sin()).abs();
    let approx_err = (approx_sin(Q31Angle::PI) - PI.sin()).abs();
    if !(taylor_err > 0.07 && approx_err <= 0.06) {
        fails.push(format!("taylor contrast: {taylor_err} vs {approx_err}"));
    }
    let mut max_angle = 0.0f64;
    for d in unit_directions(100_000, seed ^ 0xa11) {
        let n = d.vec();
        match encode_normal(n) {
            Ok((az, el)) => max_angle = max_angle.max(decode_normal(az, el).angle_to(n)),
            Err(e) => {
                fails.push(format!("encode failed: {e}"));
                break;
            }
        }
    }
    if max_angle > 0.15 {
        fails.push(format!("decoded normal error {max_angle} rad"));
    }
    report.push(
        "trig-bounds",
        fails,
        format!("sine error {max_err:.5}, taylor(pi,3) error {taylor_err:.4}, normal error {max_angle:.4} rad"),
    );
}

fn cube(offset: f64) -> BackendSet {
    let pts = (0..8)
        .map(|i| {
            Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)
                + Vec3::new(offset, 0.0, 0.0)
        })
        .collect();
    let h = build_hull(&PointSet::new(pts, "cube").expect("finite")).expect("cube hull");
    BackendSet::build(&h).expect("cube layouts")
}

fn gjk_suite(report: &mut VerifyReport, seed: u64) {
    let mut fails = Vec::new();
    let q = |a: &dyn hullcache::support::SupportMap,
             pa: &Pose,
             b: &dyn hullcache::support::SupportMap,
             pb: &Pose| {
        gjk_query(a, pa, b, pb, DEFAULT_REL_TOL, DEFAULT_MAX_ITER).expect("valid parameters")
    };

    let sphere = sample_sphere(2048, seed)
        .and_then(|p| build_hull(&p))
        .and_then(|h| BackendSet::build(&h));
    match sphere {
        Ok(s) => {
            let far = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0)).expect("finite");
            for m in Method::ALL {
                let r = q(s.get(m), &Pose::IDENTITY, s.get(m), &far);
                if r.status != GjkStatus::Separated || (r.distance - 1.0).abs() > 0.02 {
                    fails.push(format!("spheres {m}: {:?} {}", r.status, r.distance));
                }
            }
            for (i, (pa, pb)) in place_pair(20, 2.3, seed).iter().enumerate() {
                let ab = q(&s.naive, pa, &s.internally_connected, pb);
                let ba = q(&s.internally_connected, pb, &s.naive, pa);
                let t = Vec3::new(-7.0, 3.0, 11.0);
                let moved = q(
                    &s.naive,
                    &pa.translated(t),
                    &s.internally_connected,
                    &pb.translated(t),
                );
                if (ab.distance - ba.distance).abs() > 1e-9
                    || (ab.distance - moved.distance).abs() > 1e-9
                {
                    fails.push(format!(
                        "pose pair {i}: {} / {} / {}",
                        ab.distance, ba.distance, moved.distance
                    ));
                }
            }
        }
        Err(e) => fails.push(format!("sphere hull: {e}")),
    }

    let (c0, c_half, c2) = (cube(0.0), cube(0.5), cube(2.0));
    let hit = q(&c0.naive, &Pose::IDENTITY, &c_half.naive, &Pose::IDENTITY);
    if hit.status != GjkStatus::Intersecting {
        fails.push(format!("overlapping cubes reported {:?}", hit.status));
    }
    let gap = q(&c0.naive, &Pose::IDENTITY, &c2.naive, &Pose::IDENTITY);
    if gap.status != GjkStatus::Separated || (gap.distance - 1.0).abs() > 1e-9 {
        fails.push(format!(
            "separated cubes: {:?} {}",
            gap.status, gap.distance
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let pts: Vec<Vec3> = (0..4)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                )
            })
            .collect();
        worst = worst.max((closest_to_origin(&pts).closest - closest_by_enumeration(&pts)).norm());
    }
    if worst > 1e-9 {
        fails.push(format!(
            "signed volumes off by {worst:e} on random tetrahedra"
        ));
    }
    report.push(
        "gjk",
        fails,
        format!("sphere, cube and tetrahedron checks pass (worst simplex error {worst:.1e})"),
    );
}
