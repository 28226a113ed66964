use hullcache::fxtrig::{approx_cos, approx_sin, decode_normal, encode_normal, Q31Angle};
use hullcache::gjk::{
    closest_to_origin, gjk_query, gjk_query_traced, reference::closest_by_enumeration, GjkStatus,
    Pose, DEFAULT_MAX_ITER, DEFAULT_REL_TOL,
};
use hullcache::hull::{build_hull, sample_sphere, validate_topology, HullTopology, PointSet};
use hullcache::layouts::{audit_internally_connected, build_internally_connected};
use hullcache::support::{support_hill_climb, support_naive, BackendSet, Direction, Method, Step};
use hullcache::{Mat3, Vec3};
use proptest::prelude::*;

/// Ellipsoid-ish cloud: sphere samples stretched per axis, shifted, with some
/// interior points mixed in.
fn cloud(n: usize, seed: u64, stretch: [f64; 3], shift: [f64; 3]) -> PointSet {
    let mut pts = sample_sphere(n, seed).unwrap().points;
    let interior = sample_sphere((n / 4).max(4), seed ^ 0x5eed).unwrap().points;
    pts.extend(interior.into_iter().map(|p| p * 0.5));
    let s = Vec3::from_array(stretch);
    let t = Vec3::from_array(shift);
    let pts = pts
        .into_iter()
        .map(|p| Vec3::new(p.x * s.x, p.y * s.y, p.z * s.z) + t)
        .collect();
    PointSet::new(pts, "cloud").unwrap()
}

fn hull_strategy() -> impl Strategy<Value = HullTopology> {
    (
        4usize..300,
        any::<u64>(),
        prop::array::uniform3(0.2f64..5.0),
        prop::array::uniform3(-10.0f64..10.0),
    )
        .prop_map(|(n, seed, stretch, shift)| build_hull(&cloud(n, seed, stretch, shift)).unwrap())
}

fn direction() -> impl Strategy<Value = Direction> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("nonzero", |a| a.iter().any(|&c| c.abs() > 1e-3))
        .prop_map(|a| Direction::new(Vec3::from_array(a)).unwrap())
}

fn rotation() -> impl Strategy<Value = Mat3> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("nonzero", |q| q.iter().map(|c| c * c).sum::<f64>() > 1e-2)
        .prop_map(|[w, x, y, z]| Mat3::from_quaternion(w, x, y, z))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_is_valid_and_deterministic(n in 4usize..400, seed in any::<u64>()) {
        let ps = cloud(n, seed, [1.0, 2.0, 0.5], [3.0, -1.0, 0.0]);
        let a = build_hull(&ps).unwrap();
        let b = build_hull(&ps).unwrap();
        prop_assert_eq!(&a.vertices, &b.vertices);
        prop_assert_eq!(&a.faces, &b.faces);
        let report = validate_topology(&a);
        prop_assert!(report.all_passed(), "{}", report);
        prop_assert_eq!(2 * a.edge_count(), 3 * a.face_count());
    }

    #[test]
    fn hull_preserves_support_function(n in 4usize..300, seed in any::<u64>(), dirs in prop::collection::vec(direction(), 20)) {
        let ps = cloud(n, seed, [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]);
        let h = build_hull(&ps).unwrap();
        for d in dirs {
            let hull_max = support_naive(&h, &d).support_value;
            let cloud_max = ps.points.iter().map(|p| d.vec().dot(*p)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((hull_max - cloud_max).abs() <= 1e-9, "{} vs {}", hull_max, cloud_max);
        }
    }

    #[test]
    fn packed_neighbors_cover_true_adjacency(h in hull_strategy()) {
        let ic = build_internally_connected(&h, 0.2).unwrap();
        let report = audit_internally_connected(&ic, &h);
        prop_assert!(report.all_passed(), "{}", report);
        for v in 0..h.vertex_count() {
            let stored = ic.combined_neighbors(v);
            for &n in &h.adjacency[v] {
                prop_assert!(stored.contains(&(n as u16)));
            }
        }
    }

    #[test]
    fn layouts_rebuild_bit_identically(h in hull_strategy()) {
        let a = BackendSet::build(&h).unwrap();
        let b = BackendSet::build(&h).unwrap();
        prop_assert_eq!(a.internally_connected.to_bytes(), b.internally_connected.to_bytes());
        prop_assert_eq!(a.face_traversing.to_bytes(), b.face_traversing.to_bytes());
        prop_assert_eq!(a.spherical.to_bytes(), b.spherical.to_bytes());
    }

    #[test]
    fn every_backend_matches_oracle(h in hull_strategy(), dirs in prop::collection::vec(direction(), 32)) {
        let set = BackendSet::build(&h).unwrap();
        for d in &dirs {
            let want = support_naive(&h, d).support_value;
            for m in Method::ALL {
                let got = set.get(m).support(d);
                prop_assert!(close(got.support_value, want, 1e-12), "{}: {} vs {}", m, got.support_value, want);
                prop_assert_eq!(d.vec().dot(got.point), got.support_value);
            }
        }
    }

    #[test]
    fn climbs_are_monotone_and_bounded(h in hull_strategy(), d in direction()) {
        let set = BackendSet::build(&h).unwrap();
        let (v, f) = (h.vertex_count(), h.face_count());
        for m in Method::ALL.into_iter().filter(|m| m.is_climbing()) {
            let mut trace = Vec::new();
            let r = set.get(m).support_traced(&d, &mut trace);
            let mut last_vertex = f64::NEG_INFINITY;
            let mut last_face = f64::NEG_INFINITY;
            for s in &trace {
                match *s {
                    Step::Vertex { value, .. } => {
                        prop_assert!(value > last_vertex);
                        last_vertex = value;
                    }
                    Step::Face { value, .. } => {
                        prop_assert!(last_vertex == f64::NEG_INFINITY, "faces come before vertices");
                        prop_assert!(value > last_face);
                        last_face = value;
                    }
                }
            }
            prop_assert!(r.stats.vertex_visits >= 1);
            prop_assert!(r.stats.vertex_visits as usize <= v);
            prop_assert!(r.stats.face_visits as usize <= f);
            // A terminated climb is a global maximum.
            let best = support_naive(&h, &d).support_value;
            prop_assert!(r.support_value >= best);
        }
    }

    #[test]
    fn selected_vertex_is_scale_invariant(h in hull_strategy(), d in direction(), k in 1e-6f64..1e6) {
        let set = BackendSet::build(&h).unwrap();
        let scaled = Direction::new(d.vec() * k).unwrap();
        let unit = d.vec() / d.vec().norm();
        for m in Method::ALL {
            let a = set.get(m).support(&d);
            let b = set.get(m).support(&scaled);
            prop_assert!(close(unit.dot(a.point), unit.dot(b.point), 1e-12));
        }
    }

    #[test]
    fn hill_climb_from_any_start(h in hull_strategy(), d in direction(), start in any::<prop::sample::Index>()) {
        let s = start.index(h.vertex_count());
        let r = support_hill_climb(&h, &d, s).unwrap();
        prop_assert_eq!(r.support_value, support_naive(&h, &d).support_value);
    }

    #[test]
    fn approx_sin_bounds(raw in any::<i32>()) {
        let x = Q31Angle(raw);
        let s = approx_sin(x);
        prop_assert!((s - x.to_radians().sin()).abs() <= 0.06);
        prop_assert!(s.abs() <= 1.0);
        if raw != i32::MIN {
            prop_assert_eq!(approx_sin(-x), -s);
        }
        let full_turn = Q31Angle::from_radians(2.0 * std::f64::consts::PI).unwrap();
        prop_assert_eq!(full_turn, Q31Angle::ZERO);
        prop_assert_eq!(approx_sin(x + full_turn).to_bits(), s.to_bits());
        prop_assert_eq!(approx_cos(x).to_bits(), approx_sin(x + Q31Angle::HALF_PI).to_bits());
    }

    #[test]
    fn decoded_normals_stay_close(d in direction()) {
        let n = d.vec() / d.vec().norm();
        let (az, el) = encode_normal(n).unwrap();
        prop_assert!(decode_normal(az, el).angle_to(n) <= 0.15);
    }

    #[test]
    fn signed_volumes_matches_enumeration(pts in prop::collection::vec(prop::array::uniform3(-3.0f64..3.0), 1..=4)) {
        let pts: Vec<Vec3> = pts.into_iter().map(Vec3::from_array).collect();
        let r = closest_to_origin(&pts);
        prop_assert!((r.closest - closest_by_enumeration(&pts)).norm() <= 1e-9);
        let sum: f64 = r.weights[..r.len].iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(r.weights[..r.len].iter().all(|&w| w >= 0.0));
    }
}

fn sphere_backends(n: usize, seed: u64) -> (HullTopology, BackendSet) {
    let h = build_hull(&sample_sphere(n, seed).unwrap()).unwrap();
    let set = BackendSet::build(&h).unwrap();
    (h, set)
}

/// True when `p` (world) lies on the boundary of `h` placed at `pose`.
fn on_boundary(h: &HullTopology, pose: &Pose, p: Vec3) -> bool {
    let local = pose.rotation().transpose_mul_vec(p - pose.translation());
    let tol = 1e-7 * h.bounding_sphere.radius;
    let mut on_some = false;
    for f in 0..h.face_count() {
        let dist = h.face_normals[f].dot(local - h.vertices[h.faces[f][0] as usize]);
        if dist > tol {
            return false;
        }
        on_some |= dist.abs() <= tol;
    }
    on_some
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gjk_properties(
        seed in any::<u64>(),
        ra in rotation(),
        rb in rotation(),
        offset in prop::array::uniform3(-4.0f64..4.0),
        shift in prop::array::uniform3(-50.0f64..50.0),
    ) {
        let (ha, a) = sphere_backends(200, seed);
        let (hb, b) = sphere_backends(150, seed.wrapping_add(1));
        let pa = Pose::new(ra, Vec3::ZERO).unwrap();
        let pb = Pose::new(rb, Vec3::from_array(offset)).unwrap();

        let base = gjk_query(&a.naive, &pa, &b.naive, &pb, DEFAULT_REL_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(base.converged);

        let rev = gjk_query(&b.naive, &pb, &a.naive, &pa, DEFAULT_REL_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert_eq!(rev.status, base.status);
        prop_assert!((rev.distance - base.distance).abs() <= 1e-9);

        let t = Vec3::from_array(shift);
        let moved = gjk_query(&a.naive, &pa.translated(t), &b.naive, &pb.translated(t), DEFAULT_REL_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert_eq!(moved.status, base.status);
        prop_assert!((moved.distance - base.distance).abs() <= 1e-9);

        for m in Method::ALL {
            let (r, bounds) = gjk_query_traced(a.get(m), &pa, b.get(m), &pb, DEFAULT_REL_TOL, DEFAULT_MAX_ITER).unwrap();
            prop_assert_eq!(r.status, base.status);
            prop_assert!((r.distance - base.distance).abs() <= 1e-9, "{}: {} vs {}", m, r.distance, base.distance);
            for lb in bounds {
                prop_assert!(lb <= r.distance + 1e-12);
            }
        }

        if base.status == GjkStatus::Separated {
            prop_assert!((base.distance - (base.witness_a - base.witness_b).norm()).abs() <= 1e-9);
            prop_assert!(on_boundary(&ha, &pa, base.witness_a));
            prop_assert!(on_boundary(&hb, &pb, base.witness_b));
        }
    }
}
