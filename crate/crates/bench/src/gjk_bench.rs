use std::hint::black_box;

use hullcache::gjk::{gjk_query, GjkResult, Pose, DEFAULT_MAX_ITER, DEFAULT_REL_TOL};
use hullcache::hull::{build_hull, sample_sphere};
use hullcache::support::{Method, SupportMap};
use hullcache::{Mat3, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::backends::{Backends, Counting};
use crate::config::{BenchConfig, Scenario};
use crate::error::{BenchError, Result};
use crate::record::{write_records, BenchRecord};
use crate::timing::time_batches;

/// Center distance between the two unit-radius hulls.
pub fn scenario_distance(s: Scenario) -> Option<f64> {
    match s {
        Scenario::GjkColliding => Some(1.0),
        Scenario::GjkClose => Some(2.01),
        Scenario::GjkDistant => Some(6.0),
        _ => None,
    }
}

/// Distances snapped to a 1e-9 grid. Backends may return different vertices
/// on exact dot ties, which moves the converged distance by a few ulps; the
/// grid makes the checksum identical across methods.
fn quantize(d: f64) -> f64 {
    (d * 1e9).round() / 1e9
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut *rng));
        if q.iter().map(|c| c * c).sum::<f64>() > 1e-6 {
            return Mat3::from_quaternion(q[0], q[1], q[2], q[3]);
        }
    }
}

/// Seeded pose pairs: both shapes randomly rotated, B's center `distance`
/// along +X from A's.
pub fn place_pair(count: usize, distance: f64, seed: u64) -> Vec<(Pose, Pose)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = Pose::new(random_rotation(&mut rng), Vec3::ZERO).expect("valid rotation");
            let b = Pose::new(random_rotation(&mut rng), Vec3::new(distance, 0.0, 0.0))
                .expect("valid rotation");
            (a, b)
        })
        .collect()
}

fn query<A: SupportMap + ?Sized, B: SupportMap + ?Sized>(
    a: &A,
    b: &B,
    p: &(Pose, Pose),
) -> GjkResult {
    gjk_query(a, &p.0, b, &p.1, DEFAULT_REL_TOL, DEFAULT_MAX_ITER)
        .expect("default parameters are valid")
}

fn time_pair<S: SupportMap>(
    a: &S,
    b: &S,
    poses: &[(Pose, Pose)],
    cfg: &BenchConfig,
) -> crate::timing::Timing {
    time_batches(
        || {
            let mut acc = 0.0;
            for p in poses {
                acc += query(black_box(a), black_box(b), black_box(p)).distance;
            }
            acc
        },
        cfg.warmup_iters,
        cfg.measure_iters,
        poses.len(),
    )
}

/// GJK benchmark between two sphere hulls per size, one row per method.
/// Methods are checked against the brute-force backend before timing.
pub fn run_gjk_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let distance = scenario_distance(cfg.scenario)
        .ok_or_else(|| BenchError::Config(format!("{} is not a GJK scenario", cfg.scenario)))?;
    let scenario = cfg.scenario.key();
    let mut rows = Vec::new();
    for &size in &cfg.hull_sizes {
        let ha = build_hull(&sample_sphere(size, cfg.seed)?)?;
        let hb = build_hull(&sample_sphere(size, cfg.seed.wrapping_add(1))?)?;
        let (a, b) = (Backends::build(&ha)?, Backends::build(&hb)?);
        let poses = place_pair(
            cfg.directions_per_hull,
            distance,
            cfg.seed ^ (size as u64).rotate_left(17) ^ distance.to_bits(),
        );
        let oracle: Vec<GjkResult> = poses.iter().map(|p| query(&a.naive, &b.naive, p)).collect();

        for &m in &cfg.methods {
            let (Some(sa), Some(sb)) = (a.get(m), b.get(m)) else {
                eprintln!(
                    "warning: {m} skipped for hull size {size}: face count exceeds 16-bit capacity"
                );
                rows.push(BenchRecord::skipped(m.key(), size, scenario));
                continue;
            };
            let (ca, cb) = (Counting::new(sa), Counting::new(sb));
            let mut checksum = 0.0;
            for (p, want) in poses.iter().zip(&oracle) {
                let r = query(&ca, &cb, p);
                if r.status != want.status || (r.distance - want.distance).abs() > 1e-9 {
                    return Err(BenchError::OracleMismatch {
                        method: m.key().to_string(),
                        hull_size: size,
                        detail: format!("{r:?} vs {want:?}"),
                    });
                }
                checksum += quantize(r.distance);
            }
            let n = poses.len() as f64;
            let vv = (ca.vertex_visits.get() + cb.vertex_visits.get()) as f64 / n;
            let fv = (ca.face_visits.get() + cb.face_visits.get()) as f64 / n;

            let t = match m {
                Method::Naive => time_pair(&a.naive, &b.naive, &poses, cfg),
                Method::HillClimb => time_pair(&a.hill_climb, &b.hill_climb, &poses, cfg),
                Method::InternallyConnected => time_pair(
                    &a.internally_connected,
                    &b.internally_connected,
                    &poses,
                    cfg,
                ),
                Method::FaceTraversing => time_pair(
                    a.face_traversing.as_ref().expect("checked"),
                    b.face_traversing.as_ref().expect("checked"),
                    &poses,
                    cfg,
                ),
                Method::Spherical => time_pair(
                    a.spherical.as_ref().expect("checked"),
                    b.spherical.as_ref().expect("checked"),
                    &poses,
                    cfg,
                ),
            };
            rows.push(BenchRecord {
                method: m.key().to_string(),
                hull_size: size,
                scenario: scenario.to_string(),
                median_ns: Some(t.median_ns),
                mean_ns: Some(t.mean_ns),
                p99_ns: Some(t.p99_ns),
                mean_vertex_visits: Some(vv),
                mean_face_visits: Some(fv),
                checksum: Some(checksum),
            });
        }
    }
    if let Some(p) = &cfg.output_path {
        write_records(&rows, Some(p))?;
    }
    Ok(rows)
}
