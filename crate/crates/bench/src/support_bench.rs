use std::hint::black_box;

use hullcache::hull::{build_hull, load_mesh, sample_sphere, HullTopology, PointSet};
use hullcache::support::{support_naive, Direction, Method, SupportMap};
use hullcache::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::backends::Backends;
use crate::config::BenchConfig;
use crate::error::{BenchError, Result};
use crate::record::{write_records, BenchRecord};
use crate::timing::{time_batches, Timing};

/// Seeded unit directions, uniform on the sphere.
pub fn unit_directions(count: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = hullcache::Vec3::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        );
        if let Some(u) = v.try_normalize() {
            out.push(Direction::new(u).expect("unit vector"));
        }
    }
    out
}

fn direction_seed(seed: u64, size: usize) -> u64 {
    seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn time_support<S: SupportMap>(s: &S, dirs: &[Direction], warmup: usize, iters: usize) -> Timing {
    time_batches(
        || {
            let mut acc = 0.0;
            for d in dirs {
                acc += black_box(s).support(black_box(d)).support_value;
            }
            acc
        },
        warmup,
        iters,
        dirs.len(),
    )
}

/// Times one method of `b` over `dirs`; `None` if the method is not built.
pub fn time_method(
    b: &Backends,
    m: Method,
    dirs: &[Direction],
    w: usize,
    n: usize,
) -> Option<Timing> {
    Some(match m {
        Method::Naive => time_support(&b.naive, dirs, w, n),
        Method::HillClimb => time_support(&b.hill_climb, dirs, w, n),
        Method::InternallyConnected => time_support(&b.internally_connected, dirs, w, n),
        Method::FaceTraversing => time_support(b.face_traversing.as_ref()?, dirs, w, n),
        Method::Spherical => time_support(b.spherical.as_ref()?, dirs, w, n),
    })
}

/// Verifies every selected method against the oracle on `dirs`, then times
/// them. Returns one row per method.
pub fn bench_hull(
    hull: &HullTopology,
    scenario: &str,
    dirs: &[Direction],
    cfg: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    let size = hull.vertex_count();
    let backends = Backends::build(hull)?;
    let oracle: Vec<f64> = dirs
        .iter()
        .map(|d| support_naive(hull, d).support_value)
        .collect();

    let mut verified = Vec::new();
    for &m in &cfg.methods {
        let Some(b) = backends.get(m) else {
            verified.push((m, None));
            continue;
        };
        let (mut checksum, mut vv, mut fv) = (0.0, 0u64, 0u64);
        for (d, &want) in dirs.iter().zip(&oracle) {
            let r = b.support(d);
            if r.support_value != want {
                return Err(BenchError::OracleMismatch {
                    method: m.key().to_string(),
                    hull_size: size,
                    detail: format!("direction {:?}: {} vs {}", d.vec(), r.support_value, want),
                });
            }
            checksum += r.support_value;
            vv += u64::from(r.stats.vertex_visits);
            fv += u64::from(r.stats.face_visits);
        }
        let n = dirs.len() as f64;
        verified.push((m, Some((checksum, vv as f64 / n, fv as f64 / n))));
    }

    let mut rows = Vec::new();
    for (m, stats) in verified {
        let Some((checksum, vv, fv)) = stats else {
            eprintln!(
                "warning: {m} skipped for hull size {size}: face count exceeds 16-bit capacity"
            );
            rows.push(BenchRecord::skipped(m.key(), size, scenario));
            continue;
        };
        let t = time_method(&backends, m, dirs, cfg.warmup_iters, cfg.measure_iters)
            .expect("method was built");
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
    Ok(rows)
}

/// Support-query benchmark on sphere hulls of each configured size.
pub fn run_support_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &size in &cfg.hull_sizes {
        let hull = build_hull(&sample_sphere(size, cfg.seed)?)?;
        let dirs = unit_directions(cfg.directions_per_hull, direction_seed(cfg.seed, size));
        rows.extend(bench_hull(&hull, "support", &dirs, cfg)?);
    }
    if let Some(p) = &cfg.output_path {
        write_records(&rows, Some(p))?;
    }
    Ok(rows)
}

/// Support-query benchmark on hulls of user-supplied meshes. All meshes are
/// loaded before any timing starts.
pub fn run_mesh_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    if cfg.mesh_paths.is_empty() {
        return Err(BenchError::Config(
            "mesh-bench needs at least one mesh".into(),
        ));
    }
    let meshes: Vec<PointSet> = cfg
        .mesh_paths
        .iter()
        .map(load_mesh)
        .collect::<hullcache::Result<_>>()?;
    let mut rows = Vec::new();
    for mesh in &meshes {
        let scenario = format!("mesh:{}", mesh.source_label);
        let hull = match build_hull(mesh) {
            Ok(h) => h,
            Err(Error::CapacityExceeded(msg)) => {
                eprintln!("warning: {scenario} skipped: {msg}");
                rows.push(BenchRecord::skipped("skipped", mesh.len(), &scenario));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let dirs = unit_directions(
            cfg.directions_per_hull,
            direction_seed(cfg.seed, hull.vertex_count()),
        );
        rows.extend(bench_hull(&hull, &scenario, &dirs, cfg)?);
    }
    if let Some(p) = &cfg.output_path {
        write_records(&rows, Some(p))?;
    }
    Ok(rows)
}
