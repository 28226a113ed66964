//! Signed Volumes distance sub-algorithm: closest point to the origin on a
//! simplex of one to four points, and the smallest sub-simplex supporting it.

use crate::geom::Vec3;

/// Relative threshold on squared lengths, areas and volumes below which a
/// sub-simplex is treated as degenerate.
const DEGENERATE: f64 = 1e-20;

/// Result of the sub-algorithm over a list of at most four points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub closest: Vec3,
    /// Number of supporting points, 1 to 4.
    pub len: usize,
    /// Positions of the supporting points in the input.
    pub indices: [usize; 4],
    /// Barycentric weights of the supporting points, nonnegative, summing to 1.
    pub weights: [f64; 4],
}

impl Reduction {
    fn vertex(i: usize, p: Vec3) -> Reduction {
        Reduction {
            closest: p,
            len: 1,
            indices: [i, 0, 0, 0],
            weights: [1.0, 0.0, 0.0, 0.0],
        }
    }

    fn with_weights(pts: &[Vec3], idx: &[usize], w: &[f64]) -> Reduction {
        let mut r = Reduction {
            closest: Vec3::ZERO,
            len: idx.len(),
            indices: [0; 4],
            weights: [0.0; 4],
        };
        for (k, (&i, &l)) in idx.iter().zip(w).enumerate() {
            r.indices[k] = i;
            r.weights[k] = l;
            r.closest += pts[i] * l;
        }
        r
    }
}

#[inline]
fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

fn scale_of(pts: &[Vec3], idx: &[usize]) -> f64 {
    idx.iter()
        .map(|&i| pts[i].abs())
        .fold(0.0f64, |m, a| m.max(a.x).max(a.y).max(a.z))
        .max(f64::MIN_POSITIVE)
}

/// Closest point to the origin on the convex hull of `pts` (1 to 4 points).
/// Degenerate input is reduced in dimension rather than rejected.
pub fn closest_to_origin(pts: &[Vec3]) -> Reduction {
    match pts.len() {
        1 => Reduction::vertex(0, pts[0]),
        2 => s1d(pts, [0, 1]),
        3 => s2d(pts, [0, 1, 2]),
        4 => s3d(pts),
        n => panic!("simplex must have 1 to 4 points, got {n}"),
    }
}

fn closer(a: Reduction, b: Reduction) -> Reduction {
    if b.closest.norm_squared() < a.closest.norm_squared() {
        b
    } else {
        a
    }
}

fn s1d(pts: &[Vec3], [i, j]: [usize; 2]) -> Reduction {
    let (a, b) = (pts[i], pts[j]);
    let t = b - a;
    let tt = t.norm_squared();
    let scale = scale_of(pts, &[i, j]);
    if tt <= DEGENERATE * scale * scale {
        return closer(Reduction::vertex(i, a), Reduction::vertex(j, b));
    }
    let p0 = a - t * (a.dot(t) / tt);
    // 1D signed lengths along the axis where the segment is longest.
    let m = t.abs();
    let ax = if m.x >= m.y && m.x >= m.z {
        0
    } else if m.y >= m.z {
        1
    } else {
        2
    };
    let mu = a[ax] - b[ax];
    let c = [p0[ax] - b[ax], a[ax] - p0[ax]];
    if same_sign(mu, c[0]) && same_sign(mu, c[1]) {
        Reduction::with_weights(pts, &[i, j], &[c[0] / mu, c[1] / mu])
    } else if same_sign(mu, c[0]) {
        Reduction::vertex(i, a)
    } else {
        Reduction::vertex(j, b)
    }
}

fn s2d(pts: &[Vec3], idx: [usize; 3]) -> Reduction {
    let [s1, s2, s3] = idx.map(|i| pts[i]);
    let n = (s2 - s1).cross(s3 - s1);
    let nn = n.norm_squared();
    let scale = scale_of(pts, &idx);
    let edges = [[idx[1], idx[2]], [idx[0], idx[2]], [idx[0], idx[1]]];

    let best_edge = |skip: [bool; 3]| {
        let mut best: Option<Reduction> = None;
        for (k, e) in edges.iter().enumerate() {
            if skip[k] {
                continue;
            }
            let r = s1d(pts, *e);
            best = Some(match best {
                Some(b) => closer(b, r),
                None => r,
            });
        }
        best.expect("at least one edge is tested")
    };

    if nn <= DEGENERATE * scale.powi(4) {
        return best_edge([false; 3]);
    }

    let p0 = n * (n.dot(s1) / nn);
    // Project onto the coordinate plane with the largest triangle area.
    let m = n.abs();
    let (x, y) = if m.x >= m.y && m.x >= m.z {
        (1, 2)
    } else if m.y >= m.z {
        (2, 0)
    } else {
        (0, 1)
    };
    let area =
        |a: Vec3, b: Vec3, c: Vec3| (b[x] - a[x]) * (c[y] - a[y]) - (c[x] - a[x]) * (b[y] - a[y]);
    let mu = area(s1, s2, s3);
    let c = [area(p0, s2, s3), area(s1, p0, s3), area(s1, s2, p0)];
    let inside = [
        same_sign(mu, c[0]),
        same_sign(mu, c[1]),
        same_sign(mu, c[2]),
    ];
    if inside.iter().all(|&s| s) {
        return Reduction::with_weights(pts, &idx, &[c[0] / mu, c[1] / mu, c[2] / mu]);
    }
    // Only edges opposite a vertex with a non-positive weight can hold the
    // closest point.
    best_edge(inside)
}

fn s3d(pts: &[Vec3]) -> Reduction {
    let [s1, s2, s3, s4] = [pts[0], pts[1], pts[2], pts[3]];
    let vol = |a: Vec3, b: Vec3, c: Vec3, d: Vec3| (b - a).dot((c - a).cross(d - a));
    let det = vol(s1, s2, s3, s4);
    // c[k] is the signed volume with the origin replacing vertex k.
    let o = Vec3::ZERO;
    let c = [
        vol(o, s2, s3, s4),
        vol(s1, o, s3, s4),
        vol(s1, s2, o, s4),
        vol(s1, s2, s3, o),
    ];
    let scale = scale_of(pts, &[0, 1, 2, 3]);
    let faces = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

    let best_face = |skip: [bool; 4]| {
        let mut best: Option<Reduction> = None;
        for (k, f) in faces.iter().enumerate() {
            if skip[k] {
                continue;
            }
            let r = s2d(pts, *f);
            best = Some(match best {
                Some(b) => closer(b, r),
                None => r,
            });
        }
        best.expect("at least one face is tested")
    };

    if det * det <= DEGENERATE * scale.powi(6) {
        return best_face([false; 4]);
    }
    let inside = c.map(|v| same_sign(det, v));
    if inside.iter().all(|&s| s) {
        return Reduction::with_weights(
            pts,
            &[0, 1, 2, 3],
            &[c[0] / det, c[1] / det, c[2] / det, c[3] / det],
        );
    }
    best_face(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let r = closest_to_origin(&[Vec3::new(1.0, 2.0, 3.0)]);
        assert_eq!(r.closest, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!((r.len, r.weights[0]), (1, 1.0));
    }

    #[test]
    fn segment_foot() {
        let r = closest_to_origin(&[Vec3::new(-1.0, -1.0, 0.0), Vec3::new(1.0, -1.0, 0.0)]);
        assert_eq!(r.closest, Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(r.len, 2);
        assert_eq!(&r.weights[..2], &[0.5, 0.5]);
    }

    #[test]
    fn segment_endpoint() {
        let r = closest_to_origin(&[Vec3::new(1.0, 0.0, 0.0), Vec3::new(3.0, 1.0, 0.0)]);
        assert_eq!((r.len, r.indices[0]), (1, 0));
    }

    #[test]
    fn duplicate_points_reduce() {
        let p = Vec3::new(1.0, 1.0, 1.0);
        let r = closest_to_origin(&[p, p, p, p]);
        assert_eq!(r.len, 1);
        assert_eq!(r.closest, p);
    }

    #[test]
    fn triangle_interior() {
        let r = closest_to_origin(&[
            Vec3::new(-1.0, -1.0, 2.0),
            Vec3::new(1.0, -1.0, 2.0),
            Vec3::new(0.0, 1.0, 2.0),
        ]);
        assert_eq!(r.len, 3);
        assert!((r.closest - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-15);
        let sum: f64 = r.weights[..3].iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_containing_origin() {
        let r = closest_to_origin(&[
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(-1.0, -1.0, 1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(1.0, -1.0, -1.0),
        ]);
        assert_eq!(r.len, 4);
        assert!(r.closest.norm() < 1e-15);
        for w in r.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_tetrahedron_falls_back_to_faces() {
        let r = closest_to_origin(&[
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
        ]);
        assert!(r.len <= 3);
        assert_eq!(r.closest, Vec3::new(0.0, 0.0, 1.0));
    }
}
