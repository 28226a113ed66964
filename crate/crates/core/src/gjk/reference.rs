//! Exhaustive closest-point computation used to check the Signed Volumes
//! sub-algorithm: project the origin onto the affine hull of every subset of
//! the simplex and keep the nearest projection that lands inside.

use crate::geom::Vec3;

/// Closest point to the origin on the convex hull of 1 to 4 points, by
/// enumerating all vertices, edges, faces and the interior.
pub fn closest_by_enumeration(pts: &[Vec3]) -> Vec3 {
    assert!((1..=4).contains(&pts.len()), "need 1 to 4 points");
    let mut best = pts[0];
    for mask in 1u32..(1 << pts.len()) {
        let sub: Vec<Vec3> = (0..pts.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| pts[i])
            .collect();
        if let Some(p) = project_inside(&sub) {
            if p.norm_squared() < best.norm_squared() {
                best = p;
            }
        }
    }
    best
}

/// Minimizes `|sum l_i p_i|^2` subject to `sum l_i = 1`; returns the point if
/// all weights are nonnegative and the system is well conditioned.
fn project_inside(p: &[Vec3]) -> Option<Vec3> {
    let n = p.len();
    if n == 1 {
        return Some(p[0]);
    }
    // KKT system: [G 1; 1^T 0] [l; mu] = [0; 1].
    let m = n + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = p[i].dot(p[j]);
        }
        a[i][n] = 1.0;
        a[n][i] = 1.0;
    }
    a[n][m] = 1.0;
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot = a[col].clone();
                for (x, p) in a[r][col..=m].iter_mut().zip(&pivot[col..=m]) {
                    *x -= f * p;
                }
            }
        }
    }
    let l: Vec<f64> = (0..n).map(|i| a[i][m] / a[i][i]).collect();
    if l.iter().any(|&w| w < -1e-12) {
        return None;
    }
    Some(p.iter().zip(&l).fold(Vec3::ZERO, |s, (&q, &w)| s + q * w))
}
