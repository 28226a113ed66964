//! Q1.31 fixed-point angles and a quadratic sine approximation.
//!
//! An angle is stored as `raw / 2^31` half-turns, so the full `i32` range
//! covers `[-pi, pi)` and two's-complement overflow is the same thing as
//! angular wrap-around.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::geom::Vec3;

const SCALE: f64 = 2147483648.0; // 2^31

/// Fixed-point angle in units of pi, wrapping modulo a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(transparent)]
pub struct Q31Angle(pub i32);

impl Q31Angle {
    pub const ZERO: Q31Angle = Q31Angle(0);
    pub const HALF_PI: Q31Angle = Q31Angle(0x4000_0000);
    /// `-pi`, which is also `+pi`.
    pub const PI: Q31Angle = Q31Angle(i32::MIN);

    /// Encodes `theta` radians, wrapping into `[-pi, pi)`.
    pub fn from_radians(theta: f64) -> Result<Q31Angle> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "angle must be finite, got {theta}"
            )));
        }
        let half_turns = theta / PI;
        let wrapped = half_turns - 2.0 * ((half_turns + 1.0) * 0.5).floor();
        let raw = (wrapped * SCALE).round() as i64;
        // `raw` may round up to exactly 2^31, which wraps to -pi.
        Ok(Q31Angle(raw as u32 as i32))
    }

    /// Value in half-turns, in `[-1, 1)`.
    #[inline]
    pub fn half_turns(self) -> f64 {
        self.0 as f64 / SCALE
    }

    pub fn to_radians(self) -> f64 {
        self.half_turns() * PI
    }

    pub fn to_bits(self) -> u32 {
        self.0 as u32
    }

    pub fn from_bits(bits: u32) -> Self {
        Q31Angle(bits as i32)
    }
}

/// Encodes an angle in radians; same as [`Q31Angle::from_radians`].
pub fn q31_encode_angle(theta: f64) -> Result<Q31Angle> {
    Q31Angle::from_radians(theta)
}

impl Add for Q31Angle {
    type Output = Q31Angle;
    #[inline]
    fn add(self, o: Q31Angle) -> Q31Angle {
        Q31Angle(self.0.wrapping_add(o.0))
    }
}

impl Sub for Q31Angle {
    type Output = Q31Angle;
    #[inline]
    fn sub(self, o: Q31Angle) -> Q31Angle {
        Q31Angle(self.0.wrapping_sub(o.0))
    }
}

impl Neg for Q31Angle {
    type Output = Q31Angle;
    #[inline]
    fn neg(self) -> Q31Angle {
        Q31Angle(self.0.wrapping_neg())
    }
}

/// Parabolic sine: with `v = x / pi` in `[-1, 1)`, returns
/// `4 (v - sign(v) v^2)`. Exact at `v` in {-1, -1/2, 0, 1/2}; absolute error
/// elsewhere stays below 0.057.
#[inline]
pub fn approx_sin(x: Q31Angle) -> f64 {
    let v = x.half_turns();
    4.0 * (v - v * v.abs())
}

/// Cosine as the approximate sine of `x + pi/2` (wrapping).
#[inline]
pub fn approx_cos(x: Q31Angle) -> f64 {
    approx_sin(x + Q31Angle::HALF_PI)
}

/// Truncated Taylor series of sine about zero with `terms` terms.
pub fn taylor_sin(x: f64, terms: usize) -> f64 {
    assert!(terms >= 1, "taylor_sin needs at least one term");
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..terms {
        let k = k as f64;
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
    }
    sum
}

/// Spherical encoding of a unit normal: azimuth about +Z measured from +X,
/// elevation above the XY plane. At the poles the azimuth is pinned to 0.
pub fn encode_normal(n: Vec3) -> Result<(Q31Angle, Q31Angle)> {
    let len = n.norm();
    if !((len - 1.0).abs() <= 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "normal must be unit length, got length {len}"
        )));
    }
    let z = n.z.clamp(-1.0, 1.0);
    let elevation = Q31Angle::from_radians(z.asin())?;
    let azimuth = if z.abs() > 1.0 - 1e-12 {
        Q31Angle::ZERO
    } else {
        Q31Angle::from_radians(n.y.atan2(n.x))?
    };
    Ok((azimuth, elevation))
}

/// Approximate inverse of [`encode_normal`] using only the parabolic
/// sine; the result is close to, not exactly, unit length.
#[inline]
pub fn decode_normal(azimuth: Q31Angle, elevation: Q31Angle) -> Vec3 {
    let ce = approx_cos(elevation);
    Vec3::new(
        ce * approx_cos(azimuth),
        ce * approx_sin(azimuth),
        approx_sin(elevation),
    )
}

/// Exact decode using platform trigonometry, for error measurements.
pub fn decode_normal_exact(azimuth: Q31Angle, elevation: Q31Angle) -> Vec3 {
    let (sa, ca) = azimuth.to_radians().sin_cos();
    let (se, ce) = elevation.to_radians().sin_cos();
    Vec3::new(ce * ca, ce * sa, se)
}
