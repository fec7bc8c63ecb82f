//! The Schwarz–Christoffel map `F(z) = ∫_z^∞ (w+1)^{-2/3} (w-1)^{-2/3} dw`
//! of the upper half plane onto an equilateral triangle with vertices
//! `F(-1)`, `F(1)`, `F(∞) = 0`.
//!
//! For `|z| ≥ 3` the integrand is expanded as `w^{-4/3} (1 - w^{-2})^{-2/3}`
//! and integrated term by term:
//! `F(z) = Σ_k (2/3)_k / k! · z^{-1/3-2k} / (1/3 + 2k)`, principal branch.
//! On the real segment `1 < x < 3` the map falls back to quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// `9^{-k}` falls below `1e-18` relative at k = 19; keep a margin.
const TERMS: usize = 32;
const SERIES_RADIUS: f64 = 3.0;

const QUAD_TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-13,
};

#[derive(Clone, Debug)]
pub struct ScMap {
    /// `(2/3)_k / k! / (1/3 + 2k)`.
    coeffs: [f64; TERMS],
    f3: f64,
    f1: f64,
}

impl Default for ScMap {
    fn default() -> Self {
        Self::new()
    }
}

impl ScMap {
    pub fn new() -> Self {
        let mut coeffs = [0.0; TERMS];
        let mut poch = 1.0;
        for (k, c) in coeffs.iter_mut().enumerate() {
            let kf = k as f64;
            *c = poch / (1.0 / 3.0 + 2.0 * kf);
            poch *= (2.0 / 3.0 + kf) / (kf + 1.0);
        }
        let mut map = ScMap {
            coeffs,
            f3: 0.0,
            f1: 0.0,
        };
        map.f3 = map.series_real(SERIES_RADIUS);
        map.f1 = map.f3 + segment_to_three(1.0).expect("convergent integral");
        map
    }

    /// `F(3)`, the midpoint of the side from `F(1)` to the vertex at 0.
    pub fn f3(&self) -> f64 {
        self.f3
    }

    /// `F(1)`; also the side length of the triangle.
    pub fn f1(&self) -> f64 {
        self.f1
    }

    fn series_real(&self, x: f64) -> f64 {
        let inv2 = 1.0 / (x * x);
        let mut pow = x.powf(-1.0 / 3.0);
        let mut sum = 0.0;
        for c in &self.coeffs {
            sum += c * pow;
            pow *= inv2;
        }
        sum
    }

    fn series_complex(&self, z: Complex64) -> Complex64 {
        let inv2 = (z * z).inv();
        let mut pow = z.powf(-1.0 / 3.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            sum += pow * *c;
            pow *= inv2;
        }
        sum
    }

    /// `F(x)` for real `x > 1`.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        if x >= SERIES_RADIUS {
            Ok(self.series_real(x))
        } else if x > 1.0 {
            Ok(self.f3 + segment_to_three(x)?)
        } else {
            Err(Error::UnsupportedRegion(format!(
                "real argument {x} is not in (1, ∞)"
            )))
        }
    }

    /// `F(z)` for `|z| ≥ 3` (closed upper half plane limits on the real axis)
    /// or real `1 < z < 3`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= SERIES_RADIUS {
            if z.im < 0.0 {
                return Err(Error::UnsupportedRegion(format!(
                    "{z} lies in the lower half plane"
                )));
            }
            Ok(self.series_complex(z))
        } else if z.im == 0.0 && z.re > 1.0 {
            Ok(Complex64::new(self.eval_real(z.re)?, 0.0))
        } else {
            Err(Error::UnsupportedRegion(format!(
                "{z} is inside |z| < 3 and off the segment (1, 3)"
            )))
        }
    }

    /// `F(x)` by direct quadrature of the defining integral, `x > 1`.
    pub fn eval_by_quadrature(&self, x: f64) -> Result<f64> {
        if !(x > 1.0) {
            return Err(Error::UnsupportedRegion(format!("{x} is not in (1, ∞)")));
        }
        let tail = quad::upper_tail(
            |w, _| (w * w - 1.0).powf(-2.0 / 3.0),
            x.max(SERIES_RADIUS),
            QUAD_TOL,
        )?
        .value;
        if x >= SERIES_RADIUS {
            Ok(tail)
        } else {
            Ok(tail + segment_to_three(x)?)
        }
    }

    /// `|F'(x)| = (x² − 1)^{-2/3}`.
    pub fn derivative_abs(x: f64) -> f64 {
        (x * x - 1.0).powf(-2.0 / 3.0)
    }

    /// The `x ≥ 3` with `F(x) = target`, for `0 < target ≤ F(3)`.
    pub fn invert(&self, target: f64) -> Result<f64> {
        if !(target > 0.0 && target <= self.f3 * (1.0 + 1e-15)) {
            return Err(Error::InvalidArgument(format!(
                "target {target} outside (0, F(3)]"
            )));
        }
        // Newton in v = x^{-1/3}, in which F ≈ 3v is nearly linear.
        let v_max = SERIES_RADIUS.powf(-1.0 / 3.0);
        let mut v = (target / 3.0).min(v_max);
        for _ in 0..60 {
            let x = v.powi(-3);
            let g = self.series_real(x) - target;
            let dg = 3.0 * v.powi(-4) * Self::derivative_abs(x);
            let next = (v - g / dg).clamp(0.5 * v, v_max);
            let done = (next - v).abs() <= 1e-16 * v;
            v = next;
            if done {
                break;
            }
        }
        Ok(v.powi(-3).max(SERIES_RADIUS))
    }
}

/// `∫_x^3 (w² − 1)^{-2/3} dw` for `1 ≤ x ≤ 3`, with the singularity at
/// `w = 1` placed at the origin of `u = w − 1`.
fn segment_to_three(x: f64) -> Result<f64> {
    let u0 = x - 1.0;
    Ok(quad::tanh_sinh(
        |_, du, _| {
            let u = u0 + du;
            (u * (2.0 + u)).powf(-2.0 / 3.0)
        },
        u0,
        2.0,
        QUAD_TOL,
    )?
    .value)
}

/// `∫_{-1}^{1} (1 − w²)^{-2/3} dw`, the length of the side `[F(-1), F(1)]`.
pub fn bottom_side_length() -> Result<f64> {
    // Even integrand; u = 1 − w on [0, 1].
    let half = quad::tanh_sinh(
        |_, du, _| (du * (2.0 - du)).powf(-2.0 / 3.0),
        0.0,
        1.0,
        QUAD_TOL,
    )?;
    Ok(2.0 * half.value)
}
