//! Double-exponential (tanh-sinh) quadrature.
//!
//! Integrands receive the abscissa together with its distances to both
//! endpoints, computed without cancellation. An integrand with an algebraic
//! singularity at an endpoint should be written in terms of that distance;
//! infinite ranges are mapped onto finite ones the same way.

use crate::error::{Error, Result};

/// Nodes closer to an endpoint than this fraction of the interval are
/// dropped. For any integrable singularity milder than `u^-0.9` the
/// neglected piece is below 1e-6 of double precision.
const MIN_REL_DIST: f64 = 1e-60;
const MAX_LEVEL: usize = 10;
const MAX_DEPTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Absolute and relative tolerances; convergence when either is met.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        abs: 1e-14,
        rel: 1e-11,
    };

    fn met(&self, value: f64, error: f64) -> bool {
        error <= self.abs || error <= self.rel * value.abs()
    }
}

/// `∫_a^b f` for finite `a < b`; `f(x, x − a, b − x)`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite interval required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    if a > b {
        let q = adaptive(&|x, da, db| f(x, db, da), b, a, tol, 0)?;
        return Ok(Quadrature { value: -q.value, error: q.error });
    }
    adaptive(&f, a, b, tol, 0)
}

fn adaptive(
    f: &dyn Fn(f64, f64, f64) -> f64,
    a: f64,
    b: f64,
    tol: Tolerance,
    depth: usize,
) -> Result<Quadrature> {
    let q = single(f, a, b, tol)?;
    if tol.met(q.value, q.error) {
        return Ok(q);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Accuracy { estimate: q.value, error: q.error });
    }
    // Halves keep exact endpoint distances on their outer ends.
    let m = 0.5 * (a + b);
    let half = Tolerance { abs: 0.5 * tol.abs, rel: tol.rel };
    let l = adaptive(&|x, da, db| f(x, da, db + (b - m)), a, m, half, depth + 1)?;
    let r = adaptive(&|x, da, db| f(x, da + (m - a), db), m, b, half, depth + 1)?;
    Ok(Quadrature {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

/// One tanh-sinh pass with level doubling until successive estimates agree.
fn single(f: &dyn Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    let half_width = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let half_pi = std::f64::consts::FRAC_PI_2;

    // Contribution of the node at t (and its mirror at -t).
    let eval = |t: f64| -> Result<Option<f64>> {
        let u = half_pi * t.sinh();
        let cu = u.cosh();
        let w = half_pi * t.cosh() / (cu * cu);
        // Distance of the node at +t from b, and of the node at -t from a.
        let d = 2.0 * half_width / (1.0 + (2.0 * u).exp());
        if d < MIN_REL_DIST * (b - a) {
            return Ok(None);
        }
        let nodes = [(b - d, 2.0 * half_width - d, d), (a + d, d, 2.0 * half_width - d)];
        let nodes = if t == 0.0 { &[(mid, half_width, half_width)][..] } else { &nodes[..] };
        let mut s = 0.0;
        for &(x, da, db) in nodes {
            let v = f(x, da, db);
            if !v.is_finite() {
                return Err(Error::Accuracy { estimate: f64::NAN, error: f64::INFINITY });
            }
            s += v;
        }
        Ok(Some(w * s))
    };

    let mut h = 1.0;
    let mut sum = 0.0;
    // Level 0: nodes at integer t.
    let mut t = 0.0;
    while let Some(v) = eval(t)? {
        sum += v;
        t += 1.0;
        if t > 8.0 {
            break;
        }
    }
    let mut prev = sum * h * half_width;
    let mut prev_diff = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1.0;
        loop {
            let t = k * h;
            match eval(t)? {
                Some(v) => sum += v,
                None => break,
            }
            k += 2.0;
            if t > 8.0 {
                break;
            }
        }
        let est = sum * h * half_width;
        let diff = (est - prev).abs();
        // Convergence is quadratic: the next correction is about diff²/prev_diff.
        let err = if prev_diff.is_finite() && prev_diff > 0.0 {
            (diff * diff / prev_diff).max(diff * 1e-3).min(diff)
        } else {
            diff
        };
        if tol.met(est, err) && _level >= 3 {
            return Ok(Quadrature { value: est, error: err });
        }
        prev_diff = diff;
        prev = est;
    }
    Ok(Quadrature { value: prev, error: prev_diff })
}

/// `∫_a^∞ f`, via `x = a + s/(1 − s)`; `f(x, x − a)`.
pub fn upper_tail<F>(f: F, a: f64, tol: Tolerance) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    tanh_sinh(
        |_, ds, dc| {
            // s = ds, 1 − s = dc.
            let dx = ds / dc;
            f(a + dx, dx) / (dc * dc)
        },
        0.0,
        1.0,
        tol,
    )
}

/// `∫_{-∞}^b f`; `f(x, b − x)`.
pub fn lower_tail<F>(f: F, b: f64, tol: Tolerance) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    upper_tail(|_, dx| f(b - dx, dx), 0.0, tol)
}

/// `∫_a^b f` for any `a, b` in the extended reals; `f(x)`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    integrate_dyn(&f, a, b, tol)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidArgument("NaN integration limit".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    if a > b {
        let q = integrate_dyn(f, b, a, tol)?;
        return Ok(Quadrature { value: -q.value, error: q.error });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => tanh_sinh(|x, _, _| f(x), a, b, tol),
        // Semi-infinite ranges are split at the origin so that a far-away
        // finite limit cannot leave the bulk between two sparse nodes.
        (true, false) if a < 0.0 => sum(integrate_dyn(f, a, 0.0, tol)?, upper_tail(|x, _| f(x), 0.0, tol)?),
        (false, true) if b > 0.0 => sum(lower_tail(|x, _| f(x), 0.0, tol)?, integrate_dyn(f, 0.0, b, tol)?),
        (true, false) => upper_tail(|x, _| f(x), a, tol),
        (false, true) => lower_tail(|x, _| f(x), b, tol),
        (false, false) => {
            let half = Tolerance { abs: 0.5 * tol.abs, rel: tol.rel };
            let r = upper_tail(|x, _| f(x), 0.0, half)?;
            let l = lower_tail(|x, _| f(x), 0.0, half)?;
            Ok(Quadrature {
                value: l.value + r.value,
                error: l.error + r.error,
            })
        }
    }
}

fn sum(a: Quadrature, b: Quadrature) -> Result<Quadrature> {
    Ok(Quadrature {
        value: a.value + b.value,
        error: a.error + b.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn polynomial_and_smooth() {
        let q = integrate(|x| x * x, 0.0, 3.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 9.0, 1e-12), "{q:?}");
        let q = integrate(f64::cos, 0.0, std::f64::consts::FRAC_PI_2, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 1.0, 1e-12));
        let q = integrate(|x| x.exp(), 1.0, -1.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, -(1f64.exp() - (-1f64).exp()), 1e-12));
    }

    #[test]
    fn endpoint_singularities() {
        // ∫_0^1 u^{-2/3} = 3.
        let q = tanh_sinh(|_, da, _| da.powf(-2.0 / 3.0), 0.0, 1.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 3.0, 1e-11), "{q:?}");
        // ∫_0^1 (1 − x)^{-1/2} = 2, singularity at the right end.
        let q = tanh_sinh(|_, _, db| db.powf(-0.5), 0.0, 1.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 2.0, 1e-11), "{q:?}");
        // ∫_{-1}^{1} (1 − x²)^{-1/2} = π, written through both distances.
        let q = tanh_sinh(|_, da, db| (da * db).powf(-0.5), -1.0, 1.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, std::f64::consts::PI, 1e-11), "{q:?}");
    }

    #[test]
    fn infinite_ranges() {
        let q = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, std::f64::consts::PI.sqrt(), 1e-11), "{q:?}");
        let q = integrate(|x| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, std::f64::consts::FRAC_PI_2, 1e-11), "{q:?}");
        // Slow algebraic decay x^{-7/4}: ∫_1^∞ = 4/3.
        let q = integrate(|x| x.powf(-1.75), 1.0, f64::INFINITY, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 4.0 / 3.0, 1e-10), "{q:?}");
        let q = integrate(|x| x.exp(), f64::NEG_INFINITY, 0.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, 1.0, 1e-11), "{q:?}");
        // Bulk far from the finite limit.
        let q = integrate(|x| (-x * x).exp(), -5000.0, f64::INFINITY, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, std::f64::consts::PI.sqrt(), 1e-11), "{q:?}");
        let q = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, 5000.0, Tolerance::DEFAULT).unwrap();
        assert!(close(q.value, std::f64::consts::PI.sqrt(), 1e-11), "{q:?}");
    }

    #[test]
    fn non_finite_integrand_is_an_accuracy_error() {
        let r = integrate(|_| f64::NAN, 0.0, 1.0, Tolerance::DEFAULT);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }
}
