//! Closed-form boundary densities for the benchmark domains and their
//! normalised CDFs.
//!
//! Each law is stored, per axis, as a list of monotone pieces. A piece maps
//! the axis coordinate to the variable in which the density formula is
//! written (the strip abscissa `x`, the angle about a circle's centre, the
//! half-plane preimage of a triangle side), so CDFs are integrals of the
//! formula itself and the change of variables never enters an integrand.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::domains::{Geometry, StarDomain};
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::sc_map::ScMap;

/// Normalisation masses.
const MASS_TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-12,
};
/// Increments between neighbouring CDF abscissae.
const STEP_TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-11,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    /// The coordinate the density formula is written in.
    Native,
    /// Polar angle of the boundary point seen from the origin (reduced mod
    /// 120 for the triangle and mod 90 for the centred circle).
    Polar,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Native => "native",
            Axis::Polar => "polar",
        }
    }
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    /// Axis coordinate to integration variable, monotone on `[lo, hi]`.
    to_u: Func,
    u_lo: f64,
    u_hi: f64,
    density: Func,
    mass: f64,
}

impl Piece {
    fn new(lo: f64, hi: f64, to_u: Func, u_lo: f64, u_hi: f64, density: Func) -> Result<Self> {
        let mass = quad::integrate(|u| density(u), u_lo.min(u_hi), u_lo.max(u_hi), MASS_TOL)?.value;
        Ok(Piece {
            lo,
            hi,
            to_u,
            u_lo,
            u_hi,
            density,
            mass,
        })
    }

    fn u_at(&self, t: f64) -> f64 {
        if t <= self.lo {
            self.u_lo
        } else if t >= self.hi {
            self.u_hi
        } else {
            (self.to_u)(t)
        }
    }

    /// Mass between `u_a` and `u_b`, oriented along the piece.
    fn mass_between(&self, u_a: f64, u_b: f64) -> Result<f64> {
        if u_a == u_b {
            return Ok(0.0);
        }
        let (a, b) = (u_a.min(u_b), u_a.max(u_b));
        let q = quad::integrate(|u| (self.density)(u), a, b, STEP_TOL)?;
        Ok(q.value)
    }
}

#[derive(Clone)]
pub struct AnalyticLaw {
    domain: StarDomain,
    native: Vec<Piece>,
    polar: Vec<Piece>,
    total: f64,
    point_density: Func,
    sc: Option<Arc<ScMap>>,
}

impl std::fmt::Debug for AnalyticLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticLaw")
            .field("geometry", &self.domain.geometry())
            .field("normalization", &self.total)
            .finish()
    }
}

/// Length of a triangle side at unit circumradius.
pub fn triangle_side_length() -> f64 {
    3f64.sqrt()
}

fn cot_deg(t: f64) -> f64 {
    let r = t.to_radians();
    r.cos() / r.sin()
}

fn chordal_strip_density(x: f64) -> f64 {
    (PI * x / 2.0).cosh().powf(-1.25)
}

fn radial_strip_density(x: f64, h: f64, upper: bool) -> f64 {
    let c = (PI * h).cos();
    let base = if upper { (PI * x).cosh() + c } else { (PI * x).cosh() - c };
    base.powf(-0.625)
}

fn offcenter_density(phi_deg: f64, a: f64, b: f64) -> f64 {
    let p = phi_deg.to_radians();
    (1.0 + a * a + b * b + 2.0 * a * p.cos() + 2.0 * b * p.sin()).powf(-0.625)
}

/// `(1 − cos φ)^{5/8} |1 − cos φ + sin φ|^{-5/4}`, with `1 − cos φ` written
/// as `2 sin²(φ/2)` to keep the small-angle end free of cancellation.
fn tangent_density(phi_deg: f64) -> f64 {
    let p = phi_deg.to_radians();
    let one_minus_cos = 2.0 * (0.5 * p).sin().powi(2);
    one_minus_cos.powf(0.625) * (one_minus_cos + p.sin()).abs().powf(-1.25)
}

/// Partial-circle density at `z = ib + e^{iφ}`:
/// `[|z+d|^{π/β−1} / |z−d|^{π/β+1}]^{5/8} |1 − f(z)|^{-5/4}` with
/// `f(z) = [−(z+d)/(z−d)]^{π/β}`, evaluated in logarithms.
fn partial_density(phi_deg: f64, b: f64) -> f64 {
    let d = (1.0 - b * b).sqrt();
    let beta = (-b).acos();
    let k = PI / beta;
    let z = Complex64::new(0.0, b) + Complex64::from_polar(1.0, phi_deg.to_radians());
    let zp = z + d;
    let zm = z - d;
    // Both corners are zeros of the density (see the module tests).
    if zp.norm() == 0.0 || zm.norm() == 0.0 {
        return 0.0;
    }
    let w = -zp / zm;
    let log_f = w.ln() * k;
    // ln|1 − f|; for large |f| the leading term dominates.
    let log_one_minus_f = if log_f.re > 40.0 {
        log_f.re
    } else {
        (Complex64::new(1.0, 0.0) - log_f.exp()).norm().ln()
    };
    let log_rho = 0.625 * ((k - 1.0) * zp.norm().ln() - (k + 1.0) * zm.norm().ln()) - 1.25 * log_one_minus_f;
    log_rho.exp()
}

/// `f(z)` for the partial circle, exposed for the branch check.
pub fn partial_circle_map(phi_deg: f64, b: f64) -> Complex64 {
    let d = (1.0 - b * b).sqrt();
    let beta = (-b).acos();
    let z = Complex64::new(0.0, b) + Complex64::from_polar(1.0, phi_deg.to_radians());
    (-(z + d) / (z - d)).powf(PI / beta)
}

fn triangle_mass_density(x: f64) -> f64 {
    // ρ(l) |dl/dx| with |dl/dx| ∝ |F'(x)|.
    (x * x - 1.0).powf(-0.25) * (x * x + 3.0).powf(-0.625)
}

impl AnalyticLaw {
    pub fn new(domain: &StarDomain) -> Result<Self> {
        let domain = *domain;
        let mut sc = None;
        let (native, polar, point_density): (Vec<Piece>, Vec<Piece>, Func) = match domain.geometry() {
            Geometry::StripChordal => {
                let dens: Func = Arc::new(chordal_strip_density);
                let native = vec![Piece::new(
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    Arc::new(|x| x),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    dens.clone(),
                )?];
                let polar = vec![Piece::new(0.0, 180.0, Arc::new(cot_deg), f64::INFINITY, f64::NEG_INFINITY, dens.clone())?];
                (native, polar, dens)
            }
            Geometry::StripRadial { h } => {
                let h = h.value();
                let up: Func = Arc::new(move |x| radial_strip_density(x, h, true));
                let low: Func = Arc::new(move |x| radial_strip_density(x, h, false));
                let pieces = vec![
                    Piece::new(0.0, 180.0, Arc::new(move |t| (1.0 - h) * cot_deg(t)), f64::INFINITY, f64::NEG_INFINITY, up.clone())?,
                    Piece::new(180.0, 360.0, Arc::new(move |t| -h * cot_deg(t)), f64::NEG_INFINITY, f64::INFINITY, low.clone())?,
                ];
                let point: Func = Arc::new(move |t| {
                    if t < 180.0 {
                        up((1.0 - h) * cot_deg(t))
                    } else {
                        low(-h * cot_deg(t))
                    }
                });
                (pieces.clone(), pieces, point)
            }
            Geometry::Triangle => {
                let map = Arc::new(ScMap::new());
                sc = Some(map.clone());
                let l0 = triangle_side_length();
                let f3 = map.f3();
                let x_of_l = {
                    let map = map.clone();
                    move |l: f64| -> f64 {
                        if l <= 0.0 {
                            f64::INFINITY
                        } else {
                            map.invert((f3 * 2.0 * l / l0).min(f3)).unwrap_or(f64::INFINITY)
                        }
                    }
                };
                let x_of_l = Arc::new(x_of_l);
                let dens: Func = Arc::new(triangle_mass_density);
                let (xa, xb) = (x_of_l.clone(), x_of_l.clone());
                let native = vec![
                    Piece::new(0.0, l0 / 2.0, Arc::new(move |s| xa(s)), f64::INFINITY, 3.0, dens.clone())?,
                    Piece::new(l0 / 2.0, l0, Arc::new(move |s| xb(l0 - s)), 3.0, f64::INFINITY, dens.clone())?,
                ];
                // Arc position along the side from the vertex at polar angle 0.
                let s_of_t = move |t: f64| l0 / 2.0 + 0.5 * (t - 60.0).to_radians().tan();
                let (xa, xb) = (x_of_l.clone(), x_of_l.clone());
                let polar = vec![
                    Piece::new(0.0, 60.0, Arc::new(move |t| xa(s_of_t(t))), f64::INFINITY, 3.0, dens.clone())?,
                    Piece::new(60.0, 120.0, Arc::new(move |t| xb(l0 - s_of_t(t))), 3.0, f64::INFINITY, dens)?,
                ];
                let xp = x_of_l.clone();
                let point: Func = Arc::new(move |s| {
                    let x = xp(s.min(l0 - s));
                    (x * x - 1.0).powf(5.0 / 12.0) * (x * x + 3.0).powf(-0.625)
                });
                (native, polar, point)
            }
            Geometry::CircleCentered => {
                let dens: Func = Arc::new(|_| 1.0);
                let pieces = vec![Piece::new(0.0, 90.0, Arc::new(|t| t), 0.0, 90.0, dens.clone())?];
                (pieces.clone(), pieces, dens)
            }
            Geometry::CircleOffcenter { a, b } => {
                let dens: Func = Arc::new(move |p| offcenter_density(p, a, b));
                let native = vec![Piece::new(0.0, 360.0, Arc::new(|p| p), 0.0, 360.0, dens.clone())?];
                let phi_of_theta = circle_phi_of_theta(domain, a, b);
                let phi0 = phi_of_theta(0.0);
                let polar = if phi0 == 0.0 {
                    vec![Piece::new(0.0, 360.0, Arc::new(move |t| phi_of_theta(t)), 0.0, 360.0, dens.clone())?]
                } else {
                    // The centre's zero direction is crossed at θ₁.
                    let theta1 = b.atan2(a + 1.0).to_degrees().rem_euclid(360.0);
                    let p1 = phi_of_theta.clone();
                    vec![
                        Piece::new(0.0, theta1, Arc::new(move |t| {
                            let p = p1(t);
                            if p < phi0 { p + 360.0 } else { p }
                        }), phi0, 360.0, dens.clone())?,
                        Piece::new(theta1, 360.0, Arc::new(move |t| phi_of_theta(t)), 0.0, phi0, dens.clone())?,
                    ]
                };
                (native, polar, dens)
            }
            Geometry::CirclePartial { b } => {
                let dens: Func = Arc::new(move |p| partial_density(p, b));
                let lo = (-b).asin().to_degrees();
                let native = vec![Piece::new(lo, 180.0 - lo, Arc::new(|p| p), lo, 180.0 - lo, dens.clone())?];
                let phi_of_theta = circle_phi_of_theta(domain, 0.0, b);
                let polar = vec![Piece::new(0.0, 180.0, phi_of_theta, lo, 180.0 - lo, dens.clone())?];
                (native, polar, dens)
            }
            Geometry::CircleTangent => {
                let dens: Func = Arc::new(tangent_density);
                let native = vec![Piece::new(0.0, 180.0, Arc::new(|p| p), 0.0, 180.0, dens.clone())?];
                let phi_of_theta = circle_phi_of_theta(domain, 0.0, 1.0);
                let polar = vec![Piece::new(45.0, 135.0, phi_of_theta, 0.0, 180.0, dens.clone())?];
                (native, polar, dens)
            }
        };
        let total: f64 = native.iter().map(|p| p.mass).sum();
        let total_polar: f64 = polar.iter().map(|p| p.mass).sum();
        if !(total > 0.0) || ((total - total_polar) / total).abs() > 1e-9 {
            return Err(Error::Accuracy {
                estimate: total_polar,
                error: (total - total_polar).abs(),
            });
        }
        Ok(AnalyticLaw {
            domain,
            native,
            polar,
            total,
            point_density,
            sc,
        })
    }

    pub fn for_geometry(geometry: Geometry) -> Result<Self> {
        Self::new(&StarDomain::new(geometry)?)
    }

    pub fn domain(&self) -> &StarDomain {
        &self.domain
    }

    pub fn geometry(&self) -> Geometry {
        self.domain.geometry()
    }

    /// The integral of the unnormalised density over the whole range.
    pub fn normalization(&self) -> f64 {
        self.total
    }

    pub fn sc_map(&self) -> Option<&ScMap> {
        self.sc.as_deref()
    }

    /// Axis on which the domain reports sample parameters.
    pub fn sample_axis(&self) -> Axis {
        match self.geometry() {
            Geometry::StripRadial { .. } | Geometry::Triangle | Geometry::CircleCentered => Axis::Polar,
            _ => Axis::Native,
        }
    }

    fn pieces(&self, axis: Axis) -> &[Piece] {
        match axis {
            Axis::Native => &self.native,
            Axis::Polar => &self.polar,
        }
    }

    pub fn range(&self, axis: Axis) -> (f64, f64) {
        let p = self.pieces(axis);
        (p[0].lo, p[p.len() - 1].hi)
    }

    /// Masses of the pieces on an axis, normalised.
    pub fn piece_masses(&self, axis: Axis) -> Vec<f64> {
        self.pieces(axis).iter().map(|p| p.mass / self.total).collect()
    }

    /// The unnormalised density formula at a native parameter strictly
    /// inside the range.
    pub fn density_value(&self, param: f64) -> Result<f64> {
        let (lo, hi) = self.range(Axis::Native);
        let open = param > lo && param < hi;
        let interior_seam = matches!(self.geometry(), Geometry::StripRadial { .. }) && param == 180.0;
        if !open || interior_seam || !param.is_finite() {
            return Err(Error::OutOfRange(param));
        }
        Ok((self.point_density)(param))
    }

    pub fn cdf(&self, param: f64, axis: Axis) -> Result<f64> {
        Ok(self.cdf_many(&[param], axis)?[0])
    }

    /// CDF at many abscissae, integrating only between sorted neighbours.
    pub fn cdf_many(&self, params: &[f64], axis: Axis) -> Result<Vec<f64>> {
        let pieces = self.pieces(axis);
        let (lo, hi) = self.range(axis);
        let mut order: Vec<usize> = (0..params.len()).collect();
        for &t in params {
            if t.is_nan() || t < lo || t > hi {
                return Err(Error::OutOfRange(t));
            }
        }
        order.sort_by(|&i, &j| params[i].total_cmp(&params[j]));
        let mut out = vec![0.0; params.len()];
        let mut k = 0;
        let mut before = 0.0;
        let mut u_prev = pieces[0].u_lo;
        let mut within = 0.0;
        for i in order {
            let t = params[i];
            while k + 1 < pieces.len() && t >= pieces[k].hi {
                before += pieces[k].mass;
                k += 1;
                u_prev = pieces[k].u_lo;
                within = 0.0;
            }
            let piece = &pieces[k];
            let u = piece.u_at(t);
            within += piece.mass_between(u_prev, u)?;
            u_prev = u;
            out[i] = ((before + within.min(piece.mass)) / self.total).clamp(0.0, 1.0);
        }
        Ok(out)
    }
}

/// Angle about the centre `(a, b)` of the boundary point at polar angle θ.
fn circle_phi_of_theta(domain: StarDomain, a: f64, b: f64) -> Func {
    Arc::new(move |t: f64| {
        let d = domain.radial_distance(t).unwrap_or(f64::NAN);
        let r = t.to_radians();
        (d * r.sin() - b).atan2(d * r.cos() - a).to_degrees().rem_euclid(360.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(name: &str) -> AnalyticLaw {
        AnalyticLaw::new(&StarDomain::from_name(name).unwrap()).unwrap()
    }

    fn all_laws() -> Vec<AnalyticLaw> {
        Geometry::NAMES.iter().map(|n| law(n)).collect()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    fn finite_range(law: &AnalyticLaw, axis: Axis) -> (f64, f64) {
        let (lo, hi) = law.range(axis);
        (if lo.is_finite() { lo } else { -30.0 }, if hi.is_finite() { hi } else { 30.0 })
    }

    #[test]
    fn density_examples() {
        assert!((law("strip_chordal").density_value(0.0).unwrap() - 1.0).abs() < 1e-15);
        let c = law("circle_centered");
        assert_eq!(c.density_value(10.0).unwrap(), c.density_value(77.0).unwrap());
        let t = law("circle_tangent").density_value(90.0).unwrap();
        assert!((t - 2f64.powf(-1.25)).abs() < 1e-15, "{t}");
        assert!((t - 0.420448).abs() < 1e-6);
        let o = law("circle_offcenter").density_value(1e-300).unwrap();
        assert!((o - 1.75f64.powf(-1.25)).abs() < 1e-15);
        assert!(matches!(law("strip_chordal").density_value(f64::INFINITY), Err(Error::OutOfRange(_))));
        assert!(law("circle_tangent").density_value(0.0).is_err());
    }

    #[test]
    fn tangent_density_matches_half_angle_identity() {
        let l = law("circle_tangent");
        for p in grid(0.01, 179.99, 2000) {
            let want = 2f64.powf(-0.625) * (1.0 + p.to_radians().sin()).powf(-0.625);
            let got = l.density_value(p).unwrap();
            assert!((got - want).abs() < 1e-13, "φ={p}: {got} vs {want}");
        }
    }

    #[test]
    fn endpoints_and_normalisation() {
        for l in all_laws() {
            for axis in [Axis::Native, Axis::Polar] {
                let (lo, hi) = l.range(axis);
                let c = l.cdf_many(&[lo, hi], axis).unwrap();
                assert_eq!(c[0], 0.0, "{l:?} {axis:?}");
                assert!((c[1] - 1.0).abs() < 1e-8, "{l:?} {axis:?}: {}", c[1]);
                let s: f64 = l.piece_masses(axis).iter().sum();
                assert!((s - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn monotone_on_fine_grid() {
        for l in all_laws() {
            for axis in [Axis::Native, Axis::Polar] {
                let (lo, hi) = finite_range(&l, axis);
                let xs = grid(lo, hi, 10_000);
                let c = l.cdf_many(&xs, axis).unwrap();
                for w in c.windows(2) {
                    assert!(w[1] >= w[0], "{l:?} {axis:?} not monotone");
                }
                // A few points evaluated on their own agree with the sweep.
                for i in [0, 1234, 5000, 9999] {
                    let single = l.cdf(xs[i], axis).unwrap();
                    assert!((single - c[i]).abs() < 1e-9, "{l:?} {axis:?} at {}: {single} vs {}", xs[i], c[i]);
                }
            }
        }
    }

    #[test]
    fn symmetric_laws() {
        let s = law("strip_chordal");
        assert!((s.cdf(0.0, Axis::Native).unwrap() - 0.5).abs() < 1e-12);
        for x in [0.3, 1.0, 2.5] {
            let a = s.cdf(-x, Axis::Native).unwrap();
            let b = s.cdf(x, Axis::Native).unwrap();
            assert!((a + b - 1.0).abs() < 1e-11);
            assert_eq!(s.density_value(x).unwrap(), s.density_value(-x).unwrap());
        }
        let o = law("circle_offcenter");
        for p in [10.0, 95.0, 170.0] {
            assert!((o.density_value(p).unwrap() - o.density_value(360.0 - p).unwrap()).abs() < 1e-15);
        }
        assert!((o.cdf(180.0, Axis::Native).unwrap() - 0.5).abs() < 1e-11);
        // Triangle: the two halves of a side carry equal mass.
        let t = law("triangle");
        for axis in [Axis::Native, Axis::Polar] {
            let m = t.piece_masses(axis);
            assert!((m[0] - m[1]).abs() < 1e-8, "{m:?}");
        }
        assert!((t.cdf(60.0, Axis::Polar).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn radial_strip_branch_ratio() {
        let l = law("strip_radial");
        let c = (PI * 0.25).cos();
        let want = ((1.0 + c) / (1.0 - c)).powf(0.625);
        let got = l.density_value(270.0).unwrap() / l.density_value(90.0).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn offcenter_at_origin_is_uniform() {
        let centred = AnalyticLaw::for_geometry(Geometry::CircleOffcenter { a: 0.0, b: 0.0 }).unwrap();
        let d0 = centred.density_value(1.0).unwrap();
        for p in grid(1.0, 359.0, 100) {
            assert_eq!(centred.density_value(p).unwrap(), d0);
            let c = centred.cdf(p, Axis::Native).unwrap();
            assert!((c - p / 360.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_circle_map_sends_arc_to_negative_axis() {
        let b: f64 = -0.75;
        let lo = (-b).asin().to_degrees();
        for p in grid(lo + 0.5, 180.0 - lo - 0.5, 50) {
            let f = partial_circle_map(p, b);
            assert!(f.re < 0.0 && f.im.abs() < 1e-8 * f.norm(), "φ={p}: {f}");
        }
        // The origin maps to 1: −(0 + d)/(0 − d) = 1.
        let l = law("circle_partial");
        for p in grid(lo + 0.1, 180.0 - lo - 0.1, 200) {
            let v = l.density_value(p).unwrap();
            assert!(v > 0.0 && v.is_finite());
        }
        // β = arccos(3/4) = arctan(√7/3).
        assert!((0.75f64.acos() - (7f64.sqrt() / 3.0).atan()).abs() < 1e-15);
    }

    #[test]
    fn polar_axis_matches_jacobian_pushforward() {
        // dφ/dθ for a unit circle is the arc length per radian of polar angle.
        for name in ["circle_offcenter", "circle_partial", "circle_tangent"] {
            let l = law(name);
            let d = *l.domain();
            let (lo, hi) = l.range(Axis::Polar);
            let mid = 0.5 * (lo + hi);
            let phi = circle_phi_of_theta(
                d,
                if name == "circle_offcenter" { 0.75 } else { 0.0 },
                match name {
                    "circle_partial" => -0.75,
                    "circle_tangent" => 1.0,
                    _ => 0.0,
                },
            );
            let dens = l.point_density.clone();
            let pushed = quad::integrate(
                |t| dens(phi(t)) * d.arc_jacobian(t).unwrap(),
                lo + 1e-9,
                mid,
                Tolerance { abs: 1e-13, rel: 1e-10 },
            )
            .unwrap()
            .value
                / l.normalization();
            let direct = l.cdf(mid, Axis::Polar).unwrap();
            assert!((pushed - direct).abs() < 1e-7, "{name}: {pushed} vs {direct}");
        }
    }

    #[test]
    fn strip_native_and_polar_agree() {
        // Increasing reparametrisation within one component: cdf is carried along.
        let l = law("strip_chordal");
        for t in [20.0, 75.0, 90.0, 140.0] {
            let x = cot_deg(t);
            let polar = l.cdf(t, Axis::Polar).unwrap();
            let native = l.cdf(x, Axis::Native).unwrap();
            assert!((polar - (1.0 - native)).abs() < 1e-10);
        }
    }

    #[test]
    fn triangle_native_and_polar_agree() {
        let l = law("triangle");
        let l0 = triangle_side_length();
        for t in [5.0, 30.0, 59.0, 61.0, 100.0, 119.0] {
            let s = l0 / 2.0 + 0.5 * (t - 60.0_f64).to_radians().tan();
            let a = l.cdf(t, Axis::Polar).unwrap();
            let b = l.cdf(s, Axis::Native).unwrap();
            assert!((a - b).abs() < 1e-10, "t={t}: {a} vs {b}");
        }
        // The density vanishes at the vertices and peaks at the midpoint.
        let mid = l.density_value(l0 / 2.0).unwrap();
        assert!(l.density_value(1e-3).unwrap() < 0.1 * mid);
        assert!(l.density_value(l0 / 2.0 - 0.1).unwrap() < mid);
    }

    #[test]
    fn tangent_polar_range_is_upper_half() {
        let l = law("circle_tangent");
        assert_eq!(l.range(Axis::Polar), (45.0, 135.0));
        assert!((l.cdf(90.0, Axis::Polar).unwrap() - l.cdf(90.0, Axis::Native).unwrap()).abs() < 1e-10);
    }
}
