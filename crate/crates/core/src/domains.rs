//! The benchmark star-shaped domains and per-walk geometry: radial distance
//! D(θ), normal angle α(θ), the dilation λ putting an endpoint on λ·∂D, the
//! strict-interior indicator, the thickness weight and the boundary
//! parameter used by the analytic laws.
//!
//! Angles are degrees at this interface. Tests against flat boundary pieces
//! are exact: strips and the tangent circle reduce to integer comparisons,
//! the triangle to signs of `a + b√3` with integer `a, b`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exponents::{Rational, SAW};
use crate::walk::{Constraint, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Origin interior to the domain.
    Radial,
    /// Origin on the boundary.
    Chordal,
}

impl Kind {
    pub fn constraint(self) -> Constraint {
        match self {
            Kind::Radial => Constraint::FullPlane,
            Kind::Chordal => Constraint::HalfPlane,
        }
    }

    /// The conjectured dilation power for this kind.
    pub fn default_p(self) -> Rational {
        match self {
            Kind::Radial => SAW.p_radial,
            Kind::Chordal => SAW.p_chordal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    /// `{0 < Im z < 1}`, walks end on the upper line.
    StripChordal,
    /// `{-h < Im z < 1 - h}`.
    StripRadial { h: Rational },
    /// Equilateral, unit circumradius, vertices at polar angles 0, 120, 240.
    Triangle,
    CircleCentered,
    /// Unit disc centred at `a + ib`.
    CircleOffcenter { a: f64, b: f64 },
    /// Unit disc centred at `ib` intersected with the upper half plane;
    /// walks end on the arc.
    CirclePartial { b: f64 },
    /// Unit disc centred at `i`; conditioned on ending on the upper half.
    CircleTangent,
}

impl Geometry {
    pub fn strip_radial_default() -> Self {
        Geometry::StripRadial {
            h: Rational::new(1, 4),
        }
    }

    pub fn circle_offcenter_default() -> Self {
        Geometry::CircleOffcenter { a: 0.75, b: 0.0 }
    }

    pub fn circle_partial_default() -> Self {
        Geometry::CirclePartial { b: -0.75 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::StripChordal => "strip_chordal",
            Geometry::StripRadial { .. } => "strip_radial",
            Geometry::Triangle => "triangle",
            Geometry::CircleCentered => "circle_centered",
            Geometry::CircleOffcenter { .. } => "circle_offcenter",
            Geometry::CirclePartial { .. } => "circle_partial",
            Geometry::CircleTangent => "circle_tangent",
        }
    }

    /// Parses a geometry name with its benchmark parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "strip_chordal" => Geometry::StripChordal,
            "strip_radial" => Geometry::strip_radial_default(),
            "triangle" => Geometry::Triangle,
            "circle_centered" => Geometry::CircleCentered,
            "circle_offcenter" => Geometry::circle_offcenter_default(),
            "circle_partial" => Geometry::circle_partial_default(),
            "circle_tangent" => Geometry::CircleTangent,
            other => return Err(Error::Config(format!("unknown geometry `{other}`"))),
        })
    }

    pub const NAMES: [&'static str; 7] = [
        "strip_chordal",
        "strip_radial",
        "triangle",
        "circle_centered",
        "circle_offcenter",
        "circle_partial",
        "circle_tangent",
    ];
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::StripRadial { h } => write!(f, "strip_radial(h={}/{})", h.num, h.den),
            Geometry::CircleOffcenter { a, b } => write!(f, "circle_offcenter(a={a}, b={b})"),
            Geometry::CirclePartial { b } => write!(f, "circle_partial(b={b})"),
            g => f.write_str(g.name()),
        }
    }
}

/// Geometry of the target boundary seen from the origin at one polar angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryGeometry {
    /// Distance from the origin to the boundary.
    pub d: f64,
    /// Angle of the boundary normal line, degrees mod 180.
    pub alpha: f64,
    /// Angle of the tangent line, degrees mod 180.
    pub tau: f64,
}

/// A dilation factor, with an exact representation where one exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scale {
    pub value: f64,
    pub exact: ExactScale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactScale {
    /// `num / den`, `den > 0`.
    Rational { num: i64, den: i64 },
    /// `a + b√3`.
    Surd3 { a: i64, b: i64 },
    /// `√r2`.
    SqrtInt(i64),
    Inexact,
}

impl Scale {
    pub fn new(value: f64) -> Self {
        Scale {
            value,
            exact: ExactScale::Inexact,
        }
    }

    fn rational(num: i64, den: i64) -> Self {
        debug_assert!(den > 0);
        Scale {
            value: num as f64 / den as f64,
            exact: ExactScale::Rational { num, den },
        }
    }

    fn surd3(a: i64, b: i64) -> Self {
        Scale {
            value: a as f64 + b as f64 * 3f64.sqrt(),
            exact: ExactScale::Surd3 { a, b },
        }
    }
}

/// Outcome of reading the boundary parameter of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryParam {
    Value(f64),
    /// Outside the conditioning window; the sample is dropped.
    WindowedOut(f64),
}

/// Sign of `a + b√3`.
pub fn sign_surd3(a: i64, b: i64) -> i32 {
    let (a, b) = (a as i128, b as i128);
    match (a.signum(), b.signum()) {
        (0, 0) => 0,
        (sa, sb) if sa >= 0 && sb >= 0 => 1,
        (sa, sb) if sa <= 0 && sb <= 0 => -1,
        (sa, _) => {
            // Opposite signs: compare a² with 3b².
            let diff = a * a - 3 * b * b;
            (diff.signum() as i32) * sa as i32
        }
    }
}

fn cmp_surd3(l: (i64, i64), r: (i64, i64)) -> i32 {
    sign_surd3(l.0 - r.0, l.1 - r.1)
}

/// Triangle support forms `n_k · z / (1/2)` as `a + b√3`; λ is their max.
#[inline]
fn triangle_forms(s: Site) -> [(i64, i64); 3] {
    let (x, y) = (s.x as i64, s.y as i64);
    [(x, y), (-2 * x, 0), (x, -y)]
}

fn norm_deg(theta: f64) -> f64 {
    let t = theta.rem_euclid(360.0);
    if t >= 360.0 {
        0.0
    } else {
        t
    }
}

fn mod180(a: f64) -> f64 {
    let t = a.rem_euclid(180.0);
    if t >= 180.0 {
        0.0
    } else {
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarDomain {
    geometry: Geometry,
}

impl StarDomain {
    pub fn new(geometry: Geometry) -> Result<Self> {
        match geometry {
            Geometry::StripRadial { h } => {
                if !(h.den > 0 && h.num > 0 && h.num < h.den) {
                    return Err(Error::InvalidArgument(format!(
                        "strip height offset {}/{} must lie in (0, 1)",
                        h.num, h.den
                    )));
                }
            }
            Geometry::CircleOffcenter { a, b } if !(a * a + b * b < 1.0) => {
                return Err(Error::InvalidArgument(
                    "off-center circle must contain the origin".into(),
                ));
            }
            Geometry::CirclePartial { b } if !(b > -1.0 && b < 0.0) => {
                return Err(Error::InvalidArgument(
                    "partial circle centre offset must lie in (-1, 0)".into(),
                ));
            }
            _ => {}
        }
        Ok(StarDomain { geometry })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::new(Geometry::from_name(name)?)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn kind(&self) -> Kind {
        match self.geometry {
            Geometry::StripChordal | Geometry::CirclePartial { .. } | Geometry::CircleTangent => {
                Kind::Chordal
            }
            _ => Kind::Radial,
        }
    }

    pub fn constraint(&self) -> Constraint {
        self.kind().constraint()
    }

    /// `(center, radius)` of the unit-scale circle for circle geometries.
    fn circle(&self) -> Option<((f64, f64), f64)> {
        match self.geometry {
            Geometry::CircleCentered => Some(((0.0, 0.0), 1.0)),
            Geometry::CircleOffcenter { a, b } => Some(((a, b), 1.0)),
            Geometry::CirclePartial { b } => Some(((0.0, b), 1.0)),
            Geometry::CircleTangent => Some(((0.0, 1.0), 1.0)),
            _ => None,
        }
    }

    /// Whether the target boundary is a circular arc rather than straight
    /// pieces.
    pub fn is_curved(&self) -> bool {
        self.circle().is_some()
    }

    /// Whether the ray at `theta_deg` meets the target boundary.
    pub fn is_admissible(&self, theta_deg: f64) -> bool {
        let t = norm_deg(theta_deg);
        match self.geometry {
            Geometry::StripChordal | Geometry::CirclePartial { .. } | Geometry::CircleTangent => {
                t > 0.0 && t < 180.0
            }
            Geometry::StripRadial { .. } => t != 0.0 && t != 180.0,
            Geometry::Triangle | Geometry::CircleCentered | Geometry::CircleOffcenter { .. } => {
                theta_deg.is_finite()
            }
        }
    }

    fn check_admissible(&self, theta_deg: f64) -> Result<f64> {
        if self.is_admissible(theta_deg) {
            Ok(norm_deg(theta_deg))
        } else {
            Err(Error::NoBoundary(theta_deg))
        }
    }

    /// Triangle side containing polar angle `t` (half-open 120° sectors).
    fn triangle_side(t: f64) -> usize {
        ((t / 120.0).floor() as usize).min(2)
    }

    pub fn radial_distance(&self, theta_deg: f64) -> Result<f64> {
        Ok(self.boundary_geometry(theta_deg)?.d)
    }

    pub fn boundary_geometry(&self, theta_deg: f64) -> Result<BoundaryGeometry> {
        let t = self.check_admissible(theta_deg)?;
        let r = t.to_radians();
        let (d, normal_deg) = match self.geometry {
            Geometry::StripChordal => (1.0 / r.sin(), 90.0),
            Geometry::StripRadial { h } => {
                let h = h.value();
                let s = r.sin();
                if s > 0.0 {
                    ((1.0 - h) / s, 90.0)
                } else {
                    (h / -s, 270.0)
                }
            }
            Geometry::Triangle => {
                let normal = 60.0 + 120.0 * Self::triangle_side(t) as f64;
                (0.5 / (t - normal).to_radians().cos(), normal)
            }
            _ => {
                let ((cx, cy), radius) = self.circle().expect("circle geometry");
                let (ux, uy) = (r.cos(), r.sin());
                let cu = cx * ux + cy * uy;
                let d = cu + (cu * cu + radius * radius - cx * cx - cy * cy).sqrt();
                let (px, py) = (d * ux, d * uy);
                ((d), (py - cy).atan2(px - cx).to_degrees())
            }
        };
        let alpha = mod180(normal_deg);
        Ok(BoundaryGeometry {
            d,
            alpha,
            tau: mod180(alpha + 90.0),
        })
    }

    /// `W = [D(θ) |cos(θ − α(θ))|]⁻¹`.
    pub fn thickness_weight(&self, theta_deg: f64) -> Result<f64> {
        let g = self.boundary_geometry(theta_deg)?;
        Ok(1.0 / (g.d * (theta_deg - g.alpha).to_radians().cos().abs()))
    }

    /// Arc length per unit polar angle (radians): `D(θ) / |cos(θ − α(θ))|`.
    pub fn arc_jacobian(&self, theta_deg: f64) -> Result<f64> {
        let g = self.boundary_geometry(theta_deg)?;
        Ok(g.d / (theta_deg - g.alpha).to_radians().cos().abs())
    }

    /// The dilation putting `endpoint` on `λ·∂D`.
    pub fn dilation_of(&self, endpoint: Site) -> Result<Scale> {
        let undefined = || Error::UndefinedDilation(endpoint.x as i64, endpoint.y as i64);
        if endpoint == Site::ORIGIN {
            return Err(undefined());
        }
        let (x, y) = (endpoint.x as i64, endpoint.y as i64);
        match self.geometry {
            Geometry::StripChordal => {
                if y <= 0 {
                    return Err(undefined());
                }
                Ok(Scale::rational(y, 1))
            }
            Geometry::StripRadial { h } => {
                if y > 0 {
                    Ok(Scale::rational(y * h.den, h.den - h.num))
                } else if y < 0 {
                    Ok(Scale::rational(-y * h.den, h.num))
                } else {
                    Err(undefined())
                }
            }
            Geometry::Triangle => {
                let forms = triangle_forms(endpoint);
                let mut best = forms[0];
                for f in &forms[1..] {
                    if cmp_surd3(*f, best) > 0 {
                        best = *f;
                    }
                }
                Ok(Scale::surd3(best.0, best.1))
            }
            Geometry::CircleCentered => {
                let r2 = endpoint.norm_sq();
                Ok(Scale {
                    value: (r2 as f64).sqrt(),
                    exact: ExactScale::SqrtInt(r2),
                })
            }
            Geometry::CircleTangent => {
                if y <= 0 {
                    return Err(undefined());
                }
                Ok(Scale::rational(endpoint.norm_sq(), 2 * y))
            }
            Geometry::CirclePartial { .. } | Geometry::CircleOffcenter { .. } => {
                if matches!(self.geometry, Geometry::CirclePartial { .. }) && y <= 0 {
                    return Err(undefined());
                }
                let ((cx, cy), radius) = self.circle().expect("circle geometry");
                let (xf, yf) = (x as f64, y as f64);
                let zc = xf * cx + yf * cy;
                let z2 = xf * xf + yf * yf;
                // Positive root of λ²(r² − |c|²) + 2λ z·c − |z|² = 0, rationalised.
                let disc = zc * zc + (radius * radius - cx * cx - cy * cy) * z2;
                Ok(Scale::new(z2 / (zc + disc.sqrt())))
            }
        }
    }

    /// Whether `s` lies strictly inside `λ·D`.
    #[inline]
    pub fn contains_strictly(&self, s: Site, scale: &Scale) -> bool {
        let y = s.y as i64;
        match (self.geometry, scale.exact) {
            (Geometry::StripChordal, ExactScale::Rational { num, den }) => {
                y > 0 && (y as i128) * (den as i128) < num as i128
            }
            (Geometry::StripRadial { h }, ExactScale::Rational { num, den }) => {
                let lhs = y as i128 * h.den as i128 * den as i128;
                -(h.num as i128) * (num as i128) < lhs
                    && lhs < (h.den - h.num) as i128 * num as i128
            }
            (Geometry::Triangle, ExactScale::Surd3 { a, b }) => triangle_forms(s)
                .iter()
                .all(|f| cmp_surd3((a, b), *f) > 0),
            (Geometry::CircleCentered, ExactScale::SqrtInt(r2)) => s.norm_sq() < r2,
            (Geometry::CircleTangent, ExactScale::Rational { num, den }) => {
                (s.norm_sq() as i128) * (den as i128) < 2 * (num as i128) * (y as i128)
            }
            _ => self.contains_strictly_f64(s, scale.value),
        }
    }

    fn contains_strictly_f64(&self, s: Site, lambda: f64) -> bool {
        let (xf, yf) = (s.x as f64, s.y as f64);
        match self.geometry {
            Geometry::StripChordal => s.y > 0 && yf < lambda,
            Geometry::StripRadial { h } => {
                let h = h.value();
                -h * lambda < yf && yf < (1.0 - h) * lambda
            }
            Geometry::Triangle => {
                let r3 = 3f64.sqrt();
                xf + r3 * yf < lambda && -2.0 * xf < lambda && xf - r3 * yf < lambda
            }
            _ => {
                let ((cx, cy), radius) = self.circle().expect("circle geometry");
                let (dx, dy) = (xf - lambda * cx, yf - lambda * cy);
                let inside = dx * dx + dy * dy < lambda * lambda * radius * radius;
                match self.geometry {
                    Geometry::CirclePartial { .. } => inside && s.y > 0,
                    _ => inside,
                }
            }
        }
    }

    /// The strict-interior indicator: every site other than the origin and
    /// the endpoint lies strictly inside `λ·D`.
    pub fn strictly_inside(&self, sites: &[Site], scale: &Scale) -> bool {
        let n = sites.len();
        if n <= 2 {
            return true;
        }
        // Alternate from both ends; violations cluster near either end.
        let (mut lo, mut hi) = (1usize, n - 2);
        while lo <= hi {
            if !self.contains_strictly(sites[lo], scale) {
                return false;
            }
            if hi != lo && !self.contains_strictly(sites[hi], scale) {
                return false;
            }
            lo += 1;
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        true
    }

    /// Conditioning window on the boundary parameter, if any.
    pub fn parameter_window(&self) -> Option<(f64, f64)> {
        match self.geometry {
            Geometry::CircleTangent => Some((0.0, 180.0)),
            _ => None,
        }
    }

    /// The endpoint's coordinate in the law's parametrisation of the
    /// unit-scale boundary.
    pub fn boundary_parameter(&self, endpoint: Site, scale: &Scale) -> Result<BoundaryParam> {
        let lambda = scale.value;
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("non-positive dilation {lambda}")));
        }
        let (u, v) = (endpoint.x as f64 / lambda, endpoint.y as f64 / lambda);
        let theta = endpoint.polar_deg();
        let value = match self.geometry {
            Geometry::StripChordal => endpoint.x as f64 / endpoint.y as f64,
            Geometry::StripRadial { .. } => theta,
            Geometry::Triangle => theta % 120.0,
            Geometry::CircleCentered => theta % 90.0,
            Geometry::CircleOffcenter { a, b } => norm_deg((v - b).atan2(u - a).to_degrees()),
            Geometry::CirclePartial { b } => (v - b).atan2(u).to_degrees(),
            Geometry::CircleTangent => {
                let phi = (v - 1.0).atan2(u).to_degrees();
                // Upper half ⇔ |x| ≤ y, decided exactly.
                if (endpoint.x as i64).abs() <= endpoint.y as i64 {
                    return Ok(BoundaryParam::Value(phi.clamp(0.0, 180.0)));
                }
                return Ok(BoundaryParam::WindowedOut(phi));
            }
        };
        Ok(BoundaryParam::Value(value))
    }

    /// Signed residual of the unit-scale boundary equation at `(u, v)`,
    /// for the boundary piece facing the point.
    pub fn boundary_residual(&self, u: f64, v: f64) -> f64 {
        match self.geometry {
            Geometry::StripChordal => v - 1.0,
            Geometry::StripRadial { h } => {
                let h = h.value();
                if v > 0.0 {
                    v - (1.0 - h)
                } else {
                    -v - h
                }
            }
            Geometry::Triangle => {
                let r3 = 3f64.sqrt();
                (u + r3 * v).max(-2.0 * u).max(u - r3 * v) - 1.0
            }
            _ => {
                let ((cx, cy), radius) = self.circle().expect("circle geometry");
                ((u - cx).powi(2) + (v - cy).powi(2)).sqrt() - radius
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(name: &str) -> StarDomain {
        StarDomain::from_name(name).unwrap()
    }

    fn all_domains() -> Vec<StarDomain> {
        Geometry::NAMES.iter().map(|n| dom(n)).collect()
    }

    #[test]
    fn radial_distance_examples() {
        let c = dom("circle_centered");
        for t in [0.0, 37.0, 211.5] {
            assert!((c.radial_distance(t).unwrap() - 1.0).abs() < 1e-15);
        }
        let s = dom("strip_chordal");
        assert!((s.radial_distance(90.0).unwrap() - 1.0).abs() < 1e-15);
        for t in [10.0f64, 45.0, 133.0] {
            let want = 1.0 / t.to_radians().sin();
            assert!((s.radial_distance(t).unwrap() - want).abs() < 1e-12);
        }
        let tri = dom("triangle");
        assert!((tri.radial_distance(180.0).unwrap() - 0.5).abs() < 1e-15);
        // Vertices sit at unit distance.
        assert!((tri.radial_distance(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((tri.radial_distance(119.999_999).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_boundary_outside_admissible_set() {
        assert!(matches!(dom("strip_chordal").radial_distance(270.0), Err(Error::NoBoundary(_))));
        assert!(dom("strip_radial").radial_distance(180.0).is_err());
        assert!(dom("circle_tangent").radial_distance(0.0).is_err());
    }

    #[test]
    fn boundary_geometry_examples() {
        let g = dom("circle_centered").boundary_geometry(37.0).unwrap();
        assert!((g.alpha - 37.0).abs() < 1e-12 && (g.tau - 127.0).abs() < 1e-12);
        for name in ["strip_chordal", "strip_radial"] {
            for t in [20.0, 90.0, 250.0] {
                if let Ok(g) = dom(name).boundary_geometry(t) {
                    assert_eq!((g.alpha, g.tau), (90.0, 0.0));
                }
            }
        }
        let g = dom("triangle").boundary_geometry(30.0).unwrap();
        assert!((g.alpha - 60.0).abs() < 1e-12 && (g.tau - 150.0).abs() < 1e-12);
        let g = dom("triangle").boundary_geometry(200.0).unwrap();
        assert!((g.alpha - 0.0).abs() < 1e-12 && (g.tau - 90.0).abs() < 1e-12);
    }

    #[test]
    fn dilation_examples() {
        let l = dom("circle_centered").dilation_of(Site::new(3, 4)).unwrap();
        assert_eq!(l.value, 5.0);
        let l = dom("strip_radial").dilation_of(Site::new(7, -2)).unwrap();
        assert_eq!(l.value, 8.0);
        let l = dom("circle_tangent").dilation_of(Site::new(0, 2)).unwrap();
        assert_eq!(l.value, 1.0);
        assert!(matches!(
            dom("triangle").dilation_of(Site::ORIGIN),
            Err(Error::UndefinedDilation(0, 0))
        ));
        assert!(dom("strip_radial").dilation_of(Site::new(4, 0)).is_err());
        assert!(dom("strip_chordal").dilation_of(Site::new(4, 0)).is_err());
    }

    #[test]
    fn triangle_dilation_is_exact_gauge() {
        let t = dom("triangle");
        // On the vertical side x = -λ/2.
        let l = t.dilation_of(Site::new(-3, 1)).unwrap();
        assert_eq!(l.exact, ExactScale::Surd3 { a: 6, b: 0 });
        // On the 0–120 side: x + √3 y.
        let l = t.dilation_of(Site::new(2, 3)).unwrap();
        assert_eq!(l.exact, ExactScale::Surd3 { a: 2, b: 3 });
    }

    #[test]
    fn surd_sign() {
        assert_eq!(sign_surd3(0, 0), 0);
        assert_eq!(sign_surd3(2, -1), 1); // 2 - 1.732
        assert_eq!(sign_surd3(1, -1), -1);
        assert_eq!(sign_surd3(-2, 1), -1);
        assert_eq!(sign_surd3(-1, 1), 1);
        assert_eq!(sign_surd3(97, -56), 1); // 97 - 96.99...
        assert_eq!(sign_surd3(-97, 56), -1);
    }

    #[test]
    fn thickness_weight_examples() {
        let c = dom("circle_centered");
        let s = dom("strip_chordal");
        for k in 0..10 {
            let t = 5.0 + 17.0 * k as f64;
            assert!((c.thickness_weight(t).unwrap() - 1.0).abs() < 1e-12);
            assert!((s.thickness_weight(t).unwrap() - 1.0).abs() < 1e-12);
        }
        let off = dom("circle_offcenter");
        let g = off.boundary_geometry(0.0).unwrap();
        assert!((g.d - 1.75).abs() < 1e-15 && g.alpha.abs() < 1e-15);
        assert!((off.thickness_weight(0.0).unwrap() - 4.0 / 7.0).abs() < 1e-15);
        // Radial strip: thickness h dλ below, (1 − h) dλ above.
        let r = dom("strip_radial");
        assert!((r.thickness_weight(60.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.thickness_weight(300.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((dom("triangle").thickness_weight(77.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn strict_interior_examples() {
        let s = dom("strip_chordal");
        let walk = [Site::new(0, 0), Site::new(0, 1), Site::new(0, 2), Site::new(1, 2), Site::new(1, 3)];
        let l = s.dilation_of(walk[4]).unwrap();
        assert!(s.strictly_inside(&walk, &l));
        // Interior site on the line y = λ.
        let walk = [Site::new(0, 0), Site::new(0, 1), Site::new(0, 2), Site::new(1, 2), Site::new(2, 2), Site::new(2, 1)];
        let l = Scale::rational(2, 1);
        assert!(!s.strictly_inside(&walk[..5], &l));
        // Interior site on y = 0 is not strictly inside either.
        let walk = [Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(1, 2)];
        let l = s.dilation_of(walk[3]).unwrap();
        assert!(!s.strictly_inside(&walk, &l));
        // Well inside: every site at most 0.9 λ away on the centered circle.
        let c = dom("circle_centered");
        let walk = [Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(1, 2), Site::new(1, 3), Site::new(2, 3), Site::new(3, 3)];
        let l = c.dilation_of(walk[6]).unwrap();
        assert!(c.strictly_inside(&walk, &l));
    }

    #[test]
    fn partial_circle_excludes_real_axis() {
        let d = dom("circle_partial");
        let walk = [Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(1, 2)];
        let l = d.dilation_of(walk[3]).unwrap();
        assert!(!d.strictly_inside(&walk, &l));
        let walk = [Site::new(0, 0), Site::new(0, 1), Site::new(0, 2), Site::new(1, 2)];
        let l = d.dilation_of(walk[3]).unwrap();
        assert!(d.strictly_inside(&walk, &l));
    }

    #[test]
    fn boundary_parameter_examples() {
        let s = dom("strip_chordal");
        let e = Site::new(5, 5);
        let l = s.dilation_of(e).unwrap();
        assert_eq!(l.value, 5.0);
        assert_eq!(s.boundary_parameter(e, &l).unwrap(), BoundaryParam::Value(1.0));

        let off = dom("circle_offcenter");
        let e = Site::new(7, 0);
        let l = off.dilation_of(e).unwrap();
        assert!((l.value - 4.0).abs() < 1e-12);
        assert_eq!(off.boundary_parameter(e, &l).unwrap(), BoundaryParam::Value(0.0));

        // Top of the tangent circle: φ = 90 about the scaled centre.
        let t = dom("circle_tangent");
        let e = Site::new(0, 6);
        let l = t.dilation_of(e).unwrap();
        assert_eq!(t.boundary_parameter(e, &l).unwrap(), BoundaryParam::Value(90.0));
        let e = Site::new(5, 1);
        let l = t.dilation_of(e).unwrap();
        assert!(matches!(t.boundary_parameter(e, &l).unwrap(), BoundaryParam::WindowedOut(_)));
        assert_eq!(t.parameter_window(), Some((0.0, 180.0)));
    }

    #[test]
    fn star_shape_single_valued_continuous() {
        for d in all_domains() {
            let mut prev: Option<f64> = None;
            let mut t = 0.05;
            while t < 360.0 {
                if d.is_admissible(t) && d.is_admissible(t - 0.1) {
                    let r = d.radial_distance(t).unwrap();
                    assert!(r > 0.0 && r.is_finite());
                    if let Some(p) = prev.filter(|p| p.max(r) < 5.0) {
                        // Continuity at 0.1° resolution where D stays bounded.
                        assert!((r - p).abs() < 0.05 * r.max(p) + 0.01, "{d:?} jump at {t}: {p} -> {r}");
                    }
                    prev = Some(r);
                } else {
                    prev = None;
                }
                t += 0.1;
            }
        }
    }

    #[test]
    fn weight_is_positive_and_bounded_on_window() {
        for d in all_domains() {
            let mut t = 0.01;
            while t < 360.0 {
                if d.is_admissible(t) {
                    let inside_window = match d.geometry() {
                        Geometry::CircleTangent => (45.0..=135.0).contains(&t),
                        Geometry::StripChordal | Geometry::StripRadial { .. } => true,
                        _ => true,
                    };
                    if inside_window {
                        let w = d.thickness_weight(t).unwrap();
                        assert!(w > 0.0 && w.is_finite(), "{d:?} at {t}: {w}");
                        assert!(w < 10.0, "{d:?} at {t}: {w}");
                    }
                }
                t += 0.01;
            }
        }
    }

    fn arb_endpoint() -> impl Strategy<Value = Site> {
        (-400i32..400, -400i32..400).prop_filter("not origin", |(x, y)| (*x, *y) != (0, 0))
            .prop_map(|(x, y)| Site::new(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn rescaled_endpoint_lies_on_unit_boundary(e in arb_endpoint(), k in 2i32..9) {
            for d in all_domains() {
                if let Ok(l) = d.dilation_of(e) {
                    let res = d.boundary_residual(e.x as f64 / l.value, e.y as f64 / l.value);
                    prop_assert!(res.abs() < 1e-12, "{:?} {e}: residual {res}", d);
                    let lk = d.dilation_of(Site::new(k * e.x, k * e.y)).unwrap();
                    let ratio = lk.value / (k as f64 * l.value);
                    prop_assert!((ratio - 1.0).abs() < 1e-12);
                    // Exact representations scale exactly.
                    match (l.exact, lk.exact) {
                        (ExactScale::Rational { num, den }, ExactScale::Rational { num: n2, den: d2 }) => {
                            prop_assert_eq!(n2 as i128 * den as i128, k as i128 * num as i128 * d2 as i128);
                        }
                        (ExactScale::Surd3 { a, b }, ExactScale::Surd3 { a: a2, b: b2 }) => {
                            prop_assert_eq!((a2, b2), (k as i64 * a, k as i64 * b));
                        }
                        _ => {}
                    }
                    let theta = e.polar_deg();
                    prop_assert!(d.is_admissible(theta));
                    let r = (e.norm_sq() as f64).sqrt();
                    let dd = d.radial_distance(theta).unwrap();
                    prop_assert!((r / dd / l.value - 1.0).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn exact_and_float_interior_tests_agree_off_boundary(e in arb_endpoint(), s in arb_endpoint()) {
            for d in all_domains() {
                if let Ok(l) = d.dilation_of(e) {
                    let exact = d.contains_strictly(s, &l);
                    let float = d.contains_strictly_f64(s, l.value);
                    let res = d.boundary_residual(s.x as f64 / l.value, s.y as f64 / l.value);
                    if res.abs() > 1e-9 && s.y != 0 {
                        prop_assert_eq!(exact, float, "{:?} e={} s={}", d, e, s);
                    }
                }
            }
        }
    }
}
