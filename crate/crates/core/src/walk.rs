//! Square-lattice self-avoiding walks and the pivot move.
//!
//! Walks are anchored at the origin and stored in unit lattice coordinates.
//! The occupancy index maps a packed site to its position along the walk, so
//! a pivot proposal can tell whether a collision involves the fixed or the
//! moving part of the walk.

use rand::Rng;
use rustc_hash::FxHashMap;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Site { x, y }
    }

    #[inline]
    fn key(self) -> u64 {
        ((self.x as u32 as u64) << 32) | (self.y as u32 as u64)
    }

    #[inline]
    fn offset(self, other: Site) -> Site {
        Site::new(self.x - other.x, self.y - other.y)
    }

    #[inline]
    fn translate(self, by: Site) -> Site {
        Site::new(self.x + by.x, self.y + by.y)
    }

    pub fn is_unit_step_to(self, other: Site) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn norm_sq(self) -> i64 {
        let (x, y) = (self.x as i64, self.y as i64);
        x * x + y * y
    }

    /// Polar angle in degrees, in `[0, 360)`.
    pub fn polar_deg(self) -> f64 {
        let a = (self.y as f64).atan2(self.x as f64).to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Point-group element of the square lattice as an integer 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PivotSymmetry {
    m: [[i32; 2]; 2],
}

impl PivotSymmetry {
    pub const IDENTITY: Self = Self::from_rows([1, 0], [0, 1]);
    pub const ROT90: Self = Self::from_rows([0, -1], [1, 0]);
    pub const ROT180: Self = Self::from_rows([-1, 0], [0, -1]);
    pub const ROT270: Self = Self::from_rows([0, 1], [-1, 0]);
    /// y -> -y
    pub const FLIP_X_AXIS: Self = Self::from_rows([1, 0], [0, -1]);
    /// x -> -x
    pub const FLIP_Y_AXIS: Self = Self::from_rows([-1, 0], [0, 1]);
    pub const FLIP_DIAGONAL: Self = Self::from_rows([0, 1], [1, 0]);
    pub const FLIP_ANTIDIAGONAL: Self = Self::from_rows([0, -1], [-1, 0]);

    pub const ALL: [Self; 8] = [
        Self::IDENTITY,
        Self::ROT90,
        Self::ROT180,
        Self::ROT270,
        Self::FLIP_X_AXIS,
        Self::FLIP_Y_AXIS,
        Self::FLIP_DIAGONAL,
        Self::FLIP_ANTIDIAGONAL,
    ];

    /// The seven proposals used by the pivot move.
    pub const NON_IDENTITY: [Self; 7] = [
        Self::ROT90,
        Self::ROT180,
        Self::ROT270,
        Self::FLIP_X_AXIS,
        Self::FLIP_Y_AXIS,
        Self::FLIP_DIAGONAL,
        Self::FLIP_ANTIDIAGONAL,
    ];

    const fn from_rows(r0: [i32; 2], r1: [i32; 2]) -> Self {
        PivotSymmetry { m: [r0, r1] }
    }

    pub fn matrix(&self) -> [[i32; 2]; 2] {
        self.m
    }

    pub fn determinant(&self) -> i32 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    #[inline]
    pub fn apply(&self, v: Site) -> Site {
        Site::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    /// Orthogonal integer matrix, so the inverse is the transpose.
    pub fn inverse(&self) -> Self {
        Self::from_rows([self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]])
    }

    pub fn compose(&self, then: &Self) -> Self {
        let a = &then.m;
        let b = &self.m;
        let mut m = [[0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        PivotSymmetry { m }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    FullPlane,
    /// Every site, the origin included, has `y >= 0`.
    HalfPlane,
}

impl Constraint {
    #[inline]
    pub fn admits(self, s: Site) -> bool {
        match self {
            Constraint::FullPlane => true,
            Constraint::HalfPlane => s.y >= 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::FullPlane => "full_plane",
            Constraint::HalfPlane => "half_plane",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full_plane" => Ok(Constraint::FullPlane),
            "half_plane" => Ok(Constraint::HalfPlane),
            other => Err(Error::Parse(format!("unknown constraint `{other}`"))),
        }
    }
}

/// An N-step self-avoiding walk starting at the origin.
///
/// Sites are kept twice: in lattice coordinates, and in an internal frame
/// related to them by a global symmetry plus translation. The occupancy
/// index lives in the internal frame, so an accepted pivot only re-indexes
/// the shorter arm; moving the longer arm is absorbed into the global map.
/// Index entries are never removed: an entry is live iff the site it points
/// to still sits at that key.
#[derive(Clone, Debug)]
pub struct LatticeWalk {
    sites: Vec<Site>,
    internal: Vec<Site>,
    frame: PivotSymmetry,
    shift: Site,
    occupancy: FxHashMap<u64, u32>,
    scratch: Vec<Site>,
}

impl PartialEq for LatticeWalk {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites
    }
}

impl Eq for LatticeWalk {}

impl LatticeWalk {
    /// The straight walk `0, d, 2d, ..., n d`.
    pub fn rod(n: usize, direction: Site) -> Result<Self> {
        if !Site::ORIGIN.is_unit_step_to(direction) {
            return Err(Error::InvalidArgument(format!(
                "rod direction {direction} is not a unit lattice vector"
            )));
        }
        let n_i32 = i32::try_from(n)
            .map_err(|_| Error::InvalidArgument(format!("walk length {n} too large")))?;
        let sites = (0..=n_i32)
            .map(|i| Site::new(i * direction.x, i * direction.y))
            .collect();
        Self::from_sites(sites)
    }

    pub fn from_sites(sites: Vec<Site>) -> Result<Self> {
        if sites.first() != Some(&Site::ORIGIN) {
            return Err(Error::InvalidArgument("walk must start at the origin".into()));
        }
        if !check_self_avoiding(&sites) {
            return Err(Error::InvalidArgument("sites do not form a self-avoiding walk".into()));
        }
        let mut walk = LatticeWalk {
            internal: sites.clone(),
            sites,
            frame: PivotSymmetry::IDENTITY,
            shift: Site::ORIGIN,
            occupancy: FxHashMap::default(),
            scratch: Vec::new(),
        };
        walk.rebuild_index();
        Ok(walk)
    }

    fn rebuild_index(&mut self) {
        self.occupancy.clear();
        self.occupancy.reserve(4 * self.internal.len());
        for (i, s) in self.internal.iter().enumerate() {
            self.occupancy.insert(s.key(), i as u32);
        }
    }

    /// Index of the site at internal position `key`, if any.
    #[inline]
    fn occupant(&self, s: Site) -> Option<usize> {
        match self.occupancy.get(&s.key()) {
            Some(&j) if self.internal[j as usize] == s => Some(j as usize),
            _ => None,
        }
    }

    #[inline]
    fn to_lattice(&self, s: Site) -> Site {
        self.frame.apply(s).translate(self.shift)
    }

    pub fn n_steps(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn endpoint(&self) -> Site {
        self.sites[self.sites.len() - 1]
    }

    pub fn index_of(&self, s: Site) -> Option<usize> {
        let g_inv = self.frame.inverse();
        self.occupant(g_inv.apply(s.offset(self.shift)))
    }

    /// The occupancy index and the internal frame agree with the sites.
    pub fn occupancy_consistent(&self) -> bool {
        self.internal.len() == self.sites.len()
            && self
                .internal
                .iter()
                .zip(&self.sites)
                .all(|(i, s)| self.to_lattice(*i) == *s)
            && self
                .sites
                .iter()
                .enumerate()
                .all(|(i, s)| self.index_of(*s) == Some(i))
    }

    /// Proposes the pivot of every site after `pivot` by `g` about site
    /// `pivot`. Applies it and returns `true` if the result is self-avoiding
    /// and satisfies `constraint`; otherwise leaves the walk untouched.
    pub fn try_pivot(&mut self, pivot: usize, g: PivotSymmetry, constraint: Constraint) -> bool {
        let n = self.n_steps();
        assert!(pivot < n, "pivot site {pivot} has no tail (N = {n})");
        let p = self.sites[pivot];
        let q = self.internal[pivot];
        // The same move expressed in the internal frame.
        let h = self.frame.compose(&g).compose(&self.frame.inverse());
        let tail_len = n - pivot;

        if tail_len <= pivot {
            let mut scratch = std::mem::take(&mut self.scratch);
            scratch.clear();
            let mut ok = true;
            for (i, s) in self.internal[pivot + 1..].iter().enumerate() {
                let t = q.translate(h.apply(s.offset(q)));
                if let Some(j) = self.occupant(t) {
                    if j < pivot {
                        ok = false;
                        break;
                    }
                }
                if constraint == Constraint::HalfPlane {
                    let a = p.translate(g.apply(self.sites[pivot + 1 + i].offset(p)));
                    if !constraint.admits(a) {
                        ok = false;
                        break;
                    }
                }
                scratch.push(t);
            }
            if ok {
                for (i, t) in scratch.iter().enumerate() {
                    let idx = pivot + 1 + i;
                    self.internal[idx] = *t;
                    self.sites[idx] = p.translate(g.apply(self.sites[idx].offset(p)));
                    self.occupancy.insert(t.key(), idx as u32);
                }
            }
            self.scratch = scratch;
            if !ok {
                return false;
            }
        } else {
            let h_inv = h.inverse();
            for s in self.internal[..pivot].iter().rev() {
                let t = q.translate(h_inv.apply(s.offset(q)));
                if let Some(j) = self.occupant(t) {
                    if j > pivot {
                        return false;
                    }
                }
            }
            if constraint == Constraint::HalfPlane {
                let admissible = self.sites[pivot + 1..]
                    .iter()
                    .all(|s| constraint.admits(p.translate(g.apply(s.offset(p)))));
                if !admissible {
                    return false;
                }
            }
            for idx in 0..pivot {
                let t = q.translate(h_inv.apply(self.internal[idx].offset(q)));
                self.internal[idx] = t;
                self.occupancy.insert(t.key(), idx as u32);
            }
            for s in &mut self.sites[pivot + 1..] {
                *s = p.translate(g.apply(s.offset(p)));
            }
            // New global map: x -> p + g(frame(x) + shift - p).
            self.frame = self.frame.compose(&g);
            self.shift = p.translate(g.apply(self.shift.offset(p)));
        }
        if self.occupancy.len() > 8 * self.internal.len() {
            self.rebuild_index();
        }
        true
    }

    /// One pivot attempt: pivot site uniform on `0..N`, symmetry uniform over
    /// the seven non-identity elements.
    pub fn pivot_once<R: Rng + ?Sized>(&mut self, rng: &mut R, constraint: Constraint) -> bool {
        let n = self.n_steps();
        if n == 0 {
            return false;
        }
        let pivot = rng.random_range(0..n);
        let g = PivotSymmetry::NON_IDENTITY[rng.random_range(0..7)];
        self.try_pivot(pivot, g, constraint)
    }

    pub fn transformed(&self, g: PivotSymmetry) -> LatticeWalk {
        let sites = self.sites.iter().map(|s| g.apply(*s)).collect();
        LatticeWalk::from_sites(sites).expect("lattice symmetries preserve self-avoidance")
    }
}

/// O(N) oracle: unit steps and pairwise distinct sites.
pub fn check_self_avoiding(sites: &[Site]) -> bool {
    let mut seen = HashSet::with_capacity(sites.len());
    for (i, s) in sites.iter().enumerate() {
        if i > 0 && !sites[i - 1].is_unit_step_to(*s) {
            return false;
        }
        if !seen.insert(*s) {
            return false;
        }
    }
    true
}

/// Direction of a line through the origin.
///
/// Lines whose slope is rational are kept as integer direction vectors so
/// the side test is an exact cross product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineDirection {
    Lattice { dx: i64, dy: i64 },
    Angle { cos: f64, sin: f64 },
}

/// Largest denominator recognised when snapping an angle to a lattice slope.
const SNAP_MAX_DENOMINATOR: i64 = 12;
const SNAP_TOLERANCE_DEG: f64 = 1e-9;

impl LineDirection {
    /// Builds the direction of the line at `theta_deg`. Angles within 1e-9°
    /// of a slope `p/q` with `|p|, |q| <= 12` snap to the exact lattice
    /// direction.
    pub fn from_degrees(theta_deg: f64) -> Self {
        if let Some((dx, dy)) = snap_to_lattice(theta_deg) {
            return LineDirection::Lattice { dx, dy };
        }
        let r = theta_deg.to_radians();
        LineDirection::Angle {
            cos: r.cos(),
            sin: r.sin(),
        }
    }

    pub fn lattice(dx: i64, dy: i64) -> Self {
        LineDirection::Lattice { dx, dy }
    }

    /// True iff `s` lies strictly to the left of the directed line.
    #[inline]
    pub fn strictly_left(&self, s: Site) -> bool {
        match *self {
            LineDirection::Lattice { dx, dy } => dx * s.y as i64 - dy * s.x as i64 > 0,
            LineDirection::Angle { cos, sin } => cos * s.y as f64 - sin * s.x as f64 > 0.0,
        }
    }

    pub fn degrees(&self) -> f64 {
        let a = match *self {
            LineDirection::Lattice { dx, dy } => (dy as f64).atan2(dx as f64),
            LineDirection::Angle { cos, sin } => sin.atan2(cos),
        }
        .to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }
}

fn snap_to_lattice(theta_deg: f64) -> Option<(i64, i64)> {
    let t = theta_deg.rem_euclid(360.0);
    for q in 0..=SNAP_MAX_DENOMINATOR {
        for p in 0..=SNAP_MAX_DENOMINATOR {
            if (p == 0 && q == 0) || gcd(p, q) != 1 {
                continue;
            }
            for (dx, dy) in [(q, p), (-p, q), (-q, -p), (p, -q)] {
                let a = (dy as f64).atan2(dx as f64).to_degrees().rem_euclid(360.0);
                let d = (a - t).abs();
                if d < SNAP_TOLERANCE_DEG || (360.0 - d) < SNAP_TOLERANCE_DEG {
                    return Some((dx, dy));
                }
            }
        }
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// True iff every site except the origin lies strictly above (to the left
/// of) the line through the origin at `theta_deg`.
pub fn stays_strictly_one_side(sites: &[Site], theta_deg: f64) -> bool {
    stays_strictly_left_of(sites, LineDirection::from_degrees(theta_deg))
}

pub fn stays_strictly_left_of(sites: &[Site], line: LineDirection) -> bool {
    sites.iter().skip(1).all(|s| line.strictly_left(*s))
}

/// Brute-force enumeration of every `n`-step SAW from the origin.
pub fn enumerate_saws(n: usize, constraint: Constraint) -> Vec<Vec<Site>> {
    const STEPS: [Site; 4] = [Site::new(1, 0), Site::new(0, 1), Site::new(-1, 0), Site::new(0, -1)];

    fn extend(
        path: &mut Vec<Site>,
        seen: &mut HashSet<Site>,
        n: usize,
        constraint: Constraint,
        out: &mut Vec<Vec<Site>>,
    ) {
        if path.len() == n + 1 {
            out.push(path.clone());
            return;
        }
        let last = *path.last().unwrap();
        for step in STEPS {
            let next = last.translate(step);
            if !constraint.admits(next) || seen.contains(&next) {
                continue;
            }
            seen.insert(next);
            path.push(next);
            extend(path, seen, n, constraint, out);
            path.pop();
            seen.remove(&next);
        }
    }

    let mut out = Vec::new();
    let mut path = vec![Site::ORIGIN];
    let mut seen = HashSet::from([Site::ORIGIN]);
    extend(&mut path, &mut seen, n, constraint, &mut out);
    out
}
