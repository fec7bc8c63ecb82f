//! The lattice-effect function `l(θ)`: `N^ρ` times the probability that an
//! N-step full-plane SAW stays strictly on one side (the left of the
//! directed line) of the line through the origin at angle θ.
//!
//! One chain serves every angle. For each sample the set of angles whose
//! line the walk stays strictly left of is an open arc
//! `(max φ − 180°, min φ)` of the unwrapped site angles, empty once the
//! walk winds through 180° or more. Grid angles are read off that arc;
//! rational-tangent angles, where lattice sites can sit exactly on the line,
//! use the exact integer side test instead. Every estimate averages the four
//! lattice rotations of each sample.
//!
//! Values are normalised so that the generic curve integrates to 1 over a
//! full turn, i.e. `4 ∫_0^90 l = 1`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::batch::{self, ratio_with_error, DEFAULT_BATCHES};
use crate::chain::{chain_seed, Chain, ChainConfig};
use crate::error::{Error, Result};
use crate::exponents::{Rational, SAW};
use crate::walk::{Constraint, LineDirection, Site};

pub const DEFAULT_GRID_STEP: f64 = 0.5;

/// Default special angles as slopes `p/q` in `[0°, 45°]`.
pub const DEFAULT_SPECIALS: [(i64, i64); 5] = [(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)];

/// Finite-size correction exponent assumed by [`extrapolate`].
pub const EXTRAPOLATION_EXPONENT: f64 = 0.5;

const TABLE_MAGIC: &str = "# saw-dilation lattice-effect table v1";

/// A rational-tangent angle `atan(p/q)` in `[0°, 45°]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecialAngle {
    pub p: i64,
    pub q: i64,
}

impl SpecialAngle {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if !(p >= 0 && q > 0 && p <= q) {
            return Err(Error::InvalidArgument(format!(
                "special slope {p}/{q} must satisfy 0 <= p <= q, q > 0"
            )));
        }
        Ok(SpecialAngle { p, q })
    }

    pub fn degrees(&self) -> f64 {
        (self.p as f64).atan2(self.q as f64).to_degrees()
    }

    /// Directed lines at this angle and at its mirror `90° − θ`, under the
    /// four lattice rotations, without duplicates.
    fn directions(&self) -> Vec<LineDirection> {
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(8);
        for (dx, dy) in [(self.q, self.p), (self.p, self.q)] {
            for d in [(dx, dy), (-dy, dx), (-dx, -dy), (dy, -dx)] {
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
        out.into_iter().map(|(dx, dy)| LineDirection::lattice(dx, dy)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LEntry {
    pub theta: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Polar angle in quarter turns, `[0, 4)`: a monotone, cheap stand-in for
/// `atan2` with `pseudo_angle(−v) = pseudo_angle(v) ± 2`.
fn pseudo_angle(s: Site) -> f64 {
    let (x, y) = (s.x as f64, s.y as f64);
    let d = x.abs() + y.abs();
    if y >= 0.0 {
        if x >= 0.0 {
            y / d
        } else {
            1.0 - x / d
        }
    } else if x < 0.0 {
        2.0 - y / d
    } else {
        3.0 + x / d
    }
}

/// The open arc of directed-line angles (degrees, unwrapped) that the walk
/// stays strictly left of, or `None` if it winds through 180° or more.
pub fn one_side_arc(sites: &[Site]) -> Option<(f64, f64)> {
    if sites.len() < 2 {
        return Some((-f64::INFINITY, f64::INFINITY));
    }
    let first = pseudo_angle(sites[1]);
    let (mut lo, mut hi, mut cur, mut prev) = (first, first, first, first);
    let (mut i_lo, mut i_hi) = (1, 1);
    // Sites within |x|, |y| < 2^20 are never within 1e-12 of a half turn
    // apart unless exactly so, and then no line separates them.
    let limit = 2.0 - 1e-12;
    for (i, s) in sites.iter().enumerate().skip(2) {
        let a = pseudo_angle(*s);
        let mut d = a - prev;
        if d > 2.0 {
            d -= 4.0;
        } else if d < -2.0 {
            d += 4.0;
        }
        prev = a;
        cur += d;
        if cur < lo {
            lo = cur;
            i_lo = i;
        } else if cur > hi {
            hi = cur;
            i_hi = i;
        }
        if hi - lo >= limit {
            return None;
        }
    }
    // Back to degrees on the same unwrapped sheet.
    let unwrap = |v: f64, s: Site| s.polar_deg() + 90.0 * 4.0 * ((v - pseudo_angle(s)) / 4.0).round();
    let (lo, hi) = (unwrap(lo, sites[i_lo]), unwrap(hi, sites[i_hi]));
    Some((hi - 180.0, lo))
}

/// Generic grid in `[0°, 90°)` avoiding the special angles and their mirrors.
pub fn generic_grid(step: f64, specials: &[SpecialAngle]) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {step} must lie in (0, 1]")));
    }
    let n = (90.0 / step).round() as usize;
    if ((n as f64) * step - 90.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("grid step {step} must divide 90")));
    }
    let mut avoid: Vec<f64> = specials.iter().flat_map(|s| [s.degrees(), 90.0 - s.degrees()]).collect();
    avoid.push(90.0);
    let grid = (0..n)
        .map(|k| {
            let t = k as f64 * step;
            if avoid.iter().any(|a| (a - t).abs() < 1e-9) {
                t + 0.5 * step
            } else {
                t
            }
        })
        .collect();
    Ok(grid)
}

/// Per-chain accumulator of the one-side indicators.
#[derive(Clone, Debug)]
pub struct LAccumulator {
    grid: Vec<f64>,
    /// Grid angles plus their 90°, 180°, 270° rotations, sorted, with the
    /// grid index each came from.
    full: Vec<(f64, usize)>,
    specials: Vec<SpecialAngle>,
    directions: Vec<Vec<LineDirection>>,
    total_samples: u64,
    /// Row-major `batches × grid` and `batches × specials` sums of the
    /// rotation-averaged indicators.
    grid_sums: Vec<f64>,
    special_sums: Vec<f64>,
    counts: Vec<f64>,
}

impl LAccumulator {
    pub fn new(grid: Vec<f64>, specials: Vec<SpecialAngle>, total_samples: u64) -> Self {
        let mut full: Vec<(f64, usize)> = (0..4)
            .flat_map(|k| grid.iter().enumerate().map(move |(i, g)| (g + 90.0 * k as f64, i)))
            .collect();
        full.sort_by(|a, b| a.0.total_cmp(&b.0));
        let directions = specials.iter().map(|s| s.directions()).collect();
        LAccumulator {
            grid_sums: vec![0.0; DEFAULT_BATCHES * grid.len()],
            special_sums: vec![0.0; DEFAULT_BATCHES * specials.len()],
            counts: vec![0.0; DEFAULT_BATCHES],
            grid,
            full,
            specials,
            directions,
            total_samples,
        }
    }

    pub fn observe(&mut self, sites: &[Site], sample_index: u64) {
        let b = batch::batch_of(sample_index, self.total_samples, DEFAULT_BATCHES);
        self.counts[b] += 1.0;
        let Some((lo, hi)) = one_side_arc(sites) else {
            return;
        };
        let ng = self.grid.len();
        let row = &mut self.grid_sums[b * ng..(b + 1) * ng];
        // Angles a in [0, 360) with a + 360k in (lo, hi) for some k.
        let width = hi - lo;
        if width >= 360.0 {
            for v in row.iter_mut() {
                *v += 1.0;
            }
        } else {
            let start = lo.rem_euclid(360.0);
            let end = start + width;
            let mut add = |from: f64, to: f64| {
                let i0 = self.full.partition_point(|(a, _)| *a <= from);
                for &(a, g) in &self.full[i0..] {
                    if a >= to {
                        break;
                    }
                    row[g] += 0.25;
                }
            };
            add(start, end.min(360.0));
            if end > 360.0 {
                add(-1.0, end - 360.0);
            }
        }
        let ns = self.specials.len();
        for (j, dirs) in self.directions.iter().enumerate() {
            let pass = dirs
                .iter()
                .filter(|d| sites.iter().skip(1).all(|s| d.strictly_left(*s)))
                .count();
            self.special_sums[b * ns + j] += pass as f64 / dirs.len() as f64;
        }
    }

    /// Appends another chain's batches; the pooled estimate treats every
    /// batch of every chain alike.
    pub fn merge(&mut self, other: LAccumulator) {
        self.grid_sums.extend(other.grid_sums);
        self.special_sums.extend(other.special_sums);
        self.counts.extend(other.counts);
    }

    fn column(&self, sums: &[f64], width: usize, j: usize) -> Vec<f64> {
        (0..self.counts.len()).map(|b| sums[b * width + j]).collect()
    }

    /// Raw one-side fractions and errors at the grid and special angles.
    pub fn fractions(&self) -> Result<(Vec<LEntry>, Vec<LEntry>)> {
        let ng = self.grid.len();
        let ns = self.specials.len();
        let grid = (0..ng)
            .map(|i| {
                let (f, se) = ratio_with_error(&self.column(&self.grid_sums, ng, i), &self.counts)?;
                Ok(LEntry { theta: self.grid[i], value: f, stderr: se })
            })
            .collect::<Result<Vec<_>>>()?;
        let specials = (0..ns)
            .map(|j| {
                let (f, se) = ratio_with_error(&self.column(&self.special_sums, ns, j), &self.counts)?;
                Ok(LEntry { theta: self.specials[j].degrees(), value: f, stderr: se })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((grid, specials))
    }

    pub fn samples(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Scales by `N^ρ`, normalises, and packages the table.
    pub fn finish(&self, meta: TableMeta) -> Result<LatticeEffectTable> {
        let (grid, specials) = self.fractions()?;
        let scale = (meta.n_steps as f64).powf(meta.rho.value());
        let raw: Vec<LEntry> = grid
            .iter()
            .map(|e| LEntry { theta: e.theta, value: e.value * scale, stderr: e.stderr * scale })
            .collect();
        if raw.iter().any(|e| !(e.value > 0.0)) {
            return Err(Error::InsufficientData(
                "some grid angle was never satisfied; increase the chain length".into(),
            ));
        }
        let integral = 4.0 * periodic_trapezoid(&raw);
        let norm = scale / integral;
        let table = LatticeEffectTable {
            grid: grid
                .iter()
                .map(|e| LEntry { theta: e.theta, value: e.value * norm, stderr: e.stderr * norm })
                .collect(),
            specials: self
                .specials
                .iter()
                .zip(&specials)
                .map(|(s, e)| (*s, LEntry { theta: e.theta, value: e.value * norm, stderr: e.stderr * norm }))
                .collect(),
            meta: TableMeta { normalization: norm, samples: self.samples() as u64, ..meta },
        };
        if table.specials.iter().any(|(_, e)| !(e.value > 0.0)) {
            return Err(Error::InsufficientData(
                "some special angle was never satisfied; increase the chain length".into(),
            ));
        }
        Ok(table)
    }
}

/// Trapezoid rule over a grid in `[0, 90)` that wraps around at 90°.
fn periodic_trapezoid(grid: &[LEntry]) -> f64 {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let a = grid[i];
            let b = grid[(i + 1) % n];
            let w = if i + 1 == n { b.theta + 90.0 - a.theta } else { b.theta - a.theta };
            0.5 * w * (a.value + b.value)
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableMeta {
    pub n_steps: usize,
    pub attempts: u64,
    pub chains: usize,
    pub seed: u64,
    pub sample_interval: u64,
    pub rho: Rational,
    /// Factor turning the one-side fraction into the tabulated value
    /// (`N^ρ` times the area normalisation).
    pub normalization: f64,
    pub samples: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeEffectTable {
    grid: Vec<LEntry>,
    specials: Vec<(SpecialAngle, LEntry)>,
    meta: TableMeta,
}

/// `τ` reduced to `[0°, 45°]` by period 90° and `l(θ) = l(90° − θ)`.
pub fn reduce_angle(tau: f64) -> f64 {
    let t = tau.rem_euclid(90.0);
    let t = if t >= 90.0 { 0.0 } else { t };
    if t > 45.0 {
        90.0 - t
    } else {
        t
    }
}

impl LatticeEffectTable {
    pub fn grid(&self) -> &[LEntry] {
        &self.grid
    }

    pub fn specials(&self) -> &[(SpecialAngle, LEntry)] {
        &self.specials
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn special(&self, p: i64, q: i64) -> Option<LEntry> {
        self.specials.iter().find(|(s, _)| s.p * q == p * s.q).map(|(_, e)| *e)
    }

    /// The table scaled by a constant.
    pub fn scaled(&self, c: f64) -> Self {
        let f = |e: &LEntry| LEntry { theta: e.theta, value: e.value * c, stderr: e.stderr * c };
        LatticeEffectTable {
            grid: self.grid.iter().map(f).collect(),
            specials: self.specials.iter().map(|(s, e)| (*s, f(e))).collect(),
            meta: TableMeta { normalization: self.meta.normalization * c, ..self.meta },
        }
    }

    /// `l` at a tangent angle of a flat boundary piece: an exact special
    /// angle returns its isolated value.
    pub fn lookup_l(&self, tau: f64) -> f64 {
        let t = reduce_angle(tau);
        if let Some((_, e)) = self.specials.iter().find(|(s, _)| s.degrees() == t) {
            return e.value;
        }
        self.generic_reduced(t)
    }

    /// `l` from the generic curve only; used on curved boundaries, where no
    /// lattice site other than the endpoint lies on the tangent line.
    pub fn lookup_generic(&self, tau: f64) -> f64 {
        self.generic_reduced(reduce_angle(tau))
    }

    fn generic_reduced(&self, t: f64) -> f64 {
        0.5 * (self.interp(t) + self.interp(90.0 - t))
    }

    /// Periodic linear interpolation on the generic grid that never
    /// crosses a special angle: beyond a special the nearer side's grid
    /// value is held, and at the special itself the two sides are averaged.
    fn interp(&self, t: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        let t = t.rem_euclid(90.0);
        let i = g.partition_point(|e| e.theta <= t);
        let (a, b) = if i == 0 {
            (LEntry { theta: g[n - 1].theta - 90.0, ..g[n - 1] }, g[0])
        } else if i == n {
            (g[n - 1], LEntry { theta: g[0].theta + 90.0, ..g[0] })
        } else {
            (g[i - 1], g[i])
        };
        if t == a.theta {
            return a.value;
        }
        let mut first: Option<f64> = None;
        let mut last: Option<f64> = None;
        for (s, _) in &self.specials {
            for base in [s.degrees(), 90.0 - s.degrees()] {
                for shift in [-90.0, 0.0, 90.0] {
                    let x = base + shift;
                    if x > a.theta && x < b.theta {
                        first = Some(first.map_or(x, |f: f64| f.min(x)));
                        last = Some(last.map_or(x, |l: f64| l.max(x)));
                    }
                }
            }
        }
        match (first, last) {
            (Some(f), Some(l)) => {
                if t < f {
                    a.value
                } else if t > l {
                    b.value
                } else {
                    0.5 * (a.value + b.value)
                }
            }
            _ => a.value + (b.value - a.value) * (t - a.theta) / (b.theta - a.theta),
        }
    }

    /// `∫_0^360 l` over the generic curve.
    pub fn full_turn_integral(&self) -> f64 {
        4.0 * periodic_trapezoid(&self.grid)
    }

    /// `(θ, |l(θ) − l(90 − θ)| / combined stderr)` for mirror pairs on the grid.
    pub fn symmetry_residuals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for e in &self.grid {
            if e.theta >= 45.0 {
                continue;
            }
            if let Some(m) = self.grid.iter().find(|m| (m.theta - (90.0 - e.theta)).abs() < 1e-9) {
                let se = (e.stderr.powi(2) + m.stderr.powi(2)).sqrt();
                out.push((e.theta, (e.value - m.value).abs() / se.max(f64::MIN_POSITIVE)));
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let m = &self.meta;
        let mut s = String::new();
        writeln!(s, "{TABLE_MAGIC}").unwrap();
        writeln!(s, "# n_steps={}", m.n_steps).unwrap();
        writeln!(s, "# attempts={}", m.attempts).unwrap();
        writeln!(s, "# chains={}", m.chains).unwrap();
        writeln!(s, "# seed={}", m.seed).unwrap();
        writeln!(s, "# sample_interval={}", m.sample_interval).unwrap();
        writeln!(s, "# samples={}", m.samples).unwrap();
        writeln!(s, "# rho={}/{}", m.rho.num, m.rho.den).unwrap();
        writeln!(s, "# normalization={}", m.normalization).unwrap();
        writeln!(s, "theta_deg,value,stderr,is_special").unwrap();
        let mut rows: Vec<(LEntry, bool)> = self.grid.iter().map(|e| (*e, false)).collect();
        rows.extend(self.specials.iter().map(|(_, e)| (*e, true)));
        rows.sort_by(|a, b| a.0.theta.total_cmp(&b.0.theta).then(a.1.cmp(&b.1)));
        for (e, sp) in rows {
            writeln!(s, "{},{},{},{}", e.theta, e.value, e.stderr, sp as u8).unwrap();
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines.next().ok_or_else(|| Error::Parse("truncated lattice-effect table".into()))?.map_err(Error::from)
        };
        if next()?.trim_end() != TABLE_MAGIC {
            return Err(Error::Parse("not a lattice-effect table (bad header)".into()));
        }
        fn meta<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
            line.strip_prefix("# ")
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix('='))
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("expected `# {key}=...`, found `{line}`")))
        }
        let n_steps = meta(&next()?, "n_steps")?;
        let attempts = meta(&next()?, "attempts")?;
        let chains = meta(&next()?, "chains")?;
        let seed = meta(&next()?, "seed")?;
        let sample_interval = meta(&next()?, "sample_interval")?;
        let samples = meta(&next()?, "samples")?;
        let rho: String = meta(&next()?, "rho")?;
        let rho = rho
            .split_once('/')
            .and_then(|(a, b)| Some(Rational::new(a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| Error::Parse(format!("bad rho `{rho}`")))?;
        let normalization = meta(&next()?, "normalization")?;
        if next()?.trim_end() != "theta_deg,value,stderr,is_special" {
            return Err(Error::Parse("missing column header".into()));
        }
        let mut grid = Vec::new();
        let mut specials = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(Error::Parse(format!("bad row `{line}`")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
            let e = LEntry { theta: num(f[0])?, value: num(f[1])?, stderr: num(f[2])? };
            match f[3] {
                "0" => grid.push(e),
                "1" => {
                    let LineDirection::Lattice { dx, dy } = LineDirection::from_degrees(e.theta) else {
                        return Err(Error::Parse(format!("special angle {} has no small rational slope", e.theta)));
                    };
                    specials.push((SpecialAngle::new(dy.abs(), dx.abs())?, e));
                }
                other => return Err(Error::Parse(format!("bad is_special flag `{other}`"))),
            }
        }
        if grid.len() < 2 {
            return Err(Error::Parse("table has fewer than two grid rows".into()));
        }
        Ok(LatticeEffectTable {
            grid,
            specials,
            meta: TableMeta { n_steps, attempts, chains, seed, sample_interval, rho, normalization, samples },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

/// How to build a table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableSpec {
    pub n_steps: usize,
    /// Attempted pivots per chain, equilibration included.
    pub attempts: u64,
    pub chains: usize,
    pub seed: u64,
    pub sample_interval: u64,
    pub equilibration: Option<u64>,
    pub grid_step: f64,
    pub specials: Vec<(i64, i64)>,
}

impl TableSpec {
    pub fn new(n_steps: usize, attempts: u64, seed: u64) -> Self {
        TableSpec {
            n_steps,
            attempts,
            chains: 1,
            seed,
            sample_interval: 10,
            equilibration: None,
            grid_step: DEFAULT_GRID_STEP,
            specials: DEFAULT_SPECIALS.to_vec(),
        }
    }

    pub fn chain_config(&self, chain_id: u64) -> ChainConfig {
        let c = ChainConfig::new(self.n_steps, Constraint::FullPlane, chain_seed(self.seed, chain_id))
            .with_sample_interval(self.sample_interval);
        match self.equilibration {
            Some(e) => c.with_equilibration(e),
            None => c,
        }
    }

    /// Distinct special angles in increasing order.
    pub fn special_angles(&self) -> Result<Vec<SpecialAngle>> {
        let mut out: Vec<SpecialAngle> = Vec::new();
        for &(p, q) in &self.specials {
            let s = SpecialAngle::new(p, q)?;
            if !out.iter().any(|o| o.p * s.q == s.p * o.q) {
                out.push(s);
            }
        }
        out.sort_by(|a, b| a.degrees().total_cmp(&b.degrees()));
        Ok(out)
    }

    pub fn accumulator(&self, chain_id: u64) -> Result<LAccumulator> {
        let specials = self.special_angles()?;
        let grid = generic_grid(self.grid_step, &specials)?;
        let total = self.chain_config(chain_id).samples_for(self.attempts);
        Ok(LAccumulator::new(grid, specials, total))
    }

    pub fn meta(&self) -> TableMeta {
        TableMeta {
            n_steps: self.n_steps,
            attempts: self.attempts,
            chains: self.chains,
            seed: self.seed,
            sample_interval: self.sample_interval,
            rho: SAW.rho,
            normalization: f64::NAN,
            samples: 0,
        }
    }
}

/// Builds a table from `spec.chains` independent full-plane chains.
pub fn build_table(spec: &TableSpec) -> Result<LatticeEffectTable> {
    if spec.chains == 0 {
        return Err(Error::Config("chains must be positive".into()));
    }
    let accs = (0..spec.chains as u64)
        .into_par_iter()
        .map(|id| -> Result<LAccumulator> {
            let mut acc = spec.accumulator(id)?;
            let mut chain = Chain::new(spec.chain_config(id))?;
            chain.advance_to(spec.attempts, |w, i| acc.observe(w.sites(), i));
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut iter = accs.into_iter();
    let mut acc = iter.next().expect("at least one chain");
    for a in iter {
        acc.merge(a);
    }
    acc.finish(spec.meta())
}

/// Two-size extrapolation: fits `l_N = a + b·N^{-Δ}` with Δ =
/// [`EXTRAPOLATION_EXPONENT`] angle by angle through tables built at two
/// sizes and returns the renormalised intercepts `a`. The result keeps the
/// larger table's metadata apart from the normalisation and sample count.
pub fn extrapolate(small: &LatticeEffectTable, large: &LatticeEffectTable) -> Result<LatticeEffectTable> {
    let (n1, n2) = (small.meta.n_steps as f64, large.meta.n_steps as f64);
    if !(n1 < n2) {
        return Err(Error::Config(format!("extrapolation needs N1 < N2, got {n1} and {n2}")));
    }
    let same_grid = small.grid.len() == large.grid.len()
        && small.grid.iter().zip(&large.grid).all(|(a, b)| a.theta == b.theta)
        && small.specials.len() == large.specials.len()
        && small.specials.iter().zip(&large.specials).all(|(a, b)| a.0 == b.0);
    if !same_grid {
        return Err(Error::Config("tables must share the grid and special angles".into()));
    }
    let (s1, s2) = (n1.powf(-EXTRAPOLATION_EXPONENT), n2.powf(-EXTRAPOLATION_EXPONENT));
    let (c1, c2) = (s2 / (s1 - s2), s1 / (s1 - s2));
    let fit = |a: &LEntry, b: &LEntry| LEntry {
        theta: a.theta,
        value: c2 * b.value - c1 * a.value,
        stderr: (c2 * b.stderr).hypot(c1 * a.stderr),
    };
    let grid: Vec<LEntry> = small.grid.iter().zip(&large.grid).map(|(a, b)| fit(a, b)).collect();
    let specials: Vec<(SpecialAngle, LEntry)> =
        small.specials.iter().zip(&large.specials).map(|((s, a), (_, b))| (*s, fit(a, b))).collect();
    if grid.iter().chain(specials.iter().map(|(_, e)| e)).any(|e| !(e.value > 0.0)) {
        return Err(Error::InsufficientData("extrapolated value is not positive at some angle".into()));
    }
    let c = 1.0 / (4.0 * periodic_trapezoid(&grid));
    let meta = TableMeta {
        normalization: f64::NAN,
        samples: small.meta.samples + large.meta.samples,
        ..large.meta
    };
    Ok(LatticeEffectTable { grid, specials, meta }.scaled(c))
}

/// `N^ρ ×` the fraction of samples staying strictly left of the line at
/// `theta` (averaged over lattice rotations), with its batch-means error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LEstimate {
    pub value: f64,
    pub stderr: f64,
    pub fraction: f64,
    pub fraction_stderr: f64,
}

pub fn estimate_l_at(theta: f64, config: &ChainConfig, attempts: u64) -> Result<LEstimate> {
    if config.constraint != Constraint::FullPlane {
        return Err(Error::Config("the lattice effect is defined for full-plane walks".into()));
    }
    let r = theta.to_radians();
    let base = LineDirection::from_degrees(theta);
    let lines: Vec<LineDirection> = match base {
        LineDirection::Lattice { dx, dy } => vec![
            LineDirection::lattice(dx, dy),
            LineDirection::lattice(-dy, dx),
            LineDirection::lattice(-dx, -dy),
            LineDirection::lattice(dy, -dx),
        ],
        LineDirection::Angle { .. } => (0..4)
            .map(|k| {
                let a = r + k as f64 * std::f64::consts::FRAC_PI_2;
                LineDirection::Angle { cos: a.cos(), sin: a.sin() }
            })
            .collect(),
    };
    let total = config.samples_for(attempts);
    let mut num = vec![0.0; DEFAULT_BATCHES];
    let mut den = vec![0.0; DEFAULT_BATCHES];
    let mut chain = Chain::new(config.clone())?;
    chain.advance_to(attempts, |w, i| {
        let b = batch::batch_of(i, total, DEFAULT_BATCHES);
        den[b] += 1.0;
        let sites = w.sites();
        let pass = lines.iter().filter(|l| sites.iter().skip(1).all(|s| l.strictly_left(*s))).count();
        num[b] += pass as f64 / 4.0;
    });
    let (f, se) = ratio_with_error(&num, &den)?;
    let scale = (config.n_steps as f64).powf(SAW.rho.value());
    Ok(LEstimate { value: f * scale, stderr: se * scale, fraction: f, fraction_stderr: se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{enumerate_saws, stays_strictly_one_side, LatticeWalk};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn specials() -> Vec<SpecialAngle> {
        TableSpec::new(10, 0, 0).special_angles().unwrap()
    }

    fn in_arc(arc: Option<(f64, f64)>, theta: f64) -> bool {
        match arc {
            None => false,
            Some((lo, hi)) => (-2..=2).any(|k| {
                let t = theta + 360.0 * k as f64;
                t > lo && t < hi
            }),
        }
    }

    #[test]
    fn arc_matches_direct_side_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 5, 30, 200] {
            let mut w = LatticeWalk::rod(n, Site::new(1, 0)).unwrap();
            for _ in 0..400 {
                for _ in 0..5 {
                    w.pivot_once(&mut rng, Constraint::FullPlane);
                }
                let arc = one_side_arc(w.sites());
                for _ in 0..20 {
                    // Generic angles: avoid the exact lattice directions.
                    let theta = rng.random_range(0.0..360.0) + 1e-7;
                    assert_eq!(
                        in_arc(arc, theta),
                        stays_strictly_one_side(w.sites(), theta),
                        "n={n} θ={theta} arc={arc:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn grid_avoids_specials() {
        let g = generic_grid(0.5, &specials()).unwrap();
        assert_eq!(g.len(), 180);
        assert_eq!(g[0], 0.25);
        assert!(g.contains(&45.25) && !g.contains(&45.0) && g.contains(&0.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(generic_grid(0.7, &specials()).is_err());
    }

    #[test]
    fn special_directions_cover_rotations_and_mirror() {
        assert_eq!(SpecialAngle::new(0, 1).unwrap().directions().len(), 4);
        assert_eq!(SpecialAngle::new(1, 1).unwrap().directions().len(), 4);
        assert_eq!(SpecialAngle::new(1, 2).unwrap().directions().len(), 8);
        assert!(SpecialAngle::new(2, 1).is_err());
    }

    fn toy_table() -> LatticeEffectTable {
        let sp = specials();
        let grid = generic_grid(0.5, &sp).unwrap();
        // A smooth, symmetric curve with a dip at the specials.
        let entries: Vec<LEntry> = grid
            .iter()
            .map(|&t| LEntry { theta: t, value: 1.0 + 0.1 * (4.0 * t.to_radians()).cos(), stderr: 0.01 })
            .collect();
        let sp_entries = sp.iter().map(|s| (*s, LEntry { theta: s.degrees(), value: 0.5, stderr: 0.01 })).collect();
        LatticeEffectTable {
            grid: entries,
            specials: sp_entries,
            meta: TableMeta { normalization: 1.0, ..TableSpec::new(10, 0, 0).meta() },
        }
    }

    #[test]
    fn extrapolation_recovers_planted_limit() {
        let limit = toy_table();
        let at = |n: usize| {
            // l_N = l_∞ (1 + 3 N^{-1/2}) at generic angles, l_∞ + 2 N^{-1/2} at specials.
            let g = |e: &LEntry| LEntry { value: e.value * (1.0 + 3.0 / (n as f64).sqrt()), ..*e };
            let s = |e: &LEntry| LEntry { value: e.value + 2.0 / (n as f64).sqrt(), ..*e };
            LatticeEffectTable {
                grid: limit.grid.iter().map(g).collect(),
                specials: limit.specials.iter().map(|(a, e)| (*a, s(e))).collect(),
                meta: TableMeta { n_steps: n, samples: 10, ..limit.meta },
            }
        };
        let x = extrapolate(&at(400), &at(1600)).unwrap();
        let c = 1.0 / limit.full_turn_integral();
        for (a, b) in x.grid.iter().zip(&limit.grid) {
            assert!((a.value - c * b.value).abs() < 1e-12);
            assert!(a.stderr > c * b.stderr);
        }
        assert!((x.full_turn_integral() - 1.0).abs() < 1e-12);
        assert!((x.special(0, 1).unwrap().value - c * 0.5).abs() < 1e-12);
        assert_eq!((x.meta.n_steps, x.meta.samples), (1600, 20));
        assert!(matches!(extrapolate(&at(1600), &at(400)), Err(Error::Config(_))));
    }

    #[test]
    fn lookup_reduction_identities() {
        let t = toy_table();
        assert_eq!(t.lookup_l(90.0), t.lookup_l(0.0));
        assert_eq!(t.lookup_l(0.0), 0.5);
        assert_eq!(t.lookup_l(45.0), 0.5);
        assert_eq!(t.lookup_l(150.0), t.lookup_l(30.0));
        assert_eq!(t.lookup_l(150.0), t.lookup_l(60.0));
        for tau in [3.3, 17.0, 29.99, 44.0, 61.7, 88.2] {
            assert!((reduce_angle(tau) - reduce_angle(90.0 - tau)).abs() < 1e-12);
            assert!((reduce_angle(tau) - reduce_angle(tau + 90.0)).abs() < 1e-12);
            assert!((t.lookup_l(tau) - t.lookup_l(90.0 - tau)).abs() < 1e-12);
            assert!((t.lookup_l(tau) - t.lookup_l(tau + 270.0)).abs() < 1e-12);
        }
        // Curved boundaries never see the isolated values.
        assert!(t.lookup_generic(45.0) > 0.85);
        assert!(t.lookup_generic(0.0) > 0.85);
    }

    #[test]
    fn lookup_is_continuous_between_specials() {
        let t = toy_table();
        let step = 1e-4;
        let mut x = 1.0;
        while x < 18.0 {
            assert!((t.lookup_l(x + step) - t.lookup_l(x)).abs() < 1e-3, "jump at {x}");
            x += step * 37.0;
        }
        // Values on the generic side of the special at 0 come from the
        // nearest grid point, not from the isolated value.
        assert_eq!(t.lookup_l(0.1), t.lookup_generic(0.1));
        assert!(t.lookup_l(0.1) > 0.85);
    }

    #[test]
    fn csv_roundtrip_is_bit_stable() {
        let t = toy_table().scaled(0.0123456789);
        let mut a = Vec::new();
        t.write_csv(&mut a).unwrap();
        let back = LatticeEffectTable::read_csv(&a[..]).unwrap();
        assert_eq!(back, t);
        let mut b = Vec::new();
        back.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(LatticeEffectTable::read_csv(&a[..40]).is_err());
        assert!(LatticeEffectTable::read_csv(&b"theta_deg\n"[..]).is_err());
    }

    #[test]
    fn small_table_is_normalised_and_sane() {
        let mut spec = TableSpec::new(60, 400_000, 5);
        spec.sample_interval = 5;
        spec.equilibration = Some(5_000);
        let t = build_table(&spec).unwrap();
        assert!((t.full_turn_integral() - 1.0).abs() < 1e-9);
        assert!(t.grid().iter().all(|e| e.value > 0.0 && e.stderr >= 0.0));
        let l0 = t.special(0, 1).unwrap();
        let generic = t.lookup_generic(0.0);
        assert!(l0.value < generic);
        // Rescaling commutes with lookups.
        let s = t.scaled(3.0);
        assert!((s.lookup_l(17.0) - 3.0 * t.lookup_l(17.0)).abs() < 1e-12);
    }

    #[test]
    fn exact_fraction_at_n_six() {
        let walks = enumerate_saws(6, Constraint::FullPlane);
        let above = walks.iter().filter(|w| stays_strictly_one_side(w, 0.0)).count();
        // Every walk strictly above the axis starts with a step north.
        assert!(above > 0 && above * 4 < walks.len());
        let cfg = ChainConfig::new(6, Constraint::FullPlane, 3).with_sample_interval(1);
        let est = estimate_l_at(0.0, &cfg, 300_000).unwrap();
        let exact = above as f64 / walks.len() as f64;
        assert!(
            (est.fraction - exact).abs() < 4.0 * est.fraction_stderr,
            "{} ± {} vs {exact}",
            est.fraction,
            est.fraction_stderr
        );
    }
}
