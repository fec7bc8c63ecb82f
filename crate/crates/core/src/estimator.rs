//! The dilation-ensemble estimator: filter chain samples by the strict
//! interior indicator, record the raw dilation and boundary geometry, and
//! build weighted boundary statistics with weight `λ^p · W / l`.
//!
//! `λ` is stored raw so that any `p` can be applied afterwards.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::analytic::{AnalyticLaw, Axis};
use crate::batch::{ratio_with_error, DEFAULT_BATCHES, MIN_BATCHES};
use crate::chain::{chain_seed, Chain, ChainConfig, ChainStats};
use crate::domains::{BoundaryParam, Geometry, StarDomain};
use crate::error::{Error, Result};
use crate::lattice_effect::LatticeEffectTable;
use crate::walk::{Constraint, LatticeWalk, Site};

pub const SAMPLES_HEADER: &str = "chain_id,sample_index,lambda,end_x,end_y,theta_deg,param,w_thickness,l_value";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationSample {
    pub chain_id: u64,
    pub sample_index: u64,
    pub lambda: f64,
    pub endpoint: Site,
    /// Polar angle of the endpoint in `[0, 360)`.
    pub theta_deg: f64,
    /// Coordinate on the law's sample axis.
    pub param: f64,
    pub w_thickness: f64,
    /// Lattice-effect value at the endpoint's tangent angle, 1 without
    /// correction.
    pub l_value: f64,
}

impl DilationSample {
    pub fn weight(&self, p: f64) -> f64 {
        self.lambda.powf(p) * self.w_thickness / self.l_value
    }
}

/// `l` at the boundary point seen at `theta_deg`. Straight pieces use the
/// exact special values; on circles only the endpoint touches the tangent
/// line, so the generic curve applies.
pub fn l_value_at(domain: &StarDomain, table: Option<&LatticeEffectTable>, theta_deg: f64) -> Result<f64> {
    let Some(table) = table else {
        return Ok(1.0);
    };
    let tau = domain.boundary_geometry(theta_deg)?.tau;
    let l = if domain.is_curved() { table.lookup_generic(tau) } else { table.lookup_l(tau) };
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!("lattice-effect value {l} at tangent angle {tau}")));
    }
    Ok(l)
}

/// Turns walks into samples for one domain.
#[derive(Clone, Copy, Debug)]
pub struct Observer<'a> {
    domain: &'a StarDomain,
    table: Option<&'a LatticeEffectTable>,
}

impl<'a> Observer<'a> {
    /// Fails if the walks come from the wrong half/full-plane ensemble.
    pub fn new(domain: &'a StarDomain, constraint: Constraint, table: Option<&'a LatticeEffectTable>) -> Result<Self> {
        if domain.constraint() != constraint {
            return Err(Error::Config(format!(
                "{} needs {} walks, got {}",
                domain.geometry(),
                domain.constraint().name(),
                constraint.name()
            )));
        }
        Ok(Observer { domain, table })
    }

    pub fn domain(&self) -> &StarDomain {
        self.domain
    }

    /// The sample for `walk`, or `None` when the dilation is undefined, the
    /// walk leaves the interior, or the endpoint is conditioned away.
    pub fn observe(&self, walk: &LatticeWalk, chain_id: u64, sample_index: u64) -> Option<DilationSample> {
        let endpoint = walk.endpoint();
        let scale = self.domain.dilation_of(endpoint).ok()?;
        if !self.domain.strictly_inside(walk.sites(), &scale) {
            return None;
        }
        let param = match self.domain.boundary_parameter(endpoint, &scale).ok()? {
            BoundaryParam::Value(v) => v,
            BoundaryParam::WindowedOut(_) => return None,
        };
        let theta_deg = endpoint.polar_deg();
        let w_thickness = self.domain.thickness_weight(theta_deg).ok()?;
        let l_value = l_value_at(self.domain, self.table, theta_deg).ok()?;
        Some(DilationSample {
            chain_id,
            sample_index,
            lambda: scale.value,
            endpoint,
            theta_deg,
            param,
            w_thickness,
            l_value,
        })
    }
}

/// Recomputes `l_value` for every sample (1 when `table` is `None`).
pub fn apply_correction(
    samples: &mut [DilationSample],
    domain: &StarDomain,
    table: Option<&LatticeEffectTable>,
) -> Result<()> {
    for s in samples {
        s.l_value = l_value_at(domain, table, s.theta_deg)?;
    }
    Ok(())
}

/// Chain settings for a sampling run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingSpec {
    pub n_steps: usize,
    /// Attempted pivots per chain, equilibration included.
    pub attempts: u64,
    pub chains: usize,
    pub seed: u64,
    pub sample_interval: u64,
    pub equilibration: Option<u64>,
}

impl SamplingSpec {
    pub fn chain_config(&self, constraint: Constraint, chain_id: u64) -> ChainConfig {
        let c = ChainConfig::new(self.n_steps, constraint, chain_seed(self.seed, chain_id))
            .with_sample_interval(self.sample_interval);
        match self.equilibration {
            Some(e) => c.with_equilibration(e),
            None => c,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<DilationSample>,
    pub stats: ChainStats,
}

impl SampleSet {
    /// Fraction of emitted walks that produced a sample.
    pub fn retained_fraction(&self) -> f64 {
        if self.stats.samples == 0 {
            0.0
        } else {
            self.samples.len() as f64 / self.stats.samples as f64
        }
    }
}

/// Runs the chains in parallel; samples come back in chain order.
pub fn collect_samples(
    domain: &StarDomain,
    spec: &SamplingSpec,
    table: Option<&LatticeEffectTable>,
) -> Result<SampleSet> {
    Ok(run_chains(domain, spec, table)?.0)
}

/// As [`collect_samples`], also returning the final chain states.
pub fn run_chains(
    domain: &StarDomain,
    spec: &SamplingSpec,
    table: Option<&LatticeEffectTable>,
) -> Result<(SampleSet, Vec<Chain>)> {
    if spec.chains == 0 {
        return Err(Error::Config("chains must be positive".into()));
    }
    let observer = Observer::new(domain, domain.constraint(), table)?;
    let per_chain = (0..spec.chains as u64)
        .into_par_iter()
        .map(|id| -> Result<(Vec<DilationSample>, Chain)> {
            let mut chain = Chain::new(spec.chain_config(domain.constraint(), id))?;
            let mut samples = Vec::new();
            chain.advance_to(spec.attempts, |w, i| samples.extend(observer.observe(w, id, i)));
            Ok((samples, chain))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SampleSet::default();
    let mut chains = Vec::with_capacity(per_chain.len());
    for (samples, chain) in per_chain {
        out.samples.extend(samples);
        out.stats = out.stats.merge(chain.stats());
        chains.push(chain);
    }
    Ok((out, chains))
}

/// Batch of each sample: `DEFAULT_BATCHES` contiguous, equally populated
/// chunks of every chain's samples, chains pooled.
pub fn batch_assignment(samples: &[DilationSample]) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by_key(|&i| (samples[i].chain_id, samples[i].sample_index));
    let mut batch = vec![0; samples.len()];
    let mut chains = 0;
    let mut start = 0;
    while start < order.len() {
        let id = samples[order[start]].chain_id;
        let end = start + order[start..].iter().take_while(|&&i| samples[i].chain_id == id).count();
        let n = end - start;
        for (k, &i) in order[start..end].iter().enumerate() {
            batch[i] = chains * DEFAULT_BATCHES + k * DEFAULT_BATCHES / n;
        }
        chains += 1;
        start = end;
    }
    (batch, chains * DEFAULT_BATCHES)
}

/// The coordinate of a sample on `axis` of `law`.
pub fn coordinate(sample: &DilationSample, axis: Axis, law: &AnalyticLaw) -> Result<f64> {
    if axis == law.sample_axis() || matches!(law.geometry(), Geometry::StripRadial { .. }) {
        return Ok(sample.param);
    }
    match axis {
        Axis::Polar => Ok(sample.theta_deg),
        Axis::Native => Err(Error::Config(format!(
            "samples of {} carry no native coordinate",
            law.geometry().name()
        ))),
    }
}

/// A weighted empirical CDF with batch-means errors.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCdf {
    axis: Axis,
    params: Vec<f64>,
    /// Normalised weights and running sums, aligned with `params`.
    weights: Vec<f64>,
    cum: Vec<f64>,
    batch: Vec<usize>,
    n_batches: usize,
    ess: f64,
}

impl WeightedCdf {
    /// CDF of the samples on `axis` with weights `λ^p W / l`.
    pub fn from_samples(samples: &[DilationSample], p: f64, axis: Axis, law: &AnalyticLaw) -> Result<Self> {
        let (batch, n_batches) = batch_assignment(samples);
        let points = samples
            .iter()
            .zip(&batch)
            .map(|(s, &b)| Ok((coordinate(s, axis, law)?, s.weight(p), b)))
            .collect::<Result<Vec<_>>>()?;
        let cdf = Self::build(points, n_batches, axis)?;
        let used = cdf.nonempty_batches();
        if used < MIN_BATCHES {
            return Err(Error::InsufficientData(format!(
                "{used} nonempty batches, at least {MIN_BATCHES} required"
            )));
        }
        Ok(cdf)
    }

    /// CDF of `(param, weight)` points taken as one chain in the given order.
    pub fn from_points(points: &[(f64, f64)], axis: Axis) -> Result<Self> {
        let n = points.len();
        let pts = points
            .iter()
            .enumerate()
            .map(|(k, &(x, w))| (x, w, k * DEFAULT_BATCHES / n.max(1)))
            .collect();
        Self::build(pts, DEFAULT_BATCHES, axis)
    }

    fn build(mut points: Vec<(f64, f64, usize)>, n_batches: usize, axis: Axis) -> Result<Self> {
        if let Some(bad) = points.iter().find(|(x, w, _)| !x.is_finite() || !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument(format!("bad sample (param {}, weight {})", bad.0, bad.1)));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = running_sums(points.iter().map(|p| p.1)).last().copied().unwrap_or(0.0);
        if !(total > 0.0) {
            return Err(Error::InsufficientData("no sample weight".into()));
        }
        let weights: Vec<f64> = points.iter().map(|p| p.1 / total).collect();
        let mut cum = running_sums(weights.iter().copied());
        let last = cum.last_mut().expect("nonempty");
        assert!((*last - 1.0).abs() < 1e-12, "weights normalise to {last}");
        *last = 1.0;
        let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        Ok(WeightedCdf {
            axis,
            params: points.iter().map(|p| p.0).collect(),
            batch: points.iter().map(|p| p.2).collect(),
            weights,
            cum,
            n_batches,
            ess,
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Sorted abscissae.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// CDF value after each sorted abscissa.
    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    pub fn effective_sample_size(&self) -> f64 {
        self.ess
    }

    pub fn nonempty_batches(&self) -> usize {
        let mut seen = vec![false; self.n_batches];
        for (&b, &w) in self.batch.iter().zip(&self.weights) {
            if w > 0.0 {
                seen[b] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Number of samples with abscissa `≤ x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.params.partition_point(|&p| p <= x)
    }

    /// Number of samples with abscissa `< x`.
    pub fn count_lt(&self, x: f64) -> usize {
        self.params.partition_point(|&p| p < x)
    }

    /// CDF of the first `k` sorted samples.
    pub fn value_upto(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.value_upto(self.count_le(x))
    }

    fn batch_totals(&self) -> Vec<f64> {
        let mut den = vec![0.0; self.n_batches];
        for (&b, &w) in self.batch.iter().zip(&self.weights) {
            den[b] += w;
        }
        den
    }

    /// Batch-means error of the mass of the first `k` sorted samples.
    pub fn stderr_upto(&self, k: usize) -> Result<f64> {
        let mut num = vec![0.0; self.n_batches];
        for (&b, &w) in self.batch[..k].iter().zip(&self.weights[..k]) {
            num[b] += w;
        }
        Ok(ratio_with_error(&num, &self.batch_totals())?.1)
    }

    pub fn stderr_at(&self, x: f64) -> Result<f64> {
        self.stderr_upto(self.count_le(x))
    }

    /// Errors at many abscissae in one sweep.
    pub fn stderr_on(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let den = self.batch_totals();
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let mut num = vec![0.0; self.n_batches];
        let mut k = 0;
        let mut out = vec![0.0; xs.len()];
        for i in order {
            while k < self.params.len() && self.params[k] <= xs[i] {
                num[self.batch[k]] += self.weights[k];
                k += 1;
            }
            out[i] = ratio_with_error(&num, &den)?.1;
        }
        Ok(out)
    }
}

/// Prefix sums with Neumaier compensation.
fn running_sums(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    xs.map(|x| {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
        sum + comp
    })
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentMass {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub stderr: f64,
}

/// Weighted mass of the endpoint polar angle in `[e_0, e_1), …, [e_{k−1}, e_k]`.
pub fn segment_masses(samples: &[DilationSample], p: f64, edges: &[f64]) -> Result<Vec<SegmentMass>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("segment edges must be increasing, at least two".into()));
    }
    let k = edges.len() - 1;
    let (batch, n_batches) = batch_assignment(samples);
    let mut num = vec![vec![0.0; n_batches]; k];
    let mut den = vec![0.0; n_batches];
    for (s, &b) in samples.iter().zip(&batch) {
        let t = s.theta_deg;
        let seg = if t == edges[k] { Some(k - 1) } else { edges.windows(2).position(|w| w[0] <= t && t < w[1]) };
        let Some(seg) = seg else {
            return Err(Error::Config(format!("endpoint angle {t} outside the segmentation")));
        };
        let w = s.weight(p);
        num[seg][b] += w;
        den[b] += w;
    }
    (0..k)
        .map(|j| {
            let (mass, stderr) = ratio_with_error(&num[j], &den)?;
            Ok(SegmentMass { lo: edges[j], hi: edges[j + 1], mass, stderr })
        })
        .collect()
}

pub fn write_samples_csv<W: Write>(samples: &[DilationSample], mut w: W) -> Result<()> {
    let mut s = String::with_capacity(96 * (samples.len() + 1));
    writeln!(s, "{SAMPLES_HEADER}").unwrap();
    for d in samples {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            d.chain_id,
            d.sample_index,
            d.lambda,
            d.endpoint.x,
            d.endpoint.y,
            d.theta_deg,
            d.param,
            d.w_thickness,
            d.l_value
        )
        .unwrap();
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_samples_csv<R: BufRead>(r: R) -> Result<Vec<DilationSample>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != SAMPLES_HEADER {
        return Err(Error::Parse("missing samples header".into()));
    }
    let mut out = Vec::new();
    for (no, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse(format!("bad samples row {}: `{line}`", no + 2));
        if f.len() != 9 {
            return Err(bad());
        }
        let float = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
        let int = |i: usize| f[i].parse::<i32>().map_err(|_| bad());
        let s = DilationSample {
            chain_id: f[0].parse().map_err(|_| bad())?,
            sample_index: f[1].parse().map_err(|_| bad())?,
            lambda: float(2)?,
            endpoint: Site::new(int(3)?, int(4)?),
            theta_deg: float(5)?,
            param: float(6)?,
            w_thickness: float(7)?,
            l_value: float(8)?,
        };
        if !(s.lambda > 0.0 && s.w_thickness > 0.0 && s.l_value > 0.0) {
            return Err(bad());
        }
        out.push(s);
    }
    Ok(out)
}

pub fn save_samples(samples: &[DilationSample], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_samples_csv(samples, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_samples(path: &Path) -> Result<Vec<DilationSample>> {
    read_samples_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Kind;

    fn sample(chain_id: u64, sample_index: u64, param: f64, lambda: f64) -> DilationSample {
        DilationSample {
            chain_id,
            sample_index,
            lambda,
            endpoint: Site::new(1, 2),
            theta_deg: 10.0,
            param,
            w_thickness: 1.0,
            l_value: 1.0,
        }
    }

    #[test]
    fn single_point_steps_from_zero_to_one() {
        let c = WeightedCdf::from_points(&[(0.3, 2.0)], Axis::Native).unwrap();
        assert_eq!(c.value_at(0.2), 0.0);
        assert_eq!(c.value_at(0.3), 1.0);
        assert!(c.stderr_at(0.3).is_err());
    }

    #[test]
    fn equal_weights_give_the_empirical_cdf() {
        let pts: Vec<(f64, f64)> = (0..100).map(|i| (((i * 37) % 100) as f64, 0.7)).collect();
        let c = WeightedCdf::from_points(&pts, Axis::Native).unwrap();
        for k in 0..100 {
            assert!((c.value_at(k as f64) - (k + 1) as f64 / 100.0).abs() < 1e-12);
        }
        assert_eq!(*c.cumulative().last().unwrap(), 1.0);
        assert!((c.effective_sample_size() - 100.0).abs() < 1e-9);
        let errs = c.stderr_on(&[10.0, 50.0, 99.0]).unwrap();
        assert_eq!(errs[2], 0.0);
        assert_eq!(errs[1], c.stderr_at(50.0).unwrap());
    }

    #[test]
    fn p_is_applied_from_stored_lambda() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let samples: Vec<DilationSample> = (0..640).map(|i| sample(0, i, (i as f64).sin(), 1.0 + (i % 7) as f64)).collect();
        let p = -0.75;
        let a = WeightedCdf::from_samples(&samples, p, Axis::Native, &law).unwrap();
        // The same weights applied up front, with λ set to 1.
        let pre: Vec<DilationSample> = samples
            .iter()
            .map(|s| DilationSample { lambda: 1.0, w_thickness: s.lambda.powf(p), ..*s })
            .collect();
        let b = WeightedCdf::from_samples(&pre, 0.0, Axis::Native, &law).unwrap();
        assert_eq!(a.params(), b.params());
        for (x, y) in a.cumulative().iter().zip(b.cumulative()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn too_few_batches_is_insufficient_data() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let samples: Vec<DilationSample> = (0..20).map(|i| sample(0, i, i as f64, 2.0)).collect();
        assert!(matches!(
            WeightedCdf::from_samples(&samples, 0.0, Axis::Native, &law),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn batches_split_each_chain() {
        let mut samples: Vec<DilationSample> = (0..128).map(|i| sample(3, 1000 + i, 0.0, 1.0)).collect();
        samples.extend((0..64).map(|i| sample(1, i, 0.0, 1.0)));
        let (b, n) = batch_assignment(&samples);
        assert_eq!(n, 2 * DEFAULT_BATCHES);
        // Chain 1 sorts first.
        assert_eq!(b[128], 0);
        assert_eq!(b[191], 63);
        assert_eq!(b[0], 64);
        assert_eq!(b[1], 64);
        assert_eq!(b[127], 127);
    }

    #[test]
    fn observer_rejects_the_wrong_ensemble() {
        let d = StarDomain::new(Geometry::StripChordal).unwrap();
        assert!(matches!(Observer::new(&d, Constraint::FullPlane, None), Err(Error::Config(_))));
        assert_eq!(d.kind(), Kind::Chordal);
    }

    #[test]
    fn observer_filters_by_interior_indicator() {
        let d = StarDomain::new(Geometry::StripChordal).unwrap();
        let obs = Observer::new(&d, Constraint::HalfPlane, None).unwrap();
        // Straight up: every site below the endpoint's line.
        let up = LatticeWalk::rod(5, Site::new(0, 1)).unwrap();
        let s = obs.observe(&up, 0, 0).unwrap();
        assert_eq!((s.lambda, s.param, s.l_value), (5.0, 0.0, 1.0));
        assert!((s.w_thickness - 1.0).abs() < 1e-15);
        // Up then back down: an interior site at the endpoint's height.
        let sites = [(0, 0), (0, 1), (0, 2), (1, 2), (1, 1)].map(|(x, y)| Site::new(x, y)).to_vec();
        let w = LatticeWalk::from_sites(sites).unwrap();
        assert!(obs.observe(&w, 0, 0).is_none());
        // Tangent circle: lower-arc endpoints are conditioned away.
        let t = StarDomain::new(Geometry::CircleTangent).unwrap();
        let obs = Observer::new(&t, Constraint::HalfPlane, None).unwrap();
        let flat = [(0, 0), (0, 1), (1, 1), (2, 1), (3, 1)].map(|(x, y)| Site::new(x, y)).to_vec();
        assert!(obs.observe(&LatticeWalk::from_sites(flat).unwrap(), 0, 0).is_none());
    }

    #[test]
    fn segment_masses_sum_to_one() {
        let samples: Vec<DilationSample> = (0..3000)
            .map(|i| DilationSample { theta_deg: (i as f64 * 0.123) % 360.0, ..sample(0, i, 0.0, 1.0 + (i % 5) as f64) })
            .collect();
        let m = segment_masses(&samples, -1.0, &[0.0, 120.0, 240.0, 360.0]).unwrap();
        let total: f64 = m.iter().map(|s| s.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.iter().all(|s| s.stderr >= 0.0));
        assert!(segment_masses(&samples, 0.0, &[0.0, 100.0]).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let samples: Vec<DilationSample> = (0..50)
            .map(|i| DilationSample { l_value: 0.0027 + i as f64 * 1e-7, ..sample(i % 3, i, (i as f64).cos() / 3.0, 1.0 / 3.0 + i as f64) })
            .collect();
        let mut a = Vec::new();
        write_samples_csv(&samples, &mut a).unwrap();
        let back = read_samples_csv(&a[..]).unwrap();
        assert_eq!(back, samples);
        assert!(read_samples_csv(&b"x,y\n"[..]).is_err());
    }

    #[test]
    fn correction_uses_exact_values_on_straight_sides_only() {
        use crate::lattice_effect::{build_table, TableSpec};
        let mut spec = TableSpec::new(30, 200_000, 1);
        spec.sample_interval = 2;
        spec.equilibration = Some(3000);
        let table = build_table(&spec).unwrap();
        let tri = StarDomain::new(Geometry::Triangle).unwrap();
        // The vertical side faces θ = 180.
        assert_eq!(l_value_at(&tri, Some(&table), 180.0).unwrap(), table.special(0, 1).unwrap().value);
        assert_eq!(l_value_at(&tri, Some(&table), 60.0).unwrap(), table.lookup_l(30.0));
        let circ = StarDomain::new(Geometry::CircleCentered).unwrap();
        assert_eq!(l_value_at(&circ, Some(&table), 0.0).unwrap(), table.lookup_generic(0.0));
        assert_eq!(l_value_at(&circ, None, 0.0).unwrap(), 1.0);
    }
}
