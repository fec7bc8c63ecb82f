//! Comparison statistics between weighted samples and an analytic law:
//! the sup-norm CDF distance, the binned L² density distance, and the
//! dilation power `p` minimising the latter.

use crate::analytic::{AnalyticLaw, Axis};
use crate::error::{Error, Result};
use crate::estimator::{coordinate, DilationSample, WeightedCdf};

/// Uniform refinement points added to the empirical step points.
pub const REFINEMENT_POINTS: usize = 2001;
pub const MIN_BINS: usize = 50;
/// Tail mass left out on each infinite side when binning.
pub const TAIL_MASS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdfDifference {
    pub value: f64,
    pub stderr: f64,
    /// Abscissa of the maximum.
    pub at: f64,
}

/// `sup |F_emp − F_law|` over the empirical step points (both one-sided
/// limits) and a uniform grid, with the batch-means error of the
/// empirical CDF at the maximiser.
pub fn max_cdf_difference(emp: &WeightedCdf, law: &AnalyticLaw, axis: Axis) -> Result<CdfDifference> {
    if emp.axis() != axis {
        return Err(Error::Config(format!(
            "empirical CDF is on the {} axis, comparison requested on {}",
            emp.axis().name(),
            axis.name()
        )));
    }
    if emp.is_empty() {
        return Err(Error::InsufficientData("empty CDF".into()));
    }
    let params = emp.params();
    let mut xs: Vec<f64> = params.to_vec();
    xs.dedup();
    let (lo, hi) = window(law, axis, params);
    xs.extend((0..REFINEMENT_POINTS).map(|i| lo + (hi - lo) * i as f64 / (REFINEMENT_POINTS - 1) as f64));
    let g = law.cdf_many(&xs, axis)?;
    let mut best = (-1.0, 0usize, 0.0);
    for (&x, &gx) in xs.iter().zip(&g) {
        let (lt, le) = (emp.count_lt(x), emp.count_le(x));
        for k in [lt, le] {
            let d = (emp.value_upto(k) - gx).abs();
            if d > best.0 {
                best = (d, k, x);
            }
        }
    }
    Ok(CdfDifference { value: best.0, stderr: emp.stderr_upto(best.1)?, at: best.2 })
}

/// The law's range, with infinite ends cut where `TAIL_MASS` remains
/// (or at the extreme sample, if further out).
pub fn window(law: &AnalyticLaw, axis: Axis, params: &[f64]) -> (f64, f64) {
    let (lo, hi) = law.range(axis);
    let first = params.first().copied().unwrap_or(0.0);
    let last = params.last().copied().unwrap_or(0.0);
    let lo = if lo.is_finite() { lo } else { quantile(law, axis, TAIL_MASS).min(first) };
    let hi = if hi.is_finite() { hi } else { quantile(law, axis, 1.0 - TAIL_MASS).max(last) };
    (lo, hi)
}

/// Inverse CDF by bracketing and bisection.
pub fn quantile(law: &AnalyticLaw, axis: Axis, q: f64) -> f64 {
    let (lo, hi) = law.range(axis);
    let cdf = |x: f64| law.cdf(x, axis).unwrap_or(f64::NAN);
    let mut a = if lo.is_finite() { lo } else { -1.0 };
    while !lo.is_finite() && cdf(a) > q {
        a *= 2.0;
    }
    let mut b = if hi.is_finite() { hi } else { 1.0 };
    while !hi.is_finite() && cdf(b) < q {
        b *= 2.0;
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if cdf(m) < q {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Binned comparison of weighted samples with a law on its sample axis;
/// law bin masses and sample bins are computed once, so scanning `p` only
/// reweights.
#[derive(Clone, Debug)]
pub struct DensityComparison {
    edges: Vec<f64>,
    law_density: Vec<f64>,
    /// Bin of each sample, `None` outside the window.
    bins: Vec<Option<usize>>,
    log_lambda: Vec<f64>,
    base_weight: Vec<f64>,
}

impl DensityComparison {
    pub fn new(samples: &[DilationSample], law: &AnalyticLaw, bins: usize) -> Result<Self> {
        if bins < MIN_BINS {
            return Err(Error::Binning(format!("{bins} bins requested, at least {MIN_BINS} required")));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData("no samples".into()));
        }
        let axis = law.sample_axis();
        let (lo, hi) = law.range(axis);
        let lo = if lo.is_finite() { lo } else { quantile(law, axis, TAIL_MASS) };
        let hi = if hi.is_finite() { hi } else { quantile(law, axis, 1.0 - TAIL_MASS) };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
        let cdf = law.cdf_many(&edges, axis)?;
        let law_density = cdf.windows(2).map(|c| (c[1] - c[0]) / width).collect();
        let bins_of = samples
            .iter()
            .map(|s| {
                let x = coordinate(s, axis, law)?;
                Ok(if x < lo || x > hi { None } else { Some((((x - lo) / width) as usize).min(bins - 1)) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityComparison {
            edges,
            law_density,
            bins: bins_of,
            log_lambda: samples.iter().map(|s| s.lambda.ln()).collect(),
            base_weight: samples.iter().map(|s| s.w_thickness / s.l_value).collect(),
        })
    }

    pub fn bins(&self) -> usize {
        self.law_density.len()
    }

    /// `∫ (ρ_emp − ρ_law)²` over the window, histogram weights at power `p`
    /// normalised over all samples.
    pub fn l2(&self, p: f64) -> Result<f64> {
        let n = self.bins();
        let width = self.edges[1] - self.edges[0];
        // Factor out the largest weight to keep λ^p in range for any p.
        let logs: Vec<f64> = self
            .log_lambda
            .iter()
            .zip(&self.base_weight)
            .map(|(l, w)| p * l + w.ln())
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut mass = vec![0.0; n];
        let mut total = 0.0;
        for (b, lw) in self.bins.iter().zip(&logs) {
            let w = (lw - top).exp();
            total += w;
            if let Some(b) = b {
                mass[*b] += w;
            }
        }
        let empty = mass.iter().filter(|&&m| m == 0.0).count();
        if n - empty < MIN_BINS || empty * 10 > n {
            return Err(Error::Binning(format!("{empty} of {n} bins are empty")));
        }
        Ok(mass
            .iter()
            .zip(&self.law_density)
            .map(|(m, f)| (m / total / width - f).powi(2) * width)
            .sum())
    }
}

pub fn l2_density_difference(samples: &[DilationSample], p: f64, law: &AnalyticLaw, bins: usize) -> Result<f64> {
    DensityComparison::new(samples, law, bins)?.l2(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PScan {
    pub p_star: f64,
    /// `(p, L²)` on the grid.
    pub values: Vec<(f64, f64)>,
}

/// Minimises the L² density difference over `grid` by reweighting, then
/// refines with a parabola through the lowest grid point and its
/// neighbours.
pub fn estimate_p(samples: &[DilationSample], grid: &[f64], law: &AnalyticLaw, bins: usize) -> Result<PScan> {
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("p grid must be increasing with at least three points".into()));
    }
    let cmp = DensityComparison::new(samples, law, bins)?;
    let values = grid.iter().map(|&p| Ok((p, cmp.l2(p)?))).collect::<Result<Vec<_>>>()?;
    let i = (0..values.len())
        .min_by(|&a, &b| values[a].1.total_cmp(&values[b].1))
        .expect("nonempty grid");
    if i == 0 || i == values.len() - 1 {
        return Err(Error::Bracket(values[i].0));
    }
    let p_star = parabola_vertex(values[i - 1], values[i], values[i + 1]);
    Ok(PScan { p_star, values })
}

fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a > 0.0) {
        return x1;
    }
    // Newton form y0 + d01 (x − x0) + a (x − x0)(x − x1).
    0.5 * (x0 + x1) - d01 / (2.0 * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Geometry;
    use crate::walk::Site;

    fn synthetic(law: &AnalyticLaw, n: usize, p0: f64) -> Vec<DilationSample> {
        // Stratified draws from a uniform proposal on the window; λ chosen
        // so that λ^{p0} is the importance weight law/proposal.
        let axis = law.sample_axis();
        let (lo, hi) = (quantile(law, axis, 1e-4), quantile(law, axis, 1.0 - 1e-4));
        (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                let x = lo + (hi - lo) * u;
                let f = law.density_value(x).unwrap();
                DilationSample {
                    chain_id: 0,
                    sample_index: i as u64,
                    lambda: f.powf(1.0 / p0),
                    endpoint: Site::new(0, 1),
                    theta_deg: 90.0,
                    param: x,
                    w_thickness: 1.0,
                    l_value: 1.0,
                }
            })
            .collect()
    }

    #[test]
    fn vertex_of_exact_parabola() {
        let f = |x: f64| 3.0 * (x + 0.8).powi(2) + 1.0;
        let v = parabola_vertex((-1.0, f(-1.0)), (-0.9, f(-0.9)), (-0.7, f(-0.7)));
        assert!((v + 0.8).abs() < 1e-12, "{v}");
    }

    #[test]
    fn empirical_against_itself_is_zero() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let n = 4000;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| (quantile(&law, Axis::Native, (i as f64 + 0.5) / n as f64), 1.0))
            .collect();
        let emp = WeightedCdf::from_points(&pts, Axis::Native).unwrap();
        let d = max_cdf_difference(&emp, &law, Axis::Native).unwrap();
        // Midpoint quantiles: the step sits 1/(2n) off on either side.
        assert!((d.value - 0.5 / n as f64).abs() < 1e-6, "{d:?}");
        assert!(max_cdf_difference(&emp, &law, Axis::Polar).is_err());
    }

    #[test]
    fn l2_vanishes_for_the_law_itself_and_detects_scaling() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let cmp = DensityComparison::new(&synthetic(&law, 20_000, -1.0), &law, 100).unwrap();
        let at_truth = cmp.l2(-1.0).unwrap();
        assert!(at_truth < 1e-5, "{at_truth}");
        assert!(cmp.l2(-1.2).unwrap() > at_truth);
        // One sample per bin centre carrying the law's exact bin mass.
        let n = 100;
        let (lo, hi) = (quantile(&law, Axis::Native, TAIL_MASS), quantile(&law, Axis::Native, 1.0 - TAIL_MASS));
        let w = (hi - lo) / n as f64;
        let binned = |scale: f64| -> Vec<DilationSample> {
            (0..n)
                .map(|k| {
                    let (a, b) = (lo + w * k as f64, lo + w * (k + 1) as f64);
                    let m = law.cdf(b, Axis::Native).unwrap() - law.cdf(a, Axis::Native).unwrap();
                    let s = if k < n / 2 { scale } else { 1.0 };
                    DilationSample { w_thickness: m * s, param: 0.5 * (a + b), ..synthetic(&law, 1, -1.0)[0] }
                })
                .collect()
        };
        let exact = l2_density_difference(&binned(1.0), 0.0, &law, n).unwrap();
        // Only the 2·TAIL_MASS renormalisation remains.
        assert!(exact < 1e-5, "{exact}");
        let scaled = l2_density_difference(&binned(1.1), 0.0, &law, n).unwrap();
        assert!(scaled > 100.0 * exact.max(1e-9), "{scaled}");
    }

    #[test]
    fn closed_loop_recovers_planted_p() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let samples = synthetic(&law, 50_000, -1.0);
        let grid: Vec<f64> = (0..21).map(|i| -1.5 + 0.05 * i as f64).collect();
        let scan = estimate_p(&samples, &grid, &law, 100).unwrap();
        assert!((scan.p_star + 1.0).abs() < 0.01, "{}", scan.p_star);
        let edge: Vec<f64> = (0..5).map(|i| -0.5 + 0.1 * i as f64).collect();
        assert!(matches!(estimate_p(&samples, &edge, &law, 100), Err(Error::Bracket(_))));
    }

    #[test]
    fn too_few_bins() {
        let law = AnalyticLaw::for_geometry(Geometry::StripChordal).unwrap();
        let samples = synthetic(&law, 100, -1.0);
        assert!(matches!(l2_density_difference(&samples, -1.0, &law, 20), Err(Error::Binning(_))));
        // 100 samples cannot fill 400 bins.
        assert!(matches!(l2_density_difference(&samples, -1.0, &law, 400), Err(Error::Binning(_))));
    }
}
