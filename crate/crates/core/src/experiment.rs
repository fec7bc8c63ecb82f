//! Experiment orchestration: a flat `key = value` configuration, a full
//! sample-and-compare run, and its CSV / text / SVG outputs.
//!
//! Outputs are written only after every computation has succeeded, so a
//! failed run leaves no partial files. CSV outputs depend only on the
//! configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analytic::{AnalyticLaw, Axis};
use crate::chain::ChainStats;
use crate::compare::{l2_density_difference, max_cdf_difference, window, CdfDifference};
use crate::domains::{Geometry, StarDomain};
use crate::error::{Error, Result};
use crate::estimator::{run_chains, save_samples, segment_masses, SampleSet, SamplingSpec, SegmentMass, WeightedCdf};
use crate::exponents::Rational;
use crate::lattice_effect::{build_table, LatticeEffectTable, TableSpec};
use crate::svg::{self, Panel, Series};

pub const CDF_HEADER: &str = "param,empirical,analytic,diff,stderr";

const KEYS: [&str; 22] = [
    "geometry",
    "h",
    "a",
    "b",
    "n_steps",
    "attempts",
    "chains",
    "seed",
    "sample_interval",
    "equilibration",
    "p",
    "correction",
    "ltable_path",
    "ltable_n_steps",
    "ltable_attempts",
    "ltable_chains",
    "ltable_interval",
    "outdir",
    "bins",
    "cdf_points",
    "svg",
    "checkpoints",
];

/// Where the lattice-effect table comes from when correction is on.
#[derive(Clone, Debug, PartialEq)]
pub enum TableSource {
    Path(PathBuf),
    Build(TableSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub n_steps: usize,
    /// Attempted pivots in total, split evenly over the chains.
    pub attempts: u64,
    pub chains: usize,
    pub seed: u64,
    pub sample_interval: u64,
    pub equilibration: Option<u64>,
    /// `None` selects the conjectured value for the domain kind.
    pub p: Option<f64>,
    pub correction: Option<TableSource>,
    pub outdir: PathBuf,
    pub bins: usize,
    pub cdf_points: usize,
    pub svg: bool,
    pub checkpoints: bool,
}

impl ExperimentConfig {
    pub fn new(geometry: Geometry, outdir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            geometry,
            n_steps: 4000,
            attempts: 100_000_000,
            chains: 8,
            seed: 1,
            sample_interval: 1,
            equilibration: None,
            p: None,
            correction: None,
            outdir: outdir.into(),
            bins: 100,
            cdf_points: 401,
            svg: true,
            checkpoints: false,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if kv.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        fn num<T: std::str::FromStr>(k: &str, v: Option<&str>) -> Result<Option<T>> {
            v.map(|s| s.replace('_', "").parse::<T>().map_err(|_| Error::Config(format!("bad value for {k}: `{s}`"))))
                .transpose()
        }
        let name = get("geometry").ok_or_else(|| Error::Config("missing key geometry".into()))?;
        let geometry = geometry_from_parts(name, get("h"), get("a"), get("b"))?;
        let outdir = get("outdir").ok_or_else(|| Error::Config("missing key outdir".into()))?;
        let mut c = ExperimentConfig::new(geometry, outdir);
        c.n_steps = num("n_steps", get("n_steps"))?.unwrap_or(c.n_steps);
        c.attempts = num("attempts", get("attempts"))?.unwrap_or(c.attempts);
        c.chains = num("chains", get("chains"))?.unwrap_or(c.chains);
        c.seed = num("seed", get("seed"))?.unwrap_or(c.seed);
        c.sample_interval = num("sample_interval", get("sample_interval"))?.unwrap_or(c.sample_interval);
        c.equilibration = num("equilibration", get("equilibration"))?;
        c.p = match get("p") {
            None | Some("default") => None,
            Some(v) => Some(
                parse_rational(v)
                    .map(Rational::value)
                    .or_else(|| v.parse().ok())
                    .ok_or_else(|| Error::Config(format!("bad value for p: `{v}`")))?,
            ),
        };
        c.bins = num("bins", get("bins"))?.unwrap_or(c.bins);
        c.cdf_points = num("cdf_points", get("cdf_points"))?.unwrap_or(c.cdf_points);
        c.svg = parse_bool("svg", get("svg"))?.unwrap_or(c.svg);
        c.checkpoints = parse_bool("checkpoints", get("checkpoints"))?.unwrap_or(c.checkpoints);
        if parse_bool("correction", get("correction"))?.unwrap_or(false) {
            c.correction = Some(match get("ltable_path") {
                Some(p) => TableSource::Path(p.into()),
                None => {
                    let n = num("ltable_n_steps", get("ltable_n_steps"))?.unwrap_or(c.n_steps);
                    let attempts = num("ltable_attempts", get("ltable_attempts"))?
                        .ok_or_else(|| Error::Config("correction needs ltable_path or ltable_attempts".into()))?;
                    let mut t = TableSpec::new(n, attempts, c.seed);
                    t.chains = num("ltable_chains", get("ltable_chains"))?.unwrap_or(1);
                    t.sample_interval = num("ltable_interval", get("ltable_interval"))?.unwrap_or(t.sample_interval);
                    TableSource::Build(t)
                }
            });
        } else if ["ltable_path", "ltable_n_steps", "ltable_attempts", "ltable_chains", "ltable_interval"]
            .iter()
            .any(|k| get(k).is_some())
        {
            return Err(Error::Config("lattice-table keys given but correction is off".into()));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        StarDomain::new(self.geometry)?;
        if self.n_steps == 0 || self.chains == 0 || self.sample_interval == 0 {
            return Err(Error::Config("n_steps, chains and sample_interval must be positive".into()));
        }
        if self.bins == 0 || self.cdf_points < 2 {
            return Err(Error::Config("bins must be positive and cdf_points at least 2".into()));
        }
        if let Some(p) = self.p {
            if !p.is_finite() {
                return Err(Error::Config(format!("p = {p} is not finite")));
            }
        }
        Ok(())
    }

    pub fn sampling_spec(&self) -> SamplingSpec {
        SamplingSpec {
            n_steps: self.n_steps,
            attempts: self.attempts / self.chains.max(1) as u64,
            chains: self.chains,
            seed: self.seed,
            sample_interval: self.sample_interval,
            equilibration: self.equilibration,
        }
    }

    pub fn p_value(&self) -> Result<f64> {
        Ok(self.p.unwrap_or(StarDomain::new(self.geometry)?.kind().default_p().value()))
    }
}

/// A geometry from its name and optional `h`, `a`, `b` parameters;
/// parameters that do not apply are rejected.
pub fn geometry_from_parts(name: &str, h: Option<&str>, a: Option<&str>, b: Option<&str>) -> Result<Geometry> {
    let num = |k: &str, v: Option<&str>| -> Result<Option<f64>> {
        v.map(|s| s.parse().map_err(|_| Error::Config(format!("bad value for {k}: `{s}`")))).transpose()
    };
    let mut geometry = Geometry::from_name(name)?;
    let mut used = [false; 3];
    match &mut geometry {
        Geometry::StripRadial { h: hh } => {
            if let Some(v) = h {
                *hh = parse_rational(v).ok_or_else(|| Error::Config(format!("bad value for h: `{v}`")))?;
            }
            used[0] = true;
        }
        Geometry::CircleOffcenter { a: aa, b: bb } => {
            *aa = num("a", a)?.unwrap_or(*aa);
            *bb = num("b", b)?.unwrap_or(*bb);
            used[1] = true;
            used[2] = true;
        }
        Geometry::CirclePartial { b: bb } => {
            *bb = num("b", b)?.unwrap_or(*bb);
            used[2] = true;
        }
        _ => {}
    }
    for ((k, v), u) in ["h", "a", "b"].iter().zip([h, a, b]).zip(used) {
        if v.is_some() && !u {
            return Err(Error::Config(format!("key {k} does not apply to {}", geometry.name())));
        }
    }
    StarDomain::new(geometry).map_err(|e| Error::Config(e.to_string()))?;
    Ok(geometry)
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (a, b) = s.split_once('/')?;
    let (a, b): (i64, i64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (b > 0).then(|| Rational::new(a, b))
}

fn parse_bool(k: &str, v: Option<&str>) -> Result<Option<bool>> {
    match v {
        None => Ok(None),
        Some("true" | "yes" | "on" | "1") => Ok(Some(true)),
        Some("false" | "no" | "off" | "0") => Ok(Some(false)),
        Some(other) => Err(Error::Config(format!("bad value for {k}: `{other}`"))),
    }
}

/// Polar-angle segmentation reported for a geometry: the triangle's sides
/// and the radial strip's two lines.
pub fn default_segments(geometry: Geometry) -> Option<Vec<f64>> {
    match geometry {
        Geometry::Triangle => Some(vec![0.0, 120.0, 240.0, 360.0]),
        Geometry::StripRadial { .. } => Some(vec![0.0, 180.0, 360.0]),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdfRow {
    pub param: f64,
    pub empirical: f64,
    pub analytic: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub geometry: Geometry,
    pub axis: Axis,
    pub p: f64,
    pub corrected: bool,
    pub n_steps: usize,
    pub stats: ChainStats,
    pub samples: usize,
    pub effective_samples: f64,
    pub max_cdf: CdfDifference,
    /// `None` when the samples are too sparse to fill the bins.
    pub l2: Option<f64>,
    pub segments: Vec<SegmentMass>,
    pub wall_seconds: f64,
}

impl ComparisonReport {
    pub fn retained_fraction(&self) -> f64 {
        if self.stats.samples == 0 {
            0.0
        } else {
            self.samples as f64 / self.stats.samples as f64
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let mut field = |k: &str, v: String| writeln!(s, "  \"{k}\": {v},").unwrap();
        field("geometry", format!("\"{}\"", self.geometry));
        field("axis", format!("\"{}\"", self.axis.name()));
        field("p", self.p.to_string());
        field("lattice_correction", self.corrected.to_string());
        field("n_steps", self.n_steps.to_string());
        field("attempted_pivots", self.stats.attempted.to_string());
        field("pivot_acceptance", self.stats.acceptance_fraction().to_string());
        field("emitted_walks", self.stats.samples.to_string());
        field("retained_samples", self.samples.to_string());
        field("retained_fraction", self.retained_fraction().to_string());
        field("effective_samples", self.effective_samples.to_string());
        field("max_cdf_difference", self.max_cdf.value.to_string());
        field("max_cdf_difference_stderr_1sigma_batch_means", self.max_cdf.stderr.to_string());
        field("max_cdf_difference_at", self.max_cdf.at.to_string());
        field("l2_density_difference", self.l2.map_or("null".into(), |v| v.to_string()));
        let segs: Vec<String> = self
            .segments
            .iter()
            .map(|m| format!("{{\"lo\": {}, \"hi\": {}, \"mass\": {}, \"stderr\": {}}}", m.lo, m.hi, m.mass, m.stderr))
            .collect();
        field("segment_masses", format!("[{}]", segs.join(", ")));
        writeln!(s, "  \"wall_seconds\": {}", self.wall_seconds).unwrap();
        s.push_str("}\n");
        s
    }
}

/// Everything derived from one sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub report: ComparisonReport,
    pub cdf: Vec<CdfRow>,
}

/// Compares samples with the domain's law at power `p`.
pub fn analyze(set: &SampleSet, geometry: Geometry, p: f64, corrected: bool, n_steps: usize, bins: usize, cdf_points: usize) -> Result<Analysis> {
    let start = Instant::now();
    if set.samples.is_empty() {
        return Err(Error::InsufficientData("no retained samples".into()));
    }
    let law = AnalyticLaw::for_geometry(geometry)?;
    let axis = law.sample_axis();
    let emp = WeightedCdf::from_samples(&set.samples, p, axis, &law)?;
    let max_cdf = max_cdf_difference(&emp, &law, axis)?;
    let l2 = match l2_density_difference(&set.samples, p, &law, bins) {
        Ok(v) => Some(v),
        Err(Error::Binning(_)) => None,
        Err(e) => return Err(e),
    };
    let segments = match default_segments(geometry) {
        Some(edges) => segment_masses(&set.samples, p, &edges)?,
        None => Vec::new(),
    };
    let (lo, hi) = window(&law, axis, emp.params());
    let xs: Vec<f64> = (0..cdf_points)
        .map(|i| if i + 1 == cdf_points { hi } else { lo + (hi - lo) * i as f64 / (cdf_points - 1) as f64 })
        .collect();
    let analytic = law.cdf_many(&xs, axis)?;
    let errs = emp.stderr_on(&xs)?;
    let cdf = xs
        .iter()
        .zip(analytic)
        .zip(errs)
        .map(|((&x, a), e)| CdfRow { param: x, empirical: emp.value_at(x), analytic: a, stderr: e })
        .collect();
    Ok(Analysis {
        report: ComparisonReport {
            geometry,
            axis,
            p,
            corrected,
            n_steps,
            stats: set.stats,
            samples: set.samples.len(),
            effective_samples: emp.effective_sample_size(),
            max_cdf,
            l2,
            segments,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
        cdf,
    })
}

pub fn cdf_csv(rows: &[CdfRow]) -> String {
    let mut s = format!("{CDF_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{}", r.param, r.empirical, r.analytic, r.empirical - r.analytic, r.stderr).unwrap();
    }
    s
}

pub fn read_cdf_csv<R: BufRead>(r: R) -> Result<Vec<CdfRow>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != CDF_HEADER {
        return Err(Error::Parse("missing CDF header".into()));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<f64> = line
            .split(',')
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad CDF row `{line}`"))))
            .collect::<Result<_>>()?;
        if f.len() != 5 {
            return Err(Error::Parse(format!("bad CDF row `{line}`")));
        }
        out.push(CdfRow { param: f[0], empirical: f[1], analytic: f[2], stderr: f[4] });
    }
    Ok(out)
}

pub fn cdf_svg(rows: &[CdfRow], title: &str, axis_label: &str) -> String {
    let emp = rows.iter().map(|r| (r.param, r.empirical)).collect();
    let law = rows.iter().map(|r| (r.param, r.analytic)).collect();
    let diff = rows.iter().map(|r| (r.param, r.empirical - r.analytic)).collect();
    let band = |k: f64| rows.iter().map(|r| (r.param, k * r.stderr)).collect();
    svg::render(
        &[
            Panel {
                title: title.into(),
                x_label: axis_label.into(),
                y_label: "CDF".into(),
                series: vec![Series::new("simulation", emp), Series::new("prediction", law)],
            },
            Panel {
                title: "difference".into(),
                x_label: axis_label.into(),
                y_label: "simulation - prediction".into(),
                series: vec![Series::new("difference", diff), Series::new("+1 sigma", band(1.0)), Series::new("-1 sigma", band(-1.0))],
            },
        ],
        720,
        360,
    )
}

/// Loads or builds the configured lattice-effect table.
pub fn resolve_table(source: &TableSource) -> Result<LatticeEffectTable> {
    match source {
        TableSource::Path(p) => LatticeEffectTable::load(p),
        TableSource::Build(spec) => build_table(spec),
    }
}

/// Runs the chains, compares with the law and writes `samples.csv`,
/// `cdf.csv`, `report.txt`, and optionally `cdf.svg`, a built
/// `ltable.csv` and per-chain checkpoints.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonReport> {
    let start = Instant::now();
    config.validate()?;
    let spec = config.sampling_spec();
    if spec.attempts == 0 {
        return Err(Error::InsufficientData("zero attempted pivots: nothing to report".into()));
    }
    let domain = StarDomain::new(config.geometry)?;
    let table = config.correction.as_ref().map(resolve_table).transpose()?;
    let (set, chains) = run_chains(&domain, &spec, table.as_ref())?;
    let p = config.p_value()?;
    let mut analysis = analyze(&set, config.geometry, p, table.is_some(), config.n_steps, config.bins, config.cdf_points)?;
    analysis.report.wall_seconds = start.elapsed().as_secs_f64();

    let dir = &config.outdir;
    std::fs::create_dir_all(dir)?;
    save_samples(&set.samples, &dir.join("samples.csv"))?;
    std::fs::write(dir.join("cdf.csv"), cdf_csv(&analysis.cdf))?;
    std::fs::write(dir.join("report.txt"), analysis.report.to_text())?;
    if config.svg {
        let title = format!("{} (p = {})", config.geometry, p);
        let axis = format!("{} coordinate", analysis.report.axis.name());
        std::fs::write(dir.join("cdf.svg"), cdf_svg(&analysis.cdf, &title, &axis))?;
    }
    if let (Some(t), Some(TableSource::Build(_))) = (&table, &config.correction) {
        t.save(&dir.join("ltable.csv"))?;
    }
    if config.checkpoints {
        for (id, c) in chains.iter().enumerate() {
            c.save(&dir.join(format!("chain_{id}.ckpt")))?;
        }
    }
    Ok(analysis.report)
}
