//! The pivot Markov chain: configuration, deterministic seeding, sampling
//! cadence and checkpoints.
//!
//! Checkpoint format (UTF-8 text, one record per line):
//!
//! ```text
//! saw-dilation-checkpoint v1
//! n_steps <N>
//! constraint <full_plane|half_plane>
//! sample_interval <u64>
//! equilibration <u64>
//! seed <u64>
//! rng_word_pos <u128>
//! attempted <u64>
//! accepted <u64>
//! emitted <u64>
//! sites <N+1>
//! <x> <y>            (N+1 lines, site 0 first)
//! end
//! ```
//!
//! The RNG is ChaCha8 keyed by `seed`; `rng_word_pos` is its stream position,
//! so a restored chain continues the exact same random sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::walk::{Constraint, LatticeWalk, Site};

pub const CHECKPOINT_MAGIC: &str = "saw-dilation-checkpoint v1";
pub const DEFAULT_SAMPLE_INTERVAL: u64 = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainConfig {
    pub n_steps: usize,
    pub constraint: Constraint,
    /// Attempted pivots between retained samples.
    pub sample_interval: u64,
    /// Attempted pivots discarded before the first sample.
    pub equilibration: u64,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(n_steps: usize, constraint: Constraint, seed: u64) -> Self {
        ChainConfig {
            n_steps,
            constraint,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            equilibration: default_equilibration(n_steps),
            seed,
        }
    }

    pub fn with_sample_interval(mut self, interval: u64) -> Self {
        self.sample_interval = interval;
        self
    }

    pub fn with_equilibration(mut self, attempts: u64) -> Self {
        self.equilibration = attempts;
        self
    }

    /// Samples emitted by a chain run to `attempts` attempted pivots.
    pub fn samples_for(&self, attempts: u64) -> u64 {
        attempts.saturating_sub(self.equilibration) / self.sample_interval.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 1 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if self.sample_interval < 1 {
            return Err(Error::Config("sample_interval must be at least 1".into()));
        }
        Ok(())
    }
}

/// 100·N attempted pivots: at least 10·N accepted ones while the pivot
/// acceptance fraction stays above 10%, which holds for N up to ~10^5.
pub fn default_equilibration(n_steps: usize) -> u64 {
    100 * n_steps as u64
}

/// Per-chain seed derived from the master seed.
pub fn chain_seed(master_seed: u64, chain_id: u64) -> u64 {
    master_seed ^ chain_id
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub attempted: u64,
    pub accepted: u64,
    pub samples: u64,
}

impl ChainStats {
    pub fn acceptance_fraction(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }

    pub fn merge(self, other: ChainStats) -> ChainStats {
        ChainStats {
            attempted: self.attempted + other.attempted,
            accepted: self.accepted + other.accepted,
            samples: self.samples + other.samples,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    config: ChainConfig,
    walk: LatticeWalk,
    rng: ChaCha8Rng,
    attempted: u64,
    accepted: u64,
    emitted: u64,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.walk == other.walk
            && self.attempted == other.attempted
            && self.accepted == other.accepted
            && self.emitted == other.emitted
            && self.rng.get_seed() == other.rng.get_seed()
            && self.rng.get_word_pos() == other.rng.get_word_pos()
    }
}

impl Chain {
    /// Starts from a rod: north under the half-plane constraint, east otherwise.
    pub fn new(config: ChainConfig) -> Result<Self> {
        config.validate()?;
        let dir = match config.constraint {
            Constraint::HalfPlane => Site::new(0, 1),
            Constraint::FullPlane => Site::new(1, 0),
        };
        let walk = LatticeWalk::rod(config.n_steps, dir)?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Chain {
            config,
            walk,
            rng,
            attempted: 0,
            accepted: 0,
            emitted: 0,
        })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn walk(&self) -> &LatticeWalk {
        &self.walk
    }

    pub fn stats(&self) -> ChainStats {
        ChainStats {
            attempted: self.attempted,
            accepted: self.accepted,
            samples: self.emitted,
        }
    }

    /// One attempted pivot.
    pub fn step(&mut self) -> bool {
        let ok = self.walk.pivot_once(&mut self.rng, self.config.constraint);
        self.attempted += 1;
        if ok {
            self.accepted += 1;
        }
        ok
    }

    /// Runs until `attempted` reaches `target`, calling `visitor(walk,
    /// sample_index)` at every sampling point.
    pub fn advance_to<F>(&mut self, target: u64, mut visitor: F)
    where
        F: FnMut(&LatticeWalk, u64),
    {
        let eq = self.config.equilibration;
        let interval = self.config.sample_interval;
        while self.attempted < target {
            self.step();
            if self.attempted > eq && (self.attempted - eq).is_multiple_of(interval) {
                visitor(&self.walk, self.emitted);
                self.emitted += 1;
            }
        }
    }

    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        writeln!(w, "{CHECKPOINT_MAGIC}")?;
        writeln!(w, "n_steps {}", c.n_steps)?;
        writeln!(w, "constraint {}", c.constraint.name())?;
        writeln!(w, "sample_interval {}", c.sample_interval)?;
        writeln!(w, "equilibration {}", c.equilibration)?;
        writeln!(w, "seed {}", c.seed)?;
        writeln!(w, "rng_word_pos {}", self.rng.get_word_pos())?;
        writeln!(w, "attempted {}", self.attempted)?;
        writeln!(w, "accepted {}", self.accepted)?;
        writeln!(w, "emitted {}", self.emitted)?;
        writeln!(w, "sites {}", self.walk.sites().len())?;
        for s in self.walk.sites() {
            writeln!(w, "{} {}", s.x, s.y)?;
        }
        writeln!(w, "end")?;
        w.flush()?;
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            match lines.next() {
                Some(line) => Ok(line?),
                None => Err(Error::Checkpoint(format!("truncated before `{what}`"))),
            }
        };
        if next("header")?.trim() != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("missing or unsupported version header".into()));
        }
        fn field<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(k), Some(v), None) if k == key => v
                    .parse()
                    .map_err(|_| Error::Checkpoint(format!("bad value for `{key}`: {v}"))),
                _ => Err(Error::Checkpoint(format!("expected `{key} <value>`, got `{line}`"))),
            }
        }
        let n_steps: usize = field(&next("n_steps")?, "n_steps")?;
        let constraint_name: String = field(&next("constraint")?, "constraint")?;
        let constraint = Constraint::parse(&constraint_name)
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        let sample_interval = field(&next("sample_interval")?, "sample_interval")?;
        let equilibration = field(&next("equilibration")?, "equilibration")?;
        let seed = field(&next("seed")?, "seed")?;
        let word_pos: u128 = field(&next("rng_word_pos")?, "rng_word_pos")?;
        let attempted = field(&next("attempted")?, "attempted")?;
        let accepted = field(&next("accepted")?, "accepted")?;
        let emitted = field(&next("emitted")?, "emitted")?;
        let n_sites: usize = field(&next("sites")?, "sites")?;
        if n_sites != n_steps + 1 {
            return Err(Error::Checkpoint(format!(
                "site count {n_sites} does not match n_steps {n_steps}"
            )));
        }
        let mut sites = Vec::with_capacity(n_sites);
        for _ in 0..n_sites {
            let line = next("site")?;
            let mut it = line.split_whitespace();
            let parse = |v: Option<&str>| -> Result<i32> {
                v.and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Checkpoint(format!("bad site line `{line}`")))
            };
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Checkpoint(format!("bad site line `{line}`")));
            }
            sites.push(Site::new(x, y));
        }
        if next("end")?.trim() != "end" {
            return Err(Error::Checkpoint("missing end marker".into()));
        }
        let config = ChainConfig {
            n_steps,
            constraint,
            sample_interval,
            equilibration,
            seed,
        };
        config
            .validate()
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        let walk = LatticeWalk::from_sites(sites).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if !walk.sites().iter().all(|s| constraint.admits(*s)) {
            return Err(Error::Checkpoint("walk violates its plane constraint".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(word_pos);
        Ok(Chain {
            config,
            walk,
            rng,
            attempted,
            accepted,
            emitted,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_checkpoint(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_checkpoint(std::io::BufReader::new(file))
    }
}

/// Runs a fresh chain for `attempts` attempted pivots.
pub fn run_chain<F>(config: &ChainConfig, attempts: u64, visitor: F) -> Result<ChainStats>
where
    F: FnMut(&LatticeWalk, u64),
{
    let mut chain = Chain::new(config.clone())?;
    chain.advance_to(attempts, visitor);
    Ok(chain.stats())
}
