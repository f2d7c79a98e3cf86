use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::SieveParams;

/// Which generator produces the trial families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[default]
    Zygmund,
    /// Ordered so that every box has two side lengths no larger than any predecessor's.
    Adversarial,
}

/// Parameters of the random monotone side-length table.
///
/// Side lengths per axis are `samples` distinct values drawn from `1..=max_side`.
/// The table starts at `φ(first, first) ∈ 1..=base_max` and every entry adds an
/// increment from `0..=max_increment` to the larger of its left and lower
/// neighbours, so `φ` is nondecreasing in each variable by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub samples: usize,
    pub max_side: i64,
    pub max_increment: i64,
    pub base_max: i64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            samples: 6,
            max_side: 32,
            max_increment: 6,
            base_max: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_boxes: usize,
    pub coordinate_range: i64,
    pub profile: ProfileSpec,
    pub params: SieveParams,
    pub trial_count: usize,
    pub family: FamilyKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            n_boxes: 100,
            coordinate_range: 256,
            profile: ProfileSpec::default(),
            params: SieveParams::default(),
            trial_count: 1,
            family: FamilyKind::Zygmund,
        }
    }
}

impl ExperimentConfig {
    /// The archived reference configuration: seed 42, 100 boxes, range 256, 20 trials.
    pub fn golden() -> Self {
        ExperimentConfig {
            trial_count: 20,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(m.to_string()));
        if self.n_boxes == 0 {
            return bad("n_boxes must be positive");
        }
        if self.coordinate_range <= 0 {
            return bad("coordinate_range must be positive");
        }
        if self.trial_count == 0 {
            return bad("trial_count must be positive");
        }
        let p = &self.profile;
        if p.samples == 0 || p.max_side < p.samples as i64 {
            return bad("profile needs 1 <= samples <= max_side");
        }
        if p.base_max < 1 || p.max_increment < 0 {
            return bad("profile needs base_max >= 1 and max_increment >= 0");
        }
        self.params.validate()
    }

    /// Generator for one trial: ChaCha8 seeded from `seed`, stream number `trial`.
    ///
    /// Streams are independent, so any trial can be replayed on its own.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
