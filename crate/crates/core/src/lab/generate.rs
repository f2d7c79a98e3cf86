//! Random and hand-built box families.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, FamilyKind, ProfileSpec};
use crate::error::{Error, Result};
use crate::geometry::{Box3, BoxFamily, ZygmundProfile};

const ADVERSARIAL_ATTEMPTS: usize = 16;

fn distinct_lengths(rng: &mut ChaCha8Rng, spec: &ProfileSpec) -> Vec<i64> {
    let mut v: Vec<i64> = index::sample(rng, spec.max_side as usize, spec.samples)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    v.sort_unstable();
    v
}

/// Random monotone table over `samples × samples` side-length pairs.
pub fn random_profile(rng: &mut ChaCha8Rng, spec: &ProfileSpec) -> ZygmundProfile {
    let xs = distinct_lengths(rng, spec);
    let ys = distinct_lengths(rng, spec);
    let n = spec.samples;
    let mut phi = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let base = match (i, j) {
                (0, 0) => rng.random_range(1..=spec.base_max),
                (0, _) => phi[0][j - 1],
                (_, 0) => phi[i - 1][0],
                _ => phi[i - 1][j].max(phi[i][j - 1]),
            };
            let inc = if i + j == 0 {
                0
            } else {
                rng.random_range(0..=spec.max_increment)
            };
            phi[i][j] = base + inc;
        }
    }
    let mut profile = ZygmundProfile::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            profile.insert(x, y, phi[i][j]);
        }
    }
    profile
}

fn place(rng: &mut ChaCha8Rng, sides: [i64; 3], range: i64) -> Result<Box3> {
    let corner = sides.map(|s| rng.random_range(0..=(range - s).max(0)));
    Box3::with_sides(corner, sides)
}

/// Boxes with sides `(x, y, φ(x, y))` for `(x, y)` drawn uniformly from the table.
pub fn generate_zygmund_family(cfg: &ExperimentConfig, trial: usize) -> Result<BoxFamily> {
    let mut rng = cfg.trial_rng(trial);
    let profile = random_profile(&mut rng, &cfg.profile);
    let table: Vec<((i64, i64), i64)> = profile.samples().collect();
    let mut boxes = Vec::with_capacity(cfg.n_boxes);
    for _ in 0..cfg.n_boxes {
        let ((x, y), phi) = table[rng.random_range(0..table.len())];
        boxes.push(place(&mut rng, [x, y, phi], cfg.coordinate_range)?);
    }
    let family = BoxFamily::with_profile(boxes, profile);
    family.check_bounds()?;
    Ok(family)
}

/// True when, for every pair `j < k`, box `j` has at least two side lengths ≥ those of box `k`.
pub fn two_side_domination(boxes: &[Box3]) -> bool {
    boxes.iter().enumerate().all(|(k, later)| {
        let l = later.sides();
        boxes[..k].iter().all(|earlier| {
            let e = earlier.sides();
            (0..3).filter(|&a| e[a] >= l[a]).count() >= 2
        })
    })
}

fn adversarial_sides(rng: &mut ChaCha8Rng, cfg: &ExperimentConfig) -> Vec<[i64; 3]> {
    let max_side = cfg.profile.max_side;
    let mut heights: Vec<i64> = (0..cfg.n_boxes)
        .map(|_| rng.random_range(1..=2 * max_side))
        .collect();
    heights.sort_unstable_by(|a, b| b.cmp(a));
    let mut out: Vec<[i64; 3]> = Vec::with_capacity(cfg.n_boxes);
    for z in heights {
        // Third sides never grow, so every predecessor dominates in z. Among (x, y),
        // a new box may not strictly exceed any predecessor in both.
        let (free, bounded) = if rng.random_bool(0.5) { (0, 1) } else { (1, 0) };
        let first = rng.random_range(1..=max_side);
        let cap = out
            .iter()
            .filter(|s| s[free] < first)
            .map(|s| s[bounded])
            .min()
            .unwrap_or(max_side);
        let second = rng.random_range(1..=cap);
        let mut sides = [0, 0, z];
        sides[free] = first;
        sides[bounded] = second;
        out.push(sides);
    }
    out
}

/// A family whose enlistment order certifies two-side domination by every predecessor.
pub fn generate_adversarial_family(cfg: &ExperimentConfig, trial: usize) -> Result<BoxFamily> {
    let mut rng = cfg.trial_rng(trial);
    for _ in 0..ADVERSARIAL_ATTEMPTS {
        let sides = adversarial_sides(&mut rng, cfg);
        let boxes = sides
            .into_iter()
            .map(|s| place(&mut rng, s, cfg.coordinate_range))
            .collect::<Result<Vec<_>>>()?;
        if two_side_domination(&boxes) {
            let family = BoxFamily::new(boxes);
            family.check_bounds()?;
            return Ok(family);
        }
    }
    Err(Error::GenerationFailed {
        attempts: ADVERSARIAL_ATTEMPTS,
    })
}

pub fn generate_family(cfg: &ExperimentConfig, trial: usize) -> Result<BoxFamily> {
    match cfg.family {
        FamilyKind::Zygmund => generate_zygmund_family(cfg, trial),
        FamilyKind::Adversarial => generate_adversarial_family(cfg, trial),
    }
}

/// Section fixture: a region crossed by three class-1 and two class-2 strips.
///
/// Returns `(region, prior)`. The class-1 priors span the region's first and third
/// sides, the class-2 priors its second and third, so after 3-dilation each one
/// covers a full slab of the region and the `(x₁, x₂)` section shows depth pairs
/// `(1,0)`, `(0,1)` and `(1,1)`.
pub fn crossing_strips_fixture() -> (Box3, Vec<Box3>) {
    let b = |x: [i64; 2], y: [i64; 2], z: [i64; 2]| Box3::from_bounds(x, y, z).expect("fixture box");
    let region = b([0, 12], [0, 12], [0, 4]);
    let prior = vec![
        b([0, 12], [1, 2], [0, 4]),
        b([0, 12], [5, 6], [0, 4]),
        b([0, 12], [9, 10], [0, 4]),
        b([2, 3], [0, 12], [0, 4]),
        b([7, 8], [0, 12], [0, 4]),
    ];
    (region, prior)
}

/// Two adjacent cubes followed by a small box their dilations cover twice.
///
/// The first two are selected; the third has exponential average `e² > 3` and is rejected.
pub fn forced_rejection_fixture() -> BoxFamily {
    let b = |x: [i64; 2], y: [i64; 2], z: [i64; 2]| Box3::from_bounds(x, y, z).expect("fixture box");
    BoxFamily::new(vec![
        b([0, 10], [0, 10], [0, 10]),
        b([10, 20], [0, 10], [0, 10]),
        b([8, 12], [10, 14], [0, 4]),
    ])
}
