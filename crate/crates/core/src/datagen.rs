//! Synthetic curve datasets: progressively warped sine clusters, randomly
//! perturbed spectrum-like templates, and the perturbation recipe for
//! ingested pen trajectories.
//!
//! Every generator is a pure function of its parameters and seed.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::curve::{self, Curve};
use crate::dataset::{Dataset, DatasetMeta};
use crate::elastic::WarpingFunction;
use crate::error::{Error, Result};

/// Number of Gaussian bumps in the log-density of a random warp.
const WARP_BUMPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WarpConfig {
    /// Scale of the log-density of local warps.
    pub strength: f64,
    /// Global time shift, uniform in `[-shift_range, shift_range]`.
    pub shift_range: f64,
    /// Global time stretch factor, uniform in `1 +/- stretch_range`.
    pub stretch_range: f64,
    /// Amplitude factor, uniform in `1 +/- scale_range`.
    pub scale_range: f64,
}

impl Default for WarpConfig {
    fn default() -> Self {
        Self::none()
    }
}

impl WarpConfig {
    pub const fn none() -> Self {
        Self {
            strength: 0.0,
            shift_range: 0.0,
            stretch_range: 0.0,
            scale_range: 0.0,
        }
    }

    /// Defaults for the sine experiment.
    pub const fn sine() -> Self {
        Self {
            strength: 1.5,
            ..Self::none()
        }
    }

    /// Defaults for the template experiment.
    pub const fn template() -> Self {
        Self {
            strength: 0.6,
            shift_range: 0.05,
            stretch_range: 0.15,
            scale_range: 0.3,
        }
    }

    /// Defaults for perturbing pen trajectories.
    pub const fn trajectory() -> Self {
        Self {
            strength: 0.6,
            shift_range: 0.05,
            stretch_range: 0.15,
            scale_range: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.strength, self.shift_range, self.stretch_range, self.scale_range];
        if all.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("warp config values must be nonnegative".into()));
        }
        if self.stretch_range >= 1.0 {
            return Err(Error::InvalidArgument("stretch_range must be < 1".into()));
        }
        Ok(())
    }
}

/// `seed`-derived independent seed for item `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random smooth warp: the normalized cumulative integral of
/// `exp(strength * s(t))`, `s` a zero-mean sum of random Gaussian bumps.
pub fn random_warp(t_count: usize, strength: f64, seed: u64) -> Result<WarpingFunction> {
    if t_count < curve::MIN_SAMPLES {
        return Err(Error::InvalidArgument("warp needs at least 3 samples".into()));
    }
    if !(strength >= 0.0) {
        return Err(Error::InvalidArgument("warp strength must be nonnegative".into()));
    }
    if strength == 0.0 {
        return Ok(WarpingFunction::identity(t_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> = (0..WARP_BUMPS)
        .map(|_| {
            let center: f64 = rng.random();
            let amplitude: f64 = StandardNormal.sample(&mut rng);
            let width: f64 = rng.random_range(0.08..0.2);
            (center, amplitude, width)
        })
        .collect();
    let grid = curve::uniform_grid(t_count);
    let mut s: Vec<f64> = grid
        .iter()
        .map(|&t| {
            bumps
                .iter()
                .map(|&(c, a, w)| a * (-(t - c) * (t - c) / (2.0 * w * w)).exp())
                .sum()
        })
        .collect();
    let mean = s.iter().sum::<f64>() / t_count as f64;
    s.iter_mut().for_each(|v| *v = (*v - mean) * strength);
    let density: Vec<f64> = s.iter().map(|v| v.exp()).collect();

    let mut gamma = vec![0.0; t_count];
    for i in 1..t_count {
        gamma[i] = gamma[i - 1] + 0.5 * (density[i - 1] + density[i]);
    }
    let total = gamma[t_count - 1];
    gamma.iter_mut().for_each(|g| *g /= total);
    gamma[t_count - 1] = 1.0;
    WarpingFunction::new(gamma)
}

fn uniform_sym(rng: &mut impl Rng, range: f64) -> f64 {
    if range == 0.0 {
        0.0
    } else {
        rng.random_range(-range..=range)
    }
}

/// Applies, in order, a global time shift, a global stretch about the
/// midpoint, an amplitude scale and a local warp of the given strength.
/// Parameters mapped outside `[0, 1]` hold the endpoint value.
pub fn perturb_curve(c: &Curve, cfg: &WarpConfig, strength: f64, seed: u64) -> Result<Curve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = uniform_sym(&mut rng, cfg.shift_range);
    let stretch = 1.0 + uniform_sym(&mut rng, cfg.stretch_range);
    let amplitude = 1.0 + uniform_sym(&mut rng, cfg.scale_range);
    let warp = random_warp(c.len(), strength, rng.next_u64())?;

    if shift == 0.0 && stretch == 1.0 && amplitude == 1.0 && strength == 0.0 {
        return Ok(c.clone());
    }
    let n = c.dim();
    let mut rows = Vec::with_capacity(c.len());
    let mut row = vec![0.0; n];
    for &g in warp.values() {
        let s = 0.5 + (g - 0.5) * stretch - shift;
        curve::interpolate_row(c.samples(), s, &mut row);
        rows.push(row.iter().map(|v| v * amplitude).collect::<Vec<_>>());
    }
    Curve::from_rows(&rows)
}

fn meta(generator: &str, seed: u64, params: serde_json::Value) -> DatasetMeta {
    DatasetMeta {
        generator: generator.into(),
        seed,
        params,
    }
}

/// `clusters` groups of `per_cluster` 1-D sine curves; group `j` has
/// frequency `j + 1` and instance `m` is warped with strength
/// `cfg.strength * m / per_cluster`. Curves are length-normalized.
pub fn gen_sine_clusters(
    clusters: usize,
    per_cluster: usize,
    t_count: usize,
    cfg: &WarpConfig,
    seed: u64,
) -> Result<Dataset> {
    if clusters < 2 || per_cluster < 2 {
        return Err(Error::InvalidArgument("need >= 2 clusters of >= 2 curves".into()));
    }
    cfg.validate()?;
    let mut curves = Vec::with_capacity(clusters * per_cluster);
    let mut labels = Vec::with_capacity(clusters * per_cluster);
    for j in 0..clusters {
        let freq = (j + 1) as f64;
        let base = Curve::from_fn(t_count, 1, |t| vec![(2.0 * PI * freq * t).sin()])?;
        for m in 0..per_cluster {
            let strength = cfg.strength * m as f64 / per_cluster as f64;
            let item_seed = derive_seed(seed, (j * per_cluster + m) as u64);
            let warped = if cfg.shift_range == 0.0 && cfg.stretch_range == 0.0 && cfg.scale_range == 0.0 {
                // Evaluate the analytic sine at the warped times.
                let gamma = random_warp(t_count, strength, derive_seed(item_seed, 0))?;
                let rows: Vec<Vec<f64>> = gamma
                    .values()
                    .iter()
                    .map(|&g| vec![(2.0 * PI * freq * g).sin()])
                    .collect();
                Curve::from_rows(&rows)?
            } else {
                perturb_curve(&base, cfg, strength, item_seed)?
            };
            curves.push(warped.normalize_length()?);
            labels.push(j);
        }
    }
    let params = serde_json::json!({
        "clusters": clusters, "per_cluster": per_cluster, "T": t_count, "warp": cfg,
    });
    Ok(Dataset::labelled(curves, labels)?.with_meta(meta("sine", seed, params)))
}

/// Built-in 1-D spectrum-like templates: a sloping baseline with Gaussian
/// absorption dips at template-specific positions, scaled to unit length.
pub fn builtin_templates(t_count: usize) -> Result<Vec<Curve>> {
    // (center, depth, width) per dip
    let dips: [&[(f64, f64, f64)]; 3] = [
        &[(0.5, 0.5, 0.08)],
        &[(0.3, 0.4, 0.06), (0.7, 0.3, 0.06)],
        &[(0.22, 0.3, 0.05), (0.5, 0.3, 0.05), (0.78, 0.3, 0.05)],
    ];
    dips.iter()
        .map(|set| {
            Curve::from_fn(t_count, 1, |t| {
                let absorption: f64 = set
                    .iter()
                    .map(|&(c, d, w)| d * (-(t - c) * (t - c) / (2.0 * w * w)).exp())
                    .sum();
                vec![1.0 - 0.3 * t - absorption]
            })?
            .normalize_length()
        })
        .collect()
}

/// `per_cluster` randomly shifted, stretched, scaled and warped copies of
/// each template.
pub fn gen_template_clusters(
    templates: &[Curve],
    per_cluster: usize,
    cfg: &WarpConfig,
    seed: u64,
) -> Result<Dataset> {
    if templates.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 templates".into()));
    }
    if per_cluster == 0 {
        return Err(Error::InvalidArgument("per_cluster must be positive".into()));
    }
    cfg.validate()?;
    let mut curves = Vec::new();
    let mut labels = Vec::new();
    for (j, template) in templates.iter().enumerate() {
        for m in 0..per_cluster {
            let item_seed = derive_seed(seed, (j * per_cluster + m) as u64);
            curves.push(perturb_curve(template, cfg, cfg.strength, item_seed)?);
            labels.push(j);
        }
    }
    let params = serde_json::json!({
        "templates": templates.len(), "per_cluster": per_cluster, "warp": cfg,
    });
    Ok(Dataset::labelled(curves, labels)?.with_meta(meta("template", seed, params)))
}

/// Shift, stretch, scale and locally warp every trajectory; labels and ids
/// are preserved.
pub fn perturb_trajectories(d: &Dataset, cfg: &WarpConfig, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let curves = d
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| perturb_curve(c, cfg, cfg.strength, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let params = serde_json::json!({ "warp": cfg, "source": d.meta.generator });
    Ok(Dataset {
        curves,
        ..d.clone()
    }
    .with_meta(meta("trajectory", seed, params)))
}

/// Draws up to `per_class` curves from each labelled class.
pub fn sample_per_class(d: &Dataset, per_class: usize, seed: u64) -> Result<Dataset> {
    let truth = d.truth()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::new();
    for class in 0..truth.k() {
        let mut members: Vec<usize> = (0..d.len()).filter(|&i| truth.labels()[i] == class).collect();
        // Partial Fisher-Yates.
        let take = per_class.min(members.len());
        for i in 0..take {
            let j = rng.random_range(i..members.len());
            members.swap(i, j);
        }
        let mut picked = members[..take].to_vec();
        picked.sort_unstable();
        chosen.extend(picked);
    }
    Ok(d.subset(&chosen))
}

/// Stand-in 2-D pen-velocity trajectories for three letter-like stroke
/// classes (an open arc, a loop with a tail, and a down-stroke with a bowl).
/// Used for demos and tests when no recorded trajectories are available.
pub fn gen_letter_trajectories(per_class: usize, t_count: usize, seed: u64) -> Result<Dataset> {
    if per_class == 0 {
        return Err(Error::InvalidArgument("per_class must be positive".into()));
    }
    type Path = fn(f64) -> (f64, f64);
    let paths: [Path; 3] = [
        |t| {
            let a = 0.25 * PI + 1.5 * PI * t;
            (a.cos(), a.sin())
        },
        |t| {
            if t < 0.7 {
                let a = 2.0 * PI * t / 0.7;
                (a.cos() - 1.0, a.sin())
            } else {
                (0.0, -2.0 * (t - 0.7))
            }
        },
        |t| {
            if t < 0.4 {
                (0.0, 1.0 - 5.0 * t)
            } else {
                let a = PI * (t - 0.4) / 0.6;
                (0.5 - 0.5 * (a).cos() * 1.0, -1.0 + 0.5 * (2.0 * a).sin())
            }
        },
    ];
    let mut curves = Vec::new();
    let mut labels = Vec::new();
    for (class, path) in paths.iter().enumerate() {
        for m in 0..per_class {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, (class * per_class + m) as u64));
            let sx = 1.0 + rng.random_range(-0.1..0.1);
            let sy = 1.0 + rng.random_range(-0.1..0.1);
            let wobble: f64 = rng.random_range(-0.05..0.05);
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            let position = Curve::from_fn(t_count, 2, |t| {
                let (x, y) = path(t);
                vec![
                    sx * x + wobble * (3.0 * PI * t + phase).sin(),
                    sy * y + wobble * (2.0 * PI * t + phase).cos(),
                ]
            })?;
            let velocity = position.derivative();
            let mean: Vec<f64> = (0..2)
                .map(|d| velocity.samples().column(d).mean())
                .collect();
            let centred = velocity.translate(&[-mean[0], -mean[1]])?;
            curves.push(centred.scale(1.0 / (t_count - 1) as f64));
            labels.push(class);
        }
    }
    let params = serde_json::json!({ "per_class": per_class, "T": t_count });
    Ok(Dataset::labelled(curves, labels)?.with_meta(meta("letters", seed, params)))
}
