//! Reparameterizations of `[0, 1]` and the dynamic program that finds the
//! warp best aligning one SRVF to another.
//!
//! The lattice is `M x M` uniform nodes; a path runs from `(0, 0)` to
//! `(M-1, M-1)` with steps `(a, b)`, `1 <= a, b <= STEP`. Along a step the
//! warp is linear with slope `b / a`, and the step cost is the trapezoid
//! integral of `|q0(t) - sqrt(b/a) q1(gamma(t))|^2` over the lattice points
//! it spans.

use crate::curve::{self, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::srvf::Srvf;

/// Largest step along either lattice axis.
pub const STEP: usize = 3;

/// A monotone, endpoint-pinned map of `[0, 1]` sampled on the uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingFunction {
    gamma: Vec<f64>,
}

impl WarpingFunction {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "warp needs at least {MIN_SAMPLES} samples"
            )));
        }
        if gamma[0] != 0.0 || gamma[gamma.len() - 1] != 1.0 {
            return Err(Error::InvalidArgument("warp must satisfy gamma(0)=0, gamma(1)=1".into()));
        }
        if gamma.iter().any(|g| !g.is_finite() || !(0.0..=1.0).contains(g)) {
            return Err(Error::InvalidArgument("warp values must lie in [0, 1]".into()));
        }
        if gamma.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("warp must be monotone nondecreasing".into()));
        }
        Ok(Self { gamma })
    }

    pub fn identity(t_count: usize) -> Self {
        Self {
            gamma: curve::uniform_grid(t_count),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `max_t |gamma(t) - t|`.
    pub fn max_deviation_from_identity(&self) -> f64 {
        curve::uniform_grid(self.len())
            .iter()
            .zip(&self.gamma)
            .map(|(t, g)| (g - t).abs())
            .fold(0.0, f64::max)
    }

    /// `self o inner`, i.e. `t -> self(inner(t))`.
    pub fn compose(&self, inner: &WarpingFunction) -> Result<WarpingFunction> {
        if inner.len() != self.len() {
            return Err(Error::InvalidArgument("warp length mismatch".into()));
        }
        let mut out: Vec<f64> = inner.gamma.iter().map(|&s| self.eval(s)).collect();
        let last = out.len() - 1;
        out[0] = 0.0;
        out[last] = 1.0;
        WarpingFunction::new(out)
    }

    /// Linear interpolation of the warp at parameter `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let (i, w) = curve::locate(s, self.len());
        if w == 0.0 {
            self.gamma[i]
        } else {
            (1.0 - w) * self.gamma[i] + w * self.gamma[i + 1]
        }
    }
}

/// Both SRVFs sampled at the lattice nodes, row-major.
pub struct Lattice {
    size: usize,
    dim: usize,
    q0: Vec<f64>,
    q1: Vec<f64>,
    steps: Vec<StepTable>,
}

/// Interpolation pattern of one `(a, b)` step; independent of the start node.
struct StepTable {
    root: f64,
    taps: Vec<Tap>,
}

struct Tap {
    s: usize,
    lo: usize,
    w: f64,
    weight: f64,
}

impl StepTable {
    fn new(a: usize, b: usize, h: f64) -> Self {
        let taps = (0..=a)
            .map(|s| {
                let num = b * s;
                let lo = num / a;
                let w = (num % a) as f64 / a as f64;
                let weight = if s == 0 || s == a { 0.5 * h } else { h };
                Tap { s, lo, w, weight }
            })
            .collect();
        Self {
            root: (b as f64 / a as f64).sqrt(),
            taps,
        }
    }
}

impl Lattice {
    pub fn new(q0: &Srvf, q1: &Srvf, size: usize) -> Result<Self> {
        q0.check_same_shape(q1)?;
        if size < 2 {
            return Err(Error::InvalidArgument("warping lattice needs at least 2 nodes".into()));
        }
        let dim = q0.dim();
        let sample = |q: &Srvf| {
            let mut out = vec![0.0; size * dim];
            if size == q.len() {
                for i in 0..size {
                    for j in 0..dim {
                        out[i * dim + j] = q.values()[(i, j)];
                    }
                }
            } else {
                for (i, s) in curve::uniform_grid(size).into_iter().enumerate() {
                    curve::interpolate_row(q.values(), s, &mut out[i * dim..(i + 1) * dim]);
                }
            }
            out
        };
        let h = 1.0 / (size - 1) as f64;
        let steps = (1..=STEP)
            .flat_map(|a| (1..=STEP).map(move |b| StepTable::new(a, b, h)))
            .collect();
        Ok(Self {
            size,
            dim,
            q0: sample(q0),
            q1: sample(q1),
            steps,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn step_cost(&self, k: usize, l: usize, table: &StepTable) -> f64 {
        let d = self.dim;
        let root = table.root;
        let mut total = 0.0;
        if d == 1 {
            for tap in &table.taps {
                let j = l + tap.lo;
                let q1v = if tap.w == 0.0 {
                    self.q1[j]
                } else {
                    (1.0 - tap.w) * self.q1[j] + tap.w * self.q1[j + 1]
                };
                let diff = self.q0[k + tap.s] - root * q1v;
                total += tap.weight * (diff * diff);
            }
            return total;
        }
        for tap in &table.taps {
            let j = l + tap.lo;
            let row0 = &self.q0[(k + tap.s) * d..(k + tap.s + 1) * d];
            let mut sq = 0.0;
            for (c, &x0) in row0.iter().enumerate() {
                let q1v = if tap.w == 0.0 {
                    self.q1[j * d + c]
                } else {
                    (1.0 - tap.w) * self.q1[j * d + c] + tap.w * self.q1[(j + 1) * d + c]
                };
                let diff = x0 - root * q1v;
                sq += diff * diff;
            }
            total += tap.weight * sq;
        }
        total
    }

    /// Trapezoid cost of the straight segment `(k, l) -> (i, j)`; both
    /// increments must lie in `1..=STEP`.
    pub fn segment_cost(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let (a, b) = (i - k, j - l);
        assert!((1..=STEP).contains(&a) && (1..=STEP).contains(&b), "step ({a}, {b}) out of range");
        self.step_cost(k, l, &self.steps[(a - 1) * STEP + (b - 1)])
    }

    pub fn path_cost(&self, path: &[(usize, usize)]) -> f64 {
        path.windows(2).fold(0.0, |acc, w| {
            acc + self.segment_cost(w[0].0, w[0].1, w[1].0, w[1].1)
        })
    }

    /// Minimum-cost monotone path and its cost.
    pub fn solve(&self) -> (Vec<(usize, usize)>, f64) {
        let m = self.size;
        let idx = |i: usize, j: usize| i * m + j;
        let mut cost = vec![f64::INFINITY; m * m];
        let mut pred = vec![usize::MAX; m * m];
        cost[0] = 0.0;
        for i in 1..m {
            for j in 1..m {
                let mut best = f64::INFINITY;
                let mut arg = usize::MAX;
                for a in 1..=STEP.min(i) {
                    for b in 1..=STEP.min(j) {
                        let (k, l) = (i - a, j - b);
                        let base = cost[idx(k, l)];
                        if !base.is_finite() {
                            continue;
                        }
                        let c = base + self.step_cost(k, l, &self.steps[(a - 1) * STEP + (b - 1)]);
                        if c < best {
                            best = c;
                            arg = idx(k, l);
                        }
                    }
                }
                cost[idx(i, j)] = best;
                pred[idx(i, j)] = arg;
            }
        }
        let mut path = vec![(m - 1, m - 1)];
        let mut node = idx(m - 1, m - 1);
        while node != 0 {
            node = pred[node];
            path.push((node / m, node % m));
        }
        path.reverse();
        (path, cost[idx(m - 1, m - 1)])
    }
}

/// Converts a lattice path into a warp sampled on `t_count` grid points.
pub fn path_to_warp(path: &[(usize, usize)], lattice_size: usize, t_count: usize) -> WarpingFunction {
    let last = (lattice_size - 1) as f64;
    let mut on_lattice = vec![0.0; lattice_size];
    for w in path.windows(2) {
        let ((k, l), (i, j)) = (w[0], w[1]);
        let slope = (j - l) as f64 / (i - k) as f64;
        for s in 0..=(i - k) {
            on_lattice[k + s] = (l as f64 + slope * s as f64) / last;
        }
    }
    let mut gamma = if lattice_size == t_count {
        on_lattice
    } else {
        let lattice_warp = WarpingFunction { gamma: on_lattice };
        curve::uniform_grid(t_count)
            .into_iter()
            .map(|s| lattice_warp.eval(s))
            .collect()
    };
    let end = gamma.len() - 1;
    gamma[0] = 0.0;
    gamma[end] = 1.0;
    for g in gamma.iter_mut() {
        *g = g.clamp(0.0, 1.0);
    }
    for i in 1..gamma.len() {
        if gamma[i] < gamma[i - 1] {
            gamma[i] = gamma[i - 1];
        }
    }
    WarpingFunction { gamma }
}

/// Warp of `q1` minimizing `|q0 - (q1 o gamma) sqrt(gamma')|` over lattice
/// paths on a `grid x grid` lattice. Falls back to the identity when the
/// resampled warp does not reduce the L2 distance.
pub fn optimal_warping(q0: &Srvf, q1: &Srvf, grid: usize) -> Result<WarpingFunction> {
    let lattice = Lattice::new(q0, q1, grid)?;
    let (path, _) = lattice.solve();
    let gamma = path_to_warp(&path, grid, q0.len());
    let before = q0.distance(q1)?;
    let after = q0.distance(&q1.warp(&gamma)?)?;
    if after <= before {
        Ok(gamma)
    } else {
        Ok(WarpingFunction::identity(q0.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;

    fn srvf(t: usize, f: impl Fn(f64) -> f64) -> Srvf {
        let c = Curve::from_fn(t, 1, |s| vec![f(s)]).unwrap().normalize_length().unwrap();
        Srvf::from_curve(&c).project_sphere().unwrap()
    }

    #[test]
    fn validation() {
        assert!(WarpingFunction::new(vec![0.0, 0.6, 0.5, 1.0]).is_err());
        assert!(WarpingFunction::new(vec![0.1, 0.5, 1.0]).is_err());
        assert!(WarpingFunction::new(vec![0.0, 0.5, 0.9]).is_err());
        assert!(WarpingFunction::new(vec![0.0, 0.5, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn identical_inputs_give_identity_warp() {
        let q = srvf(60, |t| (4.0 * t).sin() + t);
        let gamma = optimal_warping(&q, &q, 60).unwrap();
        assert!(gamma.max_deviation_from_identity() < 1e-12);
    }

    #[test]
    fn identity_path_cost_matches_squared_distance() {
        let q0 = srvf(40, |t| (3.0 * t).sin());
        let q1 = srvf(40, |t| t * t * t);
        let lattice = Lattice::new(&q0, &q1, 40).unwrap();
        let diagonal: Vec<_> = (0..40).map(|i| (i, i)).collect();
        let d = q0.distance(&q1).unwrap();
        assert!((lattice.path_cost(&diagonal) - d * d).abs() < 1e-12);
        let (_, best) = lattice.solve();
        assert!(best <= d * d + 1e-15);
    }

    #[test]
    fn coarse_lattice_produces_valid_warp() {
        let q0 = srvf(90, |t| (6.0 * t).sin());
        let q1 = srvf(90, |t| (6.0 * t * t).sin());
        let gamma = optimal_warping(&q0, &q1, 30).unwrap();
        assert_eq!(gamma.len(), 90);
        assert!(WarpingFunction::new(gamma.values().to_vec()).is_ok());
    }

    #[test]
    fn compose_with_identity() {
        let g = WarpingFunction::new(vec![0.0, 0.1, 0.3, 0.7, 1.0]).unwrap();
        assert_eq!(g.compose(&WarpingFunction::identity(5)).unwrap(), g);
    }
}
