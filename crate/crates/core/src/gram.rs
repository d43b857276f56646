//! Tangent-space Gram tensor: slice `i` holds the inner products of the
//! quotient log maps of every curve taken at curve `i`.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::elastic::{log_quotient_with, AlignConfig, TangentVector};
use crate::error::{Error, Result};
use crate::srvf::Srvf;

pub const CACHE_MAGIC: &[u8; 8] = b"CCGRAM\0\0";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GramTensor {
    slices: Vec<DMatrix<f64>>,
}

impl GramTensor {
    pub fn from_slices(slices: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = slices.len();
        if slices.iter().any(|s| s.nrows() != n || s.ncols() != n) {
            return Err(Error::InvalidArgument(format!(
                "gram tensor with {n} slices needs {n}x{n} slices"
            )));
        }
        if slices.iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidArgument("gram entries must be finite".into()));
        }
        Ok(Self { slices })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            slices: vec![DMatrix::zeros(n, n); n],
        }
    }

    /// Number of curves `N`.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slice(&self, i: usize) -> &DMatrix<f64> {
        &self.slices[i]
    }

    pub fn slices(&self) -> &[DMatrix<f64>] {
        &self.slices
    }

    /// `max_i |B^i|_F^2 + N + 1`, an upper bound on
    /// `max_i |B^i|_2^2 + N + 1`.
    pub fn eta_bound(&self) -> f64 {
        let max_sq = self
            .slices
            .iter()
            .map(|s| s.norm_squared())
            .fold(0.0, f64::max);
        max_sq + self.len() as f64 + 1.0
    }

    /// `max_i |B^i|_F + N + 1`, the unsquared variant.
    pub fn eta_frobenius(&self) -> f64 {
        let max = self.slices.iter().map(|s| s.norm()).fold(0.0, f64::max);
        max + self.len() as f64 + 1.0
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let n = self.len();
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(n as u64).to_le_bytes())?;
        for s in &self.slices {
            for r in 0..n {
                for c in 0..n {
                    w.write_all(&s[(r, c)].to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format("not a gram tensor cache (bad magic)".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported gram cache version {version}")));
        }
        let mut long = [0u8; 8];
        r.read_exact(&mut long)?;
        let n = u64::from_le_bytes(long) as usize;
        let mut slices = Vec::with_capacity(n);
        for _ in 0..n {
            let mut s = DMatrix::zeros(n, n);
            for row in 0..n {
                for col in 0..n {
                    r.read_exact(&mut long)?;
                    s[(row, col)] = f64::from_le_bytes(long);
                }
            }
            slices.push(s);
        }
        GramTensor::from_slices(slices)
    }
}

/// Tangent representatives `log_{[q_base]}([q_j])` for every `j`; the entry
/// for `j == base` is exactly zero.
pub fn tangent_logs(srvfs: &[Srvf], base: usize, cfg: &AlignConfig) -> Result<Vec<TangentVector>> {
    let q0 = &srvfs[base];
    srvfs
        .iter()
        .enumerate()
        .map(|(j, qj)| {
            if j == base {
                Ok(TangentVector::zero(q0))
            } else {
                log_quotient_with(q0, qj, cfg).map_err(|e| Error::Gram {
                    base,
                    other: j,
                    source: Box::new(e),
                })
            }
        })
        .collect()
}

/// Symmetrized Gram matrix of a set of tangent vectors.
pub fn slice_from_logs(logs: &[TangentVector]) -> DMatrix<f64> {
    let n = logs.len();
    let mut b = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = logs[j].inner(&logs[k]);
            b[(j, k)] = v;
            b[(k, j)] = v;
        }
    }
    b
}

pub fn build_gram(srvfs: &[Srvf]) -> Result<GramTensor> {
    build_gram_with(srvfs, &AlignConfig::default())
}

/// Builds every slice in parallel. Slices are independent, so the result does
/// not depend on the thread count.
pub fn build_gram_with(srvfs: &[Srvf], cfg: &AlignConfig) -> Result<GramTensor> {
    if srvfs.len() < 2 {
        return Err(Error::InvalidArgument("gram tensor needs at least 2 curves".into()));
    }
    let shape = srvfs[0].values().shape();
    if srvfs.iter().any(|q| q.values().shape() != shape) {
        return Err(Error::InvalidArgument("all srvfs must share T and n".into()));
    }
    let slices = (0..srvfs.len())
        .into_par_iter()
        .map(|i| tangent_logs(srvfs, i, cfg).map(|logs| slice_from_logs(&logs)))
        .collect::<Result<Vec<_>>>()?;
    GramTensor::from_slices(slices)
}
