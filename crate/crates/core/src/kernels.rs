//! Dirichlet, Fejér, Nörlund-logarithmic and Riesz kernels.
//!
//! Every kernel here is built in the time domain by accumulating Dirichlet
//! kernels `D_k = Σ_{j<k} w_j` pointwise. The matching Fourier multipliers
//! live in [`MeanKind::multiplier`]; the `means` module uses those for the
//! spectral route, so the two constructions check each other.
//!
//! Index conventions: `D_0 = 0`, `S_0 f = 0`, and
//! `L_n f = (1/l_n) Σ_{k=0}^{n-1} S_k f / (n - k)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub use crate::harmonic::HarmonicPrefix;

use crate::error::{range, Error, Result};
use crate::group::reverse_bits;
use crate::transform::{check_index, GridFunction};

/// The three summability methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeanKind {
    /// `σ_n`, weights `q_k = 1`.
    Fejer,
    /// `L_n`, weights `q_k = 1/(k+1)`.
    Logarithmic,
    /// `R_n`, weights `1/k` on `S_k`.
    Riesz,
}

impl MeanKind {
    /// Smallest `n` for which the mean is defined.
    pub fn min_order(self) -> u64 {
        match self {
            MeanKind::Logarithmic => 2,
            MeanKind::Fejer | MeanKind::Riesz => 1,
        }
    }

    /// Weight of `D_k` (equivalently `S_k f`) in the `n`-th mean, before
    /// normalization.
    fn raw_weight(self, n: u64, k: u64) -> f64 {
        match self {
            MeanKind::Fejer => 1.0,
            MeanKind::Logarithmic => 1.0 / (n - k) as f64,
            MeanKind::Riesz => 1.0 / k as f64,
        }
    }

    /// Range of `k` with a nonzero `D_k` term.
    fn terms(self, n: u64) -> std::ops::RangeInclusive<u64> {
        match self {
            MeanKind::Logarithmic => 1..=n - 1,
            MeanKind::Fejer | MeanKind::Riesz => 1..=n,
        }
    }

    fn normalizer(self, n: u64, h: &HarmonicPrefix) -> f64 {
        match self {
            MeanKind::Fejer => n as f64,
            MeanKind::Logarithmic | MeanKind::Riesz => h.get(n as usize),
        }
    }

    /// Fourier multiplier of the `n`-th kernel: the coefficient of `w_m`.
    ///
    /// `h` must cover index `n`.
    pub fn multiplier(self, n: u64, m: u64, h: &HarmonicPrefix) -> f64 {
        if m >= n {
            return 0.0;
        }
        match self {
            MeanKind::Fejer => (n - m) as f64 / n as f64,
            // Σ_{k=m+1}^{n-1} 1/(n-k) = l_{n-1-m}
            MeanKind::Logarithmic => h.get((n - 1 - m) as usize) / h.get(n as usize),
            // Σ_{k=m+1}^{n} 1/k = l_n - l_m
            MeanKind::Riesz => {
                let ln = h.get(n as usize);
                (ln - h.get(m as usize)) / ln
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Fejer => "fejer",
            MeanKind::Logarithmic => "logarithmic",
            MeanKind::Riesz => "riesz",
        }
    }
}

fn check_order(n: u64, resolution: u32, min: u64, what: &str) -> Result<()> {
    if n < min {
        return Err(range(format!("{what}_{n} is undefined (needs n >= {min})")));
    }
    if resolution >= 63 || n > 1u64 << resolution {
        return Err(Error::Resolution {
            what: format!("{what}_{n}"),
            needed: 64 - (n - 1).leading_zeros(),
            have: resolution,
        });
    }
    Ok(())
}

/// Storage words of every cell, for fast character evaluation.
fn point_words(resolution: u32) -> Vec<u64> {
    (0..1u64 << resolution)
        .map(|c| reverse_bits(c, resolution))
        .collect()
}

/// Accumulates `Σ_k weight(k) D_k` for `k` in `terms`, stepping `D_k` by one
/// Walsh function at a time.
fn accumulate_dirichlet(
    resolution: u32,
    terms: std::ops::RangeInclusive<u64>,
    weight: impl Fn(u64) -> f64,
) -> Vec<f64> {
    let words = point_words(resolution);
    let mut d = vec![0.0f64; words.len()];
    let mut acc = vec![0.0f64; words.len()];
    let (first, last) = (*terms.start(), *terms.end());
    for k in 1..=last {
        let j = k - 1;
        for (dv, &w) in d.iter_mut().zip(&words) {
            if (j & w).count_ones() & 1 == 0 {
                *dv += 1.0;
            } else {
                *dv -= 1.0;
            }
        }
        if k >= first {
            let wk = weight(k);
            for (a, &dv) in acc.iter_mut().zip(&d) {
                *a += wk * dv;
            }
        }
    }
    acc
}

/// `D_n = Σ_{k<n} w_k`, summed pointwise.
pub fn dirichlet(n: u64, resolution: u32) -> Result<GridFunction> {
    if n == 0 {
        return Ok(GridFunction::zeros(resolution));
    }
    check_order(n, resolution, 0, "D")?;
    let words = point_words(resolution);
    let values = words
        .iter()
        .map(|&w| {
            (0..n)
                .map(|k| {
                    if (k & w).count_ones() & 1 == 0 {
                        1i64
                    } else {
                        -1
                    }
                })
                .sum::<i64>() as f64
        })
        .collect();
    GridFunction::new(resolution, values)
}

/// `D_{2^n}`: `2^n` on `I_n`, zero elsewhere.
pub fn dirichlet_closed_dyadic(n: u32, resolution: u32) -> Result<GridFunction> {
    if n > resolution {
        return Err(Error::Resolution {
            what: format!("D_(2^{n})"),
            needed: n,
            have: resolution,
        });
    }
    let block = 1usize << (resolution - n);
    let height = (1u64 << n) as f64;
    Ok(GridFunction::from_fn(resolution, |c| {
        if c < block {
            height
        } else {
            0.0
        }
    }))
}

/// `D_n = w_n Σ_k n_k (D_{2^{k+1}} - D_{2^k})`, evaluated from the closed
/// dyadic forms.
pub fn dirichlet_paley_formula(n: u64, resolution: u32) -> Result<GridFunction> {
    check_index(n, resolution, "D")?;
    let mut sum = GridFunction::zeros(resolution);
    for k in 0..resolution {
        if (n >> k) & 1 == 1 {
            let upper = dirichlet_closed_dyadic(k + 1, resolution)?;
            let lower = dirichlet_closed_dyadic(k, resolution)?;
            sum = sum.add(&upper.sub(&lower)?)?;
        }
    }
    sum.mul(&GridFunction::walsh(n, resolution)?)
}

/// Kernel of the `n`-th mean of the given kind, as a pointwise sum of
/// Dirichlet kernels.
pub fn mean_kernel(kind: MeanKind, n: u64, resolution: u32) -> Result<GridFunction> {
    let what = match kind {
        MeanKind::Fejer => "K",
        MeanKind::Logarithmic => "P",
        MeanKind::Riesz => "Y",
    };
    check_order(n, resolution, kind.min_order(), what)?;
    let h = HarmonicPrefix::new(n as usize);
    let norm = kind.normalizer(n, &h);
    let values = accumulate_dirichlet(resolution, kind.terms(n), |k| kind.raw_weight(n, k) / norm);
    GridFunction::new(resolution, values)
}

/// `P_n = (1/l_n) Σ_{k=1}^{n-1} D_k/(n-k)`, the Nörlund logarithmic kernel.
pub fn log_kernel(n: u64, resolution: u32) -> Result<GridFunction> {
    mean_kernel(MeanKind::Logarithmic, n, resolution)
}

/// `Y_n = (1/l_n) Σ_{k=1}^{n} D_k/k`, the Riesz logarithmic kernel.
pub fn riesz_kernel(n: u64, resolution: u32) -> Result<GridFunction> {
    mean_kernel(MeanKind::Riesz, n, resolution)
}

/// `K_n = (1/n) Σ_{k=1}^{n} D_k`.
pub fn fejer_kernel(n: u64, resolution: u32) -> Result<GridFunction> {
    mean_kernel(MeanKind::Fejer, n, resolution)
}

/// Sup-norm residual of `P_{2^n} - (D_{2^n} - w_{2^n-1} Y_{2^n})`.
pub fn check_kernel_identity(n: u32, resolution: u32) -> Result<f64> {
    if n == 0 {
        return Err(range("P_1 is undefined; the identity needs n >= 1"));
    }
    if n > resolution {
        return Err(Error::Resolution {
            what: format!("P_(2^{n})"),
            needed: n,
            have: resolution,
        });
    }
    let m = 1u64 << n;
    let p = log_kernel(m, resolution)?;
    let d = dirichlet_closed_dyadic(n, resolution)?;
    let wy = GridFunction::walsh(m - 1, resolution)?.mul(&riesz_kernel(m, resolution)?)?;
    p.max_abs_diff(&d.sub(&wy)?)
}

/// Which kernel a cache entry holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Dirichlet,
    Mean(MeanKind),
}

/// Memoizes kernels by `(kind, n, resolution)`.
///
/// Lookups take a read lock; a miss builds the kernel outside any lock and
/// inserts it, keeping the first value if two threads race on one key.
#[derive(Debug, Default)]
pub struct KernelCache {
    entries: RwLock<HashMap<(KernelKind, u64, u32), Arc<GridFunction>>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: KernelKind, n: u64, resolution: u32) -> Result<Arc<GridFunction>> {
        let key = (kind, n, resolution);
        if let Some(k) = self
            .entries
            .read()
            .expect("kernel cache poisoned")
            .get(&key)
        {
            return Ok(Arc::clone(k));
        }
        let built = Arc::new(match kind {
            KernelKind::Dirichlet => dirichlet(n, resolution)?,
            KernelKind::Mean(m) => mean_kernel(m, n, resolution)?,
        });
        let mut entries = self.entries.write().expect("kernel cache poisoned");
        Ok(Arc::clone(entries.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
