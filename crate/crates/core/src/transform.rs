//! Grid functions, Walsh spectra, and the fast transform between them.

use crate::error::{Error, Result};
use crate::group::{reverse_bits, walsh_at_cell, Cell, DyadicPoint};

/// A real function constant on each of the `2^N` finest cells.
///
/// `values[c]` is the value on the cell with index `c` (x_0 most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    resolution: u32,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(resolution: u32, values: Vec<f64>) -> Result<Self> {
        check_length(resolution, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { resolution, values })
    }

    pub fn zeros(resolution: u32) -> Self {
        Self::constant(resolution, 0.0)
    }

    pub fn constant(resolution: u32, c: f64) -> Self {
        Self {
            resolution,
            values: vec![c; 1 << resolution],
        }
    }

    pub fn from_fn(resolution: u32, f: impl Fn(usize) -> f64) -> Self {
        Self {
            resolution,
            values: (0..1usize << resolution).map(f).collect(),
        }
    }

    /// `scale` times the indicator of a dyadic interval.
    pub fn indicator(cell: Cell, resolution: u32, scale: f64) -> Result<Self> {
        let r = cell.cell_range(resolution)?;
        Ok(Self::from_fn(resolution, |c| {
            if r.contains(&c) {
                scale
            } else {
                0.0
            }
        }))
    }

    /// `w_n` tabulated on the grid.
    pub fn walsh(n: u64, resolution: u32) -> Result<Self> {
        check_index(n, resolution, "w")?;
        Ok(Self::from_fn(resolution, |c| {
            walsh_at_cell(n, c, resolution) as f64
        }))
    }

    #[inline]
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, x: DyadicPoint) -> Result<f64> {
        self.same_resolution_as(x.resolution())?;
        Ok(self.values[x.cell_index()])
    }

    /// `∫ f dμ`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_resolution_as(other.resolution)?;
        Ok(Self {
            resolution: self.resolution,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &Self) -> Result<()> {
        self.same_resolution_as(other.resolution)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    /// The function `t ↦ f(t ⊕ a)`.
    pub fn shifted(&self, a: DyadicPoint) -> Result<Self> {
        self.same_resolution_as(a.resolution())?;
        let s = a.cell_index();
        Ok(Self::from_fn(self.resolution, |c| self.values[c ^ s]))
    }

    /// Largest pointwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_resolution_as(other.resolution)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub(crate) fn same_resolution_as(&self, other: u32) -> Result<()> {
        if self.resolution != other {
            return Err(Error::Mismatch {
                left: self.resolution,
                right: other,
            });
        }
        Ok(())
    }
}

/// The `2^N` Walsh-Fourier coefficients of a grid function in Paley order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    resolution: u32,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn new(resolution: u32, coeffs: Vec<f64>) -> Result<Self> {
        check_length(resolution, coeffs.len())?;
        if let Some(i) = coeffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { resolution, coeffs })
    }

    pub fn from_fn(resolution: u32, f: impl Fn(usize) -> f64) -> Self {
        Self {
            resolution,
            coeffs: (0..1usize << resolution).map(f).collect(),
        }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient-wise product with a multiplier sequence.
    pub fn weighted(&self, weight: impl Fn(usize) -> f64) -> Self {
        Self {
            resolution: self.resolution,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * weight(k))
                .collect(),
        }
    }

    /// `Σ |f̂(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

fn check_length(resolution: u32, len: usize) -> Result<()> {
    if resolution >= usize::BITS - 1 || len != 1usize << resolution {
        return Err(Error::Length {
            resolution,
            expected: 1usize.checked_shl(resolution).unwrap_or(0),
            got: len,
        });
    }
    Ok(())
}

pub(crate) fn check_index(n: u64, resolution: u32, what: &str) -> Result<()> {
    if resolution < 64 && n >> resolution != 0 {
        let needed = 64 - n.leading_zeros();
        return Err(Error::Resolution {
            what: format!("{what}_{n}"),
            needed,
            have: resolution,
        });
    }
    Ok(())
}

/// Unnormalized in-place Walsh-Hadamard butterfly in natural (Hadamard) order:
/// `out[k] = Σ_m in[m] (-1)^{popcount(k & m)}`.
pub fn fwht_in_place(data: &mut [f64]) {
    let n = data.len();
    assert!(
        n.is_power_of_two(),
        "FWHT needs a power-of-two length, got {n}"
    );
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

fn bit_reverse_permuted(values: &[f64], resolution: u32) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for (c, &v) in values.iter().enumerate() {
        out[reverse_bits(c as u64, resolution) as usize] = v;
    }
    out
}

/// Walsh-Fourier coefficients `f̂(k) = ∫ f w_k dμ` in `O(2^N N)`.
pub fn analyze(f: &GridFunction) -> Spectrum {
    // Cell c holds the point whose storage word is rev(c); reordering by that
    // word turns the Paley characters into plain Hadamard rows.
    let mut buf = bit_reverse_permuted(&f.values, f.resolution);
    fwht_in_place(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    Spectrum {
        resolution: f.resolution,
        coeffs: buf,
    }
}

/// `Σ_k coeffs[k] w_k`.
pub fn synthesize(s: &Spectrum) -> GridFunction {
    let mut buf = s.coeffs.clone();
    fwht_in_place(&mut buf);
    GridFunction {
        resolution: s.resolution,
        values: bit_reverse_permuted(&buf, s.resolution),
    }
}

/// `S_n f = Σ_{k<n} f̂(k) w_k`.
pub fn partial_sum(s: &Spectrum, n: u64) -> Result<GridFunction> {
    if n > s.coeffs.len() as u64 {
        return Err(Error::Resolution {
            what: format!("S_{n}"),
            needed: 64 - (n - 1).leading_zeros(),
            have: s.resolution,
        });
    }
    let n = n as usize;
    Ok(synthesize(&s.weighted(|k| if k < n { 1.0 } else { 0.0 })))
}

/// Naive `O(4^N)` coefficient computation.
pub fn analyze_naive(f: &GridFunction) -> Spectrum {
    let res = f.resolution;
    let size = f.values.len();
    Spectrum::from_fn(res, |k| {
        let s: f64 = f
            .values
            .iter()
            .enumerate()
            .map(|(c, &v)| v * walsh_at_cell(k as u64, c, res) as f64)
            .sum();
        s / size as f64
    })
}
