//! Summability means of Walsh-Fourier series.
//!
//! Each mean can be computed two ways: by weighting the spectrum of `f` with
//! the kernel's Fourier multiplier ([`SpectralMeans`]) or by convolving `f`
//! with the time-domain kernel ([`mean_by_convolution`]).

use crate::error::{Error, Result};
use crate::kernels::{mean_kernel, HarmonicPrefix, MeanKind};
use crate::transform::{analyze, synthesize, GridFunction, Spectrum};

/// Largest resolution at which [`convolve`] uses the direct double sum.
pub const DIRECT_CONVOLUTION_MAX_RESOLUTION: u32 = 10;

/// `(f ∗ g)(x) = ∫ f(x ⊕ t) g(t) dμ(t)`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.resolution() <= DIRECT_CONVOLUTION_MAX_RESOLUTION {
        convolve_direct(f, g)
    } else {
        convolve_spectral(f, g)
    }
}

/// Convolution by the `O(4^N)` double sum.
pub fn convolve_direct(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_resolution_as(g.resolution())?;
    let (fv, gv) = (f.values(), g.values());
    let scale = 1.0 / fv.len() as f64;
    Ok(GridFunction::from_fn(f.resolution(), |c| {
        gv.iter()
            .enumerate()
            .map(|(t, &g)| fv[c ^ t] * g)
            .sum::<f64>()
            * scale
    }))
}

/// Convolution through the coefficient product `(f ∗ g)^ = f̂ ĝ`.
pub fn convolve_spectral(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_resolution_as(g.resolution())?;
    let (sf, sg) = (analyze(f), analyze(g));
    let prod = Spectrum::from_fn(f.resolution(), |k| sf.coeffs()[k] * sg.coeffs()[k]);
    Ok(synthesize(&prod))
}

fn check_mean_order(kind: MeanKind, n: u64, resolution: u32) -> Result<()> {
    if n < kind.min_order() {
        return Err(crate::error::range(format!(
            "{} mean of order {n} is undefined (needs n >= {})",
            kind.name(),
            kind.min_order()
        )));
    }
    if resolution >= 63 || n > 1u64 << resolution {
        return Err(Error::Resolution {
            what: format!("{} mean of order {n}", kind.name()),
            needed: 64 - (n - 1).leading_zeros(),
            have: resolution,
        });
    }
    Ok(())
}

/// Means of one function for many orders, sharing one forward transform.
#[derive(Clone, Debug)]
pub struct SpectralMeans {
    spectrum: Spectrum,
    harmonic: HarmonicPrefix,
}

impl SpectralMeans {
    pub fn new(f: &GridFunction) -> Self {
        Self::from_spectrum(analyze(f))
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let harmonic = HarmonicPrefix::new(spectrum.len());
        Self { spectrum, harmonic }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn harmonic(&self) -> &HarmonicPrefix {
        &self.harmonic
    }

    pub fn resolution(&self) -> u32 {
        self.spectrum.resolution()
    }

    pub fn mean(&self, kind: MeanKind, n: u64) -> Result<GridFunction> {
        check_mean_order(kind, n, self.resolution())?;
        let h = &self.harmonic;
        Ok(synthesize(
            &self.spectrum.weighted(|m| kind.multiplier(n, m as u64, h)),
        ))
    }

    pub fn fejer(&self, n: u64) -> Result<GridFunction> {
        self.mean(MeanKind::Fejer, n)
    }

    pub fn log(&self, n: u64) -> Result<GridFunction> {
        self.mean(MeanKind::Logarithmic, n)
    }

    pub fn riesz(&self, n: u64) -> Result<GridFunction> {
        self.mean(MeanKind::Riesz, n)
    }

    /// `S_{2^n} f`.
    pub fn dyadic_partial(&self, n: u32) -> Result<GridFunction> {
        check_depth(n, self.resolution())?;
        let cut = 1usize << n;
        Ok(synthesize(&self.spectrum.weighted(|m| {
            if m < cut {
                1.0
            } else {
                0.0
            }
        })))
    }
}

/// The `n`-th mean computed as `f ∗ kernel`.
pub fn mean_by_convolution(f: &GridFunction, kind: MeanKind, n: u64) -> Result<GridFunction> {
    check_mean_order(kind, n, f.resolution())?;
    convolve(f, &mean_kernel(kind, n, f.resolution())?)
}

/// `σ_n f = (1/n) Σ_{k=1}^n S_k f`.
pub fn fejer_mean(f: &GridFunction, n: u64) -> Result<GridFunction> {
    SpectralMeans::new(f).fejer(n)
}

/// `L_n f = (1/l_n) Σ_{k=0}^{n-1} S_k f / (n-k)`.
pub fn log_mean(f: &GridFunction, n: u64) -> Result<GridFunction> {
    SpectralMeans::new(f).log(n)
}

/// `R_n f = (1/l_n) Σ_{k=1}^n S_k f / k`.
pub fn riesz_mean(f: &GridFunction, n: u64) -> Result<GridFunction> {
    SpectralMeans::new(f).riesz(n)
}

fn check_depth(n: u32, resolution: u32) -> Result<()> {
    if n > resolution {
        return Err(Error::Resolution {
            what: format!("depth-{n} average"),
            needed: n,
            have: resolution,
        });
    }
    Ok(())
}

/// `S_{2^n} f`: replaces `f` by its average on each depth-`n` cell.
pub fn dyadic_partial(f: &GridFunction, n: u32) -> Result<GridFunction> {
    check_depth(n, f.resolution())?;
    let block = 1usize << (f.resolution() - n);
    let mut values = Vec::with_capacity(f.len());
    for chunk in f.values().chunks(block) {
        let avg = chunk.iter().sum::<f64>() / block as f64;
        values.extend(std::iter::repeat_n(avg, block));
    }
    GridFunction::new(f.resolution(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{dirichlet, dirichlet_closed_dyadic};
    use crate::transform::partial_sum;

    fn sample(res: u32, seed: u64) -> GridFunction {
        let mut s = seed ^ 0x9e37_79b9_7f4a_7c15;
        let values = (0..1usize << res)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s % 2001) as f64 / 1000.0 - 1.0
            })
            .collect();
        GridFunction::new(res, values).unwrap()
    }

    #[test]
    fn convolution_identities() {
        let f = sample(6, 1);
        let full = dirichlet_closed_dyadic(6, 6).unwrap();
        assert!(convolve(&f, &full).unwrap().max_abs_diff(&f).unwrap() < 1e-12);
        let s = analyze(&f);
        for n in 0..=6 {
            let d = dirichlet_closed_dyadic(n, 6).unwrap();
            let c = convolve(&f, &d).unwrap();
            let p = partial_sum(&s, 1 << n).unwrap();
            assert!(c.max_abs_diff(&p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn convolution_commutes_and_routes_agree() {
        let f = sample(7, 2);
        let g = sample(7, 3);
        let fg = convolve_direct(&f, &g).unwrap();
        let gf = convolve_direct(&g, &f).unwrap();
        assert!(fg.max_abs_diff(&gf).unwrap() < 1e-12);
        let spec = convolve_spectral(&f, &g).unwrap();
        assert!(fg.max_abs_diff(&spec).unwrap() < 1e-12);
        assert!(convolve(&f, &sample(6, 1)).is_err());
    }

    #[test]
    fn means_of_constants() {
        let c = GridFunction::constant(5, 2.5);
        let m = SpectralMeans::new(&c);
        for n in 1..=32u64 {
            assert!(m.fejer(n).unwrap().max_abs_diff(&c).unwrap() < 1e-12);
            assert!(m.riesz(n).unwrap().max_abs_diff(&c).unwrap() < 1e-12);
        }
        let h = HarmonicPrefix::new(32);
        for n in 2..=32u64 {
            let factor = h.get(n as usize - 1) / h.get(n as usize);
            let expected = c.scale(factor);
            assert!(m.log(n).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
        }
        let l4 = m.log(4).unwrap();
        assert!((l4.values()[0] - 2.5 * 22.0 / 25.0).abs() < 1e-14);
    }

    #[test]
    fn first_order_means() {
        let f = sample(5, 4);
        let avg = GridFunction::constant(5, f.integral());
        assert!(fejer_mean(&f, 1).unwrap().max_abs_diff(&avg).unwrap() < 1e-12);
        assert!(riesz_mean(&f, 1).unwrap().max_abs_diff(&avg).unwrap() < 1e-12);
        assert!(log_mean(&f, 1).is_err());
        assert!(fejer_mean(&f, 0).is_err());
        assert!(fejer_mean(&f, 33).is_err());
    }

    #[test]
    fn log_mean_on_walsh_functions() {
        // S_k w_m = w_m iff k > m, so L_{2^n} w_m = (l_{2^n-m-1}/l_{2^n}) w_m.
        let res = 6;
        let h = HarmonicPrefix::new(64);
        for n in 1..=6u32 {
            let big = 1u64 << n;
            for m in 0..big {
                let w = GridFunction::walsh(m, res).unwrap();
                let got = log_mean(&w, big).unwrap();
                let factor = h.get((big - m - 1) as usize) / h.get(big as usize);
                assert!(got.max_abs_diff(&w.scale(factor)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn dual_routes_agree() {
        let f = sample(6, 5);
        let m = SpectralMeans::new(&f);
        for kind in [MeanKind::Fejer, MeanKind::Logarithmic, MeanKind::Riesz] {
            for n in kind.min_order()..=64 {
                let a = m.mean(kind, n).unwrap();
                let b = mean_by_convolution(&f, kind, n).unwrap();
                assert!(a.max_abs_diff(&b).unwrap() <= 1e-10, "{kind:?} n = {n}");
            }
        }
    }

    #[test]
    fn dyadic_partial_examples() {
        let f = sample(6, 6);
        assert_eq!(dyadic_partial(&f, 6).unwrap(), f);
        let avg = dyadic_partial(&f, 0).unwrap();
        assert!(
            avg.max_abs_diff(&GridFunction::constant(6, f.integral()))
                .unwrap()
                < 1e-14
        );
        let m = SpectralMeans::new(&f);
        for n in 0..=6 {
            let a = dyadic_partial(&f, n).unwrap();
            assert!(a.max_abs_diff(&m.dyadic_partial(n).unwrap()).unwrap() < 1e-12);
            let d = dirichlet(1 << n, 6).unwrap();
            assert!(a.max_abs_diff(&convolve(&f, &d).unwrap()).unwrap() < 1e-12);
        }
        assert!(dyadic_partial(&f, 7).is_err());
    }
}
