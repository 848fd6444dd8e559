//! A martingale in `H_p`, `0 < p < 1`, whose dyadic logarithmic means
//! `L_{2^n} f` are unbounded in weak-`L_p`.
//!
//! The construction stacks atoms
//! `a_k = 2^{2α_k(1/p-1)} (D_{2^{2α_k+1}} - D_{2^{2α_k}})` with weights
//! `λ_k = 1/√α_k`. On the cell `I_2(e_0 + e_1)` the mean
//! `L_{2^{2α_k+1}} f` splits as `I + II_1 + II_2`: earlier blocks (`I`), a
//! term that vanishes off `I_1` (`II_1`), and the current block (`II_2`),
//! which a harmonic-weighted Walsh sum bounds from below by `1/3`.
//!
//! Everything is materialized at a finite resolution `N >= 2 max α_k + 1`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::harmonic::harmonic;
use crate::kernels::dirichlet_closed_dyadic;
use crate::means::SpectralMeans;
use crate::norms::{weak_lp_norm, Exponent};
use crate::transform::{synthesize, GridFunction, Spectrum};

/// Resolutions above this are refused unless the caller raises the gate.
pub const DEFAULT_MAX_RESOLUTION: u32 = 24;

/// Absolute tolerance for `I + II_1 + II_2 = L f` relative to `max(1, |L f|)`.
pub const REASSEMBLY_TOLERANCE: f64 = 1e-9;

/// Strictly increasing positive integers `α_0 < α_1 < ...` and an exponent
/// `p ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSequence {
    alphas: Vec<u32>,
    p: Exponent,
}

impl AlphaSequence {
    pub fn new(alphas: Vec<u32>, p: Exponent) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Alpha("sequence is empty".into()));
        }
        if alphas[0] < 1 {
            return Err(Error::Alpha("alpha_0 must be at least 1".into()));
        }
        if let Some(w) = alphas.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Alpha(format!(
                "not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if alphas.iter().any(|&a| a > 31) {
            return Err(Error::Alpha("alpha above 31 cannot be materialized".into()));
        }
        if !p.is_sub_one() {
            return Err(Error::Exponent {
                value: p.value(),
                constraint: "0 < p < 1",
            });
        }
        Ok(Self { alphas, p })
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `2 max α + 1`.
    pub fn min_resolution(&self) -> u32 {
        2 * self.alphas.last().copied().unwrap_or(0) + 1
    }

    /// `λ_k = 1/√α_k`.
    pub fn lambda(&self, k: usize) -> f64 {
        1.0 / (self.alphas[k] as f64).sqrt()
    }

    /// `2^{2α_k(1/p-1)}/√α_k`, the coefficient of `f` on block `k`.
    pub fn block_coefficient(&self, k: usize) -> f64 {
        atom_height(self.alphas[k], self.p) * self.lambda(k)
    }

    /// `2^{2α_k/p}/√α_k`.
    fn block_mass(&self, k: usize) -> f64 {
        let a = self.alphas[k] as f64;
        (2.0 * a / self.p.value()).exp2() / a.sqrt()
    }

    fn check_resolution(&self, resolution: u32) -> Result<()> {
        let needed = self.min_resolution();
        if resolution < needed {
            return Err(Error::Resolution {
                what: format!("alpha sequence {:?}", self.alphas),
                needed,
                have: resolution,
            });
        }
        Ok(())
    }
}

/// `2^{2α(1/p-1)}`.
fn atom_height(alpha: u32, p: Exponent) -> f64 {
    (2.0 * alpha as f64 * p.dual_gap()).exp2()
}

/// Conditions on the sequence, one row per `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionRow {
    pub k: usize,
    pub alpha: u32,
    /// `Σ_{η<=k} α_η^{-p/2}`. Convergence of the full series cannot be
    /// certified from finitely many terms.
    pub cond3_partial_sum: f64,
    /// `2^{2α_k/p}/√α_k - Σ_{η<k} 2^{2α_η/p}/√α_η`; positive means satisfied.
    pub cond4_margin: f64,
    /// `2^{2α_k-8}/(√α_k l_{2^{2α_k+1}}) - 2^{2α_{k-1}/p}/√α_{k-1}`, absent
    /// for `k = 0`.
    pub cond5_margin: Option<f64>,
}

impl ConditionRow {
    pub fn satisfied(&self) -> bool {
        self.cond4_margin > 0.0 && self.cond5_margin.is_none_or(|m| m > 0.0)
    }
}

/// Evaluates the growth conditions the construction needs.
pub fn validate_alpha(seq: &AlphaSequence) -> Vec<ConditionRow> {
    let p = seq.p.value();
    let mut partial = 0.0;
    let mut prior_mass = 0.0;
    let mut rows = Vec::with_capacity(seq.len());
    for (k, &alpha) in seq.alphas.iter().enumerate() {
        let a = alpha as f64;
        partial += a.powf(-p / 2.0);
        let mass = seq.block_mass(k);
        let cond5_margin = (k > 0).then(|| {
            let l = harmonic(1u64 << (2 * alpha + 1));
            let rhs = (2.0 * a - 8.0).exp2() / (a.sqrt() * l);
            rhs - seq.block_mass(k - 1)
        });
        rows.push(ConditionRow {
            k,
            alpha,
            cond3_partial_sum: partial,
            cond4_margin: mass - prior_mass,
            cond5_margin,
        });
        prior_mass += mass;
    }
    rows
}

fn check_gate(resolution: u32, limit: u32) -> Result<()> {
    if resolution > limit {
        return Err(Error::MemoryGate {
            requested: resolution,
            limit,
        });
    }
    Ok(())
}

/// `a = 2^{2α(1/p-1)} (D_{2^{2α+1}} - D_{2^{2α}})`, a `p`-atom on `I_{2α}`.
pub fn build_atom(alpha: u32, p: Exponent, resolution: u32) -> Result<GridFunction> {
    if alpha == 0 {
        return Err(Error::Alpha("atom needs alpha >= 1".into()));
    }
    if 2 * alpha + 1 > resolution {
        return Err(Error::Resolution {
            what: format!("atom with alpha {alpha}"),
            needed: 2 * alpha + 1,
            have: resolution,
        });
    }
    let hi = dirichlet_closed_dyadic(2 * alpha + 1, resolution)?;
    let lo = dirichlet_closed_dyadic(2 * alpha, resolution)?;
    Ok(hi.sub(&lo)?.scale(atom_height(alpha, p)))
}

/// `f = Σ_k λ_k a_k`; its depth-`n` conditional expectations are the
/// martingale terms `f^{(n)} = Σ_{2α_k<n} λ_k a_k`.
pub fn build_martingale(seq: &AlphaSequence, resolution: u32) -> Result<GridFunction> {
    check_gate(resolution, DEFAULT_MAX_RESOLUTION)?;
    martingale_unchecked(seq, resolution)
}

fn martingale_unchecked(seq: &AlphaSequence, resolution: u32) -> Result<GridFunction> {
    seq.check_resolution(resolution)?;
    let mut f = GridFunction::zeros(resolution);
    for k in 0..seq.len() {
        f.add_scaled(
            seq.lambda(k),
            &build_atom(seq.alphas[k], seq.p, resolution)?,
        )?;
    }
    Ok(f)
}

/// Expected spectrum of the martingale: `2^{2α_k(1/p-1)}/√α_k` on
/// `[2^{2α_k}, 2^{2α_k+1})`, zero elsewhere.
pub fn martingale_spectrum(seq: &AlphaSequence, resolution: u32) -> Result<Spectrum> {
    seq.check_resolution(resolution)?;
    let mut coeffs = vec![0.0; 1 << resolution];
    for k in 0..seq.len() {
        let a = seq.alphas[k];
        coeffs[1 << (2 * a)..1 << (2 * a + 1)].fill(seq.block_coefficient(k));
    }
    Spectrum::new(resolution, coeffs)
}

/// Cells of `I_2(e_0 + e_1)`, the points with `x_0 = x_1 = 1`.
pub fn right_cell(resolution: u32) -> Range<usize> {
    3 << (resolution - 2)..1 << resolution
}

fn check_alpha_fits(alpha: u32, resolution: u32) -> Result<()> {
    if alpha == 0 {
        return Err(Error::Alpha("alpha must be at least 1".into()));
    }
    if 2 * alpha + 1 > resolution {
        return Err(Error::Resolution {
            what: format!("block of alpha {alpha}"),
            needed: 2 * alpha + 1,
            have: resolution,
        });
    }
    Ok(())
}

/// `Σ_{j=2^{2α}}^{2^{2α+1}-1} D_j/(2^{2α+1} - j)` on the whole grid, from its
/// Fourier coefficients.
fn block_dirichlet_sum(alpha: u32, resolution: u32) -> Result<GridFunction> {
    check_alpha_fits(alpha, resolution)?;
    let b = 1usize << (2 * alpha);
    let n = 2 * b;
    // Coefficient of w_m: Σ_{j=max(m+1,b)}^{n-1} 1/(n-j).
    let mut table = vec![0.0; b + 1];
    let mut acc = 0.0;
    for (i, t) in table.iter_mut().enumerate().skip(1) {
        acc += 1.0 / i as f64;
        *t = acc;
    }
    let spec = Spectrum::from_fn(resolution, |m| {
        if m < b {
            table[b]
        } else if m < n {
            table[n - 1 - m]
        } else {
            0.0
        }
    });
    Ok(synthesize(&spec))
}

/// The three harmonic-weighted sums of the block lemma, restricted to
/// `I_2(e_0 + e_1)`.
#[derive(Clone, Debug)]
pub struct BlockSums {
    pub alpha: u32,
    pub cells: Range<usize>,
    /// `Σ_j D_j/(2^{2α+1} - j)` over `2^{2α} <= j < 2^{2α+1}`.
    pub full: Vec<f64>,
    /// `Σ_{i=2^{2α-1}}^{2^{2α}-1} w_{2i+1}/(2^{2α+1} - 2i - 1)`.
    pub odd: Vec<f64>,
    /// The same sum with `w_{2i}` in place of `w_{2i+1}`.
    pub even: Vec<f64>,
}

impl BlockSums {
    /// Smallest `|full|` over the cell.
    pub fn min_abs(&self) -> f64 {
        self.full.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Largest disagreement between the absolute values of the three forms.
    pub fn max_form_gap(&self) -> f64 {
        self.full
            .iter()
            .zip(&self.odd)
            .zip(&self.even)
            .fold(0.0, |m, ((a, b), c)| {
                let (a, b, c) = (a.abs(), b.abs(), c.abs());
                m.max((a - b).abs()).max((a - c).abs()).max((b - c).abs())
            })
    }
}

/// Evaluates the block lemma sums on `I_2(e_0 + e_1)`.
pub fn lemma2_sum(alpha: u32, resolution: u32) -> Result<BlockSums> {
    check_alpha_fits(alpha, resolution)?;
    let cells = right_cell(resolution);
    let full = block_dirichlet_sum(alpha, resolution)?;
    let n = 1usize << (2 * alpha + 1);
    let lo = 1usize << (2 * alpha - 1);
    let hi = 1usize << (2 * alpha);
    let odd = synthesize(&Spectrum::from_fn(resolution, |m| {
        let i = m / 2;
        if m % 2 == 1 && (lo..hi).contains(&i) {
            1.0 / (n - m) as f64
        } else {
            0.0
        }
    }));
    let even = synthesize(&Spectrum::from_fn(resolution, |m| {
        let i = m / 2;
        if m % 2 == 0 && (lo..hi).contains(&i) {
            1.0 / (n - m - 1) as f64
        } else {
            0.0
        }
    }));
    Ok(BlockSums {
        alpha,
        full: full.values()[cells.clone()].to_vec(),
        odd: odd.values()[cells.clone()].to_vec(),
        even: even.values()[cells.clone()].to_vec(),
        cells,
    })
}

/// `L_{2^{2α_k+1}} f = I + II_1 + II_2` on `I_2(e_0 + e_1)`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub k: usize,
    pub alpha: u32,
    pub cells: Range<usize>,
    /// Contribution of `S_j f` for `j < 2^{2α_k}`.
    pub i: Vec<f64>,
    /// Earlier blocks seen by `S_j f` for `j >= 2^{2α_k}`.
    pub ii1: Vec<f64>,
    /// Current block.
    pub ii2: Vec<f64>,
    /// The mean itself, computed spectrally.
    pub log_mean: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn min_abs(v: &[f64]) -> f64 {
    v.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
}

impl Decomposition {
    pub fn max_abs_i(&self) -> f64 {
        max_abs(&self.i)
    }

    pub fn max_abs_ii1(&self) -> f64 {
        max_abs(&self.ii1)
    }

    pub fn min_abs_ii2(&self) -> f64 {
        min_abs(&self.ii2)
    }

    pub fn min_abs_log_mean(&self) -> f64 {
        min_abs(&self.log_mean)
    }

    /// `max |I + II_1 + II_2 - L f| / max(1, max |L f|)` over the cell.
    pub fn reassembly_residual(&self) -> f64 {
        let scale = max_abs(&self.log_mean).max(1.0);
        let worst = self
            .i
            .iter()
            .zip(&self.ii1)
            .zip(&self.ii2)
            .zip(&self.log_mean)
            .fold(0.0f64, |m, (((a, b), c), l)| m.max((a + b + c - l).abs()));
        worst / scale
    }
}

/// One row of the divergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceRow {
    pub conditions: ConditionRow,
    /// `2^{2α_k+1}`.
    pub order: u64,
    pub max_abs_i: f64,
    /// `2^{2α_{k-1}/p}/√α_{k-1}`, zero for `k = 0`.
    pub i_bound: f64,
    pub max_abs_ii1: f64,
    pub min_abs_ii2: f64,
    /// `(1/3)(1/l_{2^{2α_k+1}}) 2^{2α_k(1/p-1)}/√α_k`.
    pub ii2_bound: f64,
    pub min_abs_log_mean: f64,
    /// `2^{2α_k(1/p-1)-6}/α_k^{3/2}`.
    pub pointwise_bound: f64,
    pub reassembly_residual: f64,
    /// `‖L_{2^{2α_k+1}} f‖_{weak-L_p}` over the whole group.
    pub weak_norm: f64,
    /// `pointwise_bound · μ(I_2(e_0+e_1))^{1/p}`.
    pub weak_bound: f64,
}

/// Absolute slack on `II_1 = 0`.
pub const II1_TOLERANCE: f64 = 1e-9;

impl DivergenceRow {
    pub fn i_ok(&self) -> bool {
        self.max_abs_i <= self.i_bound
    }

    pub fn ii1_ok(&self) -> bool {
        self.max_abs_ii1 <= II1_TOLERANCE
    }

    pub fn ii2_ok(&self) -> bool {
        self.min_abs_ii2 >= self.ii2_bound
    }

    pub fn pointwise_ok(&self) -> bool {
        self.min_abs_log_mean >= self.pointwise_bound
    }

    pub fn weak_ok(&self) -> bool {
        self.weak_norm >= self.weak_bound
    }

    pub fn reassembly_ok(&self) -> bool {
        self.reassembly_residual <= REASSEMBLY_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.conditions.satisfied()
            && self.i_ok()
            && self.ii1_ok()
            && self.ii2_ok()
            && self.pointwise_ok()
            && self.weak_ok()
            && self.reassembly_ok()
    }
}

/// Rows ordered by `k`, plus the growth checks across rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionReport {
    pub p: Exponent,
    pub resolution: u32,
    pub rows: Vec<DivergenceRow>,
}

impl ConstructionReport {
    /// Both the computed norms and the lower bounds strictly increase in `k`.
    pub fn strictly_growing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].weak_norm > w[0].weak_norm && w[1].weak_bound > w[0].weak_bound)
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(DivergenceRow::passed) && self.strictly_growing()
    }
}

/// The materialized martingale with its spectrum, ready for the per-block
/// analysis.
#[derive(Debug)]
pub struct Construction {
    seq: AlphaSequence,
    f: GridFunction,
    means: SpectralMeans,
}

impl Construction {
    pub fn new(seq: AlphaSequence, resolution: u32) -> Result<Self> {
        Self::with_gate(seq, resolution, DEFAULT_MAX_RESOLUTION)
    }

    /// Like [`Construction::new`] with a custom resolution ceiling.
    pub fn with_gate(seq: AlphaSequence, resolution: u32, max_resolution: u32) -> Result<Self> {
        check_gate(resolution, max_resolution)?;
        let f = martingale_unchecked(&seq, resolution)?;
        let means = SpectralMeans::new(&f);
        Ok(Self { seq, f, means })
    }

    pub fn sequence(&self) -> &AlphaSequence {
        &self.seq
    }

    pub fn martingale(&self) -> &GridFunction {
        &self.f
    }

    pub fn means(&self) -> &SpectralMeans {
        &self.means
    }

    pub fn resolution(&self) -> u32 {
        self.f.resolution()
    }

    /// `L_{2^{2α_k+1}} f` on the whole group.
    pub fn block_log_mean(&self, k: usize) -> Result<GridFunction> {
        self.check_k(k)?;
        self.means.log(1 << (2 * self.seq.alphas[k] + 1))
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k >= self.seq.len() {
            return Err(crate::error::range(format!(
                "block {k} out of range 0..{}",
                self.seq.len()
            )));
        }
        Ok(())
    }

    pub fn decompose(&self, k: usize) -> Result<Decomposition> {
        let lm = self.block_log_mean(k)?;
        self.decompose_with(k, &lm)
    }

    fn decompose_with(&self, k: usize, log_mean: &GridFunction) -> Result<Decomposition> {
        self.check_k(k)?;
        let res = self.resolution();
        let alpha = self.seq.alphas[k];
        let b = 1usize << (2 * alpha);
        let n = 2 * b;
        let h = self.means.harmonic();
        let ln = h.get(n);
        let cells = right_cell(res);
        let restrict = |g: &GridFunction| g.values()[cells.clone()].to_vec();

        // I: Σ_{j=1}^{b-1} S_j f/(n-j) has multiplier l_{n-1-m} - l_{n-b} for m < b-1.
        let i = synthesize(&self.means.spectrum().weighted(|m| {
            if m + 1 < b {
                (h.get(n - 1 - m) - h.get(n - b)) / ln
            } else {
                0.0
            }
        }));

        // II_1: (1/l_n) Σ_{j=b}^{n-1} 1/(n-j) · Σ_{η<k} λ_η a_η, and that sum is l_b.
        let mut earlier = GridFunction::zeros(res);
        for eta in 0..k {
            earlier.add_scaled(
                self.seq.lambda(eta),
                &build_atom(self.seq.alphas[eta], self.seq.p, res)?,
            )?;
        }
        let ii1 = earlier.scale(h.get(b) / ln);

        // II_2: (c_k/l_n) Σ_{j=b}^{n-1} (D_j - D_b)/(n-j).
        let block = block_dirichlet_sum(alpha, res)?;
        let d_b = dirichlet_closed_dyadic(2 * alpha, res)?;
        let mut ii2 = block;
        ii2.add_scaled(-h.get(b), &d_b)?;
        let ii2 = ii2.scale(self.seq.block_coefficient(k) / ln);

        Ok(Decomposition {
            k,
            alpha,
            i: restrict(&i),
            ii1: restrict(&ii1),
            ii2: restrict(&ii2),
            log_mean: restrict(log_mean),
            cells,
        })
    }

    pub fn divergence_row(&self, k: usize, conditions: ConditionRow) -> Result<DivergenceRow> {
        let lm = self.block_log_mean(k)?;
        let d = self.decompose_with(k, &lm)?;
        let p = self.seq.p;
        let alpha = self.seq.alphas[k] as f64;
        let order = 1u64 << (2 * self.seq.alphas[k] + 1);
        let ln = self.means.harmonic().get(order as usize);
        let height = atom_height(self.seq.alphas[k], p);
        let pointwise_bound = height / 64.0 / alpha.powf(1.5);
        Ok(DivergenceRow {
            order,
            max_abs_i: d.max_abs_i(),
            i_bound: if k == 0 {
                0.0
            } else {
                self.seq.block_mass(k - 1)
            },
            max_abs_ii1: d.max_abs_ii1(),
            min_abs_ii2: d.min_abs_ii2(),
            ii2_bound: height / alpha.sqrt() / (3.0 * ln),
            min_abs_log_mean: d.min_abs_log_mean(),
            pointwise_bound,
            reassembly_residual: d.reassembly_residual(),
            weak_norm: weak_lp_norm(&lm, p.value())?,
            weak_bound: pointwise_bound * 0.25f64.powf(1.0 / p.value()),
            conditions,
        })
    }

    /// Runs every block and collects the report.
    pub fn divergence_table(&self) -> Result<ConstructionReport> {
        let rows = validate_alpha(&self.seq)
            .into_iter()
            .enumerate()
            .map(|(k, c)| self.divergence_row(k, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstructionReport {
            p: self.seq.p,
            resolution: self.resolution(),
            rows,
        })
    }
}

/// Builds the construction at `resolution` and returns its report.
pub fn divergence_table(seq: &AlphaSequence, resolution: u32) -> Result<ConstructionReport> {
    Construction::new(seq.clone(), resolution)?.divergence_table()
}
