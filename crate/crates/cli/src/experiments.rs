//! The five experiments behind the subcommands.

use anyhow::{bail, Result};
use dyadic::counterexample::{lemma2_sum, validate_alpha, AlphaSequence, Construction};
use dyadic::kernels::{
    check_kernel_identity, dirichlet, dirichlet_closed_dyadic, dirichlet_paley_formula, log_kernel,
    riesz_kernel,
};
use dyadic::means::SpectralMeans;
use dyadic::norms::{hardy_norm, lp_norm};
use dyadic::{analyze, DyadicPoint, GridFunction, Spectrum};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::Report;

/// Identity residuals are compared against this times `sup |D_{2^n}| = 2^n`.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const LEMMA_FORM_TOLERANCE: f64 = 1e-12;

fn check_gate(resolution: u32, gate: u32) -> Result<()> {
    if resolution > gate {
        bail!(
            "resolution {resolution} exceeds the memory gate {gate}; raise it with --max-memory-gate"
        );
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelRow {
    pub n: u32,
    pub order: u64,
    pub log_kernel_l1: f64,
    pub riesz_kernel_l1: f64,
    pub identity_residual: f64,
    pub dirichlet_match: bool,
    pub pass: bool,
}

/// Kernel norms and identities at orders `2^n`, `1 <= n <= n_max`.
pub fn run_kernels(resolution: u32, n_max: u32, gate: u32) -> Result<Report<KernelRow>> {
    check_gate(resolution, gate)?;
    if n_max > resolution {
        bail!("--n-max {n_max} exceeds the resolution {resolution}");
    }
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let order = 1u64 << n;
            let d = dirichlet(order, resolution)?;
            // The Paley form needs w_n, which exists only below order 2^N.
            let paley_ok = n == resolution || d == dirichlet_paley_formula(order, resolution)?;
            let dirichlet_match = paley_ok && d == dirichlet_closed_dyadic(n, resolution)?;
            let identity_residual = check_kernel_identity(n, resolution)?;
            Ok(KernelRow {
                n,
                order,
                log_kernel_l1: lp_norm(&log_kernel(order, resolution)?, 1.0)?,
                riesz_kernel_l1: lp_norm(&riesz_kernel(order, resolution)?, 1.0)?,
                identity_residual,
                dirichlet_match,
                pass: dirichlet_match && identity_residual <= IDENTITY_TOLERANCE * order as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.pass);
    Ok(Report::new(rows, passed)
        .with_note("n = 0 omitted: the logarithmic kernel needs order >= 2"))
}

/// Eight fixed points spread over the group.
pub fn sample_points(resolution: u32) -> Vec<DyadicPoint> {
    let size = 1usize << resolution;
    (0..8)
        .map(|i| DyadicPoint::from_cell((2 * i + 1) * size / 16, resolution).expect("in range"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub order: u64,
    /// `‖L_{2^n} f - f‖_p`.
    pub lp_error: f64,
    /// `max |L_{2^n} f(x) - f(x)|` over the sample points.
    pub pointwise_error: f64,
    /// `max |∫ f(t) Y_{2^n}(x ⊕ t) w_{2^n-1}(t) dμ(t)|` over the sample points.
    pub riemann_lebesgue_term: f64,
}

/// `L_{2^n} f -> f` for `1 <= n <= N`.
pub fn run_convergence(f: &GridFunction, p: f64, gate: u32) -> Result<Report<ConvergenceRow>> {
    let res = f.resolution();
    check_gate(res, gate)?;
    if !(p >= 1.0 && p.is_finite()) {
        bail!("convergence needs p >= 1, got {p}");
    }
    let means = SpectralMeans::new(f);
    let points = sample_points(res);
    let cells: Vec<usize> = points.iter().map(DyadicPoint::cell_index).collect();
    let rows = (1..=res)
        .into_par_iter()
        .map(|n| {
            let order = 1u64 << n;
            let lf = means.log(order)?;
            let err = lf.sub(f)?;
            let pointwise_error = cells
                .iter()
                .fold(0.0f64, |m, &c| m.max(err.values()[c].abs()));
            let tilted = f.mul(&GridFunction::walsh(order - 1, res)?)?;
            // Convolving with Y_{2^n} multiplies the coefficient at m by (l_{2^n} - l_m)/l_{2^n}.
            let ii = SpectralMeans::new(&tilted).riesz(order)?;
            let riemann_lebesgue_term = cells
                .iter()
                .fold(0.0f64, |m, &c| m.max(ii.values()[c].abs()));
            Ok(ConvergenceRow {
                n,
                order,
                lp_error: lp_norm(&err, p)?,
                pointwise_error,
                riemann_lebesgue_term,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(rows, true))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub k: usize,
    pub alpha: u32,
    pub order: u64,
    pub cond3_partial_sum: f64,
    pub cond4_margin: f64,
    pub cond5_margin: Option<f64>,
    pub max_abs_i: f64,
    pub i_bound: f64,
    pub max_abs_ii1: f64,
    pub min_abs_ii2: f64,
    pub ii2_bound: f64,
    pub min_abs_log_mean: f64,
    pub pointwise_bound: f64,
    pub reassembly_residual: f64,
    pub weak_norm: f64,
    pub weak_bound: f64,
    pub pass: bool,
}

/// The divergence table for the martingale built from `seq`.
pub fn run_divergence(
    seq: &AlphaSequence,
    resolution: u32,
    gate: u32,
) -> Result<Report<DivergenceRow>> {
    let needed = seq.min_resolution();
    if resolution < needed {
        bail!(
            "resolution {resolution} is too small for alphas {:?}: need N >= {needed}",
            seq.alphas()
        );
    }
    check_gate(resolution, gate)?;
    let c = Construction::with_gate(seq.clone(), resolution, gate)?;
    let rows = validate_alpha(seq)
        .into_par_iter()
        .map(|cond| {
            let k = cond.k;
            let r = c.divergence_row(k, cond)?;
            Ok(DivergenceRow {
                k,
                alpha: r.conditions.alpha,
                order: r.order,
                cond3_partial_sum: r.conditions.cond3_partial_sum,
                cond4_margin: r.conditions.cond4_margin,
                cond5_margin: r.conditions.cond5_margin,
                max_abs_i: r.max_abs_i,
                i_bound: r.i_bound,
                max_abs_ii1: r.max_abs_ii1,
                min_abs_ii2: r.min_abs_ii2,
                ii2_bound: r.ii2_bound,
                min_abs_log_mean: r.min_abs_log_mean,
                pointwise_bound: r.pointwise_bound,
                reassembly_residual: r.reassembly_residual,
                weak_norm: r.weak_norm,
                weak_bound: r.weak_bound,
                pass: r.passed(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let growing = rows
        .windows(2)
        .all(|w| w[1].weak_norm > w[0].weak_norm && w[1].weak_bound > w[0].weak_bound);
    let passed = growing && rows.iter().all(|r| r.pass);
    let mut report = Report::new(rows, passed).with_note(
        "condition (3) is a tail condition: only the partial sum is shown, it is not falsifiable at finite K",
    );
    if !growing {
        report = report.with_note("weak norms or bounds are not strictly increasing in k");
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaRow {
    pub alpha: u32,
    pub min_abs: f64,
    pub bound: f64,
    pub max_form_gap: f64,
    pub pass: bool,
}

/// The block lemma for every `α` with `2α + 1 <= N`.
pub fn run_lemma2(resolution: u32, gate: u32) -> Result<Report<LemmaRow>> {
    check_gate(resolution, gate)?;
    if resolution < 3 {
        bail!("the block lemma needs N >= 3");
    }
    let rows = (1..=(resolution - 1) / 2)
        .into_par_iter()
        .map(|alpha| {
            let s = lemma2_sum(alpha, resolution)?;
            let (min_abs, max_form_gap) = (s.min_abs(), s.max_form_gap());
            Ok(LemmaRow {
                alpha,
                min_abs,
                bound: 1.0 / 3.0,
                max_form_gap,
                pass: min_abs >= 1.0 / 3.0 && max_form_gap <= LEMMA_FORM_TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.pass);
    Ok(Report::new(rows, passed))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub m: u32,
    /// Partial sums run over `1 <= k <= 2^m`.
    pub k_max: u64,
    /// `Σ ‖S_k f‖_p^p / k^{2-p}`, divided by `‖f‖_{H_p}^p`.
    pub partial_sum_ratio: Option<f64>,
    /// `Σ ‖L_k f‖_p^p / k^{2-p}` over `k >= 2`, divided by `‖f‖_{H_p}^p`.
    pub log_mean_ratio: Option<f64>,
    /// `Σ log^p(k) ‖L_k f‖_p^p / k^{2-p}`, divided by `‖f‖_{H_p}^p`.
    pub weighted_log_mean_ratio: Option<f64>,
}

/// Diagnostics are quadratic in the grid size.
pub const DIAGNOSTICS_MAX_RESOLUTION: u32 = 14;

/// Weighted series of partial sums and logarithmic means, recorded at every
/// dyadic checkpoint. Nothing is asserted.
pub fn run_diagnostics(f: &GridFunction, p: f64, gate: u32) -> Result<Report<DiagnosticRow>> {
    let res = f.resolution();
    check_gate(res, gate.min(DIAGNOSTICS_MAX_RESOLUTION))?;
    if !(p > 0.0 && p < 1.0) {
        bail!("diagnostics need 0 < p < 1, got {p}");
    }
    let spec = analyze(f);
    let means = SpectralMeans::from_spectrum(spec.clone());
    let size = 1u64 << res;
    let terms = (1..=size)
        .into_par_iter()
        .map(|k| {
            let weight = (k as f64).powf(2.0 - p);
            let s = partial_sum(&spec, k)?;
            let sk = lp_norm(&s, p)?.powf(p) / weight;
            let (lk, wk) = if k >= 2 {
                let l = lp_norm(&means.log(k)?, p)?.powf(p) / weight;
                (l, (k as f64).ln().powf(p) * l)
            } else {
                (0.0, 0.0)
            };
            Ok([sk, lk, wk])
        })
        .collect::<Result<Vec<_>>>()?;
    let hp = hardy_norm(f, p)?.powf(p);
    let ratio = |v: f64| (hp > 0.0).then(|| v / hp);
    let mut acc = [0.0; 3];
    let mut rows = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        for (a, v) in acc.iter_mut().zip(t) {
            *a += v;
        }
        let k = i as u64 + 1;
        if k.is_power_of_two() {
            rows.push(DiagnosticRow {
                m: k.trailing_zeros(),
                k_max: k,
                partial_sum_ratio: ratio(acc[0]),
                log_mean_ratio: ratio(acc[1]),
                weighted_log_mean_ratio: ratio(acc[2]),
            });
        }
    }
    let mut report = Report::new(rows, true);
    if hp == 0.0 {
        report = report.with_note("f has zero Hardy norm: ratios are undefined");
    }
    Ok(report)
}

fn partial_sum(spec: &Spectrum, k: u64) -> Result<GridFunction> {
    Ok(dyadic::partial_sum(spec, k)?)
}
