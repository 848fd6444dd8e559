use dyadic::counterexample::{
    build_martingale, divergence_table, lemma2_sum, martingale_spectrum, validate_alpha,
    AlphaSequence, Construction,
};
use dyadic::norms::hardy_norm;
use dyadic::{analyze, Error, Exponent};

#[test]
fn three_quarter_exponent_recomputes_bounds() {
    let p = Exponent::new(3, 4).unwrap();
    let seq = AlphaSequence::new(vec![1, 10], p).unwrap();
    let report = divergence_table(&seq, 21).unwrap();
    let alpha = 10.0f64;
    let expected = (2.0 * alpha * (4.0 / 3.0 - 1.0) - 6.0).exp2() / alpha.powf(1.5);
    assert!((report.rows[1].pointwise_bound - expected).abs() <= 1e-12 * expected);
    // 2^{2/3 - 6} (1/4)^{4/3} = 2^{-8}
    assert!((report.rows[0].weak_bound - 2f64.powi(-8)).abs() <= 1e-15);
    for row in &report.rows {
        assert!(
            row.pointwise_ok() && row.ii2_ok() && row.reassembly_ok(),
            "{row:?}"
        );
    }
}

#[test]
fn spectrum_matches_block_pattern() {
    let seq = AlphaSequence::new(vec![2, 3, 5], Exponent::new(2, 3).unwrap()).unwrap();
    let f = build_martingale(&seq, 12).unwrap();
    let got = analyze(&f);
    let want = martingale_spectrum(&seq, 12).unwrap();
    let scale = want.coeffs().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in got.coeffs().iter().zip(want.coeffs()) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

#[test]
fn hardy_norm_of_martingale_is_finite() {
    let seq = AlphaSequence::new(vec![1, 3], Exponent::half()).unwrap();
    let f = build_martingale(&seq, 9).unwrap();
    let h = hardy_norm(&f, 0.5).unwrap();
    assert!(h.is_finite() && h > 0.0);
}

#[test]
fn memory_gate_is_overridable() {
    let seq = AlphaSequence::new(vec![1], Exponent::half()).unwrap();
    assert!(matches!(
        Construction::new(seq.clone(), 25),
        Err(Error::MemoryGate { .. })
    ));
    assert!(Construction::with_gate(seq, 6, 5).is_err());
}

#[test]
fn lemma_bound_at_every_feasible_alpha() {
    for alpha in 1..=6 {
        assert!(lemma2_sum(alpha, 13).unwrap().min_abs() >= 1.0 / 3.0);
    }
}

#[test]
fn conditions_reject_slow_growth() {
    let seq = AlphaSequence::new(vec![1, 4, 9], Exponent::half()).unwrap();
    let rows = validate_alpha(&seq);
    assert!(!rows[1].satisfied());
    assert!(rows[1].cond4_margin > 0.0);
}
