//! Harmonic numbers `l_n = Σ_{k=1}^n 1/k`.

/// Indices above this are evaluated with the asymptotic expansion instead of
/// a table.
pub const TABLE_LIMIT: u64 = 1 << 24;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Prefix table of harmonic numbers, accumulated in order `k = 1, 2, ...`.
#[derive(Clone, Debug)]
pub struct HarmonicPrefix {
    // table[n] = l_n, table[0] = 0
    table: Vec<f64>,
}

impl HarmonicPrefix {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 1..=max {
            acc += 1.0 / k as f64;
            table.push(acc);
        }
        Self { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    /// `l_n`; panics if `n` exceeds the table.
    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.table[n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }
}

/// `l_n` for any `n`: exact accumulation up to [`TABLE_LIMIT`], the
/// Euler-Maclaurin expansion beyond.
pub fn harmonic(n: u64) -> f64 {
    if n <= TABLE_LIMIT {
        (1..=n).fold(0.0, |acc, k| acc + 1.0 / k as f64)
    } else {
        harmonic_asymptotic(n)
    }
}

/// `ln n + γ + 1/(2n) - 1/(12n²) + 1/(120n⁴)`.
pub fn harmonic_asymptotic(n: u64) -> f64 {
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x.ln() + EULER_GAMMA + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0
}
