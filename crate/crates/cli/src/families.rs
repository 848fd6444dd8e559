//! Builtin test functions.

use anyhow::Result;
use dyadic::counterexample::{build_atom, build_martingale, AlphaSequence};
use dyadic::{cell_of, DyadicPoint, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Indicator of `I_3(e_1)`.
    Indicator,
    /// 1 for `x < 1/3` in the binary-expansion order, 0 after.
    Step,
    /// `c/2^N` on cell `c`.
    Sawtooth,
    /// Uniform on `[-1, 1]` from a seeded ChaCha8 stream.
    Random,
    /// The first atom of the alpha sequence.
    Atom,
    /// The full martingale of the alpha sequence.
    Martingale,
    Zero,
}

pub fn indicator_i3_e1(resolution: u32) -> Result<GridFunction> {
    let e1 = DyadicPoint::basis(1, resolution)?;
    Ok(GridFunction::indicator(cell_of(e1, 3)?, resolution, 1.0)?)
}

pub fn random(resolution: u32, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..1usize << resolution)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    GridFunction::new(resolution, values).expect("finite values of the right length")
}

pub fn build(
    family: Family,
    resolution: u32,
    seed: u64,
    seq: &AlphaSequence,
) -> Result<GridFunction> {
    let size = 1usize << resolution;
    Ok(match family {
        Family::Indicator => indicator_i3_e1(resolution)?,
        Family::Step => GridFunction::from_fn(resolution, |c| if 3 * c < size { 1.0 } else { 0.0 }),
        Family::Sawtooth => GridFunction::from_fn(resolution, |c| c as f64 / size as f64),
        Family::Random => random(resolution, seed),
        Family::Atom => build_atom(seq.alphas()[0], seq.p(), resolution)?,
        Family::Martingale => build_martingale(seq, resolution)?,
        Family::Zero => GridFunction::zeros(resolution),
    })
}
