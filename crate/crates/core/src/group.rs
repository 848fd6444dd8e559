//! The dyadic group truncated to `N` coordinates.
//!
//! A point `x = (x_0, ..., x_{N-1})` is stored as an integer whose bit `j`
//! holds `x_j`, so group addition is XOR and Walsh characters are parities.
//! Grid functions are indexed by the *cell index* instead, which reads the
//! coordinates with `x_0` as the most significant bit; that ordering makes
//! every dyadic interval `I_n(x)` a contiguous block of cells.

use std::fmt;

use crate::error::{range, Error, Result};

/// Largest resolution a point can carry.
pub const MAX_POINT_RESOLUTION: u32 = 63;

/// Reverse the low `resolution` bits of `value`.
#[inline]
pub fn reverse_bits(value: u64, resolution: u32) -> u64 {
    if resolution == 0 {
        0
    } else {
        value.reverse_bits() >> (64 - resolution)
    }
}

#[inline]
fn parity_sign(v: u64) -> i8 {
    if v.count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// A point of the group, truncated to `resolution` coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    bits: u64,
    resolution: u32,
}

impl DyadicPoint {
    pub fn zero(resolution: u32) -> Result<Self> {
        check_point_resolution(resolution)?;
        Ok(Self {
            bits: 0,
            resolution,
        })
    }

    /// Builds a point from its coordinate sequence `(x_0, ..., x_{N-1})`.
    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        let resolution = coords.len() as u32;
        check_point_resolution(resolution)?;
        let mut bits = 0u64;
        for (j, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => bits |= 1 << j,
                _ => return Err(range(format!("coordinate {j} is {c}, expected 0 or 1"))),
            }
        }
        Ok(Self { bits, resolution })
    }

    /// Builds a point from its storage word, bit `j` holding `x_j`.
    pub fn from_bits(bits: u64, resolution: u32) -> Result<Self> {
        check_point_resolution(resolution)?;
        if resolution < 64 && bits >> resolution != 0 {
            return Err(range(format!(
                "bits {bits:#x} do not fit in {resolution} coordinates"
            )));
        }
        Ok(Self { bits, resolution })
    }

    /// The point whose cell index (x_0 most significant) is `cell`.
    pub fn from_cell(cell: usize, resolution: u32) -> Result<Self> {
        check_point_resolution(resolution)?;
        if (cell as u64) >> resolution != 0 {
            return Err(range(format!("cell {cell} outside 0..2^{resolution}")));
        }
        Ok(Self {
            bits: reverse_bits(cell as u64, resolution),
            resolution,
        })
    }

    /// The basis point `e_n`.
    pub fn basis(n: u32, resolution: u32) -> Result<Self> {
        if n >= resolution {
            return Err(range(format!(
                "basis index {n} needs resolution > {n}, have {resolution}"
            )));
        }
        Self::from_bits(1 << n, resolution)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Coordinate `x_k`.
    pub fn coord(&self, k: u32) -> Result<u8> {
        if k >= self.resolution {
            return Err(range(format!(
                "coordinate {k} outside resolution {}",
                self.resolution
            )));
        }
        Ok(((self.bits >> k) & 1) as u8)
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.resolution)
            .map(|k| ((self.bits >> k) & 1) as u8)
            .collect()
    }

    /// Cell index `sum x_j 2^{N-1-j}`.
    #[inline]
    pub fn cell_index(&self) -> usize {
        reverse_bits(self.bits, self.resolution) as usize
    }
}

impl fmt::Debug for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for k in 0..self.resolution {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", (self.bits >> k) & 1)?;
        }
        write!(f, ")")
    }
}

fn check_point_resolution(resolution: u32) -> Result<()> {
    if resolution > MAX_POINT_RESOLUTION {
        return Err(range(format!(
            "resolution {resolution} exceeds {MAX_POINT_RESOLUTION}"
        )));
    }
    Ok(())
}

/// Index of a Walsh function in the Paley enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaleyIndex(pub u64);

impl PaleyIndex {
    /// Binary digit `n_j`.
    #[inline]
    pub fn digit(&self, j: u32) -> u8 {
        if j >= 64 {
            0
        } else {
            ((self.0 >> j) & 1) as u8
        }
    }

    /// `|n|`, the position of the highest set bit. `None` for `n = 0`.
    pub fn top(&self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    /// Smallest resolution at which `w_n` is constant on the finest cells.
    pub fn min_resolution(&self) -> u32 {
        self.top().map_or(0, |t| t + 1)
    }
}

/// `x ⊕ y`.
pub fn add_points(x: DyadicPoint, y: DyadicPoint) -> Result<DyadicPoint> {
    if x.resolution != y.resolution {
        return Err(Error::Mismatch {
            left: x.resolution,
            right: y.resolution,
        });
    }
    Ok(DyadicPoint {
        bits: x.bits ^ y.bits,
        resolution: x.resolution,
    })
}

/// Rademacher function `r_k(x) = (-1)^{x_k}`.
pub fn rademacher(k: u32, x: DyadicPoint) -> Result<i8> {
    Ok(if x.coord(k)? == 0 { 1 } else { -1 })
}

/// Walsh function `w_n(x)` in Paley order.
pub fn walsh(n: PaleyIndex, x: DyadicPoint) -> Result<i8> {
    let needed = n.min_resolution();
    if needed > x.resolution {
        return Err(Error::Resolution {
            what: format!("w_{}", n.0),
            needed,
            have: x.resolution,
        });
    }
    Ok(parity_sign(n.0 & x.bits))
}

/// `w_n` evaluated on the cell with the given index, no range checks.
#[inline]
pub(crate) fn walsh_at_cell(n: u64, cell: usize, resolution: u32) -> i8 {
    parity_sign(n & reverse_bits(cell as u64, resolution))
}

/// A dyadic interval `I_n(x)`: all points sharing the first `depth` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    depth: u32,
    /// `x_0 ... x_{depth-1}` read with `x_0` most significant.
    prefix: u64,
}

impl Cell {
    pub fn new(depth: u32, prefix: u64) -> Result<Self> {
        if depth > MAX_POINT_RESOLUTION || (depth < 64 && prefix >> depth != 0) {
            return Err(range(format!("prefix {prefix} does not fit depth {depth}")));
        }
        Ok(Self { depth, prefix })
    }

    /// The whole group, `I_0`.
    pub fn whole() -> Self {
        Self {
            depth: 0,
            prefix: 0,
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn prefix(&self) -> u64 {
        self.prefix
    }

    /// Haar measure `2^{-depth}`.
    pub fn measure(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    pub fn contains(&self, y: DyadicPoint) -> bool {
        y.resolution >= self.depth
            && (y.cell_index() as u64) >> (y.resolution - self.depth) == self.prefix
    }

    /// Half-open range of cell indices covered at the given resolution.
    pub fn cell_range(&self, resolution: u32) -> Result<std::ops::Range<usize>> {
        if self.depth > resolution {
            return Err(Error::Resolution {
                what: format!("interval of depth {}", self.depth),
                needed: self.depth,
                have: resolution,
            });
        }
        let shift = resolution - self.depth;
        let start = (self.prefix as usize) << shift;
        Ok(start..start + (1usize << shift))
    }
}

/// `I_n(x)`.
pub fn cell_of(x: DyadicPoint, n: u32) -> Result<Cell> {
    if n > x.resolution {
        return Err(range(format!(
            "depth {n} exceeds resolution {}",
            x.resolution
        )));
    }
    Ok(Cell {
        depth: n,
        prefix: (x.cell_index() as u64) >> (x.resolution - n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u8]) -> DyadicPoint {
        DyadicPoint::from_coords(c).unwrap()
    }

    fn all_points(n: u32) -> impl Iterator<Item = DyadicPoint> {
        (0..1u64 << n).map(move |b| DyadicPoint::from_bits(b, n).unwrap())
    }

    #[test]
    fn addition_examples() {
        assert_eq!(
            add_points(pt(&[1, 1, 0]), pt(&[1, 0, 0])).unwrap(),
            pt(&[0, 1, 0])
        );
        let e0 = DyadicPoint::basis(0, 3).unwrap();
        let e1 = DyadicPoint::basis(1, 3).unwrap();
        assert_eq!(add_points(e0, e1).unwrap(), pt(&[1, 1, 0]));
        for x in all_points(4) {
            assert_eq!(add_points(x, x).unwrap(), DyadicPoint::zero(4).unwrap());
        }
    }

    #[test]
    fn mismatched_resolution_rejected() {
        let err = add_points(pt(&[1, 0]), pt(&[1, 0, 0])).unwrap_err();
        assert_eq!(err, Error::Mismatch { left: 2, right: 3 });
    }

    #[test]
    fn group_laws_exhaustive() {
        for n in 0..=4 {
            let zero = DyadicPoint::zero(n).unwrap();
            for x in all_points(n) {
                assert_eq!(add_points(x, zero).unwrap(), x);
                for y in all_points(n) {
                    assert_eq!(add_points(x, y).unwrap(), add_points(y, x).unwrap());
                    for z in all_points(n) {
                        let l = add_points(add_points(x, y).unwrap(), z).unwrap();
                        let r = add_points(x, add_points(y, z).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn rademacher_values() {
        let x = pt(&[1, 0, 0, 0]);
        assert_eq!(rademacher(0, x).unwrap(), -1);
        assert_eq!(rademacher(1, x).unwrap(), 1);
        assert!(rademacher(4, x).is_err());
        for x in all_points(4) {
            for y in all_points(4) {
                let s = add_points(x, y).unwrap();
                for k in 0..4 {
                    assert_eq!(
                        rademacher(k, s).unwrap(),
                        rademacher(k, x).unwrap() * rademacher(k, y).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn walsh_examples() {
        for x in all_points(5) {
            assert_eq!(walsh(PaleyIndex(0), x).unwrap(), 1);
        }
        // w_6 = r_1 r_2
        let x = pt(&[1, 1, 0, 0]);
        let r1 = rademacher(1, x).unwrap();
        let r2 = rademacher(2, x).unwrap();
        assert_eq!(walsh(PaleyIndex(6), x).unwrap(), r1 * r2);
        assert_eq!(walsh(PaleyIndex(6), x).unwrap(), -1);
        assert!(matches!(
            walsh(PaleyIndex(16), x),
            Err(Error::Resolution {
                needed: 5,
                have: 4,
                ..
            })
        ));
    }

    #[test]
    fn walsh_is_product_of_rademachers() {
        for x in all_points(6) {
            for n in 0..64u64 {
                let mut prod = 1i8;
                for k in 0..6 {
                    if (n >> k) & 1 == 1 {
                        prod *= rademacher(k, x).unwrap();
                    }
                }
                assert_eq!(walsh(PaleyIndex(n), x).unwrap(), prod);
            }
        }
    }

    #[test]
    fn walsh_character_property() {
        for res in 1..=6 {
            for n in 0..1u64 << res {
                for x in all_points(res) {
                    for y in all_points(res) {
                        let s = add_points(x, y).unwrap();
                        assert_eq!(
                            walsh(PaleyIndex(n), s).unwrap(),
                            walsh(PaleyIndex(n), x).unwrap() * walsh(PaleyIndex(n), y).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn walsh_orthonormal() {
        for res in 0..=6 {
            let size = 1u64 << res;
            for m in 0..size {
                for n in 0..size {
                    let s: i64 = all_points(res)
                        .map(|x| {
                            (walsh(PaleyIndex(m), x).unwrap() * walsh(PaleyIndex(n), x).unwrap())
                                as i64
                        })
                        .sum();
                    assert_eq!(s, if m == n { size as i64 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn walsh_at_cell_agrees() {
        for x in all_points(6) {
            for n in 0..64 {
                assert_eq!(
                    walsh_at_cell(n, x.cell_index(), 6),
                    walsh(PaleyIndex(n), x).unwrap()
                );
            }
        }
    }

    #[test]
    fn cell_index_round_trip() {
        let x = pt(&[1, 1, 0, 0]);
        assert_eq!(x.cell_index(), 0b1100);
        assert_eq!(DyadicPoint::from_cell(0b1100, 4).unwrap(), x);
        for c in 0..32 {
            assert_eq!(DyadicPoint::from_cell(c, 5).unwrap().cell_index(), c);
        }
        assert!(DyadicPoint::from_cell(32, 5).is_err());
        assert!(DyadicPoint::from_coords(&[0, 2]).is_err());
    }

    #[test]
    fn cell_examples() {
        let x = pt(&[1, 1, 0, 0]);
        let whole = cell_of(x, 0).unwrap();
        assert_eq!(whole, Cell::whole());
        assert_eq!(whole.measure(), 1.0);
        let c = cell_of(x, 2).unwrap();
        assert_eq!(c.prefix(), 0b11);
        assert_eq!(c.measure(), 0.25);
        assert_eq!(c.cell_range(4).unwrap(), 12..16);
        assert!(cell_of(x, 5).is_err());
    }

    #[test]
    fn membership_matches_enumeration() {
        let res = 5;
        for x in all_points(res) {
            for n in 0..=res {
                let c = cell_of(x, n).unwrap();
                let range = c.cell_range(res).unwrap();
                for y in all_points(res) {
                    let agree = (0..n).all(|j| x.coord(j).unwrap() == y.coord(j).unwrap());
                    assert_eq!(c.contains(y), agree);
                    assert_eq!(range.contains(&y.cell_index()), agree);
                }
            }
        }
    }

    #[test]
    fn measures_add_to_one() {
        for n in 0..=10u32 {
            let total: f64 = (0..1u64 << n)
                .map(|p| Cell::new(n, p).unwrap().measure())
                .sum();
            assert_eq!(total, 1.0);
        }
    }

    #[test]
    fn paley_index_digits() {
        let n = PaleyIndex(0b1011);
        assert_eq!(n.top(), Some(3));
        assert_eq!(PaleyIndex(0).top(), None);
        assert_eq!(n.min_resolution(), 4);
        let rebuilt: u64 = (0..8).map(|j| (n.digit(j) as u64) << j).sum();
        assert_eq!(rebuilt, n.0);
    }
}
