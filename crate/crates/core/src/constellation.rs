//! The 16-QAM alphabet.
//!
//! Points sit on the un-normalized grid `{±1, ±3}²` (mean energy 10). Each
//! axis carries two Gray-coded bits (`00 → -3`, `01 → -1`, `11 → +1`,
//! `10 → +3`); the in-phase pair is the high half of the 4-bit label.
//!
//! Constellation indices run in-phase-major from `(-3,-3)` (index 0) to
//! `(3,3)` (index 15). Metric ties anywhere in the crate resolve to the lowest
//! index. The slicer has its own tie rule: a coordinate exactly on a
//! threshold goes to the more positive level.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of points in the alphabet.
pub const ORDER: usize = 16;

/// Bits carried by one symbol.
pub const BITS_PER_SYMBOL: usize = 4;

/// Mean symbol energy `E[|s|²]` of the un-normalized alphabet.
pub const MEAN_ENERGY: f64 = 10.0;

/// Per-axis amplitude levels, indexed by level index.
pub const LEVELS: [i8; 4] = [-3, -1, 1, 3];

/// Per-axis Gray code, indexed by level index.
const AXIS_GRAY: [u8; 4] = [0b00, 0b01, 0b11, 0b10];

/// A 16-QAM symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QamPoint {
    index: u8,
}

impl QamPoint {
    /// Builds a point from its two odd integer levels.
    pub fn new(re: i8, im: i8) -> Result<Self> {
        let lr = level_index(re).ok_or(Error::InvalidLevel(re))?;
        let li = level_index(im).ok_or(Error::InvalidLevel(im))?;
        Ok(Self { index: (lr * 4 + li) as u8 })
    }

    /// Point at constellation index `index` (`0..16`).
    pub fn from_index(index: usize) -> Self {
        assert!(index < ORDER, "constellation index {index} out of range");
        Self { index: index as u8 }
    }

    /// Point carrying the 4-bit label `label`.
    pub fn from_label(label: u8) -> Self {
        let label = label & 0x0f;
        let lr = gray_to_level(label >> 2);
        let li = gray_to_level(label & 0b11);
        Self { index: (lr * 4 + li) as u8 }
    }

    #[inline]
    pub fn index(self) -> usize {
        self.index as usize
    }

    #[inline]
    pub fn re(self) -> i8 {
        LEVELS[self.index as usize / 4]
    }

    #[inline]
    pub fn im(self) -> i8 {
        LEVELS[self.index as usize % 4]
    }

    /// 4-bit Gray label.
    #[inline]
    pub fn label(self) -> u8 {
        (AXIS_GRAY[self.index as usize / 4] << 2) | AXIS_GRAY[self.index as usize % 4]
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        POINT_VALUES[self.index as usize]
    }

    /// Axis-adjacent points (2 for corners, 3 for edges, 4 for interior).
    #[inline]
    pub fn neighbors(self) -> &'static [QamPoint] {
        let entry = &NEIGHBORS[self.index as usize];
        &entry.points[..entry.len]
    }
}

impl std::fmt::Display for QamPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.re(), self.im())
    }
}

fn level_index(level: i8) -> Option<usize> {
    LEVELS.iter().position(|&l| l == level)
}

fn gray_to_level(code: u8) -> usize {
    AXIS_GRAY
        .iter()
        .position(|&g| g == code)
        .expect("2-bit code is always a valid Gray word")
}

const fn point_value(index: usize) -> Complex64 {
    Complex64::new(LEVELS[index / 4] as f64, LEVELS[index % 4] as f64)
}

static POINT_VALUES: [Complex64; ORDER] = {
    let mut v = [Complex64::new(0.0, 0.0); ORDER];
    let mut i = 0;
    while i < ORDER {
        v[i] = point_value(i);
        i += 1;
    }
    v
};

#[derive(Clone, Copy)]
struct NeighborEntry {
    points: [QamPoint; 4],
    len: usize,
}

static NEIGHBORS: [NeighborEntry; ORDER] = {
    let filler = QamPoint { index: 0 };
    let mut table = [NeighborEntry { points: [filler; 4], len: 0 }; ORDER];
    let mut i = 0;
    while i < ORDER {
        let (lr, li) = (i / 4, i % 4);
        let mut entry = NeighborEntry { points: [filler; 4], len: 0 };
        // Ordered by index so "first neighbor wins" matches the lowest-index tie rule.
        if lr > 0 {
            entry.points[entry.len] = QamPoint { index: ((lr - 1) * 4 + li) as u8 };
            entry.len += 1;
        }
        if li > 0 {
            entry.points[entry.len] = QamPoint { index: (lr * 4 + li - 1) as u8 };
            entry.len += 1;
        }
        if li < 3 {
            entry.points[entry.len] = QamPoint { index: (lr * 4 + li + 1) as u8 };
            entry.len += 1;
        }
        if lr < 3 {
            entry.points[entry.len] = QamPoint { index: ((lr + 1) * 4 + li) as u8 };
            entry.len += 1;
        }
        table[i] = entry;
        i += 1;
    }
    table
};

/// Per-axis threshold decision at -2, 0, +2; on-threshold values go up.
#[inline]
fn slice_axis(x: f64) -> usize {
    if x < 0.0 {
        if x < -2.0 {
            0
        } else {
            1
        }
    } else if x < 2.0 {
        2
    } else {
        3
    }
}

/// Nearest point to `z`. Assumes `z` is finite; see [`try_slice`].
#[inline]
pub fn slice(z: Complex64) -> QamPoint {
    QamPoint { index: (slice_axis(z.re) * 4 + slice_axis(z.im)) as u8 }
}

/// Checked variant of [`slice`] that rejects non-finite input.
pub fn try_slice(z: Complex64) -> Result<QamPoint> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("slicer input"));
    }
    Ok(slice(z))
}

/// Number of threshold comparisons [`slice`] performs.
pub const SLICE_COMPARISONS: u64 = 4;

/// The 16-point alphabet with its adjacency.
#[derive(Debug, Clone)]
pub struct Constellation {
    points: Vec<QamPoint>,
}

impl Default for Constellation {
    fn default() -> Self {
        build_constellation()
    }
}

impl Constellation {
    pub fn points(&self) -> &[QamPoint] {
        &self.points
    }

    pub fn neighbors(&self, p: QamPoint) -> &'static [QamPoint] {
        p.neighbors()
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.value().norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn slice(&self, z: Complex64) -> QamPoint {
        slice(z)
    }
}

pub fn build_constellation() -> Constellation {
    Constellation { points: (0..ORDER).map(QamPoint::from_index).collect() }
}

/// Maps bits (one `u8` per bit, 0 or 1) to symbols, four bits per symbol,
/// most significant first.
pub fn bits_to_symbols(bits: &[u8]) -> Result<Vec<QamPoint>> {
    if bits.len() % BITS_PER_SYMBOL != 0 {
        return Err(Error::BitLength(bits.len()));
    }
    bits.chunks_exact(BITS_PER_SYMBOL)
        .map(|c| {
            let mut label = 0u8;
            for &b in c {
                if b > 1 {
                    return Err(Error::NotABit(b));
                }
                label = (label << 1) | b;
            }
            Ok(QamPoint::from_label(label))
        })
        .collect()
}

pub fn symbols_to_bits(symbols: &[QamPoint]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for s in symbols {
        let label = s.label();
        for shift in (0..BITS_PER_SYMBOL).rev() {
            bits.push((label >> shift) & 1);
        }
    }
    bits
}

/// Number of differing bits between the labels of `a` and `b`.
#[inline]
pub fn bit_distance(a: QamPoint, b: QamPoint) -> u32 {
    (a.label() ^ b.label()).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(re: i8, im: i8) -> QamPoint {
        QamPoint::new(re, im).unwrap()
    }

    fn brute_force_nearest(z: Complex64) -> Vec<QamPoint> {
        let c = build_constellation();
        let best = c
            .points()
            .iter()
            .map(|q| (z - q.value()).norm_sqr())
            .fold(f64::INFINITY, f64::min);
        c.points()
            .iter()
            .copied()
            .filter(|q| (z - q.value()).norm_sqr() <= best + 1e-12)
            .collect()
    }

    #[test]
    fn sixteen_distinct_points_with_energy_ten() {
        let c = build_constellation();
        assert_eq!(c.points().len(), 16);
        let mut labels: Vec<u8> = c.points().iter().map(|p| p.label()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 16);
        assert_eq!(c.mean_energy(), 10.0);
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(p(3, 3).neighbors().len(), 2);
        assert_eq!(p(1, 1).neighbors().len(), 4);
        assert_eq!(p(3, 1).neighbors().len(), 3);
    }

    #[test]
    fn neighbor_sets() {
        let set = |q: QamPoint| {
            let mut v: Vec<_> = q.neighbors().to_vec();
            v.sort();
            v
        };
        let mut want = vec![p(1, 3), p(3, 1)];
        want.sort();
        assert_eq!(set(p(3, 3)), want);
        let mut want = vec![p(1, 1), p(3, 3), p(3, -1)];
        want.sort();
        assert_eq!(set(p(3, 1)), want);
        let mut want = vec![p(-3, 1), p(1, 1), p(-1, 3), p(-1, -1)];
        want.sort();
        assert_eq!(set(p(-1, 1)), want);
    }

    #[test]
    fn neighbors_symmetric_axis_adjacent_and_gray() {
        for a in build_constellation().points() {
            for &b in a.neighbors() {
                assert!(b.neighbors().contains(a));
                let (dr, di) = ((a.re() - b.re()).abs(), (a.im() - b.im()).abs());
                assert!((dr, di) == (2, 0) || (dr, di) == (0, 2));
                assert_eq!(bit_distance(*a, b), 1);
            }
        }
    }

    #[test]
    fn slicer_examples() {
        assert_eq!(slice(Complex64::new(3.0, 3.0)), p(3, 3));
        assert_eq!(slice(Complex64::new(0.2, 1.4)), p(1, 1));
        assert_eq!(brute_force_nearest(Complex64::new(0.2, 1.4)), vec![p(1, 1)]);
        // 2+0i is equidistant from four points; the tie rule picks the upper ones.
        let ties = brute_force_nearest(Complex64::new(2.0, 0.0));
        assert!(ties.contains(&p(3, 1)) && ties.contains(&p(1, -1)));
        assert_eq!(slice(Complex64::new(2.0, 0.0)), p(3, 1));
    }

    #[test]
    fn slicer_is_identity_on_points() {
        for q in build_constellation().points() {
            assert_eq!(slice(q.value()), *q);
        }
    }

    #[test]
    fn slicer_rejects_non_finite() {
        assert!(try_slice(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(try_slice(Complex64::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn gray_axis_sequence() {
        // -3 → -1 → +1 → +3 walks 00, 01, 11, 10
        let labels: Vec<u8> = LEVELS.iter().map(|&l| p(l, -3).label() >> 2).collect();
        assert_eq!(labels, vec![0b00, 0b01, 0b11, 0b10]);
        assert_eq!((p(-3, 1).label() ^ p(-1, 1).label()).count_ones(), 1);
    }

    #[test]
    fn bits_round_trip() {
        let s = bits_to_symbols(&[0, 0, 0, 0]).unwrap();
        assert_eq!(s[0].label(), 0);
        assert_eq!(s[0], p(-3, -3));
        assert_eq!(symbols_to_bits(&s), vec![0, 0, 0, 0]);

        let all: Vec<QamPoint> = build_constellation().points().to_vec();
        let bits = symbols_to_bits(&all);
        assert_eq!(bits.len(), 64);
        assert_eq!(bits_to_symbols(&bits).unwrap(), all);
    }

    #[test]
    fn bit_length_must_divide_by_four() {
        assert!(matches!(bits_to_symbols(&[1, 0, 1]), Err(Error::BitLength(3))));
        assert!(bits_to_symbols(&[1, 0, 2, 0]).is_err());
    }

    proptest! {
        #[test]
        fn slicer_matches_brute_force(re in -6.0f64..6.0, im in -6.0f64..6.0) {
            let z = Complex64::new(re, im);
            let got = slice(z);
            let nearest = brute_force_nearest(z);
            prop_assert!(nearest.contains(&got));
        }

        #[test]
        fn bit_mapping_round_trips(bits in proptest::collection::vec(0u8..2, 0..64)) {
            let n = bits.len() / 4 * 4;
            let syms = bits_to_symbols(&bits[..n]).unwrap();
            prop_assert_eq!(symbols_to_bits(&syms), bits[..n].to_vec());
        }
    }
}
