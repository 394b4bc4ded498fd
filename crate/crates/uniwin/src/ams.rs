//! AMS-style second-moment sketch (insert-only).
//!
//! Each counter accumulates `sum_i s_i * m_i` with 4-wise independent signs
//! `s_i`; squaring a counter is an unbiased F2 estimate, tamed by
//! mean-over-width and median-over-groups. Signs come from even-order field
//! families, so unbiasedness is exact (see [`crate::hashing`]).

use serde::{Deserialize, Serialize};

use crate::hashing::SignGrid;
use crate::profile::SketchParams;
use crate::stream::{Error, Result};

/// Signed-counter second-moment sketch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmsSketch {
    grid: SignGrid,
    counters: Vec<i64>,
}

impl AmsSketch {
    pub fn new(universe: u64, params: SketchParams, seed: u64) -> Result<Self> {
        let grid = SignGrid::new(universe, params.width, params.groups, seed)?;
        let counters = vec![0i64; grid.cells()];
        Ok(AmsSketch { grid, counters })
    }

    /// Sketch sharing an existing grid's families (same seed); counters zero.
    pub fn like(other: &AmsSketch) -> Self {
        AmsSketch { grid: other.grid.clone(), counters: vec![0; other.counters.len()] }
    }

    /// Adds `count` occurrences of `id` to every counter.
    pub fn insert(&mut self, id: u64, count: u64) {
        debug_assert!(count >= 1);
        let c = i64::try_from(count).expect("count fits i64");
        for (cell, ctr) in self.counters.iter_mut().enumerate() {
            let s = self.grid.sign(cell, id);
            *ctr = ctr.checked_add(s * c).expect("counter overflow");
        }
    }

    /// Median over groups of the mean over width of squared counters.
    pub fn estimate(&self) -> f64 {
        estimate_from(&self.counters, self.grid.width(), self.grid.groups())
    }

    /// Merges a sketch built with identical seeds (counter-wise sum).
    pub fn merge(&mut self, other: &AmsSketch) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Parameter("merging sketches with different families".into()));
        }
        for (a, b) in self.counters.iter_mut().zip(&other.counters) {
            *a = a.checked_add(*b).expect("counter overflow");
        }
        Ok(())
    }

    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    pub fn grid(&self) -> &SignGrid {
        &self.grid
    }

    pub fn width(&self) -> u32 {
        self.grid.width()
    }

    pub fn groups(&self) -> u32 {
        self.grid.groups()
    }

    /// Byte layout: version, width, groups, seed, universe header, then
    /// counters, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 4 + 4 + 8 + 8 + 8 * self.counters.len());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&self.grid.width().to_le_bytes());
        out.extend_from_slice(&self.grid.groups().to_le_bytes());
        out.extend_from_slice(&self.grid.seed().to_le_bytes());
        out.extend_from_slice(&self.grid.universe().to_le_bytes());
        for c in &self.counters {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let take = |range: std::ops::Range<usize>| -> Result<&[u8]> {
            bytes.get(range).ok_or_else(|| Error::Wire("truncated sketch".into()))
        };
        let version = u16::from_le_bytes(take(0..2)?.try_into().unwrap());
        if version != 1 {
            return Err(Error::Wire(format!("unsupported sketch version {version}")));
        }
        let width = u32::from_le_bytes(take(2..6)?.try_into().unwrap());
        let groups = u32::from_le_bytes(take(6..10)?.try_into().unwrap());
        let seed = u64::from_le_bytes(take(10..18)?.try_into().unwrap());
        let universe = u64::from_le_bytes(take(18..26)?.try_into().unwrap());
        let cells = (width * groups) as usize;
        if bytes.len() != 26 + 8 * cells {
            return Err(Error::Wire("sketch length mismatch".into()));
        }
        let mut sketch =
            AmsSketch::new(universe, SketchParams::new(width, groups), seed)?;
        for (i, ctr) in sketch.counters.iter_mut().enumerate() {
            *ctr = i64::from_le_bytes(take(26 + 8 * i..34 + 8 * i)?.try_into().unwrap());
        }
        Ok(sketch)
    }
}

/// Estimate from a raw counter slice laid out as `groups x width`.
pub(crate) fn estimate_from(counters: &[i64], width: u32, groups: u32) -> f64 {
    let w = width as usize;
    let mut group_means: Vec<f64> = counters
        .chunks_exact(w)
        .map(|chunk| chunk.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>() / w as f64)
        .collect();
    debug_assert_eq!(group_means.len(), groups as usize);
    group_means.sort_by(f64::total_cmp);
    median_of_sorted(&group_means)
}

pub(crate) fn median_of_sorted(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::BitFamily;

    #[test]
    fn empty_estimates_zero() {
        let s = AmsSketch::new(64, SketchParams::new(8, 3), 1).unwrap();
        assert_eq!(s.estimate(), 0.0);
    }

    #[test]
    fn single_coordinate_is_exact() {
        // one nonzero coordinate: every counter is +/-4, square is 16
        let mut s = AmsSketch::new(64, SketchParams::new(8, 3), 2).unwrap();
        s.insert(5, 4);
        assert!(s.counters().iter().all(|&c| c.abs() == 4));
        assert_eq!(s.estimate(), 16.0);
    }

    #[test]
    fn insert_is_linear_and_commutative() {
        let mut a = AmsSketch::new(64, SketchParams::new(8, 3), 3).unwrap();
        let mut b = AmsSketch::like(&a);
        a.insert(3, 2);
        b.insert(3, 1);
        b.insert(3, 1);
        assert_eq!(a, b);

        let mut c = AmsSketch::like(&a);
        let mut d = AmsSketch::like(&a);
        for (x, y) in [(1u64, 7u64), (2, 1), (1, 7)] {
            c.insert(x, y);
        }
        for (x, y) in [(1u64, 7u64), (1, 7), (2, 1)] {
            d.insert(x, y);
        }
        assert_eq!(c, d);
    }

    #[test]
    fn merge_equals_concatenation() {
        let mut whole = AmsSketch::new(64, SketchParams::new(8, 3), 4).unwrap();
        let mut left = AmsSketch::like(&whole);
        let mut right = AmsSketch::like(&whole);
        for id in 0..20u64 {
            whole.insert(id, id + 1);
            if id < 10 {
                left.insert(id, id + 1);
            } else {
                right.insert(id, id + 1);
            }
        }
        left.merge(&right).unwrap();
        assert_eq!(left, whole);

        let other = AmsSketch::new(64, SketchParams::new(8, 3), 5).unwrap();
        assert!(left.merge(&other).is_err());
    }

    /// Exact unbiasedness by exhaustive enumeration: over every coefficient
    /// tuple of the GF(16) sign family, the mean of counter^2 for the
    /// frequency vector (3,2,1) equals F2 = 14 exactly.
    #[test]
    fn exhaustive_sign_seed_unbiasedness() {
        let mut total: i64 = 0;
        let q = 16u32;
        for tuple in 0..q * q * q * q {
            let coeffs = [tuple & 15, (tuple >> 4) & 15, (tuple >> 8) & 15, (tuple >> 12) & 15];
            let f = BitFamily::from_coefficients(4, &coeffs).unwrap();
            let counter = 3 * f.sign(1) + 2 * f.sign(2) + f.sign(3);
            total += counter * counter;
        }
        assert_eq!(total, 14 * (q * q * q * q) as i64);
    }

    #[test]
    fn estimate_tracks_f2_on_random_streams() {
        use rand::{Rng, SeedableRng};
        let mut hits = 0;
        let trials = 200;
        for seed in 0..trials {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s = AmsSketch::new(64, SketchParams::new(64, 9), seed).unwrap();
            let mut freq = [0u64; 64];
            for _ in 0..500 {
                let id = rng.gen_range(0..64u64);
                freq[id as usize] += 1;
                s.insert(id, 1);
            }
            let f2: f64 = freq.iter().map(|&m| (m * m) as f64).sum();
            let est = s.estimate();
            if (est - f2).abs() <= 0.2 * f2 {
                hits += 1;
            }
        }
        assert!(hits >= 190, "only {hits}/{trials} within 20%");
    }

    #[test]
    fn byte_roundtrip() {
        let mut s = AmsSketch::new(64, SketchParams::new(8, 3), 9).unwrap();
        for id in 0..30u64 {
            s.insert(id, 1 + id % 3);
        }
        let bytes = s.to_bytes();
        let back = AmsSketch::from_bytes(&bytes).unwrap();
        assert_eq!(s, back);
        assert!(AmsSketch::from_bytes(&bytes[..10]).is_err());
    }
}
