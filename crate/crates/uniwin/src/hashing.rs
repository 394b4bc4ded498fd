//! Seeded k-wise independent hash families.
//!
//! Two constructions back everything else:
//!
//! * [`HashFamily`] — degree-(k-1) polynomials over a prime field, used where
//!   values in `[0, p)` are needed (bucket routing). Exact k-wise independence
//!   of the evaluations, enumerable over all coefficient tuples on small
//!   fields.
//! * [`BitFamily`] — degree-(k-1) polynomials over GF(2^m), used wherever a
//!   fair bit or a ±1 sign is needed. The field has even order, so the parity
//!   of an evaluation is *exactly* unbiased; an odd prime field cannot give
//!   that, and several exhaustive-enumeration checks in this crate rely on
//!   exactness.
//!
//! All randomness flows from explicit seeds via counter-based derivation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::seed::SeedRng;
use crate::stream::{Error, Result};

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn smallest_prime_at_least(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

// ---------------------------------------------------------------------------
// Prime-field polynomial family
// ---------------------------------------------------------------------------

/// Degree-(k-1) polynomial hash over a prime field.
///
/// For a uniformly random coefficient tuple, evaluations at any k distinct
/// points are jointly uniform over `[0,p)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFamily {
    k: u32,
    universe: u64,
    p: u64,
    coeffs: Vec<u64>,
    seed: Option<u64>,
}

impl HashFamily {
    /// Builds a seeded family. `k` must be 2 or 4; the modulus is the
    /// smallest prime `>= 2 * universe_bound`.
    pub fn new(k: u32, universe_bound: u64, seed: u64) -> Result<Self> {
        if k != 2 && k != 4 {
            return Err(Error::Parameter(format!("hash degree k={k}, expected 2 or 4")));
        }
        if universe_bound == 0 {
            return Err(Error::Parameter("universe_bound must be >= 1".into()));
        }
        let p = smallest_prime_at_least(2 * universe_bound);
        let mut rng = SeedRng::new(seed);
        let coeffs = (0..k).map(|_| rng.below(p)).collect();
        Ok(HashFamily { k, universe: universe_bound, p, coeffs, seed: Some(seed) })
    }

    /// Builds a family from explicit coefficients (tests enumerate these).
    pub fn from_coefficients(universe_bound: u64, p: u64, coeffs: &[u64]) -> Result<Self> {
        if !is_prime(p) || p < universe_bound {
            return Err(Error::Parameter(format!("modulus {p} not a prime >= universe")));
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(Error::Parameter("coefficient out of field".into()));
        }
        Ok(HashFamily {
            k: coeffs.len() as u32,
            universe: universe_bound,
            p,
            coeffs: coeffs.to_vec(),
            seed: None,
        })
    }

    /// Horner evaluation; pure, O(k).
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        debug_assert!(x < self.universe || self.seed.is_none());
        let p = self.p as u128;
        let x = x as u128;
        let mut h: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            h = (h * x + c as u128) % p;
        }
        h as u64
    }

    /// Routes `x` into `[0, buckets)`.
    #[inline]
    pub fn bucket(&self, x: u64, buckets: u64) -> u64 {
        self.eval(x) % buckets
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }
}

#[derive(Serialize, Deserialize)]
struct HashFamilyWire {
    k: u32,
    universe: u64,
    seed: u64,
}

impl Serialize for HashFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let seed = self
            .seed
            .ok_or_else(|| S::Error::custom("cannot serialize a coefficient-built family"))?;
        HashFamilyWire { k: self.k, universe: self.universe, seed }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HashFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = HashFamilyWire::deserialize(d)?;
        HashFamily::new(w.k, w.universe, w.seed).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// GF(2^m) tables
// ---------------------------------------------------------------------------

const MAX_FIELD_BITS: u32 = 20;

struct GfTables {
    m: u32,
    order: usize,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl GfTables {
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }
}

/// Finds a primitive polynomial for GF(2^m) by cycle search and builds
/// log/exp tables from it.
fn build_tables(m: u32) -> GfTables {
    let size = 1usize << m;
    let order = size - 1;
    let top = 1u32 << m;
    'cand: for low in (1..size as u32).step_by(2) {
        let poly = top | low;
        let mut log = vec![u32::MAX; size];
        let mut exp = vec![0u32; 2 * order];
        let mut x = 1u32;
        for i in 0..order {
            if log[x as usize] != u32::MAX {
                continue 'cand; // cycle shorter than the full group
            }
            log[x as usize] = i as u32;
            exp[i] = x;
            exp[i + order] = x;
            x <<= 1;
            if x & top != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            continue;
        }
        log[0] = 0; // never used; mul() guards zero operands
        return GfTables { m, order, log, exp };
    }
    unreachable!("no primitive polynomial found for GF(2^{m})");
}

fn tables(m: u32) -> Arc<GfTables> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<GfTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(m).or_insert_with(|| Arc::new(build_tables(m))).clone()
}

/// Field size exponent needed to embed `[0, universe)` injectively.
pub fn field_bits(universe: u64) -> u32 {
    let mut m = 1;
    while (1u64 << m) < universe {
        m += 1;
    }
    m
}

// ---------------------------------------------------------------------------
// GF(2^m) polynomial family: exact fair bits and signs
// ---------------------------------------------------------------------------

/// Degree-(k-1) polynomial hash over GF(2^m). Addition is xor, so the parity
/// of an evaluation is an exactly unbiased, k-wise independent bit.
#[derive(Debug, Clone)]
pub struct BitFamily {
    k: u32,
    m: u32,
    coeffs: Vec<u32>,
    seed: Option<u64>,
    #[allow(clippy::rc_buffer)]
    tables: Arc<GfTables>,
}

impl PartialEq for BitFamily {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.m == other.m && self.coeffs == other.coeffs
    }
}

impl BitFamily {
    pub fn new(k: u32, m: u32, seed: u64) -> Result<Self> {
        if m == 0 || m > MAX_FIELD_BITS {
            return Err(Error::Parameter(format!("field bits m={m} outside 1..={MAX_FIELD_BITS}")));
        }
        let t = tables(m);
        let size = 1u64 << m;
        let mut rng = SeedRng::new(seed);
        let coeffs = (0..k).map(|_| rng.below(size) as u32).collect();
        Ok(BitFamily { k, m, coeffs, seed: Some(seed), tables: t })
    }

    pub fn from_coefficients(m: u32, coeffs: &[u32]) -> Result<Self> {
        if m == 0 || m > MAX_FIELD_BITS {
            return Err(Error::Parameter(format!("field bits m={m} outside 1..={MAX_FIELD_BITS}")));
        }
        if coeffs.iter().any(|&c| c as u64 >= (1u64 << m)) {
            return Err(Error::Parameter("coefficient out of field".into()));
        }
        Ok(BitFamily {
            k: coeffs.len() as u32,
            m,
            coeffs: coeffs.to_vec(),
            seed: None,
            tables: tables(m),
        })
    }

    /// Horner evaluation in GF(2^m).
    #[inline]
    pub fn eval(&self, x: u64) -> u32 {
        debug_assert!(x < (1u64 << self.m));
        let x = x as u32;
        let mut h: u32 = 0;
        for &c in self.coeffs.iter().rev() {
            h = self.tables.mul(h, x) ^ c;
        }
        h
    }

    /// Exactly unbiased k-wise independent bit.
    #[inline]
    pub fn bit(&self, x: u64) -> u64 {
        (self.eval(x) & 1) as u64
    }

    /// Sign in {-1, +1}; `+1` iff `bit(x) == 0`.
    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        1 - 2 * self.bit(x) as i64
    }

    pub fn field_bits(&self) -> u32 {
        self.m
    }
}

#[derive(Serialize, Deserialize)]
struct BitFamilyWire {
    k: u32,
    m: u32,
    seed: u64,
}

impl Serialize for BitFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let seed = self
            .seed
            .ok_or_else(|| S::Error::custom("cannot serialize a coefficient-built family"))?;
        BitFamilyWire { k: self.k, m: self.m, seed }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = BitFamilyWire::deserialize(d)?;
        BitFamily::new(w.k, w.m, w.seed).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Zero-one vectors
// ---------------------------------------------------------------------------

/// Pairwise independent vector with exactly fair {0,1} entries.
///
/// The complement vector is `1 - h_i`, available through
/// [`ZeroOneVector::complement_bit`] rather than stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroOneVector {
    universe: u64,
    fam: BitFamily,
}

impl ZeroOneVector {
    pub fn new(universe: u64, seed: u64) -> Result<Self> {
        let m = field_bits(universe.max(2));
        Ok(ZeroOneVector { universe, fam: BitFamily::new(2, m, seed)? })
    }

    #[inline]
    pub fn bit(&self, i: u64) -> u64 {
        self.fam.bit(i)
    }

    #[inline]
    pub fn complement_bit(&self, i: u64) -> u64 {
        1 - self.fam.bit(i)
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }
}

// ---------------------------------------------------------------------------
// Sign grids for AMS sketches
// ---------------------------------------------------------------------------

/// `groups x width` independent 4-wise sign families.
#[derive(Debug, Clone, PartialEq)]
pub struct SignGrid {
    universe: u64,
    width: u32,
    groups: u32,
    seed: u64,
    fams: Vec<BitFamily>,
}

impl SignGrid {
    pub fn new(universe: u64, width: u32, groups: u32, seed: u64) -> Result<Self> {
        let m = field_bits(universe.max(2));
        let fams = (0..width as u64 * groups as u64)
            .map(|i| BitFamily::new(4, m, crate::seed::child(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SignGrid { universe, width, groups, seed, fams })
    }

    /// Grid built from one explicit family replicated parameters; tests use
    /// single-cell grids with enumerated coefficients.
    pub fn from_families(universe: u64, width: u32, groups: u32, fams: Vec<BitFamily>) -> Self {
        assert_eq!(fams.len(), (width * groups) as usize);
        SignGrid { universe, width, groups, seed: 0, fams }
    }

    #[inline]
    pub fn sign(&self, cell: usize, id: u64) -> i64 {
        self.fams[cell].sign(id)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn groups(&self) -> u32 {
        self.groups
    }

    pub fn cells(&self) -> usize {
        (self.width * self.groups) as usize
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Serialize, Deserialize)]
struct SignGridWire {
    universe: u64,
    width: u32,
    groups: u32,
    seed: u64,
}

impl Serialize for SignGrid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignGridWire {
            universe: self.universe,
            width: self.width,
            groups: self.groups,
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SignGridWire::deserialize(d)?;
        SignGrid::new(w.universe, w.width, w.groups, w.seed).map_err(D::Error::custom)
    }
}
