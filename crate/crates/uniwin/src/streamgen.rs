//! Seeded stream generators: random streams, planted-heavy streams, and the
//! adversarial single-element family used by the distinguishability tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gfunc::{local_jump, GFunction};
use crate::stream::{Error, Result, TimedItem};

/// Element distribution for [`random_stream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform,
    /// Zipf with exponent `s > 0` (ranks 1..=n mapped to ids 0..n).
    Zipf { s: f64 },
}

/// A reproducible random stream; timestamps advance by one every
/// `per_tick` items (so `per_tick > 1` packs several arrivals per timestamp,
/// which the timestamp-based window model allows).
pub fn random_stream(
    n: u64,
    length: usize,
    dist: Distribution,
    seed: u64,
    per_tick: usize,
) -> Vec<TimedItem> {
    assert!(n >= 1 && per_tick >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf_cdf = match dist {
        Distribution::Zipf { s } => {
            let mut acc = 0.0;
            let mut cdf = Vec::with_capacity(n as usize);
            for rank in 1..=n {
                acc += 1.0 / (rank as f64).powf(s);
                cdf.push(acc);
            }
            let total = acc;
            for v in &mut cdf {
                *v /= total;
            }
            Some(cdf)
        }
        Distribution::Uniform => None,
    };
    (0..length)
        .map(|i| {
            let id = match &zipf_cdf {
                None => rng.gen_range(0..n),
                Some(cdf) => {
                    let u: f64 = rng.gen();
                    cdf.partition_point(|&c| c < u) as u64
                }
            };
            TimedItem::new(1 + (i / per_tick) as u64, id)
        })
        .collect()
}

/// A stream with one planted heavy element among distinct singletons.
///
/// Requires `heavy_freq^2 > 2 * noise_count` so the plant is (F2,2)-heavy.
pub fn planted_heavy(
    n: u64,
    heavy_id: u64,
    heavy_freq: u64,
    noise_count: u64,
    seed: u64,
) -> Result<Vec<TimedItem>> {
    if heavy_id >= n {
        return Err(Error::IdOutOfRange { id: heavy_id, universe: n });
    }
    if noise_count > n - 1 {
        return Err(Error::Parameter(format!(
            "noise_count {noise_count} exceeds universe minus the heavy id"
        )));
    }
    if heavy_freq * heavy_freq <= 2 * noise_count {
        return Err(Error::Parameter(format!(
            "heavy_freq^2 = {} must exceed 2 * noise_count = {}",
            heavy_freq * heavy_freq,
            2 * noise_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<u64> = Vec::with_capacity((heavy_freq + noise_count) as usize);
    ids.extend(std::iter::repeat(heavy_id).take(heavy_freq as usize));
    // distinct noise ids, none equal to the plant
    let mut pool: Vec<u64> = (0..n).filter(|&i| i != heavy_id).collect();
    pool.shuffle(&mut rng);
    ids.extend(pool.into_iter().take(noise_count as usize));
    ids.shuffle(&mut rng);
    Ok(ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| TimedItem::new(1 + i as u64, id))
        .collect())
}

/// One member of the adversarial single-element family over a universe of
/// size 1 and window `x`: chosen time steps in the first window receive
/// `step` copies of element 0, the last step is padded so the first window
/// holds exactly `x` items, nothing arrives at `x+1`, and steps `x+2..2x-1`
/// repeat steps `1..x-2`.
#[derive(Debug, Clone)]
pub struct LowerBoundFamily {
    pub x: u64,
    pub jump: u64,
    /// insertions per chosen step (`jump`, doubled to 2 when `jump == 1`)
    pub step: u64,
    /// required number of chosen steps
    pub choices: u64,
}

impl LowerBoundFamily {
    pub fn new(x: u64, eps: f64, g: &GFunction) -> Self {
        let jump = local_jump(g, eps, x);
        let step = if jump == 1 { 2 } else { jump };
        LowerBoundFamily { x, jump, step, choices: x / step }
    }

    /// Builds the stream for an explicit choice of time steps.
    pub fn stream(&self, choice: &[u64]) -> Result<Vec<TimedItem>> {
        let q = self.choices;
        if choice.len() as u64 != q {
            return Err(Error::Parameter(format!(
                "choice set has {} steps, expected floor(x / {}) = {q}",
                choice.len(),
                self.step
            )));
        }
        let mut sorted = choice.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() as u64 != q || sorted.iter().any(|&t| t < 1 || t > self.x) {
            return Err(Error::Parameter("choice steps must be distinct in [1, x]".into()));
        }
        let mut items = Vec::new();
        let mut push = |t: u64, count: u64| {
            for _ in 0..count {
                items.push(TimedItem::new(t, 0));
            }
        };
        for &t in &sorted {
            push(t, self.step);
        }
        // pad the last step of the first window to reach exactly x items
        push(self.x, self.x - self.step * q);
        // nothing at x+1; repeat steps 1..x-2 shifted by x+1
        for &t in &sorted {
            if t <= self.x - 2 {
                push(self.x + 1 + t, self.step);
            }
        }
        items.sort_by_key(|it| it.time);
        Ok(items)
    }

    /// A random valid choice set.
    pub fn random_choice(&self, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut steps: Vec<u64> = (1..=self.x).collect();
        steps.shuffle(&mut rng);
        let mut c: Vec<u64> = steps.into_iter().take(self.choices as usize).collect();
        c.sort_unstable();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ExactWindow;
    use crate::stream::WindowSpec;

    #[test]
    fn empty_and_deterministic() {
        assert!(random_stream(16, 0, Distribution::Uniform, 1, 1).is_empty());
        let a = random_stream(16, 100, Distribution::Uniform, 5, 1);
        let b = random_stream(16, 100, Distribution::Uniform, 5, 1);
        assert_eq!(a, b);
        let c = random_stream(16, 100, Distribution::Uniform, 6, 1);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_counts_are_balanced() {
        let s = random_stream(16, 1600, Distribution::Uniform, 3, 1);
        let mut counts = [0u64; 16];
        for it in &s {
            counts[it.id as usize] += 1;
        }
        for c in counts {
            assert!((60..=140).contains(&c), "count {c} out of binomial band");
        }
    }

    #[test]
    fn zipf_skews_low_ranks() {
        let s = random_stream(64, 4000, Distribution::Zipf { s: 1.2 }, 9, 1);
        let head = s.iter().filter(|it| it.id < 4).count();
        let tail = s.iter().filter(|it| it.id >= 32).count();
        assert!(head > tail);
    }

    #[test]
    fn per_tick_packs_timestamps() {
        let s = random_stream(8, 10, Distribution::Uniform, 1, 5);
        assert_eq!(s[0].time, 1);
        assert_eq!(s[4].time, 1);
        assert_eq!(s[5].time, 2);
    }

    #[test]
    fn planted_heavy_is_heavy() {
        let s = planted_heavy(64, 9, 40, 20, 7).unwrap();
        let mut o = ExactWindow::new(WindowSpec::new(64, 1 << 32));
        o.ingest_all(&s).unwrap();
        let at = s.last().unwrap().time;
        let sq = GFunction::parse("power:2").unwrap();
        assert_eq!(o.heavy_set(at, &sq, 2.0), vec![9]);
        // noise ids distinct and != heavy
        let freqs = o.frequencies(at);
        assert_eq!(freqs[&9], 40);
        assert!(freqs.iter().all(|(&id, &c)| id == 9 || c == 1));
        assert_eq!(freqs.len(), 21);
    }

    #[test]
    fn planted_heavy_rejects_weak_plants() {
        assert!(planted_heavy(64, 9, 2, 20, 7).is_err());
    }

    #[test]
    fn lower_bound_first_window_total_is_x() {
        let g = GFunction::parse("power:2").unwrap();
        for seed in 0..5 {
            let fam = LowerBoundFamily::new(64, 0.1, &g);
            let choice = fam.random_choice(seed);
            let s = fam.stream(&choice).unwrap();
            let total: u64 = s.iter().filter(|it| it.time <= 64).count() as u64;
            assert_eq!(total, 64);
            assert!(!s.iter().any(|it| it.time == 65));
            assert!(s.iter().all(|it| it.time < 2 * 64));
        }
    }

    #[test]
    fn lower_bound_jump_one_fallback_doubles() {
        // 2^x - 1 has local jump 1 everywhere; insertions double
        let g = GFunction::Exp2M1;
        let fam = LowerBoundFamily::new(32, 0.4, &g);
        assert_eq!(fam.jump, 1);
        assert_eq!(fam.step, 2);
        let choice = fam.random_choice(1);
        let s = fam.stream(&choice).unwrap();
        assert_eq!(s.iter().filter(|it| it.time <= 32).count(), 32);
    }

    #[test]
    fn lower_bound_rejects_bad_choice() {
        let g = GFunction::parse("power:2").unwrap();
        let fam = LowerBoundFamily::new(64, 0.1, &g);
        assert!(fam.stream(&[1, 2]).is_err());
        let mut c = fam.random_choice(0);
        c[0] = 0; // out of range
        assert!(fam.stream(&c).is_err());
    }
}
