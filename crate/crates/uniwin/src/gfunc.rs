//! The queryable function class: builtin constructors, the local jump, and a
//! numerical probe for the tractability predicates.
//!
//! The probe is a heuristic grid decision, not a proof: the quantifier
//! alternation in the tractability predicates cannot be decided numerically,
//! so it fixes `k` in {1,2,3}, caps the `t`/`r` witnesses, and exhausts a
//! log-spaced grid. Every failure verdict carries a counterexample that can
//! be re-evaluated directly.

use serde::{Deserialize, Serialize};

use crate::stream::{Error, Result};

/// A non-decreasing function with `G(0) = 0`, `G(1) > 0`, evaluated at
/// integer frequencies (with a monotone real extension used by the output
/// guards, where estimates are real-valued).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GFunction {
    /// `x^p` for `p > 0`.
    Power { p: f64 },
    /// `x` (frequency sum / F1).
    Identity,
    /// `1` for `x >= 1`, else `0` (distinct-count style).
    Indicator,
    /// `min(x, cap)`.
    Capped { cap: u64 },
    /// `ln(1 + x)`.
    Log1p,
    /// `2^x - 1`; intractable, kept for probe and lower-bound tests.
    Exp2M1,
    /// `factor * inner(x)` for `factor > 0`.
    Scaled { factor: f64, inner: Box<GFunction> },
}

impl GFunction {
    /// Parses the CLI syntax: `power:2`, `capped:5`, `indicator`, `identity`,
    /// `log1p`, `exp2m1`, `scale:<factor>:<inner>`.
    pub fn parse(spec: &str) -> Result<GFunction> {
        let mut parts = spec.splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let rest = parts.next();
        match (name, rest) {
            ("power", Some(arg)) => {
                let p: f64 = arg
                    .parse()
                    .map_err(|_| Error::UnknownFunction(spec.to_string()))?;
                if !(p > 0.0) || !p.is_finite() {
                    return Err(Error::Parameter(format!("power exponent {p} must be > 0")));
                }
                Ok(GFunction::Power { p })
            }
            ("identity", None) => Ok(GFunction::Identity),
            ("indicator", None) => Ok(GFunction::Indicator),
            ("capped", Some(arg)) => {
                let cap: u64 = arg
                    .parse()
                    .map_err(|_| Error::UnknownFunction(spec.to_string()))?;
                if cap == 0 {
                    return Err(Error::Parameter("cap must be >= 1".into()));
                }
                Ok(GFunction::Capped { cap })
            }
            ("log1p", None) => Ok(GFunction::Log1p),
            ("exp2m1", None) => Ok(GFunction::Exp2M1),
            ("scale", Some(arg)) => {
                let mut inner_parts = arg.splitn(2, ':');
                let factor: f64 = inner_parts
                    .next()
                    .unwrap_or_default()
                    .parse()
                    .map_err(|_| Error::UnknownFunction(spec.to_string()))?;
                let inner = inner_parts
                    .next()
                    .ok_or_else(|| Error::UnknownFunction(spec.to_string()))?;
                if !(factor > 0.0) || !factor.is_finite() {
                    return Err(Error::Parameter(format!("scale factor {factor} must be > 0")));
                }
                Ok(GFunction::Scaled { factor, inner: Box::new(GFunction::parse(inner)?) })
            }
            _ => Err(Error::UnknownFunction(spec.to_string())),
        }
    }

    /// Names of the builtin constructors, for CLI error messages.
    pub fn builtin_names() -> &'static [&'static str] {
        &["power:<p>", "identity", "indicator", "capped:<c>", "log1p", "exp2m1", "scale:<f>:<g>"]
    }

    /// Evaluation at an integer frequency.
    #[inline]
    pub fn eval(&self, x: u64) -> f64 {
        self.eval_real(x as f64)
    }

    /// Monotone real extension; negative arguments clamp to zero.
    pub fn eval_real(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            GFunction::Power { p } => x.powf(*p),
            GFunction::Identity => x,
            GFunction::Indicator => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            GFunction::Capped { cap } => x.min(*cap as f64),
            GFunction::Log1p => x.ln_1p(),
            GFunction::Exp2M1 => x.exp2() - 1.0,
            GFunction::Scaled { factor, inner } => factor * inner.eval_real(x),
        }
    }

    /// `log2(G(x))` computed without overflowing, for probe-scale arguments.
    /// Returns `-inf` where `G(x) = 0`.
    pub fn log2_eval(&self, x: u64) -> f64 {
        match self {
            GFunction::Power { p } => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else {
                    p * (x as f64).log2()
                }
            }
            GFunction::Identity => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else {
                    (x as f64).log2()
                }
            }
            GFunction::Indicator => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            GFunction::Capped { cap } => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else {
                    (x.min(*cap) as f64).log2()
                }
            }
            GFunction::Log1p => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else {
                    (x as f64).ln_1p().log2()
                }
            }
            GFunction::Exp2M1 => {
                if x == 0 {
                    f64::NEG_INFINITY
                } else if x >= 64 {
                    // 2^x - 1 is 2^x to f64 precision here
                    x as f64
                } else {
                    ((x as f64).exp2() - 1.0).log2()
                }
            }
            GFunction::Scaled { factor, inner } => {
                let lg = inner.log2_eval(x);
                if lg == f64::NEG_INFINITY {
                    lg
                } else {
                    factor.log2() + lg
                }
            }
        }
    }
}

impl std::fmt::Display for GFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GFunction::Power { p } => write!(f, "power:{p}"),
            GFunction::Identity => write!(f, "identity"),
            GFunction::Indicator => write!(f, "indicator"),
            GFunction::Capped { cap } => write!(f, "capped:{cap}"),
            GFunction::Log1p => write!(f, "log1p"),
            GFunction::Exp2M1 => write!(f, "exp2m1"),
            GFunction::Scaled { factor, inner } => write!(f, "scale:{factor}:{inner}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Local jump
// ---------------------------------------------------------------------------

/// Smallest shift (capped at `x`) that moves `G(x +/- z)` outside the
/// `(1 +/- eps)` band around `G(x)`.
///
/// Doubling-then-binary search over the monotone trigger predicate.
pub fn local_jump(g: &GFunction, eps: f64, x: u64) -> u64 {
    assert!(x >= 1, "local jump needs x >= 1");
    assert!(eps > 0.0 && eps < 1.0, "eps must be in (0,1)");
    let gx = g.eval(x);
    let hi_band = (1.0 + eps) * gx;
    let lo_band = (1.0 - eps) * gx;
    let trigger = |z: u64| g.eval(x + z) > hi_band || g.eval(x - z) < lo_band;
    smallest_trigger(x, trigger)
}

/// Log-domain variant used by the probe, where `G(x)` can overflow f64.
fn local_jump_log2(g: &GFunction, eps: f64, x: u64) -> u64 {
    let lgx = g.log2_eval(x);
    let hi_band = (1.0 + eps).log2() + lgx;
    let lo_band = (1.0 - eps).log2() + lgx;
    let trigger = |z: u64| g.log2_eval(x + z) > hi_band || g.log2_eval(x - z) < lo_band;
    smallest_trigger(x, trigger)
}

fn smallest_trigger(x: u64, trigger: impl Fn(u64) -> bool) -> u64 {
    if !trigger(x) {
        return x; // nothing within the cap fires; definition caps at x
    }
    // doubling phase: find first power-of-two-ish z that fires
    let mut hi = 1u64;
    while hi < x && !trigger(hi) {
        hi = (hi * 2).min(x);
    }
    if hi == 1 {
        return 1;
    }
    let mut lo = hi / 2; // did not fire (or hi was clamped; then lo may fire)
    if trigger(lo) {
        // only possible when hi was clamped to x mid-doubling
        hi = lo;
        lo = hi / 2;
        while trigger(lo) {
            hi = lo;
            lo /= 2;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if trigger(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Reference implementation: linear scan of z. Test oracle for `local_jump`.
pub fn local_jump_linear(g: &GFunction, eps: f64, x: u64) -> u64 {
    assert!(x >= 1 && eps > 0.0 && eps < 1.0);
    let gx = g.eval(x);
    let hi_band = (1.0 + eps) * gx;
    let lo_band = (1.0 - eps) * gx;
    for z in 1..=x {
        if g.eval(x + z) > hi_band || g.eval(x - z) < lo_band {
            return z;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Tractability probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeMode {
    Plain,
    Universal { c: u32 },
}

impl ProbeMode {
    fn cap(&self) -> u32 {
        match self {
            ProbeMode::Plain => 8,
            ProbeMode::Universal { c } => *c,
        }
    }
}

/// Probe grid. Values are log-spaced; `x_max` may exceed f64-exact integers
/// for direct evaluation because the probe works in log2 domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub x_max: u64,
    pub y_max: u64,
    pub points_per_octave: f64,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid { x_max: 1 << 52, y_max: 1 << 16, points_per_octave: 0.75 }
    }
}

impl ProbeGrid {
    fn log_spaced(&self, max: u64) -> Vec<u64> {
        let mut pts = Vec::new();
        let mut v = 1.0f64;
        let step = 2.0f64.powf(1.0 / self.points_per_octave);
        while v <= max as f64 {
            let p = v.round() as u64;
            if pts.last() != Some(&p) {
                pts.push(p);
            }
            v *= step;
        }
        pts
    }
}

/// A grid point that violates a predicate inequality at the capped witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub predicate: u8,
    pub k: u32,
    pub x: u64,
    pub y: u64,
    /// log2 of R = G(x)/G(y); only meaningful for predicate 1.
    pub log2_r: f64,
    pub epsilon: f64,
    /// the t (predicate 1) or r (predicate 2) cap the point defeats
    pub cap: u32,
    pub lhs_log2: f64,
    pub rhs_log2: f64,
}

impl Counterexample {
    /// Recomputes the violated inequality from scratch.
    pub fn reverify(&self, g: &GFunction) -> bool {
        let pi = local_jump_log2(g, self.epsilon, self.x);
        match self.predicate {
            1 => {
                let log2_rx = self.log2_r + (self.x as f64).log2();
                let lhs = 2.0 * ((pi as f64).log2() - (self.y as f64).log2());
                let rhs = self.log2_r - self.cap as f64 * log2_rx.log2();
                lhs < rhs
            }
            2 => {
                let log2_x = (self.x as f64).log2();
                let lhs = (pi as f64).log2();
                let rhs = log2_x - self.cap as f64 * log2_x.log2();
                lhs < rhs
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PredicateVerdict {
    /// A witness (t or r, plus threshold) kills every grid violation.
    Pass { witness: u32, threshold_log2: f64, covered: usize },
    Fail { counterexample: Counterexample },
    Inconclusive { reason: String },
}

impl PredicateVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PredicateVerdict::Pass { .. })
    }
}

/// Outcome of the grid probe. Explicitly a heuristic classification; the
/// comparisons run in log2 domain so that fast-growing functions evaluate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub g: String,
    pub mode: ProbeMode,
    pub predicate1: PredicateVerdict,
    pub predicate2: PredicateVerdict,
    /// sanity check: G(N) <= N^3 on the upper grid
    pub cube_check: bool,
    /// pairs skipped because log^t(Rx) is degenerate (Rx < 16)
    pub excluded_pairs: usize,
    pub grid_x_points: usize,
    pub grid_y_points: usize,
}

impl ProbeReport {
    pub fn tractable(&self) -> bool {
        self.predicate1.passed() && self.predicate2.passed()
    }
}

struct Pred1Point {
    k: u32,
    x: u64,
    y: u64,
    log2_r: f64,
    epsilon: f64,
    lhs_log2: f64,
    log2_log2_rx: f64,
}

struct Pred2Point {
    k: u32,
    x: u64,
    epsilon: f64,
    lhs_log2: f64,
    log2_x: f64,
}

/// Grid probe of the two tractability predicates for `ks` in {1,2,3}.
pub fn probe_tractability(g: &GFunction, mode: ProbeMode, grid: &ProbeGrid) -> ProbeReport {
    let cap = mode.cap();
    let xs = grid.log_spaced(grid.x_max);
    let ys = grid.log_spaced(grid.y_max);
    let ks = [1u32, 2, 3];
    let mut excluded = 0usize;

    // ---- predicate 1: collect evaluated points ---------------------------
    let mut p1 = Vec::new();
    for &x in &xs {
        let lgx = g.log2_eval(x);
        if lgx == f64::NEG_INFINITY {
            continue;
        }
        for &y in &ys {
            let lgy = g.log2_eval(y);
            if lgy == f64::NEG_INFINITY {
                continue;
            }
            let log2_r = lgx - lgy;
            if log2_r <= 0.0 {
                continue; // R <= 1 never exceeds a threshold
            }
            let log2_rx = log2_r + (x as f64).log2();
            if log2_rx < 4.0 {
                excluded += 1; // Rx < 16: log^t degenerate, reported not guessed
                continue;
            }
            let log_rx = log2_rx; // log base 2 throughout
            for k in ks {
                let eps_bound = 1.0 / log_rx.powi(k as i32);
                if eps_bound >= 1.0 {
                    continue;
                }
                for eps in [eps_bound * 1.02, (eps_bound * 12.0).min(0.5)] {
                    if eps <= eps_bound || eps >= 1.0 {
                        continue;
                    }
                    let pi = local_jump_log2(g, eps, x);
                    let lhs = 2.0 * ((pi as f64).log2() - (y as f64).log2());
                    p1.push(Pred1Point {
                        k,
                        x,
                        y,
                        log2_r,
                        epsilon: eps,
                        lhs_log2: lhs,
                        log2_log2_rx: log_rx.log2(),
                    });
                }
            }
        }
    }

    let pred1 = if p1.is_empty() {
        PredicateVerdict::Inconclusive { reason: "no valid (x, y) pairs on grid".into() }
    } else {
        // N0 thresholds as log2(R) values
        let n0_candidates = [2.0f64, 4.0, 8.0, 16.0, 24.0, 32.0];
        let mut verdict = None;
        'search1: for t in 0..=cap {
            for &n0 in &n0_candidates {
                let mut covered = 0usize;
                let mut ok = true;
                for pt in &p1 {
                    if pt.log2_r <= n0 {
                        continue;
                    }
                    covered += 1;
                    let rhs = pt.log2_r - t as f64 * pt.log2_log2_rx;
                    if pt.lhs_log2 < rhs {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    verdict =
                        Some(PredicateVerdict::Pass { witness: t, threshold_log2: n0, covered });
                    break 'search1;
                }
            }
        }
        verdict.unwrap_or_else(|| {
            // no witness: report the largest-R violation at the full cap
            let worst = p1
                .iter()
                .filter(|pt| {
                    pt.lhs_log2 < pt.log2_r - cap as f64 * pt.log2_log2_rx
                })
                .max_by(|a, b| a.log2_r.total_cmp(&b.log2_r))
                .expect("no pass witness implies a violation at the cap");
            PredicateVerdict::Fail {
                counterexample: Counterexample {
                    predicate: 1,
                    k: worst.k,
                    x: worst.x,
                    y: worst.y,
                    log2_r: worst.log2_r,
                    epsilon: worst.epsilon,
                    cap,
                    lhs_log2: worst.lhs_log2,
                    rhs_log2: worst.log2_r - cap as f64 * worst.log2_log2_rx,
                },
            }
        })
    };

    // ---- predicate 2 ------------------------------------------------------
    let mut p2 = Vec::new();
    for &x in &xs {
        if x < 4 || g.log2_eval(x) == f64::NEG_INFINITY {
            continue;
        }
        let log2_x = (x as f64).log2();
        for k in ks {
            let eps_bound = 1.0 / log2_x.powi(k as i32);
            if eps_bound >= 1.0 {
                continue;
            }
            for eps in [eps_bound * 1.02, (eps_bound * 12.0).min(0.5)] {
                if eps <= eps_bound || eps >= 1.0 {
                    continue;
                }
                let pi = local_jump_log2(g, eps, x);
                p2.push(Pred2Point { k, x, epsilon: eps, lhs_log2: (pi as f64).log2(), log2_x });
            }
        }
    }

    let pred2 = if p2.is_empty() {
        PredicateVerdict::Inconclusive { reason: "no valid x points on grid".into() }
    } else {
        let n1_candidates = [16u64, 256, 4096, 65536];
        let mut verdict = None;
        'search2: for r in 0..=cap {
            for &n1 in &n1_candidates {
                let mut covered = 0usize;
                let mut ok = true;
                for pt in &p2 {
                    if pt.x < n1 {
                        continue;
                    }
                    covered += 1;
                    let rhs = pt.log2_x - r as f64 * pt.log2_x.log2();
                    if pt.lhs_log2 < rhs {
                        ok = false;
                        break;
                    }
                }
                if ok && covered > 0 {
                    verdict =
                        Some(PredicateVerdict::Pass { witness: r, threshold_log2: (n1 as f64).log2(), covered });
                    break 'search2;
                }
            }
        }
        verdict.unwrap_or_else(|| {
            let worst = p2
                .iter()
                .filter(|pt| pt.lhs_log2 < pt.log2_x - cap as f64 * pt.log2_x.log2())
                .max_by_key(|pt| pt.x)
                .expect("no pass witness implies a violation at the cap");
            PredicateVerdict::Fail {
                counterexample: Counterexample {
                    predicate: 2,
                    k: worst.k,
                    x: worst.x,
                    y: 0,
                    log2_r: 0.0,
                    epsilon: worst.epsilon,
                    cap,
                    lhs_log2: worst.lhs_log2,
                    rhs_log2: worst.log2_x - cap as f64 * worst.log2_x.log2(),
                },
            }
        })
    };

    // ---- cube sanity check ------------------------------------------------
    let cube_check = xs
        .iter()
        .filter(|&&x| x >= grid.x_max / 256)
        .all(|&x| g.log2_eval(x) <= 3.0 * (x as f64).log2() + 1e-9);

    ProbeReport {
        g: g.to_string(),
        mode,
        predicate1: pred1,
        predicate2: pred2,
        cube_check,
        excluded_pairs: excluded,
        grid_x_points: xs.len(),
        grid_y_points: ys.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        assert_eq!(GFunction::parse("power:2").unwrap().eval(3), 9.0);
        assert_eq!(GFunction::Indicator.eval(0), 0.0);
        assert_eq!(GFunction::Indicator.eval(7), 1.0);
        assert_eq!(GFunction::parse("capped:5").unwrap().eval(9), 5.0);
        assert_eq!(GFunction::Identity.eval(4), 4.0);
        assert!((GFunction::Log1p.eval(1) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(GFunction::Exp2M1.eval(3), 7.0);
        let s = GFunction::parse("scale:2:power:2").unwrap();
        assert_eq!(s.eval(3), 18.0);
    }

    #[test]
    fn parse_rejects_unknown() {
        assert!(GFunction::parse("frobnicate").is_err());
        assert!(GFunction::parse("power:0").is_err());
        assert!(GFunction::parse("power:abc").is_err());
    }

    #[test]
    fn g_axioms_hold_for_builtins() {
        for spec in ["power:1", "power:1.5", "power:2", "indicator", "capped:8", "log1p", "exp2m1"]
        {
            let g = GFunction::parse(spec).unwrap();
            assert_eq!(g.eval(0), 0.0, "{spec}");
            assert!(g.eval(1) > 0.0, "{spec}");
            let mut prev = 0.0;
            let mut x = 0u64;
            while x <= 1 << 20 {
                let v = g.eval(x);
                assert!(v >= prev, "{spec} not monotone at {x}");
                prev = v;
                x = (x * 7 / 4).max(x + 1);
            }
        }
    }

    #[test]
    fn local_jump_pinned_examples() {
        // x = 1 always yields 1
        for spec in ["power:2", "identity", "indicator", "capped:3"] {
            let g = GFunction::parse(spec).unwrap();
            assert_eq!(local_jump(&g, 0.3, 1), 1);
        }
        // identity, eps = 0.5, x = 4: 4+3=7 > 6 (and 4-3=1 < 2)
        assert_eq!(local_jump(&GFunction::Identity, 0.5, 4), 3);
        assert_eq!(local_jump_linear(&GFunction::Identity, 0.5, 4), 3);
        // x^2, eps = 0.1, x = 10: 121 > 110
        let sq = GFunction::parse("power:2").unwrap();
        assert_eq!(local_jump(&sq, 0.1, 10), 1);
        assert_eq!(local_jump_linear(&sq, 0.1, 10), 1);
    }

    #[test]
    fn binary_equals_linear_spot() {
        for spec in ["power:1", "power:1.5", "power:2", "indicator", "capped:8", "log1p", "exp2m1"]
        {
            let g = GFunction::parse(spec).unwrap();
            for eps in [0.5, 0.1, 0.01] {
                for x in [1u64, 2, 3, 5, 17, 100, 999, 4096] {
                    assert_eq!(
                        local_jump(&g, eps, x),
                        local_jump_linear(&g, eps, x),
                        "{spec} eps={eps} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn probe_classifies_powers() {
        let grid = ProbeGrid::default();
        for spec in ["power:1", "power:1.5", "power:2"] {
            let g = GFunction::parse(spec).unwrap();
            let rep = probe_tractability(&g, ProbeMode::Universal { c: 8 }, &grid);
            assert!(rep.tractable(), "{spec}: {:?} / {:?}", rep.predicate1, rep.predicate2);
            assert!(rep.cube_check, "{spec}");
        }
    }

    #[test]
    fn probe_rejects_cube_and_exponential() {
        let grid = ProbeGrid::default();
        let cube = GFunction::parse("power:3").unwrap();
        let rep = probe_tractability(&cube, ProbeMode::Universal { c: 8 }, &grid);
        assert!(!rep.tractable());
        if let PredicateVerdict::Fail { counterexample } = &rep.predicate1 {
            assert!(counterexample.reverify(&cube));
        } else {
            panic!("expected predicate-1 failure for power:3, got {:?}", rep.predicate1);
        }

        let exp = GFunction::Exp2M1;
        let rep = probe_tractability(&exp, ProbeMode::Universal { c: 8 }, &grid);
        assert!(!rep.tractable());
        if let PredicateVerdict::Fail { counterexample } = &rep.predicate2 {
            assert!(counterexample.reverify(&exp));
        } else {
            panic!("expected predicate-2 failure for exp2m1, got {:?}", rep.predicate2);
        }
    }

    #[test]
    fn indicator_and_capped_probe_tractable() {
        let grid = ProbeGrid::default();
        for spec in ["indicator", "capped:8"] {
            let g = GFunction::parse(spec).unwrap();
            let rep = probe_tractability(&g, ProbeMode::Universal { c: 8 }, &grid);
            assert!(rep.tractable(), "{spec}: {:?} / {:?}", rep.predicate1, rep.predicate2);
        }
    }
}
