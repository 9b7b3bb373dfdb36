//! Maximization of the secondary stable throughput.
//!
//! Closed forms for the optimal idle-access probability (alone and for a
//! fixed busy-access probability, via a single-ratio fractional program),
//! grid sweeps over the sensing duration and busy-access probability, region
//! boundary curves, and best-scheme switching. A uniform-grid oracle backs
//! every closed form in the test suites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::{
    boundary_no_sensing, rates_conventional, rates_idle_busy, rates_idle_only, AccessPolicy,
    NetworkEnv, Scheme,
};

/// Constants of the fractional program
/// `max (a x + f)/(c x - d) + k x  s.t.  0 <= x <= min((d - w)/c, 1)`.
///
/// Feasible only when `d >= w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalProgram {
    pub a: f64,
    pub f: f64,
    pub c: f64,
    pub d: f64,
    pub k: f64,
    pub w: f64,
}

impl FractionalProgram {
    pub fn validate(&self) -> Result<()> {
        for (name, v, strict) in [
            ("a", self.a, false),
            ("f", self.f, false),
            ("c", self.c, true),
            ("d", self.d, true),
            ("k", self.k, true),
            ("w", self.w, false),
        ] {
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                return Err(Error::InvalidParam(format!(
                    "fractional program constant {name} must be {} and finite, got {v}",
                    if strict { "> 0" } else { ">= 0" }
                )));
            }
        }
        Ok(())
    }

    /// Objective value at `x` (callers keep `x` inside the feasible set, so
    /// the ratio's pole at `x = d/c` is never reached).
    pub fn objective(&self, x: f64) -> f64 {
        (self.a * x + self.f) / (self.c * x - self.d) + self.k * x
    }

    /// Upper end of the feasible interval, `min((d - w)/c, 1)`.
    pub fn upper_bound(&self) -> f64 {
        ((self.d - self.w) / self.c).min(1.0)
    }
}

/// Closed-form maximizer of a [`FractionalProgram`]:
/// `max{min{(d - sqrt((a d + c f)/k))/c, (d - w)/c, 1}, 0}`.
pub fn solve_fractional(p: &FractionalProgram) -> Result<f64> {
    p.validate()?;
    if p.d < p.w {
        return Err(Error::Infeasible(format!(
            "fractional program requires d >= w, got d = {}, w = {}",
            p.d, p.w
        )));
    }
    let interior = (p.d - ((p.a * p.d + p.c * p.f) / p.k).sqrt()) / p.c;
    Ok(interior.min((p.d - p.w) / p.c).min(1.0).max(0.0))
}

/// Optimal idle-access probability for [`Scheme::IdleOnly`] at a fixed
/// sensing duration: `(1 - sqrt(lambda_p / p_ppd)) / p_md`, clipped to [0,1].
pub fn optimal_idle_access(env: &NetworkEnv, tau: f64, lambda_p: f64) -> Result<f64> {
    let p_ppd = env.p_success_primary()?;
    if lambda_p > p_ppd {
        return Err(Error::Infeasible(format!(
            "lambda_p = {lambda_p} exceeds maximum primary service rate {p_ppd}"
        )));
    }
    let p_md = env.p_misdetect(tau)?;
    let root = if p_ppd > 0.0 { (lambda_p / p_ppd).sqrt() } else { 0.0 };
    if p_md == 0.0 {
        // Perfect detection: the primary constraint never binds, full access.
        return Ok(1.0);
    }
    Ok(((1.0 - root) / p_md).clamp(0.0, 1.0))
}

/// Optimal idle-access probability for [`Scheme::IdleBusy`] at fixed sensing
/// duration and busy-access probability, via the fractional-program mapping
/// `a = lambda_p (1-p_fa)/p_ppd`, `f = lambda_p b p_fa/p_ppd`, `c = p_md`,
/// `d = p_md + (1-p_md)(1-b)`, `k = 1-p_fa`, `w = lambda_p/p_ppd`.
pub fn optimal_idle_access_with_busy(
    env: &NetworkEnv,
    tau: f64,
    busy_access: f64,
    lambda_p: f64,
) -> Result<f64> {
    let p_ppd = env.p_success_primary()?;
    let p_md = env.p_misdetect(tau)?;
    let p_fa = env.p_false_alarm();
    if p_ppd <= 0.0 {
        if lambda_p > 0.0 {
            return Err(Error::Infeasible("primary link never succeeds".into()));
        }
        return Ok(1.0);
    }
    let w = lambda_p / p_ppd;
    let d = p_md + (1.0 - p_md) * (1.0 - busy_access);
    if d < w {
        return Err(Error::Infeasible(format!(
            "busy_access = {busy_access} leaves primary service rate below lambda_p = {lambda_p}"
        )));
    }
    if p_md == 0.0 {
        // With perfect detection the objective is nondecreasing in the
        // idle-access probability over the feasible interval.
        return Ok(1.0);
    }
    if (1.0 - p_fa) == 0.0 {
        // Idle-declared transmissions never happen without false-alarm
        // complement weight; any feasible value works, pick the bound.
        return Ok(((d - w) / p_md).clamp(0.0, 1.0));
    }
    let program = FractionalProgram {
        a: lambda_p * (1.0 - p_fa) / p_ppd,
        f: lambda_p * busy_access * p_fa / p_ppd,
        c: p_md,
        d,
        k: 1.0 - p_fa,
        w,
    };
    solve_fractional(&program)
}

/// Exhaustive maximization on a uniform grid of `steps` points over
/// `[lo, hi]`. Ties break toward the lowest grid point; NaN objective values
/// are skipped.
pub fn grid_oracle(objective: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> (f64, f64) {
    assert!(steps >= 2, "grid_oracle needs at least 2 points");
    assert!(lo <= hi, "grid_oracle needs lo <= hi");
    let mut best_x = lo;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..steps {
        let x = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let v = objective(x);
        if v.is_nan() {
            continue;
        }
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    (best_x, best_v)
}

/// Result of maximizing one scheme's secondary throughput at a fixed
/// primary arrival rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeOptimum {
    pub lambda_s_max: f64,
    pub policy: AccessPolicy,
    pub feasible: bool,
}

/// Grid sizes for the sensing-duration and busy-access sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub tau_points: usize,
    pub b_points: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Self { tau_points: 101, b_points: 101 }
    }
}

impl Grids {
    pub fn validate(&self) -> Result<()> {
        if self.tau_points < 2 || self.b_points < 2 {
            return Err(Error::InvalidParam(format!(
                "grids need at least 2 points each, got tau_points = {}, b_points = {}",
                self.tau_points, self.b_points
            )));
        }
        Ok(())
    }

    /// Sensing-duration grid: uniform over `[0, slot_duration / 2]`.
    pub fn tau_grid(&self, env: &NetworkEnv) -> Vec<f64> {
        let hi = 0.5 * env.slot_duration();
        (0..self.tau_points)
            .map(|i| hi * i as f64 / (self.tau_points - 1) as f64)
            .collect()
    }

    pub fn b_grid(&self) -> Vec<f64> {
        (0..self.b_points)
            .map(|i| i as f64 / (self.b_points - 1) as f64)
            .collect()
    }
}

fn better(candidate: (f64, AccessPolicy), best: &mut Option<(f64, AccessPolicy)>) {
    match best {
        Some((v, _)) if candidate.0 <= *v => {}
        _ => *best = Some(candidate),
    }
}

/// Maximum secondary throughput of one scheme at `lambda_p`, optimizing the
/// scheme's knobs: sensing duration alone (conventional), plus the
/// idle-access closed form (idle_only), plus the busy-access grid
/// (idle_busy); the sensing-free scheme is fully closed-form.
pub fn maximize_scheme(
    scheme: Scheme,
    env: &NetworkEnv,
    lambda_p: f64,
    grids: &Grids,
) -> Result<SchemeOptimum> {
    grids.validate()?;
    if !(0.0..=1.0).contains(&lambda_p) {
        return Err(Error::InvalidParam(format!(
            "lambda_p must be in [0,1], got {lambda_p}"
        )));
    }
    let infeasible = || SchemeOptimum {
        lambda_s_max: 0.0,
        policy: AccessPolicy::silent(scheme),
        feasible: false,
    };

    if scheme == Scheme::NoSensing {
        let p_ppd = env.p_success_primary()?;
        let bound = boundary_no_sensing(env, lambda_p)?;
        if !bound.feasible {
            return Ok(infeasible());
        }
        let root = if p_ppd > 0.0 { (lambda_p / p_ppd).sqrt() } else { 0.0 };
        return Ok(SchemeOptimum {
            lambda_s_max: bound.mu_s,
            policy: AccessPolicy::no_sensing(1.0 - root),
            feasible: true,
        });
    }

    let mut best: Option<(f64, AccessPolicy)> = None;
    for &tau in &grids.tau_grid(env) {
        match scheme {
            Scheme::Conventional => {
                let r = rates_conventional(env, tau, lambda_p)?;
                if r.feasible {
                    better((r.mu_s, AccessPolicy::conventional(tau)), &mut best);
                }
            }
            Scheme::IdleOnly => {
                let Ok(a) = optimal_idle_access(env, tau, lambda_p) else { continue };
                let r = rates_idle_only(env, tau, a, lambda_p)?;
                if r.feasible {
                    better((r.mu_s, AccessPolicy::idle_only(tau, a)), &mut best);
                }
            }
            Scheme::IdleBusy => {
                for &b in &grids.b_grid() {
                    let Ok(a) = optimal_idle_access_with_busy(env, tau, b, lambda_p) else {
                        continue;
                    };
                    let r = rates_idle_busy(env, tau, a, b, lambda_p)?;
                    if r.feasible {
                        better((r.mu_s, AccessPolicy::idle_busy(tau, a, b)), &mut best);
                    }
                }
            }
            Scheme::NoSensing => unreachable!(),
        }
    }
    Ok(match best {
        Some((value, policy)) => SchemeOptimum { lambda_s_max: value, policy, feasible: true },
        None => infeasible(),
    })
}

/// Best scheme at `lambda_p` among the sensing-free, conventional, and
/// dual-access schemes (idle-only is dominated by dual access). Exact ties
/// prefer the scheme with less mechanism: no_sensing, then conventional,
/// then idle_busy.
pub fn best_scheme(
    env: &NetworkEnv,
    lambda_p: f64,
    grids: &Grids,
) -> Result<(Scheme, SchemeOptimum)> {
    let candidates = [Scheme::NoSensing, Scheme::Conventional, Scheme::IdleBusy];
    let mut best: Option<(Scheme, SchemeOptimum)> = None;
    for scheme in candidates {
        let opt = maximize_scheme(scheme, env, lambda_p, grids)?;
        match &best {
            Some((_, cur))
                if cur.lambda_s_max >= opt.lambda_s_max
                    && (cur.feasible || !opt.feasible) => {}
            _ => best = Some((scheme, opt)),
        }
    }
    Ok(best.expect("at least one candidate evaluated"))
}

/// One row of a sampled region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub lambda_p: f64,
    pub lambda_s_max: f64,
    pub policy: AccessPolicy,
    pub feasible: bool,
}

/// Sampled stability-region boundary of one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    pub scheme: Scheme,
    pub env_digest: String,
    pub rows: Vec<RegionRow>,
}

/// Largest primary arrival rate at which the scheme can keep the primary
/// queue stable for some knob setting.
fn max_feasible_lambda_p(scheme: Scheme, env: &NetworkEnv, grids: &Grids) -> Result<f64> {
    let p_ppd = env.p_success_primary()?;
    match scheme {
        // Idle and busy access can always be switched off.
        Scheme::NoSensing | Scheme::IdleOnly | Scheme::IdleBusy => Ok(p_ppd),
        Scheme::Conventional => {
            let mut best: f64 = 0.0;
            for &tau in &grids.tau_grid(env) {
                best = best.max(p_ppd * (1.0 - env.p_misdetect(tau)?));
            }
            Ok(best)
        }
    }
}

/// Sample the boundary of one scheme on a uniform `lambda_p` grid over its
/// feasible range.
pub fn region_curve(
    scheme: Scheme,
    env: &NetworkEnv,
    lambda_p_samples: usize,
    grids: &Grids,
) -> Result<RegionCurve> {
    if lambda_p_samples < 2 {
        return Err(Error::InvalidParam(format!(
            "lambda_p_samples must be >= 2, got {lambda_p_samples}"
        )));
    }
    let hi = max_feasible_lambda_p(scheme, env, grids)?;
    let mut rows = Vec::with_capacity(lambda_p_samples);
    for i in 0..lambda_p_samples {
        let lambda_p = hi * i as f64 / (lambda_p_samples - 1) as f64;
        let opt = maximize_scheme(scheme, env, lambda_p, grids)?;
        rows.push(RegionRow {
            lambda_p,
            lambda_s_max: opt.lambda_s_max,
            policy: opt.policy,
            feasible: opt.feasible,
        });
    }
    Ok(RegionCurve { scheme, env_digest: env.digest(), rows })
}
