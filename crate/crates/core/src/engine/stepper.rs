//! Method-of-steps integrator for systems with one state-dependent lag.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dense::{hermite, DenseOutput};

/// A delay system `u' = F(t, u(t), u(t − τ(u(t))))` with history on
/// `[−τ_M, 0]`.
pub trait DelaySystem<const N: usize> {
    /// Current lag `τ(u)`.
    fn delay(&self, u: &[f64; N]) -> f64;

    /// Right-hand side given the lag time `s = t − τ(u)` and `u(s)`.
    fn derivative(&self, t: f64, u: &[f64; N], lag_time: f64, lagged: &[f64; N]) -> [f64; N];

    /// History on `[−τ_M, 0]`; `history(0)` is the initial state.
    fn history(&self, t: f64) -> [f64; N];

    /// Lower bound of the lag over all states.
    fn min_delay(&self) -> f64;

    /// Upper bound of the lag over all states.
    fn max_delay(&self) -> f64;
}

/// Step-size and tolerance settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepperConfig {
    pub h_init: f64,
    /// Hard cap on the step. When the minimum lag `τ_m` is positive the
    /// effective cap is additionally held below `τ_m`.
    pub h_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    /// Clip negative overshoots down to `−atol`, reject larger ones.
    pub positivity_guard: bool,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { h_init: 1e-3, h_max: 0.1, rtol: 1e-9, atol: 1e-11, t_end: 50.0, positivity_guard: true }
    }
}

impl StepperConfig {
    pub fn new(t_end: f64) -> Self {
        Self { t_end, ..Self::default() }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self.h_init = self.h_init.min(h_max);
        self
    }

    fn check(&self) -> Result<(), String> {
        if !(self.h_init > 0.0 && self.h_init <= self.h_max) {
            return Err(format!("need 0 < h_init <= h_max (h_init = {}, h_max = {})", self.h_init, self.h_max));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err("rtol and atol must be positive".into());
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(format!("t_end must be positive and finite (got {})", self.t_end));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError<const N: usize> {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64, partial: Box<DenseOutput<N>> },
    #[error("component {component} reached {value} at t = {t}, below the positivity guard")]
    Positivity { t: f64, component: usize, value: f64, partial: Box<DenseOutput<N>> },
    #[error("lagged time {s} requested at t = {t} lies before the history interval")]
    LagOutOfRange { t: f64, s: f64 },
}

impl<const N: usize> EngineError<N> {
    pub fn partial(&self) -> Option<&DenseOutput<N>> {
        match self {
            Self::StepUnderflow { partial, .. } | Self::Positivity { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

// Dormand–Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_LAG_PASSES: usize = 5;
const LAG_CONTRACTION_TOL: f64 = 1e-10;
const MAX_GUARD_REJECTIONS: usize = 12;

struct Provisional<const N: usize> {
    t0: f64,
    u0: [f64; N],
    f0: [f64; N],
    t1: f64,
    u1: [f64; N],
    f1: [f64; N],
}

impl<const N: usize> Provisional<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        hermite(self.t0, &self.u0, &self.f0, self.t1, &self.u1, &self.f1, t)
    }
}

struct Ctx<'a, S, const N: usize> {
    sys: &'a S,
    dense: DenseOutput<N>,
    tau_max: f64,
}

impl<S: DelaySystem<N>, const N: usize> Ctx<'_, S, N> {
    /// Stage derivative. Returns the slope and whether the lag fell inside
    /// the step being attempted.
    fn stage(
        &self,
        t: f64,
        u: &[f64; N],
        provisional: &Provisional<N>,
    ) -> Result<([f64; N], bool), EngineError<N>> {
        let s = t - self.sys.delay(u);
        let t_known = self.dense.t_end();
        let (lagged, inside) = if s <= 0.0 {
            if s < -self.tau_max * (1.0 + 1e-12) - 1e-12 {
                return Err(EngineError::LagOutOfRange { t, s });
            }
            (self.sys.history(s), false)
        } else if s <= t_known {
            (self.dense.eval(s).expect("s within accepted range"), false)
        } else {
            (provisional.eval(s), true)
        };
        Ok((self.sys.derivative(t, u, s, &lagged), inside))
    }
}

struct Attempt<const N: usize> {
    u_new: [f64; N],
    f_new: [f64; N],
    err: f64,
}

/// Integrates `sys` on `[0, cfg.t_end]`.
///
/// Embedded Dormand–Prince 5(4) pair with first-same-as-last, local
/// extrapolation and a standard I-controller. Each stage evaluates its lag
/// from its own stage state. When a lag lands inside the step being taken
/// (possible only if `τ_m` is zero) the step is repeated with the lagged
/// values drawn from the step's own Hermite interpolant, up to five passes
/// or until the end state moves by less than `1e−10` relative.
pub fn integrate_system<S, const N: usize>(sys: &S, cfg: &StepperConfig) -> Result<DenseOutput<N>, EngineError<N>>
where
    S: DelaySystem<N>,
{
    cfg.check().map_err(EngineError::InvalidConfig)?;
    let tau_min = sys.min_delay();
    let h_cap = if tau_min > 0.0 { cfg.h_max.min(0.999 * tau_min) } else { cfg.h_max };
    let t_end = cfg.t_end;
    let h_floor = 1e-12 * t_end;

    let u0 = sys.history(0.0);
    let mut ctx = Ctx { sys, dense: DenseOutput::start(u0, [0.0; N]), tau_max: sys.max_delay() };
    let seed = Provisional { t0: 0.0, u0, f0: [0.0; N], t1: 0.0, u1: u0, f1: [0.0; N] };
    let (f0, _) = ctx.stage(0.0, &u0, &seed)?;
    ctx.dense.slopes[0] = f0;

    let mut t = 0.0;
    let mut u = u0;
    let mut f = f0;
    let mut h = cfg.h_init.min(h_cap);
    let mut guard_rejections = 0usize;
    let mut last_rejected = false;

    while t < t_end {
        if t + h >= t_end - 1e-14 * t_end {
            h = t_end - t;
        }
        if h < h_floor {
            return Err(EngineError::StepUnderflow { t, h, partial: Box::new(ctx.dense) });
        }

        let attempt = attempt_step(&ctx, t, &u, &f, h, cfg)?;
        if !(attempt.err <= 1.0) {
            ctx.dense.rejected_steps += 1;
            let fac = if attempt.err.is_finite() { (0.9 * attempt.err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.1 };
            h *= fac;
            last_rejected = true;
            continue;
        }

        let mut u_new = attempt.u_new;
        let mut f_new = attempt.f_new;
        if cfg.positivity_guard {
            let mut clipped = false;
            let mut violation = None;
            for (i, v) in u_new.iter_mut().enumerate() {
                if *v < 0.0 {
                    if *v >= -cfg.atol {
                        *v = 0.0;
                        clipped = true;
                    } else {
                        violation = Some((i, *v));
                    }
                }
            }
            if let Some((component, value)) = violation {
                guard_rejections += 1;
                if guard_rejections > MAX_GUARD_REJECTIONS {
                    return Err(EngineError::Positivity {
                        t: t + h,
                        component,
                        value,
                        partial: Box::new(ctx.dense),
                    });
                }
                ctx.dense.rejected_steps += 1;
                h *= 0.25;
                last_rejected = true;
                continue;
            }
            if clipped {
                let t_new = t + h;
                let prov = Provisional { t0: t, u0: u, f0: f, t1: t_new, u1: u_new, f1: f_new };
                f_new = ctx.stage(t_new, &u_new, &prov)?.0;
            }
        }
        guard_rejections = 0;

        t = if h == t_end - t { t_end } else { t + h };
        u = u_new;
        f = f_new;
        ctx.dense.push(t, u, f);

        let err = attempt.err.max(1e-10);
        let mut fac = 0.9 * err.powf(-0.2);
        fac = fac.clamp(0.2, if last_rejected { 1.0 } else { 5.0 });
        last_rejected = false;
        h = (h * fac).min(h_cap);
    }
    Ok(ctx.dense)
}

fn attempt_step<S: DelaySystem<N>, const N: usize>(
    ctx: &Ctx<'_, S, N>,
    t: f64,
    u: &[f64; N],
    f: &[f64; N],
    h: f64,
    cfg: &StepperConfig,
) -> Result<Attempt<N>, EngineError<N>> {
    let mut prov = Provisional { t0: t, u0: *u, f0: *f, t1: t + h, u1: [0.0; N], f1: *f };
    for i in 0..N {
        prov.u1[i] = u[i] + h * f[i];
    }
    let mut previous: Option<[f64; N]> = None;
    let mut out = None;
    for _pass in 0..MAX_LAG_PASSES {
        let mut k = [[0.0; N]; 7];
        k[0] = *f;
        let mut touched = false;
        for s in 1..7 {
            let mut us = *u;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        us[i] += h * a * kj[i];
                    }
                }
            }
            let (ks, inside) = ctx.stage(t + C[s] * h, &us, &prov)?;
            touched |= inside;
            k[s] = ks;
        }
        // stage 7 is evaluated at the 5th-order solution (FSAL)
        let mut u_new = *u;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[6][j];
            if a != 0.0 {
                for i in 0..N {
                    u_new[i] += h * a * kj[i];
                }
            }
        }
        // k[6] was computed from exactly this combination
        let f_new = k[6];
        let mut acc = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = cfg.atol + cfg.rtol * u[i].abs().max(u_new[i].abs());
            let r = h * e / sc;
            acc += r * r;
        }
        let err = if u_new.iter().all(|v| v.is_finite()) { (acc / N as f64).sqrt() } else { f64::INFINITY };
        out = Some(Attempt { u_new, f_new, err });
        if !touched {
            break;
        }
        if let Some(prev) = previous {
            let moved = (0..N)
                .map(|i| (u_new[i] - prev[i]).abs() / u_new[i].abs().max(1.0))
                .fold(0.0, f64::max);
            if moved <= LAG_CONTRACTION_TOL {
                break;
            }
        }
        previous = Some(u_new);
        prov.u1 = u_new;
        prov.f1 = f_new;
    }
    Ok(out.expect("at least one pass"))
}
