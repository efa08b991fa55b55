use std::io::{self, Write};

use super::dense::DenseOutput;
use super::system::{rates_with_lag, State};
use super::LookupError;
use crate::model::{HistoryFunction, ModelSpec};
use crate::quadrature;

/// Solution record on `[−τ_M, t_end]`: the history followed by one cubic
/// Hermite segment per accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    spec: ModelSpec,
    history: HistoryFunction,
    dense: DenseOutput<3>,
    tau: Vec<f64>,
    lag_s: Vec<f64>,
    correction: Vec<f64>,
    min_stage_correction: f64,
}

impl Trajectory {
    pub(crate) fn assemble(
        spec: &ModelSpec,
        history: &HistoryFunction,
        dense: DenseOutput<3>,
        min_stage_correction: f64,
    ) -> Self {
        let mut traj = Self {
            spec: spec.clone(),
            history: history.clone(),
            dense,
            tau: Vec::new(),
            lag_s: Vec::new(),
            correction: Vec::new(),
            min_stage_correction,
        };
        let n = traj.dense.times.len();
        let (mut tau, mut lag_s, mut corr) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let t = traj.dense.times[i];
            let u = traj.dense.values[i];
            let ti = spec.delay.tau(u[1].max(0.0));
            let s = t - ti;
            let (xl, yl) = traj.state_pair(s).unwrap_or((f64::NAN, f64::NAN));
            let r = rates_with_lag(spec, &State::from_array(t, &u), s, xl, yl);
            tau.push(ti);
            lag_s.push(s);
            corr.push(r.correction);
        }
        traj.tau = tau;
        traj.lag_s = lag_s;
        traj.correction = corr;
        traj
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn history(&self) -> &HistoryFunction {
        &self.history
    }

    pub fn dense(&self) -> &DenseOutput<3> {
        &self.dense
    }

    pub fn t_end(&self) -> f64 {
        self.dense.t_end()
    }

    /// Earliest time covered, `−τ_M`.
    pub fn t_start(&self) -> f64 {
        -self.spec.delay.tau_max()
    }

    /// Accepted step endpoints as states (including `t = 0`).
    pub fn nodes(&self) -> impl Iterator<Item = State> + '_ {
        self.dense.times.iter().zip(&self.dense.values).map(|(&t, u)| State::from_array(t, u))
    }

    pub fn final_state(&self) -> State {
        let i = self.dense.times.len() - 1;
        State::from_array(self.dense.times[i], &self.dense.values[i])
    }

    /// `τ(y)` at each node.
    pub fn node_tau(&self) -> &[f64] {
        &self.tau
    }

    /// `t − τ(y(t))` at each node.
    pub fn node_lag(&self) -> &[f64] {
        &self.lag_s
    }

    /// Correction factor at each node.
    pub fn node_correction(&self) -> &[f64] {
        &self.correction
    }

    /// Smallest correction factor seen at any stage evaluation, rejected
    /// stages included.
    pub fn min_stage_correction(&self) -> f64 {
        self.min_stage_correction
    }

    /// Whether `t − τ(y(t))` strictly increases from node to node.
    pub fn lag_strictly_increasing(&self) -> bool {
        self.lag_s.windows(2).all(|w| w[1] > w[0])
    }

    /// State at any `t ∈ [−τ_M, t_end]`.
    pub fn state_at(&self, t: f64) -> Result<State, LookupError> {
        let u = self.eval(t)?;
        Ok(State::from_array(t, &u))
    }

    fn eval(&self, t: f64) -> Result<[f64; 3], LookupError> {
        let lo = self.t_start();
        let hi = self.t_end();
        if t < 0.0 {
            if t < lo - 1e-12 * lo.abs().max(1.0) {
                return Err(LookupError::OutOfRange { t, lo, hi });
            }
            return Ok(self.history.eval(t));
        }
        self.dense.eval(t).ok_or(LookupError::OutOfRange { t, lo, hi })
    }

    fn state_pair(&self, s: f64) -> Result<(f64, f64), LookupError> {
        self.eval(s).map(|u| (u[0], u[1]))
    }

    /// `(x, y)` at the lagged time `t − τ(y_now)`.
    pub fn lagged_lookup(&self, t: f64, y_now: f64) -> Result<(f64, f64), LookupError> {
        self.state_pair(t - self.spec.delay.tau(y_now.max(0.0)))
    }

    /// Juveniles alive at `t` reconstructed from the recruitment history:
    /// `∫_{t−τ(y(t))}^{t} n f(x(s), y(s)) y(s) e^{−d_j (t−s)} ds`.
    ///
    /// Independent of the juvenile channel; quadrature breaks are placed at
    /// the step nodes and at `0`.
    pub fn yj_integral(&self, t: f64) -> Result<f64, LookupError> {
        if !(0.0..=self.t_end()).contains(&t) {
            return Err(LookupError::OutOfRange { t, lo: 0.0, hi: self.t_end() });
        }
        let y_t = self.eval(t)?[1];
        let lo = t - self.spec.delay.tau(y_t.max(0.0));
        if lo < self.t_start() - 1e-12 {
            return Err(LookupError::OutOfRange { t: lo, lo: self.t_start(), hi: self.t_end() });
        }
        if lo >= t {
            return Ok(0.0);
        }
        let times = &self.dense.times;
        let mut breaks = vec![lo];
        if lo < 0.0 && t > 0.0 {
            breaks.push(0.0);
        }
        let a = times.partition_point(|&s| s <= lo.max(0.0));
        let b = times.partition_point(|&s| s < t).max(a);
        breaks.extend(times[a..b].iter().copied().filter(|&s| s > lo && s < t && s > 0.0));
        breaks.push(t);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let p = self.spec.params;
        let res = quadrature::integrate_with_breaks(
            |s| {
                let u = self.eval(s).unwrap_or([0.0; 3]);
                let (x, y) = (u[0].max(0.0), u[1].max(0.0));
                p.n * self.spec.response.rate(x, y) * y * (-p.dj * (t - s)).exp()
            },
            &breaks,
            1e-300,
            1e-12,
        );
        Ok(res.value)
    }

    /// Writes `t,x,y,yj,tau,lag_s,correction` for every `stride`-th node and
    /// the final node. Floats use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W, stride: usize) -> io::Result<()> {
        let stride = stride.max(1);
        writeln!(w, "t,x,y,yj,tau,lag_s,correction")?;
        let last = self.dense.times.len() - 1;
        for i in (0..=last).filter(|i| i % stride == 0 || *i == last) {
            let u = self.dense.values[i];
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                self.dense.times[i], u[0], u[1], u[2], self.tau[i], self.lag_s[i], self.correction[i]
            )?;
        }
        Ok(())
    }
}
