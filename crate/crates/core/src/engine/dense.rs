/// Cubic Hermite interpolation on `[t0, t1]` from end values and slopes.
#[inline]
pub fn hermite<const N: usize>(
    t0: f64,
    u0: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    u1: &[f64; N],
    f1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * u0[i] + h10 * h * f0[i] + h01 * u1[i] + h11 * h * f1[i];
    }
    out
}

/// Piecewise cubic Hermite record of a solution on `[0, t_end]`.
///
/// Node `i` stores the accepted state and its derivative; segment `i` spans
/// nodes `i` and `i + 1`. Neighbouring segments share their end node, so the
/// interpolant is continuous with continuous first derivative.
#[derive(Debug, Clone)]
pub struct DenseOutput<const N: usize> {
    pub(crate) times: Vec<f64>,
    pub(crate) values: Vec<[f64; N]>,
    pub(crate) slopes: Vec<[f64; N]>,
    pub(crate) rejected_steps: usize,
}

impl<const N: usize> DenseOutput<N> {
    pub(crate) fn start(u0: [f64; N], f0: [f64; N]) -> Self {
        Self { times: vec![0.0], values: vec![u0], slopes: vec![f0], rejected_steps: 0 }
    }

    pub(crate) fn push(&mut self, t: f64, u: [f64; N], f: [f64; N]) {
        self.times.push(t);
        self.values.push(u);
        self.slopes.push(f);
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("dense output always has a node")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[[f64; N]] {
        &self.values
    }

    pub fn slopes(&self) -> &[[f64; N]] {
        &self.slopes
    }

    /// Number of accepted steps.
    pub fn accepted_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected_steps
    }

    /// Evaluates the interpolant; `None` outside `[0, t_end]`.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let last = self.times.len() - 1;
        if !(t >= 0.0) || t > self.times[last] {
            return None;
        }
        if last == 0 {
            return Some(self.values[0]);
        }
        let i = self.segment_index(t);
        Some(hermite(
            self.times[i],
            &self.values[i],
            &self.slopes[i],
            self.times[i + 1],
            &self.values[i + 1],
            &self.slopes[i + 1],
            t,
        ))
    }

    /// Segment containing `t` (the last one containing it, so exact node
    /// hits evaluate from the right except at `t_end`).
    pub(crate) fn segment_index(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.saturating_sub(1).min(self.times.len() - 2)
    }
}
