//! Root location for characteristic functions by argument-principle
//! counting on rectangles, recursive subdivision and Newton refinement.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::characteristic::Characteristic;
use crate::roots::bisect;

/// Search rectangle `[re_min, re_max] × [0, im_max]` in the upper half
/// plane; conjugate roots are added afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl SearchBox {
    /// Box whose right edge exceeds every root's real part and whose top
    /// edge exceeds every root's modulus in the half plane `Re ≥ re_min`.
    ///
    /// If the modulus bound explodes (long lag, very negative `re_min`) the
    /// left edge is moved right until the top edge is at most `IM_CAP`.
    pub fn covering<C: Characteristic + ?Sized>(ch: &C, re_min: f64) -> Self {
        const IM_CAP: f64 = 400.0;
        let re_max = 1.0 + ch.modulus_bound(0.0);
        let mut re_min = re_min.min(-0.05);
        let mut im_max = 1.0 + 1.01 * ch.modulus_bound(re_min);
        while im_max > IM_CAP && re_min < -0.05 {
            re_min *= 0.5;
            im_max = 1.0 + 1.01 * ch.modulus_bound(re_min);
        }
        Self { re_min, re_max, im_max }
    }

    /// Default box: left edge at `−(1 + ρ)` with `ρ` the modulus bound for
    /// the closed right half plane.
    pub fn default_for<C: Characteristic + ?Sized>(ch: &C) -> Self {
        Self::covering(ch, -(1.0 + ch.modulus_bound(0.0)))
    }
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    #[serde(serialize_with = "ser_complex")]
    pub lambda: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Largest real part among the roots found; `−∞` when the box holds no
    /// root, in which case every root has real part below `search.re_min`.
    pub abscissa: f64,
    /// `|Im λ|` of the rightmost root (0 when none).
    pub rightmost_im: f64,
    /// All roots in the box and their conjugates, rightmost first.
    pub roots: Vec<Root>,
    pub search: SearchBox,
    /// Number of contour perturbations needed.
    pub retries: usize,
}

impl Spectrum {
    pub fn rightmost(&self) -> Option<Complex64> {
        self.roots.first().map(|r| r.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("winding count unstable after {attempts} contour perturbations")]
    ContourUnstable { attempts: usize },
    #[error("root refinement failed inside [{re0}, {re1}] x [{im0}, {im1}]")]
    Refinement { re0: f64, re1: f64, im0: f64, im1: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }
}

#[derive(Debug)]
struct OnContour;

const NEWTON_TOL: f64 = 1e-10;
const MAX_PERTURB: usize = 5;
const PERTURB: f64 = 1e-6;
const SPLIT: f64 = 0.5 + 0.013_7;

/// Net change of `arg G` along the segment `a → b`, refined adaptively so
/// that no sampled increment exceeds `π/4`.
fn arg_change<C: Characteristic + ?Sized>(ch: &C, a: Complex64, b: Complex64, samples: usize) -> Result<f64, OnContour> {
    let value = |z: Complex64| -> Result<Complex64, OnContour> {
        let g = ch.eval(z);
        if !(g.norm() > 1e-13 * ch.scale(z)) {
            return Err(OnContour);
        }
        Ok(g)
    };
    fn piece(
        value: &dyn Fn(Complex64) -> Result<Complex64, OnContour>,
        za: Complex64,
        ga: Complex64,
        zb: Complex64,
        gb: Complex64,
        depth: usize,
    ) -> Result<f64, OnContour> {
        let d = (gb / ga).arg();
        if d.abs() <= FRAC_PI_4 {
            return Ok(d);
        }
        if depth > 40 {
            return Err(OnContour);
        }
        let zm = 0.5 * (za + zb);
        let gm = value(zm)?;
        Ok(piece(value, za, ga, zm, gm, depth + 1)? + piece(value, zm, gm, zb, gb, depth + 1)?)
    }
    let n = samples.max(2);
    let mut total = 0.0;
    let mut zp = a;
    let mut gp = value(a)?;
    for k in 1..=n {
        let z = a + (b - a) * (k as f64 / n as f64);
        let g = value(z)?;
        total += piece(&value, zp, gp, z, g, 0)?;
        zp = z;
        gp = g;
    }
    Ok(total)
}

/// Number of zeros inside `r` by the argument principle.
fn count<C: Characteristic + ?Sized>(ch: &C, r: &Rect) -> Result<usize, OnContour> {
    let tau = ch.lag();
    let corners = [
        Complex64::new(r.re0, r.im0),
        Complex64::new(r.re1, r.im0),
        Complex64::new(r.re1, r.im1),
        Complex64::new(r.re0, r.im1),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let len = (b - a).norm();
        // resolve the oscillation of e^{−λτ} along horizontal edges
        let samples = 8 + (len * (1.0 + tau) * 2.0) as usize;
        total += arg_change(ch, a, b, samples.min(20_000))?;
    }
    let w = total / TAU;
    let k = w.round();
    if (w - k).abs() > 0.1 || k < 0.0 {
        return Err(OnContour);
    }
    Ok(k as usize)
}

fn newton<C: Characteristic + ?Sized>(ch: &C, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..80 {
        let g = ch.eval(z);
        let dg = ch.derivative(z);
        if dg.norm() == 0.0 || !dg.is_finite() {
            return None;
        }
        let step = g / dg;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    let g = ch.eval(z);
    let step = (g / ch.derivative(z)).norm();
    (step <= NEWTON_TOL * z.norm().max(1.0)).then_some(z)
}

fn split(r: &Rect, ratio: f64) -> (Rect, Rect) {
    if r.re1 - r.re0 >= r.im1 - r.im0 {
        let m = r.re0 + ratio * (r.re1 - r.re0);
        (Rect { re1: m, ..*r }, Rect { re0: m, ..*r })
    } else {
        let m = r.im0 + ratio * (r.im1 - r.im0);
        (Rect { im1: m, ..*r }, Rect { im0: m, ..*r })
    }
}

enum Failure {
    Contour,
    Refine(Rect),
}

fn locate<C: Characteristic + ?Sized>(
    ch: &C,
    r: Rect,
    n: usize,
    out: &mut Vec<Root>,
    depth: usize,
) -> Result<(), Failure> {
    if n == 0 {
        return Ok(());
    }
    let diam = r.diameter();
    if n == 1 || diam < 1e-7 {
        let starts = [
            r.center(),
            Complex64::new(r.re0, r.im0),
            Complex64::new(r.re1, r.im1),
            Complex64::new(r.re0, r.im1),
            Complex64::new(r.re1, r.im0),
        ];
        for z0 in starts {
            if let Some(z) = newton(ch, z0) {
                if r.contains(z, 1e-9 * z.norm().max(1.0)) {
                    out.push(Root { lambda: z, multiplicity: n });
                    return Ok(());
                }
            }
        }
        if diam < 1e-9 || depth > 200 {
            return Err(Failure::Refine(r));
        }
    }
    let mut last = Failure::Contour;
    for attempt in 0..MAX_PERTURB {
        let ratio = SPLIT + 0.031 * attempt as f64;
        let (a, b) = split(&r, ratio);
        let (na, nb) = match (count(ch, &a), count(ch, &b)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => continue,
        };
        if na + nb != n {
            continue;
        }
        match locate(ch, a, na, out, depth + 1).and_then(|_| locate(ch, b, nb, out, depth + 1)) {
            Ok(()) => return Ok(()),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// All roots in `search` (plus conjugates) and the rightmost real part.
///
/// The bottom edge is placed slightly below the real axis so that real
/// roots are interior. A root on the contour perturbs the box outward by
/// `1e−6` per attempt, at most five times.
pub fn rightmost_abscissa<C: Characteristic + ?Sized>(
    ch: &C,
    search: SearchBox,
) -> Result<Spectrum, SpectrumError> {
    let mut retries = 0;
    loop {
        let p = PERTURB * retries as f64;
        let r = Rect {
            re0: search.re_min - p,
            re1: search.re_max + p,
            im0: -0.0173 - p,
            im1: search.im_max + p,
        };
        let attempt = count(ch, &r).map_err(|_| Failure::Contour).and_then(|n| {
            let mut found = Vec::new();
            locate(ch, r, n, &mut found, 0).map(|_| found)
        });
        match attempt {
            Ok(found) => return Ok(assemble(found, search, retries)),
            Err(Failure::Refine(q)) if retries >= MAX_PERTURB => {
                return Err(SpectrumError::Refinement { re0: q.re0, re1: q.re1, im0: q.im0, im1: q.im1 })
            }
            Err(_) if retries >= MAX_PERTURB => return Err(SpectrumError::ContourUnstable { attempts: retries }),
            Err(_) => retries += 1,
        }
    }
}

fn assemble(found: Vec<Root>, search: SearchBox, retries: usize) -> Spectrum {
    let mut upper: Vec<Root> = Vec::new();
    for mut root in found {
        let z = &mut root.lambda;
        if z.im < 0.0 {
            *z = z.conj();
        }
        if z.im <= 1e-12 * z.norm().max(1.0) {
            z.im = 0.0;
        }
        if let Some(other) = upper.iter_mut().find(|o| (o.lambda - root.lambda).norm() <= 1e-8 * root.lambda.norm().max(1.0)) {
            other.multiplicity = other.multiplicity.max(root.multiplicity);
        } else {
            upper.push(root);
        }
    }
    let mut roots = Vec::with_capacity(2 * upper.len());
    for r in upper {
        roots.push(r);
        if r.lambda.im > 0.0 {
            roots.push(Root { lambda: r.lambda.conj(), multiplicity: r.multiplicity });
        }
    }
    roots.sort_by(|a, b| b.lambda.re.total_cmp(&a.lambda.re).then(b.lambda.im.total_cmp(&a.lambda.im)));
    let (abscissa, rightmost_im) = roots.first().map_or((f64::NEG_INFINITY, 0.0), |r| (r.lambda.re, r.lambda.im.abs()));
    Spectrum { abscissa, rightmost_im, roots, search, retries }
}

/// Positive real root of a characteristic function with `G(0) < 0`, by
/// bisection on the real axis.
pub fn positive_real_root<C: Characteristic + ?Sized>(ch: &C) -> Option<f64> {
    let g = |x: f64| ch.eval(Complex64::from(x)).re;
    if !(g(0.0) < 0.0) {
        return None;
    }
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    bisect(g, 0.0, hi, 300)
}
