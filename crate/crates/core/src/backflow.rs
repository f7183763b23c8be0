//! Bracken–Melloy backflow: the symmetric eigenproblem for the largest
//! probability backflow, the a + b/√X extrapolation, and the explicit
//! right-moving wavepacket.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::kernels::SamplingFamily;
use crate::numerics::{clenshaw_curtis, repeated_panels, sinc, QuadratureRule};
use crate::operator_lab::{discretize_on, extreme_eigenvalue_with, EigenStrategy, KernelFunction, Which};

/// Symmetrized kernel in x = u²:
/// `K̃(x,y) = -(1/π) sin(x-y) / ((√x-√y) 2 (xy)^{1/4})`, diagonal `-1/π`.
pub fn bm_kernel_eval(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return invalid(format!("backflow kernel needs positive arguments, got ({x}, {y})"));
    }
    // sin(x-y)/(√x-√y) = (√x+√y) sinc(x-y), free of cancellation
    let sigma = x.sqrt() + y.sqrt();
    Ok(-sigma * sinc(x - y) / (2.0 * PI * (x * y).sqrt().sqrt()))
}

/// Unsymmetrized kernel `-(1/π) sin(u²-v²)/(u-v)`.
pub fn bm_kernel_u(u: f64, v: f64) -> f64 {
    -(u + v) * sinc((u - v) * (u + v)) / PI
}

pub fn bm_kernel() -> KernelFunction {
    KernelFunction::new("backflow", true, bm_kernel_u)
}

const HEAD_X: f64 = 16.0;
const HEAD_INTERVALS: usize = 32;
const TAIL_PANEL: f64 = 64.0;

/// Nyström rule in u for the truncation x ∈ [0, X]: Clenshaw–Curtis in u on
/// the head x ∈ [0, 16], then panels of width about 64 in x. `density` is
/// nodes per unit of x on the tail.
pub fn bm_rule(x_max: f64, density: f64) -> Result<QuadratureRule> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return invalid(format!("X must be positive, got {x_max}"));
    }
    if !(density > 0.0) {
        return invalid("node density must be positive");
    }
    if x_max <= 3.0 * HEAD_X {
        let n = HEAD_INTERVALS.max((density * x_max).ceil() as usize);
        return repeated_panels(&clenshaw_curtis(n)?, 1, 0.0, x_max.sqrt());
    }
    let head = repeated_panels(&clenshaw_curtis(HEAD_INTERVALS)?, 1, 0.0, HEAD_X.sqrt())?;
    let span = x_max - HEAD_X;
    let c = ((span / TAIL_PANEL).round() as usize).max(1);
    let n = ((density * span / c as f64).ceil() as usize).max(2);
    let tail = repeated_panels(&clenshaw_curtis(n)?, c, HEAD_X, x_max)?;

    let mut nodes = head.nodes().to_vec();
    let mut weights = head.weights().to_vec();
    for (i, (&x, &w)) in tail.nodes().iter().zip(tail.weights()).enumerate() {
        let u = x.sqrt();
        let wu = w / (2.0 * u);
        if i == 0 {
            *weights.last_mut().expect("head nonempty") += wu;
        } else {
            nodes.push(u);
            weights.push(wu);
        }
    }
    QuadratureRule::new(nodes, weights, (0.0, x_max.sqrt()))
}

/// One point of the λ(X) sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPoint {
    pub x_max: f64,
    pub nodes: usize,
    pub lambda: f64,
}

/// Largest eigenvalue of the backflow operator truncated to [0, X]. `nodes`
/// defaults to ⌈X/2⌉ and sets the node density X-wise.
pub fn lambda_of_x(x_max: f64, nodes: Option<usize>) -> Result<LambdaPoint> {
    let target = nodes.unwrap_or((x_max / 2.0).ceil() as usize);
    if target == 0 {
        return invalid("node count must be positive");
    }
    let rule = bm_rule(x_max, target as f64 / x_max)?;
    let op = discretize_on(&bm_kernel(), rule)?;
    let lambda = extreme_eigenvalue_with(op.matrix(), Which::Max, EigenStrategy::Lanczos)?;
    Ok(LambdaPoint { x_max, nodes: op.dim(), lambda })
}

/// Least-squares fit of `a + b/√X`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub residuals: Vec<f64>,
    /// Largest |residual / value| in percent.
    pub max_pct_residual: f64,
}

impl FitResult {
    pub fn eval(&self, x: f64) -> f64 {
        self.a + self.b / x.sqrt()
    }
}

pub fn fit_inverse_sqrt(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    if xs.iter().any(|x| !(*x > 0.0)) {
        return invalid("fit abscissae must be positive");
    }
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("repeated X values".into()));
    }
    let n = points.len() as f64;
    let t: Vec<f64> = points.iter().map(|p| 1.0 / p.0.sqrt()).collect();
    let tm = t.iter().sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = t.iter().map(|ti| (ti - tm).powi(2)).sum();
    if stt <= 1e-300 {
        return Err(Error::DegenerateFit("design matrix is singular".into()));
    }
    let sty: f64 = t.iter().zip(points).map(|(ti, p)| (ti - tm) * (p.1 - ym)).sum();
    let b = sty / stt;
    let a = ym - b * tm;
    let residuals: Vec<f64> = t.iter().zip(points).map(|(ti, p)| p.1 - (a + b * ti)).collect();
    let max_pct_residual = residuals
        .iter()
        .zip(points)
        .map(|(r, p)| if *r == 0.0 { 0.0 } else { 100.0 * (r / p.1).abs() })
        .fold(0.0, f64::max);
    Ok(FitResult { a, b, residuals, max_pct_residual })
}

/// Right-moving packet `ψ̂(k) = N (√3 (k - boost) - k0)` on `[boost, boost + k0]`.
/// A nonzero boost is the momentum translate, i.e. `e^{i boost x} ψ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavepacket {
    pub k0: f64,
    pub boost: f64,
}

impl Wavepacket {
    pub fn new(k0: f64) -> Result<Self> {
        if !(k0 > 0.0) || !k0.is_finite() {
            return invalid(format!("k0 must be positive, got {k0}"));
        }
        Ok(Self { k0, boost: 0.0 })
    }

    pub fn boosted(self, boost: f64) -> Result<Self> {
        if !(boost >= 0.0) {
            return invalid("a boost must keep the state right-moving");
        }
        Ok(Self { boost, ..self })
    }

    pub fn norm_constant(&self) -> f64 {
        (self.k0.powi(3) * (2.0 - 3f64.sqrt()) / (2.0 * PI)).powf(-0.5)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.boost, self.boost + self.k0)
    }

    pub fn amplitude(&self, k: f64) -> f64 {
        let (lo, hi) = self.support();
        if k < lo || k > hi {
            0.0
        } else {
            self.norm_constant() * (3f64.sqrt() * (k - self.boost) - self.k0)
        }
    }

    fn rule(&self, phase_span: f64) -> QuadratureRule {
        // at least 20 nodes per oscillation of the phase
        let oscillations = phase_span / (2.0 * PI);
        let c = ((20.0 * oscillations / 32.0).ceil() as usize).max(2);
        let (lo, hi) = self.support();
        repeated_panels(&clenshaw_curtis(32).expect("n > 0"), c, lo, hi).expect("valid support")
    }

    /// (1/2π)∫|ψ̂|² dk.
    pub fn norm(&self) -> f64 {
        self.rule(0.0).integrate(|k| self.amplitude(k).powi(2)) / (2.0 * PI)
    }

    /// `(ψ_t(x), ∂_x ψ_t(x))` under free evolution.
    pub fn psi_and_derivative(&self, x: f64, t: f64, hbar: f64, mass: f64) -> (Complex64, Complex64) {
        let (_, hi) = self.support();
        let c = hbar * t / (2.0 * mass);
        let span = hi * x.abs() + c.abs() * hi * hi;
        let rule = self.rule(span);
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (&k, &w) in rule.nodes().iter().zip(rule.weights()) {
            let e = Complex64::from_polar(w * self.amplitude(k), k * x - c * k * k);
            psi += e;
            dpsi += Complex64::new(0.0, k) * e;
        }
        (psi / (2.0 * PI), dpsi / (2.0 * PI))
    }

    pub fn psi(&self, x: f64, t: f64, hbar: f64, mass: f64) -> Complex64 {
        self.psi_and_derivative(x, t, hbar, mass).0
    }

    /// `j(x,t) = (ħ/m) Im(ψ̄ ψ')`.
    pub fn flux(&self, x: f64, t: f64, hbar: f64, mass: f64) -> f64 {
        let (p, d) = self.psi_and_derivative(x, t, hbar, mass);
        hbar / mass * (p.conj() * d).im
    }

    /// `⟨p⟩/m = (ħ/m)(1/2π)∫ k |ψ̂|² dk`.
    pub fn mean_velocity(&self, hbar: f64, mass: f64) -> f64 {
        hbar / mass * self.rule(0.0).integrate(|k| k * self.amplitude(k).powi(2)) / (2.0 * PI)
    }
}

pub fn wavepacket_flux_at_zero(w: &Wavepacket, hbar: f64, mass: f64) -> f64 {
    w.flux(0.0, 0.0, hbar, mass)
}

/// `(ħ k0²/4πm)(1/2 - 1/√3)` for the unboosted packet.
pub fn flux_at_zero_closed_form(k0: f64, hbar: f64, mass: f64) -> f64 {
    hbar * k0 * k0 / (4.0 * PI * mass) * (0.5 - 1.0 / 3f64.sqrt())
}

/// `|ψ_t(x)|²` on the grid.
pub fn evolve_free(w: &Wavepacket, t: f64, hbar: f64, mass: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&x| w.psi(x, t, hbar, mass).norm_sqr()).collect()
}

/// Probability on the left half-line at time t.
///
/// Uses the momentum representation: for a real amplitude,
/// `P(t) = 1/2 - (c/4π²) ∬ ψ̂(k)ψ̂(k') (k+k') sinc(c(k²-k'²)) dk dk'` with
/// `c = ħt/2m`. The integrand is entire, so a tensor Clenshaw–Curtis rule
/// resolves it without any spatial tail.
pub fn left_probability(w: &Wavepacket, t: f64, hbar: f64, mass: f64) -> f64 {
    let c = hbar * t / (2.0 * mass);
    let (_, hi) = w.support();
    let rule = w.rule(c.abs() * hi * hi);
    let nodes = rule.nodes();
    let aw: Vec<f64> = nodes.iter().zip(rule.weights()).map(|(&k, &wt)| wt * w.amplitude(k)).collect();
    let mut s = 0.0;
    for (i, &k) in nodes.iter().enumerate() {
        let mut row = 0.0;
        for (j, &kp) in nodes.iter().enumerate() {
            row += aw[j] * (k + kp) * sinc(c * (k - kp) * (k + kp));
        }
        s += aw[i] * row;
    }
    (0.5 - c * s / (4.0 * PI * PI)).clamp(0.0, 1.0)
}

/// `∫ j_ψ(x) f_λ(x) dx` at t = 0 through the J kernel:
/// `(ħ/m)(1/4π²) ∬ ψ̂(k)ψ̂(k') (k+k')/2 f̂_λ(k-k') dk dk'`.
pub fn smeared_flux(w: &Wavepacket, family: &SamplingFamily, hbar: f64, mass: f64) -> f64 {
    let (_, hi) = w.support();
    let rule = w.rule(family.width() * hi);
    let nodes = rule.nodes();
    let aw: Vec<f64> = nodes.iter().zip(rule.weights()).map(|(&k, &wt)| wt * w.amplitude(k)).collect();
    let mut s = 0.0;
    for (i, &k) in nodes.iter().enumerate() {
        for (j, &kp) in nodes.iter().enumerate() {
            s += aw[i] * aw[j] * 0.5 * (k + kp) * family.fhat(k - kp);
        }
    }
    hbar / mass * s / (4.0 * PI * PI)
}
