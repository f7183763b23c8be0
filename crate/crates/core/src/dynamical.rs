//! Dynamical quantum inequalities: time-averaged densities along the
//! evolution generated by a Hamiltonian, bounded through the spectral
//! measure at a point.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::kernels::SamplingFamily;
use crate::numerics::{integrate_adaptive, integrate_semi_infinite, oscillator_eigenfunctions, Decay};

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Hermitian matrix on a finite configuration space with counting measure.
    Finite,
    /// Harmonic oscillator cut off at a finite level.
    TruncatedOscillator,
}

/// Eigenvalues and eigenfunction values at a set of evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    energies: Vec<f64>,
    /// `phi[n][i] = φ_n(points[i])`.
    phi: Vec<Vec<Complex64>>,
    points: Vec<f64>,
    kind: ModelKind,
    hbar: f64,
}

impl SpectralModel {
    /// Diagonalizes a Hermitian matrix given row-major. Evaluation points are
    /// the site indices.
    pub fn from_hermitian(h: &[Complex64], n: usize, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return invalid("ħ must be positive");
        }
        let (energies, vecs) = hermitian_eigen(h, n)?;
        let phi = (0..n).map(|k| (0..n).map(|x| vecs[x * n + k]).collect()).collect();
        Ok(Self { energies, phi, points: (0..n).map(|i| i as f64).collect(), kind: ModelKind::Finite, hbar })
    }

    /// Levels `E_n = ħω(n + 1/2)` for n ≤ n_max with exact Hermite values.
    pub fn oscillator(n_max: usize, points: &[f64], hbar: f64, omega: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(omega > 0.0) || !(mass > 0.0) {
            return invalid("ħ, ω and m must be positive");
        }
        let beta = (mass * omega / hbar).sqrt();
        let amp = beta.sqrt();
        let mut phi = vec![vec![Complex64::new(0.0, 0.0); points.len()]; n_max + 1];
        for (i, &x) in points.iter().enumerate() {
            for (n, v) in oscillator_eigenfunctions(n_max, beta * x).into_iter().enumerate() {
                phi[n][i] = Complex64::new(amp * v, 0.0);
            }
        }
        let energies = (0..=n_max).map(|n| hbar * omega * (n as f64 + 0.5)).collect();
        Ok(Self { energies, phi, points: points.to_vec(), kind: ModelKind::TruncatedOscillator, hbar })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn phi(&self, n: usize, point: usize) -> Complex64 {
        self.phi[n][point]
    }

    fn check_point(&self, point: usize) -> Result<()> {
        if point >= self.points.len() {
            return invalid(format!("point index {point} out of range"));
        }
        Ok(())
    }

    /// Point spectral measure `Σ_n |φ_n(x)|² δ_{E_n}`.
    pub fn measure(&self, point: usize) -> Result<PointSpectralMeasure> {
        self.check_point(point)?;
        let masses = self.energies.iter().zip(&self.phi).map(|(&e, p)| (e, p[point].norm_sqr())).collect();
        PointSpectralMeasure::discrete(masses, self.hbar)
    }
}

/// Spectral measure at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpectralMeasure {
    Discrete { masses: Vec<(f64, f64)>, hbar: f64 },
    /// Translation generator: density dE/(2πħ) on the whole line.
    FreeParticle { hbar: f64 },
}

impl PointSpectralMeasure {
    pub fn discrete(masses: Vec<(f64, f64)>, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return invalid("ħ must be positive");
        }
        if let Some(m) = masses.iter().find(|m| !(m.1 >= 0.0) || !m.0.is_finite()) {
            return invalid(format!("bad spectral mass {m:?}"));
        }
        Ok(Self::Discrete { masses, hbar })
    }

    pub fn hbar(&self) -> f64 {
        match self {
            Self::Discrete { hbar, .. } | Self::FreeParticle { hbar } => *hbar,
        }
    }
}

/// μ_x([lo, hi]).
pub fn mu_x(measure: &PointSpectralMeasure, lo: f64, hi: f64) -> f64 {
    match measure {
        PointSpectralMeasure::Discrete { masses, .. } => {
            masses.iter().filter(|(e, _)| *e >= lo && *e <= hi).map(|m| m.1).sum()
        }
        PointSpectralMeasure::FreeParticle { hbar } => (hi - lo).max(0.0) / (2.0 * PI * hbar),
    }
}

/// `Q₋(u) = ∫_{[a,b]} {ħu + a - E}₊ dμ` and `Q₊(u) = ∫_{[a,b]} {ħu - b + E}₊ dμ`.
pub fn q_bounds(u: f64, a: f64, b: f64, measure: &PointSpectralMeasure) -> Result<(f64, f64)> {
    if !(a <= b) {
        return invalid(format!("need a ≤ b, got [{a}, {b}]"));
    }
    match measure {
        PointSpectralMeasure::Discrete { masses, hbar } => {
            let s = hbar * u;
            let mut q = (0.0, 0.0);
            for &(e, w) in masses.iter().filter(|(e, _)| *e >= a && *e <= b) {
                q.0 += w * (s + a - e).max(0.0);
                q.1 += w * (s - b + e).max(0.0);
            }
            Ok(q)
        }
        PointSpectralMeasure::FreeParticle { hbar } => {
            let s = hbar * u;
            if s <= 0.0 {
                return Ok((0.0, 0.0));
            }
            let z = s.min(b - a);
            let q = (s * z - 0.5 * z * z) / (2.0 * PI * hbar);
            Ok((q, q))
        }
    }
}

/// `S(H - c; u) = ∫ {ħu - (E - c)}₊ dμ(E)`.
pub fn s_function(u: f64, c: f64, measure: &PointSpectralMeasure) -> Result<f64> {
    match measure {
        PointSpectralMeasure::Discrete { masses, hbar } => {
            Ok(masses.iter().map(|&(e, w)| w * (hbar * u - e + c).max(0.0)).sum())
        }
        PointSpectralMeasure::FreeParticle { .. } => {
            Err(Error::Divergent("free-particle measure has infinite mass on the negative half-line".into()))
        }
    }
}

/// |ĝ(u)|² together with what the integrators need to know about it.
pub struct FrequencyWeight {
    ghat_sq: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    decay: Decay,
    /// |ĝ| vanishes for |u| above this.
    cutoff: Option<f64>,
}

impl FrequencyWeight {
    pub fn from_family(family: &SamplingFamily) -> Self {
        let f = *family;
        Self { ghat_sq: Box::new(move |u| f.ghat(u).powi(2)), decay: family.decay(), cutoff: None }
    }

    /// Band-limited weight supported in |u| ≤ cutoff.
    pub fn band_limited(cutoff: f64, ghat_sq: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(cutoff > 0.0) {
            return invalid("cutoff must be positive");
        }
        Ok(Self { ghat_sq: Box::new(ghat_sq), decay: Decay::Exponential { scale: cutoff }, cutoff: Some(cutoff) })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self.cutoff {
            Some(c) if u.abs() > c => 0.0,
            _ => (self.ghat_sq)(u),
        }
    }

    /// `(1/2π) ∫_lo^∞ q(u) |ĝ(u)|² du`, split at the kinks of q.
    pub fn integrate(&self, q: impl Fn(f64) -> f64, lo: f64, kinks: &[f64]) -> Result<f64> {
        let mut cuts: Vec<f64> = kinks.iter().copied().filter(|k| *k > lo).collect();
        let end = self.cutoff;
        if let Some(c) = end {
            if lo >= c {
                return Ok(0.0);
            }
            cuts.retain(|k| *k < c);
            cuts.push(c);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let integrand = |u: f64| q(u) * self.eval(u);
        let mut total = 0.0;
        let mut left = lo;
        for &k in &cuts {
            total += integrate_adaptive(integrand, left, k, QUAD_TOL)?;
            left = k;
        }
        if end.is_none() {
            total += integrate_semi_infinite(integrand, left, self.decay, QUAD_TOL)?;
        }
        Ok(total / (2.0 * PI))
    }
}

fn check_state(model: &SpectralModel, coeffs: &[Complex64]) -> Result<()> {
    if coeffs.len() != model.dim() {
        return invalid(format!("state has {} coefficients, model has {} levels", coeffs.len(), model.dim()));
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("state not normalized: Σ|c|² = {norm}")));
    }
    Ok(())
}

/// Time-averaged position and energy densities at a point, weighted by
/// `f = g²`: `(⟨ρ_x(f)⟩, ⟨h_x(f)⟩)`.
pub fn averaged_densities(
    model: &SpectralModel,
    coeffs: &[Complex64],
    point: usize,
    family: &SamplingFamily,
) -> Result<(f64, f64)> {
    model.check_point(point)?;
    check_state(model, coeffs)?;
    let hbar = model.hbar;
    let e = &model.energies;
    let amp: Vec<Complex64> = coeffs.iter().enumerate().map(|(n, c)| c * model.phi[n][point]).collect();
    let (mut rho, mut h) = (0.0, 0.0);
    for n in 0..amp.len() {
        for k in 0..amp.len() {
            let w = (amp[n].conj() * amp[k]).re * family.fhat((e[k] - e[n]) / hbar);
            rho += w;
            h += 0.5 * (e[n] + e[k]) * w;
        }
    }
    Ok((rho, h))
}

/// Margins of the two-sided bound for a state in the spectral band [a, b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QiMargins {
    pub lower: f64,
    pub upper: f64,
}

pub fn verify_qi_iii(
    model: &SpectralModel,
    coeffs: &[Complex64],
    point: usize,
    family: &SamplingFamily,
    a: f64,
    b: f64,
) -> Result<QiMargins> {
    if !(a <= b) {
        return invalid(format!("need a ≤ b, got [{a}, {b}]"));
    }
    check_state(model, coeffs)?;
    if let Some(n) = (0..model.dim()).find(|&n| coeffs[n].norm() > 1e-12 && !(a..=b).contains(&model.energies[n])) {
        return Err(Error::Precondition(format!("level E_{n} = {} lies outside the band", model.energies[n])));
    }
    let (rho, h) = averaged_densities(model, coeffs, point, family)?;
    let mu = model.measure(point)?;
    let hbar = model.hbar;
    let weight = FrequencyWeight::from_family(family);
    let in_band: Vec<f64> = model.energies.iter().copied().filter(|e| (a..=b).contains(e)).collect();
    let lower_kinks: Vec<f64> = in_band.iter().map(|e| (e - a) / hbar).collect();
    let upper_kinks: Vec<f64> = in_band.iter().map(|e| (b - e) / hbar).collect();
    let qm = weight.integrate(|u| q_bounds(u, a, b, &mu).map(|q| q.0).unwrap_or(f64::NAN), 0.0, &lower_kinks)?;
    let qp = weight.integrate(|u| q_bounds(u, a, b, &mu).map(|q| q.1).unwrap_or(f64::NAN), 0.0, &upper_kinks)?;
    Ok(QiMargins { lower: h - a * rho + qm, upper: b * rho + qp - h })
}

/// `⟨h⟩ - c⟨ρ⟩ + (1/2π)∫ S(H - c; u) |ĝ|² du`, nonnegative for every state.
pub fn statement_iv_margin(
    model: &SpectralModel,
    coeffs: &[Complex64],
    point: usize,
    family: &SamplingFamily,
    c: f64,
) -> Result<f64> {
    let (rho, h) = averaged_densities(model, coeffs, point, family)?;
    let mu = model.measure(point)?;
    let hbar = model.hbar;
    let kinks: Vec<f64> = model.energies.iter().map(|e| (e - c) / hbar).collect();
    let lo = kinks.iter().copied().fold(f64::INFINITY, f64::min);
    let s = FrequencyWeight::from_family(family).integrate(
        |u| s_function(u, c, &mu).unwrap_or(f64::NAN),
        lo,
        &kinks,
    )?;
    Ok(h - c * rho + s)
}

/// `sup_x |(1 + x^j) φ_n(x)| ≤ c (1 + n)^r` for the unit oscillator, fitted
/// over a range of n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub j: i32,
    pub c: f64,
    pub r: f64,
}

impl Envelope {
    pub fn eval(&self, n: usize) -> f64 {
        self.c * (1.0 + n as f64).powf(self.r)
    }
}

pub fn fit_envelope(j: i32, n_fit: usize) -> Envelope {
    let mut sup = vec![0.0f64; n_fit + 1];
    let xmax = (2.0 * n_fit as f64 + 1.0).sqrt() + 8.0;
    let steps = (xmax / 0.005) as usize;
    for s in 0..=steps {
        let x = s as f64 * 0.005;
        let w = 1.0 + x.powi(j);
        for (n, v) in oscillator_eigenfunctions(n_fit, x).into_iter().enumerate() {
            sup[n] = sup[n].max(w * v.abs());
        }
    }
    let pts: Vec<(f64, f64)> = sup.iter().enumerate().map(|(n, s)| ((1.0 + n as f64).ln(), s.ln())).collect();
    let m = pts.len() as f64;
    let (xm, ym) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let r = sxy / sxx;
    // lift the fitted line until it dominates every sample
    let c = sup.iter().enumerate().map(|(n, s)| s / (1.0 + n as f64).powf(r)).fold(0.0, f64::max);
    Envelope { j, c, r }
}

/// `α_n = (1/2π) ∫_{E_n/ħ}^∞ |ĝ(u)|² (ħu - E_n) du`.
pub fn oscillator_alpha(n: usize, weight: &FrequencyWeight, hbar: f64, omega: f64) -> Result<f64> {
    let e = hbar * omega * (n as f64 + 0.5);
    weight.integrate(|u| hbar * u - e, e / hbar, &[])
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorBound {
    pub x: f64,
    pub value: f64,
    pub alphas: Vec<f64>,
    pub tail_estimate: f64,
}

/// Coefficients α_0..α_{n_max} and a certified tail estimate for
/// `Σ_{n > n_max} α_n sup|φ_n|²`.
pub struct OscillatorSeries {
    pub alphas: Vec<f64>,
    pub tail_estimate: f64,
    hbar: f64,
    omega: f64,
    mass: f64,
}

const TAIL_REL: f64 = 1e-10;
const TAIL_TERMS: usize = 400;

impl OscillatorSeries {
    pub fn new(weight: &FrequencyWeight, n_max: usize, hbar: f64, omega: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(omega > 0.0) || !(mass > 0.0) {
            return invalid("ħ, ω and m must be positive");
        }
        let alphas = (0..=n_max).map(|n| oscillator_alpha(n, weight, hbar, omega)).collect::<Result<Vec<_>>>()?;
        let env = fit_envelope(0, 200);
        let scale = (mass * omega / hbar).sqrt();
        let partial: f64 = alphas.iter().enumerate().map(|(n, a)| a * scale * env.eval(n).powi(2)).sum();
        let mut tail = 0.0;
        let mut quiet = 0;
        for n in n_max + 1..=n_max + TAIL_TERMS {
            let term = oscillator_alpha(n, weight, hbar, omega)? * scale * env.eval(n).powi(2);
            tail += term;
            if tail > TAIL_REL * partial && tail > 0.0 {
                return Err(Error::NonConvergence(format!(
                    "oscillator tail beyond n = {n_max} is at least {tail:e}, partial sum {partial:e}"
                )));
            }
            quiet = if term <= 1e-6 * TAIL_REL * partial.max(f64::MIN_POSITIVE) { quiet + 1 } else { 0 };
            if quiet == 3 {
                return Ok(Self { alphas, tail_estimate: tail, hbar, omega, mass });
            }
        }
        Err(Error::NonConvergence(format!("oscillator tail terms still significant {TAIL_TERMS} levels past n_max")))
    }

    /// `B(x) = -Σ α_n |φ_n(x)|²`.
    pub fn bound_at(&self, x: f64) -> f64 {
        let beta = (self.mass * self.omega / self.hbar).sqrt();
        let phi = oscillator_eigenfunctions(self.alphas.len() - 1, beta * x);
        -beta * self.alphas.iter().zip(phi).map(|(a, p)| a * p * p).sum::<f64>()
    }
}

pub fn oscillator_bound(
    x: f64,
    weight: &FrequencyWeight,
    n_max: usize,
    hbar: f64,
    omega: f64,
    mass: f64,
) -> Result<OscillatorBound> {
    let s = OscillatorSeries::new(weight, n_max, hbar, omega, mass)?;
    Ok(OscillatorBound { x, value: s.bound_at(x), tail_estimate: s.tail_estimate, alphas: s.alphas })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactResidual {
    /// `|f̂(Δ) - (1/2πħ)∫ ĝ ĝ dε|`.
    pub convolution: f64,
    /// `|(E+E')/2 f̂(Δ) - (1/2πħ)∫ ε ĝ ĝ dε|`.
    pub moment: f64,
}

/// Checks `(E+E')/2 f̂((E'-E)/ħ) = ∫ dε/(2πħ) ε ĝ((E'-ε)/ħ) ĝ((E-ε)/ħ)` and the
/// plain convolution identity by quadrature, starting from the midpoint and
/// integrating outward on both sides.
pub fn fact_identity_check(e1: f64, e2: f64, family: &SamplingFamily, hbar: f64, tol: f64) -> Result<FactResidual> {
    if !(hbar > 0.0) || !(tol > 0.0) {
        return invalid("ħ and tol must be positive");
    }
    let c = 0.5 * (e1 + e2);
    let g = |eps: f64| family.ghat((e2 - eps) / hbar) * family.ghat((e1 - eps) / hbar);
    // ε = c ± ħu
    let up = |u: f64| g(c + hbar * u);
    let down = |u: f64| g(c - hbar * u);
    let decay = family.decay();
    let conv = (integrate_semi_infinite(up, 0.0, decay, tol)? + integrate_semi_infinite(down, 0.0, decay, tol)?) / (2.0 * PI);
    let mom = (integrate_semi_infinite(|u| (c + hbar * u) * up(u), 0.0, decay, tol)?
        + integrate_semi_infinite(|u| (c - hbar * u) * down(u), 0.0, decay, tol)?)
        / (2.0 * PI);
    let fhat = family.fhat((e2 - e1) / hbar);
    Ok(FactResidual { convolution: (fhat - conv).abs(), moment: (c * fhat - mom).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParticleCheck {
    /// `(1/2π)∫ Q₋|ĝ|² du` for the translation model on [0, ∞).
    pub s_integral: f64,
    /// `(ħ/8π)∫ |g'|² dt`.
    pub flux_constant: f64,
}

pub fn free_particle_check(family: &SamplingFamily, hbar: f64) -> Result<FreeParticleCheck> {
    if !(hbar > 0.0) {
        return invalid("ħ must be positive");
    }
    let mu = PointSpectralMeasure::FreeParticle { hbar };
    let s_integral = FrequencyWeight::from_family(family).integrate(
        |u| q_bounds(u, 0.0, f64::INFINITY, &mu).map(|q| q.0).unwrap_or(f64::NAN),
        0.0,
        &[],
    )?;
    let gp2 = |t: f64| family.g_prime(t).powi(2);
    // g' is odd, so ∫|g'|² is twice the half-line integral
    let half = match family.support() {
        Some(w) => integrate_adaptive(gp2, 0.0, w, QUAD_TOL)?,
        None => integrate_semi_infinite(gp2, 0.0, Decay::Exponential { scale: family.width() }, QUAD_TOL)?,
    };
    Ok(FreeParticleCheck { s_integral, flux_constant: hbar / (8.0 * PI) * 2.0 * half })
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
/// Returns ascending eigenvalues and eigenvectors as columns (row-major).
pub fn hermitian_eigen(h: &[Complex64], n: usize) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if n == 0 || h.len() != n * n {
        return invalid(format!("expected {n}×{n} matrix, got {} entries", h.len()));
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (h[i * n + j] - h[j * n + i].conj()).norm())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = h.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut converged = false;
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[q * n + q].re - a[p * n + p].re) / (2.0 * r);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let (upp, upq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (uqp, uqq) = (-s * phase.conj(), c * phase.conj());
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * upp + akq * uqp;
                    a[k * n + q] = akp * upq + akq * uqq;
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = vkp * upp + vkq * uqp;
                    v[k * n + q] = vkp * upq + vkq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence("complex Jacobi did not converge in 100 sweeps".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let vals = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + col] = v[k * n + src];
        }
    }
    Ok((vals, vecs))
}
