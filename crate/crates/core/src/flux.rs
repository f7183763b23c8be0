//! Flux quantum inequality: the T and J kernels, the three bounds and the
//! truncation-error estimate for cutting the T kernel at K.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::kernels::{analytic_flux_bound, FamilyKind, SamplingFamily};
use crate::numerics::{erfc, integrate_adaptive, integrate_semi_infinite};
use crate::operator_lab::{discretize, extreme_eigenvalue, singular_values, KernelFunction, Layout, Which};

/// `G(k,k') = (1/2π) √k ĝ₁(-k-k')` at unit width.
pub fn t_kernel(family: &SamplingFamily) -> KernelFunction {
    let unit = SamplingFamily::unit(family.kind());
    let profile = unit;
    let decay = unit.decay();
    KernelFunction::new(format!("T[{}]", family.kind()), false, move |k, kp| {
        k.max(0.0).sqrt() * unit.ghat(-k - kp) / (2.0 * PI)
    })
    .with_sum_profile(move |s| s * profile.ghat(s).powi(2) / (8.0 * PI * PI), decay)
}

/// `J(k,k') = (1/2π) (k+k')/2 f̂₁(k-k')` at unit width.
pub fn j_kernel(family: &SamplingFamily) -> KernelFunction {
    let unit = SamplingFamily::unit(family.kind());
    KernelFunction::new(format!("J[{}]", family.kind()), true, move |k, kp| {
        0.25 * (k + kp) * unit.fhat(k - kp) / PI
    })
}

/// Truncation and layout for the two Nyström problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSettings {
    pub t_k: f64,
    pub t_layout: Layout,
    pub j_k: f64,
    pub j_layout: Layout,
}

impl FluxSettings {
    /// Settings at which the reference values were published.
    pub fn reference(kind: FamilyKind) -> Self {
        match kind {
            FamilyKind::Gaussian => Self {
                t_k: 6.9,
                t_layout: Layout::nodes(65, 1),
                j_k: 30.0,
                j_layout: Layout::density(5.0),
            },
            FamilyKind::SquaredLorentzian => Self {
                t_k: 30.0,
                t_layout: Layout::nodes(257, 1),
                j_k: 30.0,
                j_layout: Layout::density(60.0),
            },
            FamilyKind::TruncatedCosine => Self {
                t_k: 1100.0,
                t_layout: Layout::nodes(1025, 1),
                j_k: 3000.0,
                j_layout: Layout::density(1.0),
            },
            FamilyKind::SmoothedTruncatedCosine => Self {
                t_k: 732.3,
                t_layout: Layout::nodes(1025, 1),
                j_k: 220.0,
                j_layout: Layout::density(5.0),
            },
        }
    }
}

/// The three flux bounds of one family. Bounds are dimensionless, in units of
/// `unit_scale = ħ/(mλ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxBoundReport {
    pub family: FamilyKind,
    pub width: f64,
    pub hbar: f64,
    pub mass: f64,
    pub analytic_bound: f64,
    pub opnorm_bound: f64,
    pub sharp_infimum: f64,
    pub singular_values: Vec<f64>,
    pub t_k: f64,
    pub t_nodes: usize,
    pub j_k: f64,
    pub j_nodes: usize,
    pub truncation_relative_error: f64,
    pub unit_scale: f64,
}

impl FluxBoundReport {
    /// Squared operator norm of T, the improved constant C.
    pub fn norm_constant(&self) -> f64 {
        -self.opnorm_bound
    }

    pub fn physical_analytic(&self) -> f64 {
        self.analytic_bound * self.unit_scale
    }

    pub fn physical_opnorm(&self) -> f64 {
        self.opnorm_bound * self.unit_scale
    }

    pub fn physical_sharp(&self) -> f64 {
        self.sharp_infimum * self.unit_scale
    }

    /// analytic ≤ opnorm ≤ sharp ≤ 0, with `slack` for rounding.
    pub fn ordering_holds(&self, slack: f64) -> bool {
        self.analytic_bound <= self.opnorm_bound + slack
            && self.opnorm_bound <= self.sharp_infimum + slack
            && self.sharp_infimum <= slack
    }
}

pub fn flux_bounds(family: &SamplingFamily, settings: &FluxSettings, hbar: f64, mass: f64) -> Result<FluxBoundReport> {
    if !(hbar > 0.0) || !(mass > 0.0) {
        return invalid("hbar and m must be positive");
    }
    let lam = family.width();
    let unit_scale = hbar / (mass * lam * lam);
    let analytic = analytic_flux_bound(family, hbar, mass)? / unit_scale;

    let t = discretize(&t_kernel(family), settings.t_k, settings.t_layout)?;
    let sv = singular_values(&t, 2)?;
    let j = discretize(&j_kernel(family), settings.j_k, settings.j_layout)?;
    let mu = extreme_eigenvalue(&j, Which::Min)?;

    Ok(FluxBoundReport {
        family: family.kind(),
        width: lam,
        hbar,
        mass,
        analytic_bound: analytic,
        opnorm_bound: -sv[0] * sv[0],
        sharp_infimum: mu,
        singular_values: sv,
        t_k: settings.t_k,
        t_nodes: t.dim(),
        j_k: settings.j_k,
        j_nodes: j.dim(),
        truncation_relative_error: truncation_error(family, settings.t_k)?,
        unit_scale,
    })
}

/// `‖T - T_K‖²_HS / ‖T‖²_HS` for the unit-width kernel.
pub fn truncation_error_squared(family: &SamplingFamily, k_trunc: f64) -> Result<f64> {
    if !(k_trunc >= 0.0) || !k_trunc.is_finite() {
        return invalid(format!("K must be finite and nonnegative, got {k_trunc}"));
    }
    let unit = SamplingFamily::unit(family.kind());
    let g2 = |u: f64| unit.ghat(-u).powi(2);
    let near = |tol: f64| integrate_adaptive(|u| u * (u - k_trunc) * g2(u), k_trunc, 2.0 * k_trunc, tol);
    let far = |tol: f64| integrate_semi_infinite(|u| u * u * g2(u), 2.0 * k_trunc, unit.decay(), tol);
    // a coarse pass sets the magnitude, the second pass is relative to it
    let rough = near(1e-6)?.abs() / 2.0 + far(1e-6)?.abs();
    let tol = (rough * 1e-13).max(1e-300);
    let e = near(tol)? / (4.0 * PI * PI) + far(tol)? / (8.0 * PI * PI);
    Ok(e / unit.analytic_constant())
}

/// Relative Hilbert–Schmidt error of truncating the T kernel at K.
pub fn truncation_error(family: &SamplingFamily, k_trunc: f64) -> Result<f64> {
    Ok(truncation_error_squared(family, k_trunc)?.max(0.0).sqrt())
}

/// Closed form of the squared Gaussian ratio, `1 + erf(2K) - 2 erf(K)`,
/// written with erfc to avoid cancellation.
pub fn gaussian_truncation_squared(k_trunc: f64) -> f64 {
    2.0 * erfc(k_trunc) - erfc(2.0 * k_trunc)
}

/// Smallest K (to `tol`) at which the relative error drops to `eps`, by
/// bisection on `[lo, hi]`.
pub fn truncation_threshold(family: &SamplingFamily, eps: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |k: f64| truncation_error(family, k).map(|e| e - eps);
    let (mut a, mut b) = (lo, hi);
    if !(f(a)? > 0.0 && f(b)? <= 0.0) {
        return invalid(format!("error does not cross {eps:e} on [{lo}, {hi}]"));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if f(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Largest flux magnitude M such that a right-moving state could have flux
/// ≤ -M throughout an interval of length `a`: `ħπ/(8ma²)`.
pub fn max_negative_flux(a: f64, hbar: f64, mass: f64) -> Result<f64> {
    if !(a > 0.0) || !(hbar > 0.0) || !(mass > 0.0) {
        return invalid("interval length, hbar and m must be positive");
    }
    Ok(hbar * PI / (8.0 * mass * a * a))
}
