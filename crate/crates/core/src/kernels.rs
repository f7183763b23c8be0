//! The four sampling families of the flux inequality: f, its Fourier
//! transform, and the transform of g = sqrt(f).
//!
//! Fourier convention: fhat(k) = ∫ f(x) e^{-ikx} dx.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::numerics::{sinc, Decay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Gaussian,
    SquaredLorentzian,
    TruncatedCosine,
    SmoothedTruncatedCosine,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Gaussian,
        FamilyKind::SquaredLorentzian,
        FamilyKind::TruncatedCosine,
        FamilyKind::SmoothedTruncatedCosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::SquaredLorentzian => "squared_lorentzian",
            FamilyKind::TruncatedCosine => "truncated_cosine",
            FamilyKind::SmoothedTruncatedCosine => "smoothed_truncated_cosine",
        }
    }

    /// c0 in the flux bound -c0 ħ/(mλ²).
    pub fn analytic_constant(self) -> f64 {
        match self {
            FamilyKind::Gaussian | FamilyKind::SquaredLorentzian => 1.0 / (16.0 * PI),
            FamilyKind::TruncatedCosine => PI / 32.0,
            FamilyKind::SmoothedTruncatedCosine => PI / 24.0,
        }
    }

    /// Whether f has compact support (and the transforms decay algebraically).
    pub fn is_compact(self) -> bool {
        matches!(self, FamilyKind::TruncatedCosine | FamilyKind::SmoothedTruncatedCosine)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sampling family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    F,
    FHat,
    GHat,
}

/// A member of one family at width λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingFamily {
    kind: FamilyKind,
    width: f64,
}

// half-width of the band around a removable pole where the rewritten form is used
const POLE_BAND: f64 = 0.1;

impl SamplingFamily {
    pub fn new(kind: FamilyKind, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return invalid(format!("width must be positive, got {width}"));
        }
        Ok(Self { kind, width })
    }

    pub fn unit(kind: FamilyKind) -> Self {
        Self { kind, width: 1.0 }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn analytic_constant(&self) -> f64 {
        self.kind.analytic_constant()
    }

    pub fn evaluate(&self, which: Evaluator, point: f64) -> f64 {
        match which {
            Evaluator::F => self.f(point),
            Evaluator::FHat => self.fhat(point),
            Evaluator::GHat => self.ghat(point),
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        unit_f(self.kind, x / self.width) / self.width
    }

    pub fn fhat(&self, k: f64) -> f64 {
        unit_fhat(self.kind, self.width * k)
    }

    pub fn ghat(&self, k: f64) -> f64 {
        self.width.sqrt() * unit_ghat(self.kind, self.width * k)
    }

    /// g = sqrt(f).
    pub fn g(&self, x: f64) -> f64 {
        unit_g(self.kind, x / self.width) / self.width.sqrt()
    }

    pub fn g_prime(&self, x: f64) -> f64 {
        unit_g_prime(self.kind, x / self.width) / self.width.powf(1.5)
    }

    /// Half-width of the support of f, if compact.
    pub fn support(&self) -> Option<f64> {
        self.kind.is_compact().then_some(self.width)
    }

    /// Tail hint for integrands built from products of ghat or fhat.
    pub fn decay(&self) -> Decay {
        if self.kind.is_compact() {
            Decay::Algebraic { period: Some(2.0 * PI / self.width) }
        } else {
            Decay::Exponential { scale: 1.0 / self.width }
        }
    }
}

/// -c0 ħ/(mλ²).
pub fn analytic_flux_bound(family: &SamplingFamily, hbar: f64, m: f64) -> Result<f64> {
    if !(hbar > 0.0) || !(m > 0.0) {
        return invalid("hbar and m must be positive");
    }
    Ok(-family.analytic_constant() * hbar / (m * family.width() * family.width()))
}

fn unit_f(kind: FamilyKind, x: f64) -> f64 {
    match kind {
        FamilyKind::Gaussian => (-x * x).exp() / PI.sqrt(),
        FamilyKind::SquaredLorentzian => 2.0 / (PI * (x * x + 1.0).powi(2)),
        FamilyKind::TruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                (0.5 * PI * x).cos().powi(2)
            }
        }
        FamilyKind::SmoothedTruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                4.0 / 3.0 * (0.5 * PI * x).cos().powi(4)
            }
        }
    }
}

fn unit_g(kind: FamilyKind, x: f64) -> f64 {
    match kind {
        FamilyKind::Gaussian => PI.powf(-0.25) * (-0.5 * x * x).exp(),
        FamilyKind::SquaredLorentzian => (2.0 / PI).sqrt() / (x * x + 1.0),
        FamilyKind::TruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                (0.5 * PI * x).cos()
            }
        }
        FamilyKind::SmoothedTruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                2.0 / 3f64.sqrt() * (0.5 * PI * x).cos().powi(2)
            }
        }
    }
}

fn unit_g_prime(kind: FamilyKind, x: f64) -> f64 {
    match kind {
        FamilyKind::Gaussian => -x * unit_g(kind, x),
        FamilyKind::SquaredLorentzian => -2.0 * x * (2.0 / PI).sqrt() / (x * x + 1.0).powi(2),
        FamilyKind::TruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                -0.5 * PI * (0.5 * PI * x).sin()
            }
        }
        FamilyKind::SmoothedTruncatedCosine => {
            if x.abs() >= 1.0 {
                0.0
            } else {
                -PI / 3f64.sqrt() * (PI * x).sin()
            }
        }
    }
}

// pi^2 sin k / (k (pi^2 - k^2)); fhat of the truncated cosine
fn tc_fhat(k: f64) -> f64 {
    let k = k.abs();
    let d = k - PI;
    if d.abs() < POLE_BAND {
        // sin(pi + d) = -sin d, pi^2 - k^2 = -d (2 pi + d)
        PI * PI * sinc(d) / ((PI + d) * (2.0 * PI + d))
    } else if k < POLE_BAND {
        sinc(k) * PI * PI / (PI * PI - k * k)
    } else {
        PI * PI * k.sin() / (k * (PI * PI - k * k))
    }
}

fn unit_fhat(kind: FamilyKind, k: f64) -> f64 {
    match kind {
        FamilyKind::Gaussian => (-0.25 * k * k).exp(),
        FamilyKind::SquaredLorentzian => (1.0 + k.abs()) * (-k.abs()).exp(),
        FamilyKind::TruncatedCosine => tc_fhat(k),
        FamilyKind::SmoothedTruncatedCosine => {
            let k = k.abs();
            let p4 = 4.0 * PI.powi(4);
            let d1 = k - PI;
            let d2 = k - 2.0 * PI;
            if k < POLE_BAND {
                p4 * sinc(k) / ((k * k - 4.0 * PI * PI) * (k * k - PI * PI))
            } else if d1.abs() < POLE_BAND {
                // k^2 - pi^2 = d (2 pi + d), k^2 - 4 pi^2 = (d - pi)(3 pi + d)
                -p4 * sinc(d1) / ((PI + d1) * (d1 - PI) * (3.0 * PI + d1) * (2.0 * PI + d1))
            } else if d2.abs() < POLE_BAND {
                // k^2 - 4 pi^2 = d (4 pi + d), k^2 - pi^2 = (pi + d)(3 pi + d)
                p4 * sinc(d2) / ((2.0 * PI + d2) * (4.0 * PI + d2) * (PI + d2) * (3.0 * PI + d2))
            } else {
                p4 * k.sin() / (k * (k * k - 4.0 * PI * PI) * (k * k - PI * PI))
            }
        }
    }
}

fn unit_ghat(kind: FamilyKind, k: f64) -> f64 {
    match kind {
        FamilyKind::Gaussian => 2f64.sqrt() * PI.powf(0.25) * (-0.5 * k * k).exp(),
        FamilyKind::SquaredLorentzian => (2.0 * PI).sqrt() * (-k.abs()).exp(),
        FamilyKind::TruncatedCosine => {
            let k = k.abs();
            let d = k - 0.5 * PI;
            if d.abs() < POLE_BAND {
                // cos(pi/2 + d) = -sin d, pi^2 - 4k^2 = -2d (2 pi + 2d)
                PI * sinc(d) / (PI + d)
            } else {
                4.0 * PI * k.cos() / (PI * PI - 4.0 * k * k)
            }
        }
        FamilyKind::SmoothedTruncatedCosine => 2.0 / 3f64.sqrt() * tc_fhat(k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, integrate_semi_infinite};

    fn fam(kind: FamilyKind) -> SamplingFamily {
        SamplingFamily::unit(kind)
    }

    #[test]
    fn unit_integral() {
        for kind in FamilyKind::ALL {
            assert!((fam(kind).fhat(0.0) - 1.0).abs() < 1e-15, "{kind}");
        }
    }

    #[test]
    fn lorentzian_ghat_at_zero() {
        let s = SamplingFamily::new(FamilyKind::SquaredLorentzian, 2.5).unwrap();
        assert!((s.ghat(0.0) - (2.0 * 2.5 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn truncated_cosine_fhat_at_pi_is_half() {
        // L'Hopital on pi^2 sin k / (k (pi^2 - k^2)) at k = pi gives 1/2
        assert!((fam(FamilyKind::TruncatedCosine).fhat(PI) - 0.5).abs() < 1e-15);
        let s = SamplingFamily::new(FamilyKind::TruncatedCosine, 3.0).unwrap();
        assert!((s.fhat(PI / 3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pole_limits() {
        // limits worked by hand: ghat_tc(pi/2) = 1; smoothed fhat at pi, 2 pi = 2/3, 1/6
        assert!((fam(FamilyKind::TruncatedCosine).ghat(0.5 * PI) - 1.0).abs() < 1e-15);
        let s = fam(FamilyKind::SmoothedTruncatedCosine);
        assert!((s.fhat(PI) - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.fhat(2.0 * PI) - 1.0 / 6.0).abs() < 1e-15);
        assert!((s.ghat(PI) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rewritten_forms_match_direct_formula_outside_band() {
        let tc_direct_g = |k: f64| 4.0 * PI * k.cos() / (PI * PI - 4.0 * k * k);
        let sm_direct_f =
            |k: f64| 4.0 * PI.powi(4) * k.sin() / (k * (k * k - 4.0 * PI * PI) * (k * k - PI * PI));
        let tc_direct_f = |k: f64| PI * PI * k.sin() / (k * (PI * PI - k * k));
        for off in [-0.15, -0.12, -0.1 - 1e-9, 0.1 + 1e-9, 0.12, 0.15] {
            let k = 0.5 * PI + off;
            assert!((unit_ghat(FamilyKind::TruncatedCosine, k) - tc_direct_g(k)).abs() < 1e-13);
            for pole in [PI, 2.0 * PI] {
                let k = pole + off;
                assert!((unit_fhat(FamilyKind::SmoothedTruncatedCosine, k) - sm_direct_f(k)).abs() < 1e-13);
            }
            let k = PI + off;
            assert!((unit_fhat(FamilyKind::TruncatedCosine, k) - tc_direct_f(k)).abs() < 1e-13);
        }
        // inside the band the rewritten form still agrees with the direct one
        // where the latter has not lost precision yet
        for off in [-0.09, -0.05, 0.03, 0.08] {
            let k = 0.5 * PI + off;
            assert!((unit_ghat(FamilyKind::TruncatedCosine, k) - tc_direct_g(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn table_one_constants() {
        let want = [-0.01989436788, -0.01989436788, -0.09817477044, -0.1308996939];
        for (kind, w) in FamilyKind::ALL.into_iter().zip(want) {
            let b = analytic_flux_bound(&fam(kind), 1.0, 1.0).unwrap();
            assert!((b - w).abs() < 1e-10, "{kind}: {b}");
        }
    }

    #[test]
    fn parse_names() {
        for kind in FamilyKind::ALL {
            assert_eq!(kind.name().parse::<FamilyKind>().unwrap(), kind);
        }
        assert_eq!("Smoothed-Truncated-Cosine".parse::<FamilyKind>().unwrap(), FamilyKind::SmoothedTruncatedCosine);
        assert!("boxcar".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn parseval_per_family() {
        for kind in FamilyKind::ALL {
            for width in [1.0, 0.7] {
                let s = SamplingFamily::new(kind, width).unwrap();
                let freq = integrate_semi_infinite(|u| u * u * s.ghat(u).powi(2), 0.0, s.decay(), 1e-12).unwrap()
                    / PI;
                let space = match s.support() {
                    Some(a) => integrate_adaptive(|x| s.g_prime(x).powi(2), -a, a, 1e-13).unwrap(),
                    None => {
                        2.0 * integrate_semi_infinite(
                            |x| s.g_prime(x).powi(2),
                            0.0,
                            Decay::Algebraic { period: None },
                            1e-12,
                        )
                        .unwrap()
                    }
                };
                let from_bound = 8.0 * PI * analytic_flux_bound(&s, 1.0, 1.0).unwrap().abs();
                assert!((freq - space).abs() < 1e-8, "{kind} {width}: {freq} vs {space}");
                assert!((space - from_bound).abs() < 1e-8, "{kind} {width}: {space} vs {from_bound}");
            }
        }
    }

    #[test]
    fn transforms_match_numerical_fourier_integrals() {
        for kind in FamilyKind::ALL {
            let s = fam(kind);
            for k in [0.0, 0.3, 1.0, 2.5, PI, 7.0] {
                let num_f = fourier_cos(|x| s.f(x), &s, k);
                let num_g = fourier_cos(|x| s.g(x), &s, k);
                assert!((num_f - s.fhat(k)).abs() < 1e-6, "{kind} fhat({k})");
                assert!((num_g - s.ghat(k)).abs() < 1e-6, "{kind} ghat({k})");
            }
        }
    }

    // 2 ∫_0^∞ h(x) cos(kx) dx for even h
    fn fourier_cos(h: impl Fn(f64) -> f64, s: &SamplingFamily, k: f64) -> f64 {
        let body = |x: f64| h(x) * (k * x).cos();
        match s.support() {
            Some(a) => 2.0 * integrate_adaptive(body, 0.0, a, 1e-12).unwrap(),
            None => {
                let decay = if s.kind() == FamilyKind::Gaussian {
                    Decay::Exponential { scale: 1.0 }
                } else {
                    Decay::Algebraic { period: (k > 0.0).then(|| 2.0 * PI / k) }
                };
                2.0 * integrate_semi_infinite(body, 0.0, decay, 1e-11).unwrap()
            }
        }
    }

    #[test]
    fn scaling_law() {
        for kind in FamilyKind::ALL {
            let one = fam(kind);
            for lam in [0.5, 2.0, 3.7] {
                let s = SamplingFamily::new(kind, lam).unwrap();
                for x in [-2.3, -0.4, 0.0, 0.9, 1.7, 5.0] {
                    assert!((s.f(x) - one.f(x / lam) / lam).abs() <= 1e-14);
                    assert!((s.fhat(x) - one.fhat(lam * x)).abs() <= 1e-14);
                    assert!((s.ghat(x) - lam.sqrt() * one.ghat(lam * x)).abs() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn support_edge_is_zero() {
        for kind in [FamilyKind::TruncatedCosine, FamilyKind::SmoothedTruncatedCosine] {
            assert_eq!(fam(kind).f(1.0), 0.0);
            assert_eq!(fam(kind).f(-1.0), 0.0);
        }
    }
}
