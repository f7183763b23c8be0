mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qibound::dynamical::*;
use qibound::kernels::{FamilyKind, SamplingFamily};
use qibound::numerics::{integrate_adaptive, integrate_semi_infinite, Decay};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_model, random_state};

fn family(rng: &mut impl Rng) -> SamplingFamily {
    let kind = FamilyKind::ALL[rng.gen_range(0..4)];
    SamplingFamily::new(kind, rng.gen_range(0.5..2.0)).unwrap()
}

#[test]
fn statement_iii_margins_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..100 {
        let m = random_model(&mut rng, 8);
        let lo = rng.gen_range(0..8);
        let hi = rng.gen_range(lo..8);
        let psi = random_state(&mut rng, 8, lo, hi);
        let (a, b) = (m.energies()[lo], m.energies()[hi]);
        let fam = family(&mut rng);
        let x = rng.gen_range(0..8);
        let q = verify_qi_iii(&m, &psi, x, &fam, a, b).unwrap();
        assert!(q.lower >= -1e-10 && q.upper >= -1e-10, "trial {trial} {:?}: {q:?}", fam.kind());
    }
}

#[test]
fn statement_iv_margins_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let m = random_model(&mut rng, 8);
        let psi = random_state(&mut rng, 8, 0, 7);
        let fam = family(&mut rng);
        let x = rng.gen_range(0..8);
        for c in [0.0, m.energies()[0], -1.0] {
            let margin = statement_iv_margin(&m, &psi, x, &fam, c).unwrap();
            assert!(margin >= -1e-10, "c={c}: {margin}");
        }
    }
}

/// ∫ f(t) |ψ_t(x)|² dt and ∫ f(t) Re(ψ̄_t Hψ_t)(x) dt by direct quadrature.
fn time_domain(m: &SpectralModel, psi: &[Complex64], x: usize, fam: &SamplingFamily) -> (f64, f64) {
    let at = |t: f64| {
        let (mut v, mut hv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (n, c) in psi.iter().enumerate() {
            let e = m.energies()[n];
            let term = c * Complex64::from_polar(1.0, -e * t) * m.phi(n, x);
            v += term;
            hv += e * term;
        }
        (v.norm_sqr(), (v.conj() * hv).re)
    };
    let both = |pick: fn((f64, f64)) -> f64| -> f64 {
        let f = |t: f64| fam.f(t) * pick(at(t));
        match fam.support() {
            Some(w) => integrate_adaptive(f, -w, w, 1e-13).unwrap(),
            None => {
                let d = Decay::Exponential { scale: fam.width() };
                integrate_semi_infinite(f, 0.0, d, 1e-13).unwrap() + integrate_semi_infinite(|t| f(-t), 0.0, d, 1e-13).unwrap()
            }
        }
    };
    (both(|p| p.0), both(|p| p.1))
}

#[test]
fn averaged_densities_match_time_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in FamilyKind::ALL {
        let m = random_model(&mut rng, 8);
        let psi = random_state(&mut rng, 8, 0, 7);
        let fam = SamplingFamily::new(kind, 1.3).unwrap();
        let (rho, h) = averaged_densities(&m, &psi, 2, &fam).unwrap();
        let (rho_t, h_t) = time_domain(&m, &psi, 2, &fam);
        assert!((rho - rho_t).abs() < 1e-8, "{kind}: {rho} vs {rho_t}");
        assert!((h - h_t).abs() < 1e-8, "{kind}: {h} vs {h_t}");
    }
}

#[test]
fn zero_state_component_gives_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let m = random_model(&mut rng, 8);
    let psi = random_state(&mut rng, 8, 0, 7);
    assert!(averaged_densities(&m, &psi[..7], 0, &SamplingFamily::unit(FamilyKind::Gaussian)).is_err());
    let unnormalized: Vec<Complex64> = psi.iter().map(|z| z * 2.0).collect();
    assert!(averaged_densities(&m, &unnormalized, 0, &SamplingFamily::unit(FamilyKind::Gaussian)).is_err());
}

#[test]
fn fact_identity_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (e1, e2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let fam = family(&mut rng);
        let r = fact_identity_check(e1, e2, &fam, 1.0, 1e-12).unwrap();
        assert!(r.convolution <= 1e-8 && r.moment <= 1e-8, "{:?} ({e1},{e2}): {r:?}", fam.kind());
    }
    let g = SamplingFamily::unit(FamilyKind::Gaussian);
    let r = fact_identity_check(1.0, 2.0, &g, 1.0, 1e-12).unwrap();
    assert!(r.moment <= 1e-8);
    let r = fact_identity_check(0.0, 0.0, &g, 1.0, 1e-12).unwrap();
    assert!(r.moment <= 1e-8 && r.convolution <= 1e-8);
}

#[test]
fn fact_identity_residual_shrinks_with_tolerance() {
    let fam = SamplingFamily::unit(FamilyKind::TruncatedCosine);
    let res: Vec<f64> = [1e-4, 1e-8, 1e-12]
        .iter()
        .map(|&tol| fact_identity_check(0.3, 1.7, &fam, 1.0, tol).unwrap().convolution)
        .collect();
    assert!(res[2] <= res[0]);
    assert!(res[2] < 1e-9);
}

#[test]
fn free_particle_reproduces_flux_constant() {
    for kind in FamilyKind::ALL {
        for hbar in [1.0, 0.5] {
            let fam = SamplingFamily::new(kind, 0.8).unwrap();
            let chk = free_particle_check(&fam, hbar).unwrap();
            assert!((chk.s_integral - chk.flux_constant).abs() < 1e-8, "{kind}: {chk:?}");
            let analytic = kind.analytic_constant() * hbar / (0.8 * 0.8);
            assert!((chk.flux_constant - analytic).abs() < 1e-8, "{kind}");
        }
    }
}

#[test]
fn oscillator_alphas_decrease() {
    let w = FrequencyWeight::from_family(&SamplingFamily::unit(FamilyKind::Gaussian));
    let a: Vec<f64> = (0..12).map(|n| oscillator_alpha(n, &w, 1.0, 1.0).unwrap()).collect();
    assert!(a.windows(2).all(|p| p[1] < p[0] || p[0] == 0.0), "{a:?}");
}

#[test]
fn oscillator_bound_decays_in_x() {
    let w = FrequencyWeight::from_family(&SamplingFamily::unit(FamilyKind::Gaussian));
    let s = OscillatorSeries::new(&w, 30, 1.0, 1.0, 1.0).unwrap();
    let c0 = fit_envelope(0, 200);
    let c4 = fit_envelope(4, 200);
    let cap: f64 = s.alphas.iter().enumerate().map(|(n, a)| a * c0.eval(n) * c4.eval(n)).sum();
    let mut worst = 0.0f64;
    for i in 0..=400 {
        let x = -10.0 + i as f64 * 0.05;
        let b = s.bound_at(x);
        assert!(b <= 0.0);
        worst = worst.max(b.abs() * (1.0 + x.powi(4)));
    }
    assert!(worst <= cap, "{worst} > {cap}");
    assert!(s.tail_estimate < 1e-10 * s.alphas.iter().sum::<f64>());
}

#[test]
fn oscillator_series_equals_s_integral() {
    let fam = SamplingFamily::unit(FamilyKind::Gaussian);
    let w = FrequencyWeight::from_family(&fam);
    let m = SpectralModel::oscillator(25, &[0.0, 0.7, 2.5], 1.0, 1.0, 1.0).unwrap();
    let s = OscillatorSeries::new(&w, 25, 1.0, 1.0, 1.0).unwrap();
    for (i, &x) in m.points().iter().enumerate() {
        let mu = m.measure(i).unwrap();
        let kinks: Vec<f64> = m.energies().to_vec();
        let lhs = w.integrate(|u| s_function(u, 0.0, &mu).unwrap(), kinks[0], &kinks).unwrap();
        assert!((lhs + s.bound_at(x)).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn compact_family_tail_is_not_controlled() {
    let w = FrequencyWeight::from_family(&SamplingFamily::unit(FamilyKind::TruncatedCosine));
    assert!(OscillatorSeries::new(&w, 20, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn large_width_ratio_enters_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nontrivial = 0;
    for _ in 0..20 {
        let m = random_model(&mut rng, 8);
        let psi = random_state(&mut rng, 8, 2, 4);
        let (a, b) = (m.energies()[2], m.energies()[4]);
        let eps: Vec<f64> = [1.0, 4.0, 16.0]
            .iter()
            .map(|&lam| {
                let fam = SamplingFamily::new(FamilyKind::Gaussian, lam).unwrap();
                let (rho, h) = averaged_densities(&m, &psi, 0, &fam).unwrap();
                let r = h / rho;
                (a - r).max(r - b).max(0.0)
            })
            .collect();
        if eps[0] > 1e-6 {
            nontrivial += 1;
        }
        assert!(eps[2] <= eps[1] + 1e-12 && eps[1] <= eps[0] + 1e-12, "{eps:?}");
        assert!(eps[2] < 1e-6);
    }
    assert!(nontrivial > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_and_s_are_nonnegative_and_monotone(
        masses in prop::collection::vec((-3.0f64..3.0, 0.0f64..1.0), 1..8),
        a in -2.0f64..0.0, width in 0.0f64..3.0, c in -2.0f64..2.0,
    ) {
        let mu = PointSpectralMeasure::discrete(masses, 1.0).unwrap();
        let b = a + width;
        let mut prev = (0.0, 0.0, 0.0);
        for i in 0..200 {
            let u = -2.0 + i as f64 * 0.05;
            let (qm, qp) = q_bounds(u, a, b, &mu).unwrap();
            let s = s_function(u, c, &mu).unwrap();
            prop_assert!(qm >= 0.0 && qp >= 0.0 && s >= 0.0);
            prop_assert!(qm >= prev.0 - 1e-15 && qp >= prev.1 - 1e-15 && s >= prev.2 - 1e-15);
            prev = (qm, qp, s);
        }
    }

    #[test]
    fn free_particle_q_matches_integral(u in 0.0f64..4.0, a in -1.0f64..1.0, w in 0.1f64..3.0) {
        let hbar = 0.9;
        let mu = PointSpectralMeasure::FreeParticle { hbar };
        let (qm, _) = q_bounds(u, a, a + w, &mu).unwrap();
        let direct = integrate_adaptive(|e| (hbar * u + a - e).max(0.0), a, a + w, 1e-13).unwrap() / (2.0 * PI * hbar);
        prop_assert!((qm - direct).abs() < 1e-10);
    }
}
