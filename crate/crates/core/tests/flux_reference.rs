use std::f64::consts::PI;
use std::time::Instant;

use qibound::flux::{
    flux_bounds, gaussian_truncation_squared, j_kernel, t_kernel, truncation_error, truncation_error_squared,
    truncation_threshold, FluxSettings,
};
use qibound::kernels::{FamilyKind, SamplingFamily};
use qibound::operator_lab::{
    convergence_sweep, discretize, extreme_eigenvalue, hs_norm, singular_values, Extent, Layout, SweepQuantity, Which,
};

fn unit(kind: FamilyKind) -> SamplingFamily {
    SamplingFamily::unit(kind)
}

#[test]
fn gaussian_singular_values_both_layouts() {
    let t = t_kernel(&unit(FamilyKind::Gaussian));
    let a = singular_values(&discretize(&t, 6.9, Layout::nodes(65, 1)).unwrap(), 2).unwrap();
    let b = singular_values(&discretize(&t, 6.9, Layout::nodes(129, 2)).unwrap(), 2).unwrap();
    assert!((a[0] - 0.1399331442).abs() < 1e-9, "{a:?}");
    assert!((a[1] - 0.0175697912).abs() < 1e-8, "{a:?}");
    assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
    // C = sigma_1^2
    assert!((a[0] * a[0] - 0.01958128485).abs() < 1e-10);
}

#[test]
fn smoothed_singular_values() {
    let t = t_kernel(&unit(FamilyKind::SmoothedTruncatedCosine));
    let start = Instant::now();
    for nodes in [513, 1025] {
        let s = singular_values(&discretize(&t, 732.3, Layout::nodes(nodes, 1)).unwrap(), 2).unwrap();
        assert!((s[0] - 0.3536210388).abs() < 1e-6, "{nodes}: {s:?}");
        assert!((s[1] - 0.0733902259).abs() < 1e-6, "{nodes}: {s:?}");
        assert!((s[0] * s[0] - 0.125047838).abs() < 1e-6);
    }
    eprintln!("smoothed T at 513 and 1025 nodes: {:?}", start.elapsed());
}

#[test]
fn truncated_cosine_norm_constant() {
    let t = t_kernel(&unit(FamilyKind::TruncatedCosine));
    let s = singular_values(&discretize(&t, 1100.0, Layout::nodes(1025, 1)).unwrap(), 1).unwrap();
    // the published value carries a two-significant-figure caveat
    assert!((s[0] * s[0] - 0.08463957004).abs() < 2e-3);
}

#[test]
fn opnorm_below_hs_norm() {
    for kind in FamilyKind::ALL {
        let st = FluxSettings::reference(kind);
        let t = t_kernel(&unit(kind));
        let k = if kind.is_compact() { 200.0 } else { st.t_k };
        let op = discretize(&t, k, Layout::nodes(257, 1)).unwrap();
        let s = singular_values(&op, 1).unwrap()[0];
        let hs = hs_norm(&t, Extent::Finite(k), 1e-13).unwrap();
        assert!(s <= hs + 1e-10, "{kind}: {s} > {hs}");
    }
}

#[test]
fn gaussian_truncation_crossing() {
    let g = unit(FamilyKind::Gaussian);
    let k = truncation_threshold(&g, 0.5e-10, 6.0, 7.5, 1e-6).unwrap();
    assert!((k - 6.756).abs() < 1e-3, "{k}");
    for k in (0..=80).map(|i| i as f64 * 0.1) {
        let num = truncation_error_squared(&g, k).unwrap();
        let literal = 1.0 + qibound::numerics::erf(2.0 * k) - 2.0 * qibound::numerics::erf(k);
        assert!((num - literal).abs() < 1e-12);
        assert!((num - gaussian_truncation_squared(k)).abs() < 1e-12);
    }
}

#[test]
fn smoothed_truncation_asymptotics() {
    let s = unit(FamilyKind::SmoothedTruncatedCosine);
    let k: f64 = 732.3;
    let sq = truncation_error_squared(&s, k).unwrap();
    let lead = 5.0 * PI / (16.0 * k.powi(3));
    eprintln!("smoothed K=732.3: squared ratio {sq:.12e}, leading term {lead:.12e}, norm-level {:.12e}", sq.sqrt());
    assert!(((sq - lead) / lead).abs() < 0.05);
    // a 25-digit evaluation of the same integrals gives 2.50000924847e-9
    assert!(((sq - 2.50000924847e-9) / 2.5e-9).abs() < 1e-7);
    assert!((truncation_error(&s, k).unwrap() - sq.sqrt()).abs() < 1e-18);
}

#[test]
fn lorentzian_is_rank_one() {
    let r = flux_bounds(
        &unit(FamilyKind::SquaredLorentzian),
        &FluxSettings::reference(FamilyKind::SquaredLorentzian),
        1.0,
        1.0,
    )
    .unwrap();
    assert!((r.analytic_bound - r.opnorm_bound).abs() < 1e-10, "{r:?}");
    assert!(r.singular_values[1] < 1e-7);
    assert!((r.norm_constant() - 1.0 / (16.0 * PI)).abs() < 1e-10);
}

#[test]
fn gaussian_j_sweep_plateau() {
    let j = j_kernel(&unit(FamilyKind::Gaussian));
    let t = convergence_sweep(&j, &[10.0, 20.0, 30.0], 5.0, SweepQuantity::MinEigenvalue, 1e-9).unwrap();
    let want = [-0.0048295212087, -0.0048295668511, -0.0048295668517];
    for (row, w) in t.rows.iter().zip(want) {
        assert!((row.value - w).abs() < 1e-12, "{row:?}");
    }
    assert_eq!(t.plateau_at, Some(20.0));
}

#[test]
fn smoothed_j_minimum() {
    let j = j_kernel(&unit(FamilyKind::SmoothedTruncatedCosine));
    let op = discretize(&j, 220.0, Layout::density(5.0)).unwrap();
    let mu = extreme_eigenvalue(&op, Which::Min).unwrap();
    assert!(((mu + 0.036095567061) / 0.036095567061).abs() < 1e-6, "{mu}");
    // scipy's dense solver on the same 1101-node matrix gives -0.0360955670611
    assert!((mu + 0.0360955670611).abs() < 1e-12, "{mu}");
}

#[test]
fn width_scaling_is_exact_in_physical_units() {
    let kind = FamilyKind::Gaussian;
    let st = FluxSettings { j_k: 20.0, ..FluxSettings::reference(kind) };
    let one = flux_bounds(&SamplingFamily::new(kind, 1.0).unwrap(), &st, 1.0, 1.0).unwrap();
    let two = flux_bounds(&SamplingFamily::new(kind, 2.0).unwrap(), &st, 1.0, 1.0).unwrap();
    assert_eq!(two.physical_analytic(), one.physical_analytic() / 4.0);
    assert_eq!(two.physical_opnorm(), one.physical_opnorm() / 4.0);
    assert_eq!(two.physical_sharp(), one.physical_sharp() / 4.0);
}
