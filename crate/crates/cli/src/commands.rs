//! One function per subcommand. Each returns the result JSON and any plot
//! data as named byte buffers; nothing here touches the filesystem.

use std::fmt::Write as _;

use num_complex::Complex64;
use qibound::backflow::{
    fit_inverse_sqrt, flux_at_zero_closed_form, lambda_of_x, left_probability, wavepacket_flux_at_zero, evolve_free,
    LambdaPoint, Wavepacket,
};
use qibound::dynamical::{FrequencyWeight, OscillatorSeries};
use qibound::flux::{flux_bounds, j_kernel, t_kernel, FluxSettings};
use qibound::kernels::{FamilyKind, SamplingFamily};
use qibound::numerics::oscillator_eigenfunctions;
use qibound::operator_lab::{convergence_sweep, discretize, spectral_summary, Layout, SweepQuantity};
use qibound::wigner::{energy_density, kinematical_bound, smeared_energy, wigner_transform, MomentumGrid, StateGrid};
use serde_json::{json, Value};

use crate::cache::Artifacts;
use crate::config::*;
use crate::error::CliError;
use crate::manifest::{verify, ReferenceManifest};

type Res<T> = Result<T, CliError>;

fn family(name: &str, width: f64) -> Res<SamplingFamily> {
    let kind: FamilyKind = name.parse()?;
    Ok(SamplingFamily::new(kind, width)?)
}

fn finish(result: Value, mut files: Artifacts) -> Res<Artifacts> {
    let mut text = serde_json::to_string_pretty(&result)?;
    text.push('\n');
    files.insert(0, ("result.json".into(), text.into_bytes()));
    Ok(files)
}

/// Two-column (or wider) whitespace-separated rows.
fn columns<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Vec<u8> {
    let mut s = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s.into_bytes()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Res<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(CliError::usage(format!("need at least 2 points on a nonempty interval, got {n} on [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * h }).collect())
}

pub fn execute(cmd: &Command) -> Res<(Artifacts, bool)> {
    let files = match cmd {
        Command::FluxBound(a) => flux_bound(a)?,
        Command::FluxSpectrum(a) => flux_spectrum(a)?,
        Command::BackflowConstant(a) => backflow_constant(a)?,
        Command::Evolve(a) => evolve(a)?,
        Command::Wigner(a) => wigner(a)?,
        Command::OscBound(a) => osc_bound(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::Verify(a) => return run_verify(a),
    };
    Ok((files, true))
}

fn flux_bound(a: &FluxBoundArgs) -> Res<Artifacts> {
    let fam = family(&a.family, a.lambda)?;
    let mut st = FluxSettings::reference(fam.kind());
    if let Some(k) = a.t_k {
        st.t_k = k;
    }
    if let Some(n) = a.t_nodes {
        st.t_layout = Layout::nodes(n, a.t_panels);
    }
    if let Some(k) = a.j_k {
        st.j_k = k;
    }
    if let Some(d) = a.j_density {
        st.j_layout = Layout::density(d);
    }
    let r = flux_bounds(&fam, &st, a.hbar, a.mass)?;
    let result = json!({
        "command": "flux-bound",
        "family": fam.kind().name(),
        "lambda": a.lambda,
        "hbar": a.hbar,
        "mass": a.mass,
        "units": "bounds are fluxes (inverse time); *_dimensionless are in units of hbar/(m lambda^2)",
        "analytic_bound": r.physical_analytic(),
        "opnorm_bound": r.physical_opnorm(),
        "sharp_infimum": r.physical_sharp(),
        "analytic_bound_dimensionless": r.analytic_bound,
        "opnorm_bound_dimensionless": r.opnorm_bound,
        "sharp_infimum_dimensionless": r.sharp_infimum,
        "norm_constant": r.norm_constant(),
        "singular_values": r.singular_values,
        "t_truncation": r.t_k,
        "t_nodes": r.t_nodes,
        "j_truncation": r.j_k,
        "j_nodes": r.j_nodes,
        "truncation_relative_error": r.truncation_relative_error,
        "ordering_holds": r.ordering_holds(1e-12),
    });
    finish(result, vec![])
}

fn flux_spectrum(a: &SpectrumArgs) -> Res<Artifacts> {
    let fam = family(&a.family, 1.0)?;
    let kernel = match a.kernel.as_str() {
        "t" | "T" => t_kernel(&fam),
        "j" | "J" => j_kernel(&fam),
        other => return Err(CliError::usage(format!("kernel must be 't' or 'j', got '{other}'"))),
    };
    let layout = match a.nodes {
        Some(n) => Layout::nodes(n, a.panels),
        None => Layout::Density { per_unit: a.density, panels: a.panels },
    };
    let op = discretize(&kernel, a.k, layout)?;
    let s = spectral_summary(&op, a.count)?;
    let result = json!({
        "command": "flux-spectrum",
        "family": fam.kind().name(),
        "kernel": kernel.name(),
        "units": "dimensionless (unit-width sampling function, hbar = m = 1)",
        "truncation": a.k,
        "nodes": op.dim(),
        "top_singular_values": s.top_singular_values,
        "min_eigenvalue": s.min_eigenvalue,
        "max_eigenvalue": s.max_eigenvalue,
        "hs_norm_estimate": s.hs_norm,
    });
    finish(result, vec![])
}

fn backflow_constant(a: &BackflowArgs) -> Res<Artifacts> {
    if !(a.nodes_per_x > 0.0) {
        return Err(CliError::usage("nodes-per-x must be positive"));
    }
    if a.xs.is_empty() {
        return Err(CliError::usage("need at least one X"));
    }
    let points: Vec<LambdaPoint> = std::thread::scope(|s| {
        let handles: Vec<_> = a
            .xs
            .iter()
            .map(|&x| s.spawn(move || lambda_of_x(x, Some((x * a.nodes_per_x).ceil().max(1.0) as usize))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(qibound::Error::NonConvergence("worker panicked".into()))))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.x_max, p.lambda)).collect();
    let mut files = vec![(
        "lambda_points.dat".to_string(),
        columns(pairs.iter().map(|(x, l)| [*x, *l]).collect::<Vec<_>>().iter().map(|r| &r[..])),
    )];
    let fit = if pairs.len() >= 3 {
        let f = fit_inverse_sqrt(&pairs)?;
        let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
        let curve: Vec<[f64; 2]> =
            linspace(lo, hi, 200)?.into_iter().map(|x| [x, f.eval(x)]).collect();
        files.push(("lambda_fit.dat".to_string(), columns(curve.iter().map(|r| &r[..]))));
        json!({ "a": f.a, "b": f.b, "residuals": f.residuals, "max_pct_residual": f.max_pct_residual })
    } else {
        Value::Null
    };
    let result = json!({
        "command": "backflow-constant",
        "units": "dimensionless probability; X is the dimensionless truncation",
        "points": points.iter().map(|p| json!({ "X": p.x_max, "nodes": p.nodes, "lambda": p.lambda })).collect::<Vec<_>>(),
        "fit": fit,
    });
    finish(result, files)
}

fn evolve(a: &EvolveArgs) -> Res<Artifacts> {
    let w = Wavepacket::new(a.k0)?;
    let grid = linspace(a.x_min, a.x_max, a.points)?;
    let mut files = Vec::new();
    let mut frames = Vec::new();
    for (i, &t) in a.times.iter().enumerate() {
        let rho = evolve_free(&w, t, a.hbar, a.mass, &grid);
        let rows: Vec<[f64; 2]> = grid.iter().zip(&rho).map(|(x, r)| [*x, *r]).collect();
        let name = format!("density_{i}.dat");
        files.push((name.clone(), columns(rows.iter().map(|r| &r[..]))));
        frames.push(json!({ "t": t, "file": name, "left_probability": left_probability(&w, t, a.hbar, a.mass) }));
    }
    let result = json!({
        "command": "evolve",
        "units": "x in length units, density in 1/length, probabilities dimensionless",
        "k0": a.k0,
        "hbar": a.hbar,
        "mass": a.mass,
        "frames": frames,
        "flux_at_origin_t0": wavepacket_flux_at_zero(&w, a.hbar, a.mass),
        "flux_at_origin_t0_closed_form": flux_at_zero_closed_form(a.k0, a.hbar, a.mass),
    });
    finish(result, files)
}

fn wigner(a: &WignerArgs) -> Res<Artifacts> {
    if !(a.hbar > 0.0 && a.mass > 0.0 && a.half_width > 0.0) {
        return Err(CliError::usage("hbar, mass and half-width must be positive"));
    }
    // oscillator states with ω = 1
    let beta = (a.mass / a.hbar).sqrt();
    let coeffs: &[f64] = match a.state.as_str() {
        "ground" => &[1.0],
        "excited" => &[0.0, 1.0],
        "superposition" => &[1.0, 1.0],
        other => return Err(CliError::usage(format!("state must be ground, excited or superposition, got '{other}'"))),
    };
    let psi = |x: f64| {
        let phi = oscillator_eigenfunctions(coeffs.len() - 1, beta * x);
        Complex64::new(beta.sqrt() * coeffs.iter().zip(phi).map(|(c, p)| c * p).sum::<f64>(), 0.0)
    };
    let state = StateGrid::sample(-a.half_width, a.half_width, a.points, a.hbar, psi)?;
    let w = wigner_transform(&state, MomentumGrid::nyquist(&state))?;
    let potential = |x: f64| 0.5 * a.mass * x * x;
    let rho_h = energy_density(&state, potential, a.mass)?;
    let xs = state.xs();
    let chi: Vec<f64> = xs.iter().map(|x| (-4.0 * x * x).exp()).collect();
    let kb = kinematical_bound(xs[0], state.dx(), &chi, potential, a.mass, a.hbar)?;
    let smeared = smeared_energy(&state, &chi, potential, a.mass)?;

    let mut dump = Vec::new();
    w.write_to(&mut dump)?;
    let marg = w.position_marginal();
    let density = state.density();
    let rows: Vec<[f64; 4]> = (0..xs.len()).map(|i| [xs[i], density[i], marg[i], rho_h[i]]).collect();
    let files = vec![
        ("wigner.dat".to_string(), dump),
        ("densities.dat".to_string(), columns(rows.iter().map(|r| &r[..]))),
    ];
    let result = json!({
        "command": "wigner",
        "state": a.state,
        "units": "W in 1/(length momentum); densities.dat columns: x, |psi|^2, position marginal, energy density",
        "grid_points": xs.len(),
        "momentum_points": w.p.len,
        "total": w.total(),
        "min": w.min(),
        "imag_residue": w.imag_residue,
        "aliased_fraction": w.aliased_fraction,
        "aliasing_suspected": w.aliasing_suspected(),
        "chi": "exp(-4 x^2)",
        "smeared_energy": smeared,
        "kinematical_bound": { "sharp": kb.sharp, "weaker": kb.weaker, "argmin": kb.argmin },
    });
    finish(result, files)
}

fn osc_bound(a: &OscArgs) -> Res<Artifacts> {
    let fam = family(&a.family, a.lambda)?;
    let weight = FrequencyWeight::from_family(&fam);
    let series = OscillatorSeries::new(&weight, a.n_max, a.hbar, a.omega, a.mass)?;
    let xs = linspace(a.x_min, a.x_max, a.points)?;
    let rows: Vec<[f64; 2]> = xs.iter().map(|&x| [x, series.bound_at(x)]).collect();
    let min = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    let result = json!({
        "command": "osc-bound",
        "family": fam.kind().name(),
        "units": "energy density (energy/length)",
        "lambda": a.lambda,
        "n_max": a.n_max,
        "alphas": series.alphas,
        "tail_estimate": series.tail_estimate,
        "bound_at_origin": series.bound_at(0.0),
        "min_bound": min,
        "file": "osc_bound.dat",
    });
    finish(result, vec![("osc_bound.dat".into(), columns(rows.iter().map(|r| &r[..])))])
}

fn sweep(a: &SweepArgs) -> Res<Artifacts> {
    let fam = family(&a.family, 1.0)?;
    let (kernel, quantity) = match a.kernel.as_str() {
        "j" | "J" => (j_kernel(&fam), SweepQuantity::MinEigenvalue),
        "t" | "T" => (t_kernel(&fam), SweepQuantity::TopSingularValue),
        other => return Err(CliError::usage(format!("kernel must be 't' or 'j', got '{other}'"))),
    };
    let table = convergence_sweep(&kernel, &a.ks, a.density, quantity, a.precision)?;
    let rows: Vec<[f64; 3]> = table.rows.iter().map(|r| [r.k_trunc, r.nodes as f64, r.value]).collect();
    let result = json!({
        "command": "sweep",
        "family": fam.kind().name(),
        "kernel": kernel.name(),
        "units": "dimensionless (unit-width sampling function, hbar = m = 1)",
        "rows": table.rows.iter().map(|r| json!({ "K": r.k_trunc, "nodes": r.nodes, "value": r.value, "plateau": r.plateau })).collect::<Vec<_>>(),
        "plateau_at": table.plateau_at,
    });
    finish(result, vec![("sweep.dat".into(), columns(rows.iter().map(|r| &r[..])))])
}

fn run_verify(a: &VerifyArgs) -> Res<(Artifacts, bool)> {
    let manifest = match &a.manifest {
        Some(p) => ReferenceManifest::load(p)?,
        None => ReferenceManifest::builtin(),
    };
    let manifest = manifest.filtered(&a.only);
    if manifest.entries.is_empty() {
        return Err(CliError::usage("no manifest entries selected"));
    }
    let rows = verify(&manifest);
    let all = rows.iter().all(|r| r.pass);
    for r in &rows {
        let got = r.computed.map_or_else(|| "-".to_string(), |v| format!("{v:.12e}"));
        let note = r.error.as_deref().unwrap_or("");
        eprintln!("{} {:<42} expected {:.12e} got {} {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.expected, got, note);
    }
    let result = json!({
        "command": "verify",
        "units": "each entry in the units of its quantity",
        "all_pass": all,
        "entries": rows,
    });
    Ok((finish(result, vec![])?, all))
}

