//! Wigner functions on uniform 1-D grids and the phase-space densities built
//! from them.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest grid edge accepted by the direct transform.
pub const MAX_GRID: usize = 512;

const NORM_TOL: f64 = 1e-10;
const EDGE_TOL: f64 = 1e-8;

/// Wavefunction samples on `x_i = start + i·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid {
    start: f64,
    dx: f64,
    amps: Vec<Complex64>,
    hbar: f64,
}

impl StateGrid {
    /// Validating constructor: unit discrete norm and negligible edges.
    pub fn new(start: f64, dx: f64, amps: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if !(dx > 0.0) || !(hbar > 0.0) || !start.is_finite() {
            return invalid("grid spacing and ħ must be positive");
        }
        if amps.len() < 5 {
            return invalid("a state grid needs at least 5 points");
        }
        let g = Self { start, dx, amps, hbar };
        let norm = g.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!("state not normalized: Δx Σ|ψ|² = {norm}")));
        }
        let edge = g.amps[0].norm().max(g.amps[g.len() - 1].norm());
        if edge > EDGE_TOL {
            return Err(Error::Precondition(format!("state does not decay at the grid edge: |ψ| = {edge:e}")));
        }
        Ok(g)
    }

    /// Samples `f` at `n` points spanning `[lo, hi]` and rescales to unit norm.
    pub fn sample(lo: f64, hi: f64, n: usize, hbar: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if !(hi > lo) || n < 5 {
            return invalid("need hi > lo and at least 5 points");
        }
        let dx = (hi - lo) / (n - 1) as f64;
        let mut amps: Vec<Complex64> = (0..n).map(|i| f(lo + i as f64 * dx)).collect();
        let norm = dx * amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("sampled state has zero or non-finite norm");
        }
        let s = norm.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= s);
        Self::new(lo, dx, amps, hbar)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.dx * self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `ψ̂(k) = ∫ψ e^{-ikx} dx` by the trapezoid sum.
    pub fn fourier(&self, k: f64) -> Complex64 {
        let s: Complex64 = (0..self.len()).map(|i| self.amps[i] * Complex64::from_polar(1.0, -k * self.x(i))).sum();
        s * self.dx
    }

    /// Fourth-order first and second derivatives, one-sided near the edges.
    pub fn derivatives(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let f = &self.amps;
        let n = f.len();
        let h = self.dx;
        let mut d1 = vec![Complex64::new(0.0, 0.0); n];
        let mut d2 = vec![Complex64::new(0.0, 0.0); n];
        for i in 2..n - 2 {
            d1[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
            d2[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
        }
        if n >= 6 {
            const D1_0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
            const D1_1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
            const D2_0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
            const D2_1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
            let stencil = |c: &[f64], at: &dyn Fn(usize) -> Complex64| -> Complex64 {
                c.iter().enumerate().map(|(j, &w)| w * at(j)).sum()
            };
            for (i, (c1, c2)) in [(&D1_0, &D2_0), (&D1_1, &D2_1)].into_iter().enumerate() {
                let shift = |j: usize| f[j];
                d1[i] = stencil(c1, &shift) / (12.0 * h);
                d2[i] = stencil(c2, &shift) / (12.0 * h * h);
                let mirror = |j: usize| f[n - 1 - j];
                d1[n - 1 - i] = -stencil(c1, &mirror) / (12.0 * h);
                d2[n - 1 - i] = stencil(c2, &mirror) / (12.0 * h * h);
            }
        }
        (d1, d2)
    }
}

/// Uniform momentum grid `p_j = start + j·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl MomentumGrid {
    /// One full period of the grid transform: `[-πħ/2Δx, πħ/2Δx)` with as
    /// many points as the x-grid. The position marginal is exact on it.
    pub fn nyquist(state: &StateGrid) -> Self {
        let n = state.len();
        let half = PI * state.hbar / (2.0 * state.dx);
        Self { start: -half, step: 2.0 * half / n as f64, len: n }
    }

    pub fn p(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }
}

/// `W(x_i, p_j)` stored row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub x_start: f64,
    pub dx: f64,
    pub nx: usize,
    pub p: MomentumGrid,
    pub values: Vec<f64>,
    /// Largest |Im| discarded from the transform.
    pub imag_residue: f64,
    /// Fraction of spectral weight beyond 90% of the p-grid edge.
    pub aliased_fraction: f64,
}

impl PhaseSpaceGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.len + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p.len..(i + 1) * self.p.len]
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_start + i as f64 * self.dx
    }

    pub fn aliasing_suspected(&self) -> bool {
        self.aliased_fraction > 1e-10
    }

    /// `(ΔxΔp/2π) Σ W`.
    pub fn total(&self) -> f64 {
        self.dx * self.p.step / (2.0 * PI) * self.values.iter().sum::<f64>()
    }

    /// `(Δp/2π) Σ_j W(x_i, p_j)` for each i.
    pub fn position_marginal(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.p.step / (2.0 * PI) * self.row(i).iter().sum::<f64>()).collect()
    }

    /// `Δx Σ_i W(x_i, p_j)` for each j.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        (0..self.p.len).map(|j| self.dx * (0..self.nx).map(|i| self.get(i, j)).sum::<f64>()).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Plain-text dump: a header line `dx dp nx np x0 p0`, then one row of W
    /// per x node.
    pub fn write_to(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{} {} {} {} {} {}", self.dx, self.p.step, self.nx, self.p.len, self.x_start, self.p.start)?;
        for i in 0..self.nx {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("malformed grid dump: {m}"));
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?.map_err(|e| bad(&e.to_string()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 {
            return Err(bad("header needs 6 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad(s));
        let (dx, dp, nx, np, x0, p0) = (num(h[0])?, num(h[1])?, int(h[2])?, int(h[3])?, num(h[4])?, num(h[5])?);
        let mut values = Vec::with_capacity(nx * np);
        for line in lines {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            for tok in line.split_whitespace() {
                values.push(num(tok)?);
            }
        }
        if values.len() != nx * np {
            return Err(bad("value count does not match dimensions"));
        }
        Ok(Self {
            x_start: x0,
            dx,
            nx,
            p: MomentumGrid { start: p0, step: dp, len: np },
            values,
            imag_residue: 0.0,
            aliased_fraction: 0.0,
        })
    }
}

/// `W(x,p) = (2/ħ) ∫ dy e^{2ipy/ħ} ψ̄(x+y) ψ(x-y)`, with y running over grid
/// offsets so that x ± y stay on nodes.
pub fn wigner_transform(state: &StateGrid, p: MomentumGrid) -> Result<PhaseSpaceGrid> {
    let n = state.len();
    if n > MAX_GRID || p.len > MAX_GRID {
        return Err(Error::NodeBudget { requested: n.max(p.len), cap: MAX_GRID });
    }
    if p.len == 0 || !(p.step > 0.0) {
        return invalid("momentum grid must be nonempty with positive step");
    }
    let psi = state.amplitudes();
    let hbar = state.hbar;
    let mut values = Vec::with_capacity(n * p.len);
    let mut imag_residue = 0.0f64;
    // e^{2 i p_j y_m/ħ} with y_m = m·dx, built by recurrence per p
    for i in 0..n {
        let reach = i.min(n - 1 - i);
        let prods: Vec<Complex64> = (0..=reach).map(|m| psi[i + m].conj() * psi[i - m]).collect();
        for j in 0..p.len {
            let theta = 2.0 * p.p(j) * state.dx / hbar;
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, pr) in prods.iter().enumerate() {
                acc += pr * Complex64::from_polar(1.0, theta * m as f64);
                if m > 0 {
                    acc += psi[i - m].conj() * psi[i + m] * Complex64::from_polar(1.0, -theta * m as f64);
                }
            }
            let w = acc * (2.0 * state.dx / hbar);
            imag_residue = imag_residue.max(w.im.abs());
            values.push(w.re);
        }
    }
    Ok(PhaseSpaceGrid {
        x_start: state.x(0),
        dx: state.dx,
        nx: n,
        p,
        values,
        imag_residue,
        aliased_fraction: aliased_fraction(state, &p),
    })
}

/// Share of `∫|ψ̂|²` lying beyond 90% of the momentum-grid half-width,
/// estimated on a fine wavenumber grid.
fn aliased_fraction(state: &StateGrid, p: &MomentumGrid) -> f64 {
    let kmax = PI / state.dx;
    let edge = 0.9 * p.p(0).abs().max(p.p(p.len - 1).abs()) / state.hbar;
    let m = 2 * state.len();
    let dk = 2.0 * kmax / m as f64;
    let (mut inside, mut outside) = (0.0, 0.0);
    for j in 0..m {
        let k = -kmax + (j as f64 + 0.5) * dk;
        let s = state.fourier(k).norm_sqr();
        if k.abs() > edge {
            outside += s;
        } else {
            inside += s;
        }
    }
    outside / (inside + outside)
}

/// `⟨ρ_F(x_i)⟩ = (1/2π) ∫ F(x_i, p) W(x_i, p) dp` on the grid.
pub fn density_for_symbol(w: &PhaseSpaceGrid, symbol: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..w.nx)
        .map(|i| {
            let x = w.x(i);
            let s: f64 = w.row(i).iter().enumerate().map(|(j, v)| symbol(x, w.p.p(j)) * v).sum();
            s * w.p.step / (2.0 * PI)
        })
        .collect()
}

/// `(ħ²/4m)(|ψ'|² - Re ψ̄ψ'') + V|ψ|²` on the grid.
pub fn energy_density(state: &StateGrid, potential: impl Fn(f64) -> f64, mass: f64) -> Result<Vec<f64>> {
    if !(mass > 0.0) {
        return invalid("mass must be positive");
    }
    let (d1, d2) = state.derivatives();
    let c = state.hbar * state.hbar / (4.0 * mass);
    Ok((0..state.len())
        .map(|i| {
            let psi = state.amps[i];
            c * (d1[i].norm_sqr() - (psi.conj() * d2[i]).re) + potential(state.x(i)) * psi.norm_sqr()
        })
        .collect())
}

/// Lower bounds on `∫ χ ⟨ρ_H⟩ dx` over normalized states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicalBound {
    /// `inf_x (-ħ²χ''/8m + Vχ)`.
    pub sharp: f64,
    /// `(1/4) inf_x (Hχ)`, valid when V ≥ 0.
    pub weaker: f64,
    pub argmin: f64,
}

/// χ sampled at `start + i·dx`.
pub fn kinematical_bound(
    start: f64,
    dx: f64,
    chi: &[f64],
    potential: impl Fn(f64) -> f64,
    mass: f64,
    hbar: f64,
) -> Result<KinematicalBound> {
    if !(mass > 0.0) || !(hbar > 0.0) || !(dx > 0.0) {
        return invalid("m, ħ and dx must be positive");
    }
    if chi.len() < 6 {
        return invalid("χ needs at least 6 samples");
    }
    if let Some(v) = chi.iter().find(|v| !(**v >= 0.0)) {
        return invalid(format!("weight must be nonnegative, found {v}"));
    }
    if chi.iter().all(|v| *v == 0.0) {
        return Ok(KinematicalBound { sharp: 0.0, weaker: 0.0, argmin: start });
    }
    let amps = chi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // reuse the derivative stencils without the state invariants
    let g = StateGrid { start, dx, amps, hbar };
    let (_, d2) = g.derivatives();
    let k = hbar * hbar / mass;
    let mut best = KinematicalBound { sharp: f64::INFINITY, weaker: f64::INFINITY, argmin: start };
    for (i, (&c, dd)) in chi.iter().zip(&d2).enumerate() {
        let x = g.x(i);
        let v = potential(x) * c;
        let sharp = -k * dd.re / 8.0 + v;
        if sharp < best.sharp {
            best.sharp = sharp;
            best.argmin = x;
        }
        best.weaker = best.weaker.min(0.25 * (-k * dd.re / 2.0 + v));
    }
    Ok(best)
}

/// `∫ χ ⟨ρ_H⟩ dx` for a state on the same grid as χ.
pub fn smeared_energy(state: &StateGrid, chi: &[f64], potential: impl Fn(f64) -> f64, mass: f64) -> Result<f64> {
    if chi.len() != state.len() {
        return invalid("χ and the state must share a grid");
    }
    let rho = energy_density(state, potential, mass)?;
    Ok(state.dx * chi.iter().zip(&rho).map(|(c, r)| c * r).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub density: f64,
}

/// Energy density at x0 of `ψ_λ(y) = λ^{-1/2} ψ(x0 + (y - x0)/λ)` for each λ.
/// `half_width` and `n` describe the λ = 1 grid centred on x0; it shrinks
/// with λ so the resolution follows the state.
#[allow(clippy::too_many_arguments)]
pub fn scaling_divergence_demo(
    psi: impl Fn(f64) -> Complex64,
    x0: f64,
    half_width: f64,
    n: usize,
    lambdas: &[f64],
    potential: impl Fn(f64) -> f64,
    mass: f64,
    hbar: f64,
) -> Result<Vec<ScalingPoint>> {
    let n = n | 1; // odd, so x0 is a node
    let mid = n / 2;
    let base = StateGrid::sample(x0 - half_width, x0 + half_width, n, hbar, &psi)?;
    let (d1, d2) = base.derivatives();
    let scale = base.amps[mid].norm().max(1e-300);
    if d1[mid].norm() * half_width > 1e-6 * scale {
        return Err(Error::Precondition(format!("ψ'(x0) must vanish, got {:e}", d1[mid].norm())));
    }
    if !((base.amps[mid].conj() * d2[mid]).re > 0.0) {
        return Err(Error::Precondition("need Re ψ̄ψ''(x0) > 0".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0) {
                return invalid(format!("scale must be positive, got {lambda}"));
            }
            let s = 1.0 / lambda.sqrt();
            let grid = StateGrid::sample(x0 - lambda * half_width, x0 + lambda * half_width, n, hbar, |y| {
                s * psi(x0 + (y - x0) / lambda)
            })?;
            let rho = energy_density(&grid, &potential, mass)?;
            Ok(ScalingPoint { lambda, density: rho[mid] })
        })
        .collect()
}
