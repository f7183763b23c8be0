use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::quadrature::{clenshaw_curtis, QuadratureRule};
use crate::error::{invalid, Error, Result};

/// Caller-declared tail behaviour of an integrand on `[lo, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Decays at least like `exp(-u / scale)`.
    Exponential { scale: f64 },
    /// Decays like a power of `u`, optionally times a periodic factor with
    /// the given period.
    Algebraic { period: Option<f64> },
}

const MAX_PANELS: usize = 400_000;

struct Pair {
    fine: QuadratureRule,
    coarse_w: Vec<f64>,
}

fn pair() -> &'static Pair {
    static P: OnceLock<Pair> = OnceLock::new();
    P.get_or_init(|| Pair {
        fine: clenshaw_curtis(32).expect("n > 0"),
        coarse_w: clenshaw_curtis(16).expect("n > 0").weights().to_vec(),
    })
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn eval_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let p = pair();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fine = 0.0;
    let mut coarse = 0.0;
    for (j, (&x, &w)) in p.fine.nodes().iter().zip(p.fine.weights()).enumerate() {
        let t = if j == 0 {
            a
        } else if j == 32 {
            b
        } else {
            mid + half * x
        };
        let v = f(t);
        fine += w * v;
        if j % 2 == 0 {
            coarse += p.coarse_w[j / 2] * v;
        }
    }
    Panel { a, b, value: fine * half, err: ((fine - coarse) * half).abs() }
}

/// Globally adaptive Clenshaw–Curtis (16/32 nested pair) on `[a, b]`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return invalid(format!("integrate_adaptive: bad interval [{a}, {b}]"));
    }
    if a == b {
        return Ok(0.0);
    }
    adaptive_inner(&mut f, a, b, tol)
}

fn adaptive_inner<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let first = eval_panel(f, a, b);
    let mut err = first.err;
    let mut abs_sum = first.value.abs();
    let mut heap = BinaryHeap::from(vec![first]);
    let min_width = (b - a) * 1e-14;
    while err > tol && err > 1e-15 * abs_sum {
        if heap.len() > MAX_PANELS {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature on [{a}, {b}] exceeded {MAX_PANELS} panels (error estimate {err:e})"
            )));
        }
        let worst = heap.pop().expect("heap nonempty");
        if worst.b - worst.a < min_width {
            if !worst.value.is_finite() || !worst.err.is_finite() {
                return Err(Error::NonConvergence(format!("non-finite integrand near {}", worst.a)));
            }
            // cannot refine further; keep it and see whether the rest is enough
            heap.push(worst);
            let rest: f64 = heap.iter().map(|p| p.err).sum();
            if rest > tol {
                return Err(Error::NonConvergence(format!(
                    "panel [{}, {}] unresolved at minimum width (error estimate {rest:e})",
                    worst.a, worst.b
                )));
            }
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        let l = eval_panel(f, worst.a, m);
        let r = eval_panel(f, m, worst.b);
        err += l.err + r.err - worst.err;
        abs_sum += l.value.abs() + r.value.abs() - worst.value.abs();
        heap.push(l);
        heap.push(r);
        // refresh the running sums now and then to stop drift
        if heap.len() % 64 == 0 {
            err = heap.iter().map(|p| p.err).sum();
            abs_sum = heap.iter().map(|p| p.value.abs()).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    if !value.is_finite() {
        return Err(Error::NonConvergence(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(value)
}

/// Integral of `f` over `[lo, inf)`.
///
/// Exponential tails use geometrically growing panels and stop once two
/// consecutive panels each contribute less than `tol / 10`. Algebraic tails
/// compute partial integrals up to checkpoints `U_j` (congruent to `lo`
/// modulo the period, if any) and extrapolate them to `1/U = 0` with
/// Neville's scheme.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, lo: f64, decay: Decay, tol: f64) -> Result<f64> {
    if !lo.is_finite() || !(tol > 0.0) {
        return invalid("integrate_semi_infinite: lo must be finite and tol positive");
    }
    match decay {
        Decay::Exponential { scale } => exponential_tail(&mut f, lo, scale, tol),
        Decay::Algebraic { period } => algebraic_tail(&mut f, lo, period, tol),
    }
}

fn exponential_tail<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, scale: f64, tol: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return invalid("exponential decay scale must be positive");
    }
    let mut total = 0.0;
    let mut small = 0;
    let mut start = lo;
    let mut width = scale;
    for _ in 0..200 {
        let end = start + width;
        let piece = adaptive_inner(f, start, end, tol / 64.0)?;
        total += piece;
        if piece.abs() < tol / 10.0 {
            small += 1;
            if small >= 2 {
                return Ok(total);
            }
        } else {
            small = 0;
        }
        start = end;
        width *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "exponential tail from {lo} did not fall below {tol:e}"
    )))
}

const MAX_LEVELS: usize = 13;
const NEVILLE_POINTS: usize = 6;

fn neville_at_zero(t: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (t[i + m] * p[i] - t[i] * p[i + 1]) / (t[i + m] - t[i]);
        }
    }
    p[0]
}

fn algebraic_tail<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, period: Option<f64>, tol: f64) -> Result<f64> {
    if let Some(p) = period {
        if !(p > 0.0) {
            return invalid("oscillation period must be positive");
        }
    }
    // step between consecutive sub-panels, and the first checkpoint distance
    let step = period.unwrap_or(1.0_f64.max(lo.abs() / 8.0));
    let want = (lo + 8.0 * step).max(lo.abs() + 8.0 * step).max(1.0) - lo;
    let n0 = (want / step).ceil().max(8.0) as usize;

    let integrate_span = |f: &mut F, from: f64, periods_from: usize, periods_to: usize| -> Result<f64> {
        let mut s = 0.0;
        if period.is_some() {
            for k in periods_from..periods_to {
                let a = if k == periods_from { from } else { lo + step * k as f64 };
                let b = lo + step * (k + 1) as f64;
                s += adaptive_inner(f, a, b, tol * 1e-3)?;
            }
        } else {
            let b = lo + step * periods_to as f64;
            s += adaptive_inner(f, from, b, tol * 1e-3)?;
        }
        Ok(s)
    };

    let mut ts = Vec::new();
    let mut partial = Vec::new();
    let mut acc = integrate_span(f, lo, 0, n0)?;
    let mut n = n0;
    let mut prev: Option<f64> = None;
    for level in 0..MAX_LEVELS {
        ts.push(1.0 / (lo + step * n as f64));
        partial.push(acc);
        if level >= 2 {
            let k = ts.len().min(NEVILLE_POINTS);
            let est = neville_at_zero(&ts[ts.len() - k..], &partial[partial.len() - k..]);
            if let Some(p) = prev {
                if (est - p).abs() <= tol && level >= 3 {
                    return Ok(est);
                }
            }
            prev = Some(est);
        }
        let next = 2 * n;
        acc += integrate_span(f, lo + step * n as f64, n, next)?;
        n = next;
    }
    Err(Error::NonConvergence(format!(
        "algebraic tail from {lo} did not settle to {tol:e} after {MAX_LEVELS} levels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_closed_forms() {
        let v = integrate_semi_infinite(|u| (-u).exp(), 0.0, Decay::Exponential { scale: 1.0 }, 1e-13).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        let v = integrate_semi_infinite(|u| u * (-u * u).exp(), 0.0, Decay::Exponential { scale: 1.0 }, 1e-13)
            .unwrap();
        assert!((v - 0.5).abs() < 1e-13);
    }

    #[test]
    fn power_law_tail() {
        // int_1^inf u^-3 du = 1/2
        let v = integrate_semi_infinite(|u| u.powi(-3), 1.0, Decay::Algebraic { period: None }, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-11, "{v}");
    }

    #[test]
    fn oscillating_power_law_tail() {
        // int_0^inf (1 - cos u)/u^2 du = pi/2
        let f = |u: f64| {
            if u < 1e-4 {
                0.5 - u * u / 24.0
            } else {
                (1.0 - u.cos()) / (u * u)
            }
        };
        let v = integrate_semi_infinite(
            f,
            0.0,
            Decay::Algebraic { period: Some(2.0 * std::f64::consts::PI) },
            1e-11,
        )
        .unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{v}");
    }

    #[test]
    fn adaptive_handles_kink() {
        let v = integrate_adaptive(|x: f64| x.abs(), -1.0, 2.0, 1e-13).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let r = integrate_semi_infinite(|u| 1.0 / (1.0 + u), 0.0, Decay::Algebraic { period: None }, 1e-10);
        assert!(r.is_err());
    }
}
