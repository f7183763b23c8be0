use std::f64::consts::PI;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const CF_DEPTH: usize = 80;

/// Error function. Series for |x| < 2, continued fraction beyond, saturated
/// to ±1 for |x| > 6.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let a = x.abs();
    let v = if a < 2.0 {
        erf_series(a)
    } else if a > 6.0 {
        1.0
    } else {
        1.0 - erfc_cf(a)
    };
    v.copysign(x)
}

/// Complementary error function, accurate in relative terms for large x.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else if x > 27.0 {
        0.0
    } else {
        erfc_cf(x)
    }
}

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!, all terms positive
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

// erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_cf(x: f64) -> f64 {
    let mut t = x;
    for k in (1..=CF_DEPTH).rev() {
        t = x + 0.5 * k as f64 / t;
    }
    (-x * x).exp() / (PI.sqrt() * t)
}

/// sin(z)/z with the removable point filled.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0)
    } else {
        z.sin() / z
    }
}

const RESCALE: f64 = 1e150;

/// Harmonic-oscillator eigenfunction with m = ω = ħ = 1.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> f64 {
    let mut out = 0.0;
    run_recurrence(n, x, |k, v| {
        if k == n {
            out = v;
        }
    });
    out
}

/// `φ_0(x), …, φ_{n_max}(x)` from one pass of the recurrence.
pub fn oscillator_eigenfunctions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    run_recurrence(n_max, x, |k, v| out[k] = v);
    out
}

// Runs the three-term recurrence on e^{x^2/2}-scaled values, pulling large
// factors into a log-scale so that neither overflow nor underflow occurs.
fn run_recurrence(n: usize, x: f64, mut emit: impl FnMut(usize, f64)) {
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    emit(0, cur * log_scale.exp());
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        emit(k + 1, cur * log_scale.exp());
    }
}
