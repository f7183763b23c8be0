use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Nodes and positive weights on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
}

impl QuadratureRule {
    /// Builds a rule after checking ordering, positivity and containment.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return invalid(format!("bad interval [{lo}, {hi}]"));
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return invalid("nodes and weights must be nonempty and of equal length");
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return invalid("nodes must be strictly increasing");
        }
        if nodes[0] < lo || nodes[nodes.len() - 1] > hi {
            return invalid("nodes must lie inside the interval");
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return invalid("weights must be positive and finite");
        }
        Ok(Self { nodes, weights, interval })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of the rule on `[lo, hi]`. Endpoint nodes land exactly on
    /// the new endpoints.
    pub fn mapped(&self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return invalid(format!("mapped: lo = {lo} must be below hi = {hi}"));
        }
        let (a, b) = self.interval;
        let scale = (hi - lo) / (b - a);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let nodes = self
            .nodes
            .iter()
            .map(|&x| {
                if x == a {
                    lo
                } else if x == b {
                    hi
                } else {
                    mid + half * ((2.0 * x - a - b) / (b - a))
                }
            })
            .collect();
        let weights = self.weights.iter().map(|w| w * scale).collect();
        Self::new(nodes, weights, (lo, hi))
    }
}

/// Clenshaw–Curtis rule with `n + 1` Chebyshev extreme points on `[-1, 1]`,
/// weights from the explicit cosine sum.
#[allow(clippy::needless_range_loop)]
pub fn clenshaw_curtis(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return invalid("Clenshaw-Curtis needs n >= 1");
    }
    let nf = n as f64;
    // x_j = -cos(j pi / n), written as a sine so that x_{n-j} = -x_j exactly
    let nodes: Vec<f64> = (0..=n)
        .map(|j| (PI * (2.0 * j as f64 - nf) / (2.0 * nf)).sin())
        .collect();

    // cos(pi m / n) for m in 0..2n, mirrored so both halves agree bitwise
    let mut cos_tab = vec![0.0; 2 * n];
    for m in 0..=n {
        cos_tab[m] = (PI * m as f64 / nf).cos();
    }
    for m in n + 1..2 * n {
        cos_tab[m] = cos_tab[2 * n - m];
    }

    let half = n / 2;
    let mut weights = vec![0.0; n + 1];
    for j in 0..=half {
        let mut s = 0.0;
        for k in 1..=half {
            let b = if 2 * k == n { 1.0 } else { 2.0 };
            let m = (2 * k * j) % (2 * n);
            s += b * cos_tab[m] / (4.0 * (k * k) as f64 - 1.0);
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        weights[j] = c / nf * (1.0 - s);
    }
    for j in half + 1..=n {
        weights[j] = weights[n - j];
    }
    QuadratureRule::new(nodes, weights, (-1.0, 1.0))
}

/// Copies `base` onto `c` equal panels of `[lo, hi]`. When the base rule
/// contains both endpoints of its interval, shared panel endpoints are merged
/// and their weights summed.
pub fn repeated_panels(base: &QuadratureRule, c: usize, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if !(lo < hi) {
        return invalid(format!("repeated_panels: lo = {lo} must be below hi = {hi}"));
    }
    if c == 0 {
        return invalid("repeated_panels: need at least one panel");
    }
    let (a, b) = base.interval();
    let closed = base.nodes()[0] == a && base.nodes()[base.len() - 1] == b;
    let h = (hi - lo) / c as f64;
    let mut nodes = Vec::with_capacity(c * base.len());
    let mut weights = Vec::with_capacity(c * base.len());
    for i in 0..c {
        let p_lo = lo + h * i as f64;
        let p_hi = if i + 1 == c { hi } else { lo + h * (i + 1) as f64 };
        let panel = base.mapped(p_lo, p_hi)?;
        let mut skip = 0;
        if closed && i > 0 {
            *weights.last_mut().unwrap() += panel.weights()[0];
            skip = 1;
        }
        nodes.extend_from_slice(&panel.nodes()[skip..]);
        weights.extend_from_slice(&panel.weights()[skip..]);
    }
    QuadratureRule::new(nodes, weights, (lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_rule_matches_hand_solution() {
        // exactness on 1, x, x^2 with nodes -1, 0, 1 forces 1/3, 4/3, 1/3
        let r = clenshaw_curtis(2).unwrap();
        assert_eq!(r.nodes(), &[-1.0, 0.0, 1.0]);
        let expect = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (w, e) in r.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn one_interval_rule_is_trapezoid() {
        let r = clenshaw_curtis(1).unwrap();
        assert_eq!(r.weights(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_is_rejected() {
        assert!(clenshaw_curtis(0).is_err());
    }

    #[test]
    fn polynomial_exactness_even_n() {
        for n in [2usize, 4, 8, 16] {
            let r = clenshaw_curtis(n).unwrap();
            for k in 0..=n {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-14, "n={n} k={k} got {got}");
            }
        }
    }

    #[test]
    fn single_panel_on_unit_interval() {
        let r = repeated_panels(&clenshaw_curtis(2).unwrap(), 1, 0.0, 1.0).unwrap();
        assert_eq!(r.nodes(), &[0.0, 0.5, 1.0]);
        let expect = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        for (w, e) in r.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn shared_endpoints_merge() {
        let r = repeated_panels(&clenshaw_curtis(2).unwrap(), 2, 0.0, 2.0).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.nodes(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!((r.weights()[2] - (1.0 / 6.0 + 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        let base = clenshaw_curtis(4).unwrap();
        assert!(repeated_panels(&base, 2, 1.0, 1.0).is_err());
        assert!(repeated_panels(&base, 2, 2.0, 1.0).is_err());
    }

    #[test]
    fn rule_validation() {
        assert!(QuadratureRule::new(vec![0.0, 0.0], vec![1.0, 1.0], (0.0, 1.0)).is_err());
        assert!(QuadratureRule::new(vec![0.0, 0.5], vec![1.0, -1.0], (0.0, 1.0)).is_err());
        assert!(QuadratureRule::new(vec![0.0, 1.5], vec![1.0, 1.0], (0.0, 1.0)).is_err());
    }
}
