//! Nyström discretization of kernels on `[0, K]²` and their spectral data.

mod dense;
mod lanczos;

use std::fmt;
use std::sync::Arc;

pub use dense::{DenseMatrix, Tridiagonal};
pub use lanczos::{lanczos_extreme, End};

use crate::error::{invalid, Error, Result};
use crate::numerics::{clenshaw_curtis, integrate_adaptive, integrate_semi_infinite, repeated_panels, Decay, QuadratureRule};

pub const DEFAULT_NODE_CAP: usize = 20_000;
/// Above this dimension extreme eigenvalues default to Lanczos.
pub const DENSE_LIMIT: usize = 4096;

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct DiagonalRule {
    band: f64,
    eval: Fn2,
}

#[derive(Clone)]
struct SumProfile {
    h: Fn1,
    decay: Decay,
}

/// A real kernel on the quadrant with symmetry and singularity metadata.
#[derive(Clone)]
pub struct KernelFunction {
    name: String,
    g: Fn2,
    symmetric: bool,
    diagonal: Option<DiagonalRule>,
    sum_profile: Option<SumProfile>,
}

impl fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelFunction")
            .field("name", &self.name)
            .field("symmetric", &self.symmetric)
            .field("diagonal_band", &self.diagonal.as_ref().map(|d| d.band))
            .field("sum_profile", &self.sum_profile.is_some())
            .finish()
    }
}

impl KernelFunction {
    pub fn new(name: impl Into<String>, symmetric: bool, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), g: Arc::new(g), symmetric, diagonal: None, sum_profile: None }
    }

    /// Evaluator used whenever `|x - y| < band`.
    pub fn with_diagonal_rule(mut self, band: f64, rule: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.diagonal = Some(DiagonalRule { band, eval: Arc::new(rule) });
        self
    }

    /// Declares that `(|G(k,k')|² + |G(k',k)|²)/2 = h(k + k')`, with the
    /// decay of `s h(s)` for the semi-infinite reduction.
    pub fn with_sum_profile(mut self, h: impl Fn(f64) -> f64 + Send + Sync + 'static, decay: Decay) -> Self {
        self.sum_profile = Some(SumProfile { h: Arc::new(h), decay });
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_sum_profile(&self) -> bool {
        self.sum_profile.is_some()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.diagonal {
            Some(d) if (x - y).abs() < d.band => (d.eval)(x, y),
            _ => (self.g)(x, y),
        }
    }
}

/// A quadrature rule on `[0, K]` with its Nyström matrix.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    rule: QuadratureRule,
    matrix: DenseMatrix,
    k_trunc: f64,
    symmetric: bool,
}

impl DiscretizedOperator {
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn k_trunc(&self) -> f64 {
        self.k_trunc
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Node layout of a repeated Clenshaw–Curtis rule on `[0, K]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// About `per_unit · K` intervals split evenly over `panels` panels.
    Density { per_unit: f64, panels: usize },
    /// Exactly `total` nodes; `total - 1` must be divisible by `panels`.
    Nodes { total: usize, panels: usize },
}

impl Layout {
    pub fn density(per_unit: f64) -> Self {
        Layout::Density { per_unit, panels: 1 }
    }

    pub fn nodes(total: usize, panels: usize) -> Self {
        Layout::Nodes { total, panels }
    }

    /// Intervals per panel and panel count.
    fn resolve(&self, k_trunc: f64) -> Result<(usize, usize)> {
        match *self {
            Layout::Density { per_unit, panels } => {
                if !(per_unit > 0.0) || panels == 0 {
                    return invalid("density and panel count must be positive");
                }
                let intervals = (per_unit * k_trunc).ceil();
                if intervals < 8.0 {
                    return invalid(format!("density {per_unit} gives fewer than 8 nodes on [0, {k_trunc}]"));
                }
                let per_panel = (intervals / panels as f64).ceil() as usize;
                Ok((per_panel, panels))
            }
            Layout::Nodes { total, panels } => {
                if total < 2 || panels == 0 || (total - 1) % panels != 0 {
                    return invalid(format!("{total} nodes cannot be split into {panels} closed panels"));
                }
                Ok(((total - 1) / panels, panels))
            }
        }
    }

    pub fn node_count(&self, k_trunc: f64) -> Result<usize> {
        let (n, c) = self.resolve(k_trunc)?;
        Ok(n * c + 1)
    }
}

/// Repeated Clenshaw–Curtis rule on `[0, K]` for a layout.
pub fn layout_rule(k_trunc: f64, layout: Layout) -> Result<QuadratureRule> {
    if !(k_trunc > 0.0) || !k_trunc.is_finite() {
        return invalid(format!("truncation K must be positive, got {k_trunc}"));
    }
    let (n, c) = layout.resolve(k_trunc)?;
    repeated_panels(&clenshaw_curtis(n)?, c, 0.0, k_trunc)
}

/// Nyström matrix of `kernel` on `[0, K]` with the given layout, capped at
/// [`DEFAULT_NODE_CAP`] nodes.
pub fn discretize(kernel: &KernelFunction, k_trunc: f64, layout: Layout) -> Result<DiscretizedOperator> {
    discretize_capped(kernel, k_trunc, layout, DEFAULT_NODE_CAP)
}

pub fn discretize_capped(
    kernel: &KernelFunction,
    k_trunc: f64,
    layout: Layout,
    node_cap: usize,
) -> Result<DiscretizedOperator> {
    let requested = layout.node_count(k_trunc)?;
    if requested > node_cap {
        return Err(Error::NodeBudget { requested, cap: node_cap });
    }
    discretize_on(kernel, layout_rule(k_trunc, layout)?)
}

/// Nyström matrix `A_jk = sqrt(w_j w_k) G(ξ_j, ξ_k)` on an arbitrary rule.
pub fn discretize_on(kernel: &KernelFunction, rule: QuadratureRule) -> Result<DiscretizedOperator> {
    let n = rule.len();
    if n > DEFAULT_NODE_CAP {
        return Err(Error::NodeBudget { requested: n, cap: DEFAULT_NODE_CAP });
    }
    let x = rule.nodes();
    let sw: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let mut data = vec![0.0; n * n];
    if kernel.is_symmetric() {
        for i in 0..n {
            for j in 0..=i {
                let v = sw[i] * sw[j] * kernel.eval(x[i], x[j]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = sw[i] * sw[j] * kernel.eval(x[i], x[j]);
            }
        }
    }
    if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonConvergence(format!("kernel produced a non-finite matrix entry ({bad})")));
    }
    let (_, hi) = rule.interval();
    Ok(DiscretizedOperator {
        rule,
        matrix: DenseMatrix::from_row_major(n, data)?,
        k_trunc: hi,
        symmetric: kernel.is_symmetric(),
    })
}

/// The `count` largest singular values, descending.
pub fn singular_values(op: &DiscretizedOperator, count: usize) -> Result<Vec<f64>> {
    singular_values_of(op.matrix(), count)
}

pub fn singular_values_of(a: &DenseMatrix, count: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    if count == 0 || count > n {
        return invalid(format!("cannot take {count} singular values of a dimension-{n} matrix"));
    }
    let eig = if n <= DENSE_LIMIT {
        let mut b = a.gram_lower();
        let t = dense::tridiagonalize_lower(&mut b, n);
        (0..count).map(|i| t.kth_eigenvalue(n - 1 - i)).collect()
    } else {
        let mut tmp = vec![0.0; n];
        lanczos_extreme(
            n,
            |x, y| {
                a.matvec(x, &mut tmp);
                a.matvec_t(&tmp, y);
            },
            count,
            End::Highest,
            1e-14,
            n,
        )?
    };
    Ok(eig.into_iter().map(|l: f64| l.max(0.0).sqrt()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenStrategy {
    /// Dense up to [`DENSE_LIMIT`], Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

pub fn extreme_eigenvalue(op: &DiscretizedOperator, which: Which) -> Result<f64> {
    extreme_eigenvalue_with(op.matrix(), which, EigenStrategy::Auto)
}

/// Smallest or largest eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalue_with(a: &DenseMatrix, which: Which, strategy: EigenStrategy) -> Result<f64> {
    let n = a.dim();
    let asym = a.max_asymmetry();
    if asym > 1e-13 * a.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    let dense = match strategy {
        EigenStrategy::Auto => n <= DENSE_LIMIT,
        EigenStrategy::Dense => true,
        EigenStrategy::Lanczos => false,
    };
    if dense {
        let mut b = a.as_slice().to_vec();
        let t = dense::tridiagonalize_lower(&mut b, n);
        Ok(match which {
            Which::Min => t.kth_eigenvalue(0),
            Which::Max => t.kth_eigenvalue(n - 1),
        })
    } else {
        let end = match which {
            Which::Min => End::Lowest,
            Which::Max => End::Highest,
        };
        Ok(lanczos_extreme(n, |x, y| a.matvec(x, y), 1, end, 1e-13, n)?[0])
    }
}

/// Spectral data of one discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub top_singular_values: Vec<f64>,
    pub min_eigenvalue: Option<f64>,
    pub max_eigenvalue: Option<f64>,
    /// Frobenius norm of the Nyström matrix, the quadrature estimate of the
    /// Hilbert–Schmidt norm on `[0, K]²`.
    pub hs_norm: f64,
}

pub fn spectral_summary(op: &DiscretizedOperator, count: usize) -> Result<SpectralSummary> {
    let top = singular_values(op, count)?;
    let (min, max) = if op.is_symmetric() {
        (Some(extreme_eigenvalue(op, Which::Min)?), Some(extreme_eigenvalue(op, Which::Max)?))
    } else {
        (None, None)
    };
    Ok(SpectralSummary { top_singular_values: top, min_eigenvalue: min, max_eigenvalue: max, hs_norm: op.matrix().frobenius() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Finite(f64),
    Infinite,
}

/// Hilbert–Schmidt norm of the kernel over `[0, K]²` or the whole quadrant.
pub fn hs_norm(kernel: &KernelFunction, extent: Extent, tol: f64) -> Result<f64> {
    let sq = match (&kernel.sum_profile, extent) {
        (Some(p), Extent::Finite(k)) => {
            if !(k >= 0.0) {
                return invalid("K must be nonnegative");
            }
            let h = &p.h;
            let inner = integrate_adaptive(|s| s * h(s), 0.0, k, tol)?;
            let outer = integrate_adaptive(|s| (2.0 * k - s) * h(s), k, 2.0 * k, tol)?;
            inner + outer
        }
        (Some(p), Extent::Infinite) => {
            let h = &p.h;
            integrate_semi_infinite(|s| s * h(s), 0.0, p.decay, tol).map_err(|e| match e {
                Error::NonConvergence(m) => Error::Divergent(m),
                other => other,
            })?
        }
        (None, Extent::Finite(k)) => {
            if !(k >= 0.0) {
                return invalid("K must be nonnegative");
            }
            let mut failure = None;
            let v = integrate_adaptive(
                |x| match integrate_adaptive(|y| kernel.eval(x, y).powi(2), 0.0, k, tol * 1e-2) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                0.0,
                k,
                tol,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            v?
        }
        (None, Extent::Infinite) => {
            return Err(Error::Divergent(format!(
                "kernel '{}' declares no sum profile; quadrant integral not available",
                kernel.name
            )))
        }
    };
    Ok(sq.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    MinEigenvalue,
    MaxEigenvalue,
    TopSingularValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k_trunc: f64,
    pub nodes: usize,
    pub value: f64,
    /// The value agrees with every later value to the requested precision.
    pub plateau: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// First K from which all later values agree with it.
    pub plateau_at: Option<f64>,
}

/// Runs the chosen spectral quantity over increasing truncations.
pub fn convergence_sweep(
    kernel: &KernelFunction,
    ks: &[f64],
    density: f64,
    quantity: SweepQuantity,
    precision: f64,
) -> Result<SweepTable> {
    if ks.windows(2).any(|w| !(w[0] < w[1])) {
        return invalid("sweep truncations must be strictly increasing");
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let op = discretize(kernel, k, Layout::density(density))?;
        let value = match quantity {
            SweepQuantity::MinEigenvalue => extreme_eigenvalue(&op, Which::Min)?,
            SweepQuantity::MaxEigenvalue => extreme_eigenvalue(&op, Which::Max)?,
            SweepQuantity::TopSingularValue => singular_values(&op, 1)?[0],
        };
        rows.push(SweepRow { k_trunc: k, nodes: op.dim(), value, plateau: false });
    }
    Ok(mark_plateau(rows, precision))
}

pub(crate) fn mark_plateau(mut rows: Vec<SweepRow>, precision: f64) -> SweepTable {
    let n = rows.len();
    let mut first = None;
    for i in 0..n {
        if n > 1 && i + 1 == n && first.is_none() {
            break;
        }
        if rows[i..].iter().all(|r| (r.value - rows[i].value).abs() <= precision) {
            first = Some(i);
            break;
        }
    }
    if let Some(f) = first {
        for r in &mut rows[f..] {
            r.plateau = true;
        }
    }
    SweepTable { plateau_at: first.map(|f| rows[f].k_trunc), rows }
}
