//! Reference values and their recomputation.

use std::path::Path;

use qibound::backflow::{fit_inverse_sqrt, lambda_of_x};
use qibound::flux::{j_kernel, t_kernel, truncation_threshold, FluxSettings};
use qibound::kernels::{analytic_flux_bound, FamilyKind, SamplingFamily};
use qibound::operator_lab::{discretize, extreme_eigenvalue, singular_values, Which};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub value: f64,
    pub tolerance: f64,
    /// Tolerance is relative to |value| rather than absolute.
    #[serde(default)]
    pub relative: bool,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceManifest {
    pub entries: Vec<ManifestEntry>,
}

fn entry(id: &str, value: f64, tolerance: f64, relative: bool, citation: &str) -> ManifestEntry {
    ManifestEntry { id: id.into(), value, tolerance, relative, citation: citation.into() }
}

impl ReferenceManifest {
    pub fn builtin() -> Self {
        const T1: &str = "sampling-function table, analytic QI bound row";
        const NORM: &str = "operator-norm constant table";
        const NUM: &str = "numerical methods, smoothed truncated cosine results";
        const T2: &str = "sharp infimum table";
        Self {
            entries: vec![
                entry("analytic.gaussian", -0.01989436788, 1e-10, false, T1),
                entry("analytic.squared_lorentzian", -0.01989436788, 1e-10, false, T1),
                entry("analytic.truncated_cosine", -0.09817477044, 1e-10, false, T1),
                entry("analytic.smoothed_truncated_cosine", -0.1308996939, 1e-10, false, T1),
                entry("norm.gaussian.sigma1", 0.1399331442, 1e-9, false, "numerical methods, Gaussian results"),
                entry("norm.gaussian.sigma2", 0.0175697912, 1e-8, false, "numerical methods, Gaussian results"),
                entry("norm.gaussian.C", 0.01958128485, 1e-10, false, NORM),
                entry("norm.smoothed_truncated_cosine.sigma1", 0.3536210388, 1e-6, false, NUM),
                entry("norm.smoothed_truncated_cosine.sigma2", 0.0733902259, 1e-6, false, NUM),
                entry("norm.smoothed_truncated_cosine.C", 0.125047838, 1e-6, false, NORM),
                entry("sharp.gaussian", -0.0048295668517, 1e-6, true, T2),
                entry("sharp.squared_lorentzian", -0.002980544308, 1e-6, true, T2),
                entry("sharp.truncated_cosine", -0.029012808686, 1e-6, true, T2),
                entry("sharp.smoothed_truncated_cosine", -0.036095567061, 1e-6, true, T2),
                entry("truncation.gaussian_crossing", 6.756, 1e-3, false, "numerical methods, truncation error estimate"),
                entry("backflow.constant", 0.038452, 2e-4, false, "backflow eigenproblem, extrapolated constant"),
            ],
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: Self = serde_json::from_str(&text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for e in &self.entries {
            if !(e.tolerance > 0.0) {
                return Err(CliError::config(format!("entry {} has non-positive tolerance", e.id)));
            }
            if e.citation.trim().is_empty() {
                return Err(CliError::config(format!("entry {} has no citation", e.id)));
            }
        }
        Ok(())
    }

    pub fn filtered(mut self, prefixes: &[String]) -> Self {
        if !prefixes.is_empty() {
            self.entries.retain(|e| prefixes.iter().any(|p| e.id.starts_with(p.as_str())));
        }
        self
    }
}

fn family_of(id: &str) -> Result<FamilyKind, String> {
    let name = id.split('.').nth(1).ok_or_else(|| format!("malformed id {id}"))?;
    name.parse().map_err(|e: qibound::Error| e.to_string())
}

/// Recomputes one manifest quantity at its reference settings.
pub fn compute(id: &str) -> Result<f64, String> {
    let err = |e: qibound::Error| e.to_string();
    let group = id.split('.').next().unwrap_or_default();
    match group {
        "analytic" => {
            let kind = family_of(id)?;
            analytic_flux_bound(&SamplingFamily::unit(kind), 1.0, 1.0).map_err(err)
        }
        "norm" => {
            let kind = family_of(id)?;
            let st = FluxSettings::reference(kind);
            let op = discretize(&t_kernel(&SamplingFamily::unit(kind)), st.t_k, st.t_layout).map_err(err)?;
            let s = singular_values(&op, 2).map_err(err)?;
            match id.rsplit('.').next() {
                Some("sigma1") => Ok(s[0]),
                Some("sigma2") => Ok(s[1]),
                Some("C") => Ok(s[0] * s[0]),
                _ => Err(format!("unknown quantity {id}")),
            }
        }
        "sharp" => {
            let kind = family_of(id)?;
            let st = FluxSettings::reference(kind);
            let op = discretize(&j_kernel(&SamplingFamily::unit(kind)), st.j_k, st.j_layout).map_err(err)?;
            extreme_eigenvalue(&op, Which::Min).map_err(err)
        }
        "truncation" if id == "truncation.gaussian_crossing" => {
            truncation_threshold(&SamplingFamily::unit(FamilyKind::Gaussian), 0.5e-10, 6.0, 7.5, 1e-7).map_err(err)
        }
        "backflow" if id == "backflow.constant" => {
            let pts = [2000.0, 3000.0, 4000.0, 6000.0, 8000.0]
                .iter()
                .map(|&x| lambda_of_x(x, None).map(|p| (x, p.lambda)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            fit_inverse_sqrt(&pts).map(|f| f.a).map_err(err)
        }
        _ => Err(format!("no recipe for manifest id '{id}'")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub id: String,
    pub expected: f64,
    pub computed: Option<f64>,
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
    pub error: Option<String>,
    pub citation: String,
}

pub fn verify(manifest: &ReferenceManifest) -> Vec<VerifyRow> {
    manifest
        .entries
        .iter()
        .map(|e| {
            let got = compute(&e.id);
            let (computed, deviation, error) = match got {
                Ok(v) => {
                    let d = (v - e.value).abs();
                    (Some(v), Some(if e.relative { d / e.value.abs() } else { d }), None)
                }
                Err(msg) => (None, None, Some(msg)),
            };
            VerifyRow {
                id: e.id.clone(),
                expected: e.value,
                computed,
                deviation,
                tolerance: e.tolerance,
                relative: e.relative,
                pass: deviation.is_some_and(|d| d <= e.tolerance),
                error,
                citation: e.citation.clone(),
            }
        })
        .collect()
}
