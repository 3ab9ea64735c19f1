//! Stretch constants of the average scheme and storage summaries across
//! experiment sweeps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scheme::stretch_bound_f64;

/// Header line of the `bounds` CSV.
pub const BOUNDS_HEADER: &str = "# compact-routing bounds v1\nk,stretch,stretch_per_k";
/// Header line of the `stats` CSV.
pub const STORAGE_HEADER: &str =
    "# compact-routing storage v1\nscheme,k,n,states,avg_entries,max_entries,total_entries";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    pub stretch: f64,
}

impl BoundRow {
    pub fn ratio(&self) -> f64 {
        self.stretch / self.k as f64
    }

    /// `k,stretch,ratio` with one and three decimals.
    pub fn csv(&self) -> String {
        format!("{},{:.1},{:.3}", self.k, self.stretch, self.ratio())
    }
}

/// Stretch bound of the average scheme for every `k`; each `k` must be at
/// least 2. Computed in floating point since exact values blow up for large `k`.
pub fn bound_rows(ks: &[usize]) -> Vec<BoundRow> {
    ks.iter().map(|&k| BoundRow { k, stretch: stretch_bound_f64(k) }).collect()
}

pub fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = format!("{BOUNDS_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Storage measured on one preprocessed state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageSample {
    pub scheme: String,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub avg_entries: f64,
    pub max_entries: usize,
    pub total_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageGroup {
    pub scheme: String,
    pub k: usize,
    pub n: usize,
    pub states: usize,
    /// Mean over states of the per-vertex average.
    pub avg_entries: f64,
    pub max_entries: usize,
    pub total_entries: usize,
}

/// Least-squares fit of `log y = exponent · log n + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root mean squared residual in log space.
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least 3 distinct sizes for a fit, got {sizes}")]
    InsufficientData { sizes: usize },
    #[error("non-positive value {value} cannot be fitted on a log scale")]
    NonPositive { value: f64 },
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit, AnalysisError> {
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(AnalysisError::InsufficientData { sizes: sizes.len() });
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(AnalysisError::NonPositive { value: if x <= 0.0 { x } else { y } });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - (exponent * p.0 + intercept)).powi(2)).sum();
    Ok(PowerFit { exponent, intercept, residual: (sse / m).sqrt() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageReport {
    pub groups: Vec<StorageGroup>,
    /// One fit per `(scheme, k)` with enough sizes.
    pub fits: Vec<(String, usize, Result<PowerFit, AnalysisError>)>,
}

/// Groups samples by `(scheme, k, n)` and fits avg entries against n per
/// `(scheme, k)`.
pub fn storage_report(samples: &[StorageSample]) -> StorageReport {
    let mut by_group: BTreeMap<(String, usize, usize), Vec<&StorageSample>> = BTreeMap::new();
    for s in samples {
        by_group.entry((s.scheme.clone(), s.k, s.n)).or_default().push(s);
    }
    let groups: Vec<StorageGroup> = by_group
        .into_iter()
        .map(|((scheme, k, n), ss)| StorageGroup {
            scheme,
            k,
            n,
            states: ss.len(),
            avg_entries: ss.iter().map(|s| s.avg_entries).sum::<f64>() / ss.len() as f64,
            max_entries: ss.iter().map(|s| s.max_entries).max().unwrap_or(0),
            total_entries: ss.iter().map(|s| s.total_entries).sum(),
        })
        .collect();
    let mut series: BTreeMap<(String, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for s in samples {
        series.entry((s.scheme.clone(), s.k)).or_default().push((s.n as f64, s.avg_entries));
    }
    let fits = series.into_iter().map(|((scheme, k), pts)| (scheme, k, fit_power_law(&pts))).collect();
    StorageReport { groups, fits }
}

pub fn storage_csv(report: &StorageReport) -> String {
    let mut out = format!("{STORAGE_HEADER}\n");
    for g in &report.groups {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{},{}\n",
            g.scheme, g.k, g.n, g.states, g.avg_entries, g.max_entries, g.total_entries
        ));
    }
    for (scheme, k, fit) in &report.fits {
        match fit {
            Ok(f) => {
                out.push_str(&format!("# fit {scheme} k={k}: exponent {:.4}, residual {:.4}\n", f.exponent, f.residual))
            }
            Err(e) => out.push_str(&format!("# fit {scheme} k={k}: {e}\n")),
        }
    }
    out
}
