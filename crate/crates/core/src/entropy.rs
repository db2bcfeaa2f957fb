//! The entropy functional of a flooding.
//!
//! `beta(f) = -sum_k (t_k - t_{k-1}) sum_j z^k_j log z^k_j` with natural
//! logarithms and the convention `0 log 0 = 0`. An equivalent expanded form
//! sums `duration * log duration - sum_j (z * duration) log (z * duration)`
//! per stage; both are computed and cross-checked, which catches malformed
//! stage data (rates off the simplex) early.

use thiserror::Error;

use crate::flooding::Flooding;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("FormMismatch: compact form {compact} vs expanded form {expanded}")]
    FormMismatch { compact: f64, expanded: f64 },
    #[error("ComponentNotArmAligned: flooding has no source component {0}")]
    ComponentNotArmAligned(usize),
}

/// `x log x` with `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

#[derive(Debug, Clone)]
pub struct StageBeta {
    pub duration: f64,
    pub rates: Vec<f64>,
    pub contribution: f64,
}

/// Per-stage decomposition of `beta(f)`.
#[derive(Debug, Clone)]
pub struct BetaReport {
    pub beta: f64,
    pub per_stage: Vec<StageBeta>,
}

/// Computes `beta(f)` in both forms and verifies their equality to 1e-9.
pub fn beta(f: &Flooding) -> Result<BetaReport, EntropyError> {
    let mut per_stage = Vec::with_capacity(f.stage_count());
    let mut compact = 0.0;
    let mut expanded = 0.0;
    for stage in f.stages() {
        let d = stage.duration();
        let rates: Vec<f64> = stage.arms.iter().map(|a| a.rate).collect();
        let contribution = -d * rates.iter().map(|&z| xlogx(z)).sum::<f64>();
        compact += contribution;
        expanded += xlogx(d) - rates.iter().map(|&z| xlogx(z * d)).sum::<f64>();
        per_stage.push(StageBeta { duration: d, rates, contribution });
    }
    if (compact - expanded).abs() > 1e-9 {
        return Err(EntropyError::FormMismatch { compact, expanded });
    }
    Ok(BetaReport { beta: compact, per_stage })
}

/// `beta` contribution of one source component: the sum over arms that grew
/// from source `component`. Summing over all components recovers `beta(f)`.
pub fn beta_restricted(f: &Flooding, component: usize) -> Result<f64, EntropyError> {
    if component >= f.sources().len() {
        return Err(EntropyError::ComponentNotArmAligned(component));
    }
    let mut total = 0.0;
    for stage in f.stages() {
        let d = stage.duration();
        total -= d * stage
            .arms
            .iter()
            .filter(|a| a.component == component)
            .map(|a| xlogx(a.rate))
            .sum::<f64>();
    }
    Ok(total)
}
