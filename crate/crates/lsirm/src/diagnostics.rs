//! Chain mixing diagnostics: effective sample size, Geweke z-scores, and
//! trace extrema per parameter block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::ChainDraws;

/// Variance below this is treated as a degenerate (constant) trace.
const DEGENERATE_VAR: f64 = 1e-14;

/// Effective sample size of a scalar trace.
///
/// Uses the initial-positive-sequence truncation of the autocorrelation
/// sum: paired autocorrelations rho(2m) + rho(2m+1) are accumulated while
/// they stay positive. Antithetic chains can report an ESS larger than the
/// chain length. Returns `None` for traces shorter than 10 or with
/// (numerically) zero variance.
pub fn effective_sample_size(trace: &[f64]) -> Option<f64> {
    let n = trace.len();
    if n < 10 {
        return None;
    }
    let nf = n as f64;
    let mean = trace.iter().sum::<f64>() / nf;
    let var = trace.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    if var < DEGENERATE_VAR {
        return None;
    }
    let rho = |lag: usize| -> f64 {
        let mut acc = 0.0;
        for t in 0..n - lag {
            acc += (trace[t] - mean) * (trace[t + lag] - mean);
        }
        acc / (nf * var)
    };
    // rho(0) = 1 is part of the first pair
    let mut pair_sum = 0.0;
    let mut m = 0;
    loop {
        let lag0 = 2 * m;
        let lag1 = 2 * m + 1;
        if lag1 >= n {
            break;
        }
        let pair = rho(lag0) + rho(lag1);
        if pair <= 0.0 {
            break;
        }
        pair_sum += pair;
        m += 1;
    }
    let tau = (2.0 * pair_sum - 1.0).max(1e-3);
    Some(n as f64 / tau)
}

/// Geweke convergence z-score comparing the mean of the first 10% of the
/// trace against the mean of the last 50%, with segment variances scaled by
/// each segment's effective sample size. `None` for degenerate traces.
pub fn geweke_z(trace: &[f64]) -> Option<f64> {
    let n = trace.len();
    if n < 20 {
        return None;
    }
    let head = &trace[..n / 10];
    let tail = &trace[n - n / 2..];
    if head.len() < 2 || tail.len() < 2 {
        return None;
    }
    let stats = |seg: &[f64]| -> Option<(f64, f64)> {
        let m = seg.len() as f64;
        let mean = seg.iter().sum::<f64>() / m;
        let var = seg.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
        if var < DEGENERATE_VAR {
            return None;
        }
        let ess = effective_sample_size(seg).unwrap_or(m).min(m);
        Some((mean, var / ess))
    };
    let (mean_h, se2_h) = stats(head)?;
    let (mean_t, se2_t) = stats(tail)?;
    Some((mean_h - mean_t) / (se2_h + se2_t).sqrt())
}

/// Mixing summary for one named group of scalar traces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockDiagnostics {
    pub block: String,
    /// Smallest per-scalar ESS in the block; `None` if every trace in the
    /// block is degenerate.
    pub min_ess: Option<f64>,
    /// Largest |Geweke z| in the block.
    pub max_abs_geweke_z: Option<f64>,
    pub trace_min: f64,
    pub trace_max: f64,
    /// Set when one or more traces were degenerate (constant).
    pub degenerate_traces: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n_draws: usize,
    pub blocks: Vec<BlockDiagnostics>,
}

fn summarize_block(block: &str, traces: Vec<Vec<f64>>) -> BlockDiagnostics {
    let mut min_ess: Option<f64> = None;
    let mut max_z: Option<f64> = None;
    let mut trace_min = f64::INFINITY;
    let mut trace_max = f64::NEG_INFINITY;
    let mut degenerate = 0;
    for trace in &traces {
        for &x in trace {
            trace_min = trace_min.min(x);
            trace_max = trace_max.max(x);
        }
        match effective_sample_size(trace) {
            Some(ess) => min_ess = Some(min_ess.map_or(ess, |m: f64| m.min(ess))),
            None => degenerate += 1,
        }
        if let Some(z) = geweke_z(trace) {
            let az = z.abs();
            max_z = Some(max_z.map_or(az, |m: f64| m.max(az)));
        }
    }
    BlockDiagnostics {
        block: block.to_string(),
        min_ess,
        max_abs_geweke_z: max_z,
        trace_min,
        trace_max,
        degenerate_traces: degenerate,
    }
}

/// Compute per-block diagnostics over the stored draws of a chain.
///
/// Requires at least 10 draws.
pub fn diagnostics(chain: &ChainDraws) -> Result<DiagnosticsReport> {
    let n_draws = chain.draws.len();
    if n_draws < 10 {
        return Err(Error::data(format!(
            "diagnostics require at least 10 draws, got {n_draws}"
        )));
    }
    let first = &chain.draws[0];
    let n = first.n_legislators();
    let p = first.n_bills();
    let k = first.k();

    let collect = |f: &dyn Fn(&crate::model::ModelState) -> f64| -> Vec<f64> {
        chain.draws.iter().map(|s| f(s)).collect()
    };
    let theta: Vec<Vec<f64>> = (0..n).map(|i| collect(&move |s| s.theta[i])).collect();
    let beta: Vec<Vec<f64>> = (0..p).map(|j| collect(&move |s| s.beta[j])).collect();
    let gamma = vec![collect(&|s| s.gamma)];
    let sigma = vec![collect(&|s| s.sigma_theta_sq)];
    let z: Vec<Vec<f64>> = (0..n)
        .flat_map(|i| (0..k).map(move |c| (i, c)))
        .map(|(i, c)| collect(&move |s| s.z.row(i)[c]))
        .collect();
    let w: Vec<Vec<f64>> = (0..p)
        .flat_map(|j| (0..k).map(move |c| (j, c)))
        .map(|(j, c)| collect(&move |s| s.w.row(j)[c]))
        .collect();

    Ok(DiagnosticsReport {
        n_draws,
        blocks: vec![
            summarize_block("theta", theta),
            summarize_block("beta", beta),
            summarize_block("gamma", gamma),
            summarize_block("sigma_theta_sq", sigma),
            summarize_block("z", z),
            summarize_block("w", w),
        ],
    })
}
