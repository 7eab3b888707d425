//! Derivatives of the leading eigenvalue and of the Gibbs map, and the
//! variance metric.
//!
//! The metric `⟨ζ,η⟩_A` is computed in closed form: the correlation series
//! `Σ_{i≥1} ∫ L^i ζ_A · η_A dμ` collapses after a single application of the
//! transfer operator to a finite-dimensional resolvent solve, so no series
//! truncation is involved. Finite-difference and Monte Carlo routes are
//! provided as independent cross-checks of the same quantity.

use crate::error::{Error, Result};
use crate::gibbs::{gibbs_measure, pressure};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::sft::{center, FnTable};
use crate::transfer::{apply_transfer, normalize, NormalizedContext};

/// Gram matrix of variance-metric pairings over a family of observables.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    base: FnTable,
    mat: Mat,
}

impl GramMatrix {
    pub fn base(&self) -> &FnTable {
        &self.base
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn min_eigenvalue(&self) -> f64 {
        sym_eigenvalues(&self.mat)[0]
    }
}

/// `D(log Λ)_A(ζ) = ∫ ζ dμ_A`.
pub fn dlog_lambda(a: &FnTable, zeta: &FnTable) -> Result<f64> {
    gibbs_measure(a)?.integrate(zeta)
}

/// Centered observables together with their forward correlation series
/// `Σ_{i≥1} L^i f`, shared by the metric routes.
fn metric_parts(ctx: &NormalizedContext, fs: &[&FnTable]) -> Result<(Vec<FnTable>, Vec<FnTable>)> {
    let mut centered = Vec::with_capacity(fs.len());
    let mut series = Vec::with_capacity(fs.len());
    for f in fs {
        let fc = center(f, &ctx.mu)?;
        let tail = ctx.resolvent(&apply_transfer(&ctx.a, &fc)?)?;
        centered.push(fc);
        series.push(tail);
    }
    Ok((centered, series))
}

fn pair(ctx: &NormalizedContext, zc: &FnTable, zs: &FnTable, hc: &FnTable, hs: &FnTable) -> Result<f64> {
    let direct = ctx.mu.integrate(&zc.mul(hc)?)?;
    let fwd = ctx.mu.integrate(&zs.mul(hc)?)?;
    let bwd = ctx.mu.integrate(&zc.mul(hs)?)?;
    Ok(direct + fwd + bwd)
}

/// The variance metric
/// `⟨ζ,η⟩_A = ∫ζ_A η_A dμ + Σ_{i≥1} ∫(ζ_A·η_A∘Tⁱ + ζ_A∘Tⁱ·η_A) dμ`.
pub fn variance_metric(a: &FnTable, zeta: &FnTable, eta: &FnTable) -> Result<f64> {
    let ctx = NormalizedContext::new(&normalize(a)?)?;
    let (c, s) = metric_parts(&ctx, &[zeta, eta])?;
    pair(&ctx, &c[0], &s[0], &c[1], &s[1])
}

/// Derivative of the Gibbs map paired against a test function:
/// `d/dt ∫φ dμ_{A+tζ}|₀ = ∫ (I-L)^{-1}(φ_A) · DN_A(ζ) dμ_A`.
pub fn gibbs_derivative(a: &FnTable, zeta: &FnTable, phi: &FnTable) -> Result<f64> {
    let ctx = NormalizedContext::new(&normalize(a)?)?;
    let phi_c = center(phi, &ctx.mu)?;
    let resolved = ctx.resolvent(&phi_c)?;
    let projected = ctx.dn_projection(zeta)?;
    ctx.mu.integrate(&resolved.mul(&projected)?)
}

/// Exact finite-horizon variance
/// `(1/n) ∫ (Σ_{i<n} ζ_A∘Tⁱ)² dμ_A`, which converges to the metric at rate
/// O(1/n).
pub fn asymptotic_variance(a: &FnTable, zeta: &FnTable, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be >= 1".into()));
    }
    let ctx = NormalizedContext::new(&normalize(a)?)?;
    let zc = center(zeta, &ctx.mu)?;
    let n = horizon as f64;
    let mut total = n * ctx.mu.integrate(&zc.mul(&zc)?)?;
    let mut cur = zc.clone();
    for k in 1..horizon {
        cur = apply_transfer(&ctx.a, &cur)?;
        let corr = ctx.mu.integrate(&cur.mul(&zc)?)?;
        total += 2.0 * (n - k as f64) * corr;
    }
    Ok(total / n)
}

/// Second-order central difference of `log Λ` along `ζ, η`; steps below
/// 1e-6 are rejected as cancellation-dominated.
pub fn hessian_fd_log_lambda(a: &FnTable, zeta: &FnTable, eta: &FnTable, step: f64) -> Result<f64> {
    if step.is_nan() || step < 1e-6 {
        return Err(Error::StepTooSmall(step));
    }
    let pp = pressure(&a.add(&zeta.scale(step))?.add(&eta.scale(step))?)?;
    let pm = pressure(&a.add(&zeta.scale(step))?.sub(&eta.scale(step))?)?;
    let mp = pressure(&a.sub(&zeta.scale(step))?.add(&eta.scale(step))?)?;
    let mm = pressure(&a.sub(&zeta.scale(step))?.sub(&eta.scale(step))?)?;
    Ok((pp - pm - mp + mm) / (4.0 * step * step))
}

/// Gram matrix of the variance metric over a family `Φ`.
pub fn gram_matrix(a: &FnTable, phis: &[FnTable]) -> Result<GramMatrix> {
    if phis.is_empty() {
        return Err(Error::InvalidInput("empty observable family".into()));
    }
    let ctx = NormalizedContext::new(&normalize(a)?)?;
    let refs: Vec<&FnTable> = phis.iter().collect();
    let (c, s) = metric_parts(&ctx, &refs)?;
    let k = phis.len();
    let mut mat = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let v = pair(&ctx, &c[i], &s[i], &c[j], &s[j])?;
            mat.set(i, j, v);
            mat.set(j, i, v);
        }
    }
    Ok(GramMatrix { base: a.clone(), mat })
}

/// Batch-means Monte Carlo estimate of the asymptotic variance of the
/// Birkhoff averages of `ζ` under `μ_A`. Returns the estimate and its
/// standard error.
pub fn monte_carlo_variance(
    a: &FnTable,
    zeta: &FnTable,
    steps: usize,
    batch: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if batch < 2 || steps < 4 * batch {
        return Err(Error::InvalidInput("need steps >= 4*batch, batch >= 2".into()));
    }
    let mu = gibbs_measure(a)?;
    let zc = center(zeta, &mu)?;
    let p = zc.memory() as usize;
    let m = mu.alphabet_size();
    let path = mu.sample_path(steps + p, seed);

    // sliding-window word codes
    let mask = m.pow(p as u32);
    let mut code = 0usize;
    for &s in path.iter().take(p) {
        code = code * m + s;
    }
    let mut vals = Vec::with_capacity(steps);
    vals.push(zc.value(code));
    for &s in path.iter().skip(p).take(steps - 1) {
        code = (code * m + s) % mask;
        vals.push(zc.value(code));
    }

    let j = steps / batch;
    let used = j * batch;
    let grand_mean: f64 = vals[..used].iter().sum::<f64>() / used as f64;
    let mut acc = 0.0;
    for b in 0..j {
        let mean: f64 =
            vals[b * batch..(b + 1) * batch].iter().sum::<f64>() / batch as f64;
        let dev = mean - grand_mean;
        acc += dev * dev;
    }
    let est = batch as f64 * acc / (j - 1) as f64;
    let se = est * (2.0 / (j - 1) as f64).sqrt();
    Ok((est, se))
}
