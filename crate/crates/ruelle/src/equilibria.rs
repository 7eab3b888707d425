//! Prescription of integrals and equilibrium states under linear
//! constraints.
//!
//! Interior rotation vectors are reached by a damped Newton iteration on
//! the coefficients of `B + Σ a_k φ_k`; the Jacobian of the rotation vector
//! with respect to the coefficients is exactly the Gram matrix of the
//! variance metric, so no finite differences enter the solve. Constrained
//! equilibria are the special case of prescribing the zero vector.

use serde::{Deserialize, Serialize};

use crate::calculus::gram_matrix;
use crate::error::{Error, Result};
use crate::gibbs::{gibbs_measure, pressure, MarkovMeasure};
use crate::linalg::solve;
use crate::sft::FnTable;

const NEWTON_MAX_ITER: usize = 200;
const NEWTON_DIVERGENCE_NORM: f64 = 1e3;
const NEWTON_ACCEPT: f64 = 1e-10;
/// Keep polishing below the acceptance threshold while progress lasts.
const NEWTON_POLISH: f64 = 1e-14;
const GRAM_SINGULAR: f64 = 1e-9;

/// A constrained-equilibrium problem statement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintProblem {
    #[serde(rename = "B")]
    pub base: FnTable,
    #[serde(rename = "Phi")]
    pub observables: Vec<FnTable>,
    #[serde(default)]
    pub target: Vec<f64>,
}

/// A solved constrained equilibrium.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    /// `B₀ = B + Σ a_k φ_k`.
    pub potential: FnTable,
    pub coefficients: Vec<f64>,
    pub measure: MarkovMeasure,
    /// `P_B(B₀) = log λ_{B₀}`.
    pub value: f64,
}

/// One row of an entropy surface scan.
#[derive(Debug, Clone)]
pub struct SurfaceRow {
    pub w: Vec<f64>,
    /// `None` when the grid point fell outside the rotation set.
    pub point: Option<SurfacePoint>,
}

#[derive(Debug, Clone)]
pub struct SurfacePoint {
    pub coefficients: Vec<f64>,
    pub entropy: f64,
}

/// `rv(μ) = (∫φ₁ dμ, …, ∫φ_K dμ)`.
pub fn rotation_vector(mu: &MarkovMeasure, phis: &[FnTable]) -> Result<Vec<f64>> {
    phis.iter().map(|phi| mu.integrate(phi)).collect()
}

fn combine(base: &FnTable, phis: &[FnTable], coeff: &[f64]) -> Result<FnTable> {
    let mut acc = base.clone();
    for (phi, &a) in phis.iter().zip(coeff) {
        acc = acc.add(&phi.scale(a))?;
    }
    Ok(acc)
}

/// Finds coefficients `a` with `rv(μ_{B+Σ a_k φ_k}) = target`, starting the
/// Newton iteration from `a0`.
pub fn prescribe_from(
    base: &FnTable,
    phis: &[FnTable],
    target: &[f64],
    a0: &[f64],
) -> Result<Vec<f64>> {
    let k = phis.len();
    if target.len() != k || a0.len() != k {
        return Err(Error::InvalidInput(format!(
            "expected {k} targets and initial coefficients"
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let gram0 = gram_matrix(base, phis)?;
    let min_eig = gram0.min_eigenvalue();
    if min_eig <= GRAM_SINGULAR {
        return Err(Error::DependentConstraints(min_eig));
    }

    // Solving rv(a) = target is the stationarity condition of the convex
    // objective F(a) = log λ(B + Σ a_k φ_k) - a·target, whose gradient is
    // the residual and whose Hessian is the Gram matrix. Newton descent on
    // F with a halving line search is therefore globally convergent on the
    // interior of the rotation set.
    let objective = |a: &[f64]| -> Result<f64> {
        let lin: f64 = a.iter().zip(target).map(|(x, t)| x * t).sum();
        Ok(pressure(&combine(base, phis, a)?)? - lin)
    };
    let residual = |a: &[f64]| -> Result<Vec<f64>> {
        let mu = gibbs_measure(&combine(base, phis, a)?)?;
        let rv = rotation_vector(&mu, phis)?;
        Ok(rv.iter().zip(target).map(|(x, t)| x - t).collect())
    };
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let mut a = a0.to_vec();
    let mut f = objective(&a)?;
    let mut r = residual(&a)?;
    let mut rn = sup(&r);
    for iter in 0..NEWTON_MAX_ITER {
        if rn < NEWTON_POLISH {
            return Ok(a);
        }
        if sup(&a) > NEWTON_DIVERGENCE_NORM {
            return Err(Error::TargetOutsideRotationSet { norm: sup(&a), iterations: iter });
        }
        let jac = gram_matrix(&combine(base, phis, &a)?, phis)?;
        let delta = match solve(jac.matrix(), &r) {
            Some(d) => d,
            // the family stays independent at every point, so a numerically
            // singular Jacobian signals degeneration toward the boundary
            None => {
                return Err(Error::TargetOutsideRotationSet { norm: sup(&a), iterations: iter })
            }
        };
        if rn < 1e-6 {
            // local regime: Newton steps converge quadratically down to the
            // residual noise floor; halve on overshoot
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..20 {
                let trial: Vec<f64> = a.iter().zip(&delta).map(|(x, d)| x - t * d).collect();
                let rt = residual(&trial)?;
                let rtn = sup(&rt);
                if rtn < rn {
                    a = trial;
                    r = rt;
                    rn = rtn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if improved {
                continue;
            }
            break;
        }
        let slope: f64 = r.iter().zip(&delta).map(|(g, d)| g * d).sum();
        // far from the solution: damped Newton with Armijo decrease on the
        // convex objective
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = a.iter().zip(&delta).map(|(x, d)| x - t * d).collect();
            match objective(&trial) {
                Ok(ft) if ft <= f - 1e-4 * t * slope => {
                    a = trial;
                    f = ft;
                    r = residual(&a)?;
                    rn = sup(&r);
                    improved = true;
                    break;
                }
                Ok(_) | Err(Error::NonConvergence(_)) => {}
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if rn < NEWTON_ACCEPT {
        Ok(a)
    } else {
        Err(Error::TargetOutsideRotationSet { norm: sup(&a), iterations: NEWTON_MAX_ITER })
    }
}

/// Newton prescription started from the base potential.
pub fn prescribe(base: &FnTable, phis: &[FnTable], target: &[f64]) -> Result<Vec<f64>> {
    prescribe_from(base, phis, target, &vec![0.0; phis.len()])
}

/// The unique maximizer of `P_B` among invariant measures with
/// `∫φ_k dμ = 0` for all k.
pub fn constrained_equilibrium(base: &FnTable, phis: &[FnTable]) -> Result<Equilibrium> {
    if phis.is_empty() {
        let measure = gibbs_measure(base)?;
        return Ok(Equilibrium {
            potential: base.clone(),
            coefficients: Vec::new(),
            value: pressure(base)?,
            measure,
        });
    }
    let coefficients = prescribe(base, phis, &vec![0.0; phis.len()])?;
    let potential = combine(base, phis, &coefficients)?;
    let measure = gibbs_measure(&potential)?;
    let value = pressure(&potential)?;
    Ok(Equilibrium { potential, coefficients, measure, value })
}

/// Maximal entropy over measures with prescribed rotation vector, swept
/// over a grid; `H(w) = log Λ(A(w)) - Σ a_k(w) w_k - ∫B dμ`.
pub fn entropy_surface(
    base: &FnTable,
    phis: &[FnTable],
    grid: &[Vec<f64>],
) -> Result<Vec<SurfaceRow>> {
    let mut rows = Vec::with_capacity(grid.len());
    for w in grid {
        match prescribe(base, phis, w) {
            Ok(coefficients) => {
                let pot = combine(base, phis, &coefficients)?;
                let mu = gibbs_measure(&pot)?;
                let linear: f64 = coefficients.iter().zip(w).map(|(a, t)| a * t).sum();
                let entropy = pressure(&pot)? - linear - mu.integrate(base)?;
                rows.push(SurfaceRow {
                    w: w.clone(),
                    point: Some(SurfacePoint { coefficients, entropy }),
                });
            }
            Err(Error::TargetOutsideRotationSet { .. }) => {
                rows.push(SurfaceRow { w: w.clone(), point: None });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}
