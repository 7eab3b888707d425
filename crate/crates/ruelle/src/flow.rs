//! The pressure gradient flow on the quotient space of potentials.
//!
//! The flow of `P_B` is linear in the quotient: `[A_t] = e^{-t}[A₀ - B] + [B]`,
//! so states are evaluated in closed form and normalized only for
//! reporting. No ODE integrator is involved.

use crate::error::{Error, Result};
use crate::gibbs::gibbs_measure;
use crate::sft::FnTable;
use crate::transfer::normalize;

/// A point on a flow trajectory, held as the normalized representative of
/// its class.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub potential: FnTable,
}

/// One reported row of a flow trace.
#[derive(Debug, Clone)]
pub struct FlowTraceRow {
    pub t: f64,
    /// `P_B(A_t) = h(μ_{A_t}) + ∫B dμ_{A_t}`.
    pub pressure: f64,
    pub entropy: f64,
    /// `‖[A_t - B]‖_{A_t}` in the variance metric.
    pub metric_norm: f64,
}

/// The state at time `t` of the gradient flow of `P_B` started at `A₀`.
pub fn flow_state(a0: &FnTable, b: &FnTable, t: f64) -> Result<FlowState> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidInput(format!("flow time {t} must be >= 0")));
    }
    let mut decay = (-t).exp();
    if decay < 1e-300 {
        decay = 0.0;
    }
    let raw = b.add(&a0.sub(b)?.scale(decay))?;
    Ok(FlowState { t, potential: normalize(&raw)? })
}

/// Evaluates the flow on an increasing time grid, reporting pressure,
/// entropy and the metric norm of the remaining gradient.
pub fn flow_trace(a0: &FnTable, b: &FnTable, t_grid: &[f64]) -> Result<Vec<FlowTraceRow>> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let state = flow_state(a0, b, t)?;
        let mu = gibbs_measure(&state.potential)?;
        let entropy = mu.entropy();
        let pressure = entropy + mu.integrate(b)?;
        let diff = state.potential.sub(b)?;
        let norm2 = crate::calculus::variance_metric(&state.potential, &diff, &diff)?;
        rows.push(FlowTraceRow { t, pressure, entropy, metric_norm: norm2.max(0.0).sqrt() });
    }
    Ok(rows)
}
