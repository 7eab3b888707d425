//! Dyadic projections of two-symbol Gibbs measures and exact 1-D optimal
//! transport.
//!
//! Binary expansion conjugates the 2-shift with the doubling map, carrying
//! a Gibbs measure to a measure on the interval or circle whose mass on
//! the dyadic cell `[j 2^{-L}, (j+1) 2^{-L})` is the cylinder mass of the
//! length-L word spelling `j`. Atoms sit at cell midpoints, so transport
//! costs are exact at the chosen resolution; the refinement invariant
//! quantifies the gap to the continuum. These scans are exploratory: no
//! claim about continuum differentiability is asserted.

use crate::error::{Error, Result};
use crate::gibbs::{gibbs_measure, MarkovMeasure};
use crate::sft::FnTable;

/// Hard cap on projection levels.
pub const MAX_LEVEL: u32 = 24;
/// Separate cap for order-2 circle transport.
pub const MAX_LEVEL_CIRCLE_W2: u32 = 12;

/// A measure supported on the 2^L dyadic midpoints of the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicMeasure {
    level: u32,
    weights: Vec<f64>,
}

impl DyadicMeasure {
    pub fn new(level: u32, weights: Vec<f64>) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::LevelTooLarge(level, MAX_LEVEL));
        }
        if weights.len() != 1usize << level {
            return Err(Error::InvalidInput(format!(
                "expected {} weights at level {level}",
                1usize << level
            )));
        }
        if weights.iter().any(|&w| w < -1e-15 || !w.is_finite()) {
            return Err(Error::InvalidInput("negative dyadic weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("weights sum to {total}")));
        }
        Ok(DyadicMeasure { level, weights })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Atom position of cell `j`: the midpoint `(j + 1/2) 2^{-L}`.
    pub fn position(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / (1u64 << self.level) as f64
    }
}

/// Ground space for the transport problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Interval,
    Circle,
}

/// Projects a two-symbol Markov measure to dyadic resolution `L`; with the
/// big-endian word encoding the cell weights are exactly the cylinder
/// masses in code order.
pub fn project_dyadic(mu: &MarkovMeasure, level: u32) -> Result<DyadicMeasure> {
    if mu.alphabet_size() != 2 {
        return Err(Error::AlphabetMismatch(mu.alphabet_size(), 2));
    }
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge(level, MAX_LEVEL));
    }
    if level < mu.order() {
        return Err(Error::InvalidInput(format!(
            "level {level} below measure order {}",
            mu.order()
        )));
    }
    DyadicMeasure::new(level, mu.cylinder_masses(level)?)
}

/// Exact interval transport cost between equal-level atom lists under the
/// monotone (quantile) coupling.
fn quantile_cost(p: &DyadicMeasure, q: &DyadicMeasure, order: u32) -> f64 {
    let n = p.weights.len();
    let pos = |j: usize| (j as f64 + 0.5) / n as f64;
    let mut cost = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    let mut pi_rem = 0.0;
    let mut qj_rem = 0.0;
    loop {
        while pi_rem <= 0.0 {
            if i == n {
                return cost;
            }
            pi_rem = p.weights[i];
            i += 1;
        }
        while qj_rem <= 0.0 {
            if j == n {
                return cost;
            }
            qj_rem = q.weights[j];
            j += 1;
        }
        let delta = pi_rem.min(qj_rem);
        let gap = (pos(i - 1) - pos(j - 1)).abs();
        cost += delta * if order == 1 { gap } else { gap * gap };
        pi_rem -= delta;
        qj_rem -= delta;
    }
}

/// Compacted atom list: (cumulative mass at segment end, position).
fn atom_segments(weights: &[f64]) -> Vec<(f64, f64)> {
    let n = weights.len();
    let mut acc = 0.0;
    let mut out = Vec::new();
    for (j, &m) in weights.iter().enumerate() {
        if m > 0.0 {
            acc += m;
            out.push((acc, (j as f64 + 0.5) / n as f64));
        }
    }
    out
}

/// Walks the monotone coupling that pairs the p-quantile at cumulative
/// mass `t` with the q-quantile at `t - theta` on the circle's universal
/// cover, reporting each coupled segment as (mass, signed distance,
/// boundary-alignment shift).
fn merge_walk(
    pa: &[(f64, f64)],
    qa: &[(f64, f64)],
    theta: f64,
    visit: &mut impl FnMut(f64, f64, f64),
) {
    // locate the q segment containing quantile s = -theta, with winding k
    let s0 = -theta;
    let mut k = s0.div_euclid(1.0);
    let frac = s0 - k;
    let mut j = match qa.iter().position(|&(cum, _)| cum > frac) {
        Some(idx) => idx,
        None => {
            k += 1.0;
            0
        }
    };

    let mut i = 0;
    let mut t = 0.0;
    while t < 1.0 && i < pa.len() {
        let p_end = pa[i].0;
        let q_end = qa[j].0 + k + theta;
        let next = p_end.min(q_end).min(1.0);
        let d = pa[i].1 - (qa[j].1 + k);
        visit((next - t).max(0.0), d, pa[i].0 - qa[j].0 - k);
        t = next;
        if q_end <= next {
            j += 1;
            if j == qa.len() {
                j = 0;
                k += 1.0;
            }
        }
        if p_end <= next {
            i += 1;
        }
    }
}

/// Quadratic cost of the shifted monotone coupling; convex and piecewise
/// linear in `theta`, minimized exactly at a boundary-alignment kink.
fn shifted_quantile_cost(pa: &[(f64, f64)], qa: &[(f64, f64)], theta: f64) -> f64 {
    let mut cost = 0.0;
    merge_walk(pa, qa, theta, &mut |mass, d, _| cost += mass * d * d);
    cost
}

/// Circle W₂²: ternary search over the mass shift of the convex cost,
/// then an exact evaluation at the candidate kinks of the active pairing
/// (the rounding floor of the plain search sits near sqrt mass precision).
fn circle_w2_cost(p: &DyadicMeasure, q: &DyadicMeasure) -> f64 {
    let pa = atom_segments(&p.weights);
    let qa = atom_segments(&q.weights);
    let (mut lo, mut hi) = (-1.25_f64, 1.25_f64);
    for _ in 0..120 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if shifted_quantile_cost(&pa, &qa, m1) <= shifted_quantile_cost(&pa, &qa, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let theta = 0.5 * (lo + hi);
    let mut best = shifted_quantile_cost(&pa, &qa, theta);
    let mut kinks = Vec::new();
    merge_walk(&pa, &qa, theta, &mut |_, _, align| kinks.push(align));
    for kink in kinks {
        let c = shifted_quantile_cost(&pa, &qa, kink);
        if c < best {
            best = c;
        }
    }
    best
}

/// Circle W₁ through the weighted median of the CDF difference.
fn circle_w1(p: &DyadicMeasure, q: &DyadicMeasure) -> f64 {
    let n = p.weights.len();
    // flows across the cell gaps between consecutive midpoints, plus the
    // wrap-around gap where the flow is zero by total-mass balance
    let mut flows = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 0..n - 1 {
        acc += p.weights[j] - q.weights[j];
        flows.push(acc);
    }
    flows.push(0.0);
    let mut sorted = flows.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[(n - 1) / 2];
    let h = 1.0 / n as f64;
    flows.iter().map(|g| h * (g - median).abs()).sum()
}

/// `W₁` or `W₂` between equal-level dyadic measures, on the interval or
/// the circle. Interval costs come from the quantile coupling; circle `W₁`
/// from the CDF-median flow; circle `W₂` from the monotone coupling at the
/// optimal mass shift.
pub fn w_distance(
    p: &DyadicMeasure,
    q: &DyadicMeasure,
    order: u32,
    topology: Topology,
) -> Result<f64> {
    if p.level != q.level {
        return Err(Error::LevelMismatch(p.level, q.level));
    }
    if order != 1 && order != 2 {
        return Err(Error::InvalidInput(format!("unsupported order {order}")));
    }
    match (topology, order) {
        (Topology::Interval, 1) => Ok(quantile_cost(p, q, 1)),
        (Topology::Interval, _) => Ok(quantile_cost(p, q, 2).sqrt()),
        (Topology::Circle, 1) => Ok(circle_w1(p, q)),
        (Topology::Circle, _) => {
            if p.level > MAX_LEVEL_CIRCLE_W2 {
                return Err(Error::LevelTooLarge(p.level, MAX_LEVEL_CIRCLE_W2));
            }
            Ok(circle_w2_cost(p, q).sqrt())
        }
    }
}

/// One row of a small-perturbation scaling scan.
#[derive(Debug, Clone)]
pub struct RoughnessRow {
    pub t: f64,
    pub w1: f64,
    pub w2: f64,
    /// log-log slope of W₂ against the previous grid point; NaN on the
    /// first row.
    pub local_exponent: f64,
}

/// Scans `W_p(μ_A, μ_{A+tζ})` over a decreasing grid of positive `t`.
pub fn roughness_scan(
    a: &FnTable,
    zeta: &FnTable,
    t_grid: &[f64],
    level: u32,
    topology: Topology,
) -> Result<Vec<RoughnessRow>> {
    if t_grid.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::InvalidInput("grid times must be positive".into()));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly decreasing".into()));
    }
    let base = project_dyadic(&gibbs_measure(a)?, level)?;
    let mut rows: Vec<RoughnessRow> = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let perturbed = gibbs_measure(&a.add(&zeta.scale(t))?)?;
        let proj = project_dyadic(&perturbed, level)?;
        let w1 = w_distance(&base, &proj, 1, topology)?;
        let w2 = w_distance(&base, &proj, 2, topology)?;
        let local_exponent = match rows.last() {
            Some(prev) if prev.w2 > 0.0 && w2 > 0.0 => {
                (prev.w2.ln() - w2.ln()) / (prev.t.ln() - t.ln())
            }
            _ => f64::NAN,
        };
        rows.push(RoughnessRow { t, w1, w2, local_exponent });
    }
    Ok(rows)
}
