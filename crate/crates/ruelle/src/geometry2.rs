//! The restricted two-symbol model, fully explicit.
//!
//! Normalized memory-2 potentials on the 2-shift form a chart
//! `S(x, y) = [[x, 1-y], [1-x, y]]` of column-stochastic matrices, where
//! `x` and `y` are the backward transition probabilities of staying at
//! state 0 and state 1 respectively (in the common {1, 2} labeling of
//! two-state chains, 1 maps to 0 and 2 maps to 1, in that order). The
//! variance metric restricts to the
//! diagonal tensor diag(E, G) below; its Gaussian curvature is evaluated
//! numerically from nested central differences of the metric components,
//! with the closed forms kept in the test oracles.

use crate::error::{Error, Result};
use crate::sft::FnTable;

/// Clamp for curvature evaluations; E and G blow up at the boundary.
pub const CURVATURE_CLAMP: f64 = 1e-3;

/// An interior point of the chart square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    x: f64,
    y: f64,
}

impl ChartPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
            return Err(Error::BoundaryValue(x, y));
        }
        Ok(ChartPoint { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    fn require_clamped(&self) -> Result<()> {
        let d = CURVATURE_CLAMP;
        if self.x < d || self.x > 1.0 - d || self.y < d || self.y > 1.0 - d {
            return Err(Error::BoundaryValue(self.x, self.y));
        }
        Ok(())
    }
}

/// Diagonal components of the restricted variance metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDiag {
    pub e: f64,
    pub g: f64,
}

/// The normalized memory-2 potential whose exponentiated table is
/// `[[x, 1-y], [1-x, y]]`.
pub fn chart_potential(p: ChartPoint) -> Result<FnTable> {
    FnTable::new(
        2,
        2,
        vec![p.x.ln(), (1.0 - p.y).ln(), (1.0 - p.x).ln(), p.y.ln()],
    )
}

fn e_comp(x: f64, y: f64) -> f64 {
    (1.0 - y) / (x * (1.0 - x) * (2.0 - x - y))
}

fn g_comp(x: f64, y: f64) -> f64 {
    (1.0 - x) / (y * (1.0 - y) * (2.0 - x - y))
}

/// Closed-form metric components
/// `E = (1-y)/(x(1-x)(2-x-y))`, `G = (1-x)/(y(1-y)(2-x-y))`.
pub fn metric2(p: ChartPoint) -> Result<MetricDiag> {
    Ok(MetricDiag { e: e_comp(p.x, p.y), g: g_comp(p.x, p.y) })
}

/// Stationary entropy of the chart chain, in closed form.
pub fn entropy2(p: ChartPoint) -> Result<f64> {
    let (x, y) = (p.x, p.y);
    let denom = 2.0 - x - y;
    let xlx = x * x.ln() + (1.0 - x) * (1.0 - x).ln();
    let yly = (1.0 - y) * (1.0 - y).ln() + y * y.ln();
    Ok(-(1.0 - y) / denom * xlx - (1.0 - x) / denom * yly)
}

/// Fourth-order central first derivative.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

const K_OUTER_STEP: f64 = 1e-4;
const K_INNER_STEP: f64 = 1e-5;

/// Gaussian curvature of the metric, from the diagonal-metric formula
/// `K = -(1/(2√(EG))) [ (E_y/√(EG))_y + (G_x/√(EG))_x ]`
/// with every derivative taken numerically.
pub fn curvature2(p: ChartPoint) -> Result<f64> {
    p.require_clamped()?;
    let (x, y) = (p.x, p.y);
    let term_y = |yy: f64| d1(|t| e_comp(x, t), yy, K_INNER_STEP) / (e_comp(x, yy) * g_comp(x, yy)).sqrt();
    let term_x = |xx: f64| d1(|t| g_comp(t, y), xx, K_INNER_STEP) / (e_comp(xx, y) * g_comp(xx, y)).sqrt();
    let bracket = d1(term_y, y, K_OUTER_STEP) + d1(term_x, x, K_OUTER_STEP);
    Ok(-bracket / (2.0 * (e_comp(x, y) * g_comp(x, y)).sqrt()))
}

/// Entropy-rescaled curvature `K̃` with explicit nested steps; the default
/// entry point fixes them at (outer 1e-4, inner 1e-5).
pub fn rescaled_curvature2_steps(p: ChartPoint, outer: f64, inner: f64) -> Result<f64> {
    p.require_clamped()?;
    let (x, y) = (p.x, p.y);
    let h = |xx: f64, yy: f64| {
        let denom = 2.0 - xx - yy;
        let xlx = xx * xx.ln() + (1.0 - xx) * (1.0 - xx).ln();
        let yly = (1.0 - yy) * (1.0 - yy).ln() + yy * yy.ln();
        -(1.0 - yy) / denom * xlx - (1.0 - xx) / denom * yly
    };
    let c2 = |f: &dyn Fn(f64) -> f64, t: f64| (f(t + inner) - f(t - inner)) / (2.0 * inner);

    // u = √(E/G)·h_y/h along y, v = √(G/E)·h_x/h along x
    let u = |yy: f64| {
        (e_comp(x, yy) / g_comp(x, yy)).sqrt() * c2(&|t| h(x, t), yy) / h(x, yy)
    };
    let v = |xx: f64| {
        (g_comp(xx, y) / e_comp(xx, y)).sqrt() * c2(&|t| h(t, y), xx) / h(xx, y)
    };
    let du = (u(y + outer) - u(y - outer)) / (2.0 * outer);
    let dv = (v(x + outer) - v(x - outer)) / (2.0 * outer);
    let correction = (du + dv) / (2.0 * (e_comp(x, y) * g_comp(x, y)).sqrt());
    Ok(h(x, y) * (curvature2(p)? + correction))
}

/// Entropy-rescaled curvature at the pinned default steps.
pub fn rescaled_curvature2(p: ChartPoint) -> Result<f64> {
    rescaled_curvature2_steps(p, 1e-4, 1e-5)
}

/// The intermediate closed forms behind the curvature computation.
#[derive(Debug, Clone, Copy)]
pub struct Intermediate {
    pub e_y: f64,
    pub g_x: f64,
    pub sqrt_eg: f64,
    /// `(E_y/√(EG))_y`
    pub term_y: f64,
    /// `(G_x/√(EG))_x`
    pub term_x: f64,
}

pub fn intermediate_steps2(p: ChartPoint) -> Result<Intermediate> {
    let (x, y) = (p.x, p.y);
    let denom = 2.0 - x - y;
    Ok(Intermediate {
        e_y: -1.0 / (x * denom * denom),
        g_x: -1.0 / (y * denom * denom),
        sqrt_eg: 1.0 / ((x * y).sqrt() * denom),
        term_y: -(2.0 - x + y) / (2.0 * (x * y).sqrt() * denom * denom),
        term_x: -(2.0 + x - y) / (2.0 * (x * y).sqrt() * denom * denom),
    })
}

/// Scannable quantities of the two-symbol model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Entropy,
    K,
    KTilde,
    E,
    G,
}

/// A rectangular scan region.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Evaluates `quantity` over the grid, x-major. An empty region yields no
/// rows.
pub fn grid_scan(region: Region, step: f64, quantity: Quantity) -> Result<Vec<(f64, f64, f64)>> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidInput(format!("step {step} must be positive")));
    }
    let mut rows = Vec::new();
    let count = |lo: f64, hi: f64| {
        if hi < lo {
            0
        } else {
            ((hi - lo) / step + 1e-9).floor() as usize + 1
        }
    };
    for i in 0..count(region.x0, region.x1) {
        let x = region.x0 + i as f64 * step;
        for j in 0..count(region.y0, region.y1) {
            let y = region.y0 + j as f64 * step;
            let p = ChartPoint::new(x, y)?;
            let value = match quantity {
                Quantity::Entropy => entropy2(p)?,
                Quantity::K => curvature2(p)?,
                Quantity::KTilde => rescaled_curvature2(p)?,
                Quantity::E => metric2(p)?.e,
                Quantity::G => metric2(p)?.g,
            };
            rows.push((x, y, value));
        }
    }
    Ok(rows)
}
