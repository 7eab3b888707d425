//! Gibbs measures as finite-order Markov measures.
//!
//! The Gibbs measure of a memory-`n` potential is the stationary law of the
//! backward Markov chain whose kernel is the column-stochastic transfer
//! matrix of the normalized potential: `trans[u][v]` is the probability of
//! prepending a symbol to a sequence starting with block `v` so that it
//! starts with block `u`. Cylinder masses factorize over this kernel, with
//! the stationary vector weighting the terminal block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sft::{lift_memory, pow, FnTable, Word};
use crate::transfer::{normalize, rpf, transfer_matrix};

/// A stationary Markov measure of finite order on the full shift.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    m: usize,
    order: u32,
    pi: Vec<f64>,
    trans: Mat,
}

#[derive(Serialize, Deserialize)]
struct MarkovMeasureRepr {
    m: usize,
    order: u32,
    pi: Vec<f64>,
    trans: Vec<Vec<f64>>,
}

impl Serialize for MarkovMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.pi.len();
        let trans = (0..d)
            .map(|r| self.trans.data[r * d..(r + 1) * d].to_vec())
            .collect();
        MarkovMeasureRepr { m: self.m, order: self.order, pi: self.pi.clone(), trans }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkovMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MarkovMeasureRepr::deserialize(d)?;
        let dim = repr.pi.len();
        let mut mat = Mat::zeros(dim, dim);
        for (r, row) in repr.trans.iter().enumerate() {
            if row.len() != dim {
                return Err(serde::de::Error::custom("ragged transition matrix"));
            }
            for (c, &v) in row.iter().enumerate() {
                mat.set(r, c, v);
            }
        }
        MarkovMeasure::new(repr.m, repr.order, repr.pi, mat).map_err(serde::de::Error::custom)
    }
}

impl MarkovMeasure {
    /// Validates stochasticity and stationarity before accepting the data.
    pub fn new(m: usize, order: u32, pi: Vec<f64>, trans: Mat) -> Result<Self> {
        let d = pow(m, order)?;
        if order < 1 {
            return Err(Error::InvalidInput("order must be >= 1".into()));
        }
        if pi.len() != d || trans.rows != d || trans.cols != d {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: expected {d} blocks"
            )));
        }
        if pi.iter().any(|&v| v < -1e-12 || !v.is_finite()) {
            return Err(Error::InvalidInput("pi must be nonnegative".into()));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("pi sums to {total}")));
        }
        for c in 0..d {
            let mut s = 0.0;
            for r in 0..d {
                let v = trans.get(r, c);
                if v < -1e-12 || !v.is_finite() {
                    return Err(Error::InvalidInput("negative transition weight".into()));
                }
                s += v;
            }
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("column {c} sums to {s}")));
            }
        }
        let fixed = trans.mul_vec(&pi);
        for (a, b) in fixed.iter().zip(&pi) {
            if (a - b).abs() > 1e-9 {
                return Err(Error::InvalidInput("pi is not stationary".into()));
            }
        }
        Ok(MarkovMeasure { m, order, pi, trans })
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn transitions(&self) -> &Mat {
        &self.trans
    }

    /// Mass of the cylinder `w∗`.
    pub fn cylinder_mass(&self, w: Word) -> Result<f64> {
        let k = self.order;
        if w.len == 0 {
            return Ok(1.0);
        }
        if w.len <= k {
            let span = pow(self.m, k - w.len)?;
            return Ok(self.pi[w.code * span..(w.code + 1) * span].iter().sum());
        }
        let steps = (w.len - k) as usize;
        let block_mask = pow(self.m, k)?;
        let block = |start: usize| -> usize {
            let drop = pow(self.m, w.len - k - start as u32).expect("within cap");
            (w.code / drop) % block_mask
        };
        let mut mass = self.pi[block(steps)];
        for t in 0..steps {
            mass *= self.trans.get(block(t), block(t + 1));
        }
        Ok(mass)
    }

    /// Masses of all depth-`p` cylinders in word-code order.
    pub fn cylinder_masses(&self, depth: u32) -> Result<Vec<f64>> {
        let k = self.order;
        if depth == 0 {
            return Ok(vec![1.0]);
        }
        if depth <= k {
            let span = pow(self.m, k - depth)?;
            return Ok(self
                .pi
                .chunks(span)
                .map(|chunk| chunk.iter().sum())
                .collect());
        }
        let block_mask = pow(self.m, k)?;
        let mut masses = self.pi.clone();
        for q in k..depth {
            let next_len = pow(self.m, q + 1)?;
            let cur_len = masses.len();
            let mut next = vec![0.0; next_len];
            let head_div = next_len / block_mask;
            let step_div = pow(self.m, q - k)?;
            for (c, slot) in next.iter_mut().enumerate() {
                let head = c / head_div;
                let second = (c / step_div) % block_mask;
                *slot = self.trans.get(head, second) * masses[c % cur_len];
            }
            masses = next;
        }
        Ok(masses)
    }

    /// `∫φ dμ` by summing the table against cylinder masses at the table's
    /// memory depth.
    pub fn integrate(&self, phi: &FnTable) -> Result<f64> {
        if phi.alphabet_size() != self.m {
            return Err(Error::AlphabetMismatch(phi.alphabet_size(), self.m));
        }
        let masses = self.cylinder_masses(phi.memory())?;
        Ok(phi.values().iter().zip(&masses).map(|(v, w)| v * w).sum())
    }

    /// Conditional entropy of the backward chain,
    /// `-Σ_{u,v} trans[u][v] log trans[u][v] π(v)` over the structural support.
    pub fn entropy(&self) -> f64 {
        let d = self.pi.len();
        let mut h = 0.0;
        for v in 0..d {
            let weight = self.pi[v];
            if weight <= 0.0 {
                continue;
            }
            let mut cond = 0.0;
            for u in 0..d {
                let p = self.trans.get(u, v);
                if p > 0.0 {
                    cond -= p * p.ln();
                }
            }
            h += weight * cond;
        }
        h
    }

    /// Draws a symbol sequence of the given length; deterministic per seed.
    pub fn sample_path(&self, length: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.order as usize;
        let d = self.pi.len();
        let tail_mask = pow(self.m, self.order - 1).expect("within cap");
        let mut out = Vec::with_capacity(length);

        let mut u: f64 = rng.gen();
        let mut block = d - 1;
        let mut acc = 0.0;
        for (i, &w) in self.pi.iter().enumerate() {
            acc += w;
            if u < acc {
                block = i;
                break;
            }
        }
        let mut digits = vec![0usize; k];
        let mut c = block;
        for slot in digits.iter_mut().rev() {
            *slot = c % self.m;
            c /= self.m;
        }
        out.extend(digits.iter().take(length.min(k)));

        while out.len() < length {
            u = rng.gen();
            acc = 0.0;
            let base = (block % tail_mask) * self.m;
            let mut sym = self.m - 1;
            for s in 0..self.m {
                let next = base + s;
                let q = if self.pi[block] > 0.0 {
                    self.trans.get(block, next) * self.pi[next] / self.pi[block]
                } else {
                    0.0
                };
                acc += q;
                if u < acc {
                    sym = s;
                    break;
                }
            }
            block = base + sym;
            out.push(sym);
        }
        out
    }
}

/// The Gibbs measure of a potential: normalize, build the transfer matrix,
/// take its stationary vector.
pub fn gibbs_measure(a: &FnTable) -> Result<MarkovMeasure> {
    let n = normalize(a)?;
    let l = transfer_matrix(&n)?;
    let data = rpf(&l)?;
    MarkovMeasure::new(a.alphabet_size(), l.memory() - 1, data.nu, l.matrix().clone())
}

/// Topological pressure `Pr(B) = log λ_B`.
pub fn pressure(b: &FnTable) -> Result<f64> {
    let lifted = lift_memory(b, b.memory().max(2))?;
    Ok(rpf(&transfer_matrix(&lifted)?)?.lambda.ln())
}

/// The pressure functional `P_B(μ) = h(μ) + ∫B dμ`; maximized exactly at
/// the Gibbs measure of `B`.
pub fn p_functional(b: &FnTable, mu: &MarkovMeasure) -> Result<f64> {
    Ok(mu.entropy() + mu.integrate(b)?)
}

/// Legendre defect `(log λ_A - ∫A dν) - h(ν)`; nonnegative, zero iff
/// `ν = μ_A`.
pub fn legendre_gap(nu: &MarkovMeasure, a: &FnTable) -> Result<f64> {
    Ok(pressure(a)? - nu.integrate(a)? - nu.entropy())
}
