//! Transfer matrices and the Ruelle-Perron-Frobenius eigendata.
//!
//! For a potential of memory `n` on the full m-shift, the transfer operator
//! acts on functions of `(n-1)`-blocks as a finite positive matrix. The
//! entry convention follows left multiplication by a row vector: the value
//! at row `v`, column `u` is `exp(A(w))` where the n-word `w` has head
//! (first n-1 symbols) `v` and tail (last n-1 symbols) `u`; column `u`
//! collects the preimage weights of the block `u`. A potential is
//! normalized exactly when every column sums to one, which turns the
//! matrix into the backward-transition kernel of a Markov chain.

use crate::error::{Error, Result};
use crate::gibbs::MarkovMeasure;
use crate::linalg::{det, solve, Mat};
use crate::sft::{lift_memory, pow, FnTable};

const POWER_TOL: f64 = 1e-13;
/// Keep iterating below the tolerance while progress lasts; successive
/// differences at the rounding floor no longer shrink.
const POWER_FLOOR: f64 = 1e-15;
const POWER_MAX_ITER: usize = 100_000;
/// Cross-check the eigenvalue against the characteristic polynomial up to
/// this dimension.
const CHARPOLY_DIM: usize = 64;

/// The matrix of `L_A` on `(n-1)`-block functions.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    m: usize,
    n: u32,
    d: usize,
    mat: Mat,
}

impl TransferMatrix {
    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    /// Memory of the potential the matrix was built from.
    pub fn memory(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    /// True iff column `u` structurally admits row `v`, i.e. the blocks
    /// overlap as tail(v) = head(u).
    pub fn structural(&self, v: usize, u: usize) -> bool {
        let shift = pow(self.m, self.n.saturating_sub(2)).expect("within cap");
        v % shift == u / self.m
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let ones = vec![1.0; self.d];
        self.mat.tr_mul_vec(&ones)
    }

    pub fn max_column_sum_deviation(&self) -> f64 {
        self.column_sums()
            .iter()
            .fold(0.0, |acc, s| acc.max((s - 1.0).abs()))
    }
}

/// Perron eigendata of a transfer matrix.
///
/// `h` is the left eigenvector (the eigenfunction on `(n-1)`-blocks, scaled
/// so that `∫h dν = 1`), `nu` the right eigenvector scaled to a probability
/// vector, and `gap` the power-iteration estimate of `|λ₂|/λ`.
#[derive(Debug, Clone)]
pub struct RpfData {
    pub lambda: f64,
    pub h: Vec<f64>,
    pub nu: Vec<f64>,
    pub gap: f64,
}

/// Builds the transfer matrix of `A`; memory-1 potentials are lifted to
/// memory 2 first so the matrix always acts on blocks of length >= 1.
pub fn transfer_matrix(a: &FnTable) -> Result<TransferMatrix> {
    let n = a.memory().max(2);
    let a = lift_memory(a, n)?;
    let m = a.alphabet_size();
    let d = pow(m, n - 1)?;
    let mut mat = Mat::zeros(d, d);
    for (code, &v) in a.values().iter().enumerate() {
        // head = drop last symbol, tail = drop first symbol
        mat.set(code / m, code % d, v.exp());
    }
    Ok(TransferMatrix { m, n, d, mat })
}

fn sum(v: &[f64]) -> f64 {
    v.iter().sum()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Power iteration for the leading eigendata of a structurally positive
/// transfer matrix, with a characteristic-polynomial cross-check of the
/// eigenvalue in small dimensions.
pub fn rpf(l: &TransferMatrix) -> Result<RpfData> {
    let d = l.d;
    let mut nu = vec![1.0 / d as f64; d];
    let mut h = vec![1.0 / d as f64; d];
    let mut lambda = 0.0;
    let mut prev_diff = f64::INFINITY;
    let mut gap = 1e-16_f64;
    let mut converged = false;
    for _ in 0..POWER_MAX_ITER {
        let mut nu_next = l.mat.mul_vec(&nu);
        let mut h_next = l.mat.tr_mul_vec(&h);
        let s_nu = sum(&nu_next);
        let s_h = sum(&h_next);
        if !s_nu.is_finite() || !s_h.is_finite() || s_nu <= 0.0 || s_h <= 0.0 {
            return Err(Error::NonConvergence(0));
        }
        for v in nu_next.iter_mut() {
            *v /= s_nu;
        }
        for v in h_next.iter_mut() {
            *v /= s_h;
        }
        let diff = sup_diff(&nu_next, &nu).max(sup_diff(&h_next, &h));
        let stalled = diff < POWER_TOL && diff >= prev_diff;
        if prev_diff.is_finite() && prev_diff > 0.0 && diff > 0.0 && !stalled {
            gap = (diff / prev_diff).clamp(1e-16, 1.0 - 1e-16);
        }
        prev_diff = diff;
        nu = nu_next;
        h = h_next;
        // Rayleigh quotient through the dual pairing
        let lnu = l.mat.mul_vec(&nu);
        let num: f64 = h.iter().zip(&lnu).map(|(a, b)| a * b).sum();
        let den: f64 = h.iter().zip(&nu).map(|(a, b)| a * b).sum();
        lambda = num / den;
        if diff < POWER_FLOOR || stalled {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(POWER_MAX_ITER));
    }
    if d <= CHARPOLY_DIM {
        let root = charpoly_root(l, lambda)?;
        if (root - lambda).abs() > 1e-9 * lambda.abs() {
            return Err(Error::NonConvergence(POWER_MAX_ITER));
        }
    }
    // fix scales: nu a probability vector, ∫h dν = 1
    let s = sum(&nu);
    for v in nu.iter_mut() {
        *v /= s;
    }
    let pairing: f64 = h.iter().zip(&nu).map(|(a, b)| a * b).sum();
    for v in h.iter_mut() {
        *v /= pairing;
    }
    Ok(RpfData { lambda, h, nu, gap })
}

/// Locates the dominant root of det(L - xI) by bisection inside a bracket
/// around the power-iteration estimate.
fn charpoly_root(l: &TransferMatrix, lambda: f64) -> Result<f64> {
    let p = |x: f64| {
        let mut shifted = l.mat.clone();
        for i in 0..l.d {
            let v = shifted.get(i, i);
            shifted.set(i, i, v - x);
        }
        det(&shifted)
    };
    // The bracket half-width sits far above the eigenvalue error and far
    // below any plausible distance to the rest of the spectrum once power
    // iteration has converged.
    let half = 3e-5 * lambda.abs().max(f64::MIN_POSITIVE);
    let mut lo = lambda - half;
    let mut hi = lambda + half;
    let mut flo = p(lo);
    let fhi = p(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NonConvergence(0));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * lambda.abs() {
            return Ok(mid);
        }
        let fmid = p(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normalizes a potential: `N(A) = A + log h_A - log h_A ∘ T - log λ_A`.
/// Every column of the resulting transfer matrix sums to one.
pub fn normalize(a: &FnTable) -> Result<FnTable> {
    let n = a.memory().max(2);
    let a = lift_memory(a, n)?;
    let l = transfer_matrix(&a)?;
    let data = rpf(&l)?;
    let m = a.alphabet_size();
    let d = l.d;
    let log_h: Vec<f64> = data.h.iter().map(|v| v.ln()).collect();
    let log_lambda = data.lambda.ln();
    let values = a
        .values()
        .iter()
        .enumerate()
        .map(|(code, &v)| v + log_h[code / m] - log_h[code % d] - log_lambda)
        .collect();
    FnTable::new(m, n, values)
}

/// Applies the transfer operator: `L_A(f)(x) = Σ_{T(y)=x} e^{A(y)} f(y)`.
/// The result has memory `max(A.memory, f.memory, 2) - 1`.
pub fn apply_transfer(a: &FnTable, f: &FnTable) -> Result<FnTable> {
    if a.alphabet_size() != f.alphabet_size() {
        return Err(Error::AlphabetMismatch(a.alphabet_size(), f.alphabet_size()));
    }
    let m = a.alphabet_size();
    let p = a.memory().max(f.memory()).max(2);
    let a = lift_memory(a, p)?;
    let f = lift_memory(f, p)?;
    let d = pow(m, p - 1)?;
    let mut values = vec![0.0; d];
    for (code, slot) in values.iter_mut().enumerate() {
        let mut acc = 0.0;
        for s in 0..m {
            let y = s * d + code;
            acc += a.value(y).exp() * f.value(y);
        }
        *slot = acc;
    }
    FnTable::new(m, p - 1, values)
}

fn require_normalized(a: &FnTable) -> Result<()> {
    let l = transfer_matrix(a)?;
    let dev = l.max_column_sum_deviation();
    if dev > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "potential is not normalized (column sums deviate by {dev:e})"
        )));
    }
    Ok(())
}

/// Shared context for the operators that need both a normalized potential
/// and its Gibbs measure.
pub(crate) struct NormalizedContext {
    pub a: FnTable,
    pub mat: TransferMatrix,
    pub mu: MarkovMeasure,
}

impl NormalizedContext {
    /// `a` must already be normalized.
    pub fn new(a: &FnTable) -> Result<Self> {
        require_normalized(a)?;
        let n = a.memory().max(2);
        let a = lift_memory(a, n)?;
        let mat = transfer_matrix(&a)?;
        let data = rpf(&mat)?;
        let mu = MarkovMeasure::new(a.alphabet_size(), n - 1, data.nu, mat.matrix().clone())?;
        Ok(NormalizedContext { a, mat, mu })
    }

    /// `(I - L_A)^{-1} b` for mean-zero `b`, by peeling the memory down to
    /// block level and then solving the rank-one-corrected system
    /// `(I - L + 1 μᵀ) x = b`.
    pub fn resolvent(&self, b: &FnTable) -> Result<FnTable> {
        let mean = self.mu.integrate(b)?;
        if mean.abs() >= 1e-10 {
            return Err(Error::NotMeanZero(mean));
        }
        let block_mem = self.a.memory() - 1;
        let mut acc: Option<FnTable> = None;
        let mut cur = b.clone();
        while cur.memory() > block_mem {
            acc = Some(match acc {
                None => cur.clone(),
                Some(t) => t.add(&cur)?,
            });
            cur = apply_transfer(&self.a, &cur)?;
        }
        let cur = lift_memory(&cur, block_mem)?;
        let d = self.mat.dim();
        let masses = self.mu.cylinder_masses(block_mem)?;
        // system matrix S = I - Lᵀ... acting on column vectors the operator
        // is matᵀ, so S[i][j] = δ_ij - mat[j][i] + masses[j]
        let mut s = Mat::zeros(d, d);
        for i in 0..d {
            for (j, mass) in masses.iter().enumerate() {
                let v = if i == j { 1.0 } else { 0.0 };
                s.set(i, j, v - self.mat.matrix().get(j, i) + mass);
            }
        }
        let y = solve(&s, cur.values()).ok_or(Error::NonConvergence(0))?;
        let y = FnTable::new(self.a.alphabet_size(), block_mem, y)?;
        match acc {
            None => Ok(y),
            Some(t) => t.add(&y),
        }
    }

    /// `M_A(f) = -(I - L_A)^{-1} L_A(f_A) = -Σ_{k>=1} L_A^k(f_A)`.
    pub fn m_operator(&self, f: &FnTable) -> Result<FnTable> {
        let centered = crate::sft::center(f, &self.mu)?;
        let lf = apply_transfer(&self.a, &centered)?;
        Ok(self.resolvent(&lf)?.scale(-1.0))
    }

    /// Projection of `ζ` to `ker L_A` along C.
    pub fn dn_projection(&self, zeta: &FnTable) -> Result<FnTable> {
        let zeta_c = crate::sft::center(zeta, &self.mu)?;
        let g = self.resolvent(&apply_transfer(&self.a, &zeta_c)?)?;
        zeta_c.add(&g)?.sub(&g.compose_shift()?)
    }
}

/// Solves `(I - L_A) x = b` with `∫x dμ_A = 0`; requires `A` normalized and
/// `b` mean-zero.
pub fn resolvent_solve(a: &FnTable, b: &FnTable) -> Result<FnTable> {
    NormalizedContext::new(a)?.resolvent(b)
}

/// The operator `M_A`; see the normalization theory. Requires `A` normalized.
pub fn m_operator(a: &FnTable, f: &FnTable) -> Result<FnTable> {
    NormalizedContext::new(a)?.m_operator(f)
}

/// Decomposes `f = ℓ + g - g∘T + c` with `L_A ℓ = 0`, `∫g dμ_A = 0` and
/// `c = ∫f dμ_A`. Requires `A` normalized.
pub fn quotient_decompose(a: &FnTable, f: &FnTable) -> Result<(FnTable, FnTable, f64)> {
    let ctx = NormalizedContext::new(a)?;
    let c = ctx.mu.integrate(f)?;
    let g = ctx.m_operator(f)?;
    let ell = f.sub(&g.sub(&g.compose_shift()?)?)?.add_scalar(-c);
    Ok((ell, g, c))
}

/// The derivative of the normalization map: the projection of `ζ` to
/// `ker L_A` along C. Requires `A` normalized.
pub fn dn_projection(a: &FnTable, zeta: &FnTable) -> Result<FnTable> {
    NormalizedContext::new(a)?.dn_projection(zeta)
}
