//! Full shifts on finite alphabets: words, cylinder indexing and
//! finite-memory functions.
//!
//! A finite-memory function assigns one value to every length-`n` word over
//! the alphabet `{0, .., m-1}` and is constant on the corresponding depth-`n`
//! cylinders. Words are encoded big-endian (first symbol most significant),
//! so the cylinders sharing a prefix occupy a contiguous code range.
//! Potentials are kept in log scale throughout; exponentiation happens only
//! when transfer matrices are assembled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::MarkovMeasure;

/// Hard cap on table and cylinder-vector sizes; tables grow as m^n and the
/// dyadic projections need depth up to 24.
pub const MAX_TABLE_SIZE: usize = 1 << 24;

/// The full shift over an `m`-symbol alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSpec {
    m: usize,
}

impl ShiftSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("alphabet size {m} < 2")));
        }
        Ok(ShiftSpec { m })
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }
}

/// A finite word, stored as its length and its big-endian base-`m` code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    pub len: u32,
    pub code: usize,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, code: 0 };
}

pub(crate) fn pow(m: usize, k: u32) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc
            .checked_mul(m)
            .filter(|&v| v <= MAX_TABLE_SIZE)
            .ok_or(Error::MemoryOverflow(usize::MAX, MAX_TABLE_SIZE))?;
    }
    Ok(acc)
}

/// Encodes a symbol list as a [`Word`].
pub fn word_index(m: usize, symbols: &[usize]) -> Result<Word> {
    let mut code: usize = 0;
    for &s in symbols {
        if s >= m {
            return Err(Error::SymbolOutOfRange { symbol: s, m });
        }
        code = code * m + s;
    }
    pow(m, symbols.len() as u32)?;
    Ok(Word { len: symbols.len() as u32, code })
}

/// Decodes a [`Word`] back into its symbol list.
pub fn word_symbols(m: usize, w: Word) -> Vec<usize> {
    let mut out = vec![0usize; w.len as usize];
    let mut c = w.code;
    for slot in out.iter_mut().rev() {
        *slot = c % m;
        c /= m;
    }
    out
}

/// A function of the first `memory` coordinates, tabulated over words in
/// code order. Holds potentials, observables and tangent directions alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnTable {
    m: usize,
    memory: u32,
    values: Vec<f64>,
}

impl FnTable {
    pub fn new(m: usize, memory: u32, values: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("alphabet size {m} < 2")));
        }
        if memory < 1 {
            return Err(Error::InvalidInput("memory must be >= 1".into()));
        }
        let len = pow(m, memory)?;
        if values.len() != len {
            return Err(Error::InvalidInput(format!(
                "expected {len} values for m={m}, memory={memory}, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite table value".into()));
        }
        Ok(FnTable { m, memory, values })
    }

    pub fn constant(m: usize, memory: u32, value: f64) -> Result<Self> {
        let len = pow(m, memory)?;
        FnTable::new(m, memory, vec![value; len])
    }

    /// Indicator of the cylinder `w∗`, as a table of memory `|w|`.
    pub fn indicator(m: usize, w: Word) -> Result<Self> {
        if w.len == 0 {
            return FnTable::constant(m, 1, 1.0);
        }
        let len = pow(m, w.len)?;
        let mut values = vec![0.0; len];
        values[w.code] = 1.0;
        FnTable::new(m, w.len, values)
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn memory(&self) -> u32 {
        self.memory
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, code: usize) -> f64 {
        self.values[code]
    }

    /// Value on any word of length >= memory (the prefix decides).
    pub fn value_on(&self, w: Word) -> f64 {
        assert!(w.len >= self.memory, "word shorter than table memory");
        let drop = pow(self.m, w.len - self.memory).expect("within cap");
        self.values[w.code / drop]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> FnTable {
        FnTable {
            m: self.m,
            memory: self.memory,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// The composition with the shift: `(g∘T)(w₁…w_{k+1}) = g(w₂…w_{k+1})`.
    pub fn compose_shift(&self) -> Result<FnTable> {
        let k = self.memory;
        let len = pow(self.m, k + 1)?;
        let tail_len = pow(self.m, k)?;
        let mut values = vec![0.0; len];
        for (c, slot) in values.iter_mut().enumerate() {
            *slot = self.values[c % tail_len];
        }
        FnTable::new(self.m, k + 1, values)
    }

    fn check_alphabet(&self, other: &FnTable) -> Result<()> {
        if self.m != other.m {
            return Err(Error::AlphabetMismatch(self.m, other.m));
        }
        Ok(())
    }

    /// Pointwise combination after lifting both operands to common memory.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &FnTable, f: F) -> Result<FnTable> {
        self.check_alphabet(other)?;
        let mem = self.memory.max(other.memory);
        let a = lift_memory(self, mem)?;
        let b = lift_memory(other, mem)?;
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| f(x, y))
            .collect();
        FnTable::new(self.m, mem, values)
    }

    pub fn add(&self, other: &FnTable) -> Result<FnTable> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &FnTable) -> Result<FnTable> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &FnTable) -> Result<FnTable> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, s: f64) -> FnTable {
        self.map(|v| s * v)
    }

    pub fn add_scalar(&self, s: f64) -> FnTable {
        self.map(|v| v + s)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Largest pointwise gap between two tables viewed as functions.
    pub fn max_abs_diff(&self, other: &FnTable) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

/// Re-tabulates `f` at memory `memory >= f.memory()`; the function itself is
/// unchanged, and so are its integrals against invariant measures.
pub fn lift_memory(f: &FnTable, memory: u32) -> Result<FnTable> {
    if memory < f.memory {
        return Err(Error::MemoryBelowTable { requested: memory, actual: f.memory });
    }
    if memory == f.memory {
        return Ok(f.clone());
    }
    let factor = pow(f.m, memory - f.memory)?;
    let len = pow(f.m, memory)?;
    let mut values = vec![0.0; len];
    for (c, slot) in values.iter_mut().enumerate() {
        *slot = f.values[c / factor];
    }
    FnTable::new(f.m, memory, values)
}

/// Returns `A + g - g∘T + c`, a representative of the same class modulo the
/// coboundary-plus-constant subspace C.
pub fn add_coboundary(a: &FnTable, g: &FnTable, c: f64) -> Result<FnTable> {
    if a.m != g.m {
        return Err(Error::AlphabetMismatch(a.m, g.m));
    }
    let g_shift = g.compose_shift()?;
    Ok(a.add(&g.sub(&g_shift)?)?.add_scalar(c))
}

/// Subtracts the mean: `f - ∫f dμ`.
pub fn center(f: &FnTable, mu: &MarkovMeasure) -> Result<FnTable> {
    let mean = mu.integrate(f)?;
    Ok(f.add_scalar(-mean))
}
