use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::CMat;

use super::BLOCK_DIM_GUARD;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

/// One sparse Hermitian constraint matrix, `tr(A X) = b`.
///
/// Entries list every nonzero of `A` explicitly; the builder helpers keep
/// the matrix Hermitian.
#[derive(Debug, Clone, Default)]
pub struct Constraint {
    pub(crate) entries: Vec<(usize, usize, usize, Complex64)>, // (block, row, col, value)
}

impl Constraint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Raw entry; caller is responsible for overall Hermiticity.
    pub fn push(&mut self, block: usize, row: usize, col: usize, val: Complex64) -> &mut Self {
        self.entries.push((block, row, col, val));
        self
    }

    /// Adds `val` at (row, col) and its conjugate at (col, row).
    pub fn push_herm(&mut self, block: usize, row: usize, col: usize, val: Complex64) -> &mut Self {
        self.push(block, row, col, val);
        if row != col {
            self.push(block, col, row, val.conj());
        }
        self
    }

    /// A with tr(A X) = Re X[row, col] for Hermitian X.
    pub fn re_entry(block: usize, row: usize, col: usize) -> Self {
        let mut c = Self::new();
        if row == col {
            c.push(block, row, col, Complex64::new(1.0, 0.0));
        } else {
            c.push(block, row, col, Complex64::new(0.5, 0.0));
            c.push(block, col, row, Complex64::new(0.5, 0.0));
        }
        c
    }

    /// A with tr(A X) = Im X[row, col] for Hermitian X (row ≠ col).
    pub fn im_entry(block: usize, row: usize, col: usize) -> Self {
        let mut c = Self::new();
        c.push(block, row, col, Complex64::new(0.0, 0.5));
        c.push(block, col, row, Complex64::new(0.0, -0.5));
        c
    }

    /// Merges another constraint's entries into this one.
    pub fn extend_with(&mut self, other: &Constraint) -> &mut Self {
        self.entries.extend(other.entries.iter().copied());
        self
    }

    /// Scales every entry.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|&(b, r, c, v)| (b, r, c, v * s))
                .collect(),
        }
    }

    /// tr(A X) for block-diagonal Hermitian X; the result is real.
    pub fn dot(&self, x: &[CMat]) -> f64 {
        let mut acc = Complex64::default();
        for &(b, r, c, v) in &self.entries {
            acc += v * x[b][(c, r)];
        }
        acc.re
    }

    /// Adds `s·A` into the dense block matrices.
    pub fn add_into(&self, target: &mut [CMat], s: f64) {
        for &(b, r, c, v) in &self.entries {
            target[b][(r, c)] += v * s;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, _, _, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn validate(&self, block_dims: &[usize]) -> Result<()> {
        for &(b, r, c, _) in &self.entries {
            let dim = *block_dims
                .get(b)
                .ok_or_else(|| Error::Parameter(format!("constraint refers to block {b}")))?;
            if r >= dim || c >= dim {
                return Err(Error::Parameter(format!(
                    "constraint entry ({r},{c}) out of range for block of dim {dim}"
                )));
            }
        }
        Ok(())
    }
}

/// Standard-form semidefinite program with block-diagonal variable.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub(crate) block_dims: Vec<usize>,
    pub(crate) cost: Vec<CMat>,
    pub(crate) constraints: Vec<Constraint>,
    pub(crate) b: Vec<f64>,
    pub(crate) sense: ObjectiveSense,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>, sense: ObjectiveSense) -> Result<Self> {
        if block_dims.is_empty() || block_dims.iter().any(|&d| d == 0) {
            return Err(Error::Parameter("empty or zero-dimensional block".into()));
        }
        if block_dims.iter().any(|&d| d > BLOCK_DIM_GUARD) {
            return Err(Error::Size(format!(
                "block dimension exceeds guard {BLOCK_DIM_GUARD}"
            )));
        }
        let cost = block_dims.iter().map(|&d| CMat::zeros(d, d)).collect();
        Ok(Self {
            block_dims,
            cost,
            constraints: Vec::new(),
            b: Vec::new(),
            sense,
        })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Sets the dense cost block (must be Hermitian within 1e-10).
    pub fn set_cost_block(&mut self, block: usize, c: CMat) -> Result<()> {
        let d = self.block_dims[block];
        if c.nrows() != d || c.ncols() != d {
            return Err(Error::Parameter("cost block dimension mismatch".into()));
        }
        for i in 0..d {
            for j in i..d {
                if (c[(i, j)] - c[(j, i)].conj()).norm() > 1e-10 {
                    return Err(Error::Domain("cost block is not Hermitian".into()));
                }
            }
        }
        self.cost[block] = c;
        Ok(())
    }

    /// Adds a sparse cost entry pair (Hermitian).
    pub fn add_cost_entry(&mut self, block: usize, row: usize, col: usize, val: Complex64) {
        self.cost[block][(row, col)] += val;
        if row != col {
            self.cost[block][(col, row)] += val.conj();
        }
    }

    pub fn add_constraint(&mut self, a: Constraint, b: f64) -> Result<()> {
        a.validate(&self.block_dims)?;
        self.constraints.push(a);
        self.b.push(b);
        Ok(())
    }
}
