use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{c, join_index, split_index, CMat, SystemLayout, PINV_CUTOFF};
use crate::error::{Error, Result};

/// Schatten norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Inf,
}

/// Dense complex square matrix with an attached tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: SystemLayout,
    mat: CMat,
}

impl Operator {
    pub fn new(layout: SystemLayout, mat: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Layout(format!(
                "matrix is {}x{} but layout dimension is {}",
                mat.nrows(),
                mat.ncols(),
                d
            )));
        }
        Ok(Self { layout, mat })
    }

    pub fn zeros(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            mat: CMat::zeros(d, d),
        }
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            mat: CMat::identity(d, d),
        }
    }

    /// Completely mixed state π = I/d on the given layout.
    pub fn mixed_state(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        let mut op = Self::identity(layout);
        op.mat /= c(d as f64);
        op
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis_state(layout: SystemLayout, k: usize) -> Result<Self> {
        let d = layout.total_dim();
        if k >= d {
            return Err(Error::Parameter(format!("basis index {k} out of range {d}")));
        }
        let mut mat = CMat::zeros(d, d);
        mat[(k, k)] = c(1.0);
        Ok(Self { layout, mat })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            layout: self.layout.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// Entrywise transpose in the computational basis.
    pub fn transpose(&self) -> Operator {
        Operator {
            layout: self.layout.clone(),
            mat: self.mat.transpose(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Operator {
        Operator {
            layout: self.layout.clone(),
            mat: &self.mat * s,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.compatible(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.compatible(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            mat: &self.mat - &other.mat,
        })
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.compatible(other)?;
        Ok(Operator {
            layout: self.layout.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    /// Replaces the layout by an equal-dimension one (relabeling).
    pub fn with_layout(&self, layout: SystemLayout) -> Result<Operator> {
        if layout.total_dim() != self.dim() {
            return Err(Error::Layout(format!(
                "relabel dimension mismatch: {} vs {}",
                layout.total_dim(),
                self.dim()
            )));
        }
        Ok(Operator {
            layout,
            mat: self.mat.clone(),
        })
    }

    fn compatible(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Layout(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    // ---- predicates ---------------------------------------------------

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                if (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        self.herm_eigenvalues().into_iter().all(|e| e >= -tol)
    }

    /// Trace at most 1 + tol (and PSD).
    pub fn is_subnormalized(&self, tol: f64) -> bool {
        self.is_psd(tol) && self.trace().re <= 1.0 + tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        let id = CMat::identity(d, d);
        (prod - id).iter().all(|z| z.norm() <= tol)
    }

    // ---- spectral machinery -------------------------------------------

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn herm_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Full Hermitian eigendecomposition: (eigenvalues, column eigenvectors).
    pub fn herm_eigen(&self) -> (Vec<f64>, CMat) {
        let se = nalgebra::SymmetricEigen::new(self.mat.clone());
        let vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
        (vals, se.eigenvectors)
    }

    /// Applies `f` to the eigenvalues of a Hermitian operator.
    pub fn herm_fn(&self, f: impl Fn(f64) -> f64) -> Operator {
        let (vals, vecs) = self.herm_eigen();
        let d = self.dim();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            vals.iter().map(|&v| c(f(v))),
        ));
        Operator {
            layout: self.layout.clone(),
            mat: &vecs * diag * vecs.adjoint(),
        }
    }

    /// PSD square root; eigenvalues in [PSD_CLIP, 0) are clipped to 0.
    pub fn psd_sqrt(&self) -> Result<Operator> {
        self.checked_psd_fn(|v| v.sqrt(), 0.0)
    }

    /// `λ^p` on the spectrum for PSD λ; negative exponents use the
    /// pseudo-inverse with eigenvalue cutoff `PINV_CUTOFF`.
    pub fn psd_power(&self, p: f64) -> Result<Operator> {
        if p >= 0.0 {
            self.checked_psd_fn(|v| v.powf(p), 0.0)
        } else {
            self.checked_psd_fn(|v| if v > PINV_CUTOFF { v.powf(p) } else { 0.0 }, PINV_CUTOFF)
        }
    }

    fn checked_psd_fn(&self, f: impl Fn(f64) -> f64, floor: f64) -> Result<Operator> {
        let (vals, vecs) = self.herm_eigen();
        // numerical noise below PSD_CLIP is clipped to zero; anything clearly
        // negative is a caller error
        for &v in &vals {
            if v < -1e-8 {
                return Err(Error::Domain(format!(
                    "operator has negative eigenvalue {v:.3e}"
                )));
            }
        }
        let d = self.dim();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            vals.iter().map(|&v| c(f(v.max(floor)))),
        ));
        Ok(Operator {
            layout: self.layout.clone(),
            mat: &vecs * diag * vecs.adjoint(),
        })
    }

    // ---- norms and distances ------------------------------------------

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.mat.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    pub fn schatten_norm(&self, p: SchattenP) -> f64 {
        match p {
            SchattenP::One => self.singular_values().iter().sum(),
            // the 2-norm is the Frobenius norm; no SVD needed
            SchattenP::Two => self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            SchattenP::Inf => self.singular_values().first().copied().unwrap_or(0.0),
        }
    }

    pub fn trace_norm(&self) -> f64 {
        self.schatten_norm(SchattenP::One)
    }

    // ---- tensor structure ---------------------------------------------

    /// Kronecker product with concatenated layouts.
    pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
        if ops.is_empty() {
            return Err(Error::Parameter("tensor of zero operators".into()));
        }
        let mut layout = ops[0].layout.clone();
        let mut mat = ops[0].mat.clone();
        for op in &ops[1..] {
            layout = layout.join(&op.layout)?;
            mat = mat.kronecker(&op.mat);
        }
        Ok(Operator { layout, mat })
    }

    /// Partial trace over the named subsystems. Tracing every factor yields
    /// a 1x1 operator holding the trace.
    pub fn partial_trace(&self, over: &[&str]) -> Result<Operator> {
        let dims = self.layout.dims();
        let n = dims.len();
        let mut traced = vec![false; n];
        for l in over {
            traced[self.layout.position(l)?] = true;
        }
        let keep_layout = if over.len() == n {
            SystemLayout::single("scalar", 1)
        } else {
            self.layout.without(over)?
        };
        let keep_dims: Vec<usize> = (0..n).filter(|&k| !traced[k]).map(|k| dims[k]).collect();
        let tr_dims: Vec<usize> = (0..n).filter(|&k| traced[k]).map(|k| dims[k]).collect();
        let dk: usize = keep_dims.iter().product();
        let dt: usize = tr_dims.iter().product();

        let mut out = CMat::zeros(dk, dk);
        // map (keep-part, traced-part) back to a full flat index
        let recombine = |kp: &[usize], tp: &[usize]| -> usize {
            let mut full = vec![0; n];
            let (mut ik, mut it) = (0, 0);
            for f in 0..n {
                if traced[f] {
                    full[f] = tp[it];
                    it += 1;
                } else {
                    full[f] = kp[ik];
                    ik += 1;
                }
            }
            join_index(&full, &dims)
        };
        for r in 0..dk {
            let rk = split_index(r, &keep_dims);
            for col in 0..dk {
                let ck = split_index(col, &keep_dims);
                let mut acc = Complex64::default();
                for t in 0..dt {
                    let tp = split_index(t, &tr_dims);
                    acc += self.mat[(recombine(&rk, &tp), recombine(&ck, &tp))];
                }
                out[(r, col)] = acc;
            }
        }
        Operator::new(keep_layout, out)
    }

    /// Reorders the tensor factors to the given label order.
    pub fn permute(&self, order: &[&str]) -> Result<Operator> {
        let new_layout = self.layout.select(order)?;
        if order.len() != self.layout.factors().len() {
            return Err(Error::Layout(
                "permutation must mention every factor".into(),
            ));
        }
        let dims = self.layout.dims();
        let new_dims = new_layout.dims();
        let perm: Vec<usize> = order
            .iter()
            .map(|l| self.layout.position(l).unwrap())
            .collect();
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for r in 0..d {
            let rp = split_index(r, &dims);
            let rn: Vec<usize> = perm.iter().map(|&k| rp[k]).collect();
            let rnew = join_index(&rn, &new_dims);
            for col in 0..d {
                let cp = split_index(col, &dims);
                let cn: Vec<usize> = perm.iter().map(|&k| cp[k]).collect();
                out[(rnew, join_index(&cn, &new_dims))] = self.mat[(r, col)];
            }
        }
        Operator::new(new_layout, out)
    }

    // ---- canonical operators ------------------------------------------

    /// Maximally entangled state Φ = |Φ⟩⟨Φ| with |Φ⟩ = Σ_i |ii⟩/√d.
    pub fn max_entangled(d: usize, label_a: &str, label_b: &str) -> Result<Operator> {
        if d < 1 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        let layout = SystemLayout::new(vec![(label_a, d), (label_b, d)])?;
        let mut mat = CMat::zeros(d * d, d * d);
        let amp = c(1.0 / d as f64);
        for i in 0..d {
            for j in 0..d {
                mat[(i * d + i, j * d + j)] = amp;
            }
        }
        Operator::new(layout, mat)
    }

    /// Swap operator F = Σ_{ij} |i⟩⟨j| ⊗ |j⟩⟨i| on a d²-dimensional space.
    pub fn swap_operator(d: usize, label_a: &str, label_b: &str) -> Result<Operator> {
        if d < 1 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        let layout = SystemLayout::new(vec![(label_a, d), (label_b, d)])?;
        let mut mat = CMat::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                mat[(i * d + j, j * d + i)] = c(1.0);
            }
        }
        Operator::new(layout, mat)
    }

    // ---- fidelities ----------------------------------------------------

    /// Uhlmann fidelity F(ρ,σ) = ‖√ρ √σ‖₁ for PSD ρ, σ.
    pub fn fidelity(rho: &Operator, sigma: &Operator) -> Result<f64> {
        rho.compatible(sigma)?;
        for (name, op) in [("first", rho), ("second", sigma)] {
            if !op.is_psd(1e-8) {
                return Err(Error::Domain(format!("{name} argument is not PSD")));
            }
        }
        let sr = rho.psd_sqrt()?;
        let ss = sigma.psd_sqrt()?;
        Ok(sr.matmul(&ss)?.trace_norm())
    }

    /// Generalized fidelity F̄ = F + √((1−tr ρ)(1−tr σ)) on subnormalized states.
    pub fn generalized_fidelity(rho: &Operator, sigma: &Operator) -> Result<f64> {
        let (tr, ts) = (rho.trace().re, sigma.trace().re);
        for (name, t) in [("first", tr), ("second", ts)] {
            if t > 1.0 + 1e-7 {
                return Err(Error::Domain(format!(
                    "{name} argument has trace {t} > 1"
                )));
            }
        }
        let f = Operator::fidelity(rho, sigma)?;
        Ok(f + ((1.0 - tr).max(0.0) * (1.0 - ts).max(0.0)).sqrt())
    }

    /// Purified distance P = √(1 − F̄²), a metric on subnormalized states.
    pub fn purified_distance(rho: &Operator, sigma: &Operator) -> Result<f64> {
        let fbar = Operator::generalized_fidelity(rho, sigma)?.min(1.0);
        Ok((1.0 - fbar * fbar).max(0.0).sqrt())
    }
}
