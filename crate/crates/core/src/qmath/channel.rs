use num_complex::Complex64;

use super::{c, CMat, Operator, SystemLayout};
use crate::error::{Error, Result};

/// Linear map between operator spaces, stored as a Choi matrix.
///
/// The Choi matrix is `ω = (T ⊗ I)(Φ_in)` with the trace-1 maximally
/// entangled state, laid out as output factors followed by a primed copy of
/// the input factors. For trace-preserving completely positive maps ω is a
/// quantum state.
#[derive(Debug, Clone)]
pub struct Channel {
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    choi: Operator,
}

impl Channel {
    /// Builds a channel from its (trace-normalized) Choi matrix given as a raw
    /// matrix on `out ⊗ in-copy`.
    pub fn from_choi_matrix(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        choi: CMat,
    ) -> Result<Self> {
        let d = in_layout.total_dim() * out_layout.total_dim();
        if choi.nrows() != d || choi.ncols() != d {
            return Err(Error::Layout(format!(
                "Choi matrix is {}x{}, expected {d}x{d}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        let choi_layout = out_layout.join(&in_layout.relabel_with_suffix("'"))?;
        Ok(Self {
            in_layout,
            out_layout,
            choi: Operator::new(choi_layout, choi)?,
        })
    }

    /// Builds the Choi matrix of a map given as a closure on operators.
    pub fn from_map(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        map: impl Fn(&Operator) -> Result<Operator>,
    ) -> Result<Self> {
        let din = in_layout.total_dim();
        let dout = out_layout.total_dim();
        let mut choi = CMat::zeros(dout * din, dout * din);
        let inv_d = c(1.0 / din as f64);
        for i in 0..din {
            for j in 0..din {
                let mut unit = CMat::zeros(din, din);
                unit[(i, j)] = c(1.0);
                let img = map(&Operator::new(in_layout.clone(), unit)?)?;
                if img.dim() != dout {
                    return Err(Error::Layout(format!(
                        "map returned dimension {}, expected {dout}",
                        img.dim()
                    )));
                }
                for o1 in 0..dout {
                    for o2 in 0..dout {
                        choi[(o1 * din + i, o2 * din + j)] = img.matrix()[(o1, o2)] * inv_d;
                    }
                }
            }
        }
        Self::from_choi_matrix(in_layout, out_layout, choi)
    }

    /// The identity channel on `layout`; its Choi matrix is Φ.
    pub fn identity(layout: SystemLayout) -> Result<Self> {
        Self::from_map(layout.clone(), layout, |x| Ok(x.clone()))
    }

    /// The completely depolarizing channel ρ ↦ π·tr ρ.
    pub fn depolarizing(layout: SystemLayout) -> Result<Self> {
        let pi = Operator::mixed_state(layout.clone());
        Self::from_map(layout.clone(), layout, move |x| {
            Ok(pi.scale(x.trace()))
        })
    }

    /// Conjugation by a fixed unitary.
    pub fn unitary_conjugation(u: &Operator) -> Result<Self> {
        if !u.is_unitary(1e-8) {
            return Err(Error::Domain("conjugation operator is not unitary".into()));
        }
        let u = u.clone();
        Self::from_map(u.layout().clone(), u.layout().clone(), move |x| {
            Ok(Operator::new(
                x.layout().clone(),
                u.matrix() * x.matrix() * u.matrix().adjoint(),
            )?)
        })
    }

    /// The partial-trace channel tr_over on `layout`.
    pub fn partial_trace_channel(layout: SystemLayout, over: &[&str]) -> Result<Self> {
        let out_layout = if over.len() == layout.factors().len() {
            SystemLayout::single("scalar", 1)
        } else {
            layout.without(over)?
        };
        let over: Vec<String> = over.iter().map(|s| s.to_string()).collect();
        Self::from_map(layout, out_layout, move |x| {
            let labels: Vec<&str> = over.iter().map(|s| s.as_str()).collect();
            x.partial_trace(&labels)
        })
    }

    /// Dephasing in the computational basis (kills off-diagonal entries).
    pub fn dephasing(layout: SystemLayout) -> Result<Self> {
        Self::from_map(layout.clone(), layout, |x| {
            let d = x.dim();
            let mut m = CMat::zeros(d, d);
            for i in 0..d {
                m[(i, i)] = x.matrix()[(i, i)];
            }
            Operator::new(x.layout().clone(), m)
        })
    }

    /// The zero map.
    pub fn zero(in_layout: SystemLayout, out_layout: SystemLayout) -> Result<Self> {
        let d = in_layout.total_dim() * out_layout.total_dim();
        Self::from_choi_matrix(in_layout, out_layout, CMat::zeros(d, d))
    }

    /// Unique Choi–Jamiołkowski preimage of a bipartite Hermitian operator:
    /// the map E with `(I ⊗ E)(Φ_{A,copy}) = ρ_{A R}`, acting on a copy of the
    /// `a_labels` part and producing the remaining part.
    ///
    /// Not trace-preserving in general.
    pub fn choi_preimage(rho: &Operator, a_labels: &[&str]) -> Result<Self> {
        if !rho.is_hermitian(1e-8) {
            return Err(Error::Domain("preimage source is not Hermitian".into()));
        }
        let in_layout = rho.layout().select(a_labels)?;
        let r_labels: Vec<&str> = rho
            .layout()
            .labels()
            .into_iter()
            .filter(|l| !a_labels.contains(l))
            .collect();
        let out_layout = rho.layout().select(&r_labels)?;
        // ρ = (1/d)Σ_ij E_ij ⊗ E(E_ij); the Choi matrix of E is the same
        // data with the A and R factors swapped
        let mut order: Vec<&str> = r_labels.clone();
        order.extend(a_labels);
        let permuted = rho.permute(&order)?;
        Self::from_choi_matrix(in_layout, out_layout, permuted.into_matrix())
    }

    pub fn in_layout(&self) -> &SystemLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SystemLayout {
        &self.out_layout
    }

    /// The Choi matrix ω = (T ⊗ I)(Φ) as an operator on out ⊗ in-copy.
    pub fn to_choi(&self) -> Operator {
        self.choi.clone()
    }

    /// Reduction ω_out = tr_{in-copy}(ω); equals T(π_in).
    pub fn choi_out_reduction(&self) -> Result<Operator> {
        let primed = self.in_layout.relabel_with_suffix("'");
        let labels: Vec<&str> = primed.labels().iter().map(|l| *l).collect();
        self.choi.partial_trace(&labels)
    }

    // ---- predicates ---------------------------------------------------

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.choi.is_hermitian(tol)
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.choi.is_psd(tol)
    }

    /// Trace-preserving: the partial trace of the unnormalized Choi matrix
    /// over the output equals the identity on the input copy.
    pub fn is_tp(&self, tol: f64) -> bool {
        let out_labels: Vec<&str> = self.out_layout.labels();
        let red = match self.choi.partial_trace(&out_labels) {
            Ok(r) => r,
            Err(_) => return false,
        };
        let din = self.in_layout.total_dim() as f64;
        let id = CMat::identity(red.dim(), red.dim());
        (red.matrix() * c(din) - id).iter().all(|z| z.norm() <= tol)
    }

    // ---- application ---------------------------------------------------

    /// Applies the channel to the factors of `x` named by `targets`
    /// (identity on every other factor). The output layout lists the channel
    /// output factors first, then the untouched factors.
    pub fn apply_on(&self, x: &Operator, targets: &[&str]) -> Result<Operator> {
        let target_dim = x.layout().dim_of_all(targets)?;
        let din = self.in_layout.total_dim();
        if target_dim != din {
            return Err(Error::Layout(format!(
                "target dimension {target_dim} does not match channel input {din}"
            )));
        }
        let extras: Vec<&str> = x
            .layout()
            .labels()
            .into_iter()
            .filter(|l| !targets.contains(l))
            .collect();
        let mut order: Vec<&str> = targets.to_vec();
        order.extend(&extras);
        let xp = x.permute(&order)?;
        let dext = x.layout().dim_of_all(&extras)?;
        let dout = self.out_layout.total_dim();

        // T(X)[(o1,e1),(o2,e2)] = Σ_{ij} d_in·ω[(o1,i),(o2,j)] X[(i,e1),(j,e2)]
        let omega = self.choi.matrix();
        let scale = c(din as f64);
        let mut out = CMat::zeros(dout * dext, dout * dext);
        for o1 in 0..dout {
            for o2 in 0..dout {
                for e1 in 0..dext {
                    for e2 in 0..dext {
                        let mut acc = Complex64::default();
                        for i in 0..din {
                            for j in 0..din {
                                acc += omega[(o1 * din + i, o2 * din + j)]
                                    * xp.matrix()[(i * dext + e1, j * dext + e2)];
                            }
                        }
                        out[(o1 * dext + e1, o2 * dext + e2)] = acc * scale;
                    }
                }
            }
        }
        let out_layout = self.out_layout.join(&x.layout().select(&extras)?)?;
        Operator::new(out_layout, out)
    }

    /// Applies the channel to an operator living exactly on the input space.
    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        let targets: Vec<&str> = self.in_layout.labels();
        if x.layout().total_dim() != self.in_layout.total_dim() {
            return Err(Error::Layout(format!(
                "operator dimension {} does not match channel input {}",
                x.layout().total_dim(),
                self.in_layout.total_dim()
            )));
        }
        // match by position: relabel x to the channel's input layout
        let xr = x.with_layout(self.in_layout.clone())?;
        self.apply_on(&xr, &targets)
    }

    /// Adjoint map with respect to the Schmidt scalar product,
    /// T†(Y)_{ij} = tr(T(E_ij)† Y).
    pub fn adjoint_apply(&self, y: &Operator) -> Result<Operator> {
        let dout = self.out_layout.total_dim();
        if y.dim() != dout {
            return Err(Error::Layout(format!(
                "operator dimension {} does not match channel output {dout}",
                y.dim()
            )));
        }
        let din = self.in_layout.total_dim();
        let omega = self.choi.matrix();
        let scale = c(din as f64);
        let mut out = CMat::zeros(din, din);
        for i in 0..din {
            for j in 0..din {
                let mut acc = Complex64::default();
                for o1 in 0..dout {
                    for o2 in 0..dout {
                        acc += (omega[(o1 * din + i, o2 * din + j)] * scale).conj()
                            * y.matrix()[(o1, o2)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        Operator::new(self.in_layout.clone(), out)
    }

    // ---- linear structure ----------------------------------------------

    pub fn sub(&self, other: &Channel) -> Result<Channel> {
        self.same_shape(other)?;
        Self::from_choi_matrix(
            self.in_layout.clone(),
            self.out_layout.clone(),
            self.choi.matrix() - other.choi.matrix(),
        )
    }

    pub fn add(&self, other: &Channel) -> Result<Channel> {
        self.same_shape(other)?;
        Self::from_choi_matrix(
            self.in_layout.clone(),
            self.out_layout.clone(),
            self.choi.matrix() + other.choi.matrix(),
        )
    }

    pub fn scale(&self, s: f64) -> Channel {
        Self::from_choi_matrix(
            self.in_layout.clone(),
            self.out_layout.clone(),
            self.choi.matrix() * c(s),
        )
        .expect("scaling preserves shape")
    }

    fn same_shape(&self, other: &Channel) -> Result<()> {
        if self.in_layout.total_dim() != other.in_layout.total_dim()
            || self.out_layout.total_dim() != other.out_layout.total_dim()
        {
            return Err(Error::Layout("channel shape mismatch".into()));
        }
        Ok(())
    }
}
