//! Haar sampling, two-fold twirls, unitary ensembles and design-quality
//! estimation.
//!
//! An ensemble of unitaries is a δ-approximate unitary 2-design when its
//! two-fold twirl `G_W(ρ) = Σ p_i U_i⊗²ρ(U_i†)⊗²` is within δ of the Haar
//! twirl `G_H` in diamond norm. The Haar twirl has the closed form
//! `c_I·I + c_F·F` fixed by trace and swap-trace preservation, so design
//! quality reduces to norms of the difference map.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{CMat, Operator, OperatorJson, SystemLayout};
use crate::sdpcore;


/// A finite weighted set of unitaries over a fixed dimension, or the
/// symbolic Haar ensemble.
#[derive(Debug, Clone)]
pub enum UnitaryEnsemble {
    /// The Haar measure on U(d).
    Haar { dim: usize },
    /// An explicit list of (probability, unitary) pairs.
    Explicit {
        dim: usize,
        elements: Vec<(f64, Operator)>,
    },
}

impl UnitaryEnsemble {
    pub fn haar(dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Parameter("ensemble dimension must be ≥ 1".into()));
        }
        Ok(UnitaryEnsemble::Haar { dim })
    }

    pub fn explicit(elements: Vec<(f64, Operator)>) -> Result<Self> {
        let dim = match elements.first() {
            Some((_, u)) => u.dim(),
            None => return Err(Error::Parameter("ensemble has no elements".into())),
        };
        let mut total = 0.0;
        for (p, u) in &elements {
            if *p < 0.0 {
                return Err(Error::Domain(format!("negative probability {p}")));
            }
            total += p;
            if u.dim() != dim {
                return Err(Error::Layout(format!(
                    "ensemble mixes dimensions {dim} and {}",
                    u.dim()
                )));
            }
            if !u.is_unitary(1e-10) {
                return Err(Error::Domain("ensemble element is not unitary".into()));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "ensemble probabilities sum to {total}, expected 1"
            )));
        }
        Ok(UnitaryEnsemble::Explicit { dim, elements })
    }

    pub fn dim(&self) -> usize {
        match self {
            UnitaryEnsemble::Haar { dim } => *dim,
            UnitaryEnsemble::Explicit { dim, .. } => *dim,
        }
    }

    pub fn is_haar(&self) -> bool {
        matches!(self, UnitaryEnsemble::Haar { .. })
    }

    pub fn elements(&self) -> Option<&[(f64, Operator)]> {
        match self {
            UnitaryEnsemble::Haar { .. } => None,
            UnitaryEnsemble::Explicit { elements, .. } => Some(elements),
        }
    }

    pub fn to_json(&self) -> EnsembleJson {
        match self {
            UnitaryEnsemble::Haar { dim } => EnsembleJson {
                dim: *dim,
                elements: ElementsJson::Tag("haar".into()),
            },
            UnitaryEnsemble::Explicit { dim, elements } => EnsembleJson {
                dim: *dim,
                elements: ElementsJson::List(
                    elements
                        .iter()
                        .map(|(p, u)| EnsembleElementJson {
                            p: *p,
                            u: u.to_json(),
                        })
                        .collect(),
                ),
            },
        }
    }

    pub fn from_json(json: &EnsembleJson) -> Result<Self> {
        match &json.elements {
            ElementsJson::Tag(tag) if tag == "haar" => UnitaryEnsemble::haar(json.dim),
            ElementsJson::Tag(tag) => Err(Error::Config(format!(
                "unknown ensemble tag {tag:?}, expected \"haar\""
            ))),
            ElementsJson::List(items) => {
                let elements = items
                    .iter()
                    .map(|e| Ok((e.p, Operator::from_json(&e.u)?)))
                    .collect::<Result<Vec<_>>>()?;
                let ens = UnitaryEnsemble::explicit(elements)?;
                if ens.dim() != json.dim {
                    return Err(Error::Config(format!(
                        "ensemble dim field {} does not match element dimension {}",
                        json.dim,
                        ens.dim()
                    )));
                }
                Ok(ens)
            }
        }
    }
}

/// JSON form of an ensemble; the Haar ensemble serializes its element list
/// as the string sentinel `"haar"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub dim: usize,
    pub elements: ElementsJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementsJson {
    Tag(String),
    List(Vec<EnsembleElementJson>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleElementJson {
    pub p: f64,
    pub u: OperatorJson,
}

/// Samples a Haar-distributed unitary on the given layout.
///
/// Uses a complex Ginibre matrix followed by QR with the R diagonal's phases
/// absorbed into Q, which corrects the naive-QR distribution bias.
pub fn haar_sample(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let g = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Operator::new(layout, q).expect("square matrix matches layout")
}

fn swap_matrix(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(i * d + j, j * d + i)] = Complex64::new(1.0, 0.0);
        }
    }
    f
}

fn twirl_side_dim(rho: &Operator) -> Result<usize> {
    let dd = rho.dim();
    let d = (dd as f64).sqrt().round() as usize;
    if d * d != dd {
        return Err(Error::Layout(format!(
            "two-fold twirl needs a d⊗d space, got total dimension {dd}"
        )));
    }
    if d < 2 {
        return Err(Error::Domain(
            "two-fold twirl is degenerate for d = 1".into(),
        ));
    }
    Ok(d)
}

/// Haar two-fold twirl `∫ U⊗² ρ (U†)⊗² dU` in closed form.
///
/// The output is `c_I·I + c_F·F` with the coefficients fixed by preservation
/// of `tr ρ` and `tr(ρF)`:
/// `c_I = (d²·tr ρ − d·tr(ρF))/(d²(d²−1))` and symmetrically for `c_F`.
pub fn haar_twirl2(rho: &Operator) -> Result<Operator> {
    let d = twirl_side_dim(rho)?;
    let dd = d * d;
    let f = swap_matrix(d);
    let tr = rho.trace();
    let mut tr_f = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr_f += rho.matrix()[(i * d + j, j * d + i)];
        }
    }
    let df = d as f64;
    let denom = df * df * (df * df - 1.0);
    let c_i = (df * df * tr - df * tr_f) / denom;
    let c_f = (df * df * tr_f - df * tr) / denom;
    let out = CMat::identity(dd, dd) * c_i + f * c_f;
    Operator::new(rho.layout().clone(), out)
}

/// Ensemble two-fold twirl `G_W(ρ) = Σ p_i U_i⊗² ρ (U_i†)⊗²`.
pub fn ensemble_twirl2(ensemble: &UnitaryEnsemble, rho: &Operator) -> Result<Operator> {
    let d = twirl_side_dim(rho)?;
    if d != ensemble.dim() {
        return Err(Error::Layout(format!(
            "ensemble dimension {} does not match twirl side {d}",
            ensemble.dim()
        )));
    }
    match ensemble {
        UnitaryEnsemble::Haar { .. } => haar_twirl2(rho),
        UnitaryEnsemble::Explicit { elements, .. } => {
            let mut out = CMat::zeros(d * d, d * d);
            for (p, u) in elements {
                let u2 = u.matrix().kronecker(u.matrix());
                out += (&u2 * rho.matrix() * u2.adjoint()) * Complex64::new(*p, 0.0);
            }
            Operator::new(rho.layout().clone(), out)
        }
    }
}

/// Dense matrix of a two-fold twirl as a superoperator on the d²-dimensional
/// operator space, in column-stacking vectorization (`vec(UXU†) =
/// (conj U ⊗ U)·vec X`).
#[derive(Debug, Clone)]
pub struct MomentOperator {
    dim: usize,
    matrix: CMat,
}

impl MomentOperator {
    /// The Haar twirl `G_H` as a superoperator matrix.
    pub fn haar(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(
                "two-fold twirl is degenerate for d = 1".into(),
            ));
        }
        let dd = dim * dim;
        let df = dim as f64;
        let denom = df * df * (df * df - 1.0);
        // functionals: tr ρ = f_I·vec ρ, tr(ρF) = f_F·vec ρ
        let mut v_i = nalgebra::DVector::<Complex64>::zeros(dd * dd);
        let mut v_f = nalgebra::DVector::<Complex64>::zeros(dd * dd);
        for k in 0..dd {
            v_i[k * dd + k] = Complex64::new(1.0, 0.0);
        }
        for p in 0..dim {
            for q in 0..dim {
                let row = p * dim + q;
                let col = q * dim + p;
                v_f[col * dd + row] = Complex64::new(1.0, 0.0);
            }
        }
        let a = Complex64::new(df * df / denom, 0.0);
        let b = Complex64::new(-df / denom, 0.0);
        let matrix = &v_i * (v_i.transpose() * a + v_f.transpose() * b)
            + &v_f * (v_i.transpose() * b + v_f.transpose() * a);
        Ok(MomentOperator { dim, matrix })
    }

    /// The twirl `G_W` of a finite ensemble (or `G_H` for the Haar tag).
    pub fn of_ensemble(ensemble: &UnitaryEnsemble) -> Result<Self> {
        match ensemble {
            UnitaryEnsemble::Haar { dim } => MomentOperator::haar(*dim),
            UnitaryEnsemble::Explicit { dim, elements } => {
                let dd = dim * dim;
                let mut matrix = CMat::zeros(dd * dd, dd * dd);
                for (p, u) in elements {
                    let u2 = u.matrix().kronecker(u.matrix());
                    matrix += u2.conjugate().kronecker(&u2) * Complex64::new(*p, 0.0);
                }
                Ok(MomentOperator { dim: *dim, matrix })
            }
        }
    }

    /// Empirical twirl of equally weighted single-copy unitaries (e.g.
    /// sampled circuit unitaries): the average of `ρ ↦ U⊗²ρ(U†)⊗²` over the
    /// samples.
    pub fn empirical(dim: usize, samples: &[Operator]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Parameter("no samples".into()));
        }
        let dd = dim * dim;
        let mut matrix = CMat::zeros(dd * dd, dd * dd);
        let w = Complex64::new(1.0 / samples.len() as f64, 0.0);
        for u in samples {
            if u.dim() != dim {
                return Err(Error::Layout(format!(
                    "sample dimension {} does not match {dim}",
                    u.dim()
                )));
            }
            let u2 = u.matrix().kronecker(u.matrix());
            matrix += u2.conjugate().kronecker(&u2) * w;
        }
        Ok(MomentOperator { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Applies the superoperator to an operator on the d² space.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        let dd = self.dim * self.dim;
        if rho.dim() != dd {
            return Err(Error::Layout(format!(
                "operator dimension {} does not match twirl space {dd}",
                rho.dim()
            )));
        }
        let mut vecd = nalgebra::DVector::<Complex64>::zeros(dd * dd);
        for c in 0..dd {
            for r in 0..dd {
                vecd[c * dd + r] = rho.matrix()[(r, c)];
            }
        }
        let out_vec = &self.matrix * vecd;
        let mut out = CMat::zeros(dd, dd);
        for c in 0..dd {
            for r in 0..dd {
                out[(r, c)] = out_vec[c * dd + r];
            }
        }
        Operator::new(rho.layout().clone(), out)
    }

    /// Trace-normalized Choi matrix of the superoperator,
    /// `J[(o1,i),(o2,j)] = G(E_ij)[o1,o2] / d²`.
    pub fn choi(&self) -> CMat {
        let dd = self.dim * self.dim;
        let w = Complex64::new(1.0 / dd as f64, 0.0);
        CMat::from_fn(dd * dd, dd * dd, |r, c| {
            let (o1, i) = (r / dd, r % dd);
            let (o2, j) = (c / dd, c % dd);
            self.matrix[(o2 * dd + o1, j * dd + i)] * w
        })
    }
}

/// Method used by [`design_delta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMethod {
    /// Exact diamond norm of `G_W − G_H` via SDP (small dimensions only).
    Diamond,
    /// Trace-norm sandwich on the Choi difference:
    /// `‖ω‖₁ ≤ δ ≤ d²·‖ω‖₁` with ω the normalized Choi matrix.
    ChoiTraceBounds,
}

/// Bounds `lower ≤ δ ≤ upper` on the design quality
/// `δ = ‖G_W − G_H‖_⋄` of an ensemble.
pub fn design_delta(
    ensemble: &UnitaryEnsemble,
    method: DeltaMethod,
) -> Result<(f64, f64)> {
    if ensemble.is_haar() {
        return Ok((0.0, 0.0));
    }
    let d = ensemble.dim();
    if d < 2 {
        return Err(Error::Domain(
            "two-fold twirl is degenerate for d = 1".into(),
        ));
    }
    match method {
        DeltaMethod::Diamond => {
            let layout = SystemLayout::new(vec![("s1", d), ("s2", d)])?;
            let diff = crate::qmath::Channel::from_map(layout.clone(), layout, |x| {
                let tw = ensemble_twirl2(ensemble, x)?;
                let hw = haar_twirl2(x)?;
                Operator::new(x.layout().clone(), tw.matrix() - hw.matrix())
            })?;
            let v = sdpcore::diamond_norm(&diff)?;
            Ok((v, v))
        }
        DeltaMethod::ChoiTraceBounds => {
            let j_w = MomentOperator::of_ensemble(ensemble)?.choi();
            let j_h = MomentOperator::haar(d)?.choi();
            let dd = d * d;
            let diff = Operator::new(SystemLayout::single("J", dd * dd), j_w - j_h)?;
            let lower = diff.trace_norm();
            Ok((lower, (dd as f64) * lower))
        }
    }
}

/// The 24-element single-qubit Clifford group (modulo global phase),
/// uniformly weighted; an exact unitary 2-design.
///
/// Built by closing `{H, S}` under multiplication with each product
/// canonicalized to make its first nonzero entry positive real.
pub fn clifford1q_ensemble() -> UnitaryEnsemble {
    let layout = SystemLayout::single("Q", 2);
    let s2 = 1.0 / 2.0_f64.sqrt();
    let h = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s2, 0.0),
            Complex64::new(s2, 0.0),
            Complex64::new(s2, 0.0),
            Complex64::new(-s2, 0.0),
        ],
    );
    let s = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1.0),
        ],
    );

    let canon = |m: &CMat| -> CMat {
        let mut phase = Complex64::new(1.0, 0.0);
        'find: for c in 0..2 {
            for r in 0..2 {
                let v = m[(r, c)];
                if v.norm() > 1e-8 {
                    phase = v / v.norm();
                    break 'find;
                }
            }
        }
        m * phase.conj()
    };
    let key = |m: &CMat| -> String {
        m.iter()
            .map(|z| format!("{:.6},{:.6};", z.re + 0.0, z.im + 0.0))
            .collect()
    };

    let mut elements: Vec<CMat> = vec![canon(&CMat::identity(2, 2))];
    let mut seen: std::collections::BTreeSet<String> =
        elements.iter().map(|m| key(m)).collect();
    let mut frontier = elements.clone();
    let mut products = 0usize;
    while !frontier.is_empty() && products < 10_000 {
        let mut next = Vec::new();
        for m in &frontier {
            for g in [&h, &s] {
                products += 1;
                let cand = canon(&(g * m));
                if seen.insert(key(&cand)) {
                    elements.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }

    let p = 1.0 / elements.len() as f64;
    let elements = elements
        .into_iter()
        .map(|m| (p, Operator::new(layout.clone(), m).expect("2x2 on qubit layout")))
        .collect();
    UnitaryEnsemble::explicit(elements).expect("uniform unitary closure is a valid ensemble")
}
