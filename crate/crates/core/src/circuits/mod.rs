//! Random quantum circuits: at each step a random two-qubit gate is applied
//! to a uniformly random unordered pair of qubits.
//!
//! Depth sweeps estimate how fast the circuit ensemble's two-fold twirl
//! approaches the Haar twirl. The reported quantity is a statistical proxy
//! (a trace-norm lower-bound metric on Choi matrices), not the diamond-norm
//! δ itself, which is unaffordable at these dimensions.

use num_complex::Complex64;
use rand::Rng;

use crate::designs::{MomentOperator, UnitaryEnsemble};
use crate::error::{Error, Result};
use crate::qmath::{herm_eigenvalues_lapack, CMat, Operator, SystemLayout};


/// Largest supported qubit count for explicit circuit unitaries.
pub const QUBIT_GUARD: usize = 10;

/// Largest qubit count for moment-operator depth sweeps: the Choi matrices
/// involved are `2^{2n} × 2^{2n}` on the doubled space, i.e. `4096²` complex
/// entries at `n = 3`, the practical dense limit.
pub const SWEEP_QUBIT_GUARD: usize = 3;

/// Distribution of the random two-qubit gate.
#[derive(Debug, Clone)]
pub enum GateSet {
    /// Haar measure on U(4).
    HaarU4,
    /// An explicit finite ensemble over dimension 4.
    Ensemble(UnitaryEnsemble),
}

/// The random-circuit model: `t` random gates on random qubit pairs.
#[derive(Debug, Clone)]
pub struct CircuitModel {
    pub n_qubits: usize,
    pub gate_set: GateSet,
    pub t: usize,
}

impl CircuitModel {
    pub fn new(n_qubits: usize, gate_set: GateSet, t: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Parameter(
                "circuit model needs at least 2 qubits".into(),
            ));
        }
        if let GateSet::Ensemble(ens) = &gate_set {
            if ens.dim() != 4 {
                return Err(Error::Layout(format!(
                    "two-qubit gate set must have dimension 4, got {}",
                    ens.dim()
                )));
            }
            if ens.is_haar() {
                return Err(Error::Parameter(
                    "use GateSet::HaarU4 for the Haar gate set".into(),
                ));
            }
        }
        Ok(CircuitModel {
            n_qubits,
            gate_set,
            t,
        })
    }

    fn layout(&self) -> SystemLayout {
        SystemLayout::new(
            (0..self.n_qubits)
                .map(|q| (format!("q{q}"), 2))
                .collect::<Vec<_>>(),
        )
        .expect("generated qubit labels are unique")
    }
}

/// Multiplies the current circuit matrix by a 4×4 gate acting on qubits
/// `a` (more significant gate index) and `b`, identity elsewhere. Qubit 0 is
/// the most significant bit of the row-major basis index.
pub(crate) fn embed_apply(w: &CMat, n: usize, a: usize, b: usize, gate: &CMat) -> CMat {
    let dim = 1usize << n;
    let sa = n - 1 - a;
    let sb = n - 1 - b;
    let mut out = CMat::zeros(dim, dim);
    for r in 0..dim {
        let ya = (r >> sa) & 1;
        let yb = (r >> sb) & 1;
        let base = r & !(1 << sa) & !(1 << sb);
        for xa in 0..2usize {
            for xb in 0..2usize {
                let coeff = gate[(ya * 2 + yb, xa * 2 + xb)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let s = base | (xa << sa) | (xb << sb);
                for k in 0..dim {
                    out[(r, k)] += coeff * w[(s, k)];
                }
            }
        }
    }
    out
}

fn sample_gate(gate_set: &GateSet, rng: &mut impl Rng) -> CMat {
    match gate_set {
        GateSet::HaarU4 => crate::designs::haar_sample(SystemLayout::single("g", 4), rng)
            .matrix()
            .clone(),
        GateSet::Ensemble(ens) => {
            let elements = ens
                .elements()
                .expect("haar gate sets are represented as GateSet::HaarU4");
            let mut x: f64 = rng.gen();
            for (p, u) in elements {
                x -= p;
                if x <= 0.0 {
                    return u.matrix().clone();
                }
            }
            elements.last().expect("ensemble is non-empty").1.matrix().clone()
        }
    }
}

/// Samples one circuit unitary `W = W_t ··· W_1` on `2^n` dimensions.
pub fn sample_circuit_unitary(model: &CircuitModel, rng: &mut impl Rng) -> Result<Operator> {
    if model.n_qubits > QUBIT_GUARD {
        return Err(Error::Size(format!(
            "{} qubits exceed the explicit-unitary guard of {QUBIT_GUARD}",
            model.n_qubits
        )));
    }
    let n = model.n_qubits;
    let dim = 1usize << n;
    let mut w = CMat::identity(dim, dim);
    for _ in 0..model.t {
        let (a, b) = random_pair(n, rng);
        let gate = sample_gate(&model.gate_set, rng);
        w = embed_apply(&w, n, a, b, &gate);
    }
    Operator::new(model.layout(), w)
}

fn random_pair(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// One row of a depth sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: usize,
    pub delta_estimate: f64,
    pub stderr: f64,
}

/// Estimates the design quality of the circuit ensemble at each depth in
/// `t_values` (rows sorted by depth).
///
/// `delta_estimate` is the trace norm of (empirical two-fold-twirl Choi
/// matrix − Haar-twirl Choi matrix), a lower-bound proxy for the
/// diamond-norm δ; `stderr` comes from batch resampling of the samples.
pub fn circuit_design_sweep(
    model: &CircuitModel,
    t_values: &[usize],
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<SweepRow>> {
    if model.n_qubits > SWEEP_QUBIT_GUARD {
        return Err(Error::Size(format!(
            "{} qubits exceed the moment-operator sweep guard of {SWEEP_QUBIT_GUARD}",
            model.n_qubits
        )));
    }
    if n_samples < 2 {
        return Err(Error::Parameter(
            "sweep needs at least 2 samples per depth".into(),
        ));
    }
    if t_values.is_empty() {
        return Err(Error::Parameter("sweep needs at least one depth".into()));
    }
    let d = 1usize << model.n_qubits;
    let j_haar = MomentOperator::haar(d)?.choi();
    let n_batches = n_samples.min(10).max(2);

    let mut ts = t_values.to_vec();
    ts.sort_unstable();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let depth_model = CircuitModel {
            t,
            ..model.clone()
        };
        let row = sweep_point(&depth_model, n_samples, n_batches, &j_haar, rng)?;
        rows.push(row);
    }
    Ok(rows)
}

fn sweep_point(
    model: &CircuitModel,
    n_samples: usize,
    n_batches: usize,
    j_haar: &CMat,
    rng: &mut impl Rng,
) -> Result<SweepRow> {
    let d = 1usize << model.n_qubits;
    let dd = d * d;
    let dim = dd * dd;
    let mut total = CMat::zeros(dim, dim);
    let mut batch_deltas = Vec::with_capacity(n_batches);
    let mut assigned = 0usize;
    for b in 0..n_batches {
        let batch_size = n_samples / n_batches + usize::from(b < n_samples % n_batches);
        assigned += batch_size;
        let mut batch = CMat::zeros(dim, dim);
        let weight = Complex64::new(1.0 / batch_size as f64, 0.0);
        for _ in 0..batch_size {
            let w = sample_circuit_unitary(model, rng)?;
            // the Choi matrix of ρ ↦ (W⊗W)ρ(W⊗W)† is the rank-1 projector
            // onto the flattened W⊗W (up to the trace normalization)
            let u2 = w.matrix().kronecker(w.matrix());
            let scale = Complex64::new(1.0 / (dd as f64).sqrt(), 0.0);
            let v = nalgebra::DVector::<Complex64>::from_fn(dim, |k, _| {
                u2[(k / dd, k % dd)] * scale
            });
            batch += &v * v.adjoint() * weight;
        }
        batch_deltas.push(herm_trace_norm(&(&batch - j_haar)));
        total += batch * Complex64::new(batch_size as f64 / n_samples as f64, 0.0);
    }
    debug_assert_eq!(assigned, n_samples);

    let delta_estimate = herm_trace_norm(&(&total - j_haar));
    let bmean = batch_deltas.iter().sum::<f64>() / batch_deltas.len() as f64;
    let var = batch_deltas
        .iter()
        .map(|x| (x - bmean).powi(2))
        .sum::<f64>()
        / (batch_deltas.len() - 1) as f64;
    let stderr = (var / batch_deltas.len() as f64).sqrt();
    Ok(SweepRow {
        t: model.t,
        delta_estimate,
        stderr,
    })
}

fn herm_trace_norm(m: &CMat) -> f64 {
    herm_eigenvalues_lapack(m).iter().map(|l| l.abs()).sum()
}
