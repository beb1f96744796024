//! Config-driven experiment runner: strict JSON configuration, built-in
//! fixtures, structured reports and CSV/JSON/SVG emitters.
//!
//! Reports are deterministic given the configuration and seed; the only
//! nondeterministic value (the wall-clock timestamp) is isolated in a single
//! metadata field so byte-wise comparison of everything else is meaningful.

use std::path::PathBuf;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{circuit_design_sweep, CircuitModel, GateSet};
use crate::decouple::{
    decoupling_bound, empirical_decoupling_error, haar_l2_identity, BoundMode, DecouplingReport,
    DecouplingSource,
};
use crate::designs::{clifford1q_ensemble, design_delta, DeltaMethod, UnitaryEnsemble};
use crate::entropy::{min_entropy, smooth_min_entropy};
use crate::error::{Error, Result};
use crate::qmath::{Channel, SystemLayout};

mod emit;
mod fixtures;
#[cfg(test)]
mod tests;

pub use emit::{emit_plot, emit_report, load_report, ReportFormat};
pub use fixtures::{fixture_names, load_fixture, FixtureJson};

/// Experiment selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Entropy,
    DesignDelta,
    CircuitSweep,
    DecoupleRun,
    IdentityCheck,
}

/// How the random unitary on A is drawn in a decoupling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    Haar,
    /// A named built-in ensemble (`clifford1q`) or a path to an ensemble
    /// JSON file.
    Ensemble { name: String },
    Circuit { n_qubits: usize, depth: usize },
}

/// One experiment, parsed strictly: unknown fields are rejected and every
/// stochastic command must carry a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Config schema version; must be 1.
    pub version: u32,
    pub command: CommandName,
    /// Built-in fixture name or path to a fixture JSON file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input dimension for `identity-check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Conditioned subsystem labels for `entropy` (defaults to the
    /// fixture's A part).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_labels: Option<Vec<String>>,
    /// Smoothing radius; enables the smooth-entropy variants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Design error δ used in the approximate-design bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<usize>>,
    /// `diamond` or `choi-trace-bounds` for `design-delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Ensemble name or path for `design-delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<String>,
    /// Slack used by inequality audits (default 1e-9).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_plot: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::Config(format!(
                "unsupported config version {}",
                self.version
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(Error::Config("tolerance must be nonnegative".into()));
            }
        }
        let stochastic = match self.command {
            CommandName::CircuitSweep | CommandName::IdentityCheck => true,
            CommandName::DecoupleRun => !matches!(self.source, Some(SourceSpec::Ensemble { .. })),
            CommandName::Entropy | CommandName::DesignDelta => false,
        };
        if stochastic && self.seed.is_none() {
            return Err(Error::Config(
                "stochastic commands require an explicit seed".into(),
            ));
        }
        if stochastic {
            if let Some(trials) = self.trials {
                if trials < 2 {
                    return Err(Error::Config(
                        "Monte Carlo commands need at least 2 trials".into(),
                    ));
                }
            }
        }
        match self.command {
            CommandName::Entropy | CommandName::DecoupleRun => {
                if self.fixture.is_none() {
                    return Err(Error::Config("this command requires a fixture".into()));
                }
            }
            CommandName::DesignDelta => {
                if self.ensemble.is_none() {
                    return Err(Error::Config("design-delta requires an ensemble".into()));
                }
            }
            CommandName::CircuitSweep => {
                if self.t_values.as_ref().map_or(true, Vec::is_empty) {
                    return Err(Error::Config(
                        "circuit-sweep requires a non-empty t_values list".into(),
                    ));
                }
                if self.trials.is_none() {
                    return Err(Error::Config("circuit-sweep requires trials".into()));
                }
            }
            CommandName::IdentityCheck => {
                if self.trials.is_none() {
                    return Err(Error::Config("identity-check requires trials".into()));
                }
            }
        }
        if self.command == CommandName::DecoupleRun && self.source.is_none() {
            return Err(Error::Config("decouple-run requires a source".into()));
        }
        Ok(())
    }

    fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-9)
    }
}

/// One row of a sweep as reported: the sweep statistics plus the sample
/// budget and seed that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRowRecord {
    pub t: usize,
    pub delta_estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Command-specific results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportPayload {
    Entropy {
        value: f64,
        certificate_gap: f64,
        eps: Option<f64>,
        smooth_value: Option<f64>,
        /// Trivial upper bound log₂ d_A, reported next to the certified
        /// smooth lower bound.
        upper_bound: f64,
    },
    DesignDelta {
        method: String,
        lower: f64,
        upper: f64,
        n_elements: Option<usize>,
    },
    CircuitSweep {
        n_qubits: usize,
        rows: Vec<SweepRowRecord>,
        /// The estimate is a trace-norm lower-bound proxy for the
        /// diamond-norm δ, labeled as such in every report.
        estimator: String,
    },
    Decouple(DecouplingReport),
    IdentityCheck {
        dim: usize,
        n_trials: usize,
        mc_mean: f64,
        mc_stderr: f64,
        closed_form: f64,
        abs_deviation: f64,
    },
}

/// Wall-clock and build provenance; `timestamp_unix_s` is the only
/// run-dependent value in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub build_id: String,
    pub timestamp_unix_s: u64,
    pub notes: Vec<String>,
}

/// Structured record of one experiment: the config that produced it, the
/// results, and environment metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub results: ReportPayload,
    pub metadata: ReportMetadata,
}

fn metadata(notes: Vec<String>) -> ReportMetadata {
    let timestamp_unix_s = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    ReportMetadata {
        build_id: format!("qdecouple-{}", env!("CARGO_PKG_VERSION")),
        timestamp_unix_s,
        notes,
    }
}

/// Runs one experiment and writes any configured output files.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let (results, notes) = match config.command {
        CommandName::Entropy => run_entropy(config)?,
        CommandName::DesignDelta => run_design_delta(config)?,
        CommandName::CircuitSweep => run_circuit_sweep(config)?,
        CommandName::DecoupleRun => run_decouple(config)?,
        CommandName::IdentityCheck => run_identity_check(config)?,
    };
    let report = ExperimentReport {
        config: config.clone(),
        results,
        metadata: metadata(notes),
    };
    if let Some(path) = &config.output {
        emit_report(&report, ReportFormat::Json, path)?;
    }
    if let Some(path) = &config.output_csv {
        emit_report(&report, ReportFormat::Csv, path)?;
    }
    if let Some(path) = &config.output_plot {
        if let ReportPayload::CircuitSweep { rows, .. } = &report.results {
            emit_plot(rows, path)?;
        } else {
            return Err(Error::Parameter(
                "plots are only available for circuit-sweep reports".into(),
            ));
        }
    }
    Ok(report)
}

fn run_entropy(config: &ExperimentConfig) -> Result<(ReportPayload, Vec<String>)> {
    let inst = load_fixture(config.fixture.as_deref().expect("validated"))?;
    let owned: Vec<String>;
    let a_labels: Vec<&str> = match &config.a_labels {
        Some(labels) => {
            owned = labels.clone();
            owned.iter().map(String::as_str).collect()
        }
        None => inst.a_labels(),
    };
    let base = min_entropy(inst.rho(), &a_labels)?;
    let d_a = inst.rho().layout().dim_of_all(&a_labels)?;
    let mut smooth_value = None;
    let mut notes = Vec::new();
    if let Some(eps) = config.eps {
        let smooth = smooth_min_entropy(inst.rho(), &a_labels, eps)?;
        smooth_value = Some(smooth.value);
        notes.push(
            "smooth value is a certified lower bound from a feasible smoothing state".into(),
        );
    }
    Ok((
        ReportPayload::Entropy {
            value: base.value,
            certificate_gap: base.certificate_gap,
            eps: config.eps,
            smooth_value,
            upper_bound: (d_a as f64).log2(),
        },
        notes,
    ))
}

fn resolve_ensemble(name: &str) -> Result<UnitaryEnsemble> {
    if name == "clifford1q" {
        return Ok(clifford1q_ensemble());
    }
    let text = std::fs::read_to_string(name).map_err(|source| Error::Io {
        path: name.into(),
        source,
    })?;
    let json = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    UnitaryEnsemble::from_json(&json)
}

fn run_design_delta(config: &ExperimentConfig) -> Result<(ReportPayload, Vec<String>)> {
    let name = config.ensemble.as_deref().expect("validated");
    let ensemble = resolve_ensemble(name)?;
    let method_name = config.method.as_deref().unwrap_or("diamond");
    let method = match method_name {
        "diamond" => DeltaMethod::Diamond,
        "choi-trace-bounds" => DeltaMethod::ChoiTraceBounds,
        other => {
            return Err(Error::Config(format!(
                "unknown design-delta method {other:?} (expected diamond or choi-trace-bounds)"
            )))
        }
    };
    let (lower, upper) = design_delta(&ensemble, method)?;
    Ok((
        ReportPayload::DesignDelta {
            method: method_name.into(),
            lower,
            upper,
            n_elements: ensemble.elements().map(<[_]>::len),
        },
        Vec::new(),
    ))
}

fn run_circuit_sweep(config: &ExperimentConfig) -> Result<(ReportPayload, Vec<String>)> {
    let n_qubits = config.n_qubits.unwrap_or(2);
    let trials = config.trials.expect("validated");
    let seed = config.seed.expect("validated");
    let t_values = config.t_values.as_deref().expect("validated");
    let model = CircuitModel::new(n_qubits, GateSet::HaarU4, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = circuit_design_sweep(&model, t_values, trials, &mut rng)?;
    let rows = rows
        .into_iter()
        .map(|r| SweepRowRecord {
            t: r.t,
            delta_estimate: r.delta_estimate,
            stderr: r.stderr,
            n_samples: trials,
            seed,
        })
        .collect();
    Ok((
        ReportPayload::CircuitSweep {
            n_qubits,
            rows,
            estimator: "proxy (lower-bound metric)".into(),
        },
        vec!["gate pairs drawn uniformly over unordered qubit pairs".into()],
    ))
}

fn run_decouple(config: &ExperimentConfig) -> Result<(ReportPayload, Vec<String>)> {
    let inst = load_fixture(config.fixture.as_deref().expect("validated"))?;
    let source = config.source.as_ref().expect("validated");
    let seed = config.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = config.tolerance();

    let mut notes = Vec::new();
    let mut ensemble_holder = None;
    let mut model_holder = None;
    let (delta_default, resolved): (f64, DecouplingSource) = match source {
        SourceSpec::Haar => {
            let trials = config
                .trials
                .ok_or_else(|| Error::Config("haar source requires trials".into()))?;
            (0.0, DecouplingSource::Haar { n_trials: trials })
        }
        SourceSpec::Ensemble { name } => {
            let ensemble = resolve_ensemble(name)?;
            let (_, upper) = design_delta(&ensemble, DeltaMethod::ChoiTraceBounds)?;
            notes.push(format!(
                "δ defaulted to the certified trace-norm upper bound of ensemble {name:?}"
            ));
            let ens = ensemble_holder.insert(ensemble);
            (upper, DecouplingSource::Ensemble(ens))
        }
        SourceSpec::Circuit { n_qubits, depth } => {
            let trials = config
                .trials
                .ok_or_else(|| Error::Config("circuit source requires trials".into()))?;
            let model = model_holder.insert(CircuitModel::new(*n_qubits, GateSet::HaarU4, *depth)?);
            notes.push("circuit-source δ is not certified; supply delta explicitly".into());
            (0.0, DecouplingSource::Circuit {
                model,
                n_trials: trials,
            })
        }
    };
    let delta_used = config.delta.unwrap_or(delta_default);

    let empirical = empirical_decoupling_error(&inst, &resolved, &mut rng)?;
    let n_trials = match &resolved {
        DecouplingSource::Ensemble(e) => e.elements().map_or(0, <[_]>::len),
        DecouplingSource::Haar { n_trials } | DecouplingSource::Circuit { n_trials, .. } => {
            *n_trials
        }
    };

    let hmin_channel = inst.channel_entropy(0.0)?;
    let hmin_state = inst.state_entropy(0.0)?;
    let bound_haar = decoupling_bound(&inst, BoundMode::Haar)?;
    let bound_approx = decoupling_bound(&inst, BoundMode::Approx { delta: delta_used })?;
    let (bound_smooth, smooth_entropies, eps_used) = match config.eps {
        Some(eps) => {
            let b = decoupling_bound(
                &inst,
                BoundMode::Smooth {
                    delta: delta_used,
                    eps,
                },
            )?;
            (
                Some(b),
                (
                    Some(inst.channel_entropy(eps)?),
                    Some(inst.state_entropy(eps)?),
                ),
                Some(eps),
            )
        }
        None => (None, (None, None), None),
    };
    for (label, bound) in [("approximate-design", bound_approx), ("Haar", bound_haar)] {
        if bound > 1.0 {
            notes.push(format!(
                "{label} bound {bound:.6} exceeds the trivial trace-norm bound 1 per unit trace (vacuous)"
            ));
        }
    }

    let slack = if empirical.exact {
        tol
    } else {
        3.0 * empirical.stderr + tol
    };
    if empirical.mean > bound_approx + slack {
        return Err(Error::Violation(format!(
            "empirical decoupling error {:.6} exceeds the design bound {:.6} beyond slack {:.2e}",
            empirical.mean, bound_approx, slack
        )));
    }

    let report = DecouplingReport {
        empirical_mean: empirical.mean,
        empirical_stderr: empirical.stderr,
        exact_average: empirical.exact,
        n_trials,
        bound_haar,
        bound_approx,
        bound_smooth,
        hmin_channel,
        hmin_state,
        hmin_channel_smooth: smooth_entropies.0,
        hmin_state_smooth: smooth_entropies.1,
        delta_used,
        eps_used,
        trace_rho: inst.rho().trace().re,
        trace_omega: inst.channel().to_choi().trace().re,
        seeds: vec![seed],
    };
    Ok((ReportPayload::Decouple(report), notes))
}

fn run_identity_check(config: &ExperimentConfig) -> Result<(ReportPayload, Vec<String>)> {
    let dim = config.dim.unwrap_or(2);
    let trials = config.trials.expect("validated");
    let seed = config.seed.expect("validated");
    let t = Channel::identity(SystemLayout::single("T", dim))?;
    let e = Channel::identity(SystemLayout::single("E", dim))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ((mean, stderr), rhs) = haar_l2_identity(&t, &e, trials, &mut rng)?;
    let abs_deviation = (mean - rhs).abs();
    if abs_deviation > 6.0 * stderr + config.tolerance() {
        return Err(Error::Violation(format!(
            "Monte Carlo mean {mean:.8} deviates from the closed form {rhs:.8} beyond sampling error"
        )));
    }
    Ok((
        ReportPayload::IdentityCheck {
            dim,
            n_trials: trials,
            mc_mean: mean,
            mc_stderr: stderr,
            closed_form: rhs,
            abs_deviation,
        },
        Vec::new(),
    ))
}

/// Process exit code for an error, as used by the command line runner:
/// 2 invalid config or input, 3 numeric failure, 4 inequality violation.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numeric(_) => 3,
        Error::Violation(_) => 4,
        _ => 2,
    }
}

impl Error {
    /// Machine-readable JSON encoding, written to standard error by the
    /// command line runner.
    pub fn to_json(&self) -> String {
        let kind = match self {
            Error::Layout(_) => "layout",
            Error::Domain(_) => "domain",
            Error::Parameter(_) => "parameter",
            Error::Size(_) => "size",
            Error::Numeric(_) => "numeric",
            Error::Io { .. } => "io",
            Error::Config(_) => "config",
            Error::Violation(_) => "violation",
        };
        serde_json::json!({
            "error": kind,
            "message": self.to_string(),
            "exit_code": exit_code(self),
        })
        .to_string()
    }
}
