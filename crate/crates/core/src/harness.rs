//! Config-driven experiment runner and report emission.
//!
//! Reports are deterministic functions of the config (seed included): no
//! timestamps or timings are written, maps are ordered, and every parallel
//! reduction collects in index order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebraic::{algebraic_complexity, decompose_two_level, reconstruct};
use crate::basis::{build_pauli_basis, build_penalty_metric, MetricRecord, MetricSpec};
use crate::campaign::{self, BoundCheck, CampaignSize};
use crate::channel::{
    apply_channel, apply_channel_joint, channel_complexity_const, kraus_operators, noise_complexity,
    noise_complexity_bounds, noiseless_complexity, perturbative_example, ChannelSpec,
};
use crate::coherence::{
    coherence_rate_bound, coherence_rate_exact, cohering_power, rel_entropy_coherence,
    verify_decohering_bound, CoheringOptions, DephasingChannel,
};
use crate::complexity::{
    check_cost_chain, estimate_cc_distance, flat_distance, g_hs, geometric_complexity_const,
    path_length, GeodesicOptions, Metric, PiecewiseConstantPath,
};
use crate::error::{Error, Result};
use crate::operator::{
    c, hs_norm, matrix_exp_unitary, max_abs, sqrt_abs_diff, ComplexMatrix, DensityOperator,
    HermitianOperator, UnitaryOperator, C64,
};
use crate::rode::{distance_unitaries, ensemble_mean, fluctuation_report, NoiseModel};

pub const SCHEMA_VERSION: u32 = 1;

/// Experiment kinds accepted by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Complexity,
    Channel,
    Noise,
    CoheringPower,
    Rode,
    Decompose,
    VerifyAll,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Complexity => "complexity",
            Kind::Channel => "channel",
            Kind::Noise => "noise",
            Kind::CoheringPower => "cohering-power",
            Kind::Rode => "rode",
            Kind::Decompose => "decompose",
            Kind::VerifyAll => "verify-all",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Kind as clap::ValueEnum>::from_str(s, false)
            .map_err(|_| Error::InvalidArgument(format!("unknown experiment kind `{s}`")))
    }
}

/// Square matrix as rows of `[re, im]` pairs.
pub type MatrixPayload = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    pub target: MatrixPayload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<MatrixPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    pub hamiltonian: MatrixPayload,
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<GeodesicConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub h_s: MatrixPayload,
    pub h_i: MatrixPayload,
    pub h_e: MatrixPayload,
    pub env_probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_basis: Option<MatrixPayload>,
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_s: Option<MatrixPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic_segments: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic_restarts: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbativeConfig {
    pub h_s: MatrixPayload,
    pub a_s: MatrixPayload,
    pub env_energies: Vec<f64>,
    pub weights: Vec<f64>,
    pub epsilon: f64,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoheringConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing_basis: Option<MatrixPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub pure_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<MatrixPayload>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub hamiltonian: MatrixPayload,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKindConfig {
    GaussianPauli,
    BoundedMatched,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig>,
    /// Defaults to total time / 256.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_noise: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodeConfig {
    pub segments: Vec<SegmentConfig>,
    pub noise: NoiseConfig,
    pub trajectories: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub unitary: MatrixPayload,
    /// Divide out `det(U)^(1/N)` before decomposing.
    #[serde(default = "default_true")]
    pub normalize_phase: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Fraction of the full acceptance sample counts.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    0.1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbative: Option<PerturbativeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohering: Option<CoheringConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rode: Option<RodeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl ExperimentConfig {
    /// Parses JSON; errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config {
            field: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(cfg_err(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Conventions fixed by this implementation, repeated in every report.
#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub normalization: &'static str,
    pub system_embedding: &'static str,
    pub kraus_sign: &'static str,
    pub omega_squared_reading: &'static str,
    pub decohering_constant: &'static str,
    pub non_unitary_distance: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    normalization: "G = t ||H|| / sqrt(d^2 - 1); flat metric uses the full HS norm, weighted metrics the su(N) coefficients",
    system_embedding: "H_S means H_S (x) I_E with d = d_S * d_E",
    kraus_sign: "M_ji = sqrt(p_i) <E_j| exp(-i t H_tot) |E_i>",
    omega_squared_reading: "||H^2||_Omega read as ||H||_Omega^2",
    decohering_constant: "1 / (sqrt(2) N); 1 / sqrt(2 (N^2 - 1)) logged alongside",
    non_unitary_distance: "||U - V||_HS when V is not unitary; principal-log geodesic distance otherwise",
};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    pub seed: u64,
    pub conventions: Conventions,
    pub inputs: Value,
    pub scalars: BTreeMap<String, f64>,
    pub checks: Vec<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(kind: Kind, cfg: &ExperimentConfig) -> Self {
        let mut inputs = serde_json::to_value(cfg).expect("config serializes");
        if let Value::Object(map) = &mut inputs {
            map.remove("sweep");
        }
        Self {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            seed: cfg.seed,
            conventions: CONVENTIONS,
            inputs,
            scalars: BTreeMap::new(),
            checks: Vec::new(),
            data: None,
            notes: Vec::new(),
        }
    }

    fn scalar(&mut self, name: &str, v: f64) {
        self.scalars.insert(name.to_string(), v);
    }

    fn check(&mut self, name: &str, lhs: f64, rhs: f64, slack: f64) {
        self.checks.push(BoundCheck::le(name, lhs, rhs, slack));
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failed_checks(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Report plus optional per-trajectory CSV.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub csv: Option<Vec<u8>>,
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn with_field<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        other => cfg_err(field, other.to_string()),
    })
}

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section.as_ref().ok_or_else(|| cfg_err(name, "section is required for this kind"))
}

pub fn to_matrix(payload: &MatrixPayload, field: &str) -> Result<ComplexMatrix> {
    let n = payload.len();
    if n == 0 {
        return Err(cfg_err(field, "matrix is empty"));
    }
    if let Some((i, row)) = payload.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(cfg_err(field, format!("row {i} has {} entries, expected {n}", row.len())));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let [re, im] = payload[i][j];
        c(re, im)
    }))
}

pub fn from_matrix(m: &ComplexMatrix) -> MatrixPayload {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn hermitian(payload: &MatrixPayload, field: &str) -> Result<HermitianOperator> {
    with_field(field, HermitianOperator::new(to_matrix(payload, field)?))
}

fn unitary(payload: &MatrixPayload, field: &str) -> Result<UnitaryOperator> {
    with_field(field, UnitaryOperator::new(to_matrix(payload, field)?))
}

fn density(payload: &MatrixPayload, field: &str) -> Result<DensityOperator> {
    with_field(field, DensityOperator::new(to_matrix(payload, field)?))
}

fn metric_spec(m: &MetricConfig, field: &str) -> Result<MetricSpec> {
    with_field(
        field,
        match (&m.q, &m.weights) {
            (Some(q), None) => build_penalty_metric(m.n, *q),
            (None, Some(w)) => MetricSpec::new(Arc::new(build_pauli_basis(m.n)?), w.clone()),
            (None, None) => build_penalty_metric(m.n, 1.0),
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either q or weights, not both".into())),
        },
    )
}

/// Runs one experiment.
pub fn run(kind: Kind, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut report = Report::new(kind, cfg);
    let mut csv = None;
    match kind {
        Kind::Complexity => run_complexity(cfg, &mut report)?,
        Kind::Channel => run_channel(require(&cfg.channel, "channel")?, &mut report)?,
        Kind::Noise => run_noise(cfg, &mut report)?,
        Kind::CoheringPower => run_cohering(cfg, &mut report)?,
        Kind::Rode => csv = Some(run_rode(cfg, &mut report)?),
        Kind::Decompose => run_decompose(require(&cfg.decompose, "decompose")?, &mut report)?,
        Kind::VerifyAll => run_verify_all(cfg, &mut report)?,
    }
    Ok(RunOutput { report, csv })
}

fn run_complexity(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let cc = require(&cfg.complexity, "complexity")?;
    let h = hermitian(&cc.hamiltonian, "complexity.hamiltonian")?;
    let t = cc.t;
    let g = with_field("complexity.t", g_hs(&h, t))?;
    report.scalar("t", t);
    report.scalar("dim", h.dim() as f64);
    report.scalar("G_hs", g);
    let halves = PiecewiseConstantPath::new(h.dim(), vec![(h.clone(), t / 2.0), (h.clone(), t / 2.0)]);
    if let Ok(p) = halves {
        let len = path_length(&p, &Metric::HilbertSchmidt)?;
        report.scalar("path_length_flat", len);
        report.check("closed_form_vs_path_length", (g - len).abs(), 0.0, 1e-10);
    }
    let metric = match &cc.metric {
        Some(m) => {
            let spec = metric_spec(m, "complexity.metric")?;
            if spec.dim() != h.dim() {
                return Err(cfg_err("complexity.metric.n", "metric dimension does not match the hamiltonian"));
            }
            let go = geometric_complexity_const(&h, t, &Metric::Weighted(spec.clone()))?;
            report.scalar("G_omega", go);
            let traceless = g_hs(&h.traceless(), t)?;
            report.scalar("G_hs_traceless", traceless);
            report.check("G_omega_ge_G_hs_traceless", traceless, go, 1e-12);
            report.data = Some(serde_json::json!({ "metric": MetricRecord::from(&spec) }));
            Metric::Weighted(spec)
        }
        None => Metric::HilbertSchmidt,
    };
    if h.dim().is_power_of_two() && h.dim() >= 2 && t > 0.0 {
        let basis = build_pauli_basis(h.dim().trailing_zeros() as usize)?;
        let rep = check_cost_chain(&PiecewiseConstantPath::constant(h.clone(), t)?, &basis)?;
        report.scalar("cost_l1", rep.cost);
        report.check("cost_chain", rep.cost, rep.bound, 0.0);
    }
    if let Some(geo) = &cc.geodesic {
        let target = unitary(&geo.target, "complexity.geodesic.target")?;
        let start = match &geo.start {
            Some(s) => unitary(s, "complexity.geodesic.start")?,
            None => UnitaryOperator::identity(target.dim()),
        };
        let defaults = GeodesicOptions::default();
        let opts = GeodesicOptions {
            segments: geo.segments.unwrap_or(defaults.segments),
            restarts: geo.restarts.unwrap_or(defaults.restarts),
            endpoint_tol: geo.endpoint_tol.unwrap_or(defaults.endpoint_tol),
            seed: cfg.seed,
            ..defaults
        };
        let principal = flat_distance(&start, &target)?;
        report.scalar("D_principal_flat", principal);
        match estimate_cc_distance(&start, &target, &metric, &opts) {
            Ok(est) => {
                report.scalar("D_upper", est.length);
                report.scalar("geodesic_endpoint_error", est.endpoint_error);
                report.scalar("geodesic_restarts", est.restarts_used as f64);
                report.check("geodesic_endpoint_error", est.endpoint_error, opts.endpoint_tol, 0.0);
                if matches!(metric, Metric::HilbertSchmidt) {
                    report.check("geodesic_not_below_principal", principal, est.length, 1e-6);
                }
            }
            Err(Error::GeodesicNotFound { best_error, tolerance }) => {
                report.check("geodesic_endpoint_error", best_error, tolerance, 0.0);
                report.notes.push("geodesic search did not reach the endpoint tolerance".into());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn channel_spec(cc: &ChannelConfig) -> Result<ChannelSpec> {
    let h_s = hermitian(&cc.h_s, "channel.h_s")?;
    let h_i = hermitian(&cc.h_i, "channel.h_i")?;
    let h_e = hermitian(&cc.h_e, "channel.h_e")?;
    let basis = match &cc.env_basis {
        Some(b) => unitary(b, "channel.env_basis")?,
        None => UnitaryOperator::identity(h_e.dim()),
    };
    with_field("channel", ChannelSpec::new(h_s, h_i, h_e, cc.env_probs.clone(), basis))
}

fn run_channel(cc: &ChannelConfig, report: &mut Report) -> Result<()> {
    let spec = channel_spec(cc)?;
    let t = cc.t;
    let h_tot = spec.h_tot();
    let h_s = spec.h_s_embedded();
    let root = sqrt_abs_diff(&h_tot, &h_s)?;
    let g_channel = channel_complexity_const(&spec, t)?;
    let g_noiseless = noiseless_complexity(&spec, t)?;
    let g_total = g_hs(&h_tot, t)?;
    let g_root = g_hs(&root, t)?;
    report.scalar("t", t);
    report.scalar("G_channel", g_channel);
    report.scalar("G_noiseless", g_noiseless);
    report.scalar("G_total", g_total);
    report.scalar("G_root", g_root);
    report.scalar("N_hs", noise_complexity(&spec, t)?);
    report.check("channel_complexity_le_noiseless", g_channel, g_noiseless, 1e-9);
    report.check("joint_complexity_split", g_total, g_noiseless + g_root, 1e-9);
    report.check("sqrt_difference_lemma", (g_total - g_noiseless).abs(), g_root, 1e-12);
    let kraus = kraus_operators(&spec, t)?;
    report.scalar("kraus_count", kraus.operators.len() as f64);
    report.check("kraus_completeness", kraus.completeness_defect(), 0.0, 1e-9);
    let rho = match &cc.rho_s {
        Some(r) => density(r, "channel.rho_s")?,
        None => DensityOperator::maximally_mixed(spec.d_s()),
    };
    let a = apply_channel(&spec, t, &rho)?;
    let b = apply_channel_joint(&spec, t, &rho)?;
    report.check("kraus_matches_partial_trace", max_abs(&(a.matrix() - b.matrix())), 0.0, 1e-9);
    report.data = Some(serde_json::json!({ "output_state": from_matrix(a.matrix()) }));
    Ok(())
}

fn run_noise(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    if cfg.channel.is_none() && cfg.perturbative.is_none() {
        return Err(cfg_err("channel", "noise needs a channel or perturbative section"));
    }
    if let Some(cc) = &cfg.channel {
        let spec = channel_spec(cc)?;
        let t = cc.t;
        let n = noise_complexity(&spec, t)?;
        report.scalar("t", t);
        report.scalar("N_hs", n);
        let defaults = GeodesicOptions::default();
        let opts = GeodesicOptions {
            segments: cc.geodesic_segments.unwrap_or(2),
            restarts: cc.geodesic_restarts.unwrap_or(4),
            seed: cfg.seed,
            ..defaults
        };
        let bounds = noise_complexity_bounds(&spec, t, &opts)?;
        report.scalar("N_lower", bounds.lower);
        report.check("noise_lower_bound", bounds.lower, n, 1e-8);
        match (bounds.upper, bounds.distance_estimate) {
            (Some(u), Some(d)) => {
                report.scalar("N_upper", u);
                report.scalar("D_estimate", d);
                report.check("noise_upper_bound", n, u, 1e-8);
                report
                    .notes
                    .push("the distance term is an upper estimate, so the reported upper bound errs low".into());
            }
            _ => report.notes.push("noise upper bound unavailable: geodesic search failed".into()),
        }
    }
    if let Some(pc) = &cfg.perturbative {
        let h = hermitian(&pc.h_s, "perturbative.h_s")?;
        let a = hermitian(&pc.a_s, "perturbative.a_s")?;
        let r = with_field(
            "perturbative",
            perturbative_example(&h, &a, &pc.env_energies, &pc.weights, pc.epsilon, pc.t),
        )?;
        let err = (r.exact - r.perturbative).abs();
        report.scalar("epsilon", pc.epsilon);
        report.scalar("exact", r.exact);
        report.scalar("perturbative", r.perturbative);
        report.scalar("error", err);
        report.scalar("omega_coupling", r.omega_coupling);
        report.scalar("omega_alternative", r.omega_alternative);
        if pc.epsilon > 0.0 {
            report.scalar("error_over_eps_1.5", err / pc.epsilon.powf(1.5));
        }
        report.check("perturbative_error_le_10_eps_1.5", err, 10.0 * pc.epsilon.powf(1.5), 0.0);
    }
    Ok(())
}

fn run_cohering(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let cc = require(&cfg.cohering, "cohering")?;
    let h = cc.hamiltonian.as_ref().map(|m| hermitian(m, "cohering.hamiltonian")).transpose()?;
    let t = cc.t.unwrap_or(1.0);
    let u = match (&cc.unitary, &h) {
        (Some(m), _) => unitary(m, "cohering.unitary")?,
        (None, Some(h)) => matrix_exp_unitary(h, t)?,
        (None, None) => return Err(cfg_err("cohering", "give a unitary or a hamiltonian")),
    };
    let e = match &cc.dephasing_basis {
        Some(b) => DephasingChannel::from_basis(&unitary(b, "cohering.dephasing_basis")?),
        None => DephasingChannel::computational(u.dim()),
    };
    if e.dim() != u.dim() {
        return Err(cfg_err("cohering.dephasing_basis", "dimension does not match the unitary"));
    }
    let opts = CoheringOptions {
        restarts: cc.restarts.unwrap_or(32),
        seed: cfg.seed,
        pure_only: cc.pure_only,
        ..Default::default()
    };
    let cp = cohering_power(&u, &e, &opts)?;
    report.scalar("cohering_power", cp.value);
    report.scalar("converged", f64::from(u8::from(cp.converged)));
    report.scalar("restarts", cp.restarts as f64);
    let rotated = u.conjugate(&cp.argmax_state)?;
    let certificate =
        (rel_entropy_coherence(&rotated, &e)? - rel_entropy_coherence(&cp.argmax_state, &e)?).abs();
    report.check("cohering_certificate", (certificate - cp.value).abs(), 0.0, 1e-9);
    report.data = Some(serde_json::json!({ "argmax_state": from_matrix(cp.argmax_state.matrix()) }));
    if let Some(h) = &h {
        if cc.unitary.is_none() {
            let rep = verify_decohering_bound(h, t, &e, &opts)?;
            report.scalar("t", t);
            report.scalar("decohering_lhs", rep.lhs);
            report.scalar("decohering_lhs_alt", rep.lhs_alt);
            report.scalar("G_hs", rep.rhs);
            report.check("decohering_power_bound", rep.lhs, rep.rhs, 1e-9);
        }
        if let Some(s) = &cc.state {
            let rho = density(s, "cohering.state")?;
            let rate = coherence_rate_exact(h, &rho, &e)?;
            let a = coherence_rate_bound(&rho, &e)?;
            report.scalar("coherence", rel_entropy_coherence(&rho, &e)?);
            report.scalar("coherence_rate", rate);
            report.scalar("rate_bound_A", a);
            report.check("commutator_norm_le_sqrt2", a, 2f64.sqrt(), 1e-10);
            let scale = a * hs_norm(h);
            report.scalar("rate_over_a_norm_h", if scale > 0.0 { rate.abs() / scale } else { 0.0 });
            report.check("rate_holder_bound_2a", rate.abs(), 2.0 * scale, 1e-12);
        }
    }
    Ok(())
}

fn rode_inputs(rc: &RodeConfig) -> Result<(PiecewiseConstantPath, NoiseModel)> {
    let segs = rc
        .segments
        .iter()
        .enumerate()
        .map(|(k, s)| Ok((hermitian(&s.hamiltonian, &format!("rode.segments[{k}].hamiltonian"))?, s.dt)))
        .collect::<Result<Vec<_>>>()?;
    let dim = segs.first().map(|(h, _)| h.dim()).ok_or_else(|| cfg_err("rode.segments", "no segments"))?;
    let path = with_field("rode.segments", PiecewiseConstantPath::new(dim, segs))?;
    let nc = &rc.noise;
    let dt_noise = nc.dt_noise.unwrap_or(path.total_time() / 256.0);
    if !dim.is_power_of_two() || dim < 2 {
        return Err(cfg_err("rode.segments", "dimension must be 2^n"));
    }
    let n = dim.trailing_zeros() as usize;
    let noise = match nc.kind {
        NoiseKindConfig::GaussianPauli => match (&nc.sigmas, nc.sigma) {
            (Some(s), None) => with_field(
                "rode.noise.sigmas",
                NoiseModel::gaussian_pauli(Arc::new(build_pauli_basis(n)?), s.clone(), dt_noise),
            )?,
            (None, Some(s)) => with_field("rode.noise.sigma", NoiseModel::gaussian_uniform(n, s, dt_noise))?,
            _ => return Err(cfg_err("rode.noise", "gaussian_pauli needs exactly one of sigma or sigmas")),
        },
        NoiseKindConfig::BoundedMatched => {
            let m = match &nc.metric {
                Some(m) => metric_spec(m, "rode.noise.metric")?,
                None => build_penalty_metric(n, 1.0)?,
            };
            if m.dim() != dim {
                return Err(cfg_err("rode.noise.metric.n", "metric dimension does not match the path"));
            }
            with_field("rode.noise", NoiseModel::bounded_matched(m, dt_noise))?
        }
    };
    Ok((path, noise))
}

fn run_rode(cfg: &ExperimentConfig, report: &mut Report) -> Result<Vec<u8>> {
    let rc = require(&cfg.rode, "rode")?;
    let (path, noise) = rode_inputs(rc)?;
    let m = rc.trajectories;
    let ens = match noise.kind {
        crate::rode::NoiseKind::BoundedMatched { .. } => {
            let (rep, ens) = with_field("rode", fluctuation_report(&path, &noise, m, cfg.seed))?;
            report.scalar("omega_path_length", rep.omega_path_length);
            report.scalar("max_noise_integral", rep.max_noise_integral);
            report.check(
                "rode_distance_le_noise_integral",
                rep.distance_violations.len() as f64,
                0.0,
                0.0,
            );
            report.check(
                "rode_matched_integral_equals_omega_length",
                f64::from(u8::from(!rep.integral_matches)),
                0.0,
                0.0,
            );
            ens
        }
        crate::rode::NoiseKind::GaussianPauli { .. } => with_field("rode", ensemble_mean(&path, &noise, m, cfg.seed))?,
    };
    let id = UnitaryOperator::identity(path.dim());
    let g0 = distance_unitaries(&id, &ens.noiseless)?;
    let bias = ens.mean_deviation();
    let (mut tri, mut diff) = (0usize, 0usize);
    for (r, u) in ens.records.iter().zip(ens.endpoints()) {
        if r.endpoint_deviation > r.distance + bias + 1e-9 {
            tri += 1;
        }
        if (g0 - distance_unitaries(&id, u)?).abs() > r.geodesic_deviation + 1e-9 {
            diff += 1;
        }
    }
    let dists = ens.distances();
    report.scalar("trajectories", m as f64);
    report.scalar("dt_noise", noise.dt_noise);
    report.scalar("mean_deviation", bias);
    report.scalar("mean_distance", dists.iter().sum::<f64>() / m as f64);
    report.scalar("max_distance", dists.iter().cloned().fold(0.0, f64::max));
    report.scalar("G_noiseless", g0);
    report.check("rode_triangle_violations", tri as f64, 0.0, 0.0);
    report.check("rode_complexity_difference_violations", diff as f64, 0.0, 0.0);
    report.notes.push(format!("noise model: {}", noise.name()));
    let mut buf = Vec::new();
    ens.write_csv(&mut buf)?;
    Ok(buf)
}

fn run_decompose(dc: &DecomposeConfig, report: &mut Report) -> Result<()> {
    let mut u = unitary(&dc.unitary, "decompose.unitary")?;
    let n = u.dim();
    if dc.normalize_phase {
        let det = u.determinant();
        let phase: C64 = C64::from_polar(1.0, -det.arg() / n as f64);
        u = UnitaryOperator::new(u.into_matrix() * phase)?;
    }
    let circ = with_field("decompose.unitary", decompose_two_level(&u))?;
    let back = reconstruct(&circ, n)?;
    let err = max_abs(&(back.matrix() - u.matrix()));
    let bound = n * (n - 1) / 2;
    report.scalar("dim", n as f64);
    report.scalar("gate_count", circ.len() as f64);
    report.scalar("gate_bound", bound as f64);
    report.scalar("algebraic_complexity", algebraic_complexity(&circ) as f64);
    report.scalar("reconstruction_error", err);
    report.check("gate_count_le_n(n-1)/2", circ.len() as f64, bound as f64, 0.0);
    report.check("reconstruction_error", err, 0.0, 1e-9);
    report.data = Some(serde_json::json!({ "circuit": circ }));
    Ok(())
}

fn run_verify_all(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let scale = cfg.verify.as_ref().map_or(default_scale(), |v| v.scale);
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(cfg_err("verify.scale", "must lie in (0, 1]"));
    }
    let results = campaign::run_all(CampaignSize { scale }, cfg.seed)?;
    let mut summary = Vec::new();
    for (id, title, checks) in results {
        let pass = checks.iter().all(|c| c.holds);
        summary.push(serde_json::json!({ "criterion": id, "title": title, "pass": pass }));
        for mut c in checks {
            c.name = format!("{id}:{}", c.name);
            report.checks.push(c);
        }
    }
    report.scalar("scale", scale);
    report.scalar("checks", report.checks.len() as f64);
    report.scalar("failed", report.failed_checks().len() as f64);
    report.data = Some(serde_json::json!({ "criteria": summary }));
    Ok(())
}

/// Sets a sweepable parameter on every section that has it.
pub fn apply_parameter(cfg: &mut ExperimentConfig, name: &str, value: f64) -> Result<()> {
    let mut hit = false;
    match name {
        "t" => {
            if let Some(s) = &mut cfg.complexity {
                s.t = value;
                hit = true;
            }
            if let Some(s) = &mut cfg.channel {
                s.t = value;
                hit = true;
            }
            if let Some(s) = &mut cfg.perturbative {
                s.t = value;
                hit = true;
            }
            if let Some(s) = &mut cfg.cohering {
                s.t = Some(value);
                hit = true;
            }
        }
        "epsilon" => {
            if let Some(s) = &mut cfg.perturbative {
                s.epsilon = value;
                hit = true;
            }
        }
        "trajectories" => {
            if let Some(s) = &mut cfg.rode {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(cfg_err("sweep.values", "trajectories must be positive integers"));
                }
                s.trajectories = value as usize;
                hit = true;
            }
        }
        "dt_noise" => {
            if let Some(s) = &mut cfg.rode {
                s.noise.dt_noise = Some(value);
                hit = true;
            }
        }
        "q" => {
            for m in [
                cfg.complexity.as_mut().and_then(|s| s.metric.as_mut()),
                cfg.rode.as_mut().and_then(|s| s.noise.metric.as_mut()),
            ]
            .into_iter()
            .flatten()
            {
                m.q = Some(value);
                m.weights = None;
                hit = true;
            }
        }
        _ => {}
    }
    if hit {
        Ok(())
    } else {
        Err(Error::UnknownParameter(name.to_string()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutput {
    pub parameter: String,
    pub values: Vec<f64>,
    pub reports: Vec<Report>,
    #[serde(skip)]
    pub csv: Vec<u8>,
}

impl SweepOutput {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(Report::all_hold)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        s
    }
}

/// One report per value plus an aggregate CSV (one row per value).
pub fn sweep(kind: Kind, cfg: &ExperimentConfig, parameter: &str, values: &[f64]) -> Result<SweepOutput> {
    // validate the name even when the value list is empty
    apply_parameter(&mut cfg.clone(), parameter, values.first().copied().unwrap_or(1.0))?;
    let reports: Vec<Report> = values
        .par_iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.sweep = None;
            apply_parameter(&mut c, parameter, v)?;
            Ok(run(kind, &c)?.report)
        })
        .collect::<Result<_>>()?;
    let keys: BTreeSet<&String> = reports
        .iter()
        .flat_map(|r| r.scalars.keys())
        .filter(|k| k.as_str() != parameter)
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![parameter.to_string(), "all_hold".to_string()];
    header.extend(keys.iter().map(|k| k.to_string()));
    w.write_record(&header)?;
    for (v, r) in values.iter().zip(&reports) {
        let mut row = vec![v.to_string(), r.all_hold().to_string()];
        row.extend(keys.iter().map(|k| r.scalars.get(*k).map(|x| x.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    let csv = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(SweepOutput {
        parameter: parameter.to_string(),
        values: values.to_vec(),
        reports,
        csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sz() -> MatrixPayload {
        vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [-1.0, 0.0]]]
    }

    fn zeros(n: usize) -> MatrixPayload {
        vec![vec![[0.0, 0.0]; n]; n]
    }

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(r#"{"schema_version": 1, "seed": 3}"#).unwrap()
    }

    #[test]
    fn complexity_example() {
        let mut cfg = base();
        cfg.complexity = Some(ComplexityConfig {
            hamiltonian: sz(),
            t: 1.0,
            metric: None,
            geodesic: None,
        });
        let out = run(Kind::Complexity, &cfg).unwrap();
        assert!((out.report.scalars["G_hs"] - 0.816497).abs() < 1e-6);
        assert!(out.report.all_hold());
    }

    #[test]
    fn noise_uncoupled_is_zero() {
        let mut cfg = base();
        cfg.channel = Some(ChannelConfig {
            h_s: sz(),
            h_i: zeros(4),
            h_e: zeros(2),
            env_probs: vec![0.5, 0.5],
            env_basis: None,
            t: 1.0,
            rho_s: None,
            geodesic_segments: Some(1),
            geodesic_restarts: Some(1),
        });
        let out = run(Kind::Noise, &cfg).unwrap();
        assert!(out.report.scalars["N_hs"].abs() < 1e-12);
    }

    #[test]
    fn config_errors() {
        let e = ExperimentConfig::from_json("{\"schema_version\": 1,\n \"seed\": 1, \"bogus\": 2}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(ExperimentConfig::from_json(r#"{"schema_version": 9, "seed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"schema_version": 1}"#).is_err());
        assert!(run(Kind::Complexity, &base()).is_err());
        let mut cfg = base();
        cfg.complexity = Some(ComplexityConfig {
            hamiltonian: vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
            t: 1.0,
            metric: None,
            geodesic: None,
        });
        match run(Kind::Complexity, &cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "complexity.hamiltonian"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_examples() {
        let mut cfg = base();
        cfg.perturbative = Some(PerturbativeConfig {
            h_s: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [2.0, 0.0]]],
            a_s: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]],
            env_energies: vec![0.0, 1.0],
            weights: vec![0.5, 0.5],
            epsilon: 1e-2,
            t: 1.0,
        });
        let out = sweep(Kind::Noise, &cfg, "epsilon", &[1e-2, 1e-3, 1e-4]).unwrap();
        let text = String::from_utf8(out.csv.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().next().unwrap().contains("error"));
        let empty = sweep(Kind::Noise, &cfg, "epsilon", &[]).unwrap();
        assert!(empty.reports.is_empty());
        assert!(matches!(sweep(Kind::Noise, &cfg, "nope", &[1.0]), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn kind_round_trip() {
        for k in ["complexity", "channel", "noise", "cohering-power", "rode", "decompose", "verify-all"] {
            assert_eq!(k.parse::<Kind>().unwrap().as_str(), k);
        }
    }
}
