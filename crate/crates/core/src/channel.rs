//! Open-system channels from a system-environment Hamiltonian, their
//! complexity, and the noise complexity with its two-sided bounds.
//!
//! `H_S` in every complexity formula means `H_S (x) I_E` on the joint space,
//! and every complexity uses `d = d_S * d_E`.

use serde::Serialize;

use crate::complexity::{estimate_cc_distance, g_hs, normalization, GeodesicOptions, Metric};
use crate::error::{Error, Result};
use crate::operator::{
    embed_environment, embed_system, hermitian_eig, hs_inner, hs_norm, matrix_abs,
    matrix_exp_unitary, max_abs, partial_trace_env, sqrt_abs_diff, tensor, ComplexMatrix,
    DensityOperator, HermitianOperator, UnitaryOperator,
};

const COMPLETENESS_TOL: f64 = 1e-9;

/// System, interaction and environment Hamiltonians plus the initial
/// environment ensemble `sum_i p_i |E_i><E_i|`.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    d_s: usize,
    d_e: usize,
    h_s: HermitianOperator,
    h_i: HermitianOperator,
    h_e: HermitianOperator,
    env_probs: Vec<f64>,
    env_basis: UnitaryOperator,
}

impl ChannelSpec {
    pub fn new(
        h_s: HermitianOperator,
        h_i: HermitianOperator,
        h_e: HermitianOperator,
        env_probs: Vec<f64>,
        env_basis: UnitaryOperator,
    ) -> Result<Self> {
        let d_s = h_s.dim();
        let d_e = h_e.dim();
        if h_i.dim() != d_s * d_e {
            return Err(Error::DimensionMismatch {
                expected: d_s * d_e,
                found: h_i.dim(),
            });
        }
        if env_probs.len() != d_e || env_basis.dim() != d_e {
            return Err(Error::DimensionMismatch {
                expected: d_e,
                found: if env_probs.len() != d_e { env_probs.len() } else { env_basis.dim() },
            });
        }
        if env_probs.iter().any(|&p| !(p >= 0.0)) || (env_probs.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(
                "environment probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            d_s,
            d_e,
            h_s,
            h_i,
            h_e,
            env_probs,
            env_basis,
        })
    }

    /// Environment prepared in the computational basis.
    pub fn with_computational_env(
        h_s: HermitianOperator,
        h_i: HermitianOperator,
        h_e: HermitianOperator,
        env_probs: Vec<f64>,
    ) -> Result<Self> {
        let d_e = h_e.dim();
        Self::new(h_s, h_i, h_e, env_probs, UnitaryOperator::identity(d_e))
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn dim(&self) -> usize {
        self.d_s * self.d_e
    }

    pub fn h_s(&self) -> &HermitianOperator {
        &self.h_s
    }

    pub fn h_i(&self) -> &HermitianOperator {
        &self.h_i
    }

    pub fn h_e(&self) -> &HermitianOperator {
        &self.h_e
    }

    pub fn env_probs(&self) -> &[f64] {
        &self.env_probs
    }

    pub fn env_basis(&self) -> &UnitaryOperator {
        &self.env_basis
    }

    /// `H_S (x) I_E`.
    pub fn h_s_embedded(&self) -> HermitianOperator {
        embed_system(&self.h_s, self.d_e)
    }

    pub fn h_tot(&self) -> HermitianOperator {
        let m = self.h_s_embedded().into_matrix()
            + self.h_i.matrix()
            + embed_environment(&self.h_e, self.d_s).into_matrix();
        HermitianOperator::from_computed(m)
    }

    /// `sum_i p_i |E_i><E_i|`.
    pub fn env_state(&self) -> DensityOperator {
        let b = self.env_basis.matrix();
        let mut m = ComplexMatrix::zeros(self.d_e, self.d_e);
        for (i, p) in self.env_probs.iter().enumerate() {
            let v = b.column(i);
            m += (&v * v.adjoint()).scale(*p);
        }
        DensityOperator::from_computed(m)
    }
}

#[derive(Clone, Debug)]
pub struct KrausSet {
    /// `M_ji` stored at index `j * d_E + i`.
    pub operators: Vec<ComplexMatrix>,
    pub t: f64,
}

impl KrausSet {
    /// `max |sum M^dagger M - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.operators[0].nrows();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| acc + m.adjoint() * m);
        max_abs(&(sum - ComplexMatrix::identity(d, d)))
    }
}

/// `M_ji = sqrt(p_i) <E_j| exp(-i t H_tot) |E_i>`.
pub fn kraus_operators(spec: &ChannelSpec, t: f64) -> Result<KrausSet> {
    let u = matrix_exp_unitary(&spec.h_tot(), t)?;
    let lift = tensor(&ComplexMatrix::identity(spec.d_s, spec.d_s), spec.env_basis.matrix());
    let w = lift.adjoint() * u.matrix() * &lift;
    let (d_s, d_e) = (spec.d_s, spec.d_e);
    let mut operators = Vec::with_capacity(d_e * d_e);
    for j in 0..d_e {
        for i in 0..d_e {
            let amp = spec.env_probs[i].sqrt();
            operators.push(ComplexMatrix::from_fn(d_s, d_s, |s, r| {
                w[(s * d_e + j, r * d_e + i)] * amp
            }));
        }
    }
    let set = KrausSet { operators, t };
    let defect = set.completeness_defect();
    if defect > COMPLETENESS_TOL {
        return Err(Error::Numerical {
            operation: "kraus_operators",
            detail: format!("completeness defect {defect:e}"),
        });
    }
    Ok(set)
}

/// `Lambda_t(rho_S) = sum M_ji rho_S M_ji^dagger`.
pub fn apply_channel(spec: &ChannelSpec, t: f64, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != spec.d_s {
        return Err(Error::DimensionMismatch {
            expected: spec.d_s,
            found: rho.dim(),
        });
    }
    let kraus = kraus_operators(spec, t)?;
    let out = kraus
        .operators
        .iter()
        .fold(ComplexMatrix::zeros(spec.d_s, spec.d_s), |acc, m| {
            acc + m * rho.matrix() * m.adjoint()
        });
    Ok(DensityOperator::from_computed(out))
}

/// Reference evaluation `Tr_E{U (rho_S (x) rho_E) U^dagger}`.
pub fn apply_channel_joint(spec: &ChannelSpec, t: f64, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != spec.d_s {
        return Err(Error::DimensionMismatch {
            expected: spec.d_s,
            found: rho.dim(),
        });
    }
    let u = matrix_exp_unitary(&spec.h_tot(), t)?;
    let joint = DensityOperator::from_computed(tensor(rho.matrix(), spec.env_state().matrix()));
    partial_trace_env(&u.conjugate(&joint)?, spec.d_s, spec.d_e)
}

/// `G(Lambda_t) = G(exp(-itH_tot)) - G(exp(-it sqrt|H_tot^2 - H_S^2|))`.
pub fn channel_complexity_const(spec: &ChannelSpec, t: f64) -> Result<f64> {
    let h_tot = spec.h_tot();
    let root = sqrt_abs_diff(&h_tot, &spec.h_s_embedded())?;
    Ok(g_hs(&h_tot, t)? - g_hs(&root, t)?)
}

/// `G(exp(-it H_S (x) I))`, the noiseless reference.
pub fn noiseless_complexity(spec: &ChannelSpec, t: f64) -> Result<f64> {
    g_hs(&spec.h_s_embedded(), t)
}

/// `|G(Lambda_t) - G(exp(-itH_S))|`.
pub fn noise_complexity(spec: &ChannelSpec, t: f64) -> Result<f64> {
    Ok((channel_complexity_const(spec, t)? - noiseless_complexity(spec, t)?).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct NoiseBounds {
    pub lower: f64,
    /// `None` when the geodesic search behind the distance term failed.
    pub upper: Option<f64>,
    /// The distance term is an upper estimate, so `upper` errs low.
    pub distance_estimate: Option<f64>,
}

/// Lower bound from the anticommutator argument and the upper bound through
/// the distance between the joint propagator and its square-root partner.
pub fn noise_complexity_bounds(spec: &ChannelSpec, t: f64, opts: &GeodesicOptions) -> Result<NoiseBounds> {
    let h_tot = spec.h_tot();
    let h_s = spec.h_s_embedded();
    let root = sqrt_abs_diff(&h_tot, &h_s)?;
    let abs_s = matrix_abs(&h_s)?;
    let lower = g_hs(&root.add(&abs_s)?, t)? - g_hs(&h_tot, t)?;
    let u_tot = matrix_exp_unitary(&h_tot, t)?;
    let u_root = matrix_exp_unitary(&root, t)?;
    let distance = match estimate_cc_distance(&u_tot, &u_root, &Metric::HilbertSchmidt, opts) {
        Ok(est) => Some(est.length),
        Err(Error::GeodesicNotFound { .. }) => None,
        Err(e) => return Err(e),
    };
    let upper = distance.map(|dist| g_hs(&h_s, t).map(|g| g - dist)).transpose()?;
    Ok(NoiseBounds {
        lower,
        upper,
        distance_estimate: distance,
    })
}

/// One constant segment of a time-dependent joint Hamiltonian.
#[derive(Clone, Debug)]
pub struct SegmentSplit {
    pub h_s: HermitianOperator,
    pub h_i: HermitianOperator,
    pub h_e: HermitianOperator,
    pub dt: f64,
}

#[derive(Clone, Debug)]
pub struct TimeDependentSpec {
    d_s: usize,
    d_e: usize,
    segments: Vec<SegmentSplit>,
    metric: Metric,
}

impl TimeDependentSpec {
    pub fn new(d_s: usize, d_e: usize, segments: Vec<SegmentSplit>, metric: Metric) -> Result<Self> {
        for seg in &segments {
            if seg.h_s.dim() != d_s || seg.h_e.dim() != d_e || seg.h_i.dim() != d_s * d_e {
                return Err(Error::DimensionMismatch {
                    expected: d_s * d_e,
                    found: seg.h_i.dim(),
                });
            }
            if !(seg.dt > 0.0) {
                return Err(Error::InvalidArgument(format!("segment duration {} must be positive", seg.dt)));
            }
        }
        if let Metric::Weighted(m) = &metric {
            if m.dim() != d_s * d_e {
                return Err(Error::DimensionMismatch {
                    expected: d_s * d_e,
                    found: m.dim(),
                });
            }
        }
        Ok(Self {
            d_s,
            d_e,
            segments,
            metric,
        })
    }

    pub fn dim(&self) -> usize {
        self.d_s * self.d_e
    }

    pub fn segments(&self) -> &[SegmentSplit] {
        &self.segments
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    fn parts(&self, seg: &SegmentSplit) -> (HermitianOperator, HermitianOperator) {
        let h_s = embed_system(&seg.h_s, self.d_e);
        let total = h_s.matrix() + seg.h_i.matrix() + embed_environment(&seg.h_e, self.d_s).matrix();
        (HermitianOperator::from_computed(total), h_s)
    }
}

/// `(1/sqrt(d^2-1)) sum_k dt_k | ||H_k|| - sqrt| ||H_k||^2 - ||H_S,k||^2 | |`.
pub fn channel_complexity_td(spec: &TimeDependentSpec) -> Result<f64> {
    let mut total = 0.0;
    for seg in &spec.segments {
        let (h, h_s) = spec.parts(seg);
        let a = spec.metric.generator_norm(&h)?;
        let b = spec.metric.generator_norm(&h_s)?;
        total += seg.dt * (a - (a * a - b * b).abs().sqrt()).abs();
    }
    Ok(normalization(spec.dim()) * total)
}

/// Length of the system-only path under the same metric.
pub fn noiseless_complexity_td(spec: &TimeDependentSpec) -> Result<f64> {
    let mut total = 0.0;
    for seg in &spec.segments {
        let (_, h_s) = spec.parts(seg);
        total += seg.dt * spec.metric.generator_norm(&h_s)?;
    }
    Ok(normalization(spec.dim()) * total)
}

/// Length of the full joint path under the same metric.
pub fn full_path_complexity_td(spec: &TimeDependentSpec) -> Result<f64> {
    let mut total = 0.0;
    for seg in &spec.segments {
        let (h, _) = spec.parts(seg);
        total += seg.dt * spec.metric.generator_norm(&h)?;
    }
    Ok(normalization(spec.dim()) * total)
}

pub fn noise_complexity_td(spec: &TimeDependentSpec) -> Result<f64> {
    Ok((channel_complexity_td(spec)? - noiseless_complexity_td(spec)?).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbativeResult {
    pub exact: f64,
    pub perturbative: f64,
    /// Coupling `w = sqrt(2 <H_S (x) I, A (x) diag(E)>) / ||H_S (x) I||`,
    /// matched to the leading `sqrt(eps)` term of the exact expansion.
    pub omega_coupling: f64,
    /// `sqrt((d^2-1) <A_S, H_S> <E>) / ||H_S||` with `<E> = sum_i alpha_i E_i`;
    /// reported for comparison only.
    pub omega_alternative: f64,
}

/// Dephasing-type perturbation `H_tot = H_S (x) I + eps A_S (x) diag(E)`
/// and its small-`eps` expansion
/// `(t/sqrt(d^2-1)) ||H_S|| (1 - sqrt(eps) w (1 - sqrt(eps) w))`.
pub fn perturbative_example(
    h_s: &HermitianOperator,
    a_s: &HermitianOperator,
    env_energies: &[f64],
    weights: &[f64],
    eps: f64,
    t: f64,
) -> Result<PerturbativeResult> {
    if a_s.dim() != h_s.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_s.dim(),
            found: a_s.dim(),
        });
    }
    if weights.len() != env_energies.len() || env_energies.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: env_energies.len(),
            found: weights.len(),
        });
    }
    let comm = h_s.commutator(a_s)?;
    if max_abs(&comm) > 1e-10 {
        return Err(Error::InvalidArgument("H_S and A_S must commute".into()));
    }
    for (name, op) in [("H_S", h_s), ("A_S", a_s)] {
        if hermitian_eig(op)?.values[0] < -1e-10 {
            return Err(Error::InvalidArgument(format!("{name} must be positive semidefinite")));
        }
    }
    if env_energies.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::InvalidArgument("environment energies must be >= 0".into()));
    }
    if weights.iter().any(|&a| !(a >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument("weights must form a probability vector".into()));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be >= 0")));
    }
    let d_e = env_energies.len();
    let h_e = HermitianOperator::from_real_diagonal(env_energies);
    let coupling = HermitianOperator::from_computed(tensor(a_s.matrix(), h_e.matrix()));
    let spec = ChannelSpec::with_computational_env(
        h_s.clone(),
        coupling.scale(eps),
        HermitianOperator::zeros(d_e),
        weights.to_vec(),
    )?;
    let exact = channel_complexity_const(&spec, t)?;

    let h_emb = spec.h_s_embedded();
    let norm = hs_norm(&h_emb);
    let overlap = hs_inner(&h_emb, &coupling)?.re;
    let omega_coupling = if norm > 0.0 { (2.0 * overlap).max(0.0).sqrt() / norm } else { 0.0 };
    let d = spec.dim() as f64;
    let mean_e: f64 = env_energies.iter().zip(weights).map(|(e, a)| e * a).sum();
    let small = hs_norm(h_s);
    let omega_alternative = if small > 0.0 {
        ((d * d - 1.0) * hs_inner(a_s, h_s)?.re * mean_e).max(0.0).sqrt() / small
    } else {
        0.0
    };
    let se = eps.sqrt() * omega_coupling;
    let perturbative = t * normalization(spec.dim()) * norm * (1.0 - se * (1.0 - se));
    Ok(PerturbativeResult {
        exact,
        perturbative,
        omega_coupling,
        omega_alternative,
    })
}

/// Builds `I_S (x) B` for a `d_E x d_E` matrix; handy for couplings.
pub fn env_operator(d_s: usize, b: &HermitianOperator) -> HermitianOperator {
    embed_environment(b, d_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{sigma_x, sigma_z};
    use crate::sample;

    fn random_spec(seed: u64) -> ChannelSpec {
        let mut rng = sample::stream(seed, 0);
        let h_s = sample::hermitian(2, 1.0, &mut rng);
        let h_i = sample::hermitian(4, 0.5, &mut rng);
        let h_e = sample::hermitian(2, 1.0, &mut rng);
        let p = sample::normal(&mut rng).abs().min(1.0);
        ChannelSpec::new(h_s, h_i, h_e, vec![p, 1.0 - p], sample::haar_unitary(2, &mut rng)).unwrap()
    }

    #[test]
    fn kraus_uncoupled_and_t0() {
        let spec = ChannelSpec::with_computational_env(
            sigma_x(),
            HermitianOperator::zeros(4),
            HermitianOperator::zeros(2),
            vec![0.25, 0.75],
        )
        .unwrap();
        let k = kraus_operators(&spec, 0.7).unwrap();
        let u = matrix_exp_unitary(&sigma_x(), 0.7).unwrap();
        assert!(max_abs(&(&k.operators[0] - u.matrix().scale(0.5))) < 1e-12);
        assert!(max_abs(&k.operators[1]) < 1e-12);
        assert!(k.completeness_defect() < 1e-12);
        let k0 = kraus_operators(&random_spec(2), 0.0).unwrap();
        assert!(max_abs(&k0.operators[1]) < 1e-15);
    }

    #[test]
    fn channel_matches_partial_trace() {
        for seed in 0..5 {
            let spec = random_spec(seed);
            let rho = sample::density(2, &mut sample::stream(seed, 1));
            let a = apply_channel(&spec, 1.3, &rho).unwrap();
            let b = apply_channel_joint(&spec, 1.3, &rho).unwrap();
            assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-10);
            assert!((a.trace() - 1.0).abs() < 1e-9);
        }
        let spec = random_spec(9);
        let rho = sample::density(2, &mut sample::stream(9, 1));
        assert!(max_abs(&(apply_channel(&spec, 0.0, &rho).unwrap().matrix() - rho.matrix())) < 1e-12);
        assert!(apply_channel(&spec, 1.0, &DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn channel_complexity_limits() {
        let h_s = sample::hermitian(2, 1.0, &mut sample::stream(1, 0));
        let free = ChannelSpec::with_computational_env(
            h_s.clone(),
            HermitianOperator::zeros(4),
            HermitianOperator::zeros(2),
            vec![0.5, 0.5],
        )
        .unwrap();
        let g = channel_complexity_const(&free, 1.0).unwrap();
        assert!((g - noiseless_complexity(&free, 1.0).unwrap()).abs() < 1e-12);
        assert!(noise_complexity(&free, 1.0).unwrap() < 1e-12);

        let h_i = sample::hermitian(4, 1.0, &mut sample::stream(1, 1));
        let only_i = ChannelSpec::with_computational_env(
            HermitianOperator::zeros(2),
            h_i,
            HermitianOperator::zeros(2),
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(channel_complexity_const(&only_i, 1.0).unwrap().abs() < 1e-10);

        for seed in 0..10 {
            let spec = random_spec(seed);
            assert!(channel_complexity_const(&spec, 1.0).unwrap() <= noiseless_complexity(&spec, 1.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn noise_bounds_uncoupled() {
        let free = ChannelSpec::with_computational_env(
            sigma_z(),
            HermitianOperator::zeros(4),
            HermitianOperator::zeros(2),
            vec![1.0, 0.0],
        )
        .unwrap();
        let opts = GeodesicOptions { segments: 1, restarts: 1, ..Default::default() };
        let b = noise_complexity_bounds(&free, 1.0, &opts).unwrap();
        let n = noise_complexity(&free, 1.0).unwrap();
        assert!(b.lower <= n + 1e-8);
        assert!(n <= b.upper.unwrap() + 1e-8);
    }

    #[test]
    fn time_dependent_limits() {
        let mut rng = sample::stream(3, 0);
        let segs: Vec<SegmentSplit> = (0..3)
            .map(|k| SegmentSplit {
                h_s: sample::hermitian(2, 1.0, &mut rng),
                h_i: HermitianOperator::zeros(4),
                h_e: HermitianOperator::zeros(2),
                dt: 0.2 + 0.1 * k as f64,
            })
            .collect();
        let spec = TimeDependentSpec::new(2, 2, segs.clone(), Metric::HilbertSchmidt).unwrap();
        let g = channel_complexity_td(&spec).unwrap();
        assert!((g - noiseless_complexity_td(&spec).unwrap()).abs() < 1e-12);
        assert!(noise_complexity_td(&spec).unwrap() < 1e-12);

        let only_i: Vec<SegmentSplit> = segs
            .iter()
            .map(|s| SegmentSplit {
                h_s: HermitianOperator::zeros(2),
                h_i: sample::hermitian(4, 1.0, &mut rng),
                h_e: HermitianOperator::zeros(2),
                dt: s.dt,
            })
            .collect();
        let spec = TimeDependentSpec::new(2, 2, only_i, Metric::HilbertSchmidt).unwrap();
        assert!(channel_complexity_td(&spec).unwrap().abs() < 1e-12);
    }

    #[test]
    fn perturbative_zero_eps_and_validation() {
        let h = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
        let a = HermitianOperator::identity(2);
        let r = perturbative_example(&h, &a, &[0.0, 1.0], &[0.5, 0.5], 0.0, 1.0).unwrap();
        assert!((r.exact - r.perturbative).abs() < 1e-12);
        let emb = embed_system(&h, 2);
        assert!((r.exact - g_hs(&emb, 1.0).unwrap()).abs() < 1e-12);
        assert!(perturbative_example(&h, &sigma_x(), &[0.0, 1.0], &[0.5, 0.5], 0.1, 1.0).is_err());
        assert!(perturbative_example(&h, &a, &[0.0, 1.0], &[0.7, 0.7], 0.1, 1.0).is_err());
    }

    #[test]
    fn perturbative_rate() {
        let h = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
        let a = HermitianOperator::identity(2);
        let err = |eps: f64| {
            let r = perturbative_example(&h, &a, &[0.0, 1.0], &[0.5, 0.5], eps, 1.0).unwrap();
            (r.exact - r.perturbative).abs()
        };
        let ratio = err(1e-2) / err(1e-4);
        assert!((10.0..=1000.0).contains(&ratio), "ratio {ratio}");
    }
}
