//! Random Schrodinger dynamics `dU/dt = -i (H_S(t) + H_R(t, xi)) U` with
//! piecewise-constant noise, Monte Carlo ensemble means and distance checks.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{build_pauli_basis, omega_norm_raw, MetricSpec, PauliBasis};
use crate::complexity::{flat_distance, path_endpoint, PiecewiseConstantPath};
use crate::error::{Error, Result};
use crate::operator::{hs_norm_matrix, matrix_exp_unitary, ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::sample;

#[derive(Clone, Debug)]
pub enum NoiseKind {
    /// Independent zero-mean Gaussian coefficient per basis element.
    GaussianPauli { basis: Arc<PauliBasis>, sigmas: Vec<f64> },
    /// Uniformly random direction with HS norm `sqrt(sum_j l_j h_j^2)`, where
    /// `h_j` are the Pauli coefficients of the current `H_S` segment.
    BoundedMatched { metric: MetricSpec },
}

#[derive(Clone, Debug)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Correlation time: the noise is constant over each window of this length.
    pub dt_noise: f64,
}

impl NoiseModel {
    pub fn gaussian_pauli(basis: Arc<PauliBasis>, sigmas: Vec<f64>, dt_noise: f64) -> Result<Self> {
        if sigmas.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: sigmas.len(),
            });
        }
        if sigmas.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidArgument("noise standard deviations must be >= 0".into()));
        }
        Self::checked(NoiseKind::GaussianPauli { basis, sigmas }, dt_noise)
    }

    /// Same standard deviation on every Pauli coefficient.
    pub fn gaussian_uniform(n_qubits: usize, sigma: f64, dt_noise: f64) -> Result<Self> {
        let basis = Arc::new(build_pauli_basis(n_qubits)?);
        let sigmas = vec![sigma; basis.len()];
        Self::gaussian_pauli(basis, sigmas, dt_noise)
    }

    pub fn bounded_matched(metric: MetricSpec, dt_noise: f64) -> Result<Self> {
        Self::checked(NoiseKind::BoundedMatched { metric }, dt_noise)
    }

    fn checked(kind: NoiseKind, dt_noise: f64) -> Result<Self> {
        if !(dt_noise > 0.0) || !dt_noise.is_finite() {
            return Err(Error::InvalidArgument(format!("dt_noise {dt_noise} must be positive")));
        }
        Ok(Self { kind, dt_noise })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            NoiseKind::GaussianPauli { basis, .. } => basis.dim(),
            NoiseKind::BoundedMatched { metric } => metric.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            NoiseKind::GaussianPauli { .. } => "gaussian_pauli",
            NoiseKind::BoundedMatched { .. } => "bounded_matched",
        }
    }

    fn sample(&self, h_s: &HermitianOperator, rng: &mut impl rand::Rng) -> Result<HermitianOperator> {
        match &self.kind {
            NoiseKind::GaussianPauli { basis, sigmas } => {
                let coeffs: Vec<f64> = sigmas.iter().map(|s| s * sample::normal(rng)).collect();
                basis.combine_real(&coeffs)
            }
            NoiseKind::BoundedMatched { metric } => {
                let target = omega_norm_raw(h_s, metric)?;
                let mut g: Vec<f64> = (0..metric.basis().len()).map(|_| sample::normal(rng)).collect();
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in &mut g {
                    *x *= target / norm;
                }
                metric.basis().combine_real(&g)
            }
        }
    }
}

/// One sampled trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub endpoint: UnitaryOperator,
    /// `int_0^t ||H_R(s, xi)||_HS ds`.
    pub noise_integral: f64,
}

fn substeps(dt: f64, dt_noise: f64) -> Result<usize> {
    let ratio = dt / dt_noise;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "dt_noise {dt_noise} does not divide segment duration {dt}"
        )));
    }
    Ok(n as usize)
}

fn trajectory(path: &PiecewiseConstantPath, noise: &NoiseModel, rng: &mut impl rand::Rng) -> Result<Trajectory> {
    if noise.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            found: noise.dim(),
        });
    }
    let mut u = UnitaryOperator::identity(path.dim());
    let mut integral = 0.0;
    for (h_s, dt) in path.segments() {
        let n = substeps(*dt, noise.dt_noise)?;
        let step = dt / n as f64;
        for _ in 0..n {
            let h_r = noise.sample(h_s, rng)?;
            integral += step * crate::operator::hs_norm(&h_r);
            let h = h_s.add(&h_r)?;
            u = matrix_exp_unitary(&h, step)?.compose(&u)?;
        }
    }
    Ok(Trajectory {
        endpoint: u,
        noise_integral: integral,
    })
}

/// Integrates one trajectory with exact substep exponentials.
pub fn integrate_rode(path: &PiecewiseConstantPath, noise: &NoiseModel, seed: u64) -> Result<UnitaryOperator> {
    Ok(trajectory(path, noise, &mut sample::stream(seed, 0))?.endpoint)
}

/// Flat geodesic distance `||log(U^dagger W)||_HS / sqrt(d^2 - 1)`.
pub fn distance_unitaries(u: &UnitaryOperator, w: &UnitaryOperator) -> Result<f64> {
    flat_distance(u, w)
}

/// Ambient proxy `||U - V||_HS`, used when `V` need not be unitary.
pub fn distance_operator(u: &UnitaryOperator, v: &ComplexMatrix) -> Result<f64> {
    if v.nrows() != u.dim() || v.ncols() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.nrows(),
        });
    }
    Ok(hs_norm_matrix(&(u.matrix() - v)))
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub index: usize,
    /// `||U(t, xi) - V||_HS`.
    pub distance: f64,
    /// `||U(t, xi) - U_S(t)||_HS`.
    pub endpoint_deviation: f64,
    /// Geodesic distance to the noiseless endpoint.
    pub geodesic_deviation: f64,
    pub noise_integral: f64,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// `V = E[U(t, xi)]`, generally not unitary.
    pub mean_operator: ComplexMatrix,
    pub noiseless: UnitaryOperator,
    pub trajectories_used: usize,
    pub records: Vec<TrajectoryRecord>,
    pub seed: u64,
    endpoints: Vec<UnitaryOperator>,
}

impl EnsembleResult {
    pub fn distances(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.distance).collect()
    }

    pub fn endpoints(&self) -> &[UnitaryOperator] {
        &self.endpoints
    }

    /// `||V - U_S(t)||_HS`.
    pub fn mean_deviation(&self) -> f64 {
        hs_norm_matrix(&(&self.mean_operator - self.noiseless.matrix()))
    }

    /// One row per trajectory.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean of `m` trajectories; trajectory `k` uses stream `(seed, k)`.
pub fn ensemble_mean(path: &PiecewiseConstantPath, noise: &NoiseModel, m: usize, seed: u64) -> Result<EnsembleResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("ensemble size must be >= 1".into()));
    }
    let runs: Vec<Trajectory> = (0..m)
        .into_par_iter()
        .map(|k| trajectory(path, noise, &mut sample::stream(seed, k as u64)))
        .collect::<Result<_>>()?;
    let dim = path.dim();
    // sequential sum keeps the result independent of the thread count
    let mut mean = ComplexMatrix::zeros(dim, dim);
    for r in &runs {
        mean += r.endpoint.matrix();
    }
    mean.unscale_mut(m as f64);
    let noiseless = path_endpoint(path)?;
    let records = runs
        .iter()
        .enumerate()
        .map(|(index, r)| {
            Ok(TrajectoryRecord {
                index,
                distance: distance_operator(&r.endpoint, &mean)?,
                endpoint_deviation: distance_operator(&r.endpoint, noiseless.matrix())?,
                geodesic_deviation: distance_unitaries(&noiseless, &r.endpoint)?,
                noise_integral: r.noise_integral,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult {
        mean_operator: mean,
        noiseless,
        trajectories_used: m,
        records,
        seed,
        endpoints: runs.into_iter().map(|r| r.endpoint).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FluctuationReport {
    pub trajectories: usize,
    pub mean_deviation: f64,
    /// `int sqrt(<H_S, H_S>_Omega) ds` along the system path.
    pub omega_path_length: f64,
    /// Largest per-trajectory `int ||H_R|| ds`; equals `omega_path_length`
    /// for matched noise.
    pub max_noise_integral: f64,
    pub integral_matches: bool,
    /// Trajectories with `||U - V|| > int ||H_R|| + 1e-6`.
    pub distance_violations: Vec<usize>,
    /// Trajectories with `|G(U_S) - G(U)| > D(U_S, U) + 1e-9`.
    pub complexity_violations: Vec<usize>,
    /// Trajectories with `||U - U_S|| > ||U - V|| + ||V - U_S|| + 1e-9`.
    pub triangle_violations: Vec<usize>,
}

impl FluctuationReport {
    pub fn holds(&self) -> bool {
        self.integral_matches
            && self.distance_violations.is_empty()
            && self.complexity_violations.is_empty()
            && self.triangle_violations.is_empty()
    }
}

/// Ensemble check of the fluctuation bound for matched bounded noise.
pub fn fluctuation_report(
    path: &PiecewiseConstantPath,
    noise: &NoiseModel,
    m: usize,
    seed: u64,
) -> Result<(FluctuationReport, EnsembleResult)> {
    let NoiseKind::BoundedMatched { metric } = &noise.kind else {
        return Err(Error::InvalidArgument("fluctuation report needs bounded_matched noise".into()));
    };
    let ens = ensemble_mean(path, noise, m, seed)?;
    let mut omega_len = 0.0;
    for (h, dt) in path.segments() {
        omega_len += dt * omega_norm_raw(h, metric)?;
    }
    let max_noise_integral = ens.records.iter().map(|r| r.noise_integral).fold(0.0, f64::max);
    let identity = UnitaryOperator::identity(path.dim());
    let g_noiseless = distance_unitaries(&identity, &ens.noiseless)?;
    let bias = ens.mean_deviation();
    let mut distance_violations = Vec::new();
    let mut complexity_violations = Vec::new();
    let mut triangle_violations = Vec::new();
    for (r, u) in ens.records.iter().zip(&ens.endpoints) {
        if r.distance > r.noise_integral + 1e-6 {
            distance_violations.push(r.index);
        }
        let g = distance_unitaries(&identity, u)?;
        if (g_noiseless - g).abs() > r.geodesic_deviation + 1e-9 {
            complexity_violations.push(r.index);
        }
        if r.endpoint_deviation > r.distance + bias + 1e-9 {
            triangle_violations.push(r.index);
        }
    }
    let integral_matches = ens
        .records
        .iter()
        .all(|r| (r.noise_integral - omega_len).abs() <= 1e-9 * omega_len.max(1.0));
    Ok((
        FluctuationReport {
            trajectories: m,
            mean_deviation: bias,
            omega_path_length: omega_len,
            max_noise_integral,
            integral_matches,
            distance_violations,
            complexity_violations,
            triangle_violations,
        },
        ens,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_penalty_metric;
    use crate::operator::{max_abs, sigma_z, unitarity_defect};

    fn h_path(seed: u64) -> PiecewiseConstantPath {
        let mut rng = sample::stream(seed, 0);
        let segs = (0..2).map(|_| (sample::traceless_hermitian(4, 1.0, &mut rng), 0.5)).collect();
        PiecewiseConstantPath::new(4, segs).unwrap()
    }

    #[test]
    fn zero_noise_matches_endpoint() {
        let p = h_path(1);
        let noise = NoiseModel::gaussian_uniform(2, 0.0, 0.125).unwrap();
        let u = integrate_rode(&p, &noise, 3).unwrap();
        assert!(max_abs(&(u.matrix() - path_endpoint(&p).unwrap().matrix())) < 1e-12);
        let ens = ensemble_mean(&p, &noise, 5, 0).unwrap();
        assert!(ens.mean_deviation() < 1e-12);
        assert!(ens.distances().iter().all(|&d| d < 1e-12));
        let empty = PiecewiseConstantPath::new(4, vec![(HermitianOperator::zeros(4), 1.0)]).unwrap();
        let id = integrate_rode(&empty, &noise, 0).unwrap();
        assert!(max_abs(&(id.matrix() - ComplexMatrix::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn commuting_noise_accumulates() {
        let basis = Arc::new(build_pauli_basis(1).unwrap());
        // only the Z coefficient fluctuates
        let noise = NoiseModel::gaussian_pauli(basis.clone(), vec![0.0, 0.0, 0.7], 0.1).unwrap();
        let p = PiecewiseConstantPath::constant(sigma_z(), 1.0).unwrap();
        let u = integrate_rode(&p, &noise, 11).unwrap();
        let mut rng = sample::stream(11, 0);
        let mut acc = 0.0;
        for _ in 0..10 {
            let draws: Vec<f64> = (0..3).map(|_| sample::normal(&mut rng)).collect();
            acc += 0.1 * 0.7 * draws[2];
        }
        let total = sigma_z().add(&basis.combine_real(&[0.0, 0.0, acc]).unwrap()).unwrap();
        let direct = matrix_exp_unitary(&total, 1.0).unwrap();
        assert!(max_abs(&(u.matrix() - direct.matrix())) < 1e-8);
    }

    #[test]
    fn single_trajectory_mean_and_divisibility() {
        let p = h_path(2);
        let noise = NoiseModel::gaussian_uniform(2, 0.3, 0.125).unwrap();
        let ens = ensemble_mean(&p, &noise, 1, 4).unwrap();
        let u = integrate_rode(&p, &noise, 4).unwrap();
        assert!(max_abs(&(&ens.mean_operator - u.matrix())) < 1e-15);
        assert!(unitarity_defect(u.matrix()) < 1e-9);
        let bad = NoiseModel::gaussian_uniform(2, 0.3, 0.3).unwrap();
        assert!(integrate_rode(&p, &bad, 0).is_err());
        assert!(ensemble_mean(&p, &noise, 0, 0).is_err());
    }

    #[test]
    fn distance_examples() {
        let id = UnitaryOperator::identity(2);
        assert_eq!(distance_unitaries(&id, &id).unwrap(), 0.0);
        let w = matrix_exp_unitary(&sigma_z(), 1.0).unwrap();
        assert!((distance_unitaries(&id, &w).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(distance_operator(&id, &ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn matched_noise_report() {
        let p = h_path(3);
        let m = build_penalty_metric(2, 2.0).unwrap();
        let noise = NoiseModel::bounded_matched(m, 0.0625).unwrap();
        let (report, ens) = fluctuation_report(&p, &noise, 40, 7).unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!(ens.records.len(), 40);
        let mut buf = Vec::new();
        ens.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,distance,endpoint_deviation"));
        assert_eq!(text.lines().count(), 41);
    }
}
