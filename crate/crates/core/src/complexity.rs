//! Geometric complexity: closed forms for constant generators, the length
//! functional of piecewise-constant control paths, a multi-start upper-bound
//! estimator for the Carnot-Caratheodory distance, and the l1 cost chain.
//!
//! Normalization: every complexity carries a single global `1/sqrt(d^2 - 1)`
//! and integrates the *raw* generator norm. For the Hilbert-Schmidt metric the
//! raw norm is the full `||H||_HS` (identity component included), which makes
//! `G_hs(exp(-itH)) = t ||H||_HS / sqrt(d^2 - 1)` hold for every Hermitian `H`.
//! For a weighted metric the raw norm is `sqrt(sum_i l_i A_i^2)` over the
//! su(N) coefficients, so the identity direction costs nothing.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{omega_norm_raw, MetricSpec, PauliBasis};
use crate::error::{Error, Result};
use crate::operator::{
    c, hs_norm, hs_norm_matrix, matrix_exp_unitary, principal_log_norm, unitary_generator,
    ComplexMatrix, HermitianOperator, UnitaryOperator,
};
use crate::sample;

/// Right-invariant metric on the unitary group.
#[derive(Clone, Debug)]
pub enum Metric {
    /// Flat bi-invariant metric, norm `||H||_HS`.
    HilbertSchmidt,
    /// Diagonal weights over a Pauli basis.
    Weighted(MetricSpec),
}

impl Metric {
    /// Raw (unnormalized) norm of a generator.
    pub fn generator_norm(&self, h: &HermitianOperator) -> Result<f64> {
        match self {
            Metric::HilbertSchmidt => Ok(hs_norm(h)),
            Metric::Weighted(m) => omega_norm_raw(h, m),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::HilbertSchmidt => "hilbert_schmidt",
            Metric::Weighted(_) => "weighted",
        }
    }
}

/// `1 / sqrt(d^2 - 1)`.
pub fn normalization(dim: usize) -> f64 {
    1.0 / ((dim * dim) as f64 - 1.0).sqrt()
}

/// `G(exp(-itH)) = t * ||H|| / sqrt(d^2 - 1)`.
pub fn geometric_complexity_const(h: &HermitianOperator, t: f64, metric: &Metric) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
    }
    Ok(t * normalization(h.dim()) * metric.generator_norm(h)?)
}

/// Flat-metric closed form `G_hs(exp(-itH))`.
pub fn g_hs(h: &HermitianOperator, t: f64) -> Result<f64> {
    geometric_complexity_const(h, t, &Metric::HilbertSchmidt)
}

/// Flat-metric geodesic distance between unitaries,
/// `||log(U^dagger W)||_HS / sqrt(d^2 - 1)` on the principal branch.
pub fn flat_distance(u: &UnitaryOperator, w: &UnitaryOperator) -> Result<f64> {
    let rel = u.adjoint().compose(w)?;
    Ok(normalization(u.dim()) * principal_log_norm(&rel)?)
}

/// Control path `gamma' = -i H(s) gamma` with `H` constant on each segment.
#[derive(Clone, Debug)]
pub struct PiecewiseConstantPath {
    dim: usize,
    segments: Vec<(HermitianOperator, f64)>,
}

impl PiecewiseConstantPath {
    pub fn new(dim: usize, segments: Vec<(HermitianOperator, f64)>) -> Result<Self> {
        for (h, dt) in &segments {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
            if !(*dt > 0.0) || !dt.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "segment duration {dt} must be positive"
                )));
            }
        }
        Ok(Self { dim, segments })
    }

    pub fn constant(h: HermitianOperator, t: f64) -> Result<Self> {
        Self::new(h.dim(), vec![(h, t)])
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            segments: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[(HermitianOperator, f64)] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|(_, dt)| dt).sum()
    }

    /// Splits segment `k` at fraction `frac` of its duration.
    pub fn split_segment(&self, k: usize, frac: f64) -> Result<Self> {
        if k >= self.segments.len() || !(frac > 0.0 && frac < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot split segment {k} at fraction {frac}"
            )));
        }
        let mut segments = self.segments.clone();
        let (h, dt) = segments.remove(k);
        segments.insert(k, (h.clone(), dt * (1.0 - frac)));
        segments.insert(k, (h, dt * frac));
        Self::new(self.dim, segments)
    }
}

/// `sum_k dt_k ||H_k|| / sqrt(d^2 - 1)`.
pub fn path_length(p: &PiecewiseConstantPath, metric: &Metric) -> Result<f64> {
    let mut total = 0.0;
    for (h, dt) in &p.segments {
        total += dt * metric.generator_norm(h)?;
    }
    Ok(normalization(p.dim) * total)
}

/// Time-ordered product; later segments multiply on the left.
pub fn path_endpoint(p: &PiecewiseConstantPath) -> Result<UnitaryOperator> {
    let mut u = UnitaryOperator::identity(p.dim);
    for (h, dt) in &p.segments {
        u = matrix_exp_unitary(h, *dt)?.compose(&u)?;
    }
    Ok(u)
}

/// `sum_k dt_k sum_j |r_j^(k)|` with `r^(k)` the Pauli coefficients of `H_k`.
pub fn cost_l1(p: &PiecewiseConstantPath, basis: &PauliBasis) -> Result<f64> {
    let mut total = 0.0;
    for (h, dt) in &p.segments {
        let v = basis.vectorize(h)?;
        total += dt * v.coefficients.iter().map(|z| z.norm()).sum::<f64>();
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct CostChainReport {
    pub cost: f64,
    pub complexity: f64,
    pub bound: f64,
    pub bound_holds: bool,
}

/// Checks `cost_l1(p) <= N^2 * path_length(p, flat)`.
pub fn check_cost_chain(p: &PiecewiseConstantPath, basis: &PauliBasis) -> Result<CostChainReport> {
    let cost = cost_l1(p, basis)?;
    let complexity = path_length(p, &Metric::HilbertSchmidt)?;
    let n = basis.dim() as f64;
    let bound = n * n * complexity;
    Ok(CostChainReport {
        cost,
        complexity,
        bound,
        bound_holds: cost <= bound,
    })
}

#[derive(Clone, Debug)]
pub struct GeodesicOptions {
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
    pub endpoint_tol: f64,
    /// Coordinate sweeps per penalty stage.
    pub max_sweeps: usize,
    pub max_penalty_doublings: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            segments: 8,
            restarts: 16,
            seed: 0,
            endpoint_tol: 1e-6,
            max_sweeps: 60,
            max_penalty_doublings: 24,
        }
    }
}

/// Best path found by [`estimate_cc_distance`]; `length` bounds the true
/// distance from above.
#[derive(Clone, Debug)]
pub struct GeodesicEstimate {
    pub length: f64,
    pub endpoint_error: f64,
    pub path: PiecewiseConstantPath,
    pub restarts_used: usize,
}

/// Segment generators parametrized by `[identity, E_1, ..., E_{N^2-1}]`
/// coefficients, with the identity element normalized as `I / sqrt(N)`.
struct ControlSpace<'a> {
    dim: usize,
    basis: &'a PauliBasis,
    metric: &'a Metric,
    segments: usize,
    dt: f64,
    start: &'a ComplexMatrix,
    target: &'a ComplexMatrix,
}

impl ControlSpace<'_> {
    fn block(&self) -> usize {
        self.basis.len() + 1
    }

    fn generator(&self, coeffs: &[f64]) -> HermitianOperator {
        let traceless = self
            .basis
            .combine_real(&coeffs[1..])
            .expect("coefficient block has basis length");
        let id = coeffs[0] / (self.dim as f64).sqrt();
        let m = traceless.into_matrix() + ComplexMatrix::identity(self.dim, self.dim).scale(id);
        HermitianOperator::from_computed(m)
    }

    fn segment_norm(&self, coeffs: &[f64]) -> f64 {
        match self.metric {
            Metric::HilbertSchmidt => coeffs.iter().map(|a| a * a).sum::<f64>().sqrt(),
            Metric::Weighted(m) => m.norm_of_coefficients(&coeffs[1..]),
        }
    }

    fn segment_unitary(&self, coeffs: &[f64]) -> ComplexMatrix {
        matrix_exp_unitary(&self.generator(coeffs), self.dt)
            .expect("hermitian eigendecomposition converges")
            .into_matrix()
    }

    fn length(&self, x: &[f64]) -> f64 {
        let b = self.block();
        normalization(self.dim)
            * self.dt
            * x.chunks(b).map(|seg| self.segment_norm(seg)).sum::<f64>()
    }

    fn endpoint(&self, x: &[f64]) -> ComplexMatrix {
        let mut u = self.start.clone();
        for seg in x.chunks(self.block()) {
            u = self.segment_unitary(seg) * u;
        }
        u
    }

    fn endpoint_error(&self, x: &[f64]) -> f64 {
        hs_norm_matrix(&(self.endpoint(x) - self.target))
    }

    /// Replaces the last segment so the endpoint matches the target exactly:
    /// `exp(-i H_K dt) = V (E_{K-1} ... E_1 U)^dagger`.
    fn polish(&self, x: &mut [f64]) {
        let b = self.block();
        let k = self.segments;
        let mut partial = self.start.clone();
        for seg in x[..(k - 1) * b].chunks(b) {
            partial = self.segment_unitary(seg) * partial;
        }
        let correction = UnitaryOperator::from_computed(self.target * partial.adjoint());
        let g = unitary_generator(&correction).expect("schur decomposition converges");
        let v = self.basis.vectorize(&g).expect("dimension matches basis");
        let last = &mut x[(k - 1) * b..];
        last[0] = v.identity_component.re * (self.dim as f64).sqrt() / self.dt;
        for (dst, z) in last[1..].iter_mut().zip(&v.coefficients) {
            *dst = z.re / self.dt;
        }
    }

    /// Coordinate-wise quadratic-fit descent on `length + mu * err^2`.
    fn local_search(&self, x: &mut [f64], mu: f64, max_sweeps: usize) {
        let b = self.block();
        let objective = |len: f64, end: &ComplexMatrix| {
            len + mu * hs_norm_matrix(&(end - self.target)).powi(2)
        };
        let mut steps = vec![0.05; x.len()];
        let mut seg_norms: Vec<f64> = x.chunks(b).map(|s| self.segment_norm(s)).collect();
        let mut seg_units: Vec<ComplexMatrix> = x.chunks(b).map(|s| self.segment_unitary(s)).collect();
        let scale = normalization(self.dim) * self.dt;
        let mut current = objective(scale * seg_norms.iter().sum::<f64>(), &self.endpoint(x));

        for _ in 0..max_sweeps {
            let before = current;
            for k in 0..self.segments {
                // endpoint = left * E_k * right
                let mut right = self.start.clone();
                for u in &seg_units[..k] {
                    right = u * right;
                }
                let mut left = ComplexMatrix::identity(self.dim, self.dim);
                for u in &seg_units[k + 1..] {
                    left = u * left;
                }
                let other_len: f64 = seg_norms
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, n)| n)
                    .sum();
                let eval = |seg: &[f64]| -> (f64, f64, ComplexMatrix) {
                    let n = self.segment_norm(seg);
                    let u = self.segment_unitary(seg);
                    let end = &left * &u * &right;
                    (objective(scale * (other_len + n), &end), n, u)
                };
                for i in 0..b {
                    let idx = k * b + i;
                    let h = steps[idx];
                    let x0 = x[idx];
                    let seg = &mut x[k * b..(k + 1) * b];
                    seg[i] = x0 + h;
                    let plus = eval(seg);
                    seg[i] = x0 - h;
                    let minus = eval(seg);
                    let mut best = (current, x0, None);
                    if plus.0 < best.0 {
                        best = (plus.0, x0 + h, Some((plus.1, plus.2)));
                    }
                    if minus.0 < best.0 {
                        best = (minus.0, x0 - h, Some((minus.1, minus.2)));
                    }
                    let curv = plus.0 + minus.0 - 2.0 * current;
                    if curv > 0.0 {
                        let delta = (0.5 * h * (minus.0 - plus.0) / curv).clamp(-4.0 * h, 4.0 * h);
                        seg[i] = x0 + delta;
                        let fit = eval(seg);
                        if fit.0 < best.0 {
                            best = (fit.0, x0 + delta, Some((fit.1, fit.2)));
                        }
                    }
                    seg[i] = best.1;
                    match best.2 {
                        Some((n, u)) => {
                            current = best.0;
                            seg_norms[k] = n;
                            seg_units[k] = u;
                            steps[idx] = (1.5 * (best.1 - x0).abs()).max(h * 0.5).max(1e-12);
                        }
                        None => steps[idx] = h * 0.5,
                    }
                }
            }
            let max_step = steps.iter().cloned().fold(0.0, f64::max);
            if max_step < 1e-10 || (before - current).abs() <= 1e-15 * before.abs().max(1.0) {
                break;
            }
        }
    }
}

struct RestartOutcome {
    length: f64,
    error: f64,
    coeffs: Vec<f64>,
}

/// Upper bound on `D(U, V)` by penalized multi-start local search over
/// `K`-segment piecewise-constant paths on `[0, 1]`.
pub fn estimate_cc_distance(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    metric: &Metric,
    opts: &GeodesicOptions,
) -> Result<GeodesicEstimate> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    if opts.segments == 0 || opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "segments and restarts must be at least 1".into(),
        ));
    }
    let dim = u.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a qubit-register dimension"
        )));
    }
    let owned_basis;
    let basis: &PauliBasis = match metric {
        Metric::Weighted(m) => {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            m.basis()
        }
        Metric::HilbertSchmidt => {
            owned_basis = crate::basis::build_pauli_basis(dim.trailing_zeros() as usize)?;
            &owned_basis
        }
    };
    let space = ControlSpace {
        dim,
        basis,
        metric,
        segments: opts.segments,
        dt: 1.0 / opts.segments as f64,
        start: u.matrix(),
        target: v.matrix(),
    };
    let b = space.block();

    // constant geodesic of the flat metric as the common warm start
    let rel = UnitaryOperator::from_computed(v.matrix() * u.matrix().adjoint());
    let g0 = unitary_generator(&rel)?;
    let v0 = basis.vectorize(&g0)?;
    let mut warm = Vec::with_capacity(b);
    warm.push(v0.identity_component.re * (dim as f64).sqrt());
    warm.extend(v0.coefficients.iter().map(|z| z.re));
    let spread = (warm.iter().map(|a| a * a).sum::<f64>() / b as f64).sqrt() + 0.1;

    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sample::stream(opts.seed, r as u64);
            let mut x: Vec<f64> = Vec::with_capacity(b * opts.segments);
            for _ in 0..opts.segments {
                for &w in &warm {
                    let jitter = if r == 0 { 0.0 } else { spread * sample::normal(&mut rng) };
                    x.push(w + jitter);
                }
            }
            let mut best = RestartOutcome {
                length: f64::INFINITY,
                error: f64::INFINITY,
                coeffs: x.clone(),
            };
            let mut mu = 1.0;
            for _ in 0..=opts.max_penalty_doublings {
                space.local_search(&mut x, mu, opts.max_sweeps);
                let raw_error = space.endpoint_error(&x);
                let mut polished = x.clone();
                space.polish(&mut polished);
                let err = space.endpoint_error(&polished);
                let len = space.length(&polished);
                let better = (err <= opts.endpoint_tol && (best.error > opts.endpoint_tol || len < best.length))
                    || (best.error > opts.endpoint_tol && err < best.error);
                if better {
                    best = RestartOutcome {
                        length: len,
                        error: err,
                        coeffs: polished,
                    };
                }
                if raw_error <= opts.endpoint_tol {
                    break;
                }
                mu *= 2.0;
            }
            best
        })
        .collect();

    let best = outcomes
        .iter()
        .filter(|o| o.error <= opts.endpoint_tol)
        .min_by(|a, b| a.length.total_cmp(&b.length));
    let Some(best) = best else {
        let best_error = outcomes.iter().map(|o| o.error).fold(f64::INFINITY, f64::min);
        return Err(Error::GeodesicNotFound {
            best_error,
            tolerance: opts.endpoint_tol,
        });
    };
    let segments = best
        .coeffs
        .chunks(b)
        .map(|seg| (space.generator(seg), space.dt))
        .collect();
    Ok(GeodesicEstimate {
        length: best.length,
        endpoint_error: best.error,
        path: PiecewiseConstantPath::new(dim, segments)?,
        restarts_used: opts.restarts,
    })
}

/// Unit phase helper for tests and examples.
pub fn global_phase(u: &UnitaryOperator, theta: f64) -> UnitaryOperator {
    UnitaryOperator::from_computed(u.matrix() * c(theta.cos(), theta.sin()))
}
