//! Dephasing channels and coherence measures built on the linear entropy.

use rayon::prelude::*;
use serde::Serialize;

use crate::complexity::g_hs;
use crate::error::{Error, Result};
use crate::operator::{
    c, matrix_exp_unitary, max_abs, ComplexMatrix, DensityOperator, HermitianOperator,
    UnitaryOperator, C64,
};
use crate::optim::{coordinate_minimize, SearchOptions};
use crate::sample;

const PROJECTOR_TOL: f64 = 1e-10;

/// Completely dephasing channel `rho -> sum_i P_i rho P_i`.
#[derive(Clone, Debug)]
pub struct DephasingChannel {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
}

impl DephasingChannel {
    /// Validates orthogonality, idempotence and completeness of the family.
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty projector family".into()))?;
        let dim = first.nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.nrows(),
                });
            }
            HermitianOperator::new(p.clone())?;
            for (j, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let expected = if i == j { p.clone() } else { ComplexMatrix::zeros(dim, dim) };
                if max_abs(&(prod - expected)) > PROJECTOR_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "projectors {i} and {j} violate P_i P_j = delta_ij P_i"
                    )));
                }
            }
            sum += p;
        }
        if max_abs(&(sum - ComplexMatrix::identity(dim, dim))) > PROJECTOR_TOL {
            return Err(Error::InvalidArgument("projectors do not sum to identity".into()));
        }
        Ok(Self { dim, projectors })
    }

    /// Rank-one projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut p = ComplexMatrix::zeros(dim, dim);
                p[(k, k)] = c(1.0, 0.0);
                p
            })
            .collect();
        Self { dim, projectors }
    }

    /// Rank-one projectors onto the columns of `basis`.
    pub fn from_basis(basis: &UnitaryOperator) -> Self {
        let m = basis.matrix();
        let projectors = (0..m.ncols())
            .map(|k| {
                let v = m.column(k);
                &v * v.adjoint()
            })
            .collect();
        Self {
            dim: m.nrows(),
            projectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.projectors
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, p| acc + p * m * p)
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }
}

pub fn dephase(rho: &DensityOperator, e: &DephasingChannel) -> Result<DensityOperator> {
    e.check(rho.dim())?;
    Ok(DensityOperator::from_computed(e.apply(rho.matrix())))
}

fn purity_matrix(m: &ComplexMatrix) -> f64 {
    // Tr{A^2} = sum |a_ij|^2 for Hermitian A
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr{rho^2}`.
pub fn purity(rho: &DensityOperator) -> f64 {
    purity_matrix(rho.matrix())
}

pub fn linear_entropy(rho: &DensityOperator) -> f64 {
    1.0 - purity(rho)
}

/// `C(rho) = zeta(rho) - zeta(E(rho))`.
pub fn rel_entropy_coherence(rho: &DensityOperator, e: &DephasingChannel) -> Result<f64> {
    e.check(rho.dim())?;
    Ok(coherence_of_matrix(rho.matrix(), e))
}

fn coherence_of_matrix(m: &ComplexMatrix, e: &DephasingChannel) -> f64 {
    purity_matrix(m) - purity_matrix(&e.apply(m))
}

#[derive(Clone, Debug)]
pub struct CoheringOptions {
    pub restarts: usize,
    pub seed: u64,
    pub pure_only: bool,
    pub max_sweeps: usize,
}

impl Default for CoheringOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            pure_only: false,
            max_sweeps: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoheringPowerResult {
    pub value: f64,
    pub argmax_state: DensityOperator,
    pub restarts: usize,
    pub converged: bool,
}

/// Unnormalized factor `L` from a real parameter vector: either a `d x d`
/// matrix (mixed states) or a single column (pure states).
fn factor_from_params(x: &[f64], dim: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, cols, |i, j| {
        let k = 2 * (j * dim + i);
        c(x[k], x[k + 1])
    })
}

fn state_from_params(x: &[f64], dim: usize, cols: usize) -> Option<ComplexMatrix> {
    let l = factor_from_params(x, dim, cols);
    let m = &l * l.adjoint();
    let tr = m.trace().re;
    (tr > 1e-300 && tr.is_finite()).then(|| m.unscale(tr))
}

/// Multi-start maximization of `|C(U rho U^dagger) - C(rho)|`.
///
/// The returned value is the objective at `argmax_state`, so it is a certified
/// lower bound on the true maximum.
pub fn cohering_power(
    u: &UnitaryOperator,
    e: &DephasingChannel,
    opts: &CoheringOptions,
) -> Result<CoheringPowerResult> {
    e.check(u.dim())?;
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let dim = u.dim();
    let cols = if opts.pure_only { 1 } else { dim };
    let um = u.matrix();
    let uh = um.adjoint();
    let objective = |rho: &ComplexMatrix| -> f64 {
        let rotated = um * rho * &uh;
        (coherence_of_matrix(&rotated, e) - coherence_of_matrix(rho, e)).abs()
    };

    let runs: Vec<(f64, Vec<f64>, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sample::stream(opts.seed, r as u64);
            let mut x: Vec<f64> = (0..2 * dim * cols)
                .map(|_| sample::normal(&mut rng))
                .collect();
            // the first restarts start near basis states of the dephasing channel
            if r < dim {
                for v in x.iter_mut() {
                    *v *= 1e-3;
                }
                x[2 * r] += 1.0;
            }
            let out = coordinate_minimize(
                &mut x,
                |p| match state_from_params(p, dim, cols) {
                    Some(rho) => -objective(&rho),
                    None => 0.0,
                },
                &SearchOptions {
                    initial_step: 0.1,
                    min_step: 1e-8,
                    max_sweeps: opts.max_sweeps,
                },
            );
            (-out.value, x, out.converged)
        })
        .collect();

    let (_, best_x, converged) = runs
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.0.total_cmp(&b.0).then(ib.cmp(ia)))
        .map(|(_, r)| r.clone())
        .expect("at least one restart");
    let rho = state_from_params(&best_x, dim, cols).unwrap_or_else(|| {
        DensityOperator::maximally_mixed(dim).matrix().clone()
    });
    let value = objective(&rho);
    Ok(CoheringPowerResult {
        value,
        argmax_state: DensityOperator::from_computed(rho),
        restarts: opts.restarts,
        converged,
    })
}

/// `R = 2i Tr{[rho, E(rho)] H}`, the instantaneous rate of `C(rho_t)` under
/// `d rho / dt = -i [H, rho]`.
pub fn coherence_rate_exact(
    h: &HermitianOperator,
    rho: &DensityOperator,
    e: &DephasingChannel,
) -> Result<f64> {
    e.check(rho.dim())?;
    e.check(h.dim())?;
    let r = rho.matrix();
    let er = e.apply(r);
    let comm = r * &er - &er * r;
    let raw: C64 = (comm * h.matrix()).trace() * c(0.0, 2.0);
    if raw.im.abs() > 1e-10 {
        return Err(Error::Numerical {
            operation: "coherence_rate_exact",
            detail: format!("imaginary residue {:e}", raw.im),
        });
    }
    Ok(raw.re)
}

/// `A = ||[rho, E(rho)]||_HS`.
pub fn coherence_rate_bound(rho: &DensityOperator, e: &DephasingChannel) -> Result<f64> {
    e.check(rho.dim())?;
    let r = rho.matrix();
    let er = e.apply(r);
    Ok(crate::operator::hs_norm_matrix(&(r * &er - &er * r)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecoheringReport {
    pub cohering_power: f64,
    /// `C / (sqrt(2) N)`.
    pub lhs: f64,
    /// `C / sqrt(2 (N^2 - 1))`, the tighter constant, logged for comparison.
    pub lhs_alt: f64,
    pub rhs: f64,
    pub holds: bool,
    pub holds_alt: bool,
    pub converged: bool,
}

/// Checks `C_E(exp(-itH)) / (sqrt(2) N) <= G_hs(exp(-itH))`.
pub fn verify_decohering_bound(
    h: &HermitianOperator,
    t: f64,
    e: &DephasingChannel,
    opts: &CoheringOptions,
) -> Result<DecoheringReport> {
    let u = matrix_exp_unitary(h, t)?;
    let cp = cohering_power(&u, e, opts)?;
    let n = h.dim() as f64;
    let lhs = cp.value / (2f64.sqrt() * n);
    let lhs_alt = cp.value / (2.0 * (n * n - 1.0)).sqrt();
    let rhs = g_hs(h, t)?;
    Ok(DecoheringReport {
        cohering_power: cp.value,
        lhs,
        lhs_alt,
        rhs,
        holds: lhs <= rhs + 1e-9,
        holds_alt: lhs_alt <= rhs + 1e-9,
        converged: cp.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{sigma_x, sigma_z};

    fn plus() -> DensityOperator {
        let s = 0.5f64.sqrt();
        DensityOperator::pure(&[c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    fn hadamard() -> UnitaryOperator {
        let s = 0.5f64.sqrt();
        UnitaryOperator::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn dephase_examples() {
        let e = DephasingChannel::computational(2);
        let d = dephase(&plus(), &e).unwrap();
        assert!(max_abs(&(d.matrix() - ComplexMatrix::identity(2, 2).scale(0.5))) < 1e-15);
        let diag = DensityOperator::new(ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.3, 0.0),
            c(0.7, 0.0),
        ])))
        .unwrap();
        assert!(max_abs(&(dephase(&diag, &e).unwrap().matrix() - diag.matrix())) < 1e-15);
        let rho = sample::density(4, &mut sample::stream(3, 0));
        let e4 = DephasingChannel::computational(4);
        let once = dephase(&rho, &e4).unwrap();
        let twice = dephase(&once, &e4).unwrap();
        assert!(max_abs(&(once.matrix() - twice.matrix())) < 1e-12);
        assert!(dephase(&rho, &e).is_err());
    }

    #[test]
    fn rejects_bad_projectors() {
        let mut p = ComplexMatrix::zeros(2, 2);
        p[(0, 0)] = c(1.0, 0.0);
        assert!(DephasingChannel::new(vec![p.clone()]).is_err());
        assert!(DephasingChannel::new(vec![p.clone(), p]).is_err());
        assert!(DephasingChannel::new(vec![]).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&plus()) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityOperator::maximally_mixed(2)) - 0.5).abs() < 1e-15);
        assert!((purity(&DensityOperator::maximally_mixed(8)) - 0.125).abs() < 1e-15);
        assert!((linear_entropy(&DensityOperator::maximally_mixed(2)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coherence_examples() {
        let e = DephasingChannel::computational(2);
        assert!((rel_entropy_coherence(&plus(), &e).unwrap() - 0.5).abs() < 1e-15);
        let rho = sample::density(3, &mut sample::stream(4, 0));
        let e3 = DephasingChannel::computational(3);
        let lhs = rel_entropy_coherence(&rho, &e3).unwrap();
        let rhs = linear_entropy(&dephase(&rho, &e3).unwrap()) - linear_entropy(&rho);
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(lhs >= -1e-12);
    }

    #[test]
    fn cohering_power_examples() {
        let e = DephasingChannel::computational(2);
        let opts = CoheringOptions { restarts: 4, ..Default::default() };
        let id = cohering_power(&UnitaryOperator::identity(2), &e, &opts).unwrap();
        assert!(id.value < 1e-14);
        let diag = matrix_exp_unitary(&sigma_z(), 0.8).unwrap();
        assert!(cohering_power(&diag, &e, &opts).unwrap().value < 1e-14);
        let h = cohering_power(&hadamard(), &e, &opts).unwrap();
        assert!(h.value >= 0.5 - 1e-6, "{}", h.value);
        let check = (rel_entropy_coherence(&hadamard().conjugate(&h.argmax_state).unwrap(), &e).unwrap()
            - rel_entropy_coherence(&h.argmax_state, &e).unwrap())
        .abs();
        assert!((check - h.value).abs() < 1e-9);
        let pure = cohering_power(&hadamard(), &e, &CoheringOptions { pure_only: true, ..opts }).unwrap();
        assert!(pure.value >= 0.5 - 1e-6);
    }

    #[test]
    fn rate_examples() {
        let e = DephasingChannel::computational(2);
        let d = DensityOperator::maximally_mixed(2);
        assert_eq!(coherence_rate_exact(&sigma_x(), &d, &e).unwrap(), 0.0);
        let stationary = DensityOperator::basis_state(2, 0).unwrap();
        assert!(coherence_rate_exact(&sigma_z(), &stationary, &e).unwrap().abs() < 1e-15);
        assert!(coherence_rate_bound(&plus(), &e).unwrap() < 1e-15);

        let mut rng = sample::stream(6, 0);
        let h = sample::hermitian(3, 1.0, &mut rng);
        let rho = sample::density(3, &mut rng);
        let e3 = DephasingChannel::from_basis(&sample::haar_unitary(3, &mut rng));
        let step = 1e-5;
        let cat = |t: f64| {
            let u = matrix_exp_unitary(&h, t).unwrap();
            rel_entropy_coherence(&u.conjugate(&rho).unwrap(), &e3).unwrap()
        };
        let fd = (cat(step) - cat(-step)) / (2.0 * step);
        let exact = coherence_rate_exact(&h, &rho, &e3).unwrap();
        assert!((fd - exact).abs() < 1e-6, "{fd} vs {exact}");
        let a = coherence_rate_bound(&rho, &e3).unwrap();
        assert!(a <= 2f64.sqrt() + 1e-10);
        assert!(exact.abs() <= 2.0 * a * crate::operator::hs_norm(&h) + 1e-12);
    }

    #[test]
    fn holder_needs_factor_two() {
        // Bloch vector (x, 0, z) with H = sigma_y: R = 2xz while A ||H|| = xz.
        let (x, z) = (0.5, 0.5);
        let m = (ComplexMatrix::identity(2, 2) + sigma_x().matrix() * c(x, 0.0) + sigma_z().matrix() * c(z, 0.0))
            * c(0.5, 0.0);
        let rho = DensityOperator::new(m).unwrap();
        let h = crate::operator::sigma_y();
        let e = DephasingChannel::computational(2);
        let rate = coherence_rate_exact(&h, &rho, &e).unwrap();
        let scale = coherence_rate_bound(&rho, &e).unwrap() * crate::operator::hs_norm(&h);
        assert!((rate.abs() - 2.0 * x * z).abs() < 1e-12, "{rate}");
        assert!((rate.abs() / scale - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decohering_bound_examples() {
        let e = DephasingChannel::computational(2);
        let opts = CoheringOptions { restarts: 4, ..Default::default() };
        let zero = verify_decohering_bound(&HermitianOperator::zeros(2), 1.0, &e, &opts).unwrap();
        assert!(zero.holds && zero.lhs.abs() < 1e-15 && zero.rhs == 0.0);
        let h = sigma_x().add(&sigma_z()).unwrap().scale(0.5f64.sqrt());
        let r = verify_decohering_bound(&h, 1.0, &e, &opts).unwrap();
        assert!(r.holds);
    }
}
