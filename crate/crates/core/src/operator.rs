//! Dense complex-matrix substrate.
//!
//! Every matrix function here (exponential, absolute value, square root) is
//! evaluated through one Hermitian eigendecomposition so that compositions such
//! as `sqrt(|A^2 - B^2|)` share a single numerical path.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Square complex matrix, row/column indexed.
pub type ComplexMatrix = DMatrix<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues this close to zero are clamped before taking square roots.
pub const ZERO_CLAMP: f64 = 1e-10;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - ComplexMatrix::identity(n, n)))
}

fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A Hermitian matrix. Construction rejects inputs that are not Hermitian to
/// within [`HERMITIAN_TOL`]; nothing is silently symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(matrix))
    }

    /// Wraps a matrix that is Hermitian by construction up to rounding,
    /// projecting away the rounding residue.
    pub(crate) fn from_computed(matrix: ComplexMatrix) -> Self {
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Self(sym)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                C64::default()
            }
        }))
    }

    /// Builds from row-major complex entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(ComplexMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// `H^2`, Hermitian for Hermitian `H`.
    pub fn square(&self) -> Self {
        Self::from_computed(&self.0 * &self.0)
    }

    /// Traceless part `H - Tr{H}/N * I`.
    pub fn traceless(&self) -> Self {
        let n = self.dim();
        let shift = self.trace() / n as f64;
        Self(&self.0 - ComplexMatrix::identity(n, n).scale(shift))
    }

    /// `[A, B] = AB - BA` as a plain matrix (anti-Hermitian for Hermitian inputs).
    pub fn commutator(&self, other: &Self) -> Result<ComplexMatrix> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(&self.0 * &other.0 - &other.0 * &self.0)
    }
}

/// A unitary matrix, `|U^dagger U - I|_max <= 1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let defect = unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn from_computed(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        ensure_same_dim(self.dim(), rho.dim())?;
        Ok(DensityOperator::from_computed(
            &self.0 * rho.matrix() * self.0.adjoint(),
        ))
    }
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = HermitianOperator::new(matrix)?;
        let tr = herm.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let spec = hermitian_eig(&herm)?;
        let min = spec.values[0];
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self(herm.0))
    }

    pub(crate) fn from_computed(matrix: ComplexMatrix) -> Self {
        Self(HermitianOperator::from_computed(matrix).0)
    }

    /// `|psi><psi|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensity("zero or non-finite state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self::from_computed(&v * v.adjoint()))
    }

    /// Computational basis state `|k><k|` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = c(1.0, 0.0);
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator(self.0.clone())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

/// Eigenvalues (ascending) and the unitary of column eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: UnitaryOperator,
}

impl Spectrum {
    /// `V f(diag(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let v = self.vectors.matrix();
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).scale_mut(fj);
        }
        HermitianOperator::from_computed(scaled * v.adjoint())
    }
}

pub fn hermitian_eig(h: &HermitianOperator) -> Result<Spectrum> {
    let eig = SymmetricEigen::try_new(h.0.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(
        Error::EigenNotConverged {
            iterations: EIG_MAX_ITER,
        },
    )?;
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum {
        values,
        vectors: UnitaryOperator(vectors),
    })
}

/// `exp(-i t H)`.
pub fn matrix_exp_unitary(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    let spec = hermitian_eig(h)?;
    let v = spec.vectors.matrix();
    let mut scaled = v.clone();
    for (j, &lam) in spec.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -t * lam);
        { let mut col = scaled.column_mut(j); col *= phase; }
    }
    Ok(UnitaryOperator(scaled * v.adjoint()))
}

pub fn matrix_abs(h: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(hermitian_eig(h)?.map(f64::abs))
}

fn clamped_sqrt(x: f64) -> f64 {
    if x < ZERO_CLAMP {
        0.0
    } else {
        x.sqrt()
    }
}

/// Principal square root of a PSD operator, small eigenvalues clamped.
pub fn matrix_sqrt_psd(h: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(hermitian_eig(h)?.map(|x| clamped_sqrt(x.max(0.0))))
}

/// `sqrt(|A^2 - B^2|)` evaluated spectrally.
pub fn sqrt_abs_diff(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_same_dim(a.dim(), b.dim())?;
    let diff = HermitianOperator::from_computed(&a.0 * &a.0 - &b.0 * &b.0);
    Ok(hermitian_eig(&diff)?.map(|x| clamped_sqrt(x.abs())))
}

/// `Tr{A^dagger B}` for arbitrary square matrices.
pub fn hs_inner_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    ensure_same_dim(a.nrows(), b.nrows())?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm_matrix(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<C64> {
    hs_inner_matrix(&a.0, &b.0)
}

pub fn hs_norm(a: &HermitianOperator) -> f64 {
    hs_norm_matrix(&a.0)
}

/// Kronecker product `A (x) B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `H_S (x) I_{d_E}`.
pub fn embed_system(h_s: &HermitianOperator, d_e: usize) -> HermitianOperator {
    HermitianOperator(tensor(&h_s.0, &ComplexMatrix::identity(d_e, d_e)))
}

/// `I_{d_S} (x) H_E`.
pub fn embed_environment(h_e: &HermitianOperator, d_s: usize) -> HermitianOperator {
    HermitianOperator(tensor(&ComplexMatrix::identity(d_s, d_s), &h_e.0))
}

/// Partial trace over the second tensor factor of a `d_S * d_E` matrix.
pub fn partial_trace_env_matrix(m: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    ensure_same_dim(d_s * d_e, m.nrows())?;
    Ok(ComplexMatrix::from_fn(d_s, d_s, |s, sp| {
        (0..d_e).map(|e| m[(s * d_e + e, sp * d_e + e)]).sum()
    }))
}

pub fn partial_trace_env(rho: &DensityOperator, d_s: usize, d_e: usize) -> Result<DensityOperator> {
    Ok(DensityOperator::from_computed(partial_trace_env_matrix(
        &rho.0, d_s, d_e,
    )?))
}

/// Eigenvalues of a unitary, from its complex Schur form.
fn unitary_schur(u: &UnitaryOperator) -> Result<(ComplexMatrix, Vec<C64>)> {
    let schur = Schur::try_new(u.0.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(
        Error::EigenNotConverged {
            iterations: EIG_MAX_ITER,
        },
    )?;
    let (q, t) = schur.unpack();
    let diag = (0..t.nrows()).map(|k| t[(k, k)]).collect();
    Ok((q, diag))
}

/// Principal eigenphase in `(-pi, pi]`; the branch point `-1` maps to `+pi`.
fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI + 1e-15 {
        std::f64::consts::PI
    } else {
        a
    }
}

/// The Hermitian generator `G` with `U = exp(-i G)` and spectrum in `[-pi, pi)`,
/// i.e. `G = i * log(U)` on the principal branch.
pub fn unitary_generator(u: &UnitaryOperator) -> Result<HermitianOperator> {
    let (q, diag) = unitary_schur(u)?;
    let mut scaled = q.clone();
    for (j, z) in diag.iter().enumerate() {
        scaled.column_mut(j).scale_mut(-principal_arg(*z));
    }
    Ok(HermitianOperator::from_computed(scaled * q.adjoint()))
}

/// `|| log U ||_HS` on the principal branch.
pub fn principal_log_norm(u: &UnitaryOperator) -> Result<f64> {
    let (_, diag) = unitary_schur(u)?;
    Ok(diag
        .iter()
        .map(|z| principal_arg(*z).powi(2))
        .sum::<f64>()
        .sqrt())
}

pub fn sigma_x() -> HermitianOperator {
    HermitianOperator(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ))
}

pub fn sigma_y() -> HermitianOperator {
    HermitianOperator(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
    ))
}

pub fn sigma_z() -> HermitianOperator {
    HermitianOperator::from_real_diagonal(&[1.0, -1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn eig_pauli_identity_diagonal() {
        let s = hermitian_eig(&sigma_z()).unwrap();
        assert_eq!(s.values, vec![-1.0, 1.0]);
        let s = hermitian_eig(&HermitianOperator::identity(2)).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
        assert!(unitarity_defect(s.vectors.matrix()) < 1e-12);
        let s = hermitian_eig(&HermitianOperator::from_real_diagonal(&[3.0, -4.0])).unwrap();
        assert!((s.values[0] + 4.0).abs() < 1e-14 && (s.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn exp_phase_pi_and_zero_time() {
        let u = matrix_exp_unitary(&sigma_z(), PI).unwrap();
        assert!(close(u.matrix(), &ComplexMatrix::identity(2, 2).scale(-1.0), 1e-12));
        let u = matrix_exp_unitary(&sigma_y(), 0.0).unwrap();
        assert!(close(u.matrix(), &ComplexMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn exp_sigma_x_matches_taylor() {
        // Oracle: truncated Taylor series of exp(-i t X), accumulated directly.
        let t = FRAC_PI_2;
        let x = sigma_x().into_matrix();
        let gen = x.scale(t) * c(0.0, -1.0);
        let mut term = ComplexMatrix::identity(2, 2);
        let mut sum = term.clone();
        for k in 1..=30 {
            term = &term * &gen / c(k as f64, 0.0);
            sum += &term;
        }
        let expected = sigma_x().into_matrix() * c(0.0, -1.0);
        assert!(close(&sum, &expected, 1e-12));
        let u = matrix_exp_unitary(&sigma_x(), t).unwrap();
        assert!(close(u.matrix(), &sum, 1e-12));
    }

    #[test]
    fn abs_examples() {
        let a = matrix_abs(&HermitianOperator::from_real_diagonal(&[3.0, -4.0])).unwrap();
        assert!(close(a.matrix(), HermitianOperator::from_real_diagonal(&[3.0, 4.0]).matrix(), 1e-12));
        let a = matrix_abs(&sigma_y()).unwrap();
        assert!(close(a.matrix(), &ComplexMatrix::identity(2, 2), 1e-12));
    }

    #[test]
    fn sqrt_abs_diff_examples() {
        let a = HermitianOperator::from_real_diagonal(&[2.0, 0.0]);
        let b = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let r = sqrt_abs_diff(&a, &b).unwrap();
        assert!(close(r.matrix(), HermitianOperator::from_real_diagonal(&[2.0, 1.0]).matrix(), 1e-12));
        let r = sqrt_abs_diff(&a, &a).unwrap();
        assert!(max_abs(r.matrix()) == 0.0);
        assert!(matches!(
            sqrt_abs_diff(&a, &HermitianOperator::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hs_examples() {
        assert!((hs_norm(&sigma_z()) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs_inner(&sigma_x(), &sigma_z()).unwrap(), c(0.0, 0.0));
        assert!((hs_norm(&HermitianOperator::identity(5)) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tensor_and_embedding() {
        let e = embed_system(&sigma_z(), 2);
        assert!(close(e.matrix(), HermitianOperator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]).matrix(), 0.0));
        let i6 = tensor(&ComplexMatrix::identity(2, 2), &ComplexMatrix::identity(3, 3));
        assert!(close(&i6, &ComplexMatrix::identity(6, 6), 0.0));
        let h = sigma_y().scale(0.7);
        let n = hs_norm(&embed_system(&h, 3));
        assert!((n - 3f64.sqrt() * hs_norm(&h)).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_examples() {
        let rho_s = DensityOperator::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rho_e = DensityOperator::maximally_mixed(3);
        let joint = DensityOperator::from_computed(tensor(rho_s.matrix(), rho_e.matrix()));
        let red = partial_trace_env(&joint, 2, 3).unwrap();
        assert!(close(red.matrix(), rho_s.matrix(), 1e-12));

        let s = 0.5f64.sqrt();
        let bell = DensityOperator::pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let red = partial_trace_env(&bell, 2, 2).unwrap();
        assert!(close(red.matrix(), DensityOperator::maximally_mixed(2).matrix(), 1e-12));

        assert!(partial_trace_env(&bell, 3, 2).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(ComplexMatrix::identity(2, 2)).is_err());
        let bad = HermitianOperator::from_real_diagonal(&[1.5, -0.5]).into_matrix();
        assert!(matches!(DensityOperator::new(bad), Err(Error::InvalidDensity(_))));
        assert!(DensityOperator::new(DensityOperator::maximally_mixed(4).matrix().clone()).is_ok());
    }

    #[test]
    fn generator_recovers_principal_log() {
        let u = matrix_exp_unitary(&sigma_z(), 1.0).unwrap();
        let g = unitary_generator(&u).unwrap();
        assert!(close(g.matrix(), sigma_z().matrix(), 1e-12));
        assert!((principal_log_norm(&u).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        // branch point: -I has eigenphases pi
        let minus = UnitaryOperator::new(ComplexMatrix::identity(2, 2).scale(-1.0)).unwrap();
        assert!((principal_log_norm(&minus).unwrap() - PI * 2f64.sqrt()).abs() < 1e-12);
    }
}
