//! Orthonormal Pauli-string bases of su(N), vectorization, and the diagonal
//! Hermitian-form metrics built on them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, ComplexMatrix, HermitianOperator, C64};

pub const MAX_QUBITS: usize = 5;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn single_qubit(letter: char) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let entries = match letter {
        'I' => [one, z, z, one],
        'X' => [z, one, one, z],
        'Y' => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        'Z' => [one, z, z, -one],
        _ => unreachable!("pauli letters are I, X, Y, Z"),
    };
    ComplexMatrix::from_row_slice(2, 2, &entries)
}

/// Unnormalized Pauli string matrix; the first letter is the leftmost tensor factor.
pub fn pauli_string_matrix(label: &str) -> Result<ComplexMatrix> {
    if label.is_empty() {
        return Err(Error::InvalidArgument("empty pauli label".into()));
    }
    let mut m = ComplexMatrix::identity(1, 1);
    for ch in label.chars() {
        if !LETTERS.contains(&ch) {
            return Err(Error::InvalidArgument(format!(
                "invalid pauli letter `{ch}` in `{label}`"
            )));
        }
        m = m.kronecker(&single_qubit(ch));
    }
    Ok(m)
}

pub fn pauli_weight(label: &str) -> usize {
    label.chars().filter(|&ch| ch != 'I').count()
}

/// The `4^n - 1` non-identity Pauli strings on `n` qubits, each scaled by
/// `1/sqrt(2^n)` so that `Tr{E_i E_j} = delta_ij`.
///
/// Ordered by string weight, then lexicographically with `I < X < Y < Z`.
#[derive(Clone, Debug)]
pub struct PauliBasis {
    n_qubits: usize,
    labels: Vec<String>,
    elements: Vec<ComplexMatrix>,
}

/// `Vec(A)` plus the identity part `Tr{A}/N` that su(N) cannot represent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorizedOperator {
    pub coefficients: Vec<C64>,
    pub identity_component: C64,
}

impl VectorizedOperator {
    pub fn real_coefficients(&self) -> Vec<f64> {
        self.coefficients.iter().map(|z| z.re).collect()
    }
}

pub fn build_pauli_basis(n: usize) -> Result<PauliBasis> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount(n));
    }
    let mut labels: Vec<String> = (1..4usize.pow(n as u32))
        .map(|mut code| {
            let mut s = vec!['I'; n];
            for pos in (0..n).rev() {
                s[pos] = LETTERS[code % 4];
                code /= 4;
            }
            s.into_iter().collect()
        })
        .collect();
    // base-4 enumeration is already lexicographic; a stable sort by weight keeps that within each weight
    labels.sort_by_key(|l| pauli_weight(l));
    let norm = 1.0 / ((1usize << n) as f64).sqrt();
    let elements = labels
        .iter()
        .map(|l| pauli_string_matrix(l).map(|m| m.scale(norm)))
        .collect::<Result<_>>()?;
    Ok(PauliBasis {
        n_qubits: n,
        labels,
        elements,
    })
}

impl PauliBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension `N = 2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `N^2 - 1`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn weights_of_labels(&self) -> Vec<usize> {
        self.labels.iter().map(|l| pauli_weight(l)).collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Coefficients `Tr{E_i A}` of an arbitrary square matrix.
    pub fn vectorize_matrix(&self, a: &ComplexMatrix) -> Result<VectorizedOperator> {
        self.check_dim(a.nrows())?;
        // E_i is Hermitian, so Tr{E_i A} = sum_jk conj(E_i[k,j]) A[k,j]
        let coefficients = self
            .elements
            .iter()
            .map(|e| e.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum())
            .collect();
        let identity_component = a.trace() / c(self.dim() as f64, 0.0);
        Ok(VectorizedOperator {
            coefficients,
            identity_component,
        })
    }

    pub fn vectorize(&self, a: &HermitianOperator) -> Result<VectorizedOperator> {
        self.vectorize_matrix(a.matrix())
    }

    /// `sum_i A_i E_i` from real coefficients (the Hermitian case).
    pub fn combine_real(&self, coefficients: &[f64]) -> Result<HermitianOperator> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coefficients.len(),
            });
        }
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (e, &a) in self.elements.iter().zip(coefficients) {
            if a != 0.0 {
                m += e.scale(a);
            }
        }
        Ok(HermitianOperator::from_computed(m))
    }

    /// Traceless Hermitian operator with the given coefficients. Imaginary
    /// parts above `1e-10` are rejected since they would break Hermiticity.
    pub fn devectorize(&self, v: &VectorizedOperator) -> Result<HermitianOperator> {
        if let Some(z) = v.coefficients.iter().find(|z| z.im.abs() > 1e-10) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {z} has an imaginary part; result would not be Hermitian"
            )));
        }
        let re: Vec<f64> = v.real_coefficients();
        self.combine_real(&re)
    }
}

/// Diagonal weights `l_i >= 1` over a Pauli basis.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    basis: Arc<PauliBasis>,
    weights: Vec<f64>,
}

impl MetricSpec {
    pub fn new(basis: Arc<PauliBasis>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != basis.len() {
            return Err(Error::InvalidWeights(format!(
                "expected {} weights, got {}",
                basis.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w >= 1.0) || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!("weight {w} is below 1")));
        }
        Ok(Self { basis, weights })
    }

    /// All weights equal to one.
    pub fn flat(basis: Arc<PauliBasis>) -> Self {
        let weights = vec![1.0; basis.len()];
        Self { basis, weights }
    }

    pub fn basis(&self) -> &PauliBasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<PauliBasis> {
        Arc::clone(&self.basis)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `sqrt(sum_i l_i |A_i|^2)` straight from coefficients.
    pub fn norm_of_coefficients(&self, coefficients: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(coefficients)
            .map(|(l, a)| l * a * a)
            .sum::<f64>()
            .sqrt()
    }
}

/// Weight 1 on strings of weight <= 2, `q` on the rest.
pub fn build_penalty_metric(n: usize, q: f64) -> Result<MetricSpec> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidPenalty(q));
    }
    let basis = Arc::new(build_pauli_basis(n)?);
    let weights = basis
        .weights_of_labels()
        .into_iter()
        .map(|w| if w <= 2 { 1.0 } else { q })
        .collect();
    MetricSpec::new(basis, weights)
}

/// `<A, B>_Omega = Vec(A)^dagger Omega Vec(B) / (N^2 - 1)`.
pub fn omega_inner(a: &HermitianOperator, b: &HermitianOperator, m: &MetricSpec) -> Result<f64> {
    let va = m.basis.vectorize(a)?;
    let vb = m.basis.vectorize(b)?;
    let raw: C64 = m
        .weights
        .iter()
        .zip(va.coefficients.iter().zip(&vb.coefficients))
        .map(|(l, (x, y))| x.conj() * y * *l)
        .sum();
    Ok(raw.re / m.basis.len() as f64)
}

/// `sqrt(Vec(A)^dagger Omega Vec(A))`, without the `1/(N^2-1)` prefactor.
pub fn omega_norm_raw(a: &HermitianOperator, m: &MetricSpec) -> Result<f64> {
    let va = m.basis.vectorize(a)?;
    Ok(m
        .weights
        .iter()
        .zip(&va.coefficients)
        .map(|(l, x)| l * x.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Serializable form of a metric: qubit count plus weights.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricRecord {
    pub n_qubits: usize,
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
}

impl From<&MetricSpec> for MetricRecord {
    fn from(m: &MetricSpec) -> Self {
        Self {
            n_qubits: m.basis.n_qubits(),
            labels: m.basis.labels().to_vec(),
            weights: m.weights.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hs_norm, sigma_x, sigma_z};
    use crate::sample;

    #[test]
    fn one_qubit_basis() {
        let b = build_pauli_basis(1).unwrap();
        assert_eq!(b.labels(), &["X", "Y", "Z"]);
        let s = 0.5f64.sqrt();
        assert!((b.elements()[2][(0, 0)].re - s).abs() < 1e-15);
    }

    #[test]
    fn basis_counts_and_ordering() {
        assert_eq!(build_pauli_basis(2).unwrap().len(), 15);
        let b3 = build_pauli_basis(3).unwrap();
        assert_eq!(b3.len(), 63);
        let w = b3.weights_of_labels();
        assert!(w[..36].iter().all(|&x| x <= 2));
        assert!(w[36..].iter().all(|&x| x == 3));
        assert_eq!(b3.labels()[0], "IIX");
        assert_eq!(b3.labels()[36], "XXX");
        assert!(matches!(build_pauli_basis(0), Err(Error::UnsupportedQubitCount(0))));
        assert!(matches!(build_pauli_basis(6), Err(Error::UnsupportedQubitCount(6))));
    }

    #[test]
    fn orthonormal_and_traceless() {
        let b = build_pauli_basis(2).unwrap();
        for (i, ei) in b.elements().iter().enumerate() {
            assert!(ei.trace().norm() < 1e-14);
            for (j, ej) in b.elements().iter().enumerate() {
                let ip = (ei * ej).trace();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn vectorize_examples() {
        let b = build_pauli_basis(1).unwrap();
        let v = b.vectorize(&sigma_z()).unwrap();
        let want = [0.0, 0.0, 2f64.sqrt()];
        for (z, w) in v.coefficients.iter().zip(want) {
            assert!((z - c(w, 0.0)).norm() < 1e-14);
        }
        let v = b.vectorize(&HermitianOperator::identity(2)).unwrap();
        assert!(v.coefficients.iter().all(|z| z.norm() < 1e-15));
        assert!((v.identity_component - c(1.0, 0.0)).norm() < 1e-15);
        assert!(b.vectorize(&HermitianOperator::identity(4)).is_err());
    }

    #[test]
    fn parseval_and_round_trip() {
        let b = build_pauli_basis(2).unwrap();
        let mut rng = sample::stream(3, 0);
        let a = sample::hermitian(4, 1.0, &mut rng);
        let v = b.vectorize(&a).unwrap();
        let back = b.devectorize(&v).unwrap();
        let rebuilt = back.matrix() + ComplexMatrix::identity(4, 4) * v.identity_component;
        assert!(crate::operator::max_abs(&(rebuilt - a.matrix())) < 1e-12);
        let t = a.traceless();
        let s: f64 = b.vectorize(&t).unwrap().coefficients.iter().map(|z| z.norm_sqr()).sum();
        assert!((s - hs_norm(&t).powi(2)).abs() < 1e-10);
    }

    #[test]
    fn omega_examples() {
        let b = Arc::new(build_pauli_basis(1).unwrap());
        let flat = MetricSpec::flat(b.clone());
        let a = sigma_z().scale(0.5f64.sqrt());
        assert!((omega_inner(&a, &a, &flat).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((omega_norm_raw(&a, &flat).unwrap() - 1.0).abs() < 1e-14);
        let m = MetricSpec::new(b, vec![1.0, 1.0, 4.0]).unwrap();
        assert!((omega_norm_raw(&sigma_x(), &m).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn penalty_metric_examples() {
        let m = build_penalty_metric(2, 9.0).unwrap();
        assert!(m.weights().iter().all(|&w| w == 1.0));
        let m = build_penalty_metric(3, 9.0).unwrap();
        assert!(m.weights()[..36].iter().all(|&w| w == 1.0));
        assert!(m.weights()[36..].iter().all(|&w| w == 9.0));
        assert_eq!(build_penalty_metric(1, 5.0).unwrap().weights(), &[1.0, 1.0, 1.0]);
        assert!(matches!(build_penalty_metric(2, 0.5), Err(Error::InvalidPenalty(_))));
    }

    #[test]
    fn weights_below_one_rejected() {
        let b = Arc::new(build_pauli_basis(1).unwrap());
        assert!(MetricSpec::new(b.clone(), vec![1.0, 0.5, 1.0]).is_err());
        assert!(MetricSpec::new(b, vec![1.0, 1.0]).is_err());
    }
}
