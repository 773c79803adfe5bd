//! Random operators for sampling campaigns and optimizer initialization.
//!
//! Every campaign derives an independent ChaCha stream from `(seed, index)`
//! so results do not depend on thread scheduling.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator, C64};

/// Independent RNG stream for task `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    c(normal(rng), normal(rng))
}

pub fn ginibre(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| complex_normal(rng))
}

/// GUE-like Hermitian matrix scaled by `scale`.
pub fn hermitian(dim: usize, scale: f64, rng: &mut impl Rng) -> HermitianOperator {
    let g = ginibre(dim, rng);
    HermitianOperator::from_computed((&g + g.adjoint()).scale(0.5 * scale))
}

pub fn traceless_hermitian(dim: usize, scale: f64, rng: &mut impl Rng) -> HermitianOperator {
    hermitian(dim, scale, rng).traceless()
}

/// Positive semidefinite Hermitian matrix `G G^dagger * scale`.
pub fn psd(dim: usize, scale: f64, rng: &mut impl Rng) -> HermitianOperator {
    let g = ginibre(dim, rng);
    HermitianOperator::from_computed((&g * g.adjoint()).scale(scale))
}

/// Mixed state `L L^dagger / Tr{L L^dagger}` with Ginibre `L`.
pub fn density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ginibre(dim, rng);
    density_from_factor(&g)
}

pub fn density_from_factor(l: &ComplexMatrix) -> DensityOperator {
    let m = l * l.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_computed(m.unscale(tr))
}

pub fn pure_state(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let psi: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
    DensityOperator::pure(&psi).expect("gaussian vector is nonzero")
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryOperator {
    let g = ginibre(dim, rng);
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        cols.push(v.unscale(n));
    }
    UnitaryOperator::from_computed(ComplexMatrix::from_columns(&cols))
}

/// Haar-random element of SU(N): a Haar unitary with its determinant phase removed.
pub fn special_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryOperator {
    let u = haar_unitary(dim, rng);
    let det = u.determinant();
    let phase = C64::from_polar(1.0, -det.arg() / dim as f64);
    UnitaryOperator::from_computed(u.into_matrix() * phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_eig, unitarity_defect};

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: f64 = normal(&mut stream(7, 0));
        let b: f64 = normal(&mut stream(7, 0));
        let d: f64 = normal(&mut stream(7, 1));
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn sampled_objects_satisfy_invariants() {
        let mut rng = stream(1, 0);
        for dim in [2, 3, 8] {
            let rho = density(dim, &mut rng);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(hermitian_eig(&rho.as_hermitian()).unwrap().values[0] > -1e-12);
            let u = special_unitary(dim, &mut rng);
            assert!(unitarity_defect(u.matrix()) < 1e-12);
            let det = u.determinant();
            assert!((det - c(1.0, 0.0)).norm() < 1e-10);
        }
    }
}
