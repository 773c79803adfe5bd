//! Algebraic probability on matrix algebras and circuits of two-level gates.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{
    c, hermitian_eig, max_abs, ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator,
    C64,
};

/// Observable paired with a state.
#[derive(Clone, Debug)]
pub struct RandomVariable {
    observable: HermitianOperator,
    state: DensityOperator,
}

impl RandomVariable {
    pub fn new(observable: HermitianOperator, state: DensityOperator) -> Result<Self> {
        if observable.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: observable.dim(),
                found: state.dim(),
            });
        }
        Ok(Self { observable, state })
    }

    pub fn observable(&self) -> &HermitianOperator {
        &self.observable
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }
}

/// Events `{A = x}` as clustered eigenprojectors.
#[derive(Clone, Debug)]
pub struct SpectralEvents {
    pub outcomes: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    pub degeneracy_tol: f64,
}

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Eigenvalues closer than `tol * max(spectral range, 1)` share an outcome.
pub fn spectral_events(a: &HermitianOperator, tol: f64) -> Result<SpectralEvents> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("degeneracy tolerance {tol} must be > 0")));
    }
    let spec = hermitian_eig(a)?;
    let vals = &spec.values;
    let vecs = spec.vectors.matrix();
    let n = vals.len();
    let range = vals[n - 1] - vals[0];
    let gap = tol * range.max(1.0);
    let mut outcomes = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || vals[k] - vals[k - 1] > gap {
            let mut p = ComplexMatrix::zeros(n, n);
            for j in start..k {
                let v = vecs.column(j);
                p += &v * v.adjoint();
            }
            outcomes.push(vals[start..k].iter().sum::<f64>() / (k - start) as f64);
            projectors.push(p);
            start = k;
        }
    }
    Ok(SpectralEvents {
        outcomes,
        projectors,
        degeneracy_tol: tol,
    })
}

/// `P(A = x) = Tr{rho P_x}` for every outcome `x`.
pub fn law(rv: &RandomVariable, tol: f64) -> Result<Vec<(f64, f64)>> {
    let events = spectral_events(&rv.observable, tol)?;
    Ok(events
        .outcomes
        .iter()
        .zip(&events.projectors)
        .map(|(x, p)| (*x, (rv.state.matrix() * p).trace().re))
        .collect())
}

/// `SU(2)` block embedded at rows and columns `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelGate {
    a: usize,
    b: usize,
    /// Row-major `[[u00, u01], [u10, u11]]`.
    block: [C64; 4],
}

const GATE_TOL: f64 = 1e-10;

impl TwoLevelGate {
    pub fn new(a: usize, b: usize, block: [C64; 4]) -> Result<Self> {
        if a >= b {
            return Err(Error::IndexOutOfRange { a, b, dim: b });
        }
        let m = ComplexMatrix::from_row_slice(2, 2, &block);
        UnitaryOperator::new(m)?;
        let det = block[0] * block[3] - block[1] * block[2];
        if (det - c(1.0, 0.0)).norm() > GATE_TOL {
            return Err(Error::NotSpecialUnitary { re: det.re, im: det.im });
        }
        Ok(Self { a, b, block })
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn block(&self) -> &[C64; 4] {
        &self.block
    }

    pub fn adjoint(&self) -> Self {
        let [u00, u01, u10, u11] = self.block;
        Self {
            a: self.a,
            b: self.b,
            block: [u00.conj(), u10.conj(), u01.conj(), u11.conj()],
        }
    }

    pub fn embed(&self, dim: usize) -> Result<ComplexMatrix> {
        if self.b >= dim {
            return Err(Error::IndexOutOfRange {
                a: self.a,
                b: self.b,
                dim,
            });
        }
        let mut m = ComplexMatrix::identity(dim, dim);
        m[(self.a, self.a)] = self.block[0];
        m[(self.a, self.b)] = self.block[1];
        m[(self.b, self.a)] = self.block[2];
        m[(self.b, self.b)] = self.block[3];
        Ok(m)
    }

    fn is_identity(&self) -> bool {
        let id = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        self.block.iter().zip(&id).all(|(x, y)| (x - y).norm() <= GATE_TOL)
    }

    /// True when `other * self = I`.
    fn cancels(&self, other: &Self) -> bool {
        let inv = self.adjoint();
        self.a == other.a
            && self.b == other.b
            && inv.block.iter().zip(&other.block).all(|(x, y)| (x - y).norm() <= GATE_TOL)
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    a: usize,
    b: usize,
    block: [[f64; 2]; 4],
}

impl Serialize for TwoLevelGate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GateRecord {
            a: self.a,
            b: self.b,
            block: self.block.map(|z| [z.re, z.im]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwoLevelGate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GateRecord::deserialize(d)?;
        TwoLevelGate::new(r.a, r.b, r.block.map(|[re, im]| c(re, im))).map_err(serde::de::Error::custom)
    }
}

/// Gates `[g_1, ..., g_l]` realizing `U = g_l ... g_1`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct TwoLevelCircuit {
    pub gates: Vec<TwoLevelGate>,
}

impl TwoLevelCircuit {
    pub fn new(gates: Vec<TwoLevelGate>) -> Self {
        Self { gates }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Drops identity gates and adjacent inverse pairs until none remain.
    pub fn canceled(&self) -> Self {
        let mut out: Vec<TwoLevelGate> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            if g.is_identity() {
                continue;
            }
            match out.last() {
                Some(prev) if prev.cancels(g) => {
                    out.pop();
                }
                _ => out.push(g.clone()),
            }
        }
        Self { gates: out }
    }
}

/// Ordered product `g_l ... g_1`.
pub fn reconstruct(circuit: &TwoLevelCircuit, dim: usize) -> Result<UnitaryOperator> {
    let mut u = ComplexMatrix::identity(dim, dim);
    for g in &circuit.gates {
        u = g.embed(dim)? * u;
    }
    Ok(UnitaryOperator::from_computed(u))
}

/// Gate count after cancellation.
pub fn algebraic_complexity(circuit: &TwoLevelCircuit) -> usize {
    circuit.canceled().len()
}

/// Column-by-column elimination into at most `N(N-1)/2` two-level `SU(2)` gates.
pub fn decompose_two_level(u: &UnitaryOperator) -> Result<TwoLevelCircuit> {
    let det = u.determinant();
    if (det - c(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::NotSpecialUnitary { re: det.re, im: det.im });
    }
    let n = u.dim();
    let mut w = u.matrix().clone();
    let mut eliminators: Vec<TwoLevelGate> = Vec::new();
    for j in 0..n.saturating_sub(1) {
        for i in j + 1..n {
            let a = w[(j, j)];
            let b = w[(i, j)];
            let last = i == n - 1;
            if b.norm() <= 1e-14 && !(last && (a - c(1.0, 0.0)).norm() > 1e-14) {
                continue;
            }
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let block = [a.conj() / r, b.conj() / r, -b / r, a / r];
            let g = TwoLevelGate { a: j, b: i, block };
            w = g.embed(n)? * w;
            eliminators.push(g);
        }
    }
    let residual = max_abs(&(w - ComplexMatrix::identity(n, n)));
    if residual > 1e-8 {
        return Err(Error::Numerical {
            operation: "decompose_two_level",
            detail: format!("elimination residual {residual:e}"),
        });
    }
    let gates = eliminators.iter().rev().map(TwoLevelGate::adjoint).collect();
    Ok(TwoLevelCircuit::new(gates).canceled())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{sigma_x, sigma_z};
    use crate::sample;

    #[test]
    fn events_examples() {
        let e = spectral_events(&sigma_z(), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(e.outcomes, vec![-1.0, 1.0]);
        let id = spectral_events(&HermitianOperator::identity(2), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(id.outcomes.len(), 1);
        assert!(max_abs(&(&id.projectors[0] - ComplexMatrix::identity(2, 2))) < 1e-12);
        let tol = 1e-6;
        let d = HermitianOperator::from_real_diagonal(&[1.0, 1.0 + tol / 2.0, 3.0]);
        assert_eq!(spectral_events(&d, tol).unwrap().outcomes.len(), 2);
        assert!(spectral_events(&d, 0.0).is_err());
    }

    #[test]
    fn law_examples() {
        let rv = RandomVariable::new(sigma_z(), DensityOperator::basis_state(2, 0).unwrap()).unwrap();
        let l = law(&rv, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((l[0].1).abs() < 1e-12 && (l[1].1 - 1.0).abs() < 1e-12);
        let rv = RandomVariable::new(sigma_x(), DensityOperator::maximally_mixed(2)).unwrap();
        let l = law(&rv, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((l[0].1 - 0.5).abs() < 1e-12 && (l[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        assert!(decompose_two_level(&UnitaryOperator::identity(4)).unwrap().is_empty());
        let mut rng = sample::stream(2, 0);
        let u2 = sample::special_unitary(2, &mut rng);
        assert_eq!(decompose_two_level(&u2).unwrap().len(), 1);
        for n in [4, 8] {
            let u = sample::special_unitary(n, &mut rng);
            let circ = decompose_two_level(&u).unwrap();
            assert!(circ.len() <= n * (n - 1) / 2);
            let back = reconstruct(&circ, n).unwrap();
            assert!(max_abs(&(back.matrix() - u.matrix())) < 1e-9);
        }
        let phase = UnitaryOperator::new(ComplexMatrix::identity(2, 2) * c(0.0, 1.0)).unwrap();
        assert!(decompose_two_level(&phase).is_err());
    }

    #[test]
    fn cancellation_and_serde() {
        let mut rng = sample::stream(3, 0);
        let u = sample::special_unitary(2, &mut rng);
        let m = u.matrix();
        let g = TwoLevelGate::new(0, 1, [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]).unwrap();
        let circ = TwoLevelCircuit::new(vec![g.clone(), g.adjoint()]);
        assert_eq!(algebraic_complexity(&circ), 0);
        assert!(max_abs(&(reconstruct(&circ, 3).unwrap().matrix() - ComplexMatrix::identity(3, 3))) < 1e-12);
        assert_eq!(algebraic_complexity(&TwoLevelCircuit::default()), 0);
        let text = serde_json::to_string(&TwoLevelCircuit::new(vec![g.clone()])).unwrap();
        let back: TwoLevelCircuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back.gates[0].indices(), (0, 1));
        assert!(TwoLevelGate::new(1, 0, *g.block()).is_err());
        assert!(reconstruct(&TwoLevelCircuit::new(vec![TwoLevelGate::new(0, 3, *g.block()).unwrap()]), 3).is_err());
    }

    #[test]
    fn embedding_respects_adjoint() {
        let mut rng = sample::stream(4, 0);
        let u = sample::special_unitary(2, &mut rng);
        let m = u.matrix();
        let g = TwoLevelGate::new(1, 3, [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]).unwrap();
        let lhs = g.adjoint().embed(5).unwrap();
        let rhs = g.embed(5).unwrap().adjoint();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }
}
