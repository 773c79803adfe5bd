//! Two-level decomposition of the three-qubit Fourier transform and the law
//! of an observable.
//!
//! `cargo run --release --example decomposition`

use channelgeo::algebraic::{algebraic_complexity, decompose_two_level, law, reconstruct, RandomVariable, DEFAULT_DEGENERACY_TOL};
use channelgeo::operator::{max_abs, sigma_z, DensityOperator, UnitaryOperator, C64};

fn main() -> channelgeo::Result<()> {
    let n = 8;
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let qft = nalgebra::DMatrix::from_fn(n, n, |a, b| w.powu((a * b) as u32) / (n as f64).sqrt());
    let det = qft.determinant();
    let u = UnitaryOperator::new(qft * C64::from_polar(1.0, -det.arg() / n as f64))?;
    let circuit = decompose_two_level(&u)?;
    let err = max_abs(&(reconstruct(&circuit, n)?.matrix() - u.matrix()));
    println!(
        "QFT_8: {} gates (bound {}), {} after cancellation, reconstruction error {err:.1e}",
        circuit.len(),
        n * (n - 1) / 2,
        algebraic_complexity(&circuit)
    );
    for g in circuit.gates.iter().take(4) {
        println!("  gate on levels {:?}", g.indices());
    }

    let rho = DensityOperator::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)])?;
    let rv = RandomVariable::new(sigma_z(), rho)?;
    println!("law of sigma_z: {:?}", law(&rv, DEFAULT_DEGENERACY_TOL)?);
    Ok(())
}
