//! Closed-form complexity, a penalty metric, and a geodesic length estimate.
//!
//! `cargo run --release --example geodesic_complexity`

use channelgeo::basis::build_penalty_metric;
use channelgeo::complexity::{
    estimate_cc_distance, flat_distance, g_hs, geometric_complexity_const, GeodesicOptions, Metric,
};
use channelgeo::operator::{matrix_exp_unitary, sigma_x, sigma_z, tensor, HermitianOperator};

fn main() -> channelgeo::Result<()> {
    let h = sigma_z();
    println!("G_hs(exp(-i sigma_z)) = {:.6} (sqrt(2/3) = {:.6})", g_hs(&h, 1.0)?, (2.0f64 / 3.0).sqrt());

    // three-qubit XXX term costs q times more under the penalty metric
    let xxx = tensor(&tensor(sigma_x().matrix(), sigma_x().matrix()), sigma_x().matrix());
    let zii = tensor(&tensor(sigma_z().matrix(), &nalgebra::DMatrix::identity(2, 2)), &nalgebra::DMatrix::identity(2, 2));
    let h3 = HermitianOperator::new(xxx * nalgebra::Complex::new(0.3, 0.0) + zii)?;
    for q in [1.0, 4.0, 16.0] {
        let metric = Metric::Weighted(build_penalty_metric(3, q)?);
        println!("q = {q:>4}: G_omega = {:.6}", geometric_complexity_const(&h3, 1.0, &metric)?);
    }

    // a piecewise-constant search recovers the principal geodesic under the flat metric
    let target = matrix_exp_unitary(&sigma_x().add(&sigma_z().scale(0.5))?, 1.2)?;
    let start = channelgeo::operator::UnitaryOperator::identity(2);
    let opts = GeodesicOptions { segments: 4, restarts: 4, seed: 7, ..Default::default() };
    let est = estimate_cc_distance(&start, &target, &Metric::HilbertSchmidt, &opts)?;
    println!(
        "principal distance {:.6}, searched length {:.6}, endpoint error {:.1e}",
        flat_distance(&start, &target)?,
        est.length,
        est.endpoint_error
    );
    Ok(())
}
