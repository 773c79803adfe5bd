//! Random Schrodinger equation ensembles under matched bounded noise and
//! Gaussian Pauli noise.
//!
//! `cargo run --release --example rode_noise`

use channelgeo::basis::build_penalty_metric;
use channelgeo::complexity::PiecewiseConstantPath;
use channelgeo::operator::{sigma_x, sigma_z, tensor, HermitianOperator};
use channelgeo::rode::{ensemble_mean, fluctuation_report, NoiseModel};

fn main() -> channelgeo::Result<()> {
    let xx = HermitianOperator::new(tensor(sigma_x().matrix(), sigma_x().matrix()))?;
    let zi = HermitianOperator::new(tensor(sigma_z().matrix(), &nalgebra::DMatrix::identity(2, 2)))?;
    let path = PiecewiseConstantPath::new(4, vec![(xx.clone(), 0.5), (zi.add(&xx.scale(0.3))?, 0.5)])?;

    let matched = NoiseModel::bounded_matched(build_penalty_metric(2, 2.0)?, 1.0 / 32.0)?;
    let (rep, _) = fluctuation_report(&path, &matched, 200, 11)?;
    println!(
        "matched noise: omega length {:.4}, max noise integral {:.4}, bound violations {}, holds {}",
        rep.omega_path_length,
        rep.max_noise_integral,
        rep.distance_violations.len(),
        rep.holds()
    );

    let h = sigma_x().scale(0.7).add(&sigma_z().scale(0.3))?;
    let single = PiecewiseConstantPath::constant(h, 1.0)?;
    let gauss = NoiseModel::gaussian_uniform(1, 1e-3, 1.0 / 16.0)?;
    for m in [10, 100, 1000, 10_000] {
        let ens = ensemble_mean(&single, &gauss, m, 3)?;
        println!("M = {m:>5}: ||mean - noiseless|| = {:.3e}", ens.mean_deviation());
    }
    Ok(())
}
