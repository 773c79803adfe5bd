//! Coherence measures, cohering power of the Hadamard gate, the exact rate
//! and the decohering-power bound.
//!
//! `cargo run --release --example coherence`

use channelgeo::coherence::{
    coherence_rate_bound, coherence_rate_exact, cohering_power, rel_entropy_coherence, verify_decohering_bound,
    CoheringOptions, DephasingChannel,
};
use channelgeo::operator::{matrix_exp_unitary, sigma_x, sigma_y, sigma_z, DensityOperator};

fn main() -> channelgeo::Result<()> {
    let e = DephasingChannel::computational(2);
    let hadamard_gen = sigma_x().add(&sigma_z())?.scale(std::f64::consts::FRAC_1_SQRT_2);
    // exp(-i pi/2 H) = -i H for an involution H
    let u = matrix_exp_unitary(&hadamard_gen, std::f64::consts::FRAC_PI_2)?;
    let power = cohering_power(&u, &e, &CoheringOptions::default())?;
    println!("cohering power of Hadamard: {:.6} (1/2, attained by |0>)", power.value);

    let plus = DensityOperator::pure(&[channelgeo::operator::C64::new(0.5f64.sqrt(), 0.0); 2])?;
    println!("C(|+>) = {:.6}", rel_entropy_coherence(&plus, &e)?);

    let rho = DensityOperator::new(
        nalgebra::DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.25]).map(|x| nalgebra::Complex::new(x, 0.0)),
    )?;
    let rate = coherence_rate_exact(&sigma_y(), &rho, &e)?;
    let a = coherence_rate_bound(&rho, &e)?;
    println!(
        "rate {rate:.4}, A = {a:.4}, |R| / (A ||H||) = {:.4}",
        rate.abs() / (a * channelgeo::operator::hs_norm(&sigma_y()))
    );

    let rep = verify_decohering_bound(&hadamard_gen, 1.0, &e, &CoheringOptions::default())?;
    println!("decohering bound: {:.4} <= {:.4} ({})", rep.lhs, rep.rhs, rep.holds);
    Ok(())
}
