//! A qubit coupled to a qubit environment: Kraus operators, channel
//! complexity and the noise-complexity bounds.
//!
//! `cargo run --release --example open_channel`

use channelgeo::channel::{
    apply_channel, channel_complexity_const, kraus_operators, noise_complexity, noise_complexity_bounds,
    noiseless_complexity, ChannelSpec,
};
use channelgeo::complexity::GeodesicOptions;
use channelgeo::operator::{sigma_x, sigma_z, tensor, DensityOperator, HermitianOperator};

fn main() -> channelgeo::Result<()> {
    let h_s = sigma_z().scale(0.5).add(&sigma_x())?;
    let h_e = sigma_z();
    for g in [0.0, 0.25, 0.5, 1.0] {
        let h_i = HermitianOperator::new(tensor(sigma_z().matrix(), sigma_x().matrix()))?.scale(g);
        let spec = ChannelSpec::with_computational_env(h_s.clone(), h_i, h_e.clone(), vec![0.6, 0.4])?;
        let t = 1.0;
        let kraus = kraus_operators(&spec, t)?;
        let out = apply_channel(&spec, t, &DensityOperator::basis_state(2, 0)?)?;
        let bounds = noise_complexity_bounds(&spec, t, &GeodesicOptions { segments: 2, restarts: 4, ..Default::default() })?;
        println!(
            "g = {g:.2}: G_channel {:.4} <= G_noiseless {:.4}, N_hs {:.4}, lower {:.4}, upper {:?}, Kraus defect {:.1e}, <0|out|0> {:.4}",
            channel_complexity_const(&spec, t)?,
            noiseless_complexity(&spec, t)?,
            noise_complexity(&spec, t)?,
            bounds.lower,
            bounds.upper.map(|u| (u * 1e4).round() / 1e4),
            kraus.completeness_defect(),
            out.matrix()[(0, 0)].re
        );
    }
    Ok(())
}
