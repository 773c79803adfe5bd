//! Exact channel complexity against its small-coupling expansion.
//!
//! `cargo run --release --example perturbative`

use channelgeo::channel::perturbative_example;
use channelgeo::operator::HermitianOperator;

fn main() -> channelgeo::Result<()> {
    let h = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
    let a = HermitianOperator::identity(2);
    println!("{:>8} {:>12} {:>12} {:>11} {:>9}", "eps", "exact", "expansion", "error", "err/eps");
    let mut prev: Option<f64> = None;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let r = perturbative_example(&h, &a, &[0.0, 1.0], &[0.5, 0.5], eps, 1.0)?;
        let err = (r.exact - r.perturbative).abs();
        println!("{eps:>8.0e} {:>12.8} {:>12.8} {err:>11.3e} {:>9.4}", r.exact, r.perturbative, err / eps);
        if let Some(p) = prev {
            println!("{:>48} decade ratio {:.2}", "", p / err);
        }
        prev = Some(err);
    }
    Ok(())
}
