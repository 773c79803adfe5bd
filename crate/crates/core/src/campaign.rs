//! Seeded sampling campaigns for the bound and identity checks.
//!
//! Each campaign returns aggregated [`BoundCheck`] records. A record stores the
//! worst excess `max_i (lhs_i - rhs_i)` as `lhs` and the allowed slack as `rhs`,
//! so `holds` is `lhs <= rhs` and `violations` counts failing samples.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::{decompose_two_level, law, reconstruct, RandomVariable, DEFAULT_DEGENERACY_TOL};
use crate::basis::{build_pauli_basis, build_penalty_metric};
use crate::channel::{
    apply_channel, apply_channel_joint, channel_complexity_const, kraus_operators, noise_complexity,
    noise_complexity_bounds, noiseless_complexity, perturbative_example, ChannelSpec,
};
use crate::coherence::{
    coherence_rate_bound, coherence_rate_exact, rel_entropy_coherence, verify_decohering_bound,
    CoheringOptions, DephasingChannel,
};
use crate::complexity::{check_cost_chain, g_hs, path_length, GeodesicOptions, Metric, PiecewiseConstantPath};
use crate::error::Result;
use crate::operator::{
    hermitian_eig, matrix_abs, matrix_exp_unitary, max_abs, sqrt_abs_diff, HermitianOperator,
    UnitaryOperator,
};
use crate::rode::{distance_unitaries, ensemble_mean, fluctuation_report, NoiseModel};
use crate::sample;

/// One bound or identity check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub samples: usize,
    pub violations: usize,
}

impl BoundCheck {
    /// Single inequality `lhs <= rhs + slack`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let holds = lhs <= rhs + slack;
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds,
            samples: 1,
            violations: usize::from(!holds),
        }
    }
}

/// Accumulates `lhs_i - rhs_i` over a campaign.
struct Tally {
    name: &'static str,
    slack: f64,
    worst: f64,
    samples: usize,
    violations: usize,
}

impl Tally {
    fn new(name: &'static str, slack: f64) -> Self {
        Self {
            name,
            slack,
            worst: f64::NEG_INFINITY,
            samples: 0,
            violations: 0,
        }
    }

    fn push(&mut self, lhs: f64, rhs: f64) {
        let excess = lhs - rhs;
        // NaN counts as a violation
        if !(excess <= self.slack) {
            self.violations += 1;
        }
        self.worst = if excess.is_nan() { f64::NAN } else { self.worst.max(excess) };
        self.samples += 1;
    }

    fn finish(self) -> BoundCheck {
        BoundCheck {
            name: self.name.to_string(),
            lhs: if self.samples == 0 { 0.0 } else { self.worst },
            rhs: self.slack,
            holds: self.violations == 0,
            samples: self.samples,
            violations: self.violations,
        }
    }
}

/// Sample counts relative to the full campaign.
#[derive(Clone, Copy, Debug)]
pub struct CampaignSize {
    pub scale: f64,
}

impl CampaignSize {
    pub const FULL: Self = Self { scale: 1.0 };

    pub fn n(&self, full: usize) -> usize {
        ((full as f64 * self.scale).round() as usize).clamp(2.min(full), full)
    }
}

fn rng(seed: u64, criterion: u64, i: usize) -> rand_chacha::ChaCha8Rng {
    sample::stream(seed, (criterion << 32) | i as u64)
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn random_channel_spec(rng: &mut impl Rng, d_s: usize, d_e: usize) -> Result<ChannelSpec> {
    let h_s = sample::hermitian(d_s, 1.0, rng);
    let h_i = sample::hermitian(d_s * d_e, 0.5, rng);
    let h_e = sample::hermitian(d_e, 1.0, rng);
    let raw: Vec<f64> = (0..d_e).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let probs = raw.iter().map(|p| p / total).collect();
    ChannelSpec::new(h_s, h_i, h_e, probs, sample::haar_unitary(d_e, rng))
}

fn par_samples<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

/// Closed form against the length of a randomly split constant path and
/// against the spectral formula `t sqrt(sum lambda^2) / sqrt(d^2 - 1)`.
pub fn closed_form(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(500), |i| {
        let mut r = rng(seed, 1, i);
        let d = [2, 4, 8][i % 3];
        let h = sample::hermitian(d, 1.0, &mut r);
        let t = uniform(&mut r, 0.0, 3.0);
        let g = g_hs(&h, t)?;
        let f1 = uniform(&mut r, 0.1, 0.9);
        let f2 = uniform(&mut r, 0.1, 0.9);
        let p = PiecewiseConstantPath::constant(h.clone(), t)?;
        let split = if t > 0.0 { p.split_segment(0, f1)?.split_segment(1, f2)? } else { p };
        let len = path_length(&split, &Metric::HilbertSchmidt)?;
        let eig = hermitian_eig(&h)?;
        let spectral = t * eig.values.iter().map(|x| x * x).sum::<f64>().sqrt() / ((d * d - 1) as f64).sqrt();
        Ok(((g - len).abs(), (g - spectral).abs()))
    })?;
    let mut a = Tally::new("closed_form_vs_path_length", 1e-10);
    let mut b = Tally::new("closed_form_vs_spectrum", 1e-10);
    for (x, y) in rows {
        a.push(x, 0.0);
        b.push(y, 0.0);
    }
    Ok(vec![a.finish(), b.finish()])
}

/// `G(exp(-it|H|)) = G(exp(-itH))`.
pub fn abs_invariance(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(300), |i| {
        let mut r = rng(seed, 2, i);
        let d = [2, 3, 4, 8][i % 4];
        let h = sample::hermitian(d, 1.0, &mut r);
        let t = uniform(&mut r, 0.0, 3.0);
        Ok((g_hs(&matrix_abs(&h)?, t)? - g_hs(&h, t)?).abs())
    })?;
    let mut a = Tally::new("abs_generator_equality", 1e-12);
    rows.into_iter().for_each(|x| a.push(x, 0.0));
    Ok(vec![a.finish()])
}

/// `G(exp(-it(A+B))) <= G(exp(-itA)) + G(exp(-itB))`.
pub fn subadditivity(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(300), |i| {
        let mut r = rng(seed, 3, i);
        let d = [2, 4, 8][i % 3];
        let a = sample::hermitian(d, 1.0, &mut r);
        let b = sample::hermitian(d, uniform(&mut r, 0.1, 2.0), &mut r);
        let t = uniform(&mut r, 0.0, 3.0);
        Ok((g_hs(&a.add(&b)?, t)?, g_hs(&a, t)? + g_hs(&b, t)?))
    })?;
    let mut a = Tally::new("subadditivity", 1e-12);
    rows.into_iter().for_each(|(l, r)| a.push(l, r));
    Ok(vec![a.finish()])
}

/// Split of the joint complexity and the loss of complexity under noise.
pub fn channel_split(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(200), |i| {
        let mut r = rng(seed, 4, i);
        let spec = random_channel_spec(&mut r, 2, 2)?;
        let t = uniform(&mut r, 0.1, 3.0);
        let h_tot = spec.h_tot();
        let root = sqrt_abs_diff(&h_tot, &spec.h_s_embedded())?;
        let noiseless = noiseless_complexity(&spec, t)?;
        Ok((
            g_hs(&h_tot, t)?,
            noiseless + g_hs(&root, t)?,
            channel_complexity_const(&spec, t)?,
            noiseless,
        ))
    })?;
    let mut split = Tally::new("joint_complexity_split", 1e-9);
    let mut loss = Tally::new("channel_complexity_le_noiseless", 1e-9);
    for (a, b, c, d) in rows {
        split.push(a, b);
        loss.push(c, d);
    }
    Ok(vec![split.finish(), loss.finish()])
}

/// Decoupled and purely interacting limits.
pub fn channel_limits(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(100), |i| {
        let mut r = rng(seed, 5, i);
        let d_s = [2, 3][i % 2];
        let d_e = [2, 3, 4][i % 3];
        let t = uniform(&mut r, 0.1, 3.0);
        let h_s = sample::hermitian(d_s, 1.0, &mut r);
        let probs = vec![1.0 / d_e as f64; d_e];
        let free = ChannelSpec::with_computational_env(
            h_s,
            HermitianOperator::zeros(d_s * d_e),
            HermitianOperator::zeros(d_e),
            probs.clone(),
        )?;
        let a = (channel_complexity_const(&free, t)? - noiseless_complexity(&free, t)?).abs();
        let only_i = ChannelSpec::with_computational_env(
            HermitianOperator::zeros(d_s),
            sample::hermitian(d_s * d_e, 1.0, &mut r),
            HermitianOperator::zeros(d_e),
            probs,
        )?;
        Ok((a, channel_complexity_const(&only_i, t)?.abs()))
    })?;
    let mut a = Tally::new("decoupled_limit_equality", 1e-10);
    let mut b = Tally::new("interaction_only_limit_zero", 1e-10);
    for (x, y) in rows {
        a.push(x, 0.0);
        b.push(y, 0.0);
    }
    Ok(vec![a.finish(), b.finish()])
}

/// Geodesic options for the distance term of the noise upper bound.
pub fn sandwich_geodesic_options(seed: u64) -> GeodesicOptions {
    GeodesicOptions {
        segments: 2,
        restarts: 2,
        seed,
        max_sweeps: 20,
        max_penalty_doublings: 8,
        ..Default::default()
    }
}

/// Lower side of the noise sandwich and the square-root lemma.
pub fn noise_lower_and_lemma(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let lower = par_samples(size.n(50), |i| {
        let mut r = rng(seed, 6, i);
        let spec = random_channel_spec(&mut r, 2, 2)?;
        let h_tot = spec.h_tot();
        let h_s = spec.h_s_embedded();
        let root = sqrt_abs_diff(&h_tot, &h_s)?;
        let lower = g_hs(&root.add(&matrix_abs(&h_s)?)?, 1.0)? - g_hs(&h_tot, 1.0)?;
        Ok((lower, noise_complexity(&spec, 1.0)?))
    })?;
    let lemma = par_samples(size.n(300), |i| {
        let mut r = rng(seed, 6, 10_000 + i);
        let d = [2, 3, 4, 8][i % 4];
        let a = sample::hermitian(d, 1.0, &mut r);
        let b = sample::hermitian(d, uniform(&mut r, 0.1, 2.0), &mut r);
        let t = uniform(&mut r, 0.1, 3.0);
        Ok(((g_hs(&a, t)? - g_hs(&b, t)?).abs(), g_hs(&sqrt_abs_diff(&a, &b)?, t)?))
    })?;
    let mut lo = Tally::new("noise_lower_bound", 1e-8);
    lower.into_iter().for_each(|(l, n)| lo.push(l, n));
    let mut le = Tally::new("sqrt_difference_lemma", 1e-12);
    lemma.into_iter().for_each(|(l, r)| le.push(l, r));
    Ok(vec![lo.finish(), le.finish()])
}

/// Upper side of the noise sandwich through the estimated distance.
pub fn noise_upper(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(50), |i| {
        let mut r = rng(seed, 6, i);
        let spec = random_channel_spec(&mut r, 2, 2)?;
        let bounds = noise_complexity_bounds(&spec, 1.0, &sandwich_geodesic_options(seed))?;
        Ok((noise_complexity(&spec, 1.0)?, bounds.upper))
    })?;
    let mut up = Tally::new("noise_upper_bound", 1e-8);
    let mut missing = 0;
    for (n, upper) in rows {
        match upper {
            Some(u) => up.push(n, u),
            None => missing += 1,
        }
    }
    let mut checks = vec![up.finish()];
    checks.push(BoundCheck::le("noise_upper_distance_available", missing as f64, 0.0, 0.0));
    Ok(checks)
}

/// Rate formula against finite differences, and the commutator bound.
pub fn coherence_rate(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rates = par_samples(size.n(100), |i| {
        let mut r = rng(seed, 7, i);
        let d = [2, 3, 4][i % 3];
        let h = sample::hermitian(d, 1.0, &mut r);
        let rho = sample::density(d, &mut r);
        let e = DephasingChannel::from_basis(&sample::haar_unitary(d, &mut r));
        let step = 1e-5;
        let at = |t: f64| -> Result<f64> {
            let u = matrix_exp_unitary(&h, t)?;
            rel_entropy_coherence(&u.conjugate(&rho)?, &e)
        };
        let fd = (at(step)? - at(-step)?) / (2.0 * step);
        let exact = coherence_rate_exact(&h, &rho, &e)?;
        let a = coherence_rate_bound(&rho, &e)?;
        Ok(((fd - exact).abs(), exact.abs(), a * crate::operator::hs_norm(&h)))
    })?;
    let bounds = par_samples(size.n(500), |i| {
        let mut r = rng(seed, 7, 10_000 + i);
        let d = [2, 4, 8][i % 3];
        let rho = if i % 2 == 0 { sample::density(d, &mut r) } else { sample::pure_state(d, &mut r) };
        let e = DephasingChannel::from_basis(&sample::haar_unitary(d, &mut r));
        coherence_rate_bound(&rho, &e)
    })?;
    let mut fd = Tally::new("rate_matches_finite_difference", 1e-6);
    // Cauchy-Schwarz on 2i Tr([rho, E(rho)] H) carries the factor 2; the
    // unit-constant form is violated by sampled instances.
    let mut holder = Tally::new("rate_holder_bound_2a", 1e-12);
    for (err, exact, bound) in rates {
        fd.push(err, 0.0);
        holder.push(exact, 2.0 * bound);
    }
    let mut a = Tally::new("commutator_norm_le_sqrt2", 1e-10);
    bounds.into_iter().for_each(|x| a.push(x, 2f64.sqrt()));
    Ok(vec![fd.finish(), holder.finish(), a.finish()])
}

/// Cohering power over `sqrt(2) N` never exceeds the flat complexity.
pub fn decohering_bound(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let restarts = ((32.0 * size.scale).round() as usize).clamp(4, 32);
    let rows = par_samples(size.n(100), |i| {
        let mut r = rng(seed, 8, i);
        let n = 1 + i % 2;
        let d = 1 << n;
        let h = sample::hermitian(d, 1.0, &mut r);
        let t = uniform(&mut r, 0.1, 2.0);
        let opts = CoheringOptions {
            restarts,
            seed: seed.wrapping_add(i as u64),
            max_sweeps: 100,
            ..Default::default()
        };
        let rep = verify_decohering_bound(&h, t, &DephasingChannel::computational(d), &opts)?;
        Ok((rep.lhs, rep.rhs))
    })?;
    let mut a = Tally::new("decohering_power_bound", 1e-9);
    rows.into_iter().for_each(|(l, r)| a.push(l, r));
    Ok(vec![a.finish()])
}

/// `cost_l1 <= N^2 * flat path length`.
pub fn cost_chain(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let bases: Vec<_> = (1..=3).map(build_pauli_basis).collect::<Result<_>>()?;
    let rows = par_samples(size.n(300), |i| {
        let mut r = rng(seed, 9, i);
        let basis = &bases[i % 3];
        let k = 1 + (r.random::<u32>() % 4) as usize;
        let segs = (0..k)
            .map(|_| {
                let h = sample::hermitian(basis.dim(), 1.0, &mut r);
                (h, uniform(&mut r, 0.05, 1.0))
            })
            .collect();
        let p = PiecewiseConstantPath::new(basis.dim(), segs)?;
        let rep = check_cost_chain(&p, basis)?;
        Ok((rep.cost, rep.bound))
    })?;
    let mut a = Tally::new("cost_chain", 0.0);
    rows.into_iter().for_each(|(l, r)| a.push(l, r));
    Ok(vec![a.finish()])
}

/// Errors of the small-coupling expansion on the reference instance.
pub fn perturbative_errors(epsilons: &[f64]) -> Result<Vec<f64>> {
    let h = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
    let a = HermitianOperator::identity(2);
    epsilons
        .iter()
        .map(|&eps| {
            let r = perturbative_example(&h, &a, &[0.0, 1.0], &[0.5, 0.5], eps, 1.0)?;
            Ok((r.exact - r.perturbative).abs())
        })
        .collect()
}

/// Two-point rate and the `10 eps^(3/2)` error constant.
pub fn perturbative_rate() -> Result<Vec<BoundCheck>> {
    let errs = perturbative_errors(&[1e-2, 1e-4])?;
    let ratio = errs[0] / errs[1];
    let mut checks = vec![
        BoundCheck::le("perturbative_rate_ratio_ge_10", 10.0, ratio, 0.0),
        BoundCheck::le("perturbative_rate_ratio_le_1000", ratio, 1000.0, 0.0),
    ];
    checks.push(BoundCheck::le(
        "perturbative_error_le_10_eps_1.5",
        errs[1],
        10.0 * 1e-4f64.powf(1.5),
        0.0,
    ));
    Ok(checks)
}

/// Fluctuation bound, triangle and complexity-difference checks under matched
/// noise, and Monte Carlo shrinkage under Gaussian noise.
pub fn rode_checks(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let mut r = rng(seed, 11, 0);
    let segs = (0..2).map(|_| (sample::traceless_hermitian(4, 1.0, &mut r), 0.5)).collect();
    let path = PiecewiseConstantPath::new(4, segs)?;
    let matched = NoiseModel::bounded_matched(build_penalty_metric(2, 2.0)?, 1.0 / 32.0)?;
    let m = size.n(100);
    let (report, ens) = fluctuation_report(&path, &matched, m, seed)?;

    let mut dist = Tally::new("rode_distance_le_noise_integral", 1e-6);
    let mut tri = Tally::new("rode_triangle", 1e-9);
    let mut diff = Tally::new("rode_complexity_difference", 1e-9);
    let id = UnitaryOperator::identity(4);
    let g0 = distance_unitaries(&id, &ens.noiseless)?;
    let bias = ens.mean_deviation();
    for (rec, u) in ens.records.iter().zip(ens.endpoints()) {
        dist.push(rec.distance, rec.noise_integral);
        tri.push(rec.endpoint_deviation, rec.distance + bias);
        diff.push((g0 - distance_unitaries(&id, u)?).abs(), rec.geodesic_deviation);
    }
    let mut checks = vec![dist.finish(), tri.finish(), diff.finish()];
    checks.push(BoundCheck::le(
        "rode_matched_integral_equals_omega_length",
        f64::from(u8::from(!report.integral_matches)),
        0.0,
        0.0,
    ));

    // shrinkage: noise small enough that the second-order bias stays far
    // below the 1/sqrt(M) fluctuation at M = 10^4
    let mut r = rng(seed, 11, 1);
    let h = sample::traceless_hermitian(2, 1.0, &mut r);
    let path = PiecewiseConstantPath::constant(h, 1.0)?;
    let gauss = NoiseModel::gaussian_uniform(1, 1e-3, 1.0 / 16.0)?;
    let small = ensemble_mean(&path, &gauss, 100, seed)?.mean_deviation();
    let large = ensemble_mean(&path, &gauss, 10_000, seed.wrapping_add(1))?.mean_deviation();
    let factor = small / large;
    checks.push(BoundCheck::le("rode_shrink_factor_ge_3", 3.0, factor, 0.0));
    checks.push(BoundCheck::le("rode_shrink_factor_le_30", factor, 30.0, 0.0));
    Ok(checks)
}

/// Two-level decomposition bounds and law normalization.
pub fn decomposition(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let per_n = size.n(100);
    let rows = par_samples(4 * per_n, |i| {
        let mut r = rng(seed, 12, i);
        let n = [2, 4, 8, 16][i / per_n];
        let u = sample::special_unitary(n, &mut r);
        let circ = decompose_two_level(&u)?;
        let err = max_abs(&(reconstruct(&circ, n)?.matrix() - u.matrix()));
        Ok((circ.len() as f64, (n * (n - 1) / 2) as f64, err))
    })?;
    let laws = par_samples(size.n(200), |i| {
        let mut r = rng(seed, 12, 100_000 + i);
        let d = 2 + i % 7;
        let mut a = sample::hermitian(d, 1.0, &mut r);
        if i % 3 == 0 {
            // force a degenerate spectrum
            let u = sample::haar_unitary(d, &mut r);
            let diag: Vec<f64> = (0..d).map(|k| (k / 2) as f64).collect();
            let dm = HermitianOperator::from_real_diagonal(&diag);
            a = HermitianOperator::new(
                (u.matrix() * dm.matrix() * u.matrix().adjoint() + (u.matrix() * dm.matrix() * u.matrix().adjoint()).adjoint())
                    .scale(0.5),
            )?;
        }
        let rv = RandomVariable::new(a, sample::density(d, &mut r))?;
        let l = law(&rv, DEFAULT_DEGENERACY_TOL)?;
        let total: f64 = l.iter().map(|(_, p)| p).sum();
        let min = l.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min);
        Ok(((total - 1.0).abs(), -min))
    })?;
    let mut count = Tally::new("gate_count_le_n(n-1)/2", 0.0);
    let mut rec = Tally::new("reconstruction_error", 1e-9);
    for (c, b, e) in rows {
        count.push(c, b);
        rec.push(e, 0.0);
    }
    let mut sum = Tally::new("law_sums_to_one", 1e-9);
    let mut pos = Tally::new("law_nonnegative", 1e-10);
    for (s, m) in laws {
        sum.push(s, 0.0);
        pos.push(m, 0.0);
    }
    Ok(vec![count.finish(), rec.finish(), sum.finish(), pos.finish()])
}

/// Kraus completeness and agreement with the partial-trace evaluation.
pub fn kraus_oracle(size: CampaignSize, seed: u64) -> Result<Vec<BoundCheck>> {
    let rows = par_samples(size.n(200), |i| {
        let mut r = rng(seed, 13, i);
        let d_s = [2, 3][i % 2];
        let d_e = [2, 3, 4][i % 3];
        let spec = random_channel_spec(&mut r, d_s, d_e)?;
        let t = uniform(&mut r, 0.0, 3.0);
        let rho = sample::density(d_s, &mut r);
        let k = kraus_operators(&spec, t)?;
        let a = apply_channel(&spec, t, &rho)?;
        let b = apply_channel_joint(&spec, t, &rho)?;
        Ok((k.completeness_defect(), max_abs(&(a.matrix() - b.matrix()))))
    })?;
    let mut comp = Tally::new("kraus_completeness", 1e-9);
    let mut oracle = Tally::new("kraus_matches_partial_trace", 1e-9);
    for (c, o) in rows {
        comp.push(c, 0.0);
        oracle.push(o, 0.0);
    }
    Ok(vec![comp.finish(), oracle.finish()])
}

/// Criterion label, title and its checks.
pub type CriterionResult = (&'static str, &'static str, Vec<BoundCheck>);

pub type CampaignFn = fn(CampaignSize, u64) -> Result<Vec<BoundCheck>>;

fn perturbative_campaign(_: CampaignSize, _: u64) -> Result<Vec<BoundCheck>> {
    perturbative_rate()
}

/// Every campaign with its criterion label and title.
pub fn criteria() -> Vec<(&'static str, &'static str, CampaignFn)> {
    vec![
        ("1", "closed-form complexity", closed_form),
        ("2", "absolute-value invariance", abs_invariance),
        ("3", "subadditivity", subadditivity),
        ("4", "joint split and channel loss", channel_split),
        ("5", "channel limit cases", channel_limits),
        ("6a", "noise lower bound and lemma", noise_lower_and_lemma),
        ("6b", "noise upper bound", noise_upper),
        ("7", "coherence rate formula", coherence_rate),
        ("8", "decohering power bound", decohering_bound),
        ("9", "cost chain", cost_chain),
        ("10", "perturbative example", perturbative_campaign),
        ("11", "random Schrodinger noise", rode_checks),
        ("12", "two-level decomposition and laws", decomposition),
        ("13", "Kraus completeness and oracle", kraus_oracle),
    ]
}

/// Runs every campaign.
pub fn run_all(size: CampaignSize, seed: u64) -> Result<Vec<CriterionResult>> {
    criteria()
        .into_iter()
        .map(|(id, title, f)| Ok((id, title, f(size, seed)?)))
        .collect()
}
