//! Randomized diagnostic suites, runnable as a user-facing self-test.
//!
//! Every suite uses a fixed internal seed so a passing build keeps passing.
//! Each returns its measured extremes so callers can print per-suite
//! numbers; `run_default` bundles them with their pass thresholds.

use crate::error::Result;
use crate::fit::{fit, FitConfig};
use crate::geodesic::{gamma, interp, GeodesicCurve, THETA_MIN};
use crate::grad::{backward, finite_diff, forward, ParamSet};
use crate::losses::{sim_loss, sim_loss_reference};
use crate::matrix::PreShapeMatrix;
use crate::preshape::{geodesic_distance, project, PreShapeVector, RawFeature};
use crate::rng::{indexed_stream, StreamKind};
use crate::synth::{synth, SynthKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seed for all diagnostic randomness.
pub const CHECK_SEED: u64 = 0x6e0c_42fe;

fn stream(salt: u64) -> ChaCha12Rng {
    indexed_stream(CHECK_SEED, salt, StreamKind::Check)
}

fn normal_vec(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Random pre-shape of raw dimension d.
fn random_preshape(rng: &mut ChaCha12Rng, d: usize) -> PreShapeVector {
    loop {
        if let Ok(p) = project(&RawFeature::new(normal_vec(rng, d)).unwrap()) {
            return p;
        }
    }
}

/// Pre-shape pair at an exact angle: the second endpoint is built from an
/// orthonormal tangent direction, so any target angle is reachable.
fn preshape_pair_at_angle(
    rng: &mut ChaCha12Rng,
    d: usize,
    theta: f64,
) -> (PreShapeVector, PreShapeVector) {
    loop {
        let anchor = random_preshape(rng, d);
        let other = random_preshape(rng, d);
        let dot: f64 = anchor
            .coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum();
        let residual: Vec<f64> = other
            .coords()
            .iter()
            .zip(anchor.coords())
            .map(|(o, a)| o - dot * a)
            .collect();
        let norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let end: Vec<f64> = anchor
            .coords()
            .iter()
            .zip(residual.iter())
            .map(|(a, r)| theta.cos() * a + theta.sin() * r / norm)
            .collect();
        return (anchor, PreShapeVector::from_raw_coords(end));
    }
}

#[derive(Debug, Clone)]
pub struct SlerpEquivalence {
    pub instances: usize,
    pub max_abs_diff: f64,
}

/// Angle-parameterized and resampled curve forms evaluated on the same
/// random (curve, z) instances across several dimensions.
pub fn slerp_equivalence(instances: usize) -> SlerpEquivalence {
    let mut rng = stream(1);
    let dims = [4usize, 16, 64, 256];
    let mut max_abs_diff = 0.0f64;
    for i in 0..instances {
        let d = dims[i % dims.len()];
        let theta = rng.gen_range(0.1..std::f64::consts::PI - 0.1);
        let (a, b) = preshape_pair_at_angle(&mut rng, d, theta);
        let curve = GeodesicCurve::new(a, b).unwrap();
        let z: f64 = rng.gen();
        let via_gamma = gamma(&curve, z * curve.theta()).unwrap();
        let via_interp = interp(&curve, z).unwrap();
        for (x, y) in via_gamma.coords().iter().zip(via_interp.coords()) {
            max_abs_diff = max_abs_diff.max((x - y).abs());
        }
    }
    SlerpEquivalence {
        instances,
        max_abs_diff,
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionInvariants {
    pub instances: usize,
    pub max_axis_mean: f64,
    pub max_norm_err: f64,
    pub max_shift_scale_diff: f64,
}

/// Centering/normalization invariants plus shift and scale invariance of the
/// full projection, over mixed dimensions up to 512.
pub fn projection_invariants(instances: usize) -> ProjectionInvariants {
    let mut rng = stream(2);
    let mut max_axis_mean = 0.0f64;
    let mut max_norm_err = 0.0f64;
    let mut max_shift_scale_diff = 0.0f64;
    for _ in 0..instances {
        let d = rng.gen_range(2..=512);
        let values: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        if values.iter().all(|v| (v - values[0]).abs() < 1e-9) {
            continue;
        }
        let feature = RawFeature::new(values.clone()).unwrap();
        let tau = project(&feature).unwrap();
        let (mx, my) = tau.axis_means();
        max_axis_mean = max_axis_mean.max(mx.abs()).max(my.abs());
        max_norm_err = max_norm_err.max((tau.norm() - 1.0).abs());

        let scale = rng.gen_range(0.01..100.0);
        let shift = rng.gen_range(-100.0..100.0);
        let moved: Vec<f64> = values.iter().map(|v| scale * v + shift).collect();
        let tau2 = project(&RawFeature::new(moved).unwrap()).unwrap();
        for (a, b) in tau.coords().iter().zip(tau2.coords()) {
            max_shift_scale_diff = max_shift_scale_diff.max((a - b).abs());
        }
    }
    ProjectionInvariants {
        instances,
        max_axis_mean,
        max_norm_err,
        max_shift_scale_diff,
    }
}

#[derive(Debug, Clone)]
pub struct LossFormAgreement {
    pub instances: usize,
    pub max_rel_diff: f64,
}

/// Matrix-form similarity loss against the per-column loop form.
pub fn loss_form_agreement(instances: usize) -> LossFormAgreement {
    let mut rng = stream(3);
    let mut max_rel_diff = 0.0f64;
    for _ in 0..instances {
        let d = rng.gen_range(2..=128);
        let m = rng.gen_range(1..=64);
        let a = random_columns(&mut rng, d, m);
        let b = random_columns(&mut rng, d, m);
        let lm = sim_loss(&a, &b).unwrap();
        let ll = sim_loss_reference(&a, &b).unwrap();
        let rel = (lm - ll).abs() / ll.abs().max(1e-300);
        max_rel_diff = max_rel_diff.max(rel);
    }
    LossFormAgreement {
        instances,
        max_rel_diff,
    }
}

fn random_columns(rng: &mut ChaCha12Rng, d: usize, m: usize) -> PreShapeMatrix {
    let cols: Vec<PreShapeVector> = (0..m).map(|_| random_preshape(rng, d)).collect();
    PreShapeMatrix::from_columns(&cols).unwrap()
}

#[derive(Debug, Clone)]
pub struct GradientOracle {
    pub instances: usize,
    pub max_rel_err: f64,
    pub max_abs_diff: f64,
}

/// Analytic gradients against central finite differences (h = 1e-5) on
/// random instances with theta bounded away from 0 and pi by 0.1. The error
/// metric is relative with an absolute floor of 1e-8.
pub fn gradient_oracle(instances: usize) -> GradientOracle {
    let mut rng = stream(4);
    let mut max_rel_err = 0.0f64;
    let mut max_abs_diff = 0.0f64;
    for _ in 0..instances {
        let m = rng.gen_range(2..=8);
        let d = rng.gen_range(4..=16);
        let (params, originals, z) = gradient_instance(&mut rng, m, d);
        let (_, cache) = forward(&params, &originals, &z, 0.3, THETA_MIN).unwrap();
        let analytic = backward(&cache, &originals);
        let numeric = finite_diff(&params, &originals, &z, 0.3, THETA_MIN, 1e-5).unwrap();

        let tensors = [
            (&analytic.d_v_start, &numeric.d_v_start),
            (&analytic.d_v_end, &numeric.d_v_end),
            (&analytic.d_t_raw, &numeric.d_t_raw),
        ];
        for (a_t, n_t) in tensors {
            for (a, n) in a_t.iter().zip(n_t.iter()) {
                let diff = (a - n).abs();
                max_abs_diff = max_abs_diff.max(diff);
                if diff > 1e-8 {
                    max_rel_err = max_rel_err.max(diff / a.abs().max(n.abs()));
                }
            }
        }
    }
    GradientOracle {
        instances,
        max_rel_err,
        max_abs_diff,
    }
}

fn gradient_instance(
    rng: &mut ChaCha12Rng,
    m: usize,
    d: usize,
) -> (ParamSet, PreShapeMatrix, Vec<f64>) {
    loop {
        let params = ParamSet {
            v_start: normal_vec(rng, d),
            v_end: normal_vec(rng, d),
            t_raw: normal_vec(rng, m),
        };
        let z: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
        let originals = random_columns(rng, d, m);

        let Ok((_, cache)) = forward(&params, &originals, &z, 0.3, THETA_MIN) else {
            continue;
        };
        if cache.theta() < 0.1 || cache.theta() > std::f64::consts::PI - 0.1 {
            continue;
        }
        // Keep the sort kinks of the divergence term beyond the
        // finite-difference step.
        let mut ts = cache.t().to_vec();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut zs = z.clone();
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let near_kink = ts.iter().zip(zs.iter()).any(|(a, b)| (a - b).abs() < 1e-3)
            || ts.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-3);
        if near_kink {
            continue;
        }
        return (params, originals, z);
    }
}

#[derive(Debug, Clone)]
pub struct OnCurveSampling {
    pub samples: usize,
    pub max_additivity_err: f64,
    pub mean_z: f64,
    pub bin_counts: Vec<usize>,
}

/// Fits a few synthetic classes, samples `samples` points across the fitted
/// curves, and measures on-curve additivity plus the distribution of the
/// recovered z values (distance-to-start over theta).
pub fn on_curve_sampling(samples: usize) -> Result<OnCurveSampling> {
    let classes = 4;
    let set = synth(SynthKind::Geodesic, classes, 10, 16, 0.02, CHECK_SEED)?;
    let config = FitConfig {
        epochs: 400,
        seed: CHECK_SEED,
        ..FitConfig::default()
    };

    let mut max_additivity_err = 0.0f64;
    let mut z_sum = 0.0f64;
    let mut bin_counts = vec![0usize; 10];
    let mut drawn = 0usize;

    let per_class = samples / classes + usize::from(!samples.is_multiple_of(classes));
    for (idx, (label, members)) in set.classes.iter().enumerate() {
        let mut rng = indexed_stream(CHECK_SEED, 10 + idx as u64, StreamKind::Check);
        let fitted = fit(label, members, &config, &mut rng)?;
        let theta = fitted.curve.theta();
        let n = per_class.min(samples - drawn);
        let points = crate::augment::sample_curve(&fitted.curve, n, &mut rng)?;
        for p in &points {
            let to_start = geodesic_distance(fitted.curve.tau_start(), p)?;
            let to_end = geodesic_distance(p, fitted.curve.tau_end())?;
            max_additivity_err = max_additivity_err.max((to_start + to_end - theta).abs());
            let z = to_start / theta;
            z_sum += z;
            let bin = ((z * 10.0) as usize).min(9);
            bin_counts[bin] += 1;
        }
        drawn += n;
    }

    Ok(OnCurveSampling {
        samples: drawn,
        max_additivity_err,
        mean_z: z_sum / drawn as f64,
        bin_counts,
    })
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub suites: Vec<SuiteOutcome>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }
}

/// The standard diagnostic battery with its pass thresholds.
pub fn run_default() -> Result<CheckReport> {
    let mut suites = Vec::new();

    let slerp = slerp_equivalence(1000);
    suites.push(SuiteOutcome {
        name: "slerp-equivalence",
        pass: slerp.max_abs_diff <= 1e-10,
        detail: format!(
            "{} instances, max abs diff {:.3e} (<= 1e-10)",
            slerp.instances, slerp.max_abs_diff
        ),
    });

    let proj = projection_invariants(1000);
    suites.push(SuiteOutcome {
        name: "projection-invariants",
        pass: proj.max_axis_mean <= 1e-12
            && proj.max_norm_err <= 1e-12
            && proj.max_shift_scale_diff <= 1e-9,
        detail: format!(
            "{} instances, max |axis mean| {:.3e} (<= 1e-12), max |norm-1| {:.3e} (<= 1e-12), max shift/scale diff {:.3e} (<= 1e-9)",
            proj.instances, proj.max_axis_mean, proj.max_norm_err, proj.max_shift_scale_diff
        ),
    });

    let loss = loss_form_agreement(200);
    suites.push(SuiteOutcome {
        name: "loss-form-agreement",
        pass: loss.max_rel_diff <= 1e-12,
        detail: format!(
            "{} instances, max relative diff {:.3e} (<= 1e-12)",
            loss.instances, loss.max_rel_diff
        ),
    });

    let grad = gradient_oracle(100);
    suites.push(SuiteOutcome {
        name: "gradient-oracle",
        pass: grad.max_rel_err <= 1e-4,
        detail: format!(
            "{} instances, max relative error {:.3e} (<= 1e-4, abs floor 1e-8), max abs diff {:.3e}",
            grad.instances, grad.max_rel_err, grad.max_abs_diff
        ),
    });

    let oncurve = on_curve_sampling(10_000)?;
    let expected = oncurve.samples as f64 / 10.0;
    let bins_ok = oncurve
        .bin_counts
        .iter()
        .all(|&c| (c as f64) >= 0.6 * expected && (c as f64) <= 1.4 * expected);
    suites.push(SuiteOutcome {
        name: "on-curve-sampling",
        pass: oncurve.max_additivity_err <= 1e-9
            && (oncurve.mean_z - 0.5).abs() <= 0.02
            && bins_ok,
        detail: format!(
            "{} samples, max additivity err {:.3e} (<= 1e-9), mean z {:.4} (within 0.02 of 0.5), bins {:?} (each within 40% of {:.0})",
            oncurve.samples, oncurve.max_additivity_err, oncurve.mean_z, oncurve.bin_counts, expected
        ),
    });

    Ok(CheckReport { suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_battery_passes() {
        let report = run_default().unwrap();
        for s in &report.suites {
            assert!(s.pass, "{} failed: {}", s.name, s.detail);
        }
    }
}
