//! Geodesic curve fitting: initialization, the training loop, and extraction
//! of the fitted per-class curve.
//!
//! Endpoints are learned through their raw-space preimages so they stay on
//! the pre-shape sphere by construction; the sampling parameters are learned
//! pre-sigmoid. Each epoch draws a fresh uniform reference z, evaluates the
//! two-term loss, backpropagates, and applies one Adam step.

use crate::adam::{adam_step, AdamState};
use crate::dataset::RawSet;
use crate::error::{Error, Result};
use crate::geodesic::GeodesicCurve;
use crate::grad::{backward, forward, ParamSet};
use crate::losses::LossReport;
use crate::matrix::PreShapeMatrix;
use crate::par::par_map;
use crate::preshape::{project, PreShapeVector, RawFeature};
use crate::rng::{class_stream, StreamKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;

const INIT_RETRIES: usize = 16;

/// Hyperparameters of one fit. Defaults follow the reference protocol:
/// loss weight 0.3, endpoint rate 3e-4, sampling-parameter rate 3e-3,
/// 2000 epochs.
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub beta: f64,
    pub lr_endpoints: f64,
    pub lr_t: f64,
    pub epochs: usize,
    pub seed: u64,
    pub theta_min: f64,
    /// Relative scale of the Gaussian noise used to re-derive a degenerate
    /// second endpoint.
    pub perturb_sigma: f64,
    /// Stop early once the 100-epoch moving average of the total loss
    /// improves by less than 1e-6. Off by default: the reference protocol
    /// runs the full budget.
    pub early_stop: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            beta: 0.3,
            lr_endpoints: 3e-4,
            lr_t: 3e-3,
            epochs: 2000,
            seed: 0,
            theta_min: crate::geodesic::THETA_MIN,
            perturb_sigma: 1e-2,
            early_stop: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr_endpoints <= 0.0 || self.lr_t <= 0.0 {
            return Err(Error::InvalidConfig("learning rates must be > 0".into()));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidConfig("beta must be >= 0".into()));
        }
        if self.theta_min <= 0.0 || self.perturb_sigma <= 0.0 {
            return Err(Error::InvalidConfig(
                "theta_min and perturb_sigma must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Mutable state of one running fit.
#[derive(Debug, Clone)]
pub struct FitState {
    pub params: ParamSet,
    pub adam: AdamState,
    pub epoch: usize,
    pub last_report: Option<LossReport>,
    /// Absolute perturbation scale, fixed at init from the feature spread.
    perturb_scale: f64,
    /// Mid-training degeneracy recoveries, for diagnostics.
    pub degenerate_recoveries: usize,
}

/// The fitted artifact of one class.
#[derive(Debug, Clone)]
pub struct FittedCurve {
    pub curve: GeodesicCurve,
    pub class_label: String,
    pub final_loss: LossReport,
    pub loss_trace: Vec<f64>,
    pub degenerate_recoveries: usize,
}

fn std_of_all_entries(features: &[RawFeature]) -> f64 {
    let mut count = 0usize;
    let mut sum = 0.0;
    for f in features {
        for &v in f.values() {
            sum += v;
            count += 1;
        }
    }
    let mean = sum / count as f64;
    let mut var = 0.0;
    for f in features {
        for &v in f.values() {
            var += (v - mean) * (v - mean);
        }
    }
    (var / count as f64).sqrt()
}

fn perturbed(base: &[f64], scale: f64, rng: &mut ChaCha12Rng) -> Vec<f64> {
    base.iter()
        .map(|&v| {
            let noise: f64 = StandardNormal.sample(rng);
            v + scale * noise
        })
        .collect()
}

fn endpoints_admissible(v_start: &[f64], v_end: &[f64], theta_min: f64) -> bool {
    let s = RawFeature::new(v_start.to_vec()).and_then(|f| project(&f));
    let e = RawFeature::new(v_end.to_vec()).and_then(|f| project(&f));
    match (s, e) {
        (Ok(ts), Ok(te)) => match crate::preshape::geodesic_distance(&ts, &te) {
            Ok(theta) => theta >= theta_min && theta <= std::f64::consts::PI - theta_min,
            Err(_) => false,
        },
        _ => false,
    }
}

/// Endpoint and sampling-parameter initialization. Two distinct samples seed
/// the endpoints; if only one sample exists, or the chosen pair projects to
/// a degenerate geodesic, the second endpoint is re-derived as the first
/// plus Gaussian noise scaled by the feature spread, up to 16 attempts.
pub fn init_fit(
    class_features: &[RawFeature],
    config: &FitConfig,
    rng: &mut ChaCha12Rng,
) -> Result<FitState> {
    config.validate()?;
    if class_features.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = class_features.len();
    let d = class_features[0].dim();
    for f in class_features {
        if f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
    }

    let perturb_scale = config.perturb_sigma * std_of_all_entries(class_features);

    let (v_start, mut v_end);
    if m >= 2 {
        let i = rng.gen_range(0..m);
        let j0 = rng.gen_range(0..m - 1);
        let j = if j0 >= i { j0 + 1 } else { j0 };
        v_start = class_features[i].values().to_vec();
        v_end = class_features[j].values().to_vec();
    } else {
        v_start = class_features[0].values().to_vec();
        v_end = perturbed(&v_start, perturb_scale, rng);
    }

    let mut attempts = 0;
    while !endpoints_admissible(&v_start, &v_end, config.theta_min) {
        attempts += 1;
        if attempts > INIT_RETRIES {
            return Err(Error::InitFailure {
                attempts: INIT_RETRIES,
            });
        }
        v_end = perturbed(&v_start, perturb_scale, rng);
    }

    let t_raw: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    let params = ParamSet {
        v_start,
        v_end,
        t_raw,
    };
    Ok(FitState {
        adam: AdamState::new(d, m),
        params,
        epoch: 0,
        last_report: None,
        perturb_scale,
        degenerate_recoveries: 0,
    })
}

/// One epoch: draw z, forward, backward, Adam step. On a degenerate curve
/// the second endpoint is re-perturbed as at init and the epoch retried.
/// The returned report is the pre-update forward value.
pub fn fit_epoch(
    state: &mut FitState,
    originals: &PreShapeMatrix,
    config: &FitConfig,
    rng: &mut ChaCha12Rng,
) -> Result<LossReport> {
    let m = state.params.m();
    let z: Vec<f64> = (0..m).map(|_| rng.gen()).collect();

    let mut attempts = 0;
    let (report, cache) = loop {
        match forward(&state.params, originals, &z, config.beta, config.theta_min) {
            Ok(out) => break out,
            Err(Error::DegenerateCurve { .. }) | Err(Error::DegenerateVector { .. }) => {
                attempts += 1;
                state.degenerate_recoveries += 1;
                if attempts > INIT_RETRIES {
                    return Err(Error::InitFailure {
                        attempts: INIT_RETRIES,
                    });
                }
                state.params.v_end = perturbed(&state.params.v_start, state.perturb_scale, rng);
            }
            Err(e) => return Err(e),
        }
    };

    if !report.total.is_finite() {
        return Err(Error::NonFiniteLoss {
            epoch: state.epoch + 1,
            sim: report.sim,
            diverg: report.diverg,
        });
    }

    let grads = backward(&cache, originals);
    adam_step(
        &mut state.params,
        &grads,
        &mut state.adam,
        config.lr_endpoints,
        config.lr_t,
    );
    state.epoch += 1;
    state.last_report = Some(report);
    Ok(report)
}

fn early_stop_triggered(trace: &[f64]) -> bool {
    if trace.len() < 200 {
        return false;
    }
    let n = trace.len();
    let recent: f64 = trace[n - 100..].iter().sum::<f64>() / 100.0;
    let previous: f64 = trace[n - 200..n - 100].iter().sum::<f64>() / 100.0;
    previous - recent < 1e-6
}

/// Full fit of one class: init, the epoch loop, and curve extraction from
/// the final projected endpoints.
pub fn fit(
    label: &str,
    class_features: &[RawFeature],
    config: &FitConfig,
    rng: &mut ChaCha12Rng,
) -> Result<FittedCurve> {
    let mut state = init_fit(class_features, config, rng)?;

    let columns: Vec<PreShapeVector> = class_features.iter().map(project).collect::<Result<_>>()?;
    let originals = PreShapeMatrix::from_columns(&columns)?;

    let mut trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let report = fit_epoch(&mut state, &originals, config, rng)?;
        trace.push(report.total);
        if config.early_stop && early_stop_triggered(&trace) {
            break;
        }
    }

    let tau_start = project(&RawFeature::new(state.params.v_start.clone())?)?;
    let tau_end = project(&RawFeature::new(state.params.v_end.clone())?)?;
    let curve = GeodesicCurve::with_min_angle(tau_start, tau_end, config.theta_min)?;

    Ok(FittedCurve {
        curve,
        class_label: label.to_string(),
        final_loss: state.last_report.expect("at least one epoch ran"),
        loss_trace: trace,
        degenerate_recoveries: state.degenerate_recoveries,
    })
}

/// Fits every class of the dataset. Per-class RNG streams are derived from
/// (seed, label), so results are independent of iteration order and of
/// `threads`. Per-class failures are aggregated with their labels.
pub fn fit_all_classes(
    dataset: &RawSet,
    config: &FitConfig,
    threads: usize,
) -> Result<BTreeMap<String, FittedCurve>> {
    dataset.validate_nonempty()?;

    let jobs: Vec<(String, Vec<RawFeature>)> = dataset
        .classes
        .iter()
        .map(|(label, members)| (label.clone(), members.clone()))
        .collect();

    let outcomes = par_map(jobs, threads, |(label, members)| {
        let mut rng = class_stream(config.seed, &label, StreamKind::Fit);
        let fitted = fit(&label, &members, config, &mut rng);
        (label, fitted)
    });

    let mut curves = BTreeMap::new();
    let mut failures = Vec::new();
    for (label, outcome) in outcomes {
        match outcome {
            Ok(fitted) => {
                curves.insert(label, fitted);
            }
            Err(e) => failures.push((label, e)),
        }
    }
    if !failures.is_empty() {
        return Err(Error::class_failures(failures));
    }
    Ok(curves)
}
