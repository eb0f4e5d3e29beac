//! Feature augmentation along fitted geodesic curves in pre-shape space.
//!
//! Raw per-class feature vectors are projected onto the pre-shape sphere
//! (centered, unit-norm landmark configurations), a class-specific geodesic
//! arc is fitted by gradient descent on a two-term loss, and new features
//! are sampled along the fitted arc. A small evaluation harness measures the
//! effect of the augmentation on downstream classifiers.

pub mod adam;
pub mod augment;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fit;
pub mod geodesic;
pub mod grad;
pub mod losses;
pub mod matrix;
pub mod par;
pub mod preshape;
pub mod rng;
pub mod selfcheck;
pub mod synth;

pub use adam::{adam_step, AdamState};
pub use augment::{augment_dataset, augment_with_counts, mixup_baseline, sample_curve};
pub use dataset::{project_set, PreShapeMember, PreShapeSet, RawSet};
pub use error::{Error, Result};
pub use eval::{
    evaluate, knn_predict, train_linear_head, ClassifierKind, EvalConfig, EvalReport, HeadConfig,
    LinearHead, Method,
};
pub use fit::{fit, fit_all_classes, init_fit, FitConfig, FitState, FittedCurve};
pub use geodesic::{gamma, interp, interp_batch, GeodesicCurve, THETA_MIN};
pub use grad::{backward, finite_diff, forward, ForwardCache, GradSet, ParamSet};
pub use losses::{divergence_loss, sim_loss, sim_loss_reference, total_loss, LossReport};
pub use matrix::PreShapeMatrix;
pub use preshape::{
    center, duplicate, geodesic_distance, normalize, project, PairedVector, PreShapeVector,
    RawFeature, NORM_EPS,
};
pub use synth::{synth, SynthKind};
