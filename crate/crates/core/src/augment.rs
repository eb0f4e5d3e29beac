//! Sampling augmented features along fitted curves, plus a linear-mixup
//! baseline for comparison.

use crate::dataset::PreShapeSet;
use crate::error::{Error, Result};
use crate::fit::FittedCurve;
use crate::geodesic::{interp, GeodesicCurve};
use crate::preshape::{center, normalize, PairedVector, PreShapeVector};
use crate::rng::{class_stream, StreamKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// `n` points sampled at z ~ U(0,1) along the curve.
pub fn sample_curve(
    curve: &GeodesicCurve,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<PreShapeVector>> {
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen();
            interp(curve, z)
        })
        .collect()
}

/// Pseudo-labeled augmentation: `n` samples per requested label from that
/// label's fitted curve. Per-class streams keyed on (seed, label) make the
/// output independent of label order.
pub fn augment_dataset(
    curves: &BTreeMap<String, FittedCurve>,
    labels: &[String],
    n: usize,
    seed: u64,
) -> Result<PreShapeSet> {
    let counts: Vec<(String, usize)> = labels.iter().map(|l| (l.clone(), n)).collect();
    augment_with_counts(curves, &counts, seed)
}

/// As [`augment_dataset`] with a per-label count (the n = m protocol).
pub fn augment_with_counts(
    curves: &BTreeMap<String, FittedCurve>,
    counts: &[(String, usize)],
    seed: u64,
) -> Result<PreShapeSet> {
    let mut out = PreShapeSet::new();
    for (label, n) in counts {
        let fitted = curves.get(label).ok_or_else(|| Error::MissingCurve {
            label: label.clone(),
        })?;
        let mut rng = class_stream(seed, label, StreamKind::Augment);
        for vector in sample_curve(&fitted.curve, *n, &mut rng)? {
            out.push(label.clone(), vector, true);
        }
    }
    Ok(out)
}

const MIXUP_RETRIES: usize = 16;

/// Euclidean linear interpolation between two class members, re-centered and
/// re-normalized back onto the sphere. The chord baseline the curve sampler
/// is compared against.
pub fn mixup_baseline(
    members: &[PreShapeVector],
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<PreShapeVector>> {
    if members.len() < 2 {
        return Err(Error::TooFewSamples {
            label: String::new(),
            count: members.len(),
            need: 2,
        });
    }
    let m = members.len();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut attempts = 0;
        let sample = loop {
            let i = rng.gen_range(0..m);
            let j0 = rng.gen_range(0..m - 1);
            let j = if j0 >= i { j0 + 1 } else { j0 };
            let lambda: f64 = rng.gen();
            let coords: Vec<f64> = members[i]
                .coords()
                .iter()
                .zip(members[j].coords())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            // Nearly antipodal pairs can cancel; retry those draws.
            match reproject(coords) {
                Ok(v) => break v,
                Err(e) => {
                    attempts += 1;
                    if attempts > MIXUP_RETRIES {
                        return Err(e);
                    }
                }
            }
        };
        out.push(sample);
    }
    Ok(out)
}

fn reproject(coords: Vec<f64>) -> Result<PreShapeVector> {
    normalize(&center(&PairedVector::from_coords(coords)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{fit, FitConfig};
    use crate::preshape::{geodesic_distance, project, RawFeature};
    use crate::rng::indexed_stream;
    use crate::synth::{synth, SynthKind};

    fn fitted_curve() -> FittedCurve {
        let set = synth(SynthKind::Geodesic, 2, 10, 12, 0.0, 9).unwrap();
        let (label, members) = set.classes.iter().next().unwrap();
        let config = FitConfig {
            epochs: 200,
            ..FitConfig::default()
        };
        let mut rng = class_stream(1, label, StreamKind::Fit);
        fit(label, members, &config, &mut rng).unwrap()
    }

    #[test]
    fn sampled_points_stay_on_curve() {
        let fitted = fitted_curve();
        let mut rng = indexed_stream(2, 0, StreamKind::Augment);
        let points = sample_curve(&fitted.curve, 64, &mut rng).unwrap();
        assert_eq!(points.len(), 64);
        let theta = fitted.curve.theta();
        for p in &points {
            let a = geodesic_distance(fitted.curve.tau_start(), p).unwrap();
            let b = geodesic_distance(p, fitted.curve.tau_end()).unwrap();
            assert!((a + b - theta).abs() <= 1e-9);
        }
        assert!(sample_curve(&fitted.curve, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn augment_counts_and_missing_labels() {
        let fitted = fitted_curve();
        let mut curves = BTreeMap::new();
        curves.insert("a".to_string(), fitted.clone());
        curves.insert("b".to_string(), fitted);

        let labels: Vec<String> = vec!["a".into(), "b".into()];
        let aug = augment_dataset(&curves, &labels, 5, 3).unwrap();
        assert_eq!(aug.total(), 10);
        assert!(aug.classes.values().flatten().all(|m| m.augmented));

        let missing: Vec<String> = vec!["a".into(), "zzz".into()];
        assert!(matches!(
            augment_dataset(&curves, &missing, 5, 3),
            Err(Error::MissingCurve { .. })
        ));
    }

    #[test]
    fn augment_is_label_order_independent() {
        let fitted = fitted_curve();
        let mut curves = BTreeMap::new();
        curves.insert("a".to_string(), fitted.clone());
        curves.insert("b".to_string(), fitted);

        let fwd = augment_dataset(&curves, &["a".into(), "b".into()], 4, 7).unwrap();
        let rev = augment_dataset(&curves, &["b".into(), "a".into()], 4, 7).unwrap();
        for label in ["a", "b"] {
            for (x, y) in fwd.classes[label].iter().zip(rev.classes[label].iter()) {
                assert_eq!(x.vector.coords(), y.vector.coords());
            }
        }
    }

    #[test]
    fn mixup_outputs_valid_preshapes_on_the_chord() {
        let a = project(&RawFeature::new(vec![1.0, 2.0, 4.0, 0.5, -3.0, 1.5]).unwrap()).unwrap();
        let b = project(&RawFeature::new(vec![-2.0, 1.0, 0.0, 3.0, 2.0, -1.0]).unwrap()).unwrap();
        let members = vec![a.clone(), b.clone()];
        let mut rng = indexed_stream(5, 0, StreamKind::Augment);
        let out = mixup_baseline(&members, 8, &mut rng).unwrap();
        assert_eq!(out.len(), 8);

        for v in &out {
            let (mx, my) = v.axis_means();
            assert!(mx.abs() <= 1e-12 && my.abs() <= 1e-12);
            assert!((v.norm() - 1.0).abs() <= 1e-12);

            // With two members every re-normalized sample stays in
            // span{a, b}: residual after projecting onto that plane is zero.
            let dot_aa = 1.0;
            let dot_ab: f64 = a.coords().iter().zip(b.coords()).map(|(x, y)| x * y).sum();
            let va: f64 = v.coords().iter().zip(a.coords()).map(|(x, y)| x * y).sum();
            let vb: f64 = v.coords().iter().zip(b.coords()).map(|(x, y)| x * y).sum();
            // Solve for coefficients in the (a, b) basis.
            let det = dot_aa * dot_aa - dot_ab * dot_ab;
            let ca = (va - dot_ab * vb) / det;
            let cb = (vb - dot_ab * va) / det;
            let mut residual = 0.0f64;
            for ((vi, ai), bi) in v.coords().iter().zip(a.coords()).zip(b.coords()) {
                residual = residual.max((vi - ca * ai - cb * bi).abs());
            }
            assert!(residual <= 1e-9, "rank-2 residual {residual:.2e}");
        }
    }

    #[test]
    fn mixup_needs_two_members() {
        let a = project(&RawFeature::new(vec![1.0, 2.0, 4.0, 0.5]).unwrap()).unwrap();
        let mut rng = indexed_stream(6, 0, StreamKind::Augment);
        assert!(matches!(
            mixup_baseline(&[a], 3, &mut rng),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
