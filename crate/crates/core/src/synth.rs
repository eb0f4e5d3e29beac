//! Synthetic feature generators: desk-scale stand-ins for backbone features.
//!
//! Class structure (blob means, latent arcs) is keyed on (seed, label) only,
//! while per-sample draws additionally mix in the requested per-class count.
//! Two generations with the same seed but different counts therefore share
//! the latent class structure without sharing any samples, which is how a
//! train/test pair is produced from one seed.

use crate::dataset::RawSet;
use crate::error::{Error, Result};
use crate::preshape::{project, PreShapeVector, RawFeature};
use crate::rng::{class_stream, mix, StreamKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Arc length (radians) of the latent great circle each geodesic class is
/// drawn along. Long enough that a class is genuinely curve-shaped rather
/// than a blob.
pub const ARC_SPAN: f64 = 2.5;

/// All geodesic class arcs are drawn inside a shared subspace of this
/// dimension (on the sphere), so classes crowd each other the way backbone
/// features do instead of landing in near-orthogonal planes.
pub const LATENT_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Gaussian,
    Geodesic,
}

impl std::str::FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(SynthKind::Gaussian),
            "geodesic" => Ok(SynthKind::Geodesic),
            other => Err(format!("unknown kind {other:?} (gaussian|geodesic)")),
        }
    }
}

fn normal_vec(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn class_label(index: usize, classes: usize) -> String {
    let width = (classes.max(2) - 1).to_string().len();
    format!("c{index:0width$}")
}

/// Stream for the per-sample draws; mixes the count in (see module docs).
fn samples_stream(seed: u64, label: &str, per_class: usize) -> ChaCha12Rng {
    class_stream(mix(seed ^ mix(per_class as u64)), label, StreamKind::Synth)
}

/// Generates `classes` x `per_class` raw features of dimension `dim`.
pub fn synth(
    kind: SynthKind,
    classes: usize,
    per_class: usize,
    dim: usize,
    noise: f64,
    seed: u64,
) -> Result<RawSet> {
    synth_with(
        kind, classes, per_class, dim, noise, seed, ARC_SPAN, LATENT_DIM,
    )
}

#[allow(clippy::too_many_arguments)]
fn synth_with(
    kind: SynthKind,
    classes: usize,
    per_class: usize,
    dim: usize,
    noise: f64,
    seed: u64,
    arc_span: f64,
    latent_dim: usize,
) -> Result<RawSet> {
    if classes < 2 {
        return Err(Error::InvalidConfig("need at least 2 classes".into()));
    }
    if per_class < 1 {
        return Err(Error::InvalidConfig(
            "need at least 1 sample per class".into(),
        ));
    }
    if dim < 4 {
        return Err(Error::InvalidConfig("need dimension >= 4".into()));
    }
    if noise < 0.0 {
        return Err(Error::InvalidConfig("noise must be >= 0".into()));
    }

    // Shared latent basis for geodesic classes, keyed on the seed alone so
    // every class (and every per-class count) sees the same subspace.
    // Projections of duplicated features span a (d-1)-dimensional subspace,
    // which caps the reachable latent dimension.
    let basis = match kind {
        SynthKind::Geodesic => {
            let mut basis_rng = class_stream(seed, "latent-basis", StreamKind::Synth);
            Some(latent_basis(&mut basis_rng, dim, latent_dim.min(dim - 1))?)
        }
        SynthKind::Gaussian => None,
    };

    let mut out = RawSet::new();
    for c in 0..classes {
        let label = class_label(c, classes);
        let mut structure = class_stream(seed, &label, StreamKind::Synth);
        let mut samples = samples_stream(seed, &label, per_class);
        match kind {
            SynthKind::Gaussian => {
                let mut mean = normal_vec(&mut structure, dim);
                let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
                for v in mean.iter_mut() {
                    *v /= norm;
                }
                for _ in 0..per_class {
                    let values: Vec<f64> = mean
                        .iter()
                        .map(|&mu| {
                            let eps: f64 = StandardNormal.sample(&mut samples);
                            mu + noise * eps
                        })
                        .collect();
                    out.push(label.clone(), RawFeature::new(values)?);
                }
            }
            SynthKind::Geodesic => {
                let (anchor, direction) =
                    latent_arc(&mut structure, basis.as_ref().expect("geodesic basis"))?;
                for _ in 0..per_class {
                    let z: f64 = samples.gen();
                    let s = z * arc_span;
                    let (cs, ss) = (s.cos(), s.sin());
                    // Read the x-coordinates back as the raw feature; its
                    // projection is exactly the arc point.
                    let mut values: Vec<f64> = (0..dim)
                        .map(|i| {
                            (cs * anchor.coords()[2 * i] + ss * direction.coords()[2 * i])
                                * 2.0f64.sqrt()
                        })
                        .collect();
                    if noise > 0.0 {
                        for v in values.iter_mut() {
                            let eps: f64 = StandardNormal.sample(&mut samples);
                            *v += noise * eps;
                        }
                    }
                    out.push(label.clone(), RawFeature::new(values)?);
                }
            }
        }
    }
    Ok(out)
}

/// Orthonormal pre-shape directions spanning the shared latent subspace.
/// Gram-Schmidt stays inside the centered paired subspace, so every basis
/// vector is itself a valid pre-shape.
fn latent_basis(rng: &mut ChaCha12Rng, dim: usize, latent: usize) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(latent);
    let mut attempts = 0usize;
    while basis.len() < latent {
        attempts += 1;
        if attempts > 64 * latent {
            return Err(Error::InvalidConfig(format!(
                "cannot build a {latent}-dimensional latent basis at feature dimension {dim}"
            )));
        }
        let candidate = project(&RawFeature::new(normal_vec(rng, dim))?)?;
        let mut v = candidate.coords().to_vec();
        for q in &basis {
            let dot: f64 = v.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q.iter()) {
                *vi -= dot * qi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
    }
    Ok(basis)
}

/// An anchor point plus an orthonormal tangent direction inside the latent
/// subspace, spanning the great circle of one class.
fn latent_arc(
    rng: &mut ChaCha12Rng,
    basis: &[Vec<f64>],
) -> Result<(PreShapeVector, PreShapeVector)> {
    let ambient = basis[0].len();
    loop {
        let combo = |rng: &mut ChaCha12Rng| -> Vec<f64> {
            let coef = normal_vec(rng, basis.len());
            let mut v = vec![0.0; ambient];
            for (c, q) in coef.iter().zip(basis.iter()) {
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi += c * qi;
                }
            }
            v
        };
        let mut anchor = combo(rng);
        let norm_a = anchor.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_a < 1e-6 {
            continue;
        }
        for x in anchor.iter_mut() {
            *x /= norm_a;
        }

        let mut dir = combo(rng);
        let dot: f64 = dir.iter().zip(anchor.iter()).map(|(a, b)| a * b).sum();
        for (di, ai) in dir.iter_mut().zip(anchor.iter()) {
            *di -= dot * ai;
        }
        let norm_d = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_d < 1e-6 {
            continue;
        }
        for x in dir.iter_mut() {
            *x /= norm_d;
        }

        return Ok((
            PreShapeVector::from_raw_coords(anchor),
            PreShapeVector::from_raw_coords(dir),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preshape::geodesic_distance;

    #[test]
    fn shapes_and_determinism() {
        let a = synth(SynthKind::Gaussian, 3, 7, 8, 0.1, 42).unwrap();
        assert_eq!(a.labels(), vec!["c0", "c1", "c2"]);
        assert_eq!(a.total(), 21);

        let b = synth(SynthKind::Gaussian, 3, 7, 8, 0.1, 42).unwrap();
        for (label, members) in &a.classes {
            for (x, y) in members.iter().zip(b.classes[label].iter()) {
                assert_eq!(x.values(), y.values());
            }
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(synth(SynthKind::Gaussian, 1, 5, 8, 0.1, 0).is_err());
        assert!(synth(SynthKind::Gaussian, 2, 0, 8, 0.1, 0).is_err());
        assert!(synth(SynthKind::Gaussian, 2, 5, 3, 0.1, 0).is_err());
    }

    #[test]
    fn noiseless_geodesic_classes_lie_on_one_arc() {
        let set = synth(SynthKind::Geodesic, 2, 10, 16, 0.0, 7).unwrap();
        for members in set.classes.values() {
            let projected: Vec<PreShapeVector> =
                members.iter().map(|f| project(f).unwrap()).collect();
            // Every point must sit on the great circle through the two most
            // distant members: distance additivity through each point.
            let mut far = (0, 1, 0.0);
            for i in 0..projected.len() {
                for j in i + 1..projected.len() {
                    let d = geodesic_distance(&projected[i], &projected[j]).unwrap();
                    if d > far.2 {
                        far = (i, j, d);
                    }
                }
            }
            let (i, j, span) = far;
            assert!(span > 0.1, "arc span too small: {span}");
            for (k, p) in projected.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let a = geodesic_distance(&projected[i], p).unwrap();
                let b = geodesic_distance(p, &projected[j]).unwrap();
                assert!(
                    (a + b - span).abs() < 1e-9,
                    "point {k} off the arc by {:.3e}",
                    (a + b - span).abs()
                );
            }
        }
    }

    #[test]
    fn same_seed_different_counts_share_structure_not_samples() {
        let small = synth(SynthKind::Geodesic, 2, 5, 12, 0.05, 3).unwrap();
        let large = synth(SynthKind::Geodesic, 2, 50, 12, 0.05, 3).unwrap();

        // No sample of the small set appears in the large one.
        for (label, members) in &small.classes {
            for m in members {
                assert!(!large.classes[label]
                    .iter()
                    .any(|other| other.values() == m.values()));
            }
        }

        // But the latent arcs match: small-set points are near the span of
        // the large set (checked loosely via nearest-neighbor distance).
        for (label, members) in &small.classes {
            for m in members {
                let p = project(m).unwrap();
                let nearest = large.classes[label]
                    .iter()
                    .map(|o| geodesic_distance(&p, &project(o).unwrap()).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 0.5, "sample far from shared arc: {nearest}");
            }
        }
    }
}
