//! Projection of raw feature vectors into the pre-shape space.
//!
//! A raw d-dimensional feature vector becomes a configuration of d planar
//! landmarks by duplicating each coordinate into an (x, y) pair. Centering
//! removes position, normalization removes scale, and the result lives on
//! the unit pre-shape sphere where great-circle distance is the metric.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Norm threshold below which a centered vector is considered degenerate.
/// Well above f64 rounding noise for any realistic feature dimension, well
/// below any meaningful feature norm.
pub const NORM_EPS: f64 = 1e-12;

/// Construction tolerance for [`PreShapeVector`]: per-axis means and the
/// deviation of the Euclidean norm from 1 must both stay within this bound.
pub const PRESHAPE_TOL: f64 = 1e-12;

/// A length-d real feature vector as produced by an external extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFeature {
    values: Vec<f64>,
}

impl RawFeature {
    /// Validates finiteness and d >= 2 (a length-1 vector centers to zero).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "raw feature",
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// d coordinate pairs stored as an interleaved flat sequence
/// `[x1, y1, x2, y2, ...]` of length 2d.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedVector {
    coords: Vec<f64>,
}

impl PairedVector {
    /// Accepts any even-length (>= 4) finite coordinate sequence.
    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 4 || !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "paired coordinates",
            });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of landmark pairs (d).
    pub fn pairs(&self) -> usize {
        self.coords.len() / 2
    }
}

/// A centered, unit-norm configuration on the pre-shape sphere, same
/// interleaved layout as [`PairedVector`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PreShapeVector {
    coords: Vec<f64>,
}

impl<'de> Deserialize<'de> for PreShapeVector {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        PreShapeVector::try_new(coords).map_err(serde::de::Error::custom)
    }
}

impl PreShapeVector {
    /// Validates the pre-shape invariants: zero per-axis means and unit norm,
    /// both to [`PRESHAPE_TOL`]. Used when ingesting serialized vectors.
    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 4 || !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "pre-shape coordinates",
            });
        }
        let v = Self { coords };
        let (mx, my) = v.axis_means();
        if mx.abs() > PRESHAPE_TOL || my.abs() > PRESHAPE_TOL {
            return Err(Error::NonFinite {
                context: "pre-shape means exceed tolerance",
            });
        }
        if (v.norm() - 1.0).abs() > PRESHAPE_TOL {
            return Err(Error::NonFinite {
                context: "pre-shape norm exceeds tolerance",
            });
        }
        Ok(v)
    }

    /// Internal constructor for values produced by operations that preserve
    /// the invariants analytically (projection, spherical interpolation).
    pub(crate) fn from_raw_coords(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ambient dimension 2d.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn axis_means(&self) -> (f64, f64) {
        let d = self.coords.len() / 2;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for i in 0..d {
            sx += self.coords[2 * i];
            sy += self.coords[2 * i + 1];
        }
        (sx / d as f64, sy / d as f64)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Duplicates each feature value into an (x, y) landmark pair.
pub fn duplicate(v: &RawFeature) -> PairedVector {
    let mut coords = Vec::with_capacity(2 * v.dim());
    for &x in v.values() {
        coords.push(x);
        coords.push(x);
    }
    PairedVector { coords }
}

/// Subtracts the per-axis means, removing position.
pub fn center(p: &PairedVector) -> PairedVector {
    let d = p.pairs();
    let mut sx = 0.0;
    let mut sy = 0.0;
    for i in 0..d {
        sx += p.coords[2 * i];
        sy += p.coords[2 * i + 1];
    }
    let mx = sx / d as f64;
    let my = sy / d as f64;
    let mut coords = Vec::with_capacity(2 * d);
    for i in 0..d {
        coords.push(p.coords[2 * i] - mx);
        coords.push(p.coords[2 * i + 1] - my);
    }
    PairedVector { coords }
}

/// Scales to unit norm, removing scale. Fails when the centered vector has
/// (near-)zero norm, which happens exactly for constant raw features.
pub fn normalize(p: &PairedVector) -> Result<PreShapeVector> {
    let norm = p.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm <= NORM_EPS {
        return Err(Error::DegenerateVector {
            norm,
            eps: NORM_EPS,
        });
    }
    Ok(PreShapeVector::from_raw_coords(
        p.coords.iter().map(|c| c / norm).collect(),
    ))
}

/// Full projection: duplicate, center, normalize.
pub fn project(v: &RawFeature) -> Result<PreShapeVector> {
    normalize(&center(&duplicate(v)))
}

/// Great-circle distance between two pre-shapes: the arccos of their inner
/// product, clamped to [-1, 1] before arccos so rounding cannot push it out
/// of the domain. Result in [0, pi].
pub fn geodesic_distance(a: &PreShapeVector, b: &PreShapeVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut dot = 0.0;
    for (x, y) in a.coords.iter().zip(b.coords.iter()) {
        dot += x * y;
    }
    Ok(dot.clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(values: &[f64]) -> RawFeature {
        RawFeature::new(values.to_vec()).unwrap()
    }

    #[test]
    fn duplicate_interleaves_pairs() {
        assert_eq!(duplicate(&raw(&[1.0, 3.0])).coords(), &[1.0, 1.0, 3.0, 3.0]);
        assert_eq!(duplicate(&raw(&[0.0, 0.0])).coords(), &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            duplicate(&raw(&[2.0, -1.0, 5.0])).coords(),
            &[2.0, 2.0, -1.0, -1.0, 5.0, 5.0]
        );
    }

    #[test]
    fn center_removes_axis_means() {
        let c = center(&duplicate(&raw(&[1.0, 3.0])));
        assert_eq!(c.coords(), &[-1.0, -1.0, 1.0, 1.0]);

        let z = center(&duplicate(&raw(&[0.0, 0.0])));
        assert_eq!(z.coords(), &[0.0, 0.0, 0.0, 0.0]);

        let c3 = center(&duplicate(&raw(&[2.0, -1.0, 5.0])));
        assert_eq!(c3.coords(), &[0.0, 0.0, -3.0, -3.0, 3.0, 3.0]);
    }

    #[test]
    fn normalize_scales_to_unit() {
        let c = center(&duplicate(&raw(&[1.0, 3.0])));
        let t = normalize(&c).unwrap();
        assert_eq!(t.coords(), &[-0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn normalize_rejects_zero() {
        let z = center(&duplicate(&raw(&[0.0, 0.0])));
        assert!(matches!(normalize(&z), Err(Error::DegenerateVector { .. })));
    }

    #[test]
    fn normalize_unit_vector_is_identity() {
        let p = PairedVector {
            coords: vec![-0.5, -0.5, 0.5, 0.5],
        };
        let t = normalize(&p).unwrap();
        assert_eq!(t.coords(), &[-0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn project_composes() {
        let t = project(&raw(&[1.0, 3.0])).unwrap();
        assert_eq!(t.coords(), &[-0.5, -0.5, 0.5, 0.5]);

        let swapped = project(&raw(&[3.0, 1.0])).unwrap();
        assert_eq!(swapped.coords(), &[0.5, 0.5, -0.5, -0.5]);

        assert!(project(&raw(&[4.0, 4.0, 4.0])).is_err());
    }

    #[test]
    fn distance_basics() {
        let a = project(&raw(&[1.0, 3.0])).unwrap();
        let b = project(&raw(&[3.0, 1.0])).unwrap();
        assert_eq!(geodesic_distance(&a, &a).unwrap(), 0.0);
        assert!((geodesic_distance(&a, &b).unwrap() - std::f64::consts::PI).abs() < 1e-12);

        // Orthogonal pre-shapes sit a quarter circle apart.
        let u = PreShapeVector::try_new(vec![-0.5, -0.5, 0.5, 0.5]).unwrap();
        let w = PreShapeVector::try_new(vec![0.5, -0.5, -0.5, 0.5]).unwrap();
        assert!((geodesic_distance(&u, &w).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let a = project(&raw(&[1.0, 3.0])).unwrap();
        let b = project(&raw(&[1.0, 3.0, 5.0])).unwrap();
        assert!(matches!(
            geodesic_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn raw_feature_validation() {
        assert!(RawFeature::new(vec![1.0]).is_err());
        assert!(RawFeature::new(vec![1.0, f64::NAN]).is_err());
        assert!(RawFeature::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn try_new_enforces_invariants() {
        assert!(PreShapeVector::try_new(vec![0.5, 0.5, 0.5, 0.5]).is_err()); // nonzero mean
        assert!(PreShapeVector::try_new(vec![-1.0, -1.0, 1.0, 1.0]).is_err()); // norm 2
        assert!(PreShapeVector::try_new(vec![-0.5, -0.5, 0.5, 0.5]).is_ok());
    }

    proptest! {
        #[test]
        fn projection_invariants(values in proptest::collection::vec(-100.0f64..100.0, 2..64)) {
            prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-6));
            let t = project(&raw(&values)).unwrap();
            let (mx, my) = t.axis_means();
            prop_assert!(mx.abs() <= 1e-12);
            prop_assert!(my.abs() <= 1e-12);
            prop_assert!((t.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn projection_shift_scale_invariance(
            values in proptest::collection::vec(-10.0f64..10.0, 2..32),
            scale in 0.01f64..100.0,
            shift in -100.0f64..100.0,
        ) {
            prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-3));
            let base = project(&raw(&values)).unwrap();
            let moved: Vec<f64> = values.iter().map(|v| scale * v + shift).collect();
            let proj = project(&raw(&moved)).unwrap();
            for (a, b) in base.coords().iter().zip(proj.coords().iter()) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }

        #[test]
        fn projection_is_idempotent(values in proptest::collection::vec(-50.0f64..50.0, 2..32)) {
            prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-6));
            let t = project(&raw(&values)).unwrap();
            let again = normalize(&center(&PairedVector { coords: t.coords().to_vec() })).unwrap();
            for (a, b) in t.coords().iter().zip(again.coords().iter()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn distance_metric_properties(
            a in proptest::collection::vec(-10.0f64..10.0, 8),
            b in proptest::collection::vec(-10.0f64..10.0, 8),
            c in proptest::collection::vec(-10.0f64..10.0, 8),
        ) {
            prop_assume!(a.iter().any(|v| (v - a[0]).abs() > 1e-3));
            prop_assume!(b.iter().any(|v| (v - b[0]).abs() > 1e-3));
            prop_assume!(c.iter().any(|v| (v - c[0]).abs() > 1e-3));
            let ta = project(&raw(&a)).unwrap();
            let tb = project(&raw(&b)).unwrap();
            let tc = project(&raw(&c)).unwrap();
            let dab = geodesic_distance(&ta, &tb).unwrap();
            let dba = geodesic_distance(&tb, &ta).unwrap();
            let dac = geodesic_distance(&ta, &tc).unwrap();
            let dcb = geodesic_distance(&tc, &tb).unwrap();
            prop_assert!((0.0..=std::f64::consts::PI).contains(&dab));
            prop_assert_eq!(dab, dba);
            prop_assert!(dab <= dac + dcb + 1e-9);
        }
    }
}
