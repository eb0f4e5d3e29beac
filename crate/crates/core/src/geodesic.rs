//! Great-circle geodesics between two pre-shape vectors.
//!
//! Two parameterizations of the same curve are provided: [`gamma`], indexed
//! by arc angle s in [0, theta], and [`interp`], the resampled form indexed
//! by a normalized z in [0, 1]. They agree to floating-point accuracy; the
//! resampled form is what the fitting loop differentiates through.

use crate::error::{Error, Result};
use crate::matrix::PreShapeMatrix;
use crate::preshape::{geodesic_distance, PreShapeVector};

/// Minimum admissible geodesic angle. Below it (or within it of pi) the
/// sin-theta division amplifies rounding, so construction fails loudly and
/// callers decide how to recover.
pub const THETA_MIN: f64 = 1e-4;

/// An ordered pair of pre-shape endpoints plus their geodesic angle.
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCurve {
    tau_start: PreShapeVector,
    tau_end: PreShapeVector,
    theta: f64,
}

impl GeodesicCurve {
    /// Validated constructor; computes theta and rejects near-coincident or
    /// near-antipodal endpoints.
    pub fn new(tau_start: PreShapeVector, tau_end: PreShapeVector) -> Result<Self> {
        Self::with_min_angle(tau_start, tau_end, THETA_MIN)
    }

    pub fn with_min_angle(
        tau_start: PreShapeVector,
        tau_end: PreShapeVector,
        theta_min: f64,
    ) -> Result<Self> {
        let theta = geodesic_distance(&tau_start, &tau_end)?;
        if theta < theta_min || theta > std::f64::consts::PI - theta_min {
            return Err(Error::DegenerateCurve {
                theta,
                min: theta_min,
            });
        }
        Ok(Self {
            tau_start,
            tau_end,
            theta,
        })
    }

    pub fn tau_start(&self) -> &PreShapeVector {
        &self.tau_start
    }

    pub fn tau_end(&self) -> &PreShapeVector {
        &self.tau_end
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Ambient dimension 2d.
    pub fn dim(&self) -> usize {
        self.tau_start.len()
    }
}

/// Point on the curve at arc angle `s` from the start:
/// `cos(s) * tau_start + sin(s) * (tau_end - tau_start * cos(theta)) / sin(theta)`.
pub fn gamma(curve: &GeodesicCurve, s: f64) -> Result<PreShapeVector> {
    if !(0.0..=curve.theta).contains(&s) {
        return Err(Error::OutOfRange {
            value: s,
            lo: 0.0,
            hi: curve.theta,
        });
    }
    let sin_theta = curve.theta.sin();
    let cos_theta = curve.theta.cos();
    let (cs, ss) = (s.cos(), s.sin());
    let coords = curve
        .tau_start
        .coords()
        .iter()
        .zip(curve.tau_end.coords().iter())
        .map(|(a, b)| cs * a + ss * (b - a * cos_theta) / sin_theta)
        .collect();
    Ok(PreShapeVector::from_raw_coords(coords))
}

/// Resampled form: `sin((1-z) theta) / sin(theta) * tau_start
/// + sin(z theta) / sin(theta) * tau_end`, z in [0, 1].
pub fn interp(curve: &GeodesicCurve, z: f64) -> Result<PreShapeVector> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::OutOfRange {
            value: z,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let sin_theta = curve.theta.sin();
    let a = ((1.0 - z) * curve.theta).sin() / sin_theta;
    let b = (z * curve.theta).sin() / sin_theta;
    let coords = curve
        .tau_start
        .coords()
        .iter()
        .zip(curve.tau_end.coords().iter())
        .map(|(s, e)| a * s + b * e)
        .collect();
    Ok(PreShapeVector::from_raw_coords(coords))
}

/// Batched [`interp`]: one column per parameter, theta and sin(theta)
/// computed once.
pub fn interp_batch(curve: &GeodesicCurve, t: &[f64]) -> Result<PreShapeMatrix> {
    for &z in t {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::OutOfRange {
                value: z,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let dim = curve.dim();
    let sin_theta = curve.theta.sin();
    let start = curve.tau_start.coords();
    let end = curve.tau_end.coords();
    let mut data = Vec::with_capacity(dim * t.len());
    for &z in t {
        let a = ((1.0 - z) * curve.theta).sin() / sin_theta;
        let b = (z * curve.theta).sin() / sin_theta;
        for i in 0..dim {
            data.push(a * start[i] + b * end[i]);
        }
    }
    Ok(PreShapeMatrix::from_raw(dim, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preshape::{project, RawFeature};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn pre(values: &[f64]) -> PreShapeVector {
        project(&RawFeature::new(values.to_vec()).unwrap()).unwrap()
    }

    fn orthogonal_pair() -> (PreShapeVector, PreShapeVector) {
        let u = PreShapeVector::try_new(vec![-0.5, -0.5, 0.5, 0.5]).unwrap();
        let w = PreShapeVector::try_new(vec![0.5, -0.5, -0.5, 0.5]).unwrap();
        (u, w)
    }

    /// Random pre-shape pair with angle bounded away from 0 and pi.
    fn random_curve(rng: &mut ChaCha12Rng, d: usize) -> GeodesicCurve {
        loop {
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ta = pre(&a);
            let tb = pre(&b);
            if let Ok(c) = GeodesicCurve::new(ta, tb) {
                if c.theta() > 0.1 && c.theta() < std::f64::consts::PI - 0.1 {
                    return c;
                }
            }
        }
    }

    #[test]
    fn construction_rejects_degenerate() {
        let t = pre(&[1.0, 3.0]);
        assert!(matches!(
            GeodesicCurve::new(t.clone(), t.clone()),
            Err(Error::DegenerateCurve { .. })
        ));
        // Antipodal endpoints are rejected for the same sin-theta reason.
        let anti = pre(&[3.0, 1.0]);
        assert!(matches!(
            GeodesicCurve::new(t, anti),
            Err(Error::DegenerateCurve { .. })
        ));
    }

    #[test]
    fn construction_orthogonal() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u, w).unwrap();
        assert!((c.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn gamma_hits_endpoints() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u.clone(), w.clone()).unwrap();
        let at0 = gamma(&c, 0.0).unwrap();
        let at_theta = gamma(&c, c.theta()).unwrap();
        for (a, b) in at0.coords().iter().zip(u.coords().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in at_theta.coords().iter().zip(w.coords().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_midpoint_orthogonal() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u.clone(), w.clone()).unwrap();
        let mid = gamma(&c, std::f64::consts::FRAC_PI_4).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for ((m, a), b) in mid.coords().iter().zip(u.coords()).zip(w.coords()) {
            assert!((m - (a + b) * inv_sqrt2).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_rejects_out_of_range() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u, w).unwrap();
        assert!(gamma(&c, -0.1).is_err());
        assert!(gamma(&c, c.theta() + 0.1).is_err());
    }

    #[test]
    fn interp_hits_endpoints() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u.clone(), w.clone()).unwrap();
        for (a, b) in interp(&c, 0.0).unwrap().coords().iter().zip(u.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in interp(&c, 1.0).unwrap().coords().iter().zip(w.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(interp(&c, 1.0 + 1e-9).is_err());
        assert!(interp(&c, -1e-9).is_err());
    }

    #[test]
    fn interp_batch_shapes() {
        let (u, w) = orthogonal_pair();
        let c = GeodesicCurve::new(u.clone(), w.clone()).unwrap();

        let m = interp_batch(&c, &[0.0, 1.0]).unwrap();
        assert_eq!(m.ncols(), 2);
        assert_eq!(m.col(0), u.coords());
        assert_eq!(m.col(1), w.coords());

        let empty = interp_batch(&c, &[]).unwrap();
        assert_eq!(empty.ncols(), 0);
        assert_eq!(empty.dim(), 4);

        let twice = interp_batch(&c, &[0.5, 0.5]).unwrap();
        assert_eq!(twice.col(0), twice.col(1));
    }

    #[test]
    fn equivalence_of_parameterizations() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut max_diff = 0.0f64;
        for _ in 0..200 {
            let d = *[4usize, 8, 16].get(rng.gen_range(0..3)).unwrap();
            let c = random_curve(&mut rng, d);
            let z: f64 = rng.gen();
            let via_gamma = gamma(&c, z * c.theta()).unwrap();
            let via_interp = interp(&c, z).unwrap();
            for (a, b) in via_gamma.coords().iter().zip(via_interp.coords()) {
                max_diff = max_diff.max((a - b).abs());
            }
        }
        assert!(max_diff <= 1e-10, "max diff {max_diff:.3e}");
    }

    proptest! {
        #[test]
        fn on_sphere_closure_and_additivity(
            a in proptest::collection::vec(-5.0f64..5.0, 6),
            b in proptest::collection::vec(-5.0f64..5.0, 6),
            z in 0.0f64..1.0,
        ) {
            prop_assume!(a.iter().any(|v| (v - a[0]).abs() > 1e-3));
            prop_assume!(b.iter().any(|v| (v - b[0]).abs() > 1e-3));
            let ta = pre(&a);
            let tb = pre(&b);
            let theta = geodesic_distance(&ta, &tb).unwrap();
            prop_assume!(theta > 0.05 && theta < std::f64::consts::PI - 0.05);
            let c = GeodesicCurve::new(ta.clone(), tb.clone()).unwrap();
            let p = interp(&c, z).unwrap();

            // Closure: still centered and unit length.
            let (mx, my) = p.axis_means();
            prop_assert!(mx.abs() <= 1e-10 && my.abs() <= 1e-10);
            prop_assert!((p.norm() - 1.0).abs() <= 1e-10);

            // Additivity and monotonicity along the arc.
            let d_start = geodesic_distance(&ta, &p).unwrap();
            let d_end = geodesic_distance(&p, &tb).unwrap();
            prop_assert!((d_start + d_end - theta).abs() <= 1e-9);
            prop_assert!((d_start - z * theta).abs() <= 1e-9);
        }
    }
}
