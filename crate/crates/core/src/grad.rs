//! Exact analytic gradients of the training loss.
//!
//! The computation graph is small and fixed -- sigmoid, projection, slerp,
//! similarity loss, divergence loss -- so reverse mode is written out by
//! hand rather than through a general tape, and verified against central
//! finite differences.
//!
//! Chain segments, in backward order:
//!   (e) divergence loss: each sorted-position gradient routes back through
//!       the stable sort permutation recorded at forward time; the uniform
//!       reference z is a constant.
//!   (d) similarity loss: d/dr of sqrt(sum r^2) is r / loss, with the
//!       subgradient 0 at the (non-smooth) zero of the loss.
//!   (c) slerp, differentiating through the interpolation coefficients and
//!       through theta = arccos(rho) with rho clamped to
//!       [-1 + ARCCOS_CLAMP_EPS, 1 - ARCCOS_CLAMP_EPS] and a zero derivative
//!       when the clamp is active.
//!   (b) projection: duplication adjoint sums pair gradients, centering
//!       adjoint subtracts the per-axis gradient mean, normalization adjoint
//!       is (g - tau <tau, g>) / ||centered||.
//!   (a) sigmoid.

use crate::error::{Error, Result};
use crate::losses::{self, LossReport};
use crate::matrix::PreShapeMatrix;
use crate::preshape::NORM_EPS;

/// Clamp margin for the inner product feeding arccos inside the gradient;
/// bounds the 1/sqrt(1 - x^2) blowup near coincident or antipodal endpoints.
pub const ARCCOS_CLAMP_EPS: f64 = 1e-7;

/// Below this similarity loss the sqrt is treated as at its minimum and the
/// similarity term contributes a zero subgradient. On-curve rounding noise
/// produces losses around 1e-15, well under this.
pub const SIM_GRAD_EPS: f64 = 1e-12;

/// The learnable tensors: raw endpoints in feature space and the raw
/// (pre-sigmoid) sampling parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub v_start: Vec<f64>,
    pub v_end: Vec<f64>,
    pub t_raw: Vec<f64>,
}

impl ParamSet {
    pub fn d(&self) -> usize {
        self.v_start.len()
    }

    pub fn m(&self) -> usize {
        self.t_raw.len()
    }

    pub fn all_finite(&self) -> bool {
        self.v_start.iter().all(|v| v.is_finite())
            && self.v_end.iter().all(|v| v.is_finite())
            && self.t_raw.iter().all(|v| v.is_finite())
    }
}

/// Gradient of the total loss with respect to each tensor in [`ParamSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradSet {
    pub d_v_start: Vec<f64>,
    pub d_v_end: Vec<f64>,
    pub d_t_raw: Vec<f64>,
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    d: usize,
    m: usize,
    /// sigmoid(t_raw)
    t: Vec<f64>,
    tau_start: Vec<f64>,
    tau_end: Vec<f64>,
    cnorm_start: f64,
    cnorm_end: f64,
    rho_raw: f64,
    theta: f64,
    sin_theta: f64,
    coef_a: Vec<f64>,
    coef_b: Vec<f64>,
    /// r_i = 1 - <tau*_i, tau_i>
    resid: Vec<f64>,
    sim: f64,
    beta: f64,
    /// Stable ascending sort permutation of t.
    perm_t: Vec<usize>,
    /// sign(t_(j) - z_(j)) per sorted position.
    div_signs: Vec<f64>,
}

impl ForwardCache {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn tau_start(&self) -> &[f64] {
        &self.tau_start
    }

    pub fn tau_end(&self) -> &[f64] {
        &self.tau_end
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// duplicate + center + normalize over a raw slice, keeping the centered
/// norm for the backward pass. Matches `preshape::project` operation for
/// operation.
pub(crate) fn project_with_norm(v: &[f64]) -> Result<(Vec<f64>, f64)> {
    let d = v.len();
    let mut sum = 0.0;
    for &x in v {
        sum += x;
    }
    let mean = sum / d as f64;
    let mut coords = Vec::with_capacity(2 * d);
    for &x in v {
        coords.push(x - mean);
        coords.push(x - mean);
    }
    let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm <= NORM_EPS {
        return Err(Error::DegenerateVector {
            norm,
            eps: NORM_EPS,
        });
    }
    for c in coords.iter_mut() {
        *c /= norm;
    }
    Ok((coords, norm))
}

/// Full differentiable forward pass: sigmoid, projection of both endpoints,
/// batched slerp, similarity and divergence losses, weighted total. Caches
/// every intermediate the backward pass needs.
pub fn forward(
    params: &ParamSet,
    originals: &PreShapeMatrix,
    z: &[f64],
    beta: f64,
    theta_min: f64,
) -> Result<(LossReport, ForwardCache)> {
    let d = params.d();
    let m = params.m();
    if params.v_end.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: params.v_end.len(),
        });
    }
    if originals.dim() != 2 * d {
        return Err(Error::DimensionMismatch {
            expected: 2 * d,
            got: originals.dim(),
        });
    }
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    if originals.ncols() != m || z.len() != m {
        return Err(Error::LengthMismatch {
            left: originals.ncols(),
            right: m.max(z.len()),
        });
    }
    for &zi in z {
        if !(0.0..=1.0).contains(&zi) {
            return Err(Error::OutOfRange {
                value: zi,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }

    let t: Vec<f64> = params.t_raw.iter().map(|&x| sigmoid(x)).collect();

    let (tau_start, cnorm_start) = project_with_norm(&params.v_start)?;
    let (tau_end, cnorm_end) = project_with_norm(&params.v_end)?;

    let mut rho_raw = 0.0;
    for (a, b) in tau_start.iter().zip(tau_end.iter()) {
        rho_raw += a * b;
    }
    let theta = rho_raw.clamp(-1.0, 1.0).acos();
    if theta < theta_min || theta > std::f64::consts::PI - theta_min {
        return Err(Error::DegenerateCurve {
            theta,
            min: theta_min,
        });
    }
    let sin_theta = theta.sin();

    let dim = 2 * d;
    let mut coef_a = Vec::with_capacity(m);
    let mut coef_b = Vec::with_capacity(m);
    let mut sampled = Vec::with_capacity(dim * m);
    for &ti in &t {
        let a = ((1.0 - ti) * theta).sin() / sin_theta;
        let b = (ti * theta).sin() / sin_theta;
        coef_a.push(a);
        coef_b.push(b);
        for i in 0..dim {
            sampled.push(a * tau_start[i] + b * tau_end[i]);
        }
    }
    let sampled = PreShapeMatrix::from_raw(dim, sampled);

    // Similarity loss, keeping per-column residuals. Same reduction order as
    // losses::sim_loss, so the values agree bit for bit.
    let mut resid = Vec::with_capacity(m);
    let mut acc = 0.0;
    for j in 0..m {
        let s = sampled.col(j);
        let o = originals.col(j);
        let mut dot = 0.0;
        for i in 0..dim {
            dot += s[i] * o[i];
        }
        let r = 1.0 - dot;
        resid.push(r);
        acc += r * r;
    }
    let sim = acc.sqrt();

    // Divergence loss with the sort permutation recorded for routing.
    let perm_t = losses::sort_permutation(&t);
    let mut z_sorted = z.to_vec();
    z_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut div_signs = Vec::with_capacity(m);
    let mut div_acc = 0.0;
    for j in 0..m {
        let diff = t[perm_t[j]] - z_sorted[j];
        div_acc += diff.abs();
        div_signs.push(if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        });
    }
    let diverg = div_acc / m as f64;

    let report = losses::total_loss(sim, diverg, beta);
    let cache = ForwardCache {
        d,
        m,
        t,
        tau_start,
        tau_end,
        cnorm_start,
        cnorm_end,
        rho_raw,
        theta,
        sin_theta,
        coef_a,
        coef_b,
        resid,
        sim,
        beta,
        perm_t,
        div_signs,
    };
    Ok((report, cache))
}

/// Adjoint of duplicate + center + normalize: maps a gradient with respect
/// to the pre-shape vector back to the raw feature vector.
fn projection_adjoint(g_tau: &[f64], tau: &[f64], cnorm: f64, d: usize) -> Vec<f64> {
    // Normalization: g_c = (g - tau <tau, g>) / ||c||.
    let mut dot = 0.0;
    for (t, g) in tau.iter().zip(g_tau.iter()) {
        dot += t * g;
    }
    let mut g_c = Vec::with_capacity(2 * d);
    for i in 0..2 * d {
        g_c.push((g_tau[i] - tau[i] * dot) / cnorm);
    }

    // Centering: subtract the per-axis gradient means.
    let mut mean_x = 0.0;
    let mut mean_y = 0.0;
    for i in 0..d {
        mean_x += g_c[2 * i];
        mean_y += g_c[2 * i + 1];
    }
    mean_x /= d as f64;
    mean_y /= d as f64;

    // Duplication: sum the pair gradients.
    let mut g_v = Vec::with_capacity(d);
    for i in 0..d {
        g_v.push((g_c[2 * i] - mean_x) + (g_c[2 * i + 1] - mean_y));
    }
    g_v
}

/// Reverse pass over the cached forward. `originals` must be the matrix the
/// cache was produced with.
#[allow(clippy::needless_range_loop)]
pub fn backward(cache: &ForwardCache, originals: &PreShapeMatrix) -> GradSet {
    let d = cache.d;
    let m = cache.m;
    let dim = 2 * d;
    let theta = cache.theta;
    let sin_theta = cache.sin_theta;
    let cos_theta = theta.cos();

    let mut g_tau_start = vec![0.0; dim];
    let mut g_tau_end = vec![0.0; dim];
    let mut d_t = vec![0.0; m];
    let mut d_theta = 0.0;

    if cache.sim > SIM_GRAD_EPS {
        for j in 0..m {
            let w = cache.resid[j] / cache.sim;
            let o = originals.col(j);

            // <dL/dtau*_j, tau_start> and <dL/dtau*_j, tau_end> where
            // dL/dtau*_j = -w * tau_j.
            let mut dot_os = 0.0;
            let mut dot_oe = 0.0;
            for i in 0..dim {
                dot_os += o[i] * cache.tau_start[i];
                dot_oe += o[i] * cache.tau_end[i];
            }
            let alpha = -w * dot_os;
            let gamma = -w * dot_oe;

            let tj = cache.t[j];
            let cos_a = ((1.0 - tj) * theta).cos();
            let cos_b = (tj * theta).cos();

            // Through the interpolation coefficients w.r.t. t_j.
            let da_dt = -theta * cos_a / sin_theta;
            let db_dt = theta * cos_b / sin_theta;
            d_t[j] += alpha * da_dt + gamma * db_dt;

            // Through the coefficients w.r.t. theta.
            let sin_a = ((1.0 - tj) * theta).sin();
            let sin_b = (tj * theta).sin();
            let da_dtheta =
                ((1.0 - tj) * cos_a * sin_theta - sin_a * cos_theta) / (sin_theta * sin_theta);
            let db_dtheta = (tj * cos_b * sin_theta - sin_b * cos_theta) / (sin_theta * sin_theta);
            d_theta += alpha * da_dtheta + gamma * db_dtheta;

            // Direct coefficient-weighted pull on the endpoints.
            for i in 0..dim {
                g_tau_start[i] += cache.coef_a[j] * (-w) * o[i];
                g_tau_end[i] += cache.coef_b[j] * (-w) * o[i];
            }
        }

        // theta = arccos(rho); zero derivative when the clamp is active.
        let dtheta_drho = if cache.rho_raw.abs() <= 1.0 - ARCCOS_CLAMP_EPS {
            -1.0 / sin_theta
        } else {
            0.0
        };
        let scale = d_theta * dtheta_drho;
        for i in 0..dim {
            g_tau_start[i] += scale * cache.tau_end[i];
            g_tau_end[i] += scale * cache.tau_start[i];
        }
    }

    // Divergence term: route each sorted-position sign back to the original
    // index of t; z is constant.
    let w_div = cache.beta / m as f64;
    for j in 0..m {
        d_t[cache.perm_t[j]] += w_div * cache.div_signs[j];
    }

    // Sigmoid.
    let d_t_raw: Vec<f64> = d_t
        .iter()
        .zip(cache.t.iter())
        .map(|(g, &t)| g * t * (1.0 - t))
        .collect();

    let d_v_start = projection_adjoint(&g_tau_start, &cache.tau_start, cache.cnorm_start, d);
    let d_v_end = projection_adjoint(&g_tau_end, &cache.tau_end, cache.cnorm_end, d);

    GradSet {
        d_v_start,
        d_v_end,
        d_t_raw,
    }
}

/// Central finite differences of the total loss per scalar parameter, with
/// z held fixed across evaluations. The verification oracle for
/// [`backward`]; independent of it by construction.
pub fn finite_diff(
    params: &ParamSet,
    originals: &PreShapeMatrix,
    z: &[f64],
    beta: f64,
    theta_min: f64,
    h: f64,
) -> Result<GradSet> {
    let eval = |p: &ParamSet| -> Result<f64> {
        forward(p, originals, z, beta, theta_min).map(|(report, _)| report.total)
    };

    let diff_tensor = |select: &dyn Fn(&mut ParamSet) -> &mut Vec<f64>| -> Result<Vec<f64>> {
        let len = {
            let mut probe = params.clone();
            select(&mut probe).len()
        };
        let mut grads = Vec::with_capacity(len);
        for i in 0..len {
            let mut plus = params.clone();
            select(&mut plus)[i] += h;
            let mut minus = params.clone();
            select(&mut minus)[i] -= h;
            grads.push((eval(&plus)? - eval(&minus)?) / (2.0 * h));
        }
        Ok(grads)
    };

    Ok(GradSet {
        d_v_start: diff_tensor(&|p| &mut p.v_start)?,
        d_v_end: diff_tensor(&|p| &mut p.v_end)?,
        d_t_raw: diff_tensor(&|p| &mut p.t_raw)?,
    })
}
