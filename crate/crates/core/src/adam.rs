//! Adam optimizer over the three learnable tensors of a fit.

use crate::grad::{GradSet, ParamSet};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First/second moment accumulators per parameter tensor plus the shared
/// step counter. Single-owner mutable state: one fitting job must not share
/// it across threads.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m_v_start: Vec<f64>,
    pub v_v_start: Vec<f64>,
    pub m_v_end: Vec<f64>,
    pub v_v_end: Vec<f64>,
    pub m_t_raw: Vec<f64>,
    pub v_t_raw: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(d: usize, m: usize) -> Self {
        Self {
            m_v_start: vec![0.0; d],
            v_v_start: vec![0.0; d],
            m_v_end: vec![0.0; d],
            v_v_end: vec![0.0; d],
            m_t_raw: vec![0.0; m],
            v_t_raw: vec![0.0; m],
            step: 0,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
        }
    }
}

/// One Adam update with bias correction. `lr_endpoints` applies to the two
/// endpoint vectors, `lr_t` to the raw sampling parameters.
pub fn adam_step(
    params: &mut ParamSet,
    grads: &GradSet,
    state: &mut AdamState,
    lr_endpoints: f64,
    lr_t: f64,
) {
    state.step += 1;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let bc1 = 1.0 - b1.powi(state.step as i32);
    let bc2 = 1.0 - b2.powi(state.step as i32);

    let update = |x: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], lr: f64| {
        for i in 0..x.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            x[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    };

    update(
        &mut params.v_start,
        &grads.d_v_start,
        &mut state.m_v_start,
        &mut state.v_v_start,
        lr_endpoints,
    );
    update(
        &mut params.v_end,
        &grads.d_v_end,
        &mut state.m_v_end,
        &mut state.v_v_end,
        lr_endpoints,
    );
    update(
        &mut params.t_raw,
        &grads.d_t_raw,
        &mut state.m_t_raw,
        &mut state.v_t_raw,
        lr_t,
    );
}
