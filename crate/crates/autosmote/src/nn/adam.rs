//! Adam with bias correction and global gradient-norm clipping.

use serde::{Deserialize, Serialize};

/// Optimizer state over one flat parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

/// What one [`Adam::step`] did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Global L2 norm of the incoming gradient (before clipping).
    pub grad_norm: f64,
    /// Whether the gradient was rescaled to the clip threshold.
    pub clipped: bool,
    /// Whether the update was abandoned because of non-finite gradients.
    pub skipped: bool,
}

impl Adam {
    /// Standard coefficients: beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    pub fn new(n_params: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn n_params(&self) -> usize {
        self.m.len()
    }

    /// Apply one update in place. Non-finite gradients skip the update
    /// entirely (parameters and moments untouched); a finite gradient whose
    /// global norm exceeds `max_norm` is scaled down to that norm first.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        max_norm: Option<f64>,
    ) -> StepReport {
        assert_eq!(params.len(), self.m.len(), "parameter count mismatch");
        assert_eq!(grads.len(), self.m.len(), "gradient count mismatch");

        let sq_sum: f64 = grads.iter().map(|g| g * g).sum();
        if !sq_sum.is_finite() {
            return StepReport {
                grad_norm: f64::INFINITY,
                clipped: false,
                skipped: true,
            };
        }
        let grad_norm = sq_sum.sqrt();
        let scale = match max_norm {
            Some(limit) if grad_norm > limit => limit / grad_norm,
            _ => 1.0,
        };

        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i] * scale;
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        StepReport {
            grad_norm,
            clipped: scale != 1.0,
            skipped: false,
        }
    }
}
