use super::network::Scalar;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Bias-corrected Adam with per-parameter first and second moments.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            t: 0,
            beta1: BETA1,
            beta2: BETA2,
            eps: EPSILON,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T], lr: f64) {
        assert_eq!(
            params.len(),
            self.m.len(),
            "parameter count changed under the optimizer"
        );
        assert_eq!(grads.len(), self.m.len(), "gradient length mismatch");
        self.t += 1;
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let c1 = T::of(1.0 - self.beta1.powi(self.t as i32));
        let c2 = T::of(1.0 - self.beta2.powi(self.t as i32));
        let (lr, eps, one) = (T::of(lr), T::of(self.eps), T::one());
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = b1 * *m + (one - b1) * g;
            *v = b2 * *v + (one - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![0.5f64, -1.0, 2.0];
        let mut st = AdamState::new(3);
        st.step(&mut p, &[0.0; 3], 0.001);
        assert_eq!(p, vec![0.5, -1.0, 2.0]);
        assert_eq!(st.steps(), 1);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let g = [0.3f64, -4.0, 1e-3];
        let mut p = vec![0.0f64; 3];
        let mut st = AdamState::new(3);
        st.step(&mut p, &g, 0.001);
        for (pi, gi) in p.iter().zip(g) {
            // |g| / (|g| + eps) * lr
            let expected = -gi.signum() * 0.001 * gi.abs() / (gi.abs() + 1e-8);
            assert!((pi - expected).abs() < 1e-15, "{pi} vs {expected}");
        }
    }

    #[test]
    fn elementwise_update_commutes_with_permutation() {
        let g = [0.1f64, -0.2, 0.3, 0.05];
        let perm = [2usize, 0, 3, 1];
        let mut a = vec![1.0f64, 2.0, 3.0, 4.0];
        let mut b: Vec<f64> = perm.iter().map(|&i| a[i]).collect();
        let gb: Vec<f64> = perm.iter().map(|&i| g[i]).collect();
        let (mut sa, mut sb) = (AdamState::new(4), AdamState::new(4));
        for _ in 0..2 {
            sa.step(&mut a, &g, 0.01);
            sb.step(&mut b, &gb, 0.01);
        }
        for (k, &i) in perm.iter().enumerate() {
            assert_eq!(b[k], a[i]);
        }
    }
}
