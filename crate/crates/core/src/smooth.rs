//! Vector-valued smooth maps `ℝⁿ → ℝᵐ` with optional analytic Jacobians.
//!
//! Every structure function, section coefficient and form coefficient in the
//! crate is a [`SmoothField`]. When no Jacobian callback is supplied the
//! derivative falls back to second-order central differences.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct SmoothField {
    in_dim: usize,
    out_dim: usize,
    value: MapFn,
    jacobian: Option<MapFn>,
}

impl fmt::Debug for SmoothField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothField")
            .field("in_dim", &self.in_dim)
            .field("out_dim", &self.out_dim)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl SmoothField {
    pub fn new<F>(in_dim: usize, out_dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            in_dim,
            out_dim,
            value: Arc::new(f),
            jacobian: None,
        }
    }

    /// Attaches an analytic Jacobian. The callback returns `out_dim × in_dim`
    /// entries, row-major: entry `o * in_dim + i` is `∂f_o/∂x^i`.
    pub fn with_jacobian<J>(mut self, j: J) -> Self
    where
        J: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn constant(in_dim: usize, values: Vec<f64>) -> Self {
        let out_dim = values.len();
        Self::new(in_dim, out_dim, move |_| values.clone())
            .with_jacobian(move |_| vec![0.0; out_dim * in_dim])
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self::constant(in_dim, vec![0.0; out_dim])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// # Panics
    /// If the callback returns a vector of the wrong length.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim, "SmoothField input length");
        let v = (self.value)(x);
        assert_eq!(v.len(), self.out_dim, "SmoothField callback output length");
        v
    }

    /// Jacobian at `x`, analytic when available, otherwise central differences
    /// with step `h`.
    pub fn jacobian(&self, x: &[f64], h: f64) -> Vec<f64> {
        match &self.jacobian {
            Some(j) => {
                let v = j(x);
                assert_eq!(
                    v.len(),
                    self.out_dim * self.in_dim,
                    "SmoothField jacobian output length"
                );
                v
            }
            None => self.fd_jacobian(x, h),
        }
    }

    /// Central-difference Jacobian, ignoring any analytic callback.
    pub fn fd_jacobian(&self, x: &[f64], h: f64) -> Vec<f64> {
        let (n, m) = (self.in_dim, self.out_dim);
        let mut jac = vec![0.0; m * n];
        let mut xp = x.to_vec();
        for i in 0..n {
            let xi = x[i];
            xp[i] = xi + h;
            let fp = self.eval(&xp);
            xp[i] = xi - h;
            let fm = self.eval(&xp);
            xp[i] = xi;
            for o in 0..m {
                jac[o * n + i] = (fp[o] - fm[o]) / (2.0 * h);
            }
        }
        jac
    }

    /// Derivative along `dir` (length `in_dim`).
    pub fn directional(&self, x: &[f64], dir: &[f64], h: f64) -> Vec<f64> {
        let jac = self.jacobian(x, h);
        let n = self.in_dim;
        (0..self.out_dim)
            .map(|o| (0..n).map(|i| jac[o * n + i] * dir[i]).sum())
            .collect()
    }

    /// Drops the analytic Jacobian so that derivatives go through finite
    /// differences.
    pub fn without_jacobian(&self) -> Self {
        Self {
            jacobian: None,
            ..self.clone()
        }
    }

    /// Precomposes with the projection onto the first `in_dim` coordinates of
    /// a space of dimension `total`.
    pub fn extend_domain(&self, total: usize) -> Self {
        assert!(total >= self.in_dim);
        let inner = self.clone();
        let n = self.in_dim;
        let m = self.out_dim;
        let base = self.clone();
        Self::new(total, m, move |x| inner.eval(&x[..n])).with_jacobian(move |x| {
            let j = base.jacobian(&x[..n], crate::DEFAULT_FD_STEP);
            let mut out = vec![0.0; m * total];
            for o in 0..m {
                out[o * total..o * total + n].copy_from_slice(&j[o * n..(o + 1) * n]);
            }
            out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_jacobian_matches_analytic_to_second_order() {
        let f = SmoothField::new(2, 2, |x| vec![libm::sin(x[0]) * x[1], x[0] * x[0] * x[1]])
            .with_jacobian(|x| {
                vec![
                    libm::cos(x[0]) * x[1],
                    libm::sin(x[0]),
                    2.0 * x[0] * x[1],
                    x[0] * x[0],
                ]
            });
        let x = [0.3, -1.2];
        let mut errs = [0.0; 2];
        for (k, h) in [1e-2, 5e-3].into_iter().enumerate() {
            let a = f.jacobian(&x, h);
            let b = f.fd_jacobian(&x, h);
            errs[k] = a
                .iter()
                .zip(&b)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
        }
        let ratio = errs[0] / errs[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn extend_domain_ignores_trailing_coordinates() {
        let f = SmoothField::new(1, 1, |x| vec![x[0] * x[0]]);
        let g = f.extend_domain(3);
        assert_eq!(g.eval(&[2.0, 7.0, 9.0]), vec![4.0]);
        let j = g.jacobian(&[2.0, 7.0, 9.0], 1e-4);
        assert!((j[0] - 4.0).abs() < 1e-8);
        assert_eq!(&j[1..], &[0.0, 0.0]);
    }
}
