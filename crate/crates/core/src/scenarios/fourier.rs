//! Smooth test fields built from a finite sum of sine modes.

use alloc::vec;
use alloc::vec::Vec;

use crate::SmoothField;

/// One term `amplitude · sin(k·x + phase)` of output component `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub output: usize,
    pub amplitude: f64,
    pub wavevector: Vec<f64>,
    pub phase: f64,
}

/// `f_o(x) = offset_o + Σ_{modes of o} a sin(k·x + φ)`, with analytic Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    pub in_dim: usize,
    pub offset: Vec<f64>,
    pub modes: Vec<FourierMode>,
}

impl FourierField {
    pub fn new(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            offset: vec![0.0; out_dim],
            modes: Vec::new(),
        }
    }

    pub fn with_mode(
        mut self,
        output: usize,
        amplitude: f64,
        wavevector: Vec<f64>,
        phase: f64,
    ) -> Self {
        assert!(output < self.offset.len() && wavevector.len() == self.in_dim);
        self.modes.push(FourierMode {
            output,
            amplitude,
            wavevector,
            phase,
        });
        self
    }

    pub fn out_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.offset.clone();
        for m in &self.modes {
            out[m.output] += m.amplitude * libm::sin(arg(m, x));
        }
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.in_dim;
        let mut out = vec![0.0; self.out_dim() * n];
        for m in &self.modes {
            let c = m.amplitude * libm::cos(arg(m, x));
            for i in 0..n {
                out[m.output * n + i] += c * m.wavevector[i];
            }
        }
        out
    }

    /// Second derivatives, layout `[(o * n + j) * n + l]`.
    pub fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.in_dim;
        let mut out = vec![0.0; self.out_dim() * n * n];
        for m in &self.modes {
            let s = -m.amplitude * libm::sin(arg(m, x));
            for j in 0..n {
                for l in 0..n {
                    out[(m.output * n + j) * n + l] += s * m.wavevector[j] * m.wavevector[l];
                }
            }
        }
        out
    }

    pub fn to_field(&self) -> SmoothField {
        let (a, b) = (self.clone(), self.clone());
        SmoothField::new(self.in_dim, self.out_dim(), move |x| a.eval(x))
            .with_jacobian(move |x| b.jacobian(x))
    }
}

fn arg(m: &FourierMode, x: &[f64]) -> f64 {
    m.phase + m.wavevector.iter().zip(x).map(|(k, v)| k * v).sum::<f64>()
}
