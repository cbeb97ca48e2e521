//! Named parameter storage and the adaptive-moment optimizer.

use crate::error::{Error, Result};
use pyrotime_autodiff::{Tape, Tensor, Var};

/// Learnable tensors in registration order. Registration order is the
/// serialization order, so checkpoints are stable across runs.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, tensor: Tensor) -> usize {
        self.names.push(name.into());
        self.tensors.push(tensor);
        self.tensors.len() - 1
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn numel(&self) -> usize {
        self.tensors.iter().map(|t| t.numel()).sum()
    }

    /// Registers every parameter as a leaf on `tape`, in order.
    pub fn leaves(&self, tape: &mut Tape) -> Vec<Var> {
        self.tensors.iter().map(|t| tape.leaf(t.clone())).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors.iter().all(|t| t.is_finite())
    }

    pub fn replace_tensors(&mut self, tensors: Vec<Tensor>) -> Result<()> {
        if tensors.len() != self.tensors.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} tensors, got {}",
                self.tensors.len(),
                tensors.len()
            )));
        }
        for (cur, new) in self.tensors.iter().zip(&tensors) {
            if cur.shape() != new.shape() {
                return Err(Error::ShapeMismatch(format!(
                    "tensor shape {:?} does not match stored {:?}",
                    new.shape(),
                    cur.shape()
                )));
            }
        }
        self.tensors = tensors;
        Ok(())
    }
}

/// Adam with the usual bias correction. Gradients that are `None` (no
/// influence on the loss) count as zero.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl Adam {
    pub fn new(store: &ParamStore, learning_rate: f64, beta1: f64, beta2: f64) -> Self {
        Adam {
            learning_rate,
            beta1,
            beta2,
            epsilon: 1e-8,
            step_count: 0,
            m: store
                .tensors()
                .iter()
                .map(|t| Tensor::zeros(t.shape()))
                .collect(),
            v: store
                .tensors()
                .iter()
                .map(|t| Tensor::zeros(t.shape()))
                .collect(),
        }
    }

    pub fn moments(&self) -> (&[Tensor], &[Tensor]) {
        (&self.m, &self.v)
    }

    pub fn restore_moments(&mut self, m: Vec<Tensor>, v: Vec<Tensor>, step_count: u64) {
        self.m = m;
        self.v = v;
        self.step_count = step_count;
    }

    pub fn step(&mut self, store: &mut ParamStore, grads: &[Option<Tensor>]) {
        assert_eq!(grads.len(), store.len(), "gradient count mismatch");
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for (k, g) in grads.iter().enumerate() {
            let p = &mut store.tensors_mut()[k];
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            let gz;
            let g = match g {
                Some(g) => g,
                None => {
                    gz = Tensor::zeros(p.shape());
                    &gz
                }
            };
            let pd = p.data_mut();
            let md = m.data_mut();
            let vd = v.data_mut();
            let gd = g.data();
            for i in 0..pd.len() {
                md[i] = self.beta1 * md[i] + (1.0 - self.beta1) * gd[i];
                vd[i] = self.beta2 * vd[i] + (1.0 - self.beta2) * gd[i] * gd[i];
                let mh = md[i] / bc1;
                let vh = vd[i] / bc2;
                pd[i] -= self.learning_rate * mh / (vh.sqrt() + self.epsilon);
            }
        }
    }
}

/// Plain gradient step `p += lr * g` (ascent when `lr > 0`); used by the
/// critic-ascent property check.
pub fn sgd_step(store: &mut ParamStore, grads: &[Option<Tensor>], lr: f64) {
    for (k, g) in grads.iter().enumerate() {
        if let Some(g) = g {
            let p = store.tensors_mut()[k].data_mut();
            for (pi, gi) in p.iter_mut().zip(g.data()) {
                *pi += lr * gi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adam_moves_toward_a_quadratic_minimum() {
        let mut store = ParamStore::new();
        store.add("x", Tensor::from_vec(&[2], vec![3.0, -2.0]));
        let mut opt = Adam::new(&store, 0.01, 0.5, 0.9);
        for _ in 0..2000 {
            let g = store.tensors()[0].map(|x| 2.0 * x);
            opt.step(&mut store, &[Some(g)]);
        }
        // Adam dithers near the minimum at the scale of the learning rate.
        for &x in store.tensors()[0].data() {
            assert!(x.abs() < 0.05, "did not converge: {x}");
        }
    }

    #[test]
    fn none_gradients_leave_params_nearly_fixed() {
        let mut store = ParamStore::new();
        store.add("x", Tensor::from_vec(&[1], vec![1.0]));
        let mut opt = Adam::new(&store, 0.1, 0.5, 0.9);
        opt.step(&mut store, &[None]);
        assert_eq!(store.tensors()[0].data()[0], 1.0);
    }
}
