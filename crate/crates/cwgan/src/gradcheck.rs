//! Validation of the critic's analytic input-gradient against central
//! finite differences (the same gradient the penalty term trains on).

use crate::error::Result;
use crate::net::Critic;
use crate::params::ParamStore;
use pyrotime_autodiff::{Tape, Tensor};
use pyrotime_core::rng;
use rand::Rng;

/// Compares the analytic gradient of the critic with respect to its arrival
/// argument against central finite differences of step `step`, at
/// `n_probes` random pixels of the probe pair. Returns the maximum relative
/// error.
pub fn gradient_check(
    critic: &Critic,
    cparams: &ParamStore,
    tau: &[f64],
    tau_bar: &[f64],
    step: f64,
    n_probes: usize,
    seed: u64,
) -> Result<f64> {
    let size = critic.config.input_size;
    let n = size * size;
    assert_eq!(tau.len(), n, "probe arrival must be {size}x{size}");
    assert_eq!(tau_bar.len(), n, "probe measurement must be {size}x{size}");

    let eval = |tau_data: &[f64]| -> f64 {
        let mut t = Tape::new();
        let params = cparams.leaves(&mut t);
        let a = t.leaf(Tensor::from_vec(&[1, 1, size, size], tau_data.to_vec()));
        let m = t.leaf(Tensor::from_vec(&[1, 1, size, size], tau_bar.to_vec()));
        let d = critic.forward(&mut t, &params, a, m);
        t.value(d).data()[0]
    };

    // Analytic input gradient.
    let analytic: Vec<f64> = {
        let mut t = Tape::new();
        let params = cparams.leaves(&mut t);
        let a = t.leaf(Tensor::from_vec(&[1, 1, size, size], tau.to_vec()));
        let m = t.leaf(Tensor::from_vec(&[1, 1, size, size], tau_bar.to_vec()));
        let d = critic.forward(&mut t, &params, a, m);
        let s = t.sum_batch(d);
        match t.grad(s, &[a])[0] {
            Some(g) => t.value(g).data().to_vec(),
            None => vec![0.0; n],
        }
    };

    let mut rng = rng::stream_from(seed);
    let mut max_rel = 0.0f64;
    let mut perturbed = tau.to_vec();
    for _ in 0..n_probes {
        let k = rng.gen_range(0..n);
        perturbed[k] = tau[k] + step;
        let fp = eval(&perturbed);
        perturbed[k] = tau[k] - step;
        let fm = eval(&perturbed);
        perturbed[k] = tau[k];
        let numeric = (fp - fm) / (2.0 * step);
        let a = analytic[k];
        let denom = a.abs().max(numeric.abs());
        let rel = if denom <= 1e-9 {
            0.0
        } else {
            (a - numeric).abs() / denom
        };
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::CriticConfig;
    use pyrotime_core::rng::stream_from;
    use rand::Rng;

    fn probe_critic(seed: u64) -> (Critic, ParamStore) {
        let cfg = CriticConfig {
            levels: 2,
            base_width: 4,
            dense_k: 4,
            dense_n: 2,
            fc_widths: vec![16, 1],
            input_size: 16,
        };
        let mut store = ParamStore::new();
        let mut rng = stream_from(seed);
        let critic = Critic::new(cfg, &mut store, &mut rng).unwrap();
        (critic, store)
    }

    fn probe_pair(seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = stream_from(seed);
        let tau = (0..256).map(|_| rng.gen_range(0.0..1.0)).collect();
        let bar = (0..256).map(|_| rng.gen_range(0.0..1.0)).collect();
        (tau, bar)
    }

    #[test]
    fn untrained_critic_matches_finite_differences() {
        let (critic, store) = probe_critic(21);
        let (tau, bar) = probe_pair(22);
        let err = gradient_check(&critic, &store, &tau, &bar, 1e-4, 100, 23).unwrap();
        assert!(err < 1e-3, "max relative error {err}");
    }

    #[test]
    fn zero_weight_critic_has_exactly_zero_gradients() {
        let (critic, mut store) = probe_critic(31);
        for t in store.tensors_mut() {
            for v in t.data_mut() {
                *v = 0.0;
            }
        }
        let (tau, bar) = probe_pair(32);
        let err = gradient_check(&critic, &store, &tau, &bar, 1e-4, 50, 33).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn error_shrinks_with_the_step() {
        let (critic, store) = probe_critic(41);
        let (tau, bar) = probe_pair(42);
        let coarse = gradient_check(&critic, &store, &tau, &bar, 1e-3, 60, 43).unwrap();
        let fine = gradient_check(&critic, &store, &tau, &bar, 1e-4, 60, 43).unwrap();
        assert!(
            fine <= coarse,
            "central differences should improve with a smaller step: {coarse} -> {fine}"
        );
    }
}
