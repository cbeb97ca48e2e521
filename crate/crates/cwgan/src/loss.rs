//! The adversarial objective: empirical Wasserstein-1 estimate, gradient
//! penalty, and the critic/generator losses assembled on the tape.

use crate::net::{Critic, Generator};
use pyrotime_autodiff::{Tape, Var};

/// Empirical Wasserstein-1 estimate from critic scores: the difference of
/// the mean critic output on real pairs and on generated pairs.
pub fn empirical_w1(real_scores: &[f64], fake_scores: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    mean(real_scores) - mean(fake_scores)
}

/// All loss nodes assembled by [`wgan_losses`].
pub struct LossVars {
    pub critic_loss: Var,
    pub gen_loss: Var,
    pub wasserstein_estimate: Var,
    pub gp_term: Var,
}

/// Builds the Wasserstein estimate from real and generated arrivals
/// (generated detached), plus the gradient penalty over random
/// interpolates. Shared by the critic training step and [`wgan_losses`].
pub fn critic_objective(
    t: &mut Tape,
    critic: &Critic,
    cparams: &[Var],
    tau: Var,
    fake_detached: Var,
    tau_bar: Var,
    eps_mix: Var,
    gp_weight: f64,
) -> (Var, Var, Var) {
    let d_real = critic.forward(t, cparams, tau, tau_bar);
    let d_fake = critic.forward(t, cparams, fake_detached, tau_bar);
    let mean_real = t.mean_batch(d_real);
    let mean_fake = t.mean_batch(d_fake);
    let w_est = t.sub(mean_real, mean_fake);

    // Interpolates tau_hat = eps * tau + (1 - eps) * tau_g, one eps per
    // sample; the penalty differentiates the critic with respect to the
    // arrival argument only.
    let shape = t.value(tau).shape().to_vec();
    let (c, h, w) = (shape[1], shape[2], shape[3]);
    let eps_b = t.broadcast_chw(eps_mix, c, h, w);
    let neg_eps = t.scale(eps_b, -1.0);
    let one_minus = t.add_scalar(neg_eps, 1.0);
    let real_part = t.mul(eps_b, tau);
    let fake_part = t.mul(one_minus, fake_detached);
    let tau_hat = t.add(real_part, fake_part);

    let d_hat = critic.forward(t, cparams, tau_hat, tau_bar);
    let d_hat_sum = t.sum_batch(d_hat);
    let g = t.grad(d_hat_sum, &[tau_hat])[0]
        .expect("interpolate feeds the critic, so its gradient exists");
    let g2 = t.mul(g, g);
    let norm_sq = t.sum_chw(g2);
    let norm_sq_eps = t.add_scalar(norm_sq, 1e-12);
    let norms = t.pow_const(norm_sq_eps, 0.5);
    let shifted = t.add_scalar(norms, -1.0);
    let shifted_sq = t.mul(shifted, shifted);
    let gp = t.mean_batch(shifted_sq);

    let neg_w = t.scale(w_est, -1.0);
    let weighted_gp = t.scale(gp, gp_weight);
    let critic_loss = t.add(neg_w, weighted_gp);
    (critic_loss, w_est, gp)
}

/// Generator loss: `-mean d(g(z, tau_bar), tau_bar)`, gradients flowing
/// through the critic into the generator.
pub fn generator_objective(
    t: &mut Tape,
    critic: &Critic,
    cparams: &[Var],
    fake: Var,
    tau_bar: Var,
) -> Var {
    let d_fake = critic.forward(t, cparams, fake, tau_bar);
    let mean_fake = t.mean_batch(d_fake);
    t.scale(mean_fake, -1.0)
}

/// The full objective on one batch: runs the generator, then assembles the
/// critic loss (with the generated batch detached), the generator loss, the
/// Wasserstein estimate, and the gradient-penalty term.
#[allow(clippy::too_many_arguments)]
pub fn wgan_losses(
    t: &mut Tape,
    gen: &Generator,
    critic: &Critic,
    gparams: &[Var],
    cparams: &[Var],
    tau: Var,
    tau_bar: Var,
    z: Var,
    eps_mix: Var,
    gp_weight: f64,
) -> LossVars {
    let fake = gen.forward(t, gparams, z, tau_bar);
    let fake_detached = t.detach(fake);
    let (critic_loss, wasserstein_estimate, gp_term) = critic_objective(
        t,
        critic,
        cparams,
        tau,
        fake_detached,
        tau_bar,
        eps_mix,
        gp_weight,
    );
    let gen_loss = generator_objective(t, critic, cparams, fake, tau_bar);
    LossVars {
        critic_loss,
        gen_loss,
        wasserstein_estimate,
        gp_term,
    }
}
