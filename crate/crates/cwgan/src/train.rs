//! Alternating adversarial training with per-epoch validation tracking.
//!
//! Every epoch derives its RNG streams from (seed, epoch, purpose), so a
//! run resumed from a checkpoint at an epoch boundary consumes exactly the
//! same random numbers as an uninterrupted run and reproduces its logs
//! bit for bit.

use crate::checkpoint::{self, Checkpoint};
use crate::error::{Error, Result};
use crate::loss::{critic_objective, generator_objective};
use crate::net::{sample_latent, Critic, CriticConfig, Generator, GeneratorConfig};
use crate::params::{Adam, ParamStore};
use pyrotime_autodiff::{Tape, Tensor};
use pyrotime_core::rng;
use pyrotime_core::synthmeas::{DatasetManifest, Split};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Training-loop hyperparameters. Defaults are the canonical WGAN-GP
/// settings with a 200-epoch schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Critic updates per generator update.
    pub critic_steps: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Gradient-penalty weight.
    pub gp_weight: f64,
    pub seed: u64,
    /// Epochs between checkpoints (0 = only the final one).
    pub checkpoint_interval: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 16,
            critic_steps: 5,
            learning_rate: 1e-4,
            beta1: 0.5,
            beta2: 0.9,
            gp_weight: 10.0,
            seed: 0,
            checkpoint_interval: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.critic_steps == 0 {
            return Err(Error::invalid("epochs, batch size, and critic steps must be >= 1"));
        }
        if !(self.gp_weight >= 0.0) || !(self.learning_rate > 0.0) {
            return Err(Error::invalid("bad learning rate or penalty weight"));
        }
        Ok(())
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean per-sample L2 mismatch between generated and true arrivals
    /// over the validation split.
    pub mismatch: f64,
    /// Mean empirical Wasserstein estimate over the epoch's critic steps.
    pub wasserstein: f64,
    pub critic_loss: f64,
    pub gen_loss: f64,
    pub gp: f64,
}

/// The two subnetworks with their weights.
pub struct TrainedModel {
    pub gen_config: GeneratorConfig,
    pub critic_config: CriticConfig,
    pub gen: Generator,
    pub critic: Critic,
    pub gen_params: ParamStore,
    pub critic_params: ParamStore,
    /// Seed the weights were initialized from.
    pub init_seed: u64,
}

impl TrainedModel {
    /// Fresh model with seeded initialization. Layer construction order is
    /// deterministic, so two models from the same configs and seed are
    /// identical.
    pub fn new(gen_config: GeneratorConfig, critic_config: CriticConfig, seed: u64) -> Result<Self> {
        let mut gen_params = ParamStore::new();
        let mut critic_params = ParamStore::new();
        let mut gen_rng = rng::stream(seed, 0x67656e);
        let mut critic_rng = rng::stream(seed, 0x63726974);
        let gen = Generator::new(gen_config.clone(), &mut gen_params, &mut gen_rng)?;
        let critic = Critic::new(critic_config.clone(), &mut critic_params, &mut critic_rng)?;
        Ok(TrainedModel {
            gen_config,
            critic_config,
            gen,
            critic,
            gen_params,
            critic_params,
            init_seed: seed,
        })
    }
}

/// In-memory training pairs (normalized fields as flat f64 rows).
pub struct PairedData {
    pub size: usize,
    pub train: Vec<(Vec<f64>, Vec<f64>)>,
    pub val: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Loads every manifest record, validating grids against `input_size`.
pub fn load_pairs(manifest: &DatasetManifest, root: &Path, input_size: usize) -> Result<PairedData> {
    if manifest.grid.nx != input_size || manifest.grid.ny != input_size {
        return Err(Error::ShapeMismatch(format!(
            "dataset grid {}x{} does not match the network input size {}",
            manifest.grid.nx, manifest.grid.ny, input_size
        )));
    }
    let mut out = PairedData {
        size: input_size,
        train: Vec::new(),
        val: Vec::new(),
    };
    for record in &manifest.records {
        let arrival = pyrotime_core::farr::read_normalized(&root.join(&record.arrival))?;
        let measurement = pyrotime_core::farr::read_normalized(&root.join(&record.measurement))?;
        if arrival.spec != manifest.grid || measurement.spec != manifest.grid {
            return Err(Error::ShapeMismatch(format!(
                "record {:?} grid does not match the manifest",
                record.arrival
            )));
        }
        let pair = (
            arrival.values().iter().map(|&v| v as f64).collect(),
            measurement.values().iter().map(|&v| v as f64).collect(),
        );
        match record.split {
            Split::Train => out.train.push(pair),
            Split::Validation => out.val.push(pair),
        }
    }
    if out.train.is_empty() {
        return Err(Error::invalid("manifest has no training records"));
    }
    Ok(out)
}

fn batch_tensor(rows: &[&Vec<f64>], size: usize) -> Tensor {
    let mut data = Vec::with_capacity(rows.len() * size * size);
    for row in rows {
        data.extend_from_slice(row);
    }
    Tensor::from_vec(&[rows.len(), 1, size, size], data)
}

/// Mean per-sample L2 mismatch over the validation split, with one latent
/// draw per sample.
fn validation_mismatch(
    model: &TrainedModel,
    data: &PairedData,
    batch_size: usize,
    seed: u64,
    epoch: usize,
) -> Result<f64> {
    if data.val.is_empty() {
        return Ok(f64::NAN);
    }
    let mut val_rng = rng::stream(seed, epoch as u64 * 4 + 3);
    let mut total = 0.0;
    for chunk in data.val.chunks(batch_size) {
        let taus: Vec<&Vec<f64>> = chunk.iter().map(|(a, _)| a).collect();
        let bars: Vec<&Vec<f64>> = chunk.iter().map(|(_, m)| m).collect();
        let mut t = Tape::new();
        let gparams = model.gen_params.leaves(&mut t);
        let z = t.leaf(sample_latent(&mut val_rng, chunk.len(), model.gen_config.latent_dim));
        let tau_bar = t.leaf(batch_tensor(&bars, data.size));
        let fake = model.gen.forward(&mut t, &gparams, z, tau_bar);
        let fv = t.value(fake).data();
        let n = data.size * data.size;
        for (s, tau) in taus.iter().enumerate() {
            let mut sq = 0.0;
            for k in 0..n {
                let d = fv[s * n + k] - tau[k];
                sq += d * d;
            }
            total += sq.sqrt();
        }
    }
    Ok(total / data.val.len() as f64)
}

struct EpochStats {
    critic_loss: f64,
    w: f64,
    gp: f64,
    gen_loss: f64,
    critic_steps: usize,
    gen_steps: usize,
}

fn run_epoch(
    model: &mut TrainedModel,
    data: &PairedData,
    cfg: &TrainConfig,
    epoch: usize,
    adam_gen: &mut Adam,
    adam_critic: &mut Adam,
) -> Result<EpochStats> {
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut shuffle_rng = rng::stream(cfg.seed, epoch as u64 * 4);
    order.shuffle(&mut shuffle_rng);
    let mut z_rng = rng::stream(cfg.seed, epoch as u64 * 4 + 1);
    let mut eps_rng = rng::stream(cfg.seed, epoch as u64 * 4 + 2);

    let mut stats = EpochStats {
        critic_loss: 0.0,
        w: 0.0,
        gp: 0.0,
        gen_loss: 0.0,
        critic_steps: 0,
        gen_steps: 0,
    };
    let nz = model.gen_config.latent_dim;
    for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
        let taus: Vec<&Vec<f64>> = chunk.iter().map(|&k| &data.train[k].0).collect();
        let bars: Vec<&Vec<f64>> = chunk.iter().map(|&k| &data.train[k].1).collect();
        let b = chunk.len();

        // Critic step: generated batch detached.
        {
            let mut t = Tape::new();
            let gparams = model.gen_params.leaves(&mut t);
            let cparams = model.critic_params.leaves(&mut t);
            let z = t.leaf(sample_latent(&mut z_rng, b, nz));
            let eps: Vec<f64> = (0..b).map(|_| eps_rng.gen::<f64>()).collect();
            let eps = t.leaf(Tensor::from_vec(&[b], eps));
            let tau = t.leaf(batch_tensor(&taus, data.size));
            let tau_bar = t.leaf(batch_tensor(&bars, data.size));
            let fake = model.gen.forward(&mut t, &gparams, z, tau_bar);
            let fake_detached = t.detach(fake);
            let (critic_loss, w_est, gp) = critic_objective(
                &mut t,
                &model.critic,
                &cparams,
                tau,
                fake_detached,
                tau_bar,
                eps,
                cfg.gp_weight,
            );
            let loss_v = t.value(critic_loss).item();
            if !loss_v.is_finite() {
                return Err(Error::Diverged(format!(
                    "critic loss at epoch {epoch} batch {batch_idx}"
                )));
            }
            stats.critic_loss += loss_v;
            stats.w += t.value(w_est).item();
            stats.gp += t.value(gp).item();
            stats.critic_steps += 1;
            let grads = t.grad(critic_loss, &cparams);
            let grads: Vec<Option<Tensor>> =
                grads.iter().map(|g| g.map(|g| t.value(g).clone())).collect();
            adam_critic.step(&mut model.critic_params, &grads);
        }

        // Generator step after every `critic_steps` critic updates.
        if (batch_idx + 1) % cfg.critic_steps == 0 {
            let mut t = Tape::new();
            let gparams = model.gen_params.leaves(&mut t);
            let cparams = model.critic_params.leaves(&mut t);
            let z = t.leaf(sample_latent(&mut z_rng, b, nz));
            let tau_bar = t.leaf(batch_tensor(&bars, data.size));
            let fake = model.gen.forward(&mut t, &gparams, z, tau_bar);
            let gen_loss = generator_objective(&mut t, &model.critic, &cparams, fake, tau_bar);
            let loss_v = t.value(gen_loss).item();
            if !loss_v.is_finite() {
                return Err(Error::Diverged(format!(
                    "generator loss at epoch {epoch} batch {batch_idx}"
                )));
            }
            stats.gen_loss += loss_v;
            stats.gen_steps += 1;
            let grads = t.grad(gen_loss, &gparams);
            let grads: Vec<Option<Tensor>> =
                grads.iter().map(|g| g.map(|g| t.value(g).clone())).collect();
            adam_gen.step(&mut model.gen_params, &grads);
        }
    }
    Ok(stats)
}

/// Trains from `start_epoch` (exclusive of already-finished epochs) through
/// `cfg.epochs`, appending epoch logs and checkpoints under `out_dir`.
#[allow(clippy::too_many_arguments)]
pub fn run_training(
    model: &mut TrainedModel,
    data: &PairedData,
    cfg: &TrainConfig,
    adam_gen: &mut Adam,
    adam_critic: &mut Adam,
    start_epoch: usize,
    out_dir: Option<&Path>,
) -> Result<Vec<EpochLog>> {
    cfg.validate()?;
    let mut logs = Vec::new();
    let log_path = out_dir.map(|d| d.join("train_log.jsonl"));
    for epoch in start_epoch..cfg.epochs {
        let stats = run_epoch(model, data, cfg, epoch, adam_gen, adam_critic)?;
        if !model.gen_params.all_finite() || !model.critic_params.all_finite() {
            return Err(Error::Diverged(format!("non-finite parameters after epoch {epoch}")));
        }
        let mismatch = validation_mismatch(model, data, cfg.batch_size, cfg.seed, epoch)?;
        let log = EpochLog {
            epoch,
            mismatch,
            wasserstein: stats.w / stats.critic_steps.max(1) as f64,
            critic_loss: stats.critic_loss / stats.critic_steps.max(1) as f64,
            gen_loss: stats.gen_loss / stats.gen_steps.max(1) as f64,
            gp: stats.gp / stats.critic_steps.max(1) as f64,
        };
        if let Some(path) = &log_path {
            let line = serde_json::to_string(&log).expect("log serializes");
            let mut f = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            writeln!(f, "{line}").map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        log::info!(
            "epoch {:>4}: mismatch {:.4}, W {:.4}, critic {:.4}, gen {:.4}",
            log.epoch,
            log.mismatch,
            log.wasserstein,
            log.critic_loss,
            log.gen_loss
        );
        logs.push(log);

        let finished = epoch + 1 == cfg.epochs;
        let periodic = cfg.checkpoint_interval > 0 && (epoch + 1) % cfg.checkpoint_interval == 0;
        if let Some(dir) = out_dir {
            if periodic || finished {
                let ckpt = Checkpoint::capture(model, cfg, adam_gen, adam_critic, epoch + 1);
                checkpoint::save(&ckpt, &dir.join(format!("checkpoint_ep{:04}.ckpt", epoch + 1)))?;
                if finished {
                    checkpoint::save(&ckpt, &dir.join("checkpoint_final.ckpt"))?;
                }
            }
        }
    }
    Ok(logs)
}

/// Fresh training run: initializes the model from `cfg.seed` and trains on
/// the manifest's pairs.
pub fn train(
    manifest: &DatasetManifest,
    data_root: &Path,
    gen_config: GeneratorConfig,
    critic_config: CriticConfig,
    cfg: &TrainConfig,
    out_dir: Option<&Path>,
) -> Result<(TrainedModel, Vec<EpochLog>)> {
    let data = load_pairs(manifest, data_root, gen_config.input_size)?;
    let mut model = TrainedModel::new(gen_config, critic_config, cfg.seed)?;
    let mut adam_gen = Adam::new(&model.gen_params, cfg.learning_rate, cfg.beta1, cfg.beta2);
    let mut adam_critic = Adam::new(&model.critic_params, cfg.learning_rate, cfg.beta1, cfg.beta2);
    let logs = run_training(
        &mut model,
        &data,
        cfg,
        &mut adam_gen,
        &mut adam_critic,
        0,
        out_dir,
    )?;
    Ok((model, logs))
}

/// Resumes training from a checkpoint against the same dataset.
pub fn resume(
    checkpoint_path: &Path,
    manifest: &DatasetManifest,
    data_root: &Path,
    out_dir: Option<&Path>,
) -> Result<(TrainedModel, Vec<EpochLog>)> {
    let ckpt = checkpoint::load(checkpoint_path)?;
    let data = load_pairs(manifest, data_root, ckpt.gen_config().input_size)?;
    let (mut model, mut adam_gen, mut adam_critic, cfg, epoch) = ckpt.restore()?;
    let logs = run_training(
        &mut model,
        &data,
        &cfg,
        &mut adam_gen,
        &mut adam_critic,
        epoch,
        out_dir,
    )?;
    Ok((model, logs))
}
