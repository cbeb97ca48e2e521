//! Checkpoint format: one JSON metadata line, then a raw little-endian f64
//! payload holding generator weights, critic weights, and both optimizers'
//! moment estimates, in the order listed by the metadata.
//!
//! Saving, loading, and saving again produces byte-identical files.

use crate::error::{Error, Result};
use crate::net::{CriticConfig, GeneratorConfig};
use crate::params::{Adam, ParamStore};
use crate::train::{TrainConfig, TrainedModel};
use pyrotime_autodiff::Tensor;
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TensorMeta {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Metadata {
    format: String,
    epoch: usize,
    gen_config: GeneratorConfig,
    critic_config: CriticConfig,
    train_config: TrainConfig,
    gen_tensors: Vec<TensorMeta>,
    critic_tensors: Vec<TensorMeta>,
    gen_adam_steps: u64,
    critic_adam_steps: u64,
}

/// A complete training state snapshot.
pub struct Checkpoint {
    meta: Metadata,
    gen_tensors: Vec<Tensor>,
    critic_tensors: Vec<Tensor>,
    gen_moments: (Vec<Tensor>, Vec<Tensor>),
    critic_moments: (Vec<Tensor>, Vec<Tensor>),
}

impl Checkpoint {
    pub fn capture(
        model: &TrainedModel,
        train_config: &TrainConfig,
        adam_gen: &Adam,
        adam_critic: &Adam,
        epoch: usize,
    ) -> Self {
        let tensor_meta = |store: &ParamStore| -> Vec<TensorMeta> {
            store
                .names()
                .iter()
                .zip(store.tensors())
                .map(|(name, t)| TensorMeta {
                    name: name.clone(),
                    shape: t.shape().to_vec(),
                })
                .collect()
        };
        let (gm, gv) = adam_gen.moments();
        let (cm, cv) = adam_critic.moments();
        Checkpoint {
            meta: Metadata {
                format: "pyrotime-checkpoint-v1".to_string(),
                epoch,
                gen_config: model.gen_config.clone(),
                critic_config: model.critic_config.clone(),
                train_config: train_config.clone(),
                gen_tensors: tensor_meta(&model.gen_params),
                critic_tensors: tensor_meta(&model.critic_params),
                gen_adam_steps: adam_gen.step_count,
                critic_adam_steps: adam_critic.step_count,
            },
            gen_tensors: model.gen_params.tensors().to_vec(),
            critic_tensors: model.critic_params.tensors().to_vec(),
            gen_moments: (gm.to_vec(), gv.to_vec()),
            critic_moments: (cm.to_vec(), cv.to_vec()),
        }
    }

    pub fn epoch(&self) -> usize {
        self.meta.epoch
    }

    pub fn train_config(&self) -> &TrainConfig {
        &self.meta.train_config
    }

    pub fn gen_config(&self) -> &GeneratorConfig {
        &self.meta.gen_config
    }

    /// Rebuilds the model and both optimizers exactly as captured.
    pub fn restore(self) -> Result<(TrainedModel, Adam, Adam, TrainConfig, usize)> {
        let cfg = self.meta.train_config.clone();
        let mut model = TrainedModel::new(
            self.meta.gen_config.clone(),
            self.meta.critic_config.clone(),
            cfg.seed,
        )?;
        model.gen_params.replace_tensors(self.gen_tensors)?;
        model.critic_params.replace_tensors(self.critic_tensors)?;
        let mut adam_gen = Adam::new(&model.gen_params, cfg.learning_rate, cfg.beta1, cfg.beta2);
        adam_gen.restore_moments(
            self.gen_moments.0,
            self.gen_moments.1,
            self.meta.gen_adam_steps,
        );
        let mut adam_critic =
            Adam::new(&model.critic_params, cfg.learning_rate, cfg.beta1, cfg.beta2);
        adam_critic.restore_moments(
            self.critic_moments.0,
            self.critic_moments.1,
            self.meta.critic_adam_steps,
        );
        let epoch = self.meta.epoch;
        Ok((model, adam_gen, adam_critic, cfg, epoch))
    }

    /// Rebuilds just the model (for inference).
    pub fn into_model(self) -> Result<TrainedModel> {
        Ok(self.restore()?.0)
    }
}

pub fn save(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    let file =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);
    let mut line = serde_json::to_string(&ckpt.meta).expect("metadata serializes");
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(io_err)?;
    let groups: [&[Tensor]; 6] = [
        &ckpt.gen_tensors,
        &ckpt.critic_tensors,
        &ckpt.gen_moments.0,
        &ckpt.gen_moments.1,
        &ckpt.critic_moments.0,
        &ckpt.critic_moments.1,
    ];
    for group in groups {
        for tensor in group {
            for &v in tensor.data() {
                w.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut r = BufReader::new(file);
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = r
            .read(&mut byte)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        if n == 0 {
            return Err(Error::Checkpoint(format!(
                "{}: missing metadata line",
                path.display()
            )));
        }
        if byte[0] == b'\n' {
            break;
        }
        header.push(byte[0]);
    }
    let meta: Metadata = serde_json::from_slice(&header)
        .map_err(|e| Error::Checkpoint(format!("{}: bad metadata: {e}", path.display())))?;
    if meta.format != "pyrotime-checkpoint-v1" {
        return Err(Error::Checkpoint(format!(
            "{}: unknown format \"{}\"",
            path.display(),
            meta.format
        )));
    }

    let mut read_group = |metas: &[TensorMeta]| -> Result<Vec<Tensor>> {
        metas
            .iter()
            .map(|tm| {
                let n: usize = tm.shape.iter().product();
                let mut buf = vec![0u8; n * 8];
                r.read_exact(&mut buf)
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                let data = buf
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                Ok(Tensor::from_vec(&tm.shape, data))
            })
            .collect()
    };
    let gen_tensors = read_group(&meta.gen_tensors)?;
    let critic_tensors = read_group(&meta.critic_tensors)?;
    let gen_m = read_group(&meta.gen_tensors)?;
    let gen_v = read_group(&meta.gen_tensors)?;
    let critic_m = read_group(&meta.critic_tensors)?;
    let critic_v = read_group(&meta.critic_tensors)?;
    Ok(Checkpoint {
        meta,
        gen_tensors,
        critic_tensors,
        gen_moments: (gen_m, gen_v),
        critic_moments: (critic_m, critic_v),
    })
}
