//! Generator and critic architectures.
//!
//! The generator is a U-Net over the measurement: `levels` down-sampling
//! stages (2x pool, dense block doubling the channels), a bottleneck dense
//! block, and `levels` up-sampling stages (2x nearest upsample, channel
//! halving, skip concatenation, dense block), ending in a sigmoid-bounded
//! single channel. A dense block DB(k, n) runs n conv sub-blocks where each
//! consumes the concatenation of the block input and all previous
//! sub-block outputs; every sub-block emits k features except the last,
//! which emits the block's output width. In the generator every sub-block
//! applies conditional instance normalization: channels are
//! instance-normalized, then scaled and shifted by affine maps of the
//! latent vector.
//!
//! The critic concatenates arrival and measurement channel-wise, applies
//! dense/down blocks (no normalization) and fully connected layers down to
//! one scalar per sample.

use crate::error::{Error, Result};
use crate::params::ParamStore;
use pyrotime_autodiff::{Tape, Tensor, Var};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

fn default_p() -> usize {
    2
}

/// Generator hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Latent dimension N_z.
    pub latent_dim: usize,
    /// Number of down/up stages.
    pub levels: usize,
    /// Channels entering the first dense block.
    pub base_width: usize,
    /// Features per dense sub-block.
    pub dense_k: usize,
    /// Sub-blocks per dense block.
    pub dense_n: usize,
    /// Down/up resolution factor (2 is the only supported value).
    #[serde(default = "default_p")]
    pub down_p: usize,
    /// Channel growth/shrink factor across stages (2 only).
    #[serde(default = "default_p")]
    pub down_q: usize,
    /// Input field edge length in pixels.
    pub input_size: usize,
}

impl GeneratorConfig {
    /// Production defaults for a given field size: k=16, n=4, p=q=2, with
    /// 4 levels at 64 pixels growing to 6 at 512.
    pub fn for_size(input_size: usize) -> Self {
        let levels = match input_size {
            0..=31 => 2,
            32..=127 => 4,
            128..=255 => 5,
            _ => 6,
        };
        GeneratorConfig {
            latent_dim: 64,
            levels,
            base_width: 16,
            dense_k: 16,
            dense_n: 4,
            down_p: 2,
            down_q: 2,
            input_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.down_p != 2 || self.down_q != 2 {
            return Err(Error::invalid("only p = q = 2 stages are supported"));
        }
        if self.dense_k == 0 || self.dense_n == 0 || self.base_width == 0 || self.latent_dim == 0 {
            return Err(Error::invalid("network widths must be >= 1"));
        }
        if self.input_size == 0 || self.input_size % (1 << self.levels) != 0 {
            return Err(Error::invalid(format!(
                "input size {} must be divisible by 2^levels = {}",
                self.input_size,
                1 << self.levels
            )));
        }
        Ok(())
    }
}

/// Critic hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticConfig {
    pub levels: usize,
    pub base_width: usize,
    pub dense_k: usize,
    pub dense_n: usize,
    /// Fully connected widths after flattening; must end in 1.
    pub fc_widths: Vec<usize>,
    pub input_size: usize,
}

impl CriticConfig {
    pub fn for_generator(g: &GeneratorConfig) -> Self {
        CriticConfig {
            levels: g.levels,
            base_width: g.base_width,
            dense_k: g.dense_k,
            dense_n: g.dense_n,
            fc_widths: vec![64, 1],
            input_size: g.input_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fc_widths.last() != Some(&1) {
            return Err(Error::invalid("critic fc widths must end in 1"));
        }
        if self.input_size == 0 || self.input_size % (1 << self.levels) != 0 {
            return Err(Error::invalid(format!(
                "input size {} must be divisible by 2^levels = {}",
                self.input_size,
                1 << self.levels
            )));
        }
        if self.base_width == 0 || self.dense_k == 0 || self.dense_n == 0 {
            return Err(Error::invalid("network widths must be >= 1"));
        }
        Ok(())
    }
}

const LEAKY_SLOPE: f64 = 0.2;
const IN_EPS: f64 = 1e-5;

/// Parameter indices of one convolution.
#[derive(Debug, Clone, Copy)]
struct ConvP {
    w: usize,
    b: usize,
}

/// Parameter indices of one conditional-instance-normalization map.
#[derive(Debug, Clone, Copy)]
struct CinP {
    scale_w: usize,
    scale_b: usize,
    shift_w: usize,
    shift_b: usize,
}

#[derive(Debug, Clone, Copy)]
struct SubBlockP {
    conv: ConvP,
    cin: Option<CinP>,
}

/// DB(k, n): n sub-blocks over a growing concatenation.
#[derive(Debug, Clone)]
struct DenseBlockP {
    subs: Vec<SubBlockP>,
}

#[derive(Debug, Clone)]
struct UpStageP {
    shrink: SubBlockP,
    merge: DenseBlockP,
}

struct LayerBuilder<'a> {
    store: &'a mut ParamStore,
    rng: &'a mut ChaCha8Rng,
    prefix: &'static str,
}

impl<'a> LayerBuilder<'a> {
    fn normal(&mut self, shape: &[usize], std: f64) -> Tensor {
        let n = shape.iter().product();
        let data = (0..n)
            .map(|_| {
                let v: f64 = self.rng.sample(StandardNormal);
                v * std
            })
            .collect();
        Tensor::from_vec(shape, data)
    }

    fn conv(&mut self, name: &str, c_in: usize, c_out: usize, k: usize) -> ConvP {
        let fan_in = (c_in * k * k) as f64;
        let w = self.normal(&[c_out, c_in, k, k], (2.0 / fan_in).sqrt());
        let w = self.store.add(format!("{}.{name}.w", self.prefix), w);
        let b = self
            .store
            .add(format!("{}.{name}.b", self.prefix), Tensor::zeros(&[c_out]));
        ConvP { w, b }
    }

    fn cin(&mut self, name: &str, latent: usize, channels: usize) -> CinP {
        let std = 0.02;
        let scale_w = self.normal(&[channels, latent], std);
        let shift_w = self.normal(&[channels, latent], std);
        CinP {
            scale_w: self
                .store
                .add(format!("{}.{name}.scale_w", self.prefix), scale_w),
            scale_b: self.store.add(
                format!("{}.{name}.scale_b", self.prefix),
                Tensor::zeros(&[channels]),
            ),
            shift_w: self
                .store
                .add(format!("{}.{name}.shift_w", self.prefix), shift_w),
            shift_b: self.store.add(
                format!("{}.{name}.shift_b", self.prefix),
                Tensor::zeros(&[channels]),
            ),
        }
    }

    fn sub_block(
        &mut self,
        name: &str,
        c_in: usize,
        c_out: usize,
        k: usize,
        latent: Option<usize>,
    ) -> SubBlockP {
        let conv = self.conv(name, c_in, c_out, k);
        let cin = latent.map(|nz| self.cin(&format!("{name}.cin"), nz, c_out));
        SubBlockP { conv, cin }
    }

    /// DB(k, n) mapping `c_in` channels to `c_out`.
    fn dense_block(
        &mut self,
        name: &str,
        c_in: usize,
        c_out: usize,
        k_feat: usize,
        n_sub: usize,
        latent: Option<usize>,
    ) -> DenseBlockP {
        let mut subs = Vec::with_capacity(n_sub);
        let mut acc = c_in;
        for s in 0..n_sub {
            let out = if s + 1 == n_sub { c_out } else { k_feat };
            subs.push(self.sub_block(&format!("{name}.sub{s}"), acc, out, 3, latent));
            acc += out;
        }
        DenseBlockP { subs }
    }
}

/// The dense-block U-Net generator.
pub struct Generator {
    pub config: GeneratorConfig,
    stem: SubBlockP,
    downs: Vec<DenseBlockP>,
    bottleneck: DenseBlockP,
    ups: Vec<UpStageP>,
    head: ConvP,
}

impl Generator {
    /// Builds the architecture and registers all weights into `store`,
    /// initialized from `rng` in registration order.
    pub fn new(config: GeneratorConfig, store: &mut ParamStore, rng: &mut ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let nz = config.latent_dim;
        let mut b = LayerBuilder {
            store,
            rng,
            prefix: "gen",
        };
        let w0 = config.base_width;
        let stem = b.sub_block("stem", 1, w0, 3, Some(nz));
        let mut downs = Vec::new();
        let mut ch = w0;
        for l in 0..config.levels {
            downs.push(b.dense_block(
                &format!("down{l}"),
                ch,
                ch * 2,
                config.dense_k,
                config.dense_n,
                Some(nz),
            ));
            ch *= 2;
        }
        let bottleneck = b.dense_block(
            "bottleneck",
            ch,
            ch,
            config.dense_k,
            config.dense_n,
            Some(nz),
        );
        let mut ups = Vec::new();
        for l in 0..config.levels {
            let shrink = b.sub_block(&format!("up{l}.shrink"), ch, ch / 2, 3, Some(nz));
            // After the skip concat the stage sees `ch` channels again.
            let merge = b.dense_block(
                &format!("up{l}.merge"),
                ch,
                ch / 2,
                config.dense_k,
                config.dense_n,
                Some(nz),
            );
            ups.push(UpStageP { shrink, merge });
            ch /= 2;
        }
        let head = b.conv("head", ch, 1, 3);
        Ok(Generator {
            config,
            stem,
            downs,
            bottleneck,
            ups,
            head,
        })
    }

    /// Samples `tau_g = g(z, measurement)`: deterministic given all inputs,
    /// single channel in [0, 1].
    ///
    /// `z` is `[B, latent_dim]`, `measurement` is `[B, 1, S, S]`.
    pub fn forward(&self, t: &mut Tape, params: &[Var], z: Var, measurement: Var) -> Var {
        let shape = t.value(measurement).shape().to_vec();
        assert_eq!(shape.len(), 4, "measurement must be [B,1,S,S]");
        assert_eq!(
            (shape[1], shape[2], shape[3]),
            (1, self.config.input_size, self.config.input_size),
            "measurement shape {shape:?} does not match input_size {}",
            self.config.input_size
        );
        let mut x = apply_sub_block_on(t, params, &self.stem, measurement, Some(z));
        let mut skips = Vec::new();
        for stage in &self.downs {
            skips.push(x);
            let pooled = t.avg_pool2(x);
            x = apply_dense_block(t, params, stage, pooled, Some(z));
        }
        x = apply_dense_block(t, params, &self.bottleneck, x, Some(z));
        for stage in &self.ups {
            let up = t.upsample2(x);
            let shrunk = apply_sub_block_on(t, params, &stage.shrink, up, Some(z));
            let skip = skips.pop().expect("one skip per level");
            let cat = t.concat_chan(shrunk, skip);
            x = apply_dense_block(t, params, &stage.merge, cat, Some(z));
        }
        let logits = apply_conv(t, params, &self.head, x);
        t.sigmoid(logits)
    }
}

fn apply_conv(t: &mut Tape, params: &[Var], conv: &ConvP, x: Var) -> Var {
    let c = t.conv2d(x, params[conv.w]);
    t.add_bias_chan(c, params[conv.b])
}

fn instance_norm(t: &mut Tape, x: Var) -> Var {
    let shape = t.value(x).shape().to_vec();
    let (h, w) = (shape[2], shape[3]);
    let mu = t.mean_hw(x);
    let mu_b = t.broadcast_hw(mu, h, w);
    let xc = t.sub(x, mu_b);
    let sq = t.mul(xc, xc);
    let var = t.mean_hw(sq);
    let var_eps = t.add_scalar(var, IN_EPS);
    let inv = t.pow_const(var_eps, -0.5);
    let inv_b = t.broadcast_hw(inv, h, w);
    t.mul(xc, inv_b)
}

/// Conditional instance normalization: normalize per channel, then apply a
/// z-conditioned scale (around 1) and shift.
fn apply_cin(t: &mut Tape, params: &[Var], cin: &CinP, x: Var, z: Var) -> Var {
    let xhat = instance_norm(t, x);
    let scale_lin = t.linear(z, params[cin.scale_w]);
    let scale_aff = t.add_bias_rows(scale_lin, params[cin.scale_b]);
    let scale = t.add_scalar(scale_aff, 1.0);
    let shift_lin = t.linear(z, params[cin.shift_w]);
    let shift = t.add_bias_rows(shift_lin, params[cin.shift_b]);
    let scaled = t.mul_chan_bc(xhat, scale);
    t.add_chan_bc(scaled, shift)
}

fn apply_sub_block_on(
    t: &mut Tape,
    params: &[Var],
    sub: &SubBlockP,
    x: Var,
    z: Option<Var>,
) -> Var {
    let mut y = apply_conv(t, params, &sub.conv, x);
    if let (Some(cin), Some(z)) = (&sub.cin, z) {
        y = apply_cin(t, params, cin, y, z);
    }
    t.leaky_relu(y, LEAKY_SLOPE)
}

fn apply_dense_block(
    t: &mut Tape,
    params: &[Var],
    block: &DenseBlockP,
    x: Var,
    z: Option<Var>,
) -> Var {
    let mut acc = x;
    let last = block.subs.len() - 1;
    for (s, sub) in block.subs.iter().enumerate() {
        let out = apply_sub_block_on(t, params, sub, acc, z);
        if s == last {
            return out;
        }
        acc = t.concat_chan(acc, out);
    }
    unreachable!("dense blocks have at least one sub-block")
}

/// The critic d(tau, tau_bar) -> scalar per sample.
pub struct Critic {
    pub config: CriticConfig,
    stem: SubBlockP,
    downs: Vec<DenseBlockP>,
    fcs: Vec<(usize, usize)>,
}

impl Critic {
    pub fn new(config: CriticConfig, store: &mut ParamStore, rng: &mut ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let mut b = LayerBuilder {
            store,
            rng,
            prefix: "critic",
        };
        let w0 = config.base_width;
        let stem = b.sub_block("stem", 2, w0, 3, None);
        let mut downs = Vec::new();
        let mut ch = w0;
        for l in 0..config.levels {
            downs.push(b.dense_block(
                &format!("down{l}"),
                ch,
                ch * 2,
                config.dense_k,
                config.dense_n,
                None,
            ));
            ch *= 2;
        }
        let side = config.input_size >> config.levels;
        let mut in_features = ch * side * side;
        let mut fcs = Vec::new();
        for (k, &width) in config.fc_widths.iter().enumerate() {
            let std = (2.0 / in_features as f64).sqrt();
            let w = b.normal(&[width, in_features], std);
            let wi = b.store.add(format!("critic.fc{k}.w"), w);
            let bi = b
                .store
                .add(format!("critic.fc{k}.b"), Tensor::zeros(&[width]));
            fcs.push((wi, bi));
            in_features = width;
        }
        Ok(Critic {
            config,
            stem,
            downs,
            fcs,
        })
    }

    /// Concatenates the two fields channel-wise and reduces to one scalar
    /// per sample, returned as a `[B]` vector.
    pub fn forward(&self, t: &mut Tape, params: &[Var], arrival: Var, measurement: Var) -> Var {
        let sa = t.value(arrival).shape().to_vec();
        let sm = t.value(measurement).shape().to_vec();
        assert_eq!(sa, sm, "critic inputs must share a shape");
        assert_eq!(
            (sa[1], sa[2], sa[3]),
            (1, self.config.input_size, self.config.input_size),
            "critic input shape {sa:?} does not match input_size {}",
            self.config.input_size
        );
        let cat = t.concat_chan(arrival, measurement);
        let mut x = apply_sub_block_on(t, params, &self.stem, cat, None);
        for stage in &self.downs {
            let pooled = t.avg_pool2(x);
            x = apply_dense_block(t, params, stage, pooled, None);
        }
        let shape = t.value(x).shape().to_vec();
        let flat: usize = shape[1..].iter().product();
        let mut y = t.reshape(x, &[shape[0], flat]);
        let last = self.fcs.len() - 1;
        for (k, &(w, b)) in self.fcs.iter().enumerate() {
            let lin = t.linear(y, params[w]);
            y = t.add_bias_rows(lin, params[b]);
            if k != last {
                y = t.leaky_relu(y, LEAKY_SLOPE);
            }
        }
        let batch = shape[0];
        t.reshape(y, &[batch])
    }
}

/// Draws a `[batch, dim]` matrix of standard normal latents.
pub fn sample_latent(rng: &mut ChaCha8Rng, batch: usize, dim: usize) -> Tensor {
    let data = (0..batch * dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Tensor::from_vec(&[batch, dim], data)
}
