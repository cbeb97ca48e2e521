//! Conditional Wasserstein GAN for inferring fire arrival time fields from
//! sparse satellite-style measurements.
//!
//! The generator is a dense-block U-Net conditioned on the measurement,
//! with the latent vector injected at every dense block through conditional
//! instance normalization. The critic scores (arrival, measurement) pairs
//! with dense/down blocks followed by fully connected layers. Training is
//! the WGAN objective with a gradient penalty enforcing the critic's
//! Lipschitz constraint, computed exactly via the autodiff tape's
//! second-order gradients.

pub mod checkpoint;
pub mod error;
pub mod gradcheck;
pub mod loss;
pub mod net;
pub mod params;
pub mod posterior;
pub mod toy;
pub mod train;

pub use error::{Error, Result};
pub use net::{Critic, CriticConfig, Generator, GeneratorConfig};
pub use params::{Adam, ParamStore};
pub use train::{train, EpochLog, TrainConfig, TrainedModel};
