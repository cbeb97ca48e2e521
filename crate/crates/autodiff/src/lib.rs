//! Reverse-mode automatic differentiation on an append-only tape, sized for
//! small convolutional networks on the CPU.
//!
//! Every backward rule is itself built from tape ops, so gradients are
//! ordinary differentiable nodes: taking `grad` of an expression that
//! already contains gradients yields exact second-order derivatives. That
//! property is what makes a gradient-penalty critic loss trainable without
//! an external framework.
//!
//! All math is f64. Convolutions are stride-1 / same-padding / odd kernels;
//! resolution changes go through explicit 2x pooling and upsampling ops.

mod kernels;
mod tape;
pub mod tensor;

pub use tape::{Tape, Var};
pub use tensor::Tensor;
