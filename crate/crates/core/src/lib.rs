//! Core toolkit for inferring high-resolution fire arrival time maps from
//! sparse satellite active-fire detections.
//!
//! The crate is organized around a small set of raster types ([`raster`]),
//! a portable on-disk raster format ([`farr`]), a wind-driven eikonal
//! fire-spread solver ([`firesim`]), the synthetic satellite measurement
//! operator and dataset builder ([`synthmeas`]), ingestion of real
//! active-fire detections and perimeter polygons ([`geodata`]), and
//! perimeter-comparison metrics ([`evalmetrics`]).
//!
//! All raster types are immutable after construction and all operations are
//! pure functions, so everything here is safe to call from concurrent
//! workers.

pub mod error;
pub mod evalmetrics;
pub mod farr;
pub mod firesim;
pub mod geodata;
pub mod raster;
pub mod rng;
pub mod synthmeas;

pub use error::{Error, Result};
pub use raster::{ArrivalField, BurnMask, GridSpec, NormalizedField};
