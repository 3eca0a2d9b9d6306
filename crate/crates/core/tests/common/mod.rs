//! Reference computations shared by the integration test targets.
#![allow(dead_code)]

pub mod block;
pub mod convolution;
