//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

pub mod quadrature;
pub mod transcription;
