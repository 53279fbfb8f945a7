pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod feature_select;
pub mod matrix;
pub mod models;
pub mod resample;
pub mod seed;
pub mod transforms;

pub use error::{Error, Result};
pub use matrix::Matrix;
