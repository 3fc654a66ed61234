pub mod algorithms;
pub mod cli;
pub mod convergents;
pub mod error;
pub mod experiments;
pub mod padic;
pub mod predictor;
pub mod quadratic;
