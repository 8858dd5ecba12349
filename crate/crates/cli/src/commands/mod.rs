pub mod audit;
pub mod detect;
pub mod fit;
pub mod predict;
pub mod synth;
pub mod validate;
