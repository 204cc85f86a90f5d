pub mod detect;
pub mod eval;
pub mod render;
pub mod report;
pub mod synth;
pub mod train;
