pub mod annotate;
pub mod bench;
pub mod detect;
pub mod eval;
pub mod plan;
pub mod resize;
pub mod split;
pub mod stats;
pub mod synth;
pub mod util;
