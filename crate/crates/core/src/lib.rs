//! Khmer text normalization, component-cluster splitting, cluster labeling,
//! syllable database construction and syllable/word segmentation.

pub mod eval;
pub mod grammar;
pub mod label;
pub mod normalize;
pub mod pipeline;
pub mod script;
pub mod segment;
