pub mod dataset;
pub mod joint;
pub mod masking;
pub mod metrics;
pub mod model;
pub mod sampler;
pub mod svg;
pub mod text;
pub mod tokenizer;
