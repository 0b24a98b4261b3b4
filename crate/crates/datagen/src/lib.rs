//! Deterministic synthetic data for the agora marketplace: a three-stage
//! pipeline (item universe, customers, businesses) for the restaurant and
//! contractor domains, plus manipulation injection, bias-experiment dataset
//! variants, and a linter that re-derives every embedded guarantee.

pub mod bias;
pub mod config;
pub mod lint;
pub mod manipulate;
pub mod pipeline;
pub mod render;
pub mod words;

pub use bias::{make_bias_variant, BiasKind, BiasSpec};
pub use config::{Domain, GenerationConfig, RendererKind, Scale};
pub use lint::{lint, LintReport};
pub use manipulate::{inject_manipulation, ManipulationStrategy};
pub use pipeline::{generate, generate_with, DatagenError};
