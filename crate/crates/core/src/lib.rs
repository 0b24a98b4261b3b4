//! Core library for the agora two-sided marketplace environment: the
//! economic domain model, exact money arithmetic, the wire protocol for the
//! three market endpoints, the dataset file schema, and the discovery layer.

pub mod dataset;
pub mod domain;
pub mod economics;
pub mod money;
pub mod protocol;
pub mod search;

pub use domain::{BusinessRecord, CustomerNeed, ItemSpec, LineItem, MenuItem, OrderProposal, Transaction};
pub use money::Money;
