//! A self-contained permissioned ledger for medical information.
//!
//! The pieces mirror a Fabric-style deployment at desk scale: a membership
//! service issuing signing identities, an attribute-based access control
//! engine, three smart contracts (policy / access / record) executing
//! deterministically over a hash-chained block log with a replay-derived
//! world state, a content-addressed blob store that keeps record bytes off
//! chain, two interchangeable ordering backends (kafka-style and proof of
//! work), and a benchmark harness for concurrency and consensus experiments.

pub mod abac;
pub mod bench;
pub mod codec;
pub mod content_store;
pub mod contracts;
pub mod ledger;
pub mod membership;
pub mod node;
pub mod ordering;

pub use contracts::{ContractResult, Status};
pub use ledger::{Block, ContractId, Transaction, TxKind};
pub use membership::{Identity, Role, SignedEnvelope};
pub use node::{NetworkConfig, Node};
