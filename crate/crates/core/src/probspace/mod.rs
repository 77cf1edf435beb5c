//! Exact finite probability.

pub mod formula;
pub mod materialize;
pub mod space;

pub use formula::{Formula, FormulaJson, Node};
pub use materialize::{materialize, Materialized, MATERIALIZE_CAP};
pub use space::{AtomSpace, BernoulliProduct, Event, Mask, Op, Space};
