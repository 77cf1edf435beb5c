//! Types and separation indices of tuples and sets of words.

pub mod montecarlo;
pub mod separation;
pub mod types;

pub use montecarlo::{mc_one_separated_rate, McReport};
pub use separation::{is_separated, separation_index_set, separation_index_tuple, SeparationIndex, DEFAULT_EXACT_CAP};
pub use types::{realizations, reduce_rows, type_of_set, type_of_tuple, types_up_to, TypeSet, TypeTuple};
