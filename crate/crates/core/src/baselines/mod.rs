//! Reference selectors: the sort oracle and the radix-select model.

pub mod key;
pub mod oracle;
pub mod radix;

pub use key::{key_to_f32, sortable_key};
pub use oracle::{oracle_topk, rank_cmp, value_multiset_eq};
pub use radix::{radix_select, RadixOutcome, RadixParams, RadixStats};
