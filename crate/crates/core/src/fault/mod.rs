//! Single-component fault model over node indices and edges, with perfect
//! detection, plus index recovery through the unique table and the
//! reconstruction-cost metrics.

mod cost;
mod overlay;
mod range;

pub use cost::{
    check_delete_delta, check_merge_delta, cost_report, CostReport, DeleteCheck, DeletionBound,
    MergeCheck,
};
pub use overlay::{inject, inject_random_indices, Component, FaultOverlay};
pub use range::{
    node_range, node_range_naive, reconstruct_index_ut, recover_index_ut, NodeRange, ParentMap,
};
