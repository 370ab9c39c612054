//! Error-resilient ordered binary decision diagrams.
//!
//! The crate covers three diagram regimes (ROBDD, quasi-reduced and
//! index-resilient reduced), a single-component fault model over node
//! indices, edges and the Apply memo table, and the recovery procedures for
//! each kind of fault.
//!
//! ```
//! use resilient_obdd::{build_qr, from_cubes, ir_reduce, resilient_pipeline, BoolOp, DcPolicy, FaultPlan};
//!
//! let f = from_cubes(4, &["1-0-", "01--"], &[] as &[&str], DcPolicy::Zero)?;
//! let g = from_cubes(4, &["--11"], &[] as &[&str], DcPolicy::Zero)?;
//! let (f_ir, g_ir) = (ir_reduce(&build_qr(&f))?, ir_reduce(&build_qr(&g))?);
//!
//! let mut plan = FaultPlan::new(7).with_memo_faults(0.1, 10).with_index_faults(2);
//! let (h, stats) = resilient_pipeline(BoolOp::AND, &f_ir, &g_ir, &mut plan)?;
//! assert_eq!(stats.memo_recomputations, stats.memo_faults_injected);
//! assert!(h.isomorphic(&ir_reduce(&build_qr(&resilient_obdd::apply(BoolOp::AND, &f, &g)?))?));
//! # Ok::<(), resilient_obdd::BddError>(())
//! ```

pub mod apply;
pub mod bench;
pub mod builder;
pub mod diagram;
pub mod dot;
pub mod edge;
pub mod error;
pub mod fault;
pub mod fixtures;
pub mod index_resilient;
pub mod node;
pub mod ops;
pub mod pla;
pub mod quasi;
pub mod resilient;
pub mod unique;

pub use apply::{apply, apply_with, equivalent, BoolOp, MemoKind};
pub use bench::{stats, verify, OutputDiagrams, StatsRow, VerifyOptions, VerifyReport};
pub use builder::{Builder, ReduceMode};
pub use diagram::{Clean, Diagram, LevelSource};
pub use dot::export_dot;
pub use edge::{
    edge_campaign, reconstruct_edge, CampaignStats, EdgeMode, EdgeRecovery, EdgeVerdict, NodeVector,
};
pub use error::{BddError, Result};
pub use index_resilient::{ir_reduce, is_index_resilient, is_ir_reduced};
pub use node::{Level, Node, NodeId};
pub use ops::{from_cubes, negate, reduce_robdd, restrict, Cube, DcPolicy};
pub use pla::{parse_pla, PlaError, PlaFile};
pub use quasi::{build_qr, merge_quadratic, pad_chains};
pub use resilient::{
    index_reconstruct, reduction_procedure, resilient_apply, resilient_pipeline, FaultPlan,
};
pub use unique::UniqueTable;
