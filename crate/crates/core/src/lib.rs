//! Lookup-table accelerated linear algebra over small prime fields.
//!
//! - [`field`]: table-driven F_p arithmetic and mixed-radix key packing.
//! - [`table`]: precomputed `M^{(x)k} v` tables.
//! - [`kron`]: Kronecker-power transforms (dense, Yates, table-accelerated),
//!   including the Walsh-Hadamard transform and multilinear evaluation.
//! - [`bilinear`]: matrix multiplication from bilinear identities with an
//!   optional product-table base case.
//! - [`cost`]: bit-operation accounting.
//! - [`bench`]: seeded sweeps producing CSV records.

pub mod bench;
pub mod bilinear;
pub mod cost;
pub mod error;
pub mod field;
pub mod io;
pub mod kron;
pub mod rng;
pub mod table;

pub use bilinear::{
    build_product_table, choose_mm_params, mm_naive, mm_recursive, verify_identity,
    BilinearIdentity, CounterexampleReport, MmParams, ProductTable,
};
pub use cost::{bitop_cost, CostCounters, CostSink, NoCost};
pub use error::{Error, Result};
pub use field::{make_field, pack_key, unpack_key, FieldCtx, FieldMatrix, FieldVec};
pub use kron::{
    apply_naive, apply_table_split, apply_yates, choose_wht_params, eval_multilinear, wht,
    wht_table, KronSpec, WhtAlgo, WhtParams,
};
pub use table::{build_table, TableCache, TransformTable, DEFAULT_MEM_CAP};
