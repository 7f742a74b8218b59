//! DMAC-1 and DMAC-2: keyed hash functions computed as walks on the
//! algebraic bipartite graphs `D(n, Q)` of large girth.
//!
//! ```
//! use dmac_core::{dmac_bytes, keygen, verify_bytes, MacParams};
//!
//! let params = MacParams::default_profile();
//! let key = keygen(&params, 10, &mut rand::thread_rng()).unwrap();
//! let tag = dmac_bytes(b"attack at dawn", &key, &params).unwrap();
//! assert_eq!(tag.len_bits(), 256);
//! assert!(verify_bytes(b"attack at dawn", &key, &params, &tag).unwrap());
//! ```

pub mod analysis;
pub mod error;
pub mod field;
pub mod graph;
pub mod kat;
pub mod mac;
pub mod ops;
pub mod params;

pub use error::{Error, Result};
pub use field::{FieldElement, PrimeModulus};
pub use graph::{EquationShape, GraphParams, Vertex, VertexKind};
pub use mac::{
    dmac, dmac_blocks, dmac_bytes, keygen, trace, trace_blocks, verify, verify_bytes, walk_step,
    MacKey, Tag, WalkState,
};
pub use params::{girth_formula, suggest_params, Encoding, MacParams, Padding, TagMode, Variant};
