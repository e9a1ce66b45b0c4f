//! The node tree, its centers and roots, and derived interval families.

mod cantor;
pub mod dense;
mod node;
mod params;
mod state;

pub use cantor::{classical_cantor, classical_dimension};
pub use node::{Node, Relation};
pub use params::{alpha_of, ConstructionParams, UNDERFLOW_FLOOR};
pub use state::{
    build_construction, poisson_unit_i, poisson_unit_i_deriv, ConstructionState, Frame, NodeJson, NodeRecord,
    StateJson,
};
