//! Topos-style reformulation machinery for finite-dimensional quantum
//! systems.
//!
//! The ambient algebra is `B(C^n)`. Contexts (abelian subalgebras) are kept
//! as partitions of the identity into atomic projections, a finite poset of
//! them serves as base category, and everything built on top of it
//! (the spectral presheaf, daseinisation of projections and of self-adjoint
//! operators, pseudo-states and their values) is computed componentwise over
//! that poset.

pub mod context;
pub mod daseinise;
pub mod error;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod presheaf;
pub mod random;
pub mod spin1;
pub mod states;
pub mod suite;

pub use context::{
    build_poset, coarsenings, context_from_atoms, context_from_operator, includes, intersect,
    Closure, Context, ContextId, ContextPoset,
};
pub use daseinise::{daseinisation_preimage, daseinise_projection, delta_i_proj, delta_o_proj};
pub use error::{Error, Result};
pub use linalg::{
    eigenstructure, from_spectral_family, proj_join, proj_leq, proj_meet, spectral_family,
    CMatrix, CVector, EigenStructure, HermitianOperator, Projection, SpectralFamily, DEFAULT_TOL,
};
pub use operator::{
    antonymous, cone, delta_i_op, delta_o_op, filter_from_point, gelfand_transform_inner,
    gelfand_transform_outer, observable, operator_arrow, spectral_leq, FilterScope, OperatorArrow,
    OrderPair, PrincipalFilter,
};
pub use presheaf::{
    alpha, alpha_inverse, evaluate, global_sections, restrict, spectrum, sub_implies, sub_join,
    sub_leq, sub_meet, sub_not, ClopenSubobject, GelfandPoint,
};
pub use states::{
    check_containment, expectation, pseudo_state, value, ContainmentReport, UnitVector,
    ValueSubobject,
};
