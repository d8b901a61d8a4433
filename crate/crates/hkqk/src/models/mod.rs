//! The two example families: flat quaternionic space with a rotating circle
//! action, and the rigid c-map over the real hyperbolic plane.

pub mod cmap;
pub mod cone;
pub mod flat;
pub mod polysys;
