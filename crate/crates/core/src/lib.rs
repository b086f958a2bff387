//! q-parabolicity of stratified pseudomanifolds with iterated edge metrics.

pub mod checker;
pub mod cone;
pub mod ends;
pub mod flat;
pub mod logspace;
pub mod quad;
pub mod stability;
pub mod strata;
