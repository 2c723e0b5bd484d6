//! Alternating semiregular polytopes from tail-triangle C-groups.

pub mod group;
pub mod ttgroup;
pub mod fixture;
pub mod poset;
pub mod reference;
pub mod wythoff;
pub mod modred;
pub mod amalgam;
pub mod selftest;
