pub mod engine;
pub mod normalize;
pub mod search;
pub mod semantics;
pub mod syntax;
pub mod trace;
