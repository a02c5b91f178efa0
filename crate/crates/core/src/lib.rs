pub mod bclass;
pub mod expr;
pub mod graph;
pub mod pushforward;
pub mod reduce;
