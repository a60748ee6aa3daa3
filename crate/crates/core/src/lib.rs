pub mod behavior;
pub mod bitset;
pub mod boxes;
pub mod classify;
pub mod cliques;
pub mod dgp;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod inequality;
pub mod lp;
pub mod nspolytope;
pub mod poly;
pub mod rational;
pub mod scenario;
pub mod symmetry;
pub mod witness;
