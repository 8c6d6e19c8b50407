pub mod approx;
pub mod error;
pub mod exact;
pub mod graph;
pub mod num;
pub mod oracle;
pub mod reductions;
pub mod treedec;
