pub mod cli;
pub mod linalg;
pub mod operator;
pub mod pathwise;
pub mod sampling;
pub mod symbolic;
pub mod tuple_ops;
