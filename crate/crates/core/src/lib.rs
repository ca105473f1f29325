pub mod reduce;
pub mod term;
