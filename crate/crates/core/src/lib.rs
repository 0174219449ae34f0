pub mod dual_algebra;
pub mod energy;
pub mod error;
pub mod fields;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod stability;
