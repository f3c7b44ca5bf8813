//! Exactly summable series: quadrature over logarithmic node sequences,
//! boundary series for functions holomorphic in the disk, and two-sided
//! exponential lattice sums whose values are Gamma-function expressions.

pub mod boundary;
pub mod exec;
pub mod gzeta;
pub mod lattice;
pub mod numerics;
pub mod quadrature;

pub use exec::ExecPolicy;
