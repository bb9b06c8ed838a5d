//! Symbol calculus and index verification for the C*-algebra generated on
//! L²(ℝ) by multiplications with limits at ±∞, 2π-periodic multiplications and
//! Fourier multipliers.

pub mod crossed;
pub mod dsl;
pub mod error;
pub mod funcat;
pub mod gamma;
pub mod kmap;
pub mod linalg;
pub mod opalg;
pub mod oracle;
pub mod pools;
pub mod report;
pub mod sigma;
pub mod verify;

pub use error::SymbolError;
pub use num_complex::Complex64 as C64;
