//! Slope at the origin of Thomas–Fermi-type boundary-value problems by the
//! Hankel–Padé method, with Padé reconstruction of `u(x)` and an independent
//! shooting oracle.

pub mod algebra;
pub mod series;
pub mod hankel;
pub mod pade;
pub mod oracle;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
