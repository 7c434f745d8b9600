//! Re-export of the crate's shared test support.

#[allow(unused_imports)]
pub use qmnewt::testing::*;
