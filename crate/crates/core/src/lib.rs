//! Exact-arithmetic workbench for A∞-algebras, homotopy Rota-Baxter operators,
//! pre-Calabi-Yau structures and homotopy double Poisson brackets over ℚ.

pub mod ainf;
pub mod dpois;
pub mod error;
pub mod kernel;
pub mod multiop;
pub mod pair;
pub mod precy;
pub mod rb;

pub use error::{Error, Result};
pub use kernel::Scalar;

/// The guide, compiled so its examples run as doctests.
pub mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/ainf.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/rota_baxter.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/precy.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/dpois.md")]
    pub mod chapter6 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod chapter7 {}
}
