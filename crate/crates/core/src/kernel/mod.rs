//! Exact scalars, graded spaces, permutations and the sign engine.

pub mod linalg;
pub mod perm;
pub mod scalar;
pub mod signs;
pub mod space;

pub use perm::{
    adjacent_transpositions, chi_parity, cyclic_group, doubled, enumerate_shuffles, koszul_parity, koszul_sign,
    reorder_parity, symmetric_group, Perm,
};
pub use scalar::{ParseScalarError, Scalar};
pub use space::{
    all_tuples, dual_basis, dual_space, suspend, tensor_power, tensor_space, BasisElem, DirectSum, GradedSpace, Space,
    SpaceExpr,
};
