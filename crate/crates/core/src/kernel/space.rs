use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One homogeneous basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisElem {
    pub label: String,
    pub degree: i64,
}

/// A finite-dimensional graded vector space with a fixed homogeneous basis.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct GradedSpace {
    name: String,
    basis: Vec<BasisElem>,
    index: HashMap<String, usize>,
}

/// Shared handle; spaces are immutable once built.
pub type Space = Arc<GradedSpace>;

#[derive(Serialize, Deserialize)]
struct RawSpace {
    name: String,
    basis: Vec<BasisElem>,
}

impl TryFrom<RawSpace> for GradedSpace {
    type Error = Error;
    fn try_from(r: RawSpace) -> Result<Self> {
        GradedSpace::new(r.name, r.basis)
    }
}

impl From<GradedSpace> for RawSpace {
    fn from(s: GradedSpace) -> Self {
        RawSpace { name: s.name, basis: s.basis }
    }
}

impl PartialEq for GradedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.basis == other.basis
    }
}

impl Eq for GradedSpace {}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.name)?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", b.label, b.degree)?;
        }
        write!(f, "]")
    }
}

impl GradedSpace {
    pub fn new(name: impl Into<String>, basis: Vec<BasisElem>) -> Result<Self> {
        let name = name.into();
        if basis.is_empty() {
            return Err(Error::Space(format!("space `{name}` has empty basis")));
        }
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(Error::Space(format!("duplicate label `{}` in space `{name}`", b.label)));
            }
        }
        Ok(GradedSpace { name, basis, index })
    }

    /// Convenience constructor from `(label, degree)` pairs.
    pub fn from_pairs(name: &str, pairs: &[(&str, i64)]) -> Result<Space> {
        let basis = pairs.iter().map(|(l, d)| BasisElem { label: l.to_string(), degree: *d }).collect();
        Ok(Arc::new(Self::new(name, basis)?))
    }

    /// The one-dimensional ground field in degree 0.
    pub fn ground() -> Space {
        Self::from_pairs("k", &[("1", 0)]).expect("ground field")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.degree).collect()
    }
}

/// Compare two handles structurally, short-circuiting on pointer equality.
pub fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

const DUAL_MARK: char = '^';

fn dual_label(label: &str) -> String {
    match label.strip_suffix(DUAL_MARK) {
        Some(orig) => orig.to_string(),
        None => format!("{label}{DUAL_MARK}"),
    }
}

/// Symbolic description of a derived space; [`SpaceExpr::materialize`] turns it
/// into a concrete basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceExpr {
    Base(Space),
    Dual(Box<SpaceExpr>),
    Susp(Box<SpaceExpr>, i64),
    Tensor(Vec<SpaceExpr>),
    DirectSum(Vec<SpaceExpr>),
}

impl SpaceExpr {
    pub fn base(s: &Space) -> Self {
        SpaceExpr::Base(s.clone())
    }

    pub fn dual(self) -> Self {
        SpaceExpr::Dual(Box::new(self))
    }

    pub fn susp(self, d: i64) -> Self {
        SpaceExpr::Susp(Box::new(self), d)
    }

    /// Build the concrete graded space. Labels are derived deterministically:
    /// duals append `^` (and strip it again, so the double dual is the
    /// original), suspensions prefix `s{d}:`, tensors join with `⊗`.
    pub fn materialize(&self) -> Result<Space> {
        match self {
            SpaceExpr::Base(s) => Ok(s.clone()),
            SpaceExpr::Dual(inner) => Ok(dual_space(&inner.materialize()?)),
            SpaceExpr::Susp(inner, d) => Ok(suspend(&inner.materialize()?, *d)),
            SpaceExpr::Tensor(parts) => {
                let spaces = parts.iter().map(|p| p.materialize()).collect::<Result<Vec<_>>>()?;
                tensor_space(&spaces)
            }
            SpaceExpr::DirectSum(parts) => {
                let spaces = parts.iter().map(|p| p.materialize()).collect::<Result<Vec<_>>>()?;
                Ok(DirectSum::new(&spaces)?.space)
            }
        }
    }
}

/// `V∨` with basis `v^i` of degree `-deg(v_i)`, paired by `v^i(v_j) = δ_ij`.
pub fn dual_space(v: &Space) -> Space {
    let name = dual_label(v.name());
    let basis = v.basis().iter().map(|b| BasisElem { label: dual_label(&b.label), degree: -b.degree }).collect();
    Arc::new(GradedSpace::new(name, basis).expect("dual of a valid space"))
}

/// Alias of [`dual_space`].
pub fn dual_basis(v: &Space) -> Space {
    dual_space(v)
}

fn susp_parts(label: &str) -> (i64, &str) {
    if let Some(rest) = label.strip_prefix('s') {
        if let Some((num, tail)) = rest.split_once(':') {
            if let Ok(d) = num.parse::<i64>() {
                return (d, tail);
            }
        }
    }
    (0, label)
}

fn susp_label(label: &str, d: i64) -> String {
    let (d0, core) = susp_parts(label);
    let total = d0 + d;
    if total == 0 {
        core.to_string()
    } else {
        format!("s{total}:{core}")
    }
}

/// `s^d V`: the element `s^d v` has degree `deg(v) + d`.
pub fn suspend(v: &Space, d: i64) -> Space {
    if d == 0 {
        return v.clone();
    }
    let basis = v.basis().iter().map(|b| BasisElem { label: susp_label(&b.label, d), degree: b.degree + d }).collect();
    Arc::new(GradedSpace::new(susp_label(v.name(), d), basis).expect("suspension"))
}

/// Tensor product with row-major (mixed radix) basis order.
pub fn tensor_space(parts: &[Space]) -> Result<Space> {
    if parts.is_empty() {
        return Ok(GradedSpace::ground());
    }
    let name = parts.iter().map(|p| p.name().to_string()).collect::<Vec<_>>().join("⊗");
    let mut basis = Vec::new();
    let mut idx = vec![0usize; parts.len()];
    loop {
        let label = idx.iter().zip(parts).map(|(&i, p)| p.label(i).to_string()).collect::<Vec<_>>().join("⊗");
        let degree = idx.iter().zip(parts).map(|(&i, p)| p.degree(i)).sum();
        basis.push(BasisElem { label, degree });
        if !advance(&mut idx, |k| parts[k].dim()) {
            break;
        }
    }
    Ok(Arc::new(GradedSpace::new(name, basis)?))
}

/// Tensor power `V^{⊗n}`.
pub fn tensor_power(v: &Space, n: usize) -> Result<Space> {
    tensor_space(&vec![v.clone(); n])
}

/// Mixed-radix index of a tuple in a tensor product of spaces of dims `dims`.
pub fn tensor_index(tuple: &[usize], dims: &[usize]) -> usize {
    tuple.iter().zip(dims).fold(0, |acc, (&t, &d)| acc * d + t)
}

/// Inverse of [`tensor_index`].
pub fn tensor_tuple(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Odometer increment; returns false after the last tuple.
pub fn advance(idx: &mut [usize], dim: impl Fn(usize) -> usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dim(k) {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Every tuple in `dims[0] × … × dims[n-1]`, row-major.
pub fn all_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    if dims.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut idx = vec![0; dims.len()];
    loop {
        out.push(idx.clone());
        if !advance(&mut idx, |k| dims[k]) {
            break;
        }
    }
    out
}

/// A direct sum together with the block layout of its summands.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub space: Space,
    pub parts: Vec<Space>,
    pub offsets: Vec<usize>,
}

impl DirectSum {
    pub fn new(parts: &[Space]) -> Result<Self> {
        let mut labels = std::collections::HashSet::new();
        let clash = parts.iter().flat_map(|p| p.basis().iter()).any(|b| !labels.insert(b.label.clone()));
        let mut basis = Vec::new();
        let mut offsets = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            offsets.push(basis.len());
            for b in p.basis() {
                let label = if clash { format!("{k}.{}", b.label) } else { b.label.clone() };
                basis.push(BasisElem { label, degree: b.degree });
            }
        }
        let name = parts.iter().map(|p| p.name().to_string()).collect::<Vec<_>>().join("⊕");
        Ok(DirectSum { space: Arc::new(GradedSpace::new(name, basis)?), parts: parts.to_vec(), offsets })
    }

    /// Index in the sum of basis vector `i` of summand `part`.
    pub fn embed(&self, part: usize, i: usize) -> usize {
        self.offsets[part] + i
    }

    /// `(summand, local index)` of a basis vector of the sum.
    pub fn locate(&self, i: usize) -> (usize, usize) {
        let part = self.offsets.iter().rposition(|&o| o <= i).expect("offset");
        (part, i - self.offsets[part])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(&str, i64)]) -> Space {
        GradedSpace::from_pairs("V", pairs).unwrap()
    }

    #[test]
    fn dual_negates_degrees() {
        let s = v(&[("a", 0), ("b", 1)]);
        let d = dual_space(&s);
        assert_eq!(d.degrees(), vec![0, -1]);
        assert_eq!(d.label(1), "b^");
    }

    #[test]
    fn double_dual_is_identity() {
        let s = v(&[("a", 0), ("b", 1), ("c", -2)]);
        let dd = SpaceExpr::base(&s).dual().dual().materialize().unwrap();
        assert_eq!(*dd, *s);
    }

    #[test]
    fn one_dim_dual() {
        let s = v(&[("e", 0)]);
        let d = dual_basis(&s);
        assert_eq!(d.dim(), 1);
        assert_eq!(d.degree(0), 0);
    }

    #[test]
    fn suspension_shifts() {
        let s = v(&[("a", 0), ("b", 1)]);
        let t = SpaceExpr::base(&s).susp(-1).susp(3).materialize().unwrap();
        assert_eq!(t.degrees(), vec![2, 3]);
        assert_eq!(t.label(0), "s2:a");
        let back = suspend(&t, -2);
        assert_eq!(*back, *s);
    }

    #[test]
    fn tensor_degrees_add() {
        let s = v(&[("a", 0), ("b", 1)]);
        let t = tensor_power(&s, 3).unwrap();
        assert_eq!(t.dim(), 8);
        let i = tensor_index(&[1, 0, 1], &[2, 2, 2]);
        assert_eq!(t.degree(i), 2);
        assert_eq!(t.label(i), "b⊗a⊗b");
        assert_eq!(tensor_tuple(i, &[2, 2, 2]), vec![1, 0, 1]);
    }

    #[test]
    fn direct_sum_layout() {
        let a = v(&[("a", 0), ("b", 1)]);
        let ds = DirectSum::new(&[a.clone(), dual_space(&a)]).unwrap();
        assert_eq!(ds.space.dim(), 4);
        assert_eq!(ds.locate(3), (1, 1));
        assert_eq!(ds.embed(1, 0), 2);
        let clash = DirectSum::new(&[a.clone(), a]).unwrap();
        assert_eq!(clash.space.label(2), "1.a");
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(GradedSpace::from_pairs("V", &[("a", 0), ("a", 1)]).is_err());
        assert!(GradedSpace::from_pairs("V", &[]).is_err());
    }
}
