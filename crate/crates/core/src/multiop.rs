//! Sparse multilinear operations and the composition calculus.
//!
//! An operation `V_1 ⊗ … ⊗ V_n → W` of degree `r` is stored as a map from
//! input basis tuples to sparse output vectors. Every composite used by the
//! identity checkers reduces to [`insert_compose`], [`permute_inputs`] and
//! [`sum_ops`], which own all Koszul bookkeeping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::perm::{koszul_parity, Perm};
use crate::kernel::space::{all_tuples, same_space, Space};
use crate::kernel::Scalar;

/// A sparse linear combination of basis indices.
pub type Vector = BTreeMap<usize, Scalar>;

/// `target += c · src`, dropping cancelled coefficients.
pub fn axpy(target: &mut Vector, c: &Scalar, src: &Vector) {
    for (i, v) in src {
        add_coeff(target, *i, c * v);
    }
}

pub fn add_coeff(target: &mut Vector, i: usize, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = target.entry(i).or_insert_with(Scalar::zero);
    *slot += c;
    if slot.is_zero() {
        target.remove(&i);
    }
}

/// The basis vector `e_i`.
pub fn unit(i: usize) -> Vector {
    let mut v = Vector::new();
    v.insert(i, Scalar::one());
    v
}

/// A homogeneous multilinear map with a sparse structure-constant table.
#[derive(Clone)]
pub struct MultilinearOp {
    domain: Vec<Space>,
    codomain: Space,
    degree: i64,
    table: BTreeMap<Vec<usize>, Vector>,
}

impl PartialEq for MultilinearOp {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.domain.len() == other.domain.len()
            && self.domain.iter().zip(&other.domain).all(|(a, b)| same_space(a, b))
            && same_space(&self.codomain, &other.codomain)
            && self.table == other.table
    }
}

impl fmt::Debug for MultilinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "op[{} -> {}; deg {}]",
            self.domain.iter().map(|s| s.name().to_string()).collect::<Vec<_>>().join(" ⊗ "),
            self.codomain.name(),
            self.degree
        )?;
        for (k, v) in &self.table {
            writeln!(f, "  {} -> {}", self.key_label(k), self.vector_label(v))?;
        }
        Ok(())
    }
}

impl MultilinearOp {
    /// The zero operation with the given signature.
    pub fn zero(domain: Vec<Space>, codomain: Space, degree: i64) -> Self {
        MultilinearOp { domain, codomain, degree, table: BTreeMap::new() }
    }

    pub fn identity(space: &Space) -> Self {
        let mut op = Self::zero(vec![space.clone()], space.clone(), 0);
        for i in 0..space.dim() {
            op.table.insert(vec![i], unit(i));
        }
        op
    }

    /// Tabulate `f` on every basis tuple (in parallel) and check homogeneity.
    pub fn from_fn<F>(domain: Vec<Space>, codomain: Space, degree: i64, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Vector + Sync,
    {
        let dims: Vec<usize> = domain.iter().map(|s| s.dim()).collect();
        let rows: Vec<(Vec<usize>, Vector)> = all_tuples(&dims)
            .into_par_iter()
            .map(|k| {
                let v = f(&k);
                (k, v)
            })
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let mut op = Self::zero(domain, codomain, degree);
        for (k, v) in rows {
            op.check_entry(&k, &v)?;
            op.table.insert(k, v);
        }
        Ok(op)
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn domain(&self) -> &[Space] {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Number of nonzero structure constants.
    pub fn nnz(&self) -> usize {
        self.table.values().map(BTreeMap::len).sum()
    }

    /// Value on a basis tuple (empty vector when absent).
    pub fn get(&self, key: &[usize]) -> Vector {
        self.table.get(key).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, key: &[usize], out: usize) -> Scalar {
        self.table.get(key).and_then(|v| v.get(&out)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn input_degree(&self, key: &[usize]) -> i64 {
        key.iter().zip(&self.domain).map(|(&i, s)| s.degree(i)).sum()
    }

    fn check_key(&self, key: &[usize]) -> Result<()> {
        if key.len() != self.arity() {
            return Err(Error::Argument(format!(
                "key of length {} for an arity-{} operation",
                key.len(),
                self.arity()
            )));
        }
        for (pos, (&i, s)) in key.iter().zip(&self.domain).enumerate() {
            if i >= s.dim() {
                return Err(Error::Argument(format!("index {i} out of range in slot {pos} ({})", s.name())));
            }
        }
        Ok(())
    }

    fn check_entry(&self, key: &[usize], v: &Vector) -> Result<()> {
        self.check_key(key)?;
        let want = self.input_degree(key) + self.degree;
        for (&o, c) in v {
            if o >= self.codomain.dim() {
                return Err(Error::Argument(format!("output index {o} out of range")));
            }
            if c.is_zero() {
                return Err(Error::Structure("explicit zero coefficient".into()));
            }
            if self.codomain.degree(o) != want {
                return Err(Error::Structure(format!(
                    "inhomogeneous entry {} -> {}: output degree {} but inputs plus {} give {}",
                    self.key_label(key),
                    self.codomain.label(o),
                    self.codomain.degree(o),
                    self.degree,
                    want
                )));
            }
        }
        Ok(())
    }

    /// Add `c · e_out` to the value on `key`.
    pub fn add_entry(&mut self, key: &[usize], out: usize, c: Scalar) -> Result<()> {
        let mut v = Vector::new();
        v.insert(out, c.clone());
        if !c.is_zero() {
            self.check_entry(key, &v)?;
        }
        let slot = self.table.entry(key.to_vec()).or_default();
        add_coeff(slot, out, c);
        if slot.is_empty() {
            self.table.remove(key);
        }
        Ok(())
    }

    /// Replace the value on `key`.
    pub fn set(&mut self, key: &[usize], v: Vector) -> Result<()> {
        let v: Vector = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.check_entry(key, &v)?;
        if v.is_empty() {
            self.table.remove(key);
        } else {
            self.table.insert(key.to_vec(), v);
        }
        Ok(())
    }

    /// Label-based [`add_entry`](Self::add_entry), convenient for small examples.
    pub fn entry(&mut self, inputs: &[&str], output: &str, c: impl Into<Scalar>) -> Result<()> {
        if inputs.len() != self.arity() {
            return Err(Error::Argument(format!("{} labels for an arity-{} operation", inputs.len(), self.arity())));
        }
        let key = inputs
            .iter()
            .zip(&self.domain)
            .map(|(l, s)| {
                s.index_of(l).ok_or_else(|| Error::Argument(format!("no basis element `{l}` in {}", s.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        let out = self
            .codomain
            .index_of(output)
            .ok_or_else(|| Error::Argument(format!("no basis element `{output}` in {}", self.codomain.name())))?;
        self.add_entry(&key, out, c.into())
    }

    /// Re-verify homogeneity and the absence of explicit zeros.
    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.table {
            self.check_entry(k, v)?;
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.domain.clone(), self.codomain.clone(), self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.table {
            out.table.insert(k.clone(), v.iter().map(|(i, x)| (*i, x * c)).collect());
        }
        out
    }

    /// Same table, reinterpreted over structurally equal spaces or a new degree
    /// after a consistency check.
    pub fn with_signature(&self, domain: Vec<Space>, codomain: Space, degree: i64) -> Result<Self> {
        let op = MultilinearOp { domain, codomain, degree, table: self.table.clone() };
        op.validate()?;
        Ok(op)
    }

    pub fn same_signature(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.arity() == other.arity()
            && self.domain.iter().zip(&other.domain).all(|(a, b)| same_space(a, b))
            && same_space(&self.codomain, &other.codomain)
    }

    pub fn key_label(&self, key: &[usize]) -> String {
        key.iter().zip(&self.domain).map(|(&i, s)| s.label(i).to_string()).collect::<Vec<_>>().join(" ⊗ ")
    }

    pub fn vector_label(&self, v: &Vector) -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter().map(|(&i, c)| format!("{c}·{}", self.codomain.label(i))).collect::<Vec<_>>().join(" + ")
    }
}

/// Multilinear extension of the table. `inputs[k]` is a combination of basis
/// vectors of `op.domain()[k]`; no Koszul sign arises since the inputs are
/// elements, not maps.
pub fn apply(op: &MultilinearOp, inputs: &[Vector]) -> Result<Vector> {
    if inputs.len() != op.arity() {
        return Err(Error::Argument(format!("{} inputs for an arity-{} operation", inputs.len(), op.arity())));
    }
    for (k, (v, s)) in inputs.iter().zip(op.domain()).enumerate() {
        if let Some((&i, _)) = v.iter().next_back() {
            if i >= s.dim() {
                return Err(Error::Argument(format!("input {k} has index {i} outside {}", s.name())));
            }
        }
    }
    let mut out = Vector::new();
    for (key, val) in op.table() {
        let mut c = Scalar::one();
        for (slot, &i) in key.iter().enumerate() {
            match inputs[slot].get(&i) {
                Some(x) => c *= x,
                None => {
                    c = Scalar::zero();
                    break;
                }
            }
        }
        if !c.is_zero() {
            axpy(&mut out, &c, val);
        }
    }
    Ok(out)
}

/// `(-1)^e · outer ∘_pos inner`, with `pos` zero-based.
///
/// On basis inputs `x_0 … x_{pos-1}, y_1 … y_k, x_{pos+1} …` the composite is
/// `(-1)^{e + |inner|(|x_0|+…+|x_{pos-1}|)} outer(x_0, …, inner(y), …)`: the
/// Koszul sign of moving `inner` past the inputs on its left.
pub fn insert_compose(outer: &MultilinearOp, inner: &MultilinearOp, pos: usize, e: i64) -> Result<MultilinearOp> {
    if pos >= outer.arity() {
        return Err(Error::Composition(format!("position {pos} out of range for arity {}", outer.arity())));
    }
    if !same_space(&outer.domain[pos], inner.codomain()) {
        return Err(Error::Composition(format!(
            "inner codomain {} does not match outer slot {pos} ({})",
            inner.codomain().name(),
            outer.domain[pos].name()
        )));
    }
    let mut domain = outer.domain[..pos].to_vec();
    domain.extend(inner.domain.iter().cloned());
    domain.extend(outer.domain[pos + 1..].iter().cloned());
    let degree = outer.degree + inner.degree;
    let mut out = MultilinearOp::zero(domain, outer.codomain.clone(), degree);

    let mut by_slot: HashMap<usize, Vec<(&Vec<usize>, &Vector)>> = HashMap::new();
    for (k, v) in &outer.table {
        by_slot.entry(k[pos]).or_default().push((k, v));
    }
    let inner_odd = inner.degree & 1 == 1;
    for (ikey, ival) in &inner.table {
        for (&mid, c_in) in ival {
            let Some(rows) = by_slot.get(&mid) else {
                continue;
            };
            for (okey, oval) in rows {
                let mut sign = e;
                if inner_odd {
                    sign += outer.domain[..pos].iter().zip(okey.iter()).map(|(s, &i)| s.degree(i)).sum::<i64>();
                }
                let c = c_in.clone().signed(sign);
                let mut key = okey[..pos].to_vec();
                key.extend_from_slice(ikey);
                key.extend_from_slice(&okey[pos + 1..]);
                let slot = out.table.entry(key.clone()).or_default();
                axpy(slot, &c, oval);
                if slot.is_empty() {
                    out.table.remove(&key);
                }
            }
        }
    }
    Ok(out)
}

/// `outer ∘ (g_0 ⊗ g_1 ⊗ …)` where `None` stands for an identity slot. The
/// Koszul signs are those of the standard rule
/// `(g ⊗ h)(x ⊗ y) = (-1)^{|h||x|} g(x) ⊗ h(y)`.
pub fn compose_tensor(outer: &MultilinearOp, inners: &[Option<&MultilinearOp>], e: i64) -> Result<MultilinearOp> {
    if inners.len() != outer.arity() {
        return Err(Error::Composition(format!("{} inner slots for arity {}", inners.len(), outer.arity())));
    }
    let mut acc = outer.clone();
    let mut pos = 0;
    for g in inners {
        match g {
            Some(g) => {
                acc = insert_compose(&acc, g, pos, 0)?;
                pos += g.arity();
            }
            None => pos += 1,
        }
    }
    if e & 1 == 1 {
        acc = acc.scale(&-Scalar::one());
    }
    Ok(acc)
}

/// `P(x) = op(σ·x)`, where `σ·x` carries the Koszul sign `ε(σ; x)`. The new
/// domain has `domain[i] = op.domain[σ(i)]`, and
/// `permute_inputs(permute_inputs(op, σ), τ) = permute_inputs(op, στ)`.
pub fn permute_inputs(op: &MultilinearOp, sigma: &Perm) -> Result<MultilinearOp> {
    if sigma.len() != op.arity() {
        return Err(Error::Argument(format!("permutation of size {} for arity {}", sigma.len(), op.arity())));
    }
    let domain = sigma.pull(&op.domain);
    let mut out = MultilinearOp::zero(domain, op.codomain.clone(), op.degree);
    for (k, v) in &op.table {
        let nk = sigma.pull(k);
        let degs: Vec<i64> = nk.iter().zip(&out.domain).map(|(&i, s)| s.degree(i)).collect();
        let c = Scalar::sign(koszul_parity(sigma, &degs));
        out.table.insert(nk, v.iter().map(|(i, x)| (*i, x * &c)).collect());
    }
    Ok(out)
}

/// `Σ c_t · f_t`; all summands must share one signature.
pub fn sum_ops(terms: &[(Scalar, &MultilinearOp)]) -> Result<MultilinearOp> {
    let (_, first) = terms.first().ok_or_else(|| Error::Argument("empty sum".into()))?;
    let mut out = MultilinearOp::zero(first.domain.clone(), first.codomain.clone(), first.degree);
    for (c, f) in terms {
        add_into(&mut out, c, f)?;
    }
    Ok(out)
}

/// `acc += c · f`.
pub fn add_into(acc: &mut MultilinearOp, c: &Scalar, f: &MultilinearOp) -> Result<()> {
    if !acc.same_signature(f) {
        return Err(Error::Composition(format!(
            "signature mismatch in sum: degree {} arity {} vs degree {} arity {}",
            acc.degree,
            acc.arity(),
            f.degree,
            f.arity()
        )));
    }
    if c.is_zero() {
        return Ok(());
    }
    for (k, v) in &f.table {
        let slot = acc.table.entry(k.clone()).or_default();
        axpy(slot, c, v);
        if slot.is_empty() {
            acc.table.remove(k);
        }
    }
    Ok(())
}

/// Which degree law a family obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyKind {
    AInf,
    AInfBimodule,
    CyclicForm,
    RbAbsolute,
    RbRelative,
    RbModule,
    DoubleBracket,
    TensorFamily,
}

impl FamilyKind {
    /// Expected degree of an operation with `inputs` inputs, if the kind fixes one.
    pub fn degree_law(self, inputs: usize) -> Option<i64> {
        let n = inputs as i64;
        match self {
            FamilyKind::AInf | FamilyKind::AInfBimodule | FamilyKind::DoubleBracket => Some(n - 2),
            FamilyKind::TensorFamily => Some(n - 2),
            FamilyKind::RbAbsolute | FamilyKind::RbRelative | FamilyKind::RbModule => Some(n - 1),
            FamilyKind::CyclicForm => None,
        }
    }
}

/// Family indices: a plain arity `n` or a bi-arity `(p, q)` around a module slot.
pub trait FamilyKey: Ord + Copy + fmt::Debug + Send + Sync {
    /// Number of inputs of the indexed operation.
    fn inputs(self) -> usize;
}

impl FamilyKey for usize {
    fn inputs(self) -> usize {
        self
    }
}

impl FamilyKey for (usize, usize) {
    fn inputs(self) -> usize {
        self.0 + self.1 + 1
    }
}

/// A family of operations indexed by arity; absent indices are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct OpFamily<K: FamilyKey> {
    pub kind: FamilyKind,
    ops: BTreeMap<K, MultilinearOp>,
}

impl<K: FamilyKey> OpFamily<K> {
    pub fn new(kind: FamilyKind) -> Self {
        OpFamily { kind, ops: BTreeMap::new() }
    }

    /// Insert an operation after checking arity and the degree law. Zero
    /// operations are dropped.
    pub fn insert(&mut self, key: K, op: MultilinearOp) -> Result<()> {
        if op.arity() != key.inputs() {
            return Err(Error::Structure(format!(
                "{:?} at {key:?} has arity {}, expected {}",
                self.kind,
                op.arity(),
                key.inputs()
            )));
        }
        if let Some(d) = self.kind.degree_law(key.inputs()) {
            if op.degree() != d {
                return Err(Error::Structure(format!(
                    "{:?} at {key:?} has degree {}, the degree law requires {d}",
                    self.kind,
                    op.degree()
                )));
            }
        }
        if op.is_zero() {
            self.ops.remove(&key);
        } else {
            self.ops.insert(key, op);
        }
        Ok(())
    }

    pub fn get(&self, key: K) -> Option<&MultilinearOp> {
        self.ops.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &MultilinearOp)> {
        self.ops.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = K> + '_ {
        self.ops.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Largest number of inputs among present operations (0 if none).
    pub fn max_inputs(&self) -> usize {
        self.ops.keys().map(|k| k.inputs()).max().unwrap_or(0)
    }

    /// Re-check every member against the degree law.
    pub fn validate(&self) -> Result<()> {
        for (k, op) in &self.ops {
            op.validate()?;
            if let Some(d) = self.kind.degree_law(k.inputs()) {
                if op.degree() != d {
                    return Err(Error::Structure(format!(
                        "{:?} at {k:?} has degree {}, the degree law requires {d}",
                        self.kind,
                        op.degree()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One nonzero residual value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    /// Identity family, e.g. `stasheff`.
    pub identity: String,
    /// Arity or index data of the identity instance.
    pub indices: Vec<i64>,
    /// Input basis labels.
    pub inputs: Vec<String>,
    /// Output basis label.
    pub output: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PassUpToCutoff,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::PassUpToCutoff => "pass-up-to-cutoff",
            Verdict::Fail => "fail",
        })
    }
}

/// Residual ledger of one checker run. Empty `entries` means every checked
/// identity instance vanished exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub cutoff: usize,
    /// Number of identity instances evaluated.
    pub checked: usize,
    pub entries: Vec<Residual>,
    /// Instances excluded from the verdict because they exceed a truncation.
    pub truncated: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, cutoff: usize) -> Self {
        CheckReport { check: check.into(), cutoff, checked: 0, entries: Vec::new(), truncated: Vec::new() }
    }

    pub fn verdict(&self) -> Verdict {
        if !self.entries.is_empty() {
            Verdict::Fail
        } else if !self.truncated.is_empty() {
            Verdict::PassUpToCutoff
        } else {
            Verdict::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.entries.is_empty()
    }

    /// Record every entry of a residual operation.
    pub fn absorb(&mut self, identity: &str, indices: &[i64], residual: &MultilinearOp) {
        self.checked += 1;
        for (k, v) in residual.table() {
            let inputs: Vec<String> = k.iter().zip(residual.domain()).map(|(&i, s)| s.label(i).to_string()).collect();
            for (&o, c) in v {
                self.entries.push(Residual {
                    identity: identity.to_string(),
                    indices: indices.to_vec(),
                    inputs: inputs.clone(),
                    output: residual.codomain().label(o).to_string(),
                    value: c.clone(),
                });
            }
        }
    }

    /// Record a scalar residual computed outside the operation calculus.
    pub fn push(&mut self, identity: &str, indices: &[i64], inputs: Vec<String>, output: String, value: Scalar) {
        if !value.is_zero() {
            self.entries.push(Residual {
                identity: identity.to_string(),
                indices: indices.to_vec(),
                inputs,
                output,
                value,
            });
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.entries.extend(other.entries);
        self.truncated.extend(other.truncated);
    }

    pub fn first(&self) -> Option<&Residual> {
        self.entries.first()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} (cutoff {}, {} instances, {} residuals, {} truncation-limited)",
            self.check,
            self.verdict(),
            self.cutoff,
            self.checked,
            self.entries.len(),
            self.truncated.len()
        )?;
        for r in &self.entries {
            writeln!(f, "  {}{:?}: ({}) -> {} : {}", r.identity, r.indices, r.inputs.join(", "), r.output, r.value)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::space::GradedSpace;

    fn dual_numbers() -> Space {
        GradedSpace::from_pairs("A", &[("1", 0), ("x", 0)]).unwrap()
    }

    fn product(a: &Space) -> MultilinearOp {
        let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
        m.entry(&["1", "1"], "1", 1).unwrap();
        m.entry(&["1", "x"], "x", 1).unwrap();
        m.entry(&["x", "1"], "x", 1).unwrap();
        m
    }

    #[test]
    fn identity_is_neutral() {
        let a = dual_numbers();
        let m = product(&a);
        let id = MultilinearOp::identity(&a);
        assert_eq!(insert_compose(&id, &m, 0, 0).unwrap(), m);
        assert_eq!(insert_compose(&m, &id, 1, 0).unwrap(), m);
    }

    #[test]
    fn associativity_of_dual_numbers() {
        let a = dual_numbers();
        let m = product(&a);
        let left = insert_compose(&m, &m, 0, 0).unwrap();
        let right = insert_compose(&m, &m, 1, 0).unwrap();
        assert_eq!(left, right);
        // (1+x)(1+x) = 1 + 2x
        let v: Vector = [(0, Scalar::one()), (1, Scalar::one())].into_iter().collect();
        let sq = apply(&m, &[v.clone(), v]).unwrap();
        assert_eq!(sq.get(&0), Some(&Scalar::one()));
        assert_eq!(sq.get(&1), Some(&Scalar::from_int(2)));
        let res = sum_ops(&[(Scalar::one(), &left), (-Scalar::one(), &right)]).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn sums_prune_to_zero() {
        let a = dual_numbers();
        let m = product(&a);
        assert!(sum_ops(&[(Scalar::one(), &m), (-Scalar::one(), &m)]).unwrap().is_zero());
        assert_eq!(sum_ops(&[(Scalar::from_int(3), &m)]).unwrap(), m.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn apply_on_zero_input_vanishes() {
        let a = dual_numbers();
        let m = product(&a);
        let t = insert_compose(&m, &m, 0, 0).unwrap();
        let one = unit(0);
        assert!(apply(&t, &[one.clone(), Vector::new(), one]).unwrap().is_empty());
        let z = MultilinearOp::zero(vec![a.clone()], a.clone(), 0);
        assert!(apply(&z, &[unit(1)]).unwrap().is_empty());
    }

    #[test]
    fn inhomogeneous_entries_rejected() {
        let a = GradedSpace::from_pairs("A", &[("u", 0), ("v", 1)]).unwrap();
        let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
        assert!(m.entry(&["u", "u"], "v", 1).is_err());
        assert!(m.entry(&["u", "v"], "v", 1).is_ok());
    }

    #[test]
    fn commutative_product_is_symmetric() {
        let a = dual_numbers();
        let m = product(&a);
        let sw = Perm::transposition(2, 0, 1);
        assert_eq!(permute_inputs(&m, &sw).unwrap(), m);
    }

    #[test]
    fn odd_swap_picks_up_sign() {
        let a = GradedSpace::from_pairs("A", &[("u", 1), ("w", 2)]).unwrap();
        let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
        m.entry(&["u", "u"], "w", 1).unwrap();
        let p = permute_inputs(&m, &Perm::transposition(2, 0, 1)).unwrap();
        assert_eq!(p.coeff(&[0, 0], 1), -Scalar::one());
    }

    #[test]
    fn family_enforces_degree_law() {
        let a = dual_numbers();
        let mut fam: OpFamily<usize> = OpFamily::new(FamilyKind::AInf);
        assert!(fam.insert(2, product(&a)).is_ok());
        assert!(fam.insert(1, MultilinearOp::identity(&a)).is_err());
        assert!(fam.insert(3, product(&a)).is_err());
    }
}
