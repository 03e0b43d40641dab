//! Homotopy double Lie / double Poisson brackets `⟦…⟧_n: V^{⊗n} → V^{⊗n}`,
//! their identities, the two constructions from Rota-Baxter data (through
//! a pre-CY structure and directly through `Ψⁿ`), AYBE∞ with the Schedler
//! correspondence, and the homotopy Poisson structure on a truncated
//! symmetric algebra.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ainf::{check_signature, AInfStructure};
use crate::error::{Error, Result};
use crate::kernel::linalg::{self, Matrix};
use crate::kernel::perm::{adjacent_transpositions, cyclic_group, enumerate_shuffles, koszul_parity, Perm};
use crate::kernel::signs;
use crate::kernel::space::{all_tuples, same_space, tensor_index, tensor_power, tensor_tuple, GradedSpace, Space};
use crate::kernel::Scalar;
use crate::multiop::{
    add_into, axpy, insert_compose, permute_inputs, CheckReport, FamilyKind, MultilinearOp, OpFamily, Vector,
};
use crate::pair::InteractivePair;
use crate::precy::{check_precy_flags, PreCYStructure};
use crate::rb::{check_dg_relative_rb, RbFamily};

/// A sparse element of a tensor power, keyed by basis tuples.
pub type Tensor = BTreeMap<Vec<usize>, Scalar>;

fn add_term(t: &mut Tensor, key: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match t.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn add_tensor(acc: &mut Tensor, c: &Scalar, t: &Tensor) {
    for (k, v) in t {
        add_term(acc, k.clone(), c * v);
    }
}

fn tuple_degree(t: &[usize], degs: &[i64]) -> i64 {
    t.iter().map(|&i| degs[i]).sum()
}

/// `σ·x` on one basis tuple, with its Koszul sign.
fn act_tuple(sigma: &Perm, t: &[usize], degs: &[i64]) -> (Vec<usize>, i64) {
    let d: Vec<i64> = t.iter().map(|&i| degs[i]).collect();
    (sigma.act(t), koszul_parity(sigma, &d))
}

/// A linear map between tensor powers of one graded space, sparse by input
/// tuple.
#[derive(Clone, Debug, Default, PartialEq)]
struct TensorMap {
    degree: i64,
    table: BTreeMap<Vec<usize>, Tensor>,
}

impl TensorMap {
    fn zero(degree: i64) -> Self {
        TensorMap { degree, table: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.table.values().all(|v| v.is_empty())
    }

    fn add(&mut self, key: Vec<usize>, t: &Tensor, c: &Scalar) {
        let e = self.table.entry(key.clone()).or_default();
        add_tensor(e, c, t);
        if e.is_empty() {
            self.table.remove(&key);
        }
    }

    fn add_map(&mut self, c: &Scalar, other: &TensorMap) {
        for (k, v) in &other.table {
            self.add(k.clone(), v, c);
        }
    }

    fn apply(&self, x: &Tensor) -> Tensor {
        let mut out = Tensor::new();
        for (k, c) in x {
            if let Some(v) = self.table.get(k) {
                add_tensor(&mut out, c, v);
            }
        }
        out
    }

    /// `self ∘ g`.
    fn after(&self, g: &TensorMap) -> TensorMap {
        let mut out = TensorMap::zero(self.degree + g.degree);
        for (k, v) in &g.table {
            let img = self.apply(v);
            out.add(k.clone(), &img, &Scalar::one());
        }
        out
    }

    /// `id^{⊗left} ⊗ self ⊗ id^{⊗right}` on a space of dimension `dim`.
    fn extend(&self, left: usize, right: usize, degs: &[i64]) -> TensorMap {
        let dim = degs.len();
        let ls = all_tuples(&vec![dim; left]);
        let rs = all_tuples(&vec![dim; right]);
        let mut out = TensorMap::zero(self.degree);
        for (k, v) in &self.table {
            for l in &ls {
                let sign = self.degree * tuple_degree(l, degs);
                for r in &rs {
                    let key: Vec<usize> = l.iter().chain(k).chain(r).copied().collect();
                    let mut img = Tensor::new();
                    for (y, c) in v {
                        let yk: Vec<usize> = l.iter().chain(y).chain(r).copied().collect();
                        add_term(&mut img, yk, c.clone().signed(sign));
                    }
                    out.add(key, &img, &Scalar::one());
                }
            }
        }
        out
    }

    /// `σ ∘ self ∘ σ⁻¹`.
    fn conjugate(&self, sigma: &Perm, degs: &[i64]) -> TensorMap {
        let mut out = TensorMap::zero(self.degree);
        for (k, v) in &self.table {
            let (nk, e) = act_tuple(sigma, k, degs);
            let mut img = Tensor::new();
            for (y, c) in v {
                let (ny, e2) = act_tuple(sigma, y, degs);
                add_term(&mut img, ny, c.clone().signed(e + e2));
            }
            out.add(nk, &img, &Scalar::one());
        }
        out
    }

    fn from_op(op: &MultilinearOp, dims_out: &[usize]) -> TensorMap {
        let mut out = TensorMap::zero(op.degree());
        for (k, v) in op.table() {
            let img: Tensor = v.iter().map(|(&o, c)| (tensor_tuple(o, dims_out), c.clone())).collect();
            out.add(k.clone(), &img, &Scalar::one());
        }
        out
    }

    fn to_op(&self, v: &Space, n_in: usize, n_out: usize) -> Result<MultilinearOp> {
        let codomain = tensor_power(v, n_out)?;
        let dims = vec![v.dim(); n_out];
        let mut op = MultilinearOp::zero(vec![v.clone(); n_in], codomain, self.degree);
        for (k, img) in &self.table {
            for (y, c) in img {
                op.add_entry(k, tensor_index(y, &dims), c.clone())?;
            }
        }
        Ok(op)
    }
}

// ---------------------------------------------------------------------------
// Double brackets

/// `{⟦…⟧_n}` on `V` with an optional associative product.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleBracketFamily {
    space: Space,
    brackets: OpFamily<usize>,
    product: Option<MultilinearOp>,
}

impl DoubleBracketFamily {
    /// Every bracket must map `V^{⊗n}` to `V^{⊗n}` with degree `n - 2`.
    pub fn new(space: Space, brackets: OpFamily<usize>, product: Option<MultilinearOp>) -> Result<Self> {
        if brackets.kind != FamilyKind::DoubleBracket {
            return Err(Error::Structure("expected a double-bracket family".into()));
        }
        brackets.validate()?;
        for (&n, op) in brackets.iter() {
            check_signature(op, &vec![space.clone(); n], &tensor_power(&space, n)?, "⟦…⟧_n")?;
        }
        if let Some(m) = &product {
            check_signature(m, &[space.clone(), space.clone()], &space, "product")?;
            if m.degree() != 0 {
                return Err(Error::Structure("product must have degree 0".into()));
            }
        }
        Ok(DoubleBracketFamily { space, brackets, product })
    }

    pub fn zero(space: Space) -> Self {
        DoubleBracketFamily { space, brackets: OpFamily::new(FamilyKind::DoubleBracket), product: None }
    }

    /// An empty bracket `V^{⊗n} → V^{⊗n}` of the right degree, to fill with
    /// `entry(&["u", "v"], "v⊗u", c)`.
    pub fn blank(space: &Space, n: usize) -> Result<MultilinearOp> {
        Ok(MultilinearOp::zero(vec![space.clone(); n], tensor_power(space, n)?, n as i64 - 2))
    }

    pub fn with_product(mut self, product: Option<MultilinearOp>) -> Result<Self> {
        self.product = product;
        Self::new(self.space, self.brackets, self.product)
    }

    pub fn insert(&mut self, n: usize, op: MultilinearOp) -> Result<()> {
        check_signature(&op, &vec![self.space.clone(); n], &tensor_power(&self.space, n)?, "⟦…⟧_n")?;
        self.brackets.insert(n, op)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn family(&self) -> &OpFamily<usize> {
        &self.brackets
    }

    pub fn bracket(&self, n: usize) -> Option<&MultilinearOp> {
        self.brackets.get(n)
    }

    pub fn product(&self) -> Option<&MultilinearOp> {
        self.product.as_ref()
    }

    pub fn max_arity(&self) -> usize {
        self.brackets.max_inputs()
    }

    /// Multiply every `⟦…⟧_n` by `c(n)`.
    pub fn scaled(&self, c: impl Fn(usize) -> Scalar) -> Self {
        let mut out = self.clone();
        for (&n, op) in self.brackets.iter() {
            out.brackets.insert(n, op.scale(&c(n))).expect("same signature");
        }
        out
    }

    fn degs(&self) -> Vec<i64> {
        self.space.degrees()
    }

    fn map(&self, n: usize) -> TensorMap {
        match self.brackets.get(n) {
            Some(op) => TensorMap::from_op(op, &vec![self.space.dim(); n]),
            None => TensorMap::zero(n as i64 - 2),
        }
    }
}

fn bracket_report_cutoff(f: &DoubleBracketFamily, name: &str, max_n: usize) -> CheckReport {
    let mut r = CheckReport::new(name, max_n);
    let top = f.max_arity();
    if top > 0 && max_n < 2 * top - 1 {
        r.truncated.push(format!("identities above n = {max_n} involve brackets up to arity {top}"));
    }
    r
}

/// Residual of `σ∘⟦…⟧_n∘σ⁻¹ = sgn(σ)⟦…⟧_n` for one `σ`.
fn conjugation_residual(f: &DoubleBracketFamily, n: usize, sigma: &Perm) -> Result<MultilinearOp> {
    let degs = f.degs();
    let b = f.map(n);
    let mut r = b.conjugate(sigma, &degs);
    r.add_map(&-sigma.sgn(), &b);
    r.to_op(&f.space, n, n)
}

/// Conjugation by the cycle `i ↦ i + 1`, which generates `C_n`.
pub fn check_cyclic_symmetry(f: &DoubleBracketFamily, max_n: usize) -> Result<CheckReport> {
    let parts: Vec<(usize, MultilinearOp)> = (1..=max_n)
        .into_par_iter()
        .map(|n| conjugation_residual(f, n, &Perm::cycle(n)).map(|r| (n, r)))
        .collect::<Result<_>>()?;
    let mut report = CheckReport::new("cyclic-symmetry", max_n);
    for (n, r) in parts {
        report.absorb("cyclic-symmetry", &[n as i64], &r);
    }
    Ok(report)
}

/// Conjugation by the adjacent transpositions, which generate `S_n`.
pub fn check_skew_symmetry(f: &DoubleBracketFamily, max_n: usize) -> Result<CheckReport> {
    let parts: Vec<(usize, usize, MultilinearOp)> = (2..=max_n)
        .flat_map(|n| (0..n - 1).map(move |k| (n, k)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, k)| conjugation_residual(f, n, &adjacent_transpositions(n)[k]).map(|r| (n, k, r)))
        .collect::<Result<_>>()?;
    let mut report = CheckReport::new("skew-symmetry", max_n);
    report.checked += 1;
    for (n, k, r) in parts {
        report.absorb("skew-symmetry", &[n as i64, k as i64 + 1], &r);
    }
    Ok(report)
}

/// `Σ_{i+j=n+1} (-1)^{(j-1)i} Σ_{σ∈C_n} sgn(σ) σ∘(⟦⟧_j ⊗ id^{i-1})∘(id^{j-1} ⊗ ⟦⟧_i)∘σ⁻¹`.
fn double_jacobi_map(f: &DoubleBracketFamily, n: usize) -> Result<TensorMap> {
    let degs = f.degs();
    let mut total = TensorMap::zero(n as i64 - 3);
    for i in 1..=n {
        let j = n + 1 - i;
        let (outer, inner) = (f.map(j), f.map(i));
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        let nested = outer.extend(0, i - 1, &degs).after(&inner.extend(j - 1, 0, &degs));
        let c = Scalar::sign(signs::double_jacobi(i, j));
        for sigma in cyclic_group(n)? {
            total.add_map(&(&c * &sigma.sgn()), &nested.conjugate(&sigma, &degs));
        }
    }
    Ok(total)
}

pub fn double_jacobi_residual(f: &DoubleBracketFamily, n: usize) -> Result<MultilinearOp> {
    double_jacobi_map(f, n)?.to_op(&f.space, n, n)
}

pub fn check_double_jacobi(f: &DoubleBracketFamily, max_n: usize) -> Result<CheckReport> {
    let parts: Vec<MultilinearOp> =
        (1..=max_n).into_par_iter().map(|n| double_jacobi_residual(f, n)).collect::<Result<_>>()?;
    let mut report = bracket_report_cutoff(f, "double-jacobi", max_n);
    for (n, r) in (1..=max_n).zip(&parts) {
        report.absorb("double-jacobi", &[n as i64], r);
    }
    Ok(report)
}

/// The right-nested identity on `⟦…⟧^{op}_k = σ_k∘⟦…⟧_k∘σ_k⁻¹` (`σ_k` the
/// order reversal): `Σ (-1)^{i(j-1)} Σ_σ sgn(σ) σ∘(id^{i-1} ⊗ op_j)∘(op_i ⊗ id^{j-1})∘σ⁻¹`.
fn opposite_jacobi_map(f: &DoubleBracketFamily, n: usize) -> Result<TensorMap> {
    let degs = f.degs();
    let op = |k: usize| f.map(k).conjugate(&Perm::reversal(k), &degs);
    let mut total = TensorMap::zero(n as i64 - 3);
    for i in 1..=n {
        let j = n + 1 - i;
        let (outer, inner) = (op(j), op(i));
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        let nested = outer.extend(i - 1, 0, &degs).after(&inner.extend(0, j - 1, &degs));
        let c = Scalar::sign(signs::double_jacobi(i, j));
        for sigma in cyclic_group(n)? {
            total.add_map(&(&c * &sigma.sgn()), &nested.conjugate(&sigma, &degs));
        }
    }
    Ok(total)
}

pub fn opposite_jacobi_residual(f: &DoubleBracketFamily, n: usize) -> Result<MultilinearOp> {
    opposite_jacobi_map(f, n)?.to_op(&f.space, n, n)
}

/// The equivalence of the two forms of the double Jacobi identity, instance
/// by instance: `σ_n ∘ DJac_n ∘ σ_n⁻¹` minus the right-nested residual of the
/// opposite brackets.
pub fn check_opposite_form(f: &DoubleBracketFamily, max_n: usize) -> Result<CheckReport> {
    let degs = f.degs();
    let parts: Vec<MultilinearOp> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let mut d = double_jacobi_map(f, n)?.conjugate(&Perm::reversal(n), &degs);
            d.add_map(&-Scalar::one(), &opposite_jacobi_map(f, n)?);
            d.to_op(&f.space, n, n)
        })
        .collect::<Result<_>>()?;
    let mut report = CheckReport::new("opposite-form", max_n);
    for (n, r) in (1..=max_n).zip(&parts) {
        report.absorb("opposite-form", &[n as i64], r);
    }
    Ok(report)
}

/// `⟦a_1…a_{n-1}, a'a''⟧_n - ⟦…, a'⟧_n·a'' - (-1)^{|a'|(n-2+Σ|a_k|)} a'·⟦…, a''⟧_n`,
/// with `·a''` on the last tensor factor and `a'·` on the first. Domain
/// `V^{⊗(n+1)}`.
pub fn double_leibniz_residual(f: &DoubleBracketFamily, n: usize) -> Result<MultilinearOp> {
    let m = f.product.as_ref().ok_or_else(|| Error::Argument("double Leibniz needs a product".into()))?;
    let v = &f.space;
    let degs = f.degs();
    let dim = v.dim();
    let b = f.map(n);
    let mut out = TensorMap::zero(n as i64 - 2);
    for key in all_tuples(&vec![dim; n + 1]) {
        let (head, tail) = key.split_at(n - 1);
        let (x1, x2) = (tail[0], tail[1]);
        let mut res = Tensor::new();
        for (&y, c) in &m.get(&[x1, x2]) {
            let mut k: Vec<usize> = head.to_vec();
            k.push(y);
            if let Some(img) = b.table.get(&k) {
                add_tensor(&mut res, c, img);
            }
        }
        let mut k1 = head.to_vec();
        k1.push(x1);
        if let Some(img) = b.table.get(&k1) {
            for (t, c) in img {
                let last = t[n - 1];
                for (&z, c2) in &m.get(&[last, x2]) {
                    let mut nt = t.clone();
                    nt[n - 1] = z;
                    add_term(&mut res, nt, -(c * c2));
                }
            }
        }
        let mut k2 = head.to_vec();
        k2.push(x2);
        if let Some(img) = b.table.get(&k2) {
            let e = degs[x1] * (n as i64 - 2 + tuple_degree(head, &degs));
            for (t, c) in img {
                for (&z, c2) in &m.get(&[x1, t[0]]) {
                    let mut nt = t.clone();
                    nt[0] = z;
                    add_term(&mut res, nt, -(c * c2).signed(e));
                }
            }
        }
        if !res.is_empty() {
            out.table.insert(key, res);
        }
    }
    out.to_op(v, n + 1, n)
}

pub fn check_double_leibniz(f: &DoubleBracketFamily, max_n: usize) -> Result<CheckReport> {
    let parts: Vec<MultilinearOp> =
        (1..=max_n).into_par_iter().map(|n| double_leibniz_residual(f, n)).collect::<Result<_>>()?;
    let mut report = CheckReport::new("double-leibniz", max_n);
    for (n, r) in (1..=max_n).zip(&parts) {
        report.absorb("double-leibniz", &[n as i64], r);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Brackets from Rota-Baxter data

/// `(f_1⊗…⊗f_n)(⟦a_1,…,a_n⟧) = s · ζ(m_{2n-1}(a_n, s⁻¹f_n, …, a_2, s⁻¹f_2, a_1), s⁻¹f_1)`
/// for `n ≤ max_n`, solved against dual bases. Refuses unless the
/// structure is good and manageable.
pub fn extract_brackets_from_precy(s: &PreCYStructure, max_n: usize) -> Result<DoubleBracketFamily> {
    let flags = check_precy_flags(s, (2 * max_n).saturating_sub(1).max(3))?;
    if !(flags.good && flags.manageable) {
        let first = flags
            .report
            .first()
            .map(|e| format!("{}{:?} ({})", e.identity, e.indices, e.inputs.join(", ")))
            .unwrap_or_default();
        return Err(Error::Precondition(format!("pre-CY structure is not good and manageable: {first}")));
    }
    let b = s.base_space().clone();
    let degs = b.degrees();
    let dim = b.dim();
    let ext = s.extension();
    let zeta = &ext.zeta;
    let mut fam = OpFamily::new(FamilyKind::DoubleBracket);
    for n in 1..=max_n {
        let Some(m) = s.structure().m(2 * n - 1) else { continue };
        let mut map = TensorMap::zero(n as i64 - 2);
        for a in all_tuples(&vec![dim; n]) {
            let mut img = Tensor::new();
            for y in all_tuples(&vec![dim; n]) {
                // f_i = y_i^, of degree -|y_i|
                let fdeg: Vec<i64> = y.iter().map(|&i| -degs[i]).collect();
                let adeg: Vec<i64> = a.iter().map(|&i| degs[i]).collect();
                let mut word = Vec::with_capacity(2 * n - 1);
                for k in (1..n).rev() {
                    word.push(ext.base_index(a[k]));
                    word.push(ext.dual_index(y[k]));
                }
                word.push(ext.base_index(a[0]));
                let mut v = Scalar::zero();
                for (&o, c) in &m.get(&word) {
                    v += c * &zeta.value(o, ext.dual_index(y[0]));
                }
                if v.is_zero() {
                    continue;
                }
                let mut e = signs::fh_s(&adeg, &fdeg);
                for i in 0..n {
                    for j in i + 1..n {
                        e += fdeg[j] * degs[y[i]];
                    }
                }
                add_term(&mut img, y, v.signed(e));
            }
            if !img.is_empty() {
                map.table.insert(a, img);
            }
        }
        fam.insert(n, map.to_op(&b, n, n)?)?;
    }
    DoubleBracketFamily::new(b, fam, Some(s.base().m_or_zero(2)))
}

/// `φ_1 ⊗ … ⊗ φ_n` acting on `B^{⊗n}`:
/// `x ↦ (-1)^{Σ_{i<j}|φ_j||x_i|} φ_1▷x_1 ⊗ … ⊗ φ_n▷x_n`.
fn phi_tensor(action: &MultilinearOp, legs: &[usize], a_degs: &[i64], b_degs: &[i64]) -> TensorMap {
    let n = legs.len();
    let dim = b_degs.len();
    let mut out = TensorMap::zero(legs.iter().map(|&l| a_degs[l]).sum());
    'inputs: for x in all_tuples(&vec![dim; n]) {
        let mut e = 0;
        for i in 0..n {
            for j in i + 1..n {
                e += a_degs[legs[j]] * b_degs[x[i]];
            }
        }
        let mut img: Tensor = [(Vec::new(), Scalar::sign(e))].into_iter().collect();
        for k in 0..n {
            let v = action.get(&[legs[k], x[k]]);
            if v.is_empty() {
                continue 'inputs;
            }
            let mut next = Tensor::new();
            for (t, c) in &img {
                for (&y, c2) in &v {
                    let mut nt = t.clone();
                    nt.push(y);
                    add_term(&mut next, nt, c * c2);
                }
            }
            img = next;
        }
        if !img.is_empty() {
            out.table.insert(x, img);
        }
    }
    out
}

/// `⟦⟧_1 = -d_B` and
/// `⟦…⟧_{n+1} = Φ^{⊗(n+1)}(Σ (-1)^{(n-1)Σ|e_{i_k}|} e_{i_1}⊗…⊗e_{i_n}⊗T_n(e^{i_n}⊗…⊗e^{i_1}))`
/// for `n + 1 ≤ max_n`, `Φ(a) = a ▷ -`. Refuses unless `T` passes the dg
/// relative Rota-Baxter identities.
pub fn build_brackets_psi(p: &InteractivePair, t: &RbFamily, max_n: usize) -> Result<DoubleBracketFamily> {
    let module = t.module().ok_or_else(|| Error::Structure("expected a relative family on A∨".into()))?;
    if !same_space(module.module(), &p.acting_dual_space()) {
        return Err(Error::Structure("the family does not act on the pair's A∨".into()));
    }
    let top = t.family().max_inputs().min(max_n.saturating_sub(1));
    let rb = check_dg_relative_rb(t, 2 * top.max(1))?;
    if !rb.passed() {
        let e = rb.first().expect("failed report has an entry");
        return Err(Error::Precondition(format!(
            "not a dg relative Rota-Baxter family: {}{:?} ({})",
            e.identity,
            e.indices,
            e.inputs.join(", ")
        )));
    }
    let b = p.base().space().clone();
    let b_degs = b.degrees();
    let a_degs = p.acting().space().degrees();
    let dim_a = a_degs.len();
    let action = p.act_on_base();
    let mut fam = OpFamily::new(FamilyKind::DoubleBracket);
    // -d_B, matching m_1 = -d of the pre-CY structure; +d_B breaks the
    // double Jacobi identity against the higher brackets on dg examples
    if let Some(d) = p.base().m(1) {
        if max_n >= 1 {
            let map = TensorMap::from_op(&d.scale(&-Scalar::one()), &[b.dim()]);
            fam.insert(1, map.to_op(&b, 1, 1)?)?;
        }
    }
    for n in 1..max_n {
        let Some(tn) = t.t(n) else { continue };
        let mut map = TensorMap::zero(n as i64 - 1);
        for es in all_tuples(&vec![dim_a; n]) {
            let rev: Vec<usize> = es.iter().rev().copied().collect();
            let out = tn.get(&rev);
            if out.is_empty() {
                continue;
            }
            let ed: Vec<i64> = es.iter().map(|&i| a_degs[i]).collect();
            let c0 = Scalar::sign(signs::psi(&ed));
            for (&a, c) in &out {
                let mut legs = es.clone();
                legs.push(a);
                map.add_map(&(&c0 * c), &phi_tensor(action, &legs, &a_degs, &b_degs));
            }
        }
        fam.insert(n + 1, map.to_op(&b, n + 1, n + 1)?)?;
    }
    DoubleBracketFamily::new(b, fam, Some(p.base().m_or_zero(2)))
}

// ---------------------------------------------------------------------------
// AYBE∞

/// Elements `r_n ∈ A^{⊗n}` of degree `n - 2` in a unital graded algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFamily {
    algebra: AInfStructure,
    unit: Vector,
    elements: BTreeMap<usize, Tensor>,
}

/// The unit of `(A, m_2)`, found by an exact solve.
fn find_unit(a: &AInfStructure) -> Result<Vector> {
    let m = a.m_or_zero(2);
    let dim = a.space().dim();
    let mut rows: Matrix = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..dim {
        for o in 0..dim {
            let left: Vec<Scalar> = (0..dim).map(|u| m.coeff(&[u, j], o)).collect();
            let right: Vec<Scalar> = (0..dim).map(|u| m.coeff(&[j, u], o)).collect();
            let target = if j == o { Scalar::one() } else { Scalar::zero() };
            rows.push(left);
            rhs.push(target.clone());
            rows.push(right);
            rhs.push(target);
        }
    }
    let u = linalg::solve(&rows, &rhs).ok_or_else(|| Error::Precondition("algebra has no unit".into()))?;
    Ok(u.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
}

impl TensorFamily {
    pub fn new(algebra: AInfStructure) -> Result<Self> {
        let unit = find_unit(&algebra)?;
        Ok(TensorFamily { algebra, unit, elements: BTreeMap::new() })
    }

    /// Set `r_n`; every term must have degree `n - 2`.
    pub fn insert(&mut self, n: usize, r: Tensor) -> Result<()> {
        let degs = self.algebra.space().degrees();
        for (k, c) in &r {
            if k.len() != n {
                return Err(Error::Structure(format!("r_{n} has a term of length {}", k.len())));
            }
            if !c.is_zero() && tuple_degree(k, &degs) != n as i64 - 2 {
                return Err(Error::Structure(format!("r_{n} has a term of degree ≠ {}", n as i64 - 2)));
            }
        }
        let r: Tensor = r.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if r.is_empty() {
            self.elements.remove(&n);
        } else {
            self.elements.insert(n, r);
        }
        Ok(())
    }

    /// `r_n` from labelled terms.
    pub fn insert_labels(&mut self, n: usize, terms: &[(&[&str], i64)]) -> Result<()> {
        let sp = self.algebra.space().clone();
        let mut r = Tensor::new();
        for (legs, c) in terms {
            let key = legs
                .iter()
                .map(|l| sp.index_of(l).ok_or_else(|| Error::Argument(format!("no basis element {l}"))))
                .collect::<Result<Vec<_>>>()?;
            add_term(&mut r, key, Scalar::from_int(*c));
        }
        self.insert(n, r)
    }

    pub fn algebra(&self) -> &AInfStructure {
        &self.algebra
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn r(&self, n: usize) -> Option<&Tensor> {
        self.elements.get(&n)
    }

    pub fn elements(&self) -> &BTreeMap<usize, Tensor> {
        &self.elements
    }

    pub fn max_n(&self) -> usize {
        self.elements.keys().copied().max().unwrap_or(0)
    }

    fn label(&self, key: &[usize]) -> String {
        let sp = self.algebra.space();
        key.iter().map(|&i| sp.label(i)).collect::<Vec<_>>().join("⊗")
    }
}

/// A tensor in `A^{⊗n}` with unit factors left implicit (`None`).
type Placed = BTreeMap<Vec<Option<usize>>, Scalar>;

/// `r^{s_1, …, s_i}`: leg `k` in slot `slots[k]`, units elsewhere.
fn place(r: &Tensor, slots: &[usize], n: usize, degs: &[i64]) -> Placed {
    let mut out = Placed::new();
    for (k, c) in r {
        let mut t = vec![None; n];
        let mut e = 0;
        for (a, &x) in k.iter().enumerate() {
            t[slots[a]] = Some(x);
            for (b, &y) in k.iter().enumerate().skip(a + 1) {
                if slots[a] > slots[b] {
                    e += degs[x] * degs[y];
                }
            }
        }
        let v = out.entry(t).or_insert_with(Scalar::zero);
        *v += c.clone().signed(e);
    }
    out
}

/// Slot-wise product in `A^{⊗n}` with the Koszul sign
/// `(-1)^{Σ_{k>l}|x_k||y_l|}`.
fn placed_product(x: &Placed, y: &Placed, r: &TensorFamily) -> Tensor {
    let m = r.algebra.m_or_zero(2);
    let degs = r.algebra.space().degrees();
    let deg = |o: &Option<usize>| o.map_or(0, |i| degs[i]);
    let mut out = Tensor::new();
    for (kx, cx) in x {
        for (ky, cy) in y {
            let n = kx.len();
            let mut e = 0;
            for k in 0..n {
                for l in 0..k {
                    e += deg(&kx[k]) * deg(&ky[l]);
                }
            }
            let mut terms: Tensor = [(Vec::new(), (cx * cy).signed(e))].into_iter().collect();
            for s in 0..n {
                let factor: Vector = match (kx[s], ky[s]) {
                    (Some(a), Some(b)) => m.get(&[a, b]),
                    (Some(a), None) | (None, Some(a)) => [(a, Scalar::one())].into_iter().collect(),
                    (None, None) => r.unit.clone(),
                };
                let mut next = Tensor::new();
                for (t, c) in &terms {
                    for (&z, c2) in &factor {
                        let mut nt = t.clone();
                        nt.push(z);
                        add_term(&mut next, nt, c * c2);
                    }
                }
                terms = next;
            }
            add_tensor(&mut out, &Scalar::one(), &terms);
        }
    }
    out
}

/// `Σ_{i+j=n+1} (-1)^{(j+1)i} Σ_{σ∈C_n} sgn(σ) r_i^{σ(1)…σ(i)} r_j^{σ(i)…σ(n)}`.
pub fn aybe_residual(r: &TensorFamily, n: usize) -> Result<Tensor> {
    let degs = r.algebra.space().degrees();
    let mut out = Tensor::new();
    for i in 1..=n {
        let j = n + 1 - i;
        let (Some(ri), Some(rj)) = (r.r(i), r.r(j)) else { continue };
        let c = Scalar::sign(signs::aybe(i, j));
        for sigma in cyclic_group(n)? {
            let s: Vec<usize> = (0..n).map(|k| sigma.image(k)).collect();
            let left = place(ri, &s[..i], n, &degs);
            let right = place(rj, &s[i - 1..], n, &degs);
            add_tensor(&mut out, &(&c * &sigma.sgn()), &placed_product(&left, &right, r));
        }
    }
    Ok(out)
}

pub fn check_aybe_infinity(r: &TensorFamily, max_n: usize) -> Result<CheckReport> {
    let parts: Vec<Tensor> = (1..=max_n).into_par_iter().map(|n| aybe_residual(r, n)).collect::<Result<_>>()?;
    let mut report = CheckReport::new("aybe", max_n);
    let top = r.max_n();
    if top > 0 && max_n < 2 * top - 1 {
        report.truncated.push(format!("identities above n = {max_n} involve r up to n = {top}"));
    }
    for (n, t) in (1..=max_n).zip(&parts) {
        report.checked += 1;
        for (k, c) in t {
            report.push("aybe", &[n as i64], Vec::new(), r.label(k), c.clone());
        }
    }
    Ok(report)
}

/// Skewness `r_n^{σ(1)…σ(n)} = sgn(σ) r_n`, on adjacent transpositions.
pub fn check_tensor_skew(r: &TensorFamily, max_n: usize) -> Result<CheckReport> {
    let degs = r.algebra.space().degrees();
    let mut report = CheckReport::new("tensor-skew", max_n);
    for (&n, rn) in r.elements.range(1..=max_n) {
        for (k, tau) in adjacent_transpositions(n).into_iter().enumerate() {
            report.checked += 1;
            let mut diff = Tensor::new();
            for (key, c) in rn {
                let (nk, e) = act_tuple(&tau, key, &degs);
                add_term(&mut diff, nk, c.clone().signed(e));
            }
            add_tensor(&mut diff, &-tau.sgn(), rn);
            for (key, c) in diff {
                report.push("tensor-skew", &[n as i64, k as i64 + 1], Vec::new(), r.label(&key), c);
            }
        }
    }
    Ok(report)
}

/// `r_n ↦ Φ^{⊗n}(r_n)` through `End(V)^{⊗n} ≅ End(V^{⊗n})`, `Φ` the action
/// `A ⊗ V → V`. Refuses a non-skew family.
pub fn schedler_correspondence(r: &TensorFamily, action: &MultilinearOp) -> Result<DoubleBracketFamily> {
    let a = r.algebra.space();
    if action.arity() != 2 || !same_space(&action.domain()[0], a) {
        return Err(Error::Argument("action must be A ⊗ V → V".into()));
    }
    let v = action.codomain().clone();
    let skew = check_tensor_skew(r, r.max_n())?;
    if !skew.passed() {
        let e = skew.first().expect("entry");
        return Err(Error::Precondition(format!("not skew-symmetric: {}{:?} at {}", e.identity, e.indices, e.output)));
    }
    let mut fam = OpFamily::new(FamilyKind::DoubleBracket);
    for (&n, rn) in &r.elements {
        fam.insert(n, tensor_image(rn, n, action)?)?;
    }
    DoubleBracketFamily::new(v, fam, None)
}

/// `Φ^{⊗n}(t)` for any `t ∈ A^{⊗n}`, as an operation `V^{⊗n} → V^{⊗n}`.
pub fn tensor_image(t: &Tensor, n: usize, action: &MultilinearOp) -> Result<MultilinearOp> {
    let a_degs = action.domain()[0].degrees();
    let v = action.codomain();
    let v_degs = v.degrees();
    let degree = t.keys().next().map_or(0, |k| tuple_degree(k, &a_degs));
    let mut map = TensorMap::zero(degree);
    for (legs, c) in t {
        if legs.len() != n {
            return Err(Error::Argument(format!("expected a tensor of length {n}")));
        }
        map.add_map(c, &phi_tensor(action, legs, &a_degs, &v_degs));
    }
    map.to_op(v, n, n)
}

/// Inverse of [`schedler_correspondence`]; needs `Φ: A → End(V)` bijective.
pub fn schedler_inverse(
    f: &DoubleBracketFamily,
    algebra: &AInfStructure,
    action: &MultilinearOp,
) -> Result<TensorFamily> {
    let a = algebra.space();
    let v = f.space();
    let (da, dv) = (a.dim(), v.dim());
    if da != dv * dv {
        return Err(Error::Precondition("A is not the size of End(V)".into()));
    }
    // columns: a ∈ A, rows: matrix entries (y, x) of Φ(a)
    let mut phi: Matrix = vec![vec![Scalar::zero(); da]; da];
    for ai in 0..da {
        for x in 0..dv {
            for (&y, c) in &action.get(&[ai, x]) {
                phi[y * dv + x][ai] = c.clone();
            }
        }
    }
    let inv = linalg::inverse(&phi).ok_or_else(|| Error::Precondition("Φ: A → End(V) is not invertible".into()))?;
    // E_{yx} ∈ A with Φ(E_{yx}) the matrix unit
    let unit_of = |y: usize, x: usize| -> Vector {
        (0..da).filter(|&ai| !inv[ai][y * dv + x].is_zero()).map(|ai| (ai, inv[ai][y * dv + x].clone())).collect()
    };
    let v_degs = v.degrees();
    let mut out = TensorFamily::new(algebra.clone())?;
    for (&n, op) in f.brackets.iter() {
        let map = TensorMap::from_op(op, &vec![dv; n]);
        let mut rn = Tensor::new();
        for (x, img) in &map.table {
            for (y, c) in img {
                // undo (-1)^{Σ_{i<j}|E_j||x_i|}, |E_j| = |y_j| - |x_j|
                let mut e = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        e += (v_degs[y[j]] - v_degs[x[j]]) * v_degs[x[i]];
                    }
                }
                let mut terms: Tensor = [(Vec::new(), c.clone().signed(e))].into_iter().collect();
                for k in 0..n {
                    let u = unit_of(y[k], x[k]);
                    let mut next = Tensor::new();
                    for (t, c1) in &terms {
                        for (&z, c2) in &u {
                            let mut nt = t.clone();
                            nt.push(z);
                            add_term(&mut next, nt, c1 * c2);
                        }
                    }
                    terms = next;
                }
                add_tensor(&mut rn, &Scalar::one(), &terms);
            }
        }
        out.insert(n, rn)?;
    }
    Ok(out)
}

/// `T_n ↦ r_{n+1} = Σ (-1)^{(n-1)Σ|e_{i_k}|} e_{i_1}⊗…⊗e_{i_n}⊗T_n(e^{i_n}⊗…⊗e^{i_1})`
/// in the acting algebra of the pair, so that `Ψⁿ(T) = Φ^{⊗(n+1)}(r_{n+1})`.
pub fn rb_to_tensor(p: &InteractivePair, t: &RbFamily) -> Result<TensorFamily> {
    let a_degs = p.acting().space().degrees();
    let dim = a_degs.len();
    let mut out = TensorFamily::new(p.acting().clone())?;
    for (&n, tn) in t.family().iter() {
        let mut r = Tensor::new();
        for es in all_tuples(&vec![dim; n]) {
            let rev: Vec<usize> = es.iter().rev().copied().collect();
            let ed: Vec<i64> = es.iter().map(|&i| a_degs[i]).collect();
            let c0 = Scalar::sign(signs::psi(&ed));
            for (&a, c) in &tn.get(&rev) {
                let mut key = es.clone();
                key.push(a);
                add_term(&mut r, key, &c0 * c);
            }
        }
        out.insert(n + 1, r)?;
    }
    Ok(out)
}

/// Inverse of [`rb_to_tensor`]: a dg relative family on the pair's `A∨`
/// from `r_2, r_3, …`. Refuses `r_1`, which has no operator counterpart.
pub fn tensor_to_rb(p: &InteractivePair, r: &TensorFamily) -> Result<RbFamily> {
    if r.r(1).is_some() {
        return Err(Error::Argument("r_1 has no Rota-Baxter counterpart".into()));
    }
    let a = p.acting().space().clone();
    let a_degs = a.degrees();
    let ad = p.acting_dual_space();
    let mut fam = OpFamily::new(FamilyKind::RbRelative);
    for (&m, rm) in r.elements() {
        let n = m - 1;
        let mut tn = MultilinearOp::zero(vec![ad.clone(); n], a.clone(), n as i64 - 1);
        for (key, c) in rm {
            let (es, out) = key.split_at(n);
            let ed: Vec<i64> = es.iter().map(|&i| a_degs[i]).collect();
            let rev: Vec<usize> = es.iter().rev().copied().collect();
            tn.add_entry(&rev, out[0], c.clone().signed(signs::psi(&ed)))?;
        }
        fam.insert(n, tn)?;
    }
    RbFamily::dg_relative(p.acting_dual().clone(), fam)
}

// ---------------------------------------------------------------------------
// L∞ and homotopy Poisson

/// `{l_n}` on `L` with an optional graded-commutative product. When the
/// space carries word lengths (`weights`), identities whose inputs exceed
/// `max_weight` in total are excluded and listed as truncation-limited.
#[derive(Clone, Debug, PartialEq)]
pub struct LInfFamily {
    space: Space,
    ops: BTreeMap<usize, MultilinearOp>,
    product: Option<MultilinearOp>,
    weights: Option<Vec<usize>>,
    max_weight: usize,
}

impl LInfFamily {
    pub fn new(space: Space, ops: Vec<(usize, MultilinearOp)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, op) in ops {
            check_signature(&op, &vec![space.clone(); n], &space, "l_n")?;
            if op.degree() != n as i64 - 2 {
                return Err(Error::Structure(format!("l_{n} has degree {}, expected {}", op.degree(), n as i64 - 2)));
            }
            if !op.is_zero() {
                map.insert(n, op);
            }
        }
        Ok(LInfFamily { space, ops: map, product: None, weights: None, max_weight: 0 })
    }

    pub fn with_product(mut self, product: MultilinearOp) -> Result<Self> {
        check_signature(&product, &[self.space.clone(), self.space.clone()], &self.space, "product")?;
        self.product = Some(product);
        Ok(self)
    }

    /// Mark the basis with word lengths and a truncation bound.
    pub fn with_weights(mut self, weights: Vec<usize>, max_weight: usize) -> Result<Self> {
        if weights.len() != self.space.dim() {
            return Err(Error::Argument("one weight per basis element".into()));
        }
        self.weights = Some(weights);
        self.max_weight = max_weight;
        Ok(self)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn l(&self, n: usize) -> Option<&MultilinearOp> {
        self.ops.get(&n)
    }

    pub fn product(&self) -> Option<&MultilinearOp> {
        self.product.as_ref()
    }

    /// The nonzero `l_n`, by arity.
    pub fn ops(&self) -> &BTreeMap<usize, MultilinearOp> {
        &self.ops
    }

    pub fn weights(&self) -> Option<(&[usize], usize)> {
        self.weights.as_deref().map(|w| (w, self.max_weight))
    }

    fn l_or_zero(&self, n: usize) -> MultilinearOp {
        self.ops
            .get(&n)
            .cloned()
            .unwrap_or_else(|| MultilinearOp::zero(vec![self.space.clone(); n], self.space.clone(), n as i64 - 2))
    }

    fn within(&self, key: &[usize]) -> bool {
        match &self.weights {
            Some(w) => key.iter().map(|&i| w[i]).sum::<usize>() <= self.max_weight,
            None => true,
        }
    }

    /// Number of `arity`-tuples of total weight `≤ max_weight`.
    fn count_within(&self, arity: usize) -> usize {
        let Some(w) = &self.weights else {
            return self.space.dim().pow(arity as u32);
        };
        let mut ways = vec![0usize; self.max_weight + 1];
        ways[0] = 1;
        for _ in 0..arity {
            let mut next = vec![0usize; self.max_weight + 1];
            for (t, &c) in ways.iter().enumerate() {
                for &x in w {
                    if t + x <= self.max_weight {
                        next[t + x] += c;
                    }
                }
            }
            ways = next;
        }
        ways.iter().sum()
    }

    /// Absorb only the entries inside the truncation; count the rest.
    fn absorb_within(
        &self,
        report: &mut CheckReport,
        identity: &str,
        indices: &[i64],
        r: &MultilinearOp,
        arity: usize,
    ) {
        let mut kept = MultilinearOp::zero(r.domain().to_vec(), r.codomain().clone(), r.degree());
        for (k, v) in r.table() {
            if self.within(k) {
                kept.set(k, v.clone()).expect("same signature");
            }
        }
        report.absorb(identity, indices, &kept);
        if self.weights.is_some() {
            let outside = self.space.dim().pow(arity as u32) - self.count_within(arity);
            if outside > 0 {
                report
                    .truncated
                    .push(format!("{identity}{indices:?}: {outside} input words beyond length {}", self.max_weight));
            }
        }
    }
}

/// `l_n ∘ σ⁻¹ = sgn(σ) l_n` on adjacent transpositions.
pub fn check_linf_skew(f: &LInfFamily, max_n: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("linf-skew", max_n);
    for n in 2..=max_n {
        let l = f.l_or_zero(n);
        for (k, tau) in adjacent_transpositions(n).into_iter().enumerate() {
            let mut r = permute_inputs(&l, &tau.inverse())?;
            add_into(&mut r, &-tau.sgn(), &l)?;
            f.absorb_within(&mut report, "linf-skew", &[n as i64, k as i64 + 1], &r, n);
        }
    }
    Ok(report)
}

/// `Σ_{i=1}^n Σ_{σ∈Sh(i,n-i)} sgn(σ)(-1)^{i(n-i)} l_{n-i+1}∘(l_i ⊗ id^{n-i})∘σ⁻¹`.
pub fn linf_jacobi_residual(f: &LInfFamily, n: usize) -> Result<MultilinearOp> {
    let mut total = MultilinearOp::zero(vec![f.space.clone(); n], f.space.clone(), n as i64 - 3);
    for i in 1..=n {
        let (outer, inner) = (f.l_or_zero(n - i + 1), f.l_or_zero(i));
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        let nested = insert_compose(&outer, &inner, 0, 0)?;
        let c = Scalar::sign(signs::linf_jacobi(i, n));
        for sigma in enumerate_shuffles(&[i, n - i]) {
            let term = permute_inputs(&nested, &sigma.inverse())?;
            add_into(&mut total, &(&c * &sigma.sgn()), &term)?;
        }
    }
    Ok(total)
}

/// Skew-symmetry first, then the generalized Jacobi identity for `n ≤ max_n`.
pub fn check_linf(f: &LInfFamily, max_n: usize) -> Result<CheckReport> {
    let mut report = check_linf_skew(f, max_n)?;
    report.check = "linf".into();
    let parts: Vec<MultilinearOp> =
        (1..=max_n).into_par_iter().map(|n| linf_jacobi_residual(f, n)).collect::<Result<_>>()?;
    for (n, r) in (1..=max_n).zip(&parts) {
        f.absorb_within(&mut report, "linf-jacobi", &[n as i64], r, n);
    }
    Ok(report)
}

/// `l_n(x_1…x_{n-1}, x'x'') - l_n(…, x')·x'' - (-1)^{|x'|(Σ|x_i| + n - 2)} x'·l_n(…, x'')`.
pub fn linf_leibniz_residual(f: &LInfFamily, n: usize) -> Result<MultilinearOp> {
    let m = f.product.as_ref().ok_or_else(|| Error::Argument("Leibniz∞ needs a product".into()))?;
    let l = f.l_or_zero(n);
    let sp = &f.space;
    let degs = sp.degrees();
    let mut lhs = insert_compose(&l, m, n - 1, 0)?;
    // l_n(…, x')·x''
    let right = insert_compose(m, &l, 0, 0)?;
    add_into(&mut lhs, &-Scalar::one(), &right)?;
    // x'·l_n(…, x''): m(x', l(x_1…x_{n-1}, x'')) evaluated on (x_1…x_{n-1}, x', x'')
    let mut third = MultilinearOp::zero(vec![sp.clone(); n + 1], sp.clone(), n as i64 - 2);
    for (k, v) in l.table() {
        let (head, x2) = (&k[..n - 1], k[n - 1]);
        for x1 in 0..sp.dim() {
            let e = degs[x1] * (tuple_degree(head, &degs) + n as i64 - 2);
            let mut out = Vector::new();
            for (&y, c) in v {
                axpy(&mut out, &c.clone().signed(e), &m.get(&[x1, y]));
            }
            let key: Vec<usize> = head.iter().copied().chain([x1, x2]).collect();
            for (o, c) in out {
                third.add_entry(&key, o, c)?;
            }
        }
    }
    add_into(&mut lhs, &-Scalar::one(), &third)?;
    Ok(lhs)
}

/// [`check_linf`] plus the Leibniz∞ rule for `n ≤ max_n`.
pub fn check_homotopy_poisson(f: &LInfFamily, max_n: usize) -> Result<CheckReport> {
    let mut report = check_linf(f, max_n)?;
    report.check = "homotopy-poisson".into();
    let parts: Vec<MultilinearOp> =
        (1..=max_n).into_par_iter().map(|n| linf_leibniz_residual(f, n)).collect::<Result<_>>()?;
    for (n, r) in (1..=max_n).zip(&parts) {
        f.absorb_within(&mut report, "linf-leibniz", &[n as i64], r, n + 1);
    }
    Ok(report)
}

/// The graded symmetric algebra `S(V)` truncated at word length `max_word`:
/// basis of sorted monomials (odd letters at most once).
#[derive(Clone, Debug)]
pub struct TruncatedSym {
    pub space: Space,
    pub words: Vec<Vec<usize>>,
    pub max_word: usize,
    index: BTreeMap<Vec<usize>, usize>,
    letter_degs: Vec<i64>,
}

impl TruncatedSym {
    pub fn new(v: &Space, max_word: usize) -> Result<Self> {
        let degs = v.degrees();
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_word {
            let mut next = Vec::new();
            for w in &layer {
                let start = w.last().copied().unwrap_or(0);
                for x in start..v.dim() {
                    if w.last() == Some(&x) && degs[x] % 2 != 0 {
                        continue;
                    }
                    let mut nw = w.clone();
                    nw.push(x);
                    next.push(nw);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let unit_label = if v.index_of("1").is_some() { "𝟙" } else { "1" };
        let pairs: Vec<(String, i64)> = words
            .iter()
            .map(|w| {
                let label = if w.is_empty() {
                    unit_label.to_string()
                } else {
                    w.iter().map(|&x| v.label(x)).collect::<Vec<_>>().join("·")
                };
                (label, tuple_degree(w, &degs))
            })
            .collect();
        let refs: Vec<(&str, i64)> = pairs.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        let space = GradedSpace::from_pairs(&format!("S≤{max_word}({})", v.name()), &refs)?;
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(TruncatedSym { space, words, max_word, index, letter_degs: degs })
    }

    pub fn weights(&self) -> Vec<usize> {
        self.words.iter().map(|w| w.len()).collect()
    }

    /// The monomial of a letter sequence: Koszul sign of sorting, or `None`
    /// if an odd letter repeats or the word is too long.
    pub fn normalize(&self, letters: &[usize]) -> Option<(usize, i64)> {
        if letters.len() > self.max_word {
            return None;
        }
        let mut w = letters.to_vec();
        let mut e = 0;
        // bubble sort, tracking odd-odd swaps
        for i in 0..w.len() {
            for j in 0..w.len() - 1 - i {
                if w[j] > w[j + 1] {
                    e += self.letter_degs[w[j]] * self.letter_degs[w[j + 1]];
                    w.swap(j, j + 1);
                }
            }
        }
        if w.windows(2).any(|p| p[0] == p[1] && self.letter_degs[p[0]] % 2 != 0) {
            return None;
        }
        self.index.get(&w).map(|&i| (i, e))
    }

    /// `n`-tuples of nonempty words of total length `≤ max_word`.
    pub fn nonempty_tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![(Vec::new(), 0usize)];
        for _ in 0..n {
            let mut next = Vec::new();
            for (t, len) in &out {
                for (i, w) in self.words.iter().enumerate() {
                    if !w.is_empty() && len + w.len() <= self.max_word {
                        let mut nt: Vec<usize> = t.clone();
                        nt.push(i);
                        next.push((nt, len + w.len()));
                    }
                }
            }
            out = next;
        }
        out.into_iter().map(|(t, _)| t).collect()
    }

    /// The product, dropping words beyond the truncation.
    pub fn product(&self) -> Result<MultilinearOp> {
        let s = &self.space;
        let mut m = MultilinearOp::zero(vec![s.clone(), s.clone()], s.clone(), 0);
        for (i, a) in self.words.iter().enumerate() {
            for (j, b) in self.words.iter().enumerate() {
                let cat: Vec<usize> = a.iter().chain(b).copied().collect();
                if let Some((o, e)) = self.normalize(&cat) {
                    m.add_entry(&[i, j], o, Scalar::sign(e))?;
                }
            }
        }
        Ok(m)
    }
}

fn factorial(n: usize) -> Scalar {
    Scalar::from_int((1..=n as i64).product())
}

/// `l_n(w_1 ⊗ … ⊗ w_n) = (n-1)! Σ_{q} (-1)^{ε + n(n-1)/2}
/// ⟦u^1_{q_1}, …, u^n_{q_n}⟧^{[1]}⋯⟦…⟧^{[n]} · (w_1 without u_{q_1})⋯(w_n without u_{q_n})`,
/// `ε` the Koszul sign of moving each chosen letter to the front, on words
/// of total length `≤ max_word` and `n ≤ max_n`. Refuses brackets that are
/// not a homotopy double Lie structure up to `max_n`.
pub fn build_sym_poisson(f: &DoubleBracketFamily, max_word: usize, max_n: usize) -> Result<LInfFamily> {
    let mut gate = check_skew_symmetry(f, max_n)?;
    gate.merge(check_double_jacobi(f, max_n)?);
    if !gate.passed() {
        let e = gate.first().expect("entry");
        return Err(Error::Precondition(format!(
            "not a homotopy double Lie structure: {}{:?} ({})",
            e.identity,
            e.indices,
            e.inputs.join(", ")
        )));
    }
    let sym = TruncatedSym::new(f.space(), max_word)?;
    let s = sym.space.clone();
    let degs = f.degs();
    let mut ops = Vec::new();
    for n in 1..=max_n {
        let Some(b) = f.bracket(n) else { continue };
        let bmap = TensorMap::from_op(b, &vec![f.space.dim(); n]);
        let pre = factorial(n - 1);
        let mut l = MultilinearOp::zero(vec![s.clone(); n], s.clone(), n as i64 - 2);
        for key in sym.nonempty_tuples(n) {
            let words: Vec<&Vec<usize>> = key.iter().map(|&i| &sym.words[i]).collect();
            let mut out = Vector::new();
            let lens: Vec<usize> = words.iter().map(|w| w.len()).collect();
            for q in all_tuples(&lens) {
                let mut e = (n * (n - 1) / 2) as i64;
                let mut before = 0; // degrees of unchosen letters in earlier words
                for (sidx, w) in words.iter().enumerate() {
                    let chosen = degs[w[q[sidx]]];
                    let within: i64 = w[..q[sidx]].iter().map(|&x| degs[x]).sum();
                    e += (before + within) * chosen;
                    before += tuple_degree(w, &degs) - chosen;
                }
                let args: Vec<usize> = words.iter().zip(&q).map(|(w, &qi)| w[qi]).collect();
                let Some(img) = bmap.table.get(&args) else { continue };
                let rest: Vec<usize> = words
                    .iter()
                    .zip(&q)
                    .flat_map(|(w, &qi)| w.iter().enumerate().filter(move |(k, _)| *k != qi).map(|(_, &x)| x))
                    .collect();
                for (legs, c) in img {
                    let letters: Vec<usize> = legs.iter().chain(&rest).copied().collect();
                    if let Some((o, e2)) = sym.normalize(&letters) {
                        let v = (c * &pre).signed(e + e2);
                        crate::multiop::add_coeff(&mut out, o, v);
                    }
                }
            }
            for (o, c) in out {
                l.add_entry(&key, o, c)?;
            }
        }
        ops.push((n, l));
    }
    let weights = sym.weights();
    LInfFamily::new(s, ops)?.with_product(sym.product()?)?.with_weights(weights, max_word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane() -> Space {
        GradedSpace::from_pairs("V", &[("u", 0), ("v", 0)]).unwrap()
    }

    fn mixed() -> Space {
        GradedSpace::from_pairs("W", &[("u", 0), ("ξ", 1)]).unwrap()
    }

    fn random_bracket(rng: &mut ChaCha8Rng, v: &Space, n: usize) -> MultilinearOp {
        let degs = v.degrees();
        let dims = vec![v.dim(); n];
        let mut op = DoubleBracketFamily::blank(v, n).unwrap();
        for k in all_tuples(&dims) {
            for y in all_tuples(&dims) {
                if tuple_degree(&y, &degs) == tuple_degree(&k, &degs) + n as i64 - 2 && rng.gen_bool(0.4) {
                    let c = rng.gen_range(-2..=2i64);
                    op.add_entry(&k, tensor_index(&y, &dims), Scalar::from_int(c)).unwrap();
                }
            }
        }
        op
    }

    fn family(v: &Space, ops: Vec<(usize, MultilinearOp)>) -> DoubleBracketFamily {
        let mut fam = OpFamily::new(FamilyKind::DoubleBracket);
        for (n, op) in ops {
            fam.insert(n, op).unwrap();
        }
        DoubleBracketFamily::new(v.clone(), fam, None).unwrap()
    }

    /// `Σ_{σ∈G} sgn(σ) σ∘F∘σ⁻¹`.
    fn project(f: &MultilinearOp, v: &Space, group: &[Perm]) -> MultilinearOp {
        let n = f.arity();
        let degs = v.degrees();
        let m = TensorMap::from_op(f, &vec![v.dim(); n]);
        let mut out = TensorMap::zero(f.degree());
        for s in group {
            out.add_map(&s.sgn(), &m.conjugate(s, &degs));
        }
        out.to_op(v, n, n).unwrap()
    }

    fn bracket2(f: &MultilinearOp, a: usize, b: usize) -> Tensor {
        f.get(&[a, b]).into_iter().map(|(o, c)| (tensor_tuple(o, &[2, 2]), c)).collect()
    }

    #[test]
    fn zero_brackets_pass_everything() {
        for v in [plane(), mixed()] {
            let f = DoubleBracketFamily::zero(v.clone());
            assert!(check_cyclic_symmetry(&f, 4).unwrap().passed());
            assert!(check_skew_symmetry(&f, 4).unwrap().passed());
            assert!(check_double_jacobi(&f, 4).unwrap().passed());
            assert!(check_opposite_form(&f, 4).unwrap().passed());
        }
    }

    #[test]
    fn ungraded_n2_matches_classical_double_jacobi() {
        // ⟦a,⟦b,c⟧⟧_L + τ⟦b,⟦c,a⟧⟧_L + τ²⟦c,⟦a,b⟧⟧_L, τ(x⊗y⊗z) = z⊗x⊗y,
        // ⟦a, x⊗y⟧_L = ⟦a,x⟧⊗y
        let v = plane();
        for seed in 0..6 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f2 = random_bracket(&mut rng, &v, 2);
            let f = family(&v, vec![(2, f2.clone())]);
            let got = double_jacobi_residual(&f, 3).unwrap();
            let left = |a: usize, b: usize, c: usize| {
                let mut out = Tensor::new();
                for (xy, c1) in bracket2(&f2, b, c) {
                    for (pq, c2) in bracket2(&f2, a, xy[0]) {
                        add_term(&mut out, vec![pq[0], pq[1], xy[1]], &c1 * &c2);
                    }
                }
                out
            };
            for k in all_tuples(&[2, 2, 2]) {
                let (a, b, c) = (k[0], k[1], k[2]);
                let mut want = left(a, b, c);
                for (t, x) in left(b, c, a) {
                    add_term(&mut want, vec![t[2], t[0], t[1]], x);
                }
                for (t, x) in left(c, a, b) {
                    add_term(&mut want, vec![t[1], t[2], t[0]], x);
                }
                let have: Tensor = got.get(&k).into_iter().map(|(o, c)| (tensor_tuple(o, &[2, 2, 2]), c)).collect();
                assert_eq!(have, want, "seed {seed} at {k:?}");
            }
        }
    }

    #[test]
    fn projected_brackets_are_symmetric() {
        let v = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f3 = random_bracket(&mut rng, &v, 3);
        let cyc = project(&f3, &v, &cyclic_group(3).unwrap());
        assert!(!cyc.is_zero());
        let f = family(&v, vec![(3, cyc)]);
        assert!(check_cyclic_symmetry(&f, 3).unwrap().passed());
        let full = project(&f3, &v, &crate::kernel::perm::symmetric_group(3));
        let f = family(&v, vec![(3, full)]);
        assert!(check_skew_symmetry(&f, 3).unwrap().passed());
    }

    #[test]
    fn n2_skew_is_the_swap_identity() {
        let v = plane();
        let mut f2 = DoubleBracketFamily::blank(&v, 2).unwrap();
        f2.entry(&["u", "v"], "u⊗v", 1).unwrap();
        f2.entry(&["v", "u"], "v⊗u", -1).unwrap();
        assert!(check_skew_symmetry(&family(&v, vec![(2, f2.clone())]), 2).unwrap().passed());
        f2.entry(&["v", "u"], "v⊗u", 2).unwrap();
        let r = check_cyclic_symmetry(&family(&v, vec![(2, f2)]), 2).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn opposite_form_is_equivalent() {
        for (seed, v) in [(1, plane()), (2, mixed()), (5, mixed())] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ops = (1..=3).map(|n| (n, random_bracket(&mut rng, &v, n))).collect();
            let f = family(&v, ops);
            let r = check_opposite_form(&f, 4).unwrap();
            assert!(r.passed(), "seed {seed}: {r}");
            assert!(!check_double_jacobi(&f, 4).unwrap().passed());
        }
    }

    fn dual_numbers_product(v: &Space) -> MultilinearOp {
        // u = 1, v = x
        let mut m = MultilinearOp::zero(vec![v.clone(), v.clone()], v.clone(), 0);
        m.entry(&["u", "u"], "u", 1).unwrap();
        m.entry(&["u", "v"], "v", 1).unwrap();
        m.entry(&["v", "u"], "v", 1).unwrap();
        m
    }

    #[test]
    fn leibniz_matches_the_classical_rule() {
        // ⟦a, bc⟧ = ⟦a,b⟧·c + b·⟦a,c⟧ with outer bimodule actions
        let v = plane();
        let m = dual_numbers_product(&v);
        let mul = |a: usize, b: usize| -> Vector { m.get(&[a, b]) };
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f2 = random_bracket(&mut rng, &v, 2);
            let f = family(&v, vec![(2, f2.clone())]).with_product(Some(m.clone())).unwrap();
            let got = double_leibniz_residual(&f, 2).unwrap();
            for k in all_tuples(&[2, 2, 2]) {
                let (a, b, c) = (k[0], k[1], k[2]);
                let mut want = Tensor::new();
                for (&bc, x) in &mul(b, c) {
                    add_tensor(&mut want, x, &bracket2(&f2, a, bc));
                }
                for (t, x) in bracket2(&f2, a, b) {
                    for (&z, y) in &mul(t[1], c) {
                        add_term(&mut want, vec![t[0], z], -(&x * y));
                    }
                }
                for (t, x) in bracket2(&f2, a, c) {
                    for (&z, y) in &mul(b, t[0]) {
                        add_term(&mut want, vec![z, t[1]], -(&x * y));
                    }
                }
                let have: Tensor = got.get(&k).into_iter().map(|(o, c)| (tensor_tuple(o, &[2, 2]), c)).collect();
                assert_eq!(have, want, "seed {seed} at {k:?}");
            }
        }
    }

    #[test]
    fn inner_derivation_bracket_is_double_poisson_leibniz() {
        // ⟦a, b⟧ = φ(a)(b⊗1 - 1⊗b), φ(u) = 1, φ(v) = 0
        let v = plane();
        let mut f2 = DoubleBracketFamily::blank(&v, 2).unwrap();
        f2.entry(&["u", "v"], "v⊗u", 1).unwrap();
        f2.entry(&["u", "v"], "u⊗v", -1).unwrap();
        let f = family(&v, vec![(2, f2)]).with_product(Some(dual_numbers_product(&v))).unwrap();
        assert!(check_double_leibniz(&f, 2).unwrap().passed());
        let mut g2 = DoubleBracketFamily::blank(&v, 2).unwrap();
        g2.entry(&["u", "v"], "v⊗u", 1).unwrap();
        let g = family(&v, vec![(2, g2)]).with_product(Some(dual_numbers_product(&v))).unwrap();
        assert!(!check_double_leibniz(&g, 2).unwrap().passed());
    }

    #[test]
    fn zero_product_degenerates_leibniz() {
        let v = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let zero = MultilinearOp::zero(vec![v.clone(), v.clone()], v.clone(), 0);
        let ops = (1..=3).map(|n| (n, random_bracket(&mut rng, &v, n))).collect();
        let f = family(&v, ops).with_product(Some(zero)).unwrap();
        assert!(check_double_leibniz(&f, 3).unwrap().passed());
    }

    #[test]
    fn truncated_symmetric_algebra() {
        let v = mixed();
        let s = TruncatedSym::new(&v, 3).unwrap();
        // 1; u, ξ; u², uξ; u³, u²ξ
        assert_eq!(s.words.len(), 7);
        let (u, xi) = (0, 1);
        assert_eq!(s.normalize(&[xi, xi]), None);
        let (i, e) = s.normalize(&[xi, u]).unwrap();
        assert_eq!((s.space.label(i), e % 2), ("u·ξ", 0));
        assert_eq!(s.normalize(&[u, u, u, u]), None);
        let m = s.product().unwrap();
        // graded commutativity
        let sd = s.space.degrees();
        for a in 0..s.words.len() {
            for b in 0..s.words.len() {
                let ab = m.get(&[a, b]);
                let ba: Vector = m.get(&[b, a]).into_iter().map(|(o, c)| (o, c.signed(sd[a] * sd[b]))).collect();
                assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn lie_algebra_is_linf() {
        // [x, y] = y
        let l = GradedSpace::from_pairs("L", &[("x", 0), ("y", 0)]).unwrap();
        let mut l2 = MultilinearOp::zero(vec![l.clone(), l.clone()], l.clone(), 0);
        l2.entry(&["x", "y"], "y", 1).unwrap();
        l2.entry(&["y", "x"], "y", -1).unwrap();
        let f = LInfFamily::new(l.clone(), vec![(2, l2)]).unwrap();
        assert!(check_linf(&f, 4).unwrap().passed());
    }

    #[test]
    fn ternary_bracket_gives_a_homotopy_poisson_algebra() {
        // ⟦⟧_3 lands in letters it vanishes on, so every composite is zero
        let v = GradedSpace::from_pairs("V", &[("u", 0), ("v", 0), ("w", 0), ("x", 0), ("y", 1)]).unwrap();
        let mut b = DoubleBracketFamily::blank(&v, 3).unwrap();
        b.entry(&["u", "v", "w"], "x⊗x⊗y", 1).unwrap();
        let f = family(&v, vec![(3, project(&b, &v, &crate::kernel::perm::symmetric_group(3)))]);
        assert!(check_skew_symmetry(&f, 3).unwrap().passed());
        assert!(check_double_jacobi(&f, 5).unwrap().passed());
        let l = build_sym_poisson(&f, 4, 3).unwrap();
        let l3 = l.l(3).unwrap();
        let rep = check_homotopy_poisson(&l, 3).unwrap();
        assert!(rep.passed(), "{rep}");
        let leibniz = linf_leibniz_residual(&l, 3).unwrap();
        assert!(leibniz.is_zero());
        let (k, w) = l3.table().iter().next().unwrap();
        let (&o, c) = w.iter().next().unwrap();
        let mut bad = l3.clone();
        let mut w2 = w.clone();
        w2.insert(o, c.clone() + Scalar::one());
        bad.set(k, w2).unwrap();
        let broken = LInfFamily::new(l.space().clone(), vec![(3, bad)])
            .unwrap()
            .with_product(l.product().unwrap().clone())
            .unwrap()
            .with_weights(TruncatedSym::new(&v, 4).unwrap().weights(), 4)
            .unwrap();
        let r = check_homotopy_poisson(&broken, 3).unwrap();
        assert!(r.entries.iter().any(|e| e.identity == "linf-leibniz"), "{r}");
    }
}
