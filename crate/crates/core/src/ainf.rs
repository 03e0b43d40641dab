//! A∞-algebras, A∞-bimodules, cyclic forms and the trivial extension
//! `∂_d A = A ⊕ s^d A∨` with its canonical pairing `ζ_A`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::linalg::{rank, Matrix};
use crate::kernel::signs;
use crate::kernel::space::{dual_space, suspend, tensor_space, DirectSum, GradedSpace, Space};
use crate::kernel::Scalar;
use crate::multiop::{add_into, insert_compose, CheckReport, FamilyKind, MultilinearOp, OpFamily};

/// `(A, {m_n})` with `|m_n| = n - 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AInfStructure {
    space: Space,
    family: OpFamily<usize>,
}

impl AInfStructure {
    pub fn new(space: Space, family: OpFamily<usize>) -> Result<Self> {
        if family.kind != FamilyKind::AInf {
            return Err(Error::Structure(format!("expected an A∞ family, got {:?}", family.kind)));
        }
        for (n, op) in family.iter() {
            check_signature(op, &vec![space.clone(); *n], &space, &format!("m_{n}"))?;
        }
        family.validate()?;
        Ok(AInfStructure { space, family })
    }

    /// All operations zero.
    pub fn zero(space: Space) -> Self {
        AInfStructure { space, family: OpFamily::new(FamilyKind::AInf) }
    }

    /// A dg algebra: `m_1 = d` and `m_2 = ·`, both optional.
    pub fn dg(space: Space, d: Option<MultilinearOp>, m: Option<MultilinearOp>) -> Result<Self> {
        let mut fam = OpFamily::new(FamilyKind::AInf);
        if let Some(d) = d {
            fam.insert(1, d)?;
        }
        if let Some(m) = m {
            fam.insert(2, m)?;
        }
        Self::new(space, fam)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn family(&self) -> &OpFamily<usize> {
        &self.family
    }

    pub fn m(&self, n: usize) -> Option<&MultilinearOp> {
        self.family.get(n)
    }

    pub fn max_arity(&self) -> usize {
        self.family.max_inputs()
    }

    /// True when only `m_1` and `m_2` may be nonzero.
    pub fn is_dg(&self) -> bool {
        self.family.keys().all(|n| n <= 2)
    }

    /// `m_n`, or the zero operation of the right signature.
    pub fn m_or_zero(&self, n: usize) -> MultilinearOp {
        self.m(n)
            .cloned()
            .unwrap_or_else(|| MultilinearOp::zero(vec![self.space.clone(); n], self.space.clone(), n as i64 - 2))
    }
}

pub(crate) fn check_signature(op: &MultilinearOp, domain: &[Space], codomain: &Space, what: &str) -> Result<()> {
    let ok = op.domain().len() == domain.len()
        && op.domain().iter().zip(domain).all(|(a, b)| crate::kernel::space::same_space(a, b))
        && crate::kernel::space::same_space(op.codomain(), codomain);
    if ok {
        Ok(())
    } else {
        Err(Error::Structure(format!("{what} has the wrong signature")))
    }
}

/// `Σ_{i+j+k=n} (-1)^{i+jk} m_{i+1+k} ∘ (id^i ⊗ m_j ⊗ id^k)`.
pub fn stasheff_residual(a: &AInfStructure, n: usize) -> Result<MultilinearOp> {
    let mut acc = MultilinearOp::zero(vec![a.space.clone(); n], a.space.clone(), n as i64 - 3);
    for j in 1..=n {
        let Some(inner) = a.m(j) else { continue };
        for i in 0..=n - j {
            let k = n - j - i;
            let Some(outer) = a.m(i + 1 + k) else { continue };
            let term = insert_compose(outer, inner, i, (i + j * k) as i64)?;
            add_into(&mut acc, &Scalar::one(), &term)?;
        }
    }
    Ok(acc)
}

/// Residual ledger of the Stasheff identities for `1 ≤ n ≤ max_n`.
pub fn check_stasheff(a: &AInfStructure, max_n: usize) -> Result<CheckReport> {
    a.family.validate()?;
    let residuals = (1..=max_n).into_par_iter().map(|n| stasheff_residual(a, n)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("stasheff", max_n);
    for (n, r) in (1..=max_n).zip(&residuals) {
        report.absorb("stasheff", &[n as i64], r);
    }
    let top = a.max_arity();
    if top > 0 && max_n < 2 * top - 1 {
        report.truncated.push(format!("stasheff n = {}..={} not evaluated", max_n + 1, 2 * top - 1));
    }
    Ok(report)
}

/// `(M, {m_{p,q}})` over an A∞-algebra, `m_{p,q}: A^p ⊗ M ⊗ A^q → M`.
#[derive(Clone, Debug, PartialEq)]
pub struct AInfBimodule {
    algebra: AInfStructure,
    module: Space,
    family: OpFamily<(usize, usize)>,
}

impl AInfBimodule {
    pub fn new(algebra: AInfStructure, module: Space, family: OpFamily<(usize, usize)>) -> Result<Self> {
        if family.kind != FamilyKind::AInfBimodule {
            return Err(Error::Structure(format!("expected a bimodule family, got {:?}", family.kind)));
        }
        for (&(p, q), op) in family.iter() {
            let dom = bimodule_domain(algebra.space(), &module, p, q);
            check_signature(op, &dom, &module, &format!("m_{{{p},{q}}}"))?;
        }
        family.validate()?;
        Ok(AInfBimodule { algebra, module, family })
    }

    /// `A` over itself, `m_{p,q} = m_{p+q+1}`.
    pub fn regular(a: &AInfStructure) -> Self {
        let mut fam = OpFamily::new(FamilyKind::AInfBimodule);
        for (&n, op) in a.family.iter() {
            for p in 0..n {
                fam.insert((p, n - 1 - p), op.clone()).expect("regular bimodule degree law");
            }
        }
        AInfBimodule { algebra: a.clone(), module: a.space.clone(), family: fam }
    }

    /// A dg bimodule: `m_{0,0} = d_M`, `m_{1,0}` left and `m_{0,1}` right action.
    pub fn dg(
        algebra: AInfStructure,
        module: Space,
        d: Option<MultilinearOp>,
        left: Option<MultilinearOp>,
        right: Option<MultilinearOp>,
    ) -> Result<Self> {
        let mut fam = OpFamily::new(FamilyKind::AInfBimodule);
        if let Some(d) = d {
            fam.insert((0, 0), d)?;
        }
        if let Some(l) = left {
            fam.insert((1, 0), l)?;
        }
        if let Some(r) = right {
            fam.insert((0, 1), r)?;
        }
        Self::new(algebra, module, fam)
    }

    /// The dual bimodule `M∨`: `m^∨_{i,j}(a, f, b)(x) = ± f(m_{j,i}(b, x, a))`.
    pub fn dual(&self) -> Result<Self> {
        let mdual = dual_space(&self.module);
        let mut fam = OpFamily::new(FamilyKind::AInfBimodule);
        for (&(j, i), op) in self.family.iter() {
            fam.insert((i, j), dualize_action(op, i, j, 0, &mdual)?)?;
        }
        Self::new(self.algebra.clone(), mdual, fam)
    }

    pub fn algebra(&self) -> &AInfStructure {
        &self.algebra
    }

    pub fn module(&self) -> &Space {
        &self.module
    }

    pub fn family(&self) -> &OpFamily<(usize, usize)> {
        &self.family
    }

    pub fn m(&self, p: usize, q: usize) -> Option<&MultilinearOp> {
        self.family.get((p, q))
    }

    pub fn is_dg(&self) -> bool {
        self.family.keys().all(|(p, q)| p + q <= 1)
    }
}

pub(crate) fn bimodule_domain(a: &Space, m: &Space, p: usize, q: usize) -> Vec<Space> {
    let mut d = vec![a.clone(); p];
    d.push(m.clone());
    d.extend(std::iter::repeat(a.clone()).take(q));
    d
}

/// Which sign reading of the bimodule identity's middle sum to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BimoduleReading {
    /// Outer `m_{i,k}` with `(-1)^{i+(r+s+1)k}`: the single-`M`-letter part of
    /// the Stasheff identity on `A ⊕ M`.
    Unified,
    /// Outer `m_{i,k}` with the displayed `(-1)^{i+(r+s-1)k+1}`; kept for audit.
    DisplayedSign,
}

/// Residual of the bimodule identity at `(p, q)`.
pub fn bimodule_residual(m: &AInfBimodule, p: usize, q: usize, reading: BimoduleReading) -> Result<MultilinearOp> {
    let a = &m.algebra;
    let dom = bimodule_domain(a.space(), &m.module, p, q);
    let mut acc = MultilinearOp::zero(dom, m.module.clone(), (p + q) as i64 - 2);
    let mut add = |t: MultilinearOp| add_into(&mut acc, &Scalar::one(), &t);
    for j in 1..=p {
        let Some(inner) = a.m(j) else { continue };
        for i in 0..=p - j {
            let Some(outer) = m.m(p - j + 1, q) else { continue };
            let e = i + j * (p - i - j + 1 + q);
            add(insert_compose(outer, inner, i, e as i64)?)?;
        }
    }
    for i in 0..=p {
        let r = p - i;
        for s in 0..=q {
            let k = q - s;
            let (Some(outer), Some(inner)) = (m.m(i, k), m.m(r, s)) else {
                continue;
            };
            let e = match reading {
                BimoduleReading::Unified => (i + (r + s + 1) * k) as i64,
                BimoduleReading::DisplayedSign => (i + (r + s) * k) as i64 - k as i64 + 1,
            };
            add(insert_compose(outer, inner, i, e)?)?;
        }
    }
    for j in 1..=q {
        let Some(inner) = a.m(j) else { continue };
        for i in 0..=q - j {
            let Some(outer) = m.m(p, q - j + 1) else { continue };
            let e = p + i + 1 + j * (q - i - j);
            add(insert_compose(outer, inner, p + 1 + i, e as i64)?)?;
        }
    }
    Ok(acc)
}

/// Residual ledger of the bimodule identities for all `p + q ≤ max_total`.
pub fn check_bimodule(m: &AInfBimodule, max_total: usize) -> Result<CheckReport> {
    check_bimodule_with(m, max_total, BimoduleReading::Unified)
}

pub fn check_bimodule_with(m: &AInfBimodule, max_total: usize, reading: BimoduleReading) -> Result<CheckReport> {
    m.family.validate()?;
    m.algebra.family.validate()?;
    let idx: Vec<(usize, usize)> = (0..=max_total).flat_map(|t| (0..=t).map(move |p| (p, t - p))).collect();
    let residuals = idx.par_iter().map(|&(p, q)| bimodule_residual(m, p, q, reading)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("bimodule", max_total);
    for ((p, q), r) in idx.iter().zip(&residuals) {
        report.absorb("bimodule", &[*p as i64, *q as i64], r);
    }
    Ok(report)
}

/// A graded symmetric nondegenerate pairing of degree `-d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicForm {
    space: Space,
    d: i64,
    pairing: MultilinearOp,
}

impl CyclicForm {
    /// Validate symmetry, degree and nondegeneracy.
    pub fn new(space: Space, d: i64, pairing: MultilinearOp) -> Result<Self> {
        let ground = GradedSpace::ground();
        check_signature(&pairing, &[space.clone(), space.clone()], &ground, "pairing")?;
        if pairing.degree() != -d {
            return Err(Error::Structure(format!("pairing has degree {}, expected {}", pairing.degree(), -d)));
        }
        let form = CyclicForm { space, d, pairing };
        for u in 0..form.space.dim() {
            for v in 0..form.space.dim() {
                let e = form.space.degree(u) * form.space.degree(v);
                if form.value(u, v) != form.value(v, u).signed(e) {
                    return Err(Error::Structure(format!(
                        "pairing is not graded symmetric on ({}, {})",
                        form.space.label(u),
                        form.space.label(v)
                    )));
                }
            }
        }
        if rank(&form.gram()) < form.space.dim() {
            return Err(Error::Structure("pairing is degenerate".into()));
        }
        Ok(form)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn pairing(&self) -> &MultilinearOp {
        &self.pairing
    }

    pub fn value(&self, u: usize, v: usize) -> Scalar {
        self.pairing.coeff(&[u, v], 0)
    }

    pub fn gram(&self) -> Matrix {
        let n = self.space.dim();
        (0..n).map(|u| (0..n).map(|v| self.value(u, v)).collect()).collect()
    }

    /// The trace form `tr(ab)` on an algebra with the given product, degree 0.
    pub fn trace_form(space: &Space, product: &MultilinearOp) -> Result<Self> {
        let n = space.dim();
        let mut pairing = MultilinearOp::zero(vec![space.clone(), space.clone()], GradedSpace::ground(), 0);
        for u in 0..n {
            for v in 0..n {
                let ab = product.get(&[u, v]);
                let mut t = Scalar::zero();
                for (w, c) in &ab {
                    // trace of left multiplication by e_w
                    for x in 0..n {
                        t += c * &product.coeff(&[*w, x], x);
                    }
                }
                if !t.is_zero() {
                    pairing.add_entry(&[u, v], 0, t)?;
                }
            }
        }
        Self::new(space.clone(), 0, pairing)
    }
}

/// Residuals of `γ(op(a_1…a_n), a_0) = (-1)^{n+|a_0|Σ|a_i|} γ(op(a_0…a_{n-1}), a_n)`
/// for `op: V^{⊗n} → W` and a pairing `γ: W ⊗ V → k`.
pub fn cyclic_residuals(
    op: &MultilinearOp,
    pairing: &MultilinearOp,
    identity: &str,
    report: &mut CheckReport,
) -> Result<()> {
    let n = op.arity();
    let l = insert_compose(pairing, op, 0, 0)?;
    let mut tuples = BTreeSet::new();
    for key in l.table().keys() {
        let mut t = vec![key[n]];
        t.extend_from_slice(&key[..n]);
        tuples.insert(t);
        tuples.insert(key.clone());
    }
    let sp = &pairing.domain()[1];
    report.checked += 1;
    for t in tuples {
        let lhs_key: Vec<usize> = t[1..].iter().copied().chain([t[0]]).collect();
        let lhs = l.coeff(&lhs_key, 0);
        let rhs = l.coeff(&t, 0);
        let rest: i64 = t[1..].iter().map(|&i| sp.degree(i)).sum();
        let e = n as i64 + sp.degree(t[0]) * rest;
        let value = lhs - rhs.signed(e);
        report.push(
            identity,
            &[n as i64],
            t.iter().map(|&i| sp.label(i).to_string()).collect(),
            GradedSpace::ground().label(0).to_string(),
            value,
        );
    }
    Ok(())
}

/// d-cyclicity of every `m_n`, `n ≤ max_n`.
pub fn check_cyclic(a: &AInfStructure, gamma: &CyclicForm, max_n: usize) -> Result<CheckReport> {
    if !crate::kernel::space::same_space(a.space(), gamma.space()) {
        return Err(Error::Structure("form and algebra live on different spaces".into()));
    }
    let mut report = CheckReport::new("cyclic", max_n);
    for n in 1..=max_n {
        match a.m(n) {
            Some(op) => cyclic_residuals(op, gamma.pairing(), "cyclic", &mut report)?,
            None => report.checked += 1,
        }
    }
    Ok(report)
}

/// For `op: A^j ⊗ M ⊗ A^i → M` return `A^i ⊗ M∨ ⊗ A^j → M∨`,
/// `(a, f, b) ↦ (x ↦ (-1)^E f(op(b, x, a)))` with the dual-module exponent `E`
/// (`extra = 0` for structure maps, `1` for Rota-Baxter maps).
pub fn dualize_action(op: &MultilinearOp, i: usize, j: usize, extra: i64, mdual: &Space) -> Result<MultilinearOp> {
    if op.arity() != i + j + 1 {
        return Err(Error::Argument(format!("arity {} is not {i}+{j}+1", op.arity())));
    }
    let dom = op.domain();
    let m = &dom[j];
    let mut domain: Vec<Space> = dom[j + 1..].to_vec();
    domain.push(mdual.clone());
    domain.extend(dom[..j].iter().cloned());
    let mut out = MultilinearOp::zero(domain, mdual.clone(), op.degree());
    for (key, val) in op.table() {
        let b = &key[..j];
        let x = key[j];
        let a = &key[j + 1..];
        let a_degs: Vec<i64> = a.iter().zip(&dom[j + 1..]).map(|(&t, s)| s.degree(t)).collect();
        let b_degs: Vec<i64> = b.iter().zip(&dom[..j]).map(|(&t, s)| s.degree(t)).collect();
        for (&y, c) in val {
            let f_deg = -m.degree(y);
            let e = signs::dual_module(&a_degs, f_deg, m.degree(x), &b_degs, extra);
            let mut nk = a.to_vec();
            nk.push(y);
            nk.extend_from_slice(b);
            out.add_entry(&nk, x, c.clone().signed(e))?;
        }
    }
    Ok(out)
}

/// Transport `A^i ⊗ N ⊗ A^j → N` to `A^i ⊗ s^d N ⊗ A^j → s^d N`, with sign
/// `(-1)^{d(Σ|a| + n)}` where the `a` are the `i` inputs left of the module slot.
pub fn suspend_action(op: &MultilinearOp, i: usize, d: i64, sn: &Space) -> Result<MultilinearOp> {
    let n = op.arity();
    let mut domain = op.domain().to_vec();
    domain[i] = sn.clone();
    let mut out = MultilinearOp::zero(domain, sn.clone(), op.degree());
    for (key, val) in op.table() {
        let sa: i64 = key[..i].iter().zip(op.domain()).map(|(&t, s)| s.degree(t)).sum();
        let e = d * (sa + n as i64);
        for (&o, c) in val {
            out.add_entry(key, o, c.clone().signed(e))?;
        }
    }
    Ok(out)
}

/// Copy `op` into `target` (an operation on a direct sum), reading slot `k`
/// of `op` as summand `parts[k]` and its output as summand `out_part`.
pub fn embed_into(
    target: &mut MultilinearOp,
    op: &MultilinearOp,
    sum: &DirectSum,
    parts: &[usize],
    out_part: usize,
) -> Result<()> {
    for (key, val) in op.table() {
        let nk: Vec<usize> = key.iter().zip(parts).map(|(&i, &p)| sum.embed(p, i)).collect();
        for (&o, c) in val {
            target.add_entry(&nk, sum.embed(out_part, o), c.clone())?;
        }
    }
    Ok(())
}

/// `A ⊕ s^d A∨` with its pairing.
#[derive(Clone, Debug)]
pub struct TrivialExtension {
    pub base: AInfStructure,
    pub d: i64,
    pub sum: DirectSum,
    pub zeta: CyclicForm,
}

impl TrivialExtension {
    /// Index of `a_i` in `∂_d A`.
    pub fn base_index(&self, i: usize) -> usize {
        self.sum.embed(0, i)
    }

    /// Index of `s^d a^i` in `∂_d A`.
    pub fn dual_index(&self, i: usize) -> usize {
        self.sum.embed(1, i)
    }
}

/// `ζ_A(s^d f, a) = f(a)`, `ζ_A(a, s^d f) = (-1)^{|a|(|f|+d)} f(a)`.
pub fn zeta_form(base: &Space, sum: &DirectSum, d: i64) -> Result<CyclicForm> {
    let total = sum.space.clone();
    let mut pairing = MultilinearOp::zero(vec![total.clone(), total.clone()], GradedSpace::ground(), -d);
    for x in 0..base.dim() {
        let (a, f) = (sum.embed(0, x), sum.embed(1, x));
        let ad = base.degree(x);
        pairing.add_entry(&[f, a], 0, Scalar::one())?;
        pairing.add_entry(&[a, f], 0, Scalar::sign(ad * (-ad + d)))?;
    }
    CyclicForm::new(total, d, pairing)
}

/// The trivial extension `∂_d A`: `m̃_n` is `m_n` on `A^{⊗n}`, the suspended
/// dual bimodule action with one `s^d A∨` input, and zero otherwise.
pub fn build_trivial_extension(a: &AInfStructure, d: i64) -> Result<(AInfStructure, TrivialExtension)> {
    let base = a.space().clone();
    let dual = dual_space(&base);
    let sdual = suspend(&dual, d);
    let sum = DirectSum::new(&[base.clone(), sdual.clone()])?;
    let total = sum.space.clone();
    let mut fam = OpFamily::new(FamilyKind::AInf);
    for (&n, op) in a.family().iter() {
        let mut ext = MultilinearOp::zero(vec![total.clone(); n], total.clone(), n as i64 - 2);
        embed_into(&mut ext, op, &sum, &vec![0; n], 0)?;
        for i in 0..n {
            let j = n - 1 - i;
            let act = suspend_action(&dualize_action(op, i, j, 0, &dual)?, i, d, &sdual)?;
            let mut parts = vec![0; n];
            parts[i] = 1;
            embed_into(&mut ext, &act, &sum, &parts, 1)?;
        }
        fam.insert(n, ext)?;
    }
    let zeta = zeta_form(&base, &sum, d)?;
    let ext = AInfStructure::new(total, fam)?;
    Ok((ext, TrivialExtension { base: a.clone(), d, sum, zeta }))
}

/// The square-zero extension `A ⋉ M`: `m_n` on `A^{⊗n}`, `m_{i,j}` on
/// `A^{⊗i} ⊗ M ⊗ A^{⊗j}`, zero elsewhere.
pub fn semidirect(m: &AInfBimodule) -> Result<(AInfStructure, DirectSum)> {
    let a = m.algebra();
    let sum = DirectSum::new(&[a.space().clone(), m.module().clone()])?;
    let total = sum.space.clone();
    let top = a.max_arity().max(m.family().max_inputs());
    let mut fam = OpFamily::new(FamilyKind::AInf);
    for n in 1..=top {
        let mut ext = MultilinearOp::zero(vec![total.clone(); n], total.clone(), n as i64 - 2);
        if let Some(op) = a.m(n) {
            embed_into(&mut ext, op, &sum, &vec![0; n], 0)?;
        }
        for i in 0..n {
            if let Some(op) = m.m(i, n - 1 - i) {
                let mut parts = vec![0; n];
                parts[i] = 1;
                embed_into(&mut ext, op, &sum, &parts, 1)?;
            }
        }
        fam.insert(n, ext)?;
    }
    Ok((AInfStructure::new(total, fam)?, sum))
}

/// Residual of the A∞-morphism equation at arity `n`:
/// `Σ_k Σ_{i_1+…+i_k=n} (-1)^{Σ_j (k-j)(i_j-1)} m_k(f_{i_1} ⊗ … ⊗ f_{i_k})
///  - Σ_{r+s+t=n} (-1)^{r+st} f_{r+1+t}(id^r ⊗ μ_s ⊗ id^t)`,
/// with `|f_n| = n - 1`.
pub fn morphism_residual(
    f: &OpFamily<usize>,
    source: &AInfStructure,
    target: &AInfStructure,
    n: usize,
) -> Result<MultilinearOp> {
    let mut acc = MultilinearOp::zero(vec![source.space().clone(); n], target.space().clone(), n as i64 - 2);
    for comp in crate::kernel::perm::compositions(n) {
        let k = comp.len();
        let Some(mk) = target.m(k) else { continue };
        let fs: Option<Vec<&MultilinearOp>> = comp.iter().map(|&i| f.get(i)).collect();
        let Some(fs) = fs else { continue };
        let w: usize = comp.iter().enumerate().map(|(j, &i)| (k - j - 1) * (i - 1)).sum();
        let slots: Vec<Option<&MultilinearOp>> = fs.into_iter().map(Some).collect();
        let term = crate::multiop::compose_tensor(mk, &slots, w as i64)?;
        add_into(&mut acc, &Scalar::one(), &term)?;
    }
    for s in 1..=n {
        let Some(mu) = source.m(s) else { continue };
        for r in 0..=n - s {
            let t = n - s - r;
            let Some(fo) = f.get(r + 1 + t) else { continue };
            let term = insert_compose(fo, mu, r, (r + s * t) as i64)?;
            add_into(&mut acc, &-Scalar::one(), &term)?;
        }
    }
    Ok(acc)
}

/// Residual ledger of the A∞-morphism equations for `n ≤ max_n`.
pub fn check_morphism(
    f: &OpFamily<usize>,
    source: &AInfStructure,
    target: &AInfStructure,
    max_n: usize,
) -> Result<CheckReport> {
    let residuals =
        (1..=max_n).into_par_iter().map(|n| morphism_residual(f, source, target, n)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("morphism", max_n);
    for (n, r) in (1..=max_n).zip(&residuals) {
        report.absorb("morphism", &[n as i64], r);
    }
    Ok(report)
}

/// The ground field as a one-dimensional unital algebra.
pub fn unit_algebra() -> AInfStructure {
    let k = GradedSpace::from_pairs("k1", &[("1", 0)]).expect("unit space");
    let mut m = MultilinearOp::zero(vec![k.clone(), k.clone()], k.clone(), 0);
    m.add_entry(&[0, 0], 0, Scalar::one()).expect("unit product");
    AInfStructure::dg(k, None, Some(m)).expect("unit algebra")
}

/// `(A^{⊗n})` as one space, for operations with tensor outputs.
pub fn tensor_codomain(a: &Space, n: usize) -> Result<Space> {
    tensor_space(&vec![a.clone(); n])
}
