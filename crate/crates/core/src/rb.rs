//! Rota-Baxter operators: classical, homotopy absolute and relative, the dg
//! relative form, homotopy Rota-Baxter modules and their duals, trivial
//! extensions, cyclic completion, cyclicity predicates and the relative to
//! absolute lift.
//!
//! Residual conventions: every identity is recorded as `LHS - RHS` with the
//! sign exponents supplied to [`insert_compose`] / [`compose_tensor`], which
//! add all Koszul signs.

use rayon::prelude::*;
use serde::Serialize;

use crate::ainf::{
    build_trivial_extension, check_signature, cyclic_residuals, dualize_action, embed_into, semidirect, AInfBimodule,
    AInfStructure, CyclicForm, TrivialExtension,
};
use crate::error::{Error, Result};
use crate::kernel::linalg::solve;
use crate::kernel::perm::{adjacent_transpositions, compositions};
use crate::kernel::signs;
use crate::kernel::space::{dual_space, same_space, DirectSum, GradedSpace, Space};
use crate::kernel::Scalar;
use crate::multiop::{
    add_into, compose_tensor, insert_compose, permute_inputs, CheckReport, FamilyKind, MultilinearOp, OpFamily,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RbVariant {
    /// `T_n: A^{⊗n} → A`.
    Absolute,
    /// `T_n: M^{⊗n} → A` for an A∞-bimodule `M`.
    Relative,
    /// Relative, over a dg algebra and a dg bimodule.
    DgRelative,
    /// A single degree-0 `T: M → A` over a dg algebra.
    Classical,
}

/// A Rota-Baxter family `{T_n}` with `|T_n| = n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RbFamily {
    base: AInfStructure,
    module: Option<AInfBimodule>,
    variant: RbVariant,
    t: OpFamily<usize>,
}

impl RbFamily {
    pub fn absolute(base: AInfStructure, t: OpFamily<usize>) -> Result<Self> {
        let src = base.space().clone();
        Self::build(base, None, RbVariant::Absolute, t, &src, FamilyKind::RbAbsolute)
    }

    pub fn relative(module: AInfBimodule, t: OpFamily<usize>) -> Result<Self> {
        let src = module.module().clone();
        let base = module.algebra().clone();
        Self::build(base, Some(module), RbVariant::Relative, t, &src, FamilyKind::RbRelative)
    }

    /// Relative, with both the algebra and the bimodule strictly dg.
    pub fn dg_relative(module: AInfBimodule, t: OpFamily<usize>) -> Result<Self> {
        if !module.algebra().is_dg() || !module.is_dg() {
            return Err(Error::Structure("dg relative family over a non-dg input".into()));
        }
        let src = module.module().clone();
        let base = module.algebra().clone();
        Self::build(base, Some(module), RbVariant::DgRelative, t, &src, FamilyKind::RbRelative)
    }

    /// A classical operator `T: M → A` of degree 0.
    pub fn classical(module: AInfBimodule, t: MultilinearOp) -> Result<Self> {
        if !module.algebra().is_dg() || !module.is_dg() {
            return Err(Error::Structure("classical operator over a non-dg input".into()));
        }
        if t.arity() != 1 || t.degree() != 0 {
            return Err(Error::Structure("a classical Rota-Baxter operator has arity 1 and degree 0".into()));
        }
        let mut fam = OpFamily::new(FamilyKind::RbRelative);
        fam.insert(1, t)?;
        let src = module.module().clone();
        let base = module.algebra().clone();
        Self::build(base, Some(module), RbVariant::Classical, fam, &src, FamilyKind::RbRelative)
    }

    fn build(
        base: AInfStructure,
        module: Option<AInfBimodule>,
        variant: RbVariant,
        t: OpFamily<usize>,
        src: &Space,
        kind: FamilyKind,
    ) -> Result<Self> {
        if t.kind != kind {
            return Err(Error::Structure(format!("expected a {kind:?} family, got {:?}", t.kind)));
        }
        for (&n, op) in t.iter() {
            check_signature(op, &vec![src.clone(); n], base.space(), &format!("T_{n}"))?;
        }
        t.validate()?;
        Ok(RbFamily { base, module, variant, t })
    }

    pub fn base(&self) -> &AInfStructure {
        &self.base
    }

    pub fn module(&self) -> Option<&AInfBimodule> {
        self.module.as_ref()
    }

    pub fn variant(&self) -> RbVariant {
        self.variant
    }

    pub fn family(&self) -> &OpFamily<usize> {
        &self.t
    }

    pub fn t(&self, n: usize) -> Option<&MultilinearOp> {
        self.t.get(n)
    }

    /// The space the `T_n` read from: `A` or `M`.
    pub fn source(&self) -> &Space {
        match &self.module {
            Some(m) => m.module(),
            None => self.base.space(),
        }
    }

    /// The operation of the inner composite with the bare slot at one-based `j`
    /// among `p` inputs: `m_p`, or `m_{j-1,p-j}` in the relative case.
    fn inner(&self, p: usize, j: usize) -> Option<&MultilinearOp> {
        match &self.module {
            Some(m) => m.m(j - 1, p - j),
            None => self.base.m(p),
        }
    }

    /// Largest arity at which the identity can have a nonzero term.
    fn reach(&self) -> usize {
        let top_m = match &self.module {
            Some(m) => self.base.max_arity().max(m.family().max_inputs()),
            None => self.base.max_arity(),
        };
        top_m * self.t.max_inputs()
    }
}

fn source_domain(r: &RbFamily, n: usize) -> Vec<Space> {
    vec![r.source().clone(); n]
}

/// `T(u)T(v) - T(T(u)v + uT(v))`, and `dT - Td_M` when differentials exist.
pub fn check_classical_rb(a: &AInfStructure, m: &AInfBimodule, t: &MultilinearOp) -> Result<CheckReport> {
    let r = RbFamily::classical(m.clone(), t.clone())?;
    if a != r.base() {
        return Err(Error::Structure("bimodule is over a different algebra".into()));
    }
    let mut report = CheckReport::new("classical-rb", 2);
    let mut acc = MultilinearOp::zero(source_domain(&r, 2), a.space().clone(), 0);
    if let Some(mul) = a.m(2) {
        add_into(&mut acc, &Scalar::one(), &compose_tensor(mul, &[Some(t), Some(t)], 0)?)?;
    }
    if let Some(l) = m.m(1, 0) {
        let inner = compose_tensor(l, &[Some(t), None], 0)?;
        add_into(&mut acc, &-Scalar::one(), &insert_compose(t, &inner, 0, 0)?)?;
    }
    if let Some(rt) = m.m(0, 1) {
        let inner = compose_tensor(rt, &[None, Some(t)], 0)?;
        add_into(&mut acc, &-Scalar::one(), &insert_compose(t, &inner, 0, 0)?)?;
    }
    report.absorb("classical-rb", &[2], &acc);
    let mut dres = MultilinearOp::zero(source_domain(&r, 1), a.space().clone(), -1);
    if let Some(d) = a.m(1) {
        add_into(&mut dres, &Scalar::one(), &insert_compose(d, t, 0, 0)?)?;
    }
    if let Some(dm) = m.m(0, 0) {
        add_into(&mut dres, &-Scalar::one(), &insert_compose(t, dm, 0, 0)?)?;
    }
    report.absorb("classical-rb-d", &[1], &dres);
    Ok(report)
}

/// `LHS - RHS` of the homotopy Rota-Baxter identity at arity `n`:
/// `Σ (-1)^δ m_k(T_{l_1} ⊗ … ⊗ T_{l_k})` minus
/// `Σ (-1)^η T_{r_1}(id^i ⊗ m(T_{r_2} … T_{r_j} ⊗ id ⊗ T_{r_{j+1}} … T_{r_p}) ⊗ id^k)`
/// over `i + 1 + k = r_1`.
pub fn rb_residual(r: &RbFamily, n: usize) -> Result<MultilinearOp> {
    let mut acc = MultilinearOp::zero(source_domain(r, n), r.base.space().clone(), n as i64 - 2);
    for ls in compositions(n) {
        let Some(mk) = r.base.m(ls.len()) else { continue };
        let Some(ts) = ls.iter().map(|&l| r.t(l).map(Some)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let term = compose_tensor(mk, &ts, signs::delta(&ls))?;
        add_into(&mut acc, &Scalar::one(), &term)?;
    }
    for rs in compositions(n) {
        let p = rs.len();
        let Some(outer) = r.t(rs[0]) else { continue };
        let Some(tail) = rs[1..].iter().map(|&l| r.t(l)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        for j in 1..=p {
            let Some(inner_op) = r.inner(p, j) else { continue };
            let mut slots: Vec<Option<&MultilinearOp>> = tail.iter().copied().map(Some).collect();
            slots.insert(j - 1, None);
            let inner = compose_tensor(inner_op, &slots, 0)?;
            for i in 0..rs[0] {
                let k = rs[0] - 1 - i;
                let term = insert_compose(outer, &inner, i, signs::eta(i, k, j, &rs))?;
                add_into(&mut acc, &-Scalar::one(), &term)?;
            }
        }
    }
    Ok(acc)
}

fn check_rb_family(r: &RbFamily, max_n: usize, name: &str) -> Result<CheckReport> {
    r.t.validate()?;
    let residuals = (1..=max_n).into_par_iter().map(|n| rb_residual(r, n)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new(name, max_n);
    for (n, res) in (1..=max_n).zip(&residuals) {
        report.absorb(name, &[n as i64], res);
    }
    let reach = r.reach();
    if max_n < reach {
        report.truncated.push(format!("{name} n = {}..={reach} not evaluated", max_n + 1));
    }
    Ok(report)
}

/// The homotopy Rota-Baxter identities for `1 ≤ n ≤ max_n`.
pub fn check_homotopy_rb_absolute(r: &RbFamily, max_n: usize) -> Result<CheckReport> {
    if r.module.is_some() {
        return Err(Error::Structure("expected an absolute family".into()));
    }
    check_rb_family(r, max_n, "rb-absolute")
}

/// The homotopy relative Rota-Baxter identities for `1 ≤ n ≤ max_n`.
pub fn check_homotopy_rb_relative(r: &RbFamily, max_n: usize) -> Result<CheckReport> {
    if r.module.is_none() {
        return Err(Error::Structure("expected a relative family".into()));
    }
    check_rb_family(r, max_n, "rb-relative")
}

/// `LHS - RHS` of the dg form at arity `n`:
/// `d T_n - Σ (-1)^{n-1} T_n(id^s ⊗ d_M ⊗ id^k)` against
/// `-Σ (-1)^{1+i} m(T_i ⊗ T_j) + Σ (-1)^{i+(j-1)(k+1)} T(id^i ⊗ m^l(T_j ⊗ id) ⊗ id^k)
///  + Σ (-1)^{i+(j-1)k} T(id^i ⊗ m^r(id ⊗ T_j) ⊗ id^k)`.
pub fn dg_relative_residual(r: &RbFamily, n: usize) -> Result<MultilinearOp> {
    let a = &r.base;
    let m = r.module.as_ref().ok_or_else(|| Error::Structure("expected a relative family".into()))?;
    let mut acc = MultilinearOp::zero(source_domain(r, n), a.space().clone(), n as i64 - 2);
    let one = Scalar::one();
    let neg = -Scalar::one();
    if let (Some(d), Some(tn)) = (a.m(1), r.t(n)) {
        add_into(&mut acc, &one, &insert_compose(d, tn, 0, 0)?)?;
    }
    if let (Some(dm), Some(tn)) = (m.m(0, 0), r.t(n)) {
        for s in 0..n {
            add_into(&mut acc, &neg, &insert_compose(tn, dm, s, n as i64 - 1)?)?;
        }
    }
    if let Some(mul) = a.m(2) {
        for i in 1..n {
            let (Some(ti), Some(tj)) = (r.t(i), r.t(n - i)) else { continue };
            let term = compose_tensor(mul, &[Some(ti), Some(tj)], 1 + i as i64)?;
            add_into(&mut acc, &one, &term)?;
        }
    }
    for j in 1..n {
        for i in 0..n - j {
            let k = n - 1 - j - i;
            let (Some(outer), Some(tj)) = (r.t(i + k + 1), r.t(j)) else { continue };
            if let Some(ml) = m.m(1, 0) {
                let inner = compose_tensor(ml, &[Some(tj), None], 0)?;
                let e = (i + (j - 1) * (k + 1)) as i64;
                add_into(&mut acc, &neg, &insert_compose(outer, &inner, i, e)?)?;
            }
            if let Some(mr) = m.m(0, 1) {
                let inner = compose_tensor(mr, &[None, Some(tj)], 0)?;
                let e = (i + (j - 1) * k) as i64;
                add_into(&mut acc, &neg, &insert_compose(outer, &inner, i, e)?)?;
            }
        }
    }
    Ok(acc)
}

/// The dg form of the relative identities for `1 ≤ n ≤ max_n`.
pub fn check_dg_relative_rb(r: &RbFamily, max_n: usize) -> Result<CheckReport> {
    let m = r.module.as_ref().ok_or_else(|| Error::Structure("expected a relative family".into()))?;
    if !r.base.is_dg() || !m.is_dg() {
        return Err(Error::Structure("dg relative check on a non-dg input".into()));
    }
    let residuals = (1..=max_n).into_par_iter().map(|n| dg_relative_residual(r, n)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("rb-dg-relative", max_n);
    for (n, res) in (1..=max_n).zip(&residuals) {
        report.absorb("rb-dg-relative", &[n as i64], res);
    }
    let reach = 2 * r.t.max_inputs();
    if max_n < reach {
        report.truncated.push(format!("rb-dg-relative n = {}..={reach} not evaluated", max_n + 1));
    }
    Ok(report)
}

/// The descendent A∞-structure on the source space,
/// `μ_s = Σ (-1)^w m(T_{r_2} … T_{r_j} ⊗ id ⊗ T_{r_{j+1}} … T_{r_p})`; the family
/// satisfies the Rota-Baxter identities exactly when it is an A∞-morphism from
/// `μ` to the base.
pub fn descendent_structure(r: &RbFamily, max_n: usize) -> Result<AInfStructure> {
    let src = r.source().clone();
    let mut fam = OpFamily::new(FamilyKind::AInf);
    for s in 1..=max_n {
        let mut mu = MultilinearOp::zero(vec![src.clone(); s], src.clone(), s as i64 - 2);
        for tail in compositions(s - 1) {
            let p = tail.len() + 1;
            let Some(ts) = tail.iter().map(|&l| r.t(l)).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let mut rs = vec![1];
            rs.extend_from_slice(&tail);
            for j in 1..=p {
                let Some(op) = r.inner(p, j) else { continue };
                let mut slots: Vec<Option<&MultilinearOp>> = ts.iter().copied().map(Some).collect();
                slots.insert(j - 1, None);
                // η with i = k = 0
                let e = signs::eta(0, 0, j, &rs);
                add_into(&mut mu, &Scalar::one(), &compose_tensor(op, &slots, e)?)?;
            }
        }
        if !mu.is_zero() {
            fam.insert(s, mu)?;
        }
    }
    AInfStructure::new(src, fam)
}

/// A homotopy Rota-Baxter module: an A∞-bimodule with `T^M_{i,j}`,
/// `|T^M_{i,j}| = i + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RbModule {
    algebra: RbFamily,
    module: AInfBimodule,
    t: OpFamily<(usize, usize)>,
}

impl RbModule {
    pub fn new(algebra: RbFamily, module: AInfBimodule, t: OpFamily<(usize, usize)>) -> Result<Self> {
        if algebra.module.is_some() {
            return Err(Error::Structure("module over a relative family".into()));
        }
        if module.algebra() != algebra.base() {
            return Err(Error::Structure("bimodule is over a different algebra".into()));
        }
        if t.kind != FamilyKind::RbModule {
            return Err(Error::Structure(format!("expected a Rota-Baxter module family, got {:?}", t.kind)));
        }
        for (&(i, j), op) in t.iter() {
            let dom = crate::ainf::bimodule_domain(algebra.base().space(), module.module(), i, j);
            check_signature(op, &dom, module.module(), &format!("T_{{{i},{j}}}"))?;
        }
        t.validate()?;
        Ok(RbModule { algebra, module, t })
    }

    /// `A` over itself: `m_{p,q} = m_{p+q+1}`, `T_{p,q} = T_{p+q+1}`.
    pub fn regular(r: &RbFamily) -> Result<Self> {
        let mut t = OpFamily::new(FamilyKind::RbModule);
        for (&n, op) in r.family().iter() {
            for p in 0..n {
                t.insert((p, n - 1 - p), op.clone())?;
            }
        }
        Self::new(r.clone(), AInfBimodule::regular(r.base()), t)
    }

    pub fn algebra(&self) -> &RbFamily {
        &self.algebra
    }

    pub fn module(&self) -> &AInfBimodule {
        &self.module
    }

    pub fn family(&self) -> &OpFamily<(usize, usize)> {
        &self.t
    }

    pub fn t(&self, i: usize, j: usize) -> Option<&MultilinearOp> {
        self.t.get((i, j))
    }
}

/// `A ⋉ M` with `m̃`, `T̃` restricting to the algebra and module data.
pub fn build_rb_trivial_extension(r: &RbFamily, module: &RbModule) -> Result<(RbFamily, DirectSum)> {
    if r != module.algebra() {
        return Err(Error::Structure("module is over a different family".into()));
    }
    let (ext, sum) = semidirect(module.module())?;
    let total = sum.space.clone();
    let top = r.family().max_inputs().max(module.family().max_inputs());
    let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
    for n in 1..=top {
        let mut t = MultilinearOp::zero(vec![total.clone(); n], total.clone(), n as i64 - 1);
        if let Some(op) = r.t(n) {
            embed_into(&mut t, op, &sum, &vec![0; n], 0)?;
        }
        for i in 0..n {
            if let Some(op) = module.t(i, n - 1 - i) {
                let mut parts = vec![0; n];
                parts[i] = 1;
                embed_into(&mut t, op, &sum, &parts, 1)?;
            }
        }
        fam.insert(n, t)?;
    }
    Ok((RbFamily::absolute(ext, fam)?, sum))
}

/// The module identities at every `(m, n)` with `m + n ≤ max_total`, read as the
/// single-`M`-letter part of the absolute identity on `A ⋉ M`. That reading also
/// contains the terms whose module input sits in an outer identity slot; see
/// [`check_rb_module_verbatim`] for the three-sum display.
pub fn check_rb_module(module: &RbModule, max_total: usize) -> Result<CheckReport> {
    let (ext, sum) = build_rb_trivial_extension(module.algebra(), module)?;
    let residuals = (1..=max_total + 1).into_par_iter().map(|n| rb_residual(&ext, n)).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("rb-module", max_total);
    let total = &sum.space;
    for (n, res) in (1..=max_total + 1).zip(&residuals) {
        report.checked += n;
        for (key, val) in res.table() {
            let parts: Vec<usize> = key.iter().map(|&i| sum.locate(i).0).collect();
            if parts.iter().filter(|&&p| p == 1).count() != 1 {
                continue;
            }
            let pos = parts.iter().position(|&p| p == 1).expect("one module letter");
            let idx = [pos as i64, (n - 1 - pos) as i64];
            let inputs: Vec<String> = key.iter().map(|&i| total.label(i).to_string()).collect();
            for (&o, c) in val {
                report.push("rb-module", &idx, inputs.clone(), total.label(o).to_string(), c.clone());
            }
        }
    }
    let reach = ext.reach();
    if max_total + 1 < reach {
        report.truncated.push(format!("rb-module m + n = {}..={} not evaluated", max_total + 1, reach - 1));
    }
    Ok(report)
}

/// Which term of the three-sum module identity a sign row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleTerm {
    Alpha,
    Beta1,
    Beta2,
    Beta3,
}

/// One composite of the module identity with its displayed exponent and the
/// exponent the same composite carries inside the absolute identity on `A ⋉ M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignRow {
    pub term: ModuleTerm,
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub is: Vec<usize>,
    pub js: Vec<usize>,
    /// `v` of the β₂/β₃ sums, and `(r, t)` of the inner `T^M_{r,t}`.
    pub v: usize,
    pub r: usize,
    pub t: usize,
    pub displayed: i64,
    pub unified: i64,
}

impl SignRow {
    pub fn agrees(&self) -> bool {
        (self.displayed - self.unified).rem_euclid(2) == 0
    }
}

fn parts_of(total: usize) -> Vec<Vec<usize>> {
    compositions(total)
}

/// All `(l, k, is, js)` splits for the α and β₁ sums: `Σis + l = m`, `Σjs + k = n`.
fn splits(m: usize, n: usize) -> Vec<(usize, usize, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for l in 0..=m {
        for k in 0..=n {
            for is in parts_of(m - l) {
                for js in parts_of(n - k) {
                    out.push((l, k, is.clone(), js));
                }
            }
        }
    }
    out
}

/// Every composite of the three-sum module identity at `(m, n)` with both sign
/// readings.
pub fn rb_module_sign_table(m: usize, n: usize) -> Vec<SignRow> {
    let mut rows = Vec::new();
    for (l, k, is, js) in splits(m, n) {
        let p = is.len();
        let mut ls = is.clone();
        ls.push(l + k + 1);
        ls.extend_from_slice(&js);
        rows.push(SignRow {
            term: ModuleTerm::Alpha,
            m,
            n,
            l,
            k,
            is: is.clone(),
            js: js.clone(),
            v: 0,
            r: 0,
            t: 0,
            displayed: signs::alpha(l, k, &is, &js),
            unified: signs::delta(&ls),
        });
        let mut rs = vec![l + k + 1];
        rs.extend_from_slice(&is);
        rs.extend_from_slice(&js);
        rows.push(SignRow {
            term: ModuleTerm::Beta1,
            m,
            n,
            l,
            k,
            is: is.clone(),
            js: js.clone(),
            v: 0,
            r: 0,
            t: 0,
            displayed: signs::beta1(l, k, m, n, &is, &js),
            unified: signs::eta(l, k, p + 1, &rs),
        });
    }
    // β₂: l + r + 1 + Σis = m, k + t + Σjs = n
    for l in 0..m {
        for r in 0..m - l {
            for k in 0..=n {
                for t in 0..=n - k {
                    for is in parts_of(m - l - r - 1) {
                        for js in parts_of(n - k - t) {
                            let p = is.len();
                            for v in 0..=p {
                                let mut rs = vec![l + k + 1];
                                rs.extend_from_slice(&is);
                                rs.push(r + t + 1);
                                rs.extend_from_slice(&js);
                                rows.push(SignRow {
                                    term: ModuleTerm::Beta2,
                                    m,
                                    n,
                                    l,
                                    k,
                                    is: is.clone(),
                                    js: js.clone(),
                                    v,
                                    r,
                                    t,
                                    displayed: signs::beta2(l, k, m, n, v, r, t, &is, &js),
                                    unified: signs::eta(l, k, v + 1, &rs),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    // β₃: l + r + Σis = m, k + t + 1 + Σjs = n
    for l in 0..=m {
        for r in 0..=m - l {
            for k in 0..n {
                for t in 0..n - k {
                    for is in parts_of(m - l - r) {
                        for js in parts_of(n - k - t - 1) {
                            let p = is.len();
                            for v in 0..=js.len() {
                                let mut rs = vec![l + k + 1];
                                rs.extend_from_slice(&is);
                                rs.push(r + t + 1);
                                rs.extend_from_slice(&js);
                                rows.push(SignRow {
                                    term: ModuleTerm::Beta3,
                                    m,
                                    n,
                                    l,
                                    k,
                                    is: is.clone(),
                                    js: js.clone(),
                                    v,
                                    r,
                                    t,
                                    displayed: signs::beta3(l, k, m, n, v, r, t, &is, &js),
                                    unified: signs::eta(l, k, p + 2 + v, &rs),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    rows
}

/// Evaluate one sign-table row as a composite operation.
fn module_term(module: &RbModule, row: &SignRow, e: i64) -> Result<Option<MultilinearOp>> {
    let r = module.algebra();
    let bm = module.module();
    let ts = |xs: &[usize]| xs.iter().map(|&i| r.t(i)).collect::<Option<Vec<_>>>();
    let (Some(ti), Some(tj)) = (ts(&row.is), ts(&row.js)) else {
        return Ok(None);
    };
    let (p, q) = (row.is.len(), row.js.len());
    fn some<'a>(v: &[&'a MultilinearOp]) -> Vec<Option<&'a MultilinearOp>> {
        v.iter().copied().map(Some).collect()
    }
    match row.term {
        ModuleTerm::Alpha => {
            let (Some(outer), Some(tm)) = (bm.m(p, q), module.t(row.l, row.k)) else {
                return Ok(None);
            };
            let mut slots = some(&ti);
            slots.push(Some(tm));
            slots.extend(some(&tj));
            Ok(Some(compose_tensor(outer, &slots, e)?))
        }
        ModuleTerm::Beta1 => {
            let (Some(inner), Some(outer)) = (bm.m(p, q), module.t(row.l, row.k)) else {
                return Ok(None);
            };
            let mut slots = some(&ti);
            slots.push(None);
            slots.extend(some(&tj));
            let c = compose_tensor(inner, &slots, 0)?;
            Ok(Some(insert_compose(outer, &c, row.l, e)?))
        }
        ModuleTerm::Beta2 | ModuleTerm::Beta3 => {
            let (inner, ins) =
                if row.term == ModuleTerm::Beta2 { (bm.m(p + 1, q), row.v) } else { (bm.m(p, q + 1), p + 1 + row.v) };
            let (Some(inner), Some(outer), Some(tm)) = (inner, module.t(row.l, row.k), module.t(row.r, row.t)) else {
                return Ok(None);
            };
            let mut slots = some(&ti);
            slots.push(Some(tm));
            slots.extend(some(&tj));
            slots.insert(ins, None);
            let c = compose_tensor(inner, &slots, 0)?;
            Ok(Some(insert_compose(outer, &c, row.l, e)?))
        }
    }
}

/// The module identities exactly as the three sums display them, with the
/// α, β₁, β₂, β₃ exponents; `T_0` terms are absent.
pub fn check_rb_module_verbatim(module: &RbModule, max_total: usize) -> Result<CheckReport> {
    let a = module.algebra().base().space().clone();
    let msp = module.module().module().clone();
    let mut report = CheckReport::new("rb-module-verbatim", max_total);
    for total in 0..=max_total {
        for m in 0..=total {
            let n = total - m;
            let dom = crate::ainf::bimodule_domain(&a, &msp, m, n);
            let mut acc = MultilinearOp::zero(dom, msp.clone(), (m + n) as i64 - 1);
            for row in rb_module_sign_table(m, n) {
                if let Some(term) = module_term(module, &row, row.displayed)? {
                    let c = if row.term == ModuleTerm::Alpha { Scalar::one() } else { -Scalar::one() };
                    add_into(&mut acc, &c, &term)?;
                }
            }
            report.absorb("rb-module-verbatim", &[m as i64, n as i64], &acc);
        }
    }
    Ok(report)
}

/// The dual module on `M∨`: `m^∨_{i,j}` from `m_{j,i}` and `T^∨_{i,j}` from
/// `T^M_{j,i}` with the dual-module exponents.
pub fn dualize_rb_module(module: &RbModule) -> Result<RbModule> {
    let bm = module.module().dual()?;
    let mdual = bm.module().clone();
    let mut t = OpFamily::new(FamilyKind::RbModule);
    for (&(j, i), op) in module.family().iter() {
        t.insert((i, j), dualize_action(op, i, j, 1, &mdual)?)?;
    }
    RbModule::new(module.algebra().clone(), bm, t)
}

/// `∂₀A` with its cyclic Rota-Baxter family.
#[derive(Clone, Debug)]
pub struct CyclicCompletion {
    pub family: RbFamily,
    pub extension: TrivialExtension,
}

/// `T̃_n = T_n` on `A^{⊗n}`; with one dual input `f_j` at one-based `j`,
/// `T̃_n(a_1 … f_j … a_n) = (-1)^ξ f_j ∘ T_n(a_{j+1} … a_n ⊗ - ⊗ a_1 … a_{j-1})`.
pub fn cyclic_completion(r: &RbFamily) -> Result<CyclicCompletion> {
    if r.module.is_some() {
        return Err(Error::Structure("cyclic completion of a relative family".into()));
    }
    let a = r.base.space().clone();
    let (ext, te) = build_trivial_extension(&r.base, 0)?;
    let sum = &te.sum;
    let total = sum.space.clone();
    let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
    for (&n, op) in r.family().iter() {
        let mut t = MultilinearOp::zero(vec![total.clone(); n], total.clone(), n as i64 - 1);
        embed_into(&mut t, op, sum, &vec![0; n], 0)?;
        for j in 1..=n {
            for (key, val) in op.table() {
                // key = (a_{j+1} … a_n, x, a_1 … a_{j-1})
                let x = key[n - j];
                let after = &key[..n - j];
                let before = &key[n - j + 1..];
                let mut degs: Vec<i64> = before.iter().map(|&i| a.degree(i)).collect();
                degs.push(0);
                degs.extend(after.iter().map(|&i| a.degree(i)));
                for (&y, c) in val {
                    let e = signs::xi(j, -a.degree(y), &degs);
                    let mut nk: Vec<usize> = before.iter().map(|&i| sum.embed(0, i)).collect();
                    nk.push(sum.embed(1, y));
                    nk.extend(after.iter().map(|&i| sum.embed(0, i)));
                    t.add_entry(&nk, sum.embed(1, x), c.clone().signed(e))?;
                }
            }
        }
        fam.insert(n, t)?;
    }
    Ok(CyclicCompletion { family: RbFamily::absolute(ext, fam)?, extension: te })
}

/// The natural pairing `⟨a, f⟩ = (-1)^{|a||f|} f(a)` on `A × A∨`.
pub fn natural_pairing(a: &Space) -> Result<MultilinearOp> {
    let dual = dual_space(a);
    let mut p = MultilinearOp::zero(vec![a.clone(), dual], GradedSpace::ground(), 0);
    for i in 0..a.dim() {
        let d = a.degree(i);
        p.add_entry(&[i, i], 0, Scalar::sign(-d * d))?;
    }
    Ok(p)
}

/// Cyclicity of every `T_n`: against `form` for an absolute family, against the
/// natural pairing for a relative family on `A∨`.
pub fn check_cyclic_rb(r: &RbFamily, form: Option<&CyclicForm>, max_n: usize) -> Result<CheckReport> {
    let pairing = match (&r.module, form) {
        (None, Some(f)) => {
            if !same_space(f.space(), r.base.space()) {
                return Err(Error::Structure("form and family live on different spaces".into()));
            }
            f.pairing().clone()
        }
        (None, None) => return Err(Error::Argument("absolute cyclicity needs a form".into())),
        (Some(m), _) => {
            if !same_space(m.module(), &dual_space(r.base.space())) {
                return Err(Error::Structure("relative cyclicity needs the bimodule A∨".into()));
            }
            natural_pairing(r.base.space())?
        }
    };
    let mut report = CheckReport::new("rb-cyclic", max_n);
    for n in 1..=max_n {
        match r.t(n) {
            Some(op) => cyclic_residuals(op, &pairing, "rb-cyclic", &mut report)?,
            None => report.checked += 1,
        }
    }
    Ok(report)
}

/// Skew-symmetry `T_n ∘ σ = sgn(σ) T_n`, tested on adjacent transpositions.
pub fn check_skew(t: &OpFamily<usize>, max_n: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("skew", max_n);
    for n in 2..=max_n {
        let Some(op) = t.get(n) else {
            report.checked += 1;
            continue;
        };
        for (s, tau) in adjacent_transpositions(n).iter().enumerate() {
            let mut res = permute_inputs(op, tau)?;
            add_into(&mut res, &Scalar::one(), op)?;
            report.absorb("skew", &[n as i64, s as i64 + 1], &res);
        }
    }
    Ok(report)
}

/// Cyclic and skew-symmetric.
pub fn check_ultracyclic_rb(r: &RbFamily, form: Option<&CyclicForm>, max_n: usize) -> Result<CheckReport> {
    let mut report = check_cyclic_rb(r, form, max_n)?;
    report.merge(check_skew(r.family(), max_n)?);
    report.check = "rb-ultracyclic".into();
    Ok(report)
}

/// `T̄_n: (∂₀A)^{⊗n} ↠ (A∨)^{⊗n} → A ↪ ∂₀A` for a relative family on `A∨`.
pub fn lift_relative_to_absolute(r: &RbFamily) -> Result<CyclicCompletion> {
    let m = r.module.as_ref().ok_or_else(|| Error::Structure("expected a relative family".into()))?;
    if !same_space(m.module(), &dual_space(r.base.space())) {
        return Err(Error::Structure("the lift needs a family on A∨".into()));
    }
    let (ext, te) = build_trivial_extension(&r.base, 0)?;
    let total = te.sum.space.clone();
    let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
    for (&n, op) in r.family().iter() {
        let mut t = MultilinearOp::zero(vec![total.clone(); n], total.clone(), n as i64 - 1);
        embed_into(&mut t, op, &te.sum, &vec![1; n], 0)?;
        fam.insert(n, t)?;
    }
    Ok(CyclicCompletion { family: RbFamily::absolute(ext, fam)?, extension: te })
}

/// `T∨` with `γ(T∨u, v) = (-1)^{|T||u|} γ(u, Tv)`, by an exact linear solve.
pub fn adjoint(t: &MultilinearOp, form: &CyclicForm) -> Result<MultilinearOp> {
    let sp = form.space();
    if t.arity() != 1 || !same_space(&t.domain()[0], sp) || !same_space(t.codomain(), sp) {
        return Err(Error::Argument("adjoint of an endomorphism of the form's space".into()));
    }
    let n = sp.dim();
    let gt: Vec<Vec<Scalar>> = (0..n).map(|v| (0..n).map(|w| form.value(w, v)).collect()).collect();
    let mut out = MultilinearOp::zero(vec![sp.clone()], sp.clone(), t.degree());
    for u in 0..n {
        let rhs: Vec<Scalar> = (0..n)
            .map(|v| {
                let tv = t.get(&[v]);
                let s: Scalar = tv.iter().map(|(w, c)| c * &form.value(u, *w)).sum();
                s.signed(t.degree() * sp.degree(u))
            })
            .collect();
        let c = solve(&gt, &rhs).ok_or_else(|| Error::Structure("form is degenerate".into()))?;
        for (w, x) in c.into_iter().enumerate() {
            if !x.is_zero() {
                out.add_entry(&[u], w, x)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual_numbers() -> AInfStructure {
        let a = GradedSpace::from_pairs("A", &[("1", 0), ("x", 0)]).unwrap();
        let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
        m.entry(&["1", "1"], "1", 1).unwrap();
        m.entry(&["1", "x"], "x", 1).unwrap();
        m.entry(&["x", "1"], "x", 1).unwrap();
        AInfStructure::dg(a, None, Some(m)).unwrap()
    }

    fn op1(a: &Space, entries: &[(&str, &str, i64)]) -> MultilinearOp {
        let mut t = MultilinearOp::zero(vec![a.clone()], a.clone(), 0);
        for (i, o, c) in entries {
            t.entry(&[i], o, *c).unwrap();
        }
        t
    }

    #[test]
    fn classical_examples() {
        let a = dual_numbers();
        let reg = AInfBimodule::regular(&a);
        let t = op1(a.space(), &[("1", "x", 1)]);
        assert!(check_classical_rb(&a, &reg, &t).unwrap().passed());
        let id = op1(a.space(), &[("1", "1", 1), ("x", "x", 1)]);
        let r = check_classical_rb(&a, &reg, &id).unwrap();
        assert!(!r.passed());
        let at_11 = r.entries.iter().find(|e| e.inputs == vec!["1", "1"] && e.output == "1").unwrap();
        assert_eq!(at_11.value, Scalar::from_int(-1));
    }

    #[test]
    fn one_term_absolute_matches_classical() {
        let a = dual_numbers();
        let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
        fam.insert(1, op1(a.space(), &[("1", "x", 1)])).unwrap();
        let r = RbFamily::absolute(a, fam).unwrap();
        let rep = check_homotopy_rb_absolute(&r, 3).unwrap();
        assert_eq!(rep.verdict(), crate::multiop::Verdict::Pass);
    }

    #[test]
    fn truncation_is_reported() {
        let a = dual_numbers();
        let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
        fam.insert(1, op1(a.space(), &[("1", "x", 1)])).unwrap();
        let r = RbFamily::absolute(a, fam).unwrap();
        let rep = check_homotopy_rb_absolute(&r, 1).unwrap();
        assert_eq!(rep.verdict(), crate::multiop::Verdict::PassUpToCutoff);
    }

    #[test]
    fn relative_wrong_variant_is_rejected() {
        let a = dual_numbers();
        let r = RbFamily::absolute(a, OpFamily::new(FamilyKind::RbAbsolute)).unwrap();
        assert!(check_homotopy_rb_relative(&r, 2).is_err());
    }
}
