//! Pre-Calabi-Yau structures: the A∞-structure on `∂₋₁B = B ⊕ s⁻¹B∨` built
//! from a strong homotopy Rota-Baxter interactive pair, and the shape
//! predicates good / fine / manageable / special.

use crate::ainf::{build_trivial_extension, check_cyclic, check_stasheff, AInfStructure, TrivialExtension};
use crate::error::{Error, Result};
use crate::kernel::perm::Perm;
use crate::kernel::signs;
use crate::kernel::space::{same_space, Space};
use crate::kernel::Scalar;
use crate::multiop::{
    add_into, compose_tensor, insert_compose, permute_inputs, CheckReport, FamilyKind, MultilinearOp, OpFamily,
};
use crate::pair::{build_kappa, check_strong_n_derivation, InteractivePair};
use crate::rb::{check_dg_relative_rb, RbFamily};

/// `B` together with an A∞-structure on `∂₋₁B` and the pairing `ζ_B`.
#[derive(Clone, Debug)]
pub struct PreCYStructure {
    extension: TrivialExtension,
    structure: AInfStructure,
}

impl PreCYStructure {
    /// Wrap an A∞-structure on `∂₋₁B`; the space must be the one produced by
    /// the trivial extension of `base` at `d = -1`.
    pub fn new(base: &AInfStructure, structure: AInfStructure) -> Result<Self> {
        let (_, extension) = build_trivial_extension(base, -1)?;
        if !same_space(structure.space(), &extension.sum.space) {
            return Err(Error::Structure("structure does not live on ∂₋₁B".into()));
        }
        Ok(PreCYStructure { extension, structure })
    }

    /// The base `B` with the restriction of `m_1, m_2` stored at build time.
    pub fn base(&self) -> &AInfStructure {
        &self.extension.base
    }

    pub fn base_space(&self) -> &Space {
        self.extension.base.space()
    }

    pub fn extension(&self) -> &TrivialExtension {
        &self.extension
    }

    pub fn structure(&self) -> &AInfStructure {
        &self.structure
    }

    pub fn family(&self) -> &OpFamily<usize> {
        self.structure.family()
    }

    pub fn zeta(&self) -> &crate::ainf::CyclicForm {
        &self.extension.zeta
    }

    /// `true` for entries of `∂₋₁B` in the `B` summand.
    pub fn is_base(&self, i: usize) -> bool {
        self.extension.sum.locate(i).0 == 0
    }
}

fn first_residual(r: &CheckReport) -> String {
    match r.first() {
        Some(e) => format!("{}{:?} ({}) -> {} : {}", e.identity, e.indices, e.inputs.join(", "), e.output, e.value),
        None => String::new(),
    }
}

/// The construction of `{m_n}` on `∂₋₁B`:
/// `m_1 = -d`, `m_2` the product of the trivial extension, and
/// `m_{2n+1}(b_1, s⁻¹f_1, …, s⁻¹f_n, b_{n+1}) = (-1)^γ T_n(κ(b_1⊗f_1), …) ▷ b_{n+1}`,
/// `m_{2n+1}(s⁻¹f_0, b_1, …, b_n, s⁻¹f_n) = (-1)^{|f_0|+γ} s⁻¹(f_0 ◁ T_n(κ(b_1⊗f_1), …))`.
///
/// Refuses to build when `T` fails the dg relative Rota-Baxter identities or
/// some `T_n`, `n ≤ max_n`, is not a strong `n`-derivation.
pub fn build_precy_from_pair(p: &InteractivePair, t: &RbFamily, max_n: usize) -> Result<PreCYStructure> {
    let module = t.module().ok_or_else(|| Error::Structure("expected a relative family on A∨".into()))?;
    if !same_space(module.module(), &p.acting_dual_space()) || !same_space(t.base().space(), p.acting().space()) {
        return Err(Error::Structure("the family does not act on the pair's A∨".into()));
    }
    let top = t.family().max_inputs().min(max_n);
    let rb = check_dg_relative_rb(t, 2 * top.max(1))?;
    if !rb.passed() {
        return Err(Error::Precondition(format!("not a dg relative Rota-Baxter family: {}", first_residual(&rb))));
    }
    for n in 1..=top {
        if let Some(tn) = t.t(n) {
            let r = check_strong_n_derivation(p, tn)?;
            if !r.passed() {
                return Err(Error::Precondition(format!(
                    "T_{n} is not a strong {n}-derivation: {}",
                    first_residual(&r)
                )));
            }
        }
    }
    build_precy_unchecked(p, t, max_n)
}

/// [`build_precy_from_pair`] without the precondition checks; used to
/// study what goes wrong when they fail.
pub fn build_precy_unchecked(p: &InteractivePair, t: &RbFamily, max_n: usize) -> Result<PreCYStructure> {
    let (ext, te) = build_trivial_extension(p.base(), -1)?;
    let total = te.sum.space.clone();
    let b = p.base().space().clone();
    let bd = p.base_dual_space();
    let mut fam = OpFamily::new(FamilyKind::AInf);
    if let Some(m1) = ext.m(1) {
        fam.insert(1, m1.scale(&-Scalar::one()))?;
    }
    if let Some(m2) = ext.m(2) {
        fam.insert(2, m2.clone())?;
    }
    let kappa = build_kappa(p)?;
    let right = p.base_dual_right_acting();
    for n in 1..=max_n {
        let Some(tn) = t.t(n) else { continue };
        let tk = compose_tensor(tn, &vec![Some(&kappa); n], 0)?;
        let mut m = MultilinearOp::zero(vec![total.clone(); 2 * n + 1], total.clone(), 2 * n as i64 - 1);
        for (key, val) in tk.table() {
            let b_degs: Vec<i64> = key.iter().step_by(2).map(|&i| b.degree(i)).collect();
            let f_degs: Vec<i64> = key.iter().skip(1).step_by(2).map(|&i| bd.degree(i)).collect();
            let g = signs::gamma(&b_degs, &f_degs);
            let emb: Vec<usize> = key.iter().enumerate().map(|(s, &i)| te.sum.embed(s % 2, i)).collect();
            for last in 0..b.dim() {
                let mut out = crate::multiop::Vector::new();
                for (&a, c) in val {
                    crate::multiop::axpy(&mut out, c, &p.act_on_base().get(&[a, last]));
                }
                let mut k = emb.clone();
                k.push(te.sum.embed(0, last));
                for (y, c) in out {
                    m.add_entry(&k, te.sum.embed(0, y), c.signed(g))?;
                }
            }
            for f0 in 0..bd.dim() {
                let mut out = crate::multiop::Vector::new();
                for (&a, c) in val {
                    crate::multiop::axpy(&mut out, c, &right.get(&[f0, a]));
                }
                let mut k = vec![te.sum.embed(1, f0)];
                k.extend_from_slice(&emb);
                for (y, c) in out {
                    m.add_entry(&k, te.sum.embed(1, y), c.signed(bd.degree(f0) + g))?;
                }
            }
        }
        fam.insert(2 * n + 1, m)?;
    }
    let structure = AInfStructure::new(total, fam)?;
    Ok(PreCYStructure { extension: te, structure })
}

/// Stasheff identities through arity `2·max_n + 1`; higher instances only
/// involve operations the construction never produces when
/// `max_n` bounds the family, which the report notes as truncation.
pub fn check_precy_stasheff(s: &PreCYStructure, max_arity: usize) -> Result<CheckReport> {
    check_stasheff(&s.structure, max_arity)
}

/// `(-1)`-cyclicity of every `m_n`, `n ≤ max_arity`, against `ζ_B`.
pub fn check_precy_cyclicity(s: &PreCYStructure, max_arity: usize) -> Result<CheckReport> {
    let mut r = check_cyclic(&s.structure, &s.extension.zeta, max_arity)?;
    r.check = "precy-cyclic".into();
    Ok(r)
}

/// The four shape predicates, each decided by exhaustive residuals; the
/// report locates a witness for every predicate that fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreCYFlags {
    pub good: bool,
    pub fine: bool,
    pub manageable: bool,
    pub special: bool,
    pub report: CheckReport,
}

/// Which summand pattern an `m_{2i-1}` input word may have, and where it
/// must land: `Some(true)` for `B`, `Some(false)` for `s⁻¹B∨`, `None` if the
/// word must be sent to zero.
fn good_target(word: &[bool]) -> Option<bool> {
    let n = word.len();
    if n % 2 == 0 {
        return None;
    }
    let alternating = word.windows(2).all(|w| w[0] != w[1]);
    if !alternating {
        return None;
    }
    Some(word[0])
}

fn label_key(s: &PreCYStructure, key: &[usize]) -> Vec<String> {
    let sp = s.structure.space();
    key.iter().map(|&i| sp.label(i).to_string()).collect()
}

/// `good`: `m_{2i} = 0` for `i > 1`, and `m_{2i-1}` is supported on the two
/// alternating words `B s⁻¹B∨ … B → B` and `s⁻¹B∨ B … s⁻¹B∨ → s⁻¹B∨`.
/// `fine`: good and `m_2 = 0`. `manageable`: `m_2` restricted to `B` is
/// associative and `m_2` is the trivial-extension product it induces.
/// `special`: every `m_{2n-1}`, `n > 1`, satisfies
/// `ζ(m(v_1…v_{2n-1}), v_{2n}) = ε(σ̃; v) ζ(m(v_{σ̃(1)}…), v_{σ̃(2n)})`,
/// checked on the block swaps induced by adjacent transpositions.
pub fn check_precy_flags(s: &PreCYStructure, max_arity: usize) -> Result<PreCYFlags> {
    let mut good = CheckReport::new("precy-good", max_arity);
    let sp = s.structure.space().clone();
    for n in 1..=max_arity {
        good.checked += 1;
        let Some(op) = s.structure.m(n) else { continue };
        if n == 2 {
            continue;
        }
        for (key, val) in op.table() {
            let word: Vec<bool> = key.iter().map(|&i| s.is_base(i)).collect();
            let target = good_target(&word);
            for (&o, c) in val {
                if target != Some(s.is_base(o)) {
                    good.push("good", &[n as i64], label_key(s, key), sp.label(o).to_string(), c.clone());
                }
            }
        }
    }
    let is_good = good.passed();

    let mut fine = CheckReport::new("precy-fine", 2);
    fine.checked += 1;
    if let Some(m2) = s.structure.m(2) {
        fine.absorb("fine", &[2], m2);
    }
    let is_fine = is_good && fine.passed();

    let mut manageable = CheckReport::new("precy-manageable", 3);
    let m2 = s.structure.m_or_zero(2);
    let b = s.base_space().clone();
    let mut restricted = MultilinearOp::zero(vec![b.clone(), b.clone()], b.clone(), 0);
    manageable.checked += 1;
    for (key, val) in m2.table() {
        if !key.iter().all(|&i| s.is_base(i)) {
            continue;
        }
        let k: Vec<usize> = key.iter().map(|&i| s.extension.sum.locate(i).1).collect();
        for (&o, c) in val {
            if s.is_base(o) {
                restricted.add_entry(&k, s.extension.sum.locate(o).1, c.clone())?;
            } else {
                manageable.push("manageable-closed", &[2], label_key(s, key), sp.label(o).to_string(), c.clone());
            }
        }
    }
    let mut fam = OpFamily::new(FamilyKind::AInf);
    fam.insert(2, restricted.clone())?;
    let product = AInfStructure::new(b.clone(), fam)?;
    let assoc = check_stasheff(&product, 3)?;
    for e in assoc.entries.into_iter().filter(|e| e.indices == [3]) {
        manageable.push("manageable-assoc", &[3], e.inputs, e.output, e.value);
    }
    manageable.checked += 1;
    let (expected, _) = build_trivial_extension(&product, -1)?;
    let mut diff = m2.clone();
    add_into(&mut diff, &-Scalar::one(), &expected.m_or_zero(2))?;
    manageable.absorb("manageable-shape", &[2], &diff);
    let is_manageable = manageable.passed();

    let mut special = CheckReport::new("precy-special", max_arity);
    for n in 2.. {
        let arity = 2 * n - 1;
        if arity > max_arity {
            break;
        }
        special.checked += 1;
        let Some(op) = s.structure.m(arity) else { continue };
        let l = insert_compose(s.extension.zeta.pairing(), op, 0, 0)?;
        for i in 0..n - 1 {
            let mut images: Vec<usize> = (0..2 * n).collect();
            images.swap(2 * i, 2 * i + 2);
            images.swap(2 * i + 1, 2 * i + 3);
            let tilde = Perm::from_images(images)?;
            let mut res = permute_inputs(&l, &tilde)?;
            add_into(&mut res, &-Scalar::one(), &l)?;
            special.absorb("special", &[arity as i64, i as i64 + 1], &res);
        }
    }
    let is_special = special.passed();

    let mut report = CheckReport::new("precy-flags", max_arity);
    report.merge(good);
    report.merge(fine);
    report.merge(manageable);
    report.merge(special);
    Ok(PreCYFlags { good: is_good, fine: is_fine, manageable: is_manageable, special: is_special, report })
}

/// Input words of length `n` on `∂₋₁B`, as summand patterns, whose
/// `m_n`-values are nonzero; used to confirm the construction only touches
/// the two alternating patterns.
pub fn support_patterns(s: &PreCYStructure, n: usize) -> Vec<Vec<bool>> {
    let mut out: Vec<Vec<bool>> = Vec::new();
    if let Some(op) = s.structure.m(n) {
        for key in op.table().keys() {
            let w: Vec<bool> = key.iter().map(|&i| s.is_base(i)).collect();
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out.sort();
    out
}
