//! Interactive pairs `(A, B)`: two dg algebras acting on each other through
//! `▷: A ⊗ B → B` and `▶: B ⊗ A → A` with `(b₁ ▶ a) ▷ b₂ = b₁ ∗ (a ▷ b₂)`,
//! the transport map `κ: B ⊗ B∨ → A∨`, and the (strong) `n`-derivation
//! predicates for operators `T_n: (A∨)^{⊗n} → A`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ainf::{check_signature, check_stasheff, AInfBimodule, AInfStructure};
use crate::error::{Error, Result};
use crate::kernel::space::Space;
use crate::kernel::Scalar;
use crate::multiop::{add_into, insert_compose, CheckReport, MultilinearOp};

/// The data `(A, B, ▷, ▶)` together with every induced action on the duals.
#[derive(Clone, Debug)]
pub struct InteractivePair {
    acting: AInfStructure,
    base: AInfStructure,
    act_on_base: MultilinearOp,
    act_on_acting: MultilinearOp,
    induced: Induced,
}

/// Actions generated from the four primary structure maps.
#[derive(Clone, Debug)]
struct Induced {
    /// `A∨` as an `A`-bimodule (dual of the regular bimodule).
    acting_dual: AInfBimodule,
    /// `B∨` as a `B`-bimodule (dual of the regular bimodule).
    base_dual: AInfBimodule,
    /// `(f ◁ a)(b) = f(a ▷ b)` on `B∨`, and `d_{B∨}`.
    base_dual_over_acting: AInfBimodule,
    /// `(g ◀ b)(a) = g(b ▶ a)` on `A∨`.
    acting_dual_over_base: AInfBimodule,
}

impl InteractivePair {
    pub fn new(
        acting: AInfStructure,
        base: AInfStructure,
        act_on_base: MultilinearOp,
        act_on_acting: MultilinearOp,
    ) -> Result<Self> {
        if !acting.is_dg() || !base.is_dg() {
            return Err(Error::Structure("both algebras of an interactive pair must be dg algebras".into()));
        }
        let (a, b) = (acting.space().clone(), base.space().clone());
        check_signature(&act_on_base, &[a.clone(), b.clone()], &b, "▷")?;
        check_signature(&act_on_acting, &[b.clone(), a.clone()], &a, "▶")?;
        if act_on_base.degree() != 0 || act_on_acting.degree() != 0 {
            return Err(Error::Structure("actions must have degree 0".into()));
        }
        let left_b = AInfBimodule::dg(acting.clone(), b.clone(), base.m(1).cloned(), Some(act_on_base.clone()), None)?;
        let left_a =
            AInfBimodule::dg(base.clone(), a.clone(), acting.m(1).cloned(), Some(act_on_acting.clone()), None)?;
        let induced = Induced {
            acting_dual: AInfBimodule::regular(&acting).dual()?,
            base_dual: AInfBimodule::regular(&base).dual()?,
            base_dual_over_acting: left_b.dual()?,
            acting_dual_over_base: left_a.dual()?,
        };
        Ok(InteractivePair { acting, base, act_on_base, act_on_acting, induced })
    }

    /// `(A, A)` with both actions the product of `A`.
    pub fn regular(a: &AInfStructure) -> Result<Self> {
        let m = a.m_or_zero(2);
        Self::new(a.clone(), a.clone(), m.clone(), m)
    }

    /// A dg `A`-module `B` viewed as an algebra with zero product, acting on
    /// `A` by zero.
    pub fn from_module(acting: &AInfStructure, base: AInfStructure, act: MultilinearOp) -> Result<Self> {
        let (a, b) = (acting.space().clone(), base.space().clone());
        let zero = MultilinearOp::zero(vec![b, a.clone()], a, 0);
        Self::new(acting.clone(), base, act, zero)
    }

    /// `(End(B), B)`: `φ ▷ b = φ(b)` and `b ▶ φ = l_b ∘ φ`. `End(B)` has basis
    /// `E{i}{j}` (sending `b_j` to `b_i`, degree `|b_i| - |b_j|`), product
    /// composition and differential `[d_B, -]`.
    pub fn endomorphisms(base: &AInfStructure) -> Result<Self> {
        let b = base.space().clone();
        let n = b.dim();
        let pairs: Vec<(String, i64)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (format!("E{}{}", i + 1, j + 1), b.degree(i) - b.degree(j)))
            .collect();
        let refs: Vec<(&str, i64)> = pairs.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        let a = crate::kernel::space::GradedSpace::from_pairs(&format!("End({})", b.name()), &refs)?;
        let e = |i: usize, j: usize| i * n + j;
        let mut comp = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    comp.add_entry(&[e(i, j), e(j, k)], e(i, k), Scalar::one())?;
                }
            }
        }
        // [d, φ] = d∘φ - (-1)^{|φ|} φ∘d, with d = m_1 of B
        let d_b = base.m_or_zero(1);
        let mut d_a = MultilinearOp::zero(vec![a.clone()], a.clone(), d_b.degree());
        for i in 0..n {
            for j in 0..n {
                for (&k, c) in &d_b.get(&[i]) {
                    d_a.add_entry(&[e(i, j)], e(k, j), c.clone())?;
                }
                let phi_deg = b.degree(i) - b.degree(j);
                for k in 0..n {
                    let c = d_b.coeff(&[k], j);
                    if !c.is_zero() {
                        d_a.add_entry(&[e(i, j)], e(i, k), -c.signed(phi_deg))?;
                    }
                }
            }
        }
        let acting = AInfStructure::dg(a.clone(), (!d_a.is_zero()).then_some(d_a), Some(comp))?;
        let mut eval = MultilinearOp::zero(vec![a.clone(), b.clone()], b.clone(), 0);
        for i in 0..n {
            for j in 0..n {
                eval.add_entry(&[e(i, j), j], i, Scalar::one())?;
            }
        }
        let prod = base.m_or_zero(2);
        let mut left = MultilinearOp::zero(vec![b.clone(), a.clone()], a.clone(), 0);
        for x in 0..n {
            for i in 0..n {
                for (&k, c) in &prod.get(&[x, i]) {
                    for j in 0..n {
                        left.add_entry(&[x, e(i, j)], e(k, j), c.clone())?;
                    }
                }
            }
        }
        Self::new(acting, base.clone(), eval, left)
    }

    pub fn acting(&self) -> &AInfStructure {
        &self.acting
    }

    pub fn base(&self) -> &AInfStructure {
        &self.base
    }

    /// `▷: A ⊗ B → B`.
    pub fn act_on_base(&self) -> &MultilinearOp {
        &self.act_on_base
    }

    /// `▶: B ⊗ A → A`.
    pub fn act_on_acting(&self) -> &MultilinearOp {
        &self.act_on_acting
    }

    /// `A∨` with its dual regular `A`-bimodule structure; the module over
    /// which the relative Rota-Baxter operators of the pair are taken.
    pub fn acting_dual(&self) -> &AInfBimodule {
        &self.induced.acting_dual
    }

    /// `B∨` with its dual regular `B`-bimodule structure.
    pub fn base_dual(&self) -> &AInfBimodule {
        &self.induced.base_dual
    }

    /// `(f ◁ a)(b) = f(a ▷ b)`: `B∨ ⊗ A → B∨`.
    pub fn base_dual_right_acting(&self) -> MultilinearOp {
        self.induced.base_dual_over_acting.m(0, 1).cloned().unwrap_or_else(|| {
            let bd = self.induced.base_dual_over_acting.module().clone();
            MultilinearOp::zero(vec![bd.clone(), self.acting.space().clone()], bd, 0)
        })
    }

    /// `(g ◀ b)(a) = g(b ▶ a)`: `A∨ ⊗ B → A∨`.
    pub fn acting_dual_right_base(&self) -> MultilinearOp {
        self.induced.acting_dual_over_base.m(0, 1).cloned().unwrap_or_else(|| {
            let ad = self.acting_dual_space();
            MultilinearOp::zero(vec![ad.clone(), self.base.space().clone()], ad, 0)
        })
    }

    pub fn acting_dual_space(&self) -> Space {
        self.induced.acting_dual.module().clone()
    }

    pub fn base_dual_space(&self) -> Space {
        self.induced.base_dual.module().clone()
    }

    /// `d_{B∨} f = (-1)^{1+|f|} f ∘ d_B`.
    pub fn base_dual_differential(&self) -> MultilinearOp {
        let bd = self.base_dual_space();
        self.induced
            .base_dual_over_acting
            .m(0, 0)
            .cloned()
            .unwrap_or_else(|| MultilinearOp::zero(vec![bd.clone()], bd, -1))
    }
}

fn bimodule_op(m: &AInfBimodule, p: usize, q: usize) -> MultilinearOp {
    m.m(p, q).cloned().unwrap_or_else(|| {
        let dom = crate::ainf::bimodule_domain(m.algebra().space(), m.module(), p, q);
        MultilinearOp::zero(dom, m.module().clone(), p as i64 + q as i64 - 1)
    })
}

fn combine(terms: &[(i64, MultilinearOp)]) -> Result<MultilinearOp> {
    let mut acc = terms[0].1.scale(&Scalar::zero());
    for (c, t) in terms {
        add_into(&mut acc, &Scalar::from_int(*c), t)?;
    }
    Ok(acc)
}

/// `x ∘_pos y` without extra sign.
fn ic(outer: &MultilinearOp, inner: &MultilinearOp, pos: usize) -> Result<MultilinearOp> {
    insert_compose(outer, inner, pos, 0)
}

/// Residuals of the dg-module axioms of a left action `act: R ⊗ M → M`.
fn left_module_residuals(
    report: &mut CheckReport,
    name: &str,
    ring: &AInfStructure,
    d_m: &MultilinearOp,
    act: &MultilinearOp,
) -> Result<()> {
    let (d_r, m_r) = (ring.m_or_zero(1), ring.m_or_zero(2));
    // (r₁ r₂) x = r₁ (r₂ x)
    let assoc = combine(&[(1, ic(act, &m_r, 0)?), (-1, ic(act, act, 1)?)])?;
    report.absorb(&format!("{name}-assoc"), &[3], &assoc);
    // d(r x) = (d r) x + (-1)^{|r|} r (d x)
    let leibniz = combine(&[(1, ic(d_m, act, 0)?), (-1, ic(act, &d_r, 0)?), (-1, ic(act, d_m, 1)?)])?;
    report.absorb(&format!("{name}-d"), &[2], &leibniz);
    Ok(())
}

/// Module axioms for `▷` and `▶` and the compatibility
/// `(b₁ ▶ a) ▷ b₂ = b₁ ∗ (a ▷ b₂)`, over all basis tuples. Stasheff
/// identities of both algebras are checked through arity 3.
pub fn check_interactive_pair(p: &InteractivePair) -> Result<CheckReport> {
    let mut report = CheckReport::new("interactive-pair", 3);
    let mut sa = check_stasheff(&p.acting, 3)?;
    sa.entries.iter_mut().for_each(|r| r.identity = "acting-stasheff".into());
    let mut sb = check_stasheff(&p.base, 3)?;
    sb.entries.iter_mut().for_each(|r| r.identity = "base-stasheff".into());
    report.merge(sa);
    report.merge(sb);
    left_module_residuals(&mut report, "act-on-base", &p.acting, &p.base.m_or_zero(1), &p.act_on_base)?;
    left_module_residuals(&mut report, "act-on-acting", &p.base, &p.acting.m_or_zero(1), &p.act_on_acting)?;
    let compat =
        combine(&[(1, ic(&p.act_on_base, &p.act_on_acting, 0)?), (-1, ic(&p.base.m_or_zero(2), &p.act_on_base, 1)?)])?;
    report.absorb("compatibility", &[3], &compat);
    report.truncated.clear();
    Ok(report)
}

/// `κ(b ⊗ f)(a) = (-1)^{|b|(|f|+|a|)} f(a ▷ b)`, as an operation
/// `B ⊗ B∨ → A∨` of degree 0.
pub fn build_kappa(p: &InteractivePair) -> Result<MultilinearOp> {
    let (a, b) = (p.acting.space(), p.base.space());
    let (ad, bd) = (p.acting_dual_space(), p.base_dual_space());
    let mut kappa = MultilinearOp::zero(vec![b.clone(), bd.clone()], ad, 0);
    for (key, val) in p.act_on_base.table() {
        let (x, y) = (key[0], key[1]);
        for (&out, c) in val {
            // f = out^, evaluated on x ▷ y
            let e = b.degree(y) * (bd.degree(out) + a.degree(x));
            kappa.add_entry(&[y, out], x, c.clone().signed(e))?;
        }
    }
    Ok(kappa)
}

/// The four identities making `κ` a dg `A`-bimodule map and a right
/// `B`-module map.
pub fn check_kappa(p: &InteractivePair, kappa: &MultilinearOp) -> Result<CheckReport> {
    let mut report = CheckReport::new("kappa", 3);
    let ad = &p.induced.acting_dual;
    // κ((a ▷ b) ⊗ f) = a ▷ κ(b ⊗ f)
    let left = combine(&[(1, ic(kappa, &p.act_on_base, 0)?), (-1, ic(&bimodule_op(ad, 1, 0), kappa, 1)?)])?;
    report.absorb("kappa-left-acting", &[3], &left);
    // κ(b ⊗ (f ◁ a)) = κ(b ⊗ f) ◁ a
    let right =
        combine(&[(1, ic(kappa, &p.base_dual_right_acting(), 1)?), (-1, ic(&bimodule_op(ad, 0, 1), kappa, 0)?)])?;
    report.absorb("kappa-right-acting", &[3], &right);
    // d κ(b ⊗ f) = κ(d b ⊗ f) + (-1)^{|b|} κ(b ⊗ d f)
    let d = combine(&[
        (1, ic(&bimodule_op(ad, 0, 0), kappa, 0)?),
        (-1, ic(kappa, &p.base.m_or_zero(1), 0)?),
        (-1, ic(kappa, &p.base_dual_differential(), 1)?),
    ])?;
    report.absorb("kappa-d", &[2], &d);
    // κ(b₁ ⊗ f ◀ b₂) = κ(b₁ ⊗ f) ◀ b₂
    let rb = combine(&[
        (1, ic(kappa, &bimodule_op(&p.induced.base_dual, 0, 1), 1)?),
        (-1, ic(&p.acting_dual_right_base(), kappa, 0)?),
    ])?;
    report.absorb("kappa-right-base", &[3], &rb);
    Ok(report)
}

fn check_t_signature(p: &InteractivePair, t: &MultilinearOp) -> Result<usize> {
    let n = t.arity();
    if n == 0 {
        return Err(Error::Argument("T_n needs at least one input".into()));
    }
    check_signature(t, &vec![p.acting_dual_space(); n], p.acting.space(), &format!("T_{n}"))?;
    Ok(n)
}

/// `T(f) ▷ (b₁ ∗ b₂) - T(f ◀ b₁) ▷ b₂ - (T(f) ▷ b₁) ∗ b₂` on
/// `(A∨)^{⊗n} ⊗ B ⊗ B → B`, the `◀` acting on the last tensor factor.
pub fn derivation_residual(p: &InteractivePair, t: &MultilinearOp) -> Result<MultilinearOp> {
    let n = check_t_signature(p, t)?;
    let act = &p.act_on_base;
    let prod = p.base.m_or_zero(2);
    let lhs = ic(&ic(act, &prod, 1)?, t, 0)?;
    let second = ic(act, &ic(t, &p.acting_dual_right_base(), n - 1)?, 0)?;
    let third = ic(&ic(&prod, act, 0)?, t, 0)?;
    combine(&[(1, lhs), (-1, second), (-1, third)])
}

/// Residual ledger of the `n`-derivation identity over all basis tuples.
pub fn check_n_derivation(p: &InteractivePair, t: &MultilinearOp) -> Result<CheckReport> {
    let n = t.arity();
    let r = derivation_residual(p, t)?;
    let mut report = CheckReport::new("n-derivation", n);
    report.absorb("n-derivation", &[n as i64], &r);
    Ok(report)
}

/// The first-component identity, inputs `(b₁, b₂, g, f_1, …, f_{n-1})`:
/// `T(κ(b₁∗b₂ ⊗ g), f…) - (-1)^{|T||b₁|} b₁ ▶ T(κ(b₂ ⊗ g), f…) - T(κ(b₁ ⊗ b₂ ▶ g), f…)`.
pub fn strong_first_residual(p: &InteractivePair, t: &MultilinearOp, kappa: &MultilinearOp) -> Result<MultilinearOp> {
    check_t_signature(p, t)?;
    let prod = p.base.m_or_zero(2);
    let left_g = bimodule_op(&p.induced.base_dual, 1, 0);
    let lhs = ic(t, &ic(kappa, &prod, 0)?, 0)?;
    let second = ic(&p.act_on_acting, &ic(t, kappa, 0)?, 1)?;
    let third = ic(t, &ic(kappa, &left_g, 1)?, 0)?;
    combine(&[(1, lhs), (-1, second), (-1, third)])
}

/// The slot-`l` identity (`1 < l ≤ n`), inputs
/// `(f_1, …, f_{l-1}, b₁, b₂, g, f_l, …, f_{n-1})`:
/// `T(…, κ(b₁∗b₂ ⊗ g), …) - T(…, f_{l-1} ◀ b₁, κ(b₂ ⊗ g), …) - T(…, κ(b₁ ⊗ b₂ ▶ g), …)`.
pub fn strong_slot_residual(
    p: &InteractivePair,
    t: &MultilinearOp,
    kappa: &MultilinearOp,
    l: usize,
) -> Result<MultilinearOp> {
    let n = check_t_signature(p, t)?;
    if l < 2 || l > n {
        return Err(Error::Argument(format!("slot {l} outside 2..={n}")));
    }
    let prod = p.base.m_or_zero(2);
    let left_g = bimodule_op(&p.induced.base_dual, 1, 0);
    let lhs = ic(t, &ic(kappa, &prod, 0)?, l - 1)?;
    let second = ic(&ic(t, &p.acting_dual_right_base(), l - 2)?, kappa, l)?;
    let third = ic(t, &ic(kappa, &left_g, 1)?, l - 1)?;
    combine(&[(1, lhs), (-1, second), (-1, third)])
}

/// Residual ledger of the strong `n`-derivation conditions: the `n`-derivation
/// identity, the first-component identity and every slot identity `1 < l ≤ n`.
pub fn check_strong_n_derivation(p: &InteractivePair, t: &MultilinearOp) -> Result<CheckReport> {
    let n = t.arity();
    let kappa = build_kappa(p)?;
    let mut report = check_n_derivation(p, t)?;
    report.check = "strong-n-derivation".into();
    let first = strong_first_residual(p, t, &kappa)?;
    report.absorb("strong-first", &[n as i64], &first);
    let slots = (2..=n).into_par_iter().map(|l| strong_slot_residual(p, t, &kappa, l)).collect::<Result<Vec<_>>>()?;
    for (l, r) in (2..=n).zip(&slots) {
        report.absorb("strong-slot", &[n as i64, l as i64], r);
    }
    Ok(report)
}

/// An element of `A^{⊗n} ⊗ B`, keyed by `([a_n, …, a_1], b)`.
pub type TensorElement = BTreeMap<(Vec<usize>, usize), Scalar>;

fn add_term(x: &mut TensorElement, key: (Vec<usize>, usize), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = x.entry(key.clone()).or_insert_with(Scalar::zero);
    *slot += c;
    if slot.is_zero() {
        x.remove(&key);
    }
}

/// Exponent of `ι` on the basis element `a_n ⊗ … ⊗ a_1 ⊗ b` evaluated on the
/// dual basis tuple `f_j = a_j^`: `(Σ|f_j|)|b| + Σ|f_j||a_j|`.
fn iota_exponent(a: &Space, rev_a: &[usize], b_deg: i64) -> i64 {
    let fd: Vec<i64> = rev_a.iter().rev().map(|&i| -a.degree(i)).collect();
    let sf: i64 = fd.iter().sum();
    let pair: i64 = fd.iter().zip(rev_a.iter().rev()).map(|(f, &i)| f * a.degree(i)).sum();
    sf * b_deg + pair
}

/// `ι: A^{⊗n} ⊗ B → Hom((A∨)^{⊗n}, B)`,
/// `ι(a_n ⊗ … ⊗ a_1 ⊗ b)(f_1, …, f_n) = (-1)^{(Σ|f_j|)|b| + Σ|f_j||a_j|} f_1(a_1)⋯f_n(a_n) b`.
pub fn iota(p: &InteractivePair, n: usize, x: &TensorElement) -> Result<MultilinearOp> {
    let a = p.acting.space();
    let b = p.base.space();
    let ad = p.acting_dual_space();
    let mut degree = None;
    for (rev_a, y) in x.keys() {
        if rev_a.len() != n {
            return Err(Error::Argument(format!("tensor of length {} for n = {n}", rev_a.len())));
        }
        let d = rev_a.iter().map(|&i| a.degree(i)).sum::<i64>() + b.degree(*y);
        if *degree.get_or_insert(d) != d {
            return Err(Error::Argument("ι of an inhomogeneous element".into()));
        }
    }
    let mut q = MultilinearOp::zero(vec![ad; n], b.clone(), degree.unwrap_or(0));
    for ((rev_a, y), c) in x {
        let fs: Vec<usize> = rev_a.iter().rev().copied().collect();
        let e = iota_exponent(a, rev_a, b.degree(*y));
        q.add_entry(&fs, *y, c.clone().signed(e))?;
    }
    Ok(q)
}

/// Inverse of [`iota`]; exact because `A` is finite-dimensional.
pub fn iota_inverse(p: &InteractivePair, q: &MultilinearOp) -> Result<TensorElement> {
    let a = p.acting.space();
    let b = p.base.space();
    check_signature(q, &vec![p.acting_dual_space(); q.arity()], b, "Hom((A∨)^n, B)")?;
    let mut x = TensorElement::new();
    for (fs, val) in q.table() {
        let rev_a: Vec<usize> = fs.iter().rev().copied().collect();
        for (&y, c) in val {
            let e = iota_exponent(a, &rev_a, b.degree(y));
            add_term(&mut x, (rev_a.clone(), y), c.clone().signed(e));
        }
    }
    Ok(x)
}

/// `f ↦ T(f) ▷ b` as an element of `Hom((A∨)^{⊗n}, B)`.
fn evaluate_at(p: &InteractivePair, t: &MultilinearOp, b: usize) -> Result<MultilinearOp> {
    let bsp = p.base.space();
    let mut q = MultilinearOp::zero(t.domain().to_vec(), bsp.clone(), t.degree() + bsp.degree(b));
    for (fs, val) in t.table() {
        for (&a, c) in val {
            for (&y, c2) in &p.act_on_base.get(&[a, b]) {
                q.add_entry(fs, y, c * c2)?;
            }
        }
    }
    Ok(q)
}

/// The derivation defect of `b ↦ ι^{-1}(T(-) ▷ b)`, a map `B → A^{⊗n} ⊗ B`,
/// on every basis pair: `D(b₁∗b₂) - (-1)^{|b₁||T|} b₁ ▶ D(b₂) - D(b₁) ∗ b₂`.
/// `B` acts on the left of `A^{⊗n} ⊗ B` through `▶` on the leftmost factor
/// and on the right through `∗` on the last factor.
pub fn derivation_defect_via_iota(
    p: &InteractivePair,
    t: &MultilinearOp,
) -> Result<BTreeMap<(usize, usize), TensorElement>> {
    check_t_signature(p, t)?;
    let bsp = p.base.space();
    let prod = p.base.m_or_zero(2);
    let d: Vec<TensorElement> =
        (0..bsp.dim()).map(|b| iota_inverse(p, &evaluate_at(p, t, b)?)).collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for b1 in 0..bsp.dim() {
        for b2 in 0..bsp.dim() {
            let mut x = TensorElement::new();
            for (&y, c) in &prod.get(&[b1, b2]) {
                for (k, v) in &d[y] {
                    add_term(&mut x, k.clone(), c * v);
                }
            }
            let e = bsp.degree(b1) * t.degree();
            for ((rev_a, y), v) in &d[b2] {
                for (&a2, c) in &p.act_on_acting.get(&[b1, rev_a[0]]) {
                    let mut k = rev_a.clone();
                    k[0] = a2;
                    add_term(&mut x, (k, *y), -(c * v).signed(e));
                }
            }
            for ((rev_a, y), v) in &d[b1] {
                for (&z, c) in &prod.get(&[*y, b2]) {
                    add_term(&mut x, (rev_a.clone(), z), -(c * v));
                }
            }
            if !x.is_empty() {
                out.insert((b1, b2), x);
            }
        }
    }
    Ok(out)
}
