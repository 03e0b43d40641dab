#![allow(dead_code)]

use homalg::ainf::{AInfBimodule, AInfStructure};
use homalg::kernel::linalg::solve;
use homalg::kernel::space::{all_tuples, GradedSpace, Space};
use homalg::kernel::Scalar;
use homalg::multiop::{FamilyKind, MultilinearOp, OpFamily};
use homalg::rb::{rb_residual, RbFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dual_numbers() -> AInfStructure {
    let a = GradedSpace::from_pairs("A", &[("1", 0), ("x", 0)]).unwrap();
    let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
    m.entry(&["1", "1"], "1", 1).unwrap();
    m.entry(&["1", "x"], "x", 1).unwrap();
    m.entry(&["x", "1"], "x", 1).unwrap();
    AInfStructure::dg(a, None, Some(m)).unwrap()
}

/// `Λ(ξ) ⊗ ℚ[t]/(t²)`, `|ξ| = 1`, `|t| = 0`, `dξ = t`.
pub fn koszul_dg() -> AInfStructure {
    let a = GradedSpace::from_pairs("K", &[("1", 0), ("t", 0), ("ξ", 1), ("ξt", 1)]).unwrap();
    let mut d = MultilinearOp::zero(vec![a.clone()], a.clone(), -1);
    d.entry(&["ξ"], "t", 1).unwrap();
    let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
    for x in ["1", "t", "ξ", "ξt"] {
        m.entry(&["1", x], x, 1).unwrap();
        if x != "1" {
            m.entry(&[x, "1"], x, 1).unwrap();
        }
    }
    m.entry(&["t", "ξ"], "ξt", 1).unwrap();
    m.entry(&["ξ", "t"], "ξt", 1).unwrap();
    AInfStructure::dg(a, Some(d), Some(m)).unwrap()
}

/// Every homogeneous `(key, output)` slot of an operation.
pub fn slots(domain: &[Space], codomain: &Space, degree: i64) -> Vec<(Vec<usize>, usize)> {
    let dims: Vec<usize> = domain.iter().map(|s| s.dim()).collect();
    let mut out = Vec::new();
    for key in all_tuples(&dims) {
        let din: i64 = key.iter().zip(domain).map(|(&i, s)| s.degree(i)).sum();
        for o in 0..codomain.dim() {
            if codomain.degree(o) == din + degree {
                out.push((key.clone(), o));
            }
        }
    }
    out
}

pub fn random_op(
    rng: &mut ChaCha8Rng,
    domain: Vec<Space>,
    codomain: Space,
    degree: i64,
    density: f64,
) -> MultilinearOp {
    let mut op = MultilinearOp::zero(domain.clone(), codomain.clone(), degree);
    for (k, o) in slots(&domain, &codomain, degree) {
        if rng.gen_bool(density) {
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                op.add_entry(&k, o, Scalar::from_int(c)).unwrap();
            }
        }
    }
    op
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random relative family `T_1 … T_top` on `M`.
pub fn random_family(rng: &mut ChaCha8Rng, m: &AInfBimodule, top: usize, relative: bool) -> RbFamily {
    let kind = if relative { FamilyKind::RbRelative } else { FamilyKind::RbAbsolute };
    let mut fam = OpFamily::new(kind);
    let src = m.module().clone();
    for n in 1..=top {
        let op = random_op(rng, vec![src.clone(); n], m.algebra().space().clone(), n as i64 - 1, 0.5);
        fam.insert(n, op).unwrap();
    }
    if relative {
        RbFamily::relative(m.clone(), fam).unwrap()
    } else {
        RbFamily::absolute(m.algebra().clone(), fam).unwrap()
    }
}

/// Given `T_1 … T_{n-1}`, find `T_n` with vanishing arity-`n` residual: the
/// residual is affine in `T_n` (it enters through `m_1` only).
pub fn solve_component(r: &RbFamily, n: usize) -> Option<MultilinearOp> {
    let src = r.source().clone();
    let tgt = r.base().space().clone();
    let with = |tn: MultilinearOp| {
        let mut fam = r.family().clone();
        fam.insert(n, tn).unwrap();
        rebuild(r, fam)
    };
    let zero = MultilinearOp::zero(vec![src.clone(); n], tgt.clone(), n as i64 - 1);
    let base_res = rb_residual(&with(zero.clone()), n).unwrap();
    let unknowns = slots(&vec![src.clone(); n], &tgt, n as i64 - 1);
    let rows = slots(&vec![src.clone(); n], &tgt, n as i64 - 2);
    let row_of = |k: &Vec<usize>, o: usize| rows.iter().position(|(rk, ro)| rk == k && *ro == o).unwrap();
    let mut mat = vec![vec![Scalar::zero(); unknowns.len()]; rows.len()];
    for (c, (k, o)) in unknowns.iter().enumerate() {
        let mut e = zero.clone();
        e.add_entry(k, *o, Scalar::one()).unwrap();
        let res = rb_residual(&with(e), n).unwrap();
        for (rk, v) in res.table() {
            for (&ro, x) in v {
                let b = base_res.coeff(rk, ro);
                mat[row_of(rk, ro)][c] = x.clone() - b;
            }
        }
        for (rk, v) in base_res.table() {
            for (&ro, b) in v {
                if res.coeff(rk, ro).is_zero() {
                    mat[row_of(rk, ro)][c] = -b.clone();
                }
            }
        }
    }
    let mut rhs = vec![Scalar::zero(); rows.len()];
    for (rk, v) in base_res.table() {
        for (&ro, b) in v {
            rhs[row_of(rk, ro)] = -b.clone();
        }
    }
    let sol = solve(&mat, &rhs)?;
    let mut tn = zero;
    for ((k, o), c) in unknowns.iter().zip(sol) {
        if !c.is_zero() {
            tn.add_entry(k, *o, c).unwrap();
        }
    }
    Some(tn)
}

pub fn rebuild(r: &RbFamily, fam: OpFamily<usize>) -> RbFamily {
    match r.module() {
        Some(m) => RbFamily::relative(m.clone(), fam).unwrap(),
        None => RbFamily::absolute(r.base().clone(), fam).unwrap(),
    }
}

/// `M_2(ℚ)` on matrix units `e11, e12, e21, e22`, degree 0.
pub fn matrices() -> AInfStructure {
    let names = ["e11", "e12", "e21", "e22"];
    let a = GradedSpace::from_pairs("M2", &names.map(|n| (n, 0))).unwrap();
    let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
    for i in 1..=2 {
        for j in 1..=2 {
            for k in 1..=2 {
                let l = format!("e{i}{j}");
                let r = format!("e{j}{k}");
                let o = format!("e{i}{k}");
                m.entry(&[&l, &r], &o, 1).unwrap();
            }
        }
    }
    AInfStructure::dg(a, None, Some(m)).unwrap()
}

/// The absolute family on [`koszul_dg`] found by solving for `T_2` over a
/// `T_1` that is not itself Rota-Baxter.
pub fn koszul_family() -> RbFamily {
    let a = koszul_dg();
    let sp = a.space().clone();
    let mut t1 = MultilinearOp::zero(vec![sp.clone()], sp.clone(), 0);
    t1.entry(&["t"], "t", 1).unwrap();
    t1.entry(&["ξ"], "ξ", 1).unwrap();
    let mut t2 = MultilinearOp::zero(vec![sp.clone(); 2], sp.clone(), 1);
    t2.entry(&["1", "t"], "ξ", 1).unwrap();
    t2.entry(&["t", "1"], "ξ", 1).unwrap();
    t2.entry(&["t", "t"], "ξt", -1).unwrap();
    let mut fam = OpFamily::new(FamilyKind::RbAbsolute);
    fam.insert(1, t1).unwrap();
    fam.insert(2, t2).unwrap();
    RbFamily::absolute(a, fam).unwrap()
}

/// Nonzero `T_1: M_2(ℚ)∨ → M_2(ℚ)`, antisymmetric for the natural pairing
/// with entries in {-1, 0, 1}, that satisfy the relative Rota-Baxter identity.
pub fn m2_cyclic_relative() -> Vec<RbFamily> {
    use homalg::rb::check_homotopy_rb_relative;
    let a = matrices();
    let dual = AInfBimodule::regular(&a).dual().unwrap();
    let src = dual.module().clone();
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(6) {
        let mut c = code;
        let mut t = MultilinearOp::zero(vec![src.clone()], a.space().clone(), 0);
        for &(i, j) in &pairs {
            let v = (c % 3) as i64 - 1;
            c /= 3;
            if v != 0 {
                t.add_entry(&[i], j, Scalar::from_int(v)).unwrap();
                t.add_entry(&[j], i, Scalar::from_int(-v)).unwrap();
            }
        }
        if t.is_zero() {
            continue;
        }
        let mut fam = OpFamily::new(FamilyKind::RbRelative);
        fam.insert(1, t).unwrap();
        let r = RbFamily::relative(dual.clone(), fam).unwrap();
        if check_homotopy_rb_relative(&r, 2).unwrap().passed() {
            out.push(r);
        }
    }
    out
}

/// Nullspace of a checker that is linear and homogeneous in one operation:
/// every residual entry is a linear form in the coefficients of `op` on the
/// given slots, so probing with unit operations yields the constraint matrix.
pub fn linear_solutions<F>(zero: &MultilinearOp, unknowns: &[(Vec<usize>, usize)], check: F) -> Vec<MultilinearOp>
where
    F: Fn(&MultilinearOp) -> homalg::multiop::CheckReport,
{
    use std::collections::BTreeMap;
    let mut rows: BTreeMap<String, Vec<Scalar>> = BTreeMap::new();
    for (c, (k, o)) in unknowns.iter().enumerate() {
        let mut e = zero.clone();
        e.add_entry(k, *o, Scalar::one()).unwrap();
        for r in check(&e).entries {
            let key = format!("{}{:?}{:?}{}", r.identity, r.indices, r.inputs, r.output);
            let row = rows.entry(key).or_insert_with(|| vec![Scalar::zero(); unknowns.len()]);
            row[c] += r.value;
        }
    }
    let mat: Vec<Vec<Scalar>> = rows.into_values().collect();
    homalg::kernel::linalg::nullspace(&mat, unknowns.len())
        .into_iter()
        .map(|v| {
            let mut op = zero.clone();
            for ((k, o), c) in unknowns.iter().zip(v) {
                if !c.is_zero() {
                    op.add_entry(k, *o, c).unwrap();
                }
            }
            op
        })
        .collect()
}

/// All `Σ c_i v_i` with `c_i ∈ {-1, 0, 1}`, skipping the zero combination.
pub fn small_combinations(basis: &[MultilinearOp]) -> Vec<MultilinearOp> {
    let mut out = Vec::new();
    if basis.is_empty() {
        return out;
    }
    for code in 0..3usize.pow(basis.len() as u32) {
        let mut c = code;
        let mut acc = basis[0].scale(&Scalar::zero());
        for b in basis {
            let v = (c % 3) as i64 - 1;
            c /= 3;
            if v != 0 {
                homalg::multiop::add_into(&mut acc, &Scalar::from_int(v), b).unwrap();
            }
        }
        if !acc.is_zero() {
            out.push(acc);
        }
    }
    out
}

pub fn single_family(p: &homalg::pair::InteractivePair, ops: &[(usize, &MultilinearOp)]) -> RbFamily {
    let mut fam = OpFamily::new(FamilyKind::RbRelative);
    for (n, t) in ops {
        fam.insert(*n, (*t).clone()).unwrap();
    }
    RbFamily::dg_relative(p.acting_dual().clone(), fam).unwrap()
}

/// `T_n` alone on an interactive pair: solve the linear constraints
/// (cyclicity, strong `n`-derivation, the arity-`n` Rota-Baxter identity,
/// which is linear in `T_n` when it is the only component), then keep the
/// `{-1, 0, 1}`-combinations of the solution basis that satisfy the
/// quadratic identities.
pub fn pair_candidates(p: &homalg::pair::InteractivePair, n: usize) -> Vec<RbFamily> {
    use homalg::pair::check_strong_n_derivation;
    use homalg::rb::{check_cyclic_rb, check_dg_relative_rb, dg_relative_residual};
    let ad = p.acting_dual_space();
    let a = p.acting().space().clone();
    let deg = n as i64 - 1;
    let zero = MultilinearOp::zero(vec![ad.clone(); n], a.clone(), deg);
    let unknowns = slots(&vec![ad; n], &a, deg);
    let basis = linear_solutions(&zero, &unknowns, |t| {
        let r = single_family(p, &[(n, t)]);
        let mut rep = check_cyclic_rb(&r, None, n).unwrap();
        rep.merge(check_strong_n_derivation(p, t).unwrap());
        rep.absorb("rb-linear", &[n as i64], &dg_relative_residual(&r, n).unwrap());
        rep
    });
    small_combinations(&basis)
        .into_iter()
        .map(|t| single_family(p, &[(n, &t)]))
        .filter(|r| check_dg_relative_rb(r, 2 * n).unwrap().passed())
        .collect()
}

/// `B = ⟨u, v⟩`, `|u| = 1`, `|v| = 0`, `d u = v`, zero product.
pub fn small_complex() -> AInfStructure {
    let b = GradedSpace::from_pairs("W", &[("u", 1), ("v", 0)]).unwrap();
    let mut d = MultilinearOp::zero(vec![b.clone()], b.clone(), -1);
    d.entry(&["u"], "v", 1).unwrap();
    AInfStructure::dg(b, Some(d), None).unwrap()
}

/// A two-dimensional graded space with zero product and differential.
pub fn graded_line(d0: i64, d1: i64) -> AInfStructure {
    AInfStructure::zero(GradedSpace::from_pairs("V", &[("u", d0), ("v", d1)]).unwrap())
}

/// On `(End(W), W)` for [`small_complex`]: the cyclic `T_1` compatible with
/// the differentials is not Rota-Baxter by itself; the arity-2 identity is
/// affine in `T_2` and has a cyclic solution completing it.
pub fn small_complex_family(p: &homalg::pair::InteractivePair) -> RbFamily {
    let r_of = |pairs: &[(usize, &str, &str, i64)]| {
        let ad = p.acting_dual_space();
        let a = p.acting().space().clone();
        let mut t1 = MultilinearOp::zero(vec![ad.clone()], a.clone(), 0);
        let mut t2 = MultilinearOp::zero(vec![ad.clone(); 2], a, 1);
        for &(n, ins, out, c) in pairs {
            let ins: Vec<&str> = ins.split(' ').collect();
            if n == 1 {
                t1.entry(&ins, out, c).unwrap();
            } else {
                t2.entry(&ins, out, c).unwrap();
            }
        }
        single_family(p, &[(1, &t1), (2, &t2)])
    };
    r_of(&[
        (1, "E11^", "E22", -1),
        (1, "E12^", "E21", -1),
        (1, "E21^", "E12", -1),
        (1, "E22^", "E11", 1),
        (2, "E11^ E22^", "E12", -1),
        (2, "E12^ E11^", "E22", 1),
        (2, "E22^ E12^", "E11", 1),
    ])
}
