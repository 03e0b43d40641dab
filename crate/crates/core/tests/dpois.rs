mod common;

use common::*;
use homalg::ainf::AInfStructure;
use homalg::dpois::*;
use homalg::error::Error;
use homalg::kernel::space::GradedSpace;
use homalg::kernel::Scalar;
use homalg::multiop::{CheckReport, MultilinearOp, Verdict};
use homalg::pair::InteractivePair;
use homalg::precy::build_precy_from_pair;
use homalg::rb::RbFamily;

fn end_pair(b: &AInfStructure) -> InteractivePair {
    InteractivePair::endomorphisms(b).unwrap()
}

/// Pairs with Rota-Baxter families on them: the dual-numbers `T_1`
/// solutions, the arity-two graded ones, and a `T_1 + T_2` family over a
/// nonzero differential.
fn instances() -> Vec<(String, InteractivePair, RbFamily)> {
    let mut out = Vec::new();
    let p = end_pair(&dual_numbers());
    for (i, r) in pair_candidates(&p, 1).into_iter().enumerate() {
        out.push((format!("dual numbers #{i}"), p.clone(), r));
    }
    let p = end_pair(&graded_line(0, 1));
    for (i, r) in pair_candidates(&p, 2).into_iter().take(3).enumerate() {
        out.push((format!("graded line #{i}"), p.clone(), r));
    }
    let p = end_pair(&small_complex());
    let r = small_complex_family(&p);
    out.push(("small complex".into(), p, r));
    out
}

fn assert_pass(r: &CheckReport, what: &str) {
    assert!(r.passed(), "{what}: {r}");
}

#[test]
fn psi_agrees_with_the_precy_extraction() {
    for (name, p, r) in instances() {
        let psi = build_brackets_psi(&p, &r, 4).unwrap();
        let s = build_precy_from_pair(&p, &r, 3).unwrap();
        let ext = extract_brackets_from_precy(&s, 4).unwrap();
        for n in 1..=4 {
            let zero = DoubleBracketFamily::blank(psi.space(), n).unwrap();
            let a = psi.bracket(n).unwrap_or(&zero);
            let b = ext.bracket(n).unwrap_or(&zero).scale(&Scalar::sign(n as i64 - 1));
            assert_eq!(a.table(), b.table(), "{name}, arity {n}");
        }
        assert!(psi.max_arity() >= 2, "{name}: nothing beyond the differential");
    }
}

#[test]
fn zero_family_gives_only_the_negated_differential() {
    for b in [dual_numbers(), small_complex()] {
        let p = end_pair(&b);
        let t = MultilinearOp::zero(vec![p.acting_dual_space()], p.acting().space().clone(), 0);
        let r = single_family(&p, &[(1, &t)]);
        let psi = build_brackets_psi(&p, &r, 3).unwrap();
        let s = build_precy_from_pair(&p, &r, 1).unwrap();
        let ext = extract_brackets_from_precy(&s, 3).unwrap();
        for f in [&psi, &ext] {
            assert!(f.max_arity() <= 1);
            let d = b.m_or_zero(1).scale(&-Scalar::one());
            let got = f.bracket(1).map(|m| m.table().clone()).unwrap_or_default();
            assert_eq!(got, d.table().clone());
        }
    }
}

#[test]
fn classical_bracket_is_the_basis_expansion() {
    // ⟦a, b⟧ = Σ_i e^i(a) ⊗ T(e_i)(b): for the dual numbers every degree is
    // 0 and the sum runs over the acting basis with the dual pairing
    let p = end_pair(&dual_numbers());
    for r in pair_candidates(&p, 1) {
        let psi = build_brackets_psi(&p, &r, 2).unwrap();
        let t = r.t(1).unwrap();
        let act = p.act_on_base();
        let dim_a = p.acting().space().dim();
        let mut want = DoubleBracketFamily::blank(psi.space(), 2).unwrap();
        for i in 0..dim_a {
            for (&ti, c) in &t.get(&[i]) {
                for a in 0..2 {
                    for b in 0..2 {
                        for (&x, c1) in &act.get(&[i, a]) {
                            for (&y, c2) in &act.get(&[ti, b]) {
                                want.add_entry(&[a, b], x * 2 + y, c * &(c1 * c2)).unwrap();
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(psi.bracket(2).unwrap().table(), want.table());
        assert!(psi.max_arity() == 2);
    }
}

#[test]
fn psi_brackets_are_cyclic_homotopy_double_poisson() {
    for (name, p, r) in instances() {
        let f = build_brackets_psi(&p, &r, 4).unwrap();
        assert_pass(&check_cyclic_symmetry(&f, 4).unwrap(), &name);
        assert_pass(&check_double_jacobi(&f, 4).unwrap(), &name);
        assert_pass(&check_double_leibniz(&f, 3).unwrap(), &name);
        assert_pass(&check_opposite_form(&f, 4).unwrap(), &name);
    }
}

#[test]
fn psi_refuses_non_rota_baxter_families() {
    let p = end_pair(&dual_numbers());
    let mut t = MultilinearOp::zero(vec![p.acting_dual_space()], p.acting().space().clone(), 0);
    for x in ["E11", "E12", "E21", "E22"] {
        t.entry(&[&format!("{x}^")], x, 1).unwrap();
    }
    let r = single_family(&p, &[(1, &t)]);
    assert!(matches!(build_brackets_psi(&p, &r, 2), Err(Error::Precondition(_))));
}

fn aguiar() -> (InteractivePair, TensorFamily) {
    let p = end_pair(&graded_line(0, 0));
    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
    r.insert_labels(2, &[(&["E11", "E12"], 1), (&["E12", "E11"], -1)]).unwrap();
    (p, r)
}

#[test]
fn aguiar_solution_satisfies_aybe() {
    let (p, r) = aguiar();
    assert_eq!(r.unit().len(), 2);
    let rep = check_aybe_infinity(&r, 4).unwrap();
    assert_eq!(rep.verdict(), Verdict::Pass, "{rep}");
    assert_pass(&check_tensor_skew(&r, 4).unwrap(), "skew");
    let f = schedler_correspondence(&r, p.act_on_base()).unwrap();
    assert_pass(&check_skew_symmetry(&f, 4).unwrap(), "bracket skew");
    assert_pass(&check_double_jacobi(&f, 4).unwrap(), "bracket jacobi");
    let back = schedler_inverse(&f, p.acting(), p.act_on_base()).unwrap();
    assert_eq!(back.elements(), r.elements());
}

#[test]
fn aybe_fails_off_solutions() {
    let p = end_pair(&graded_line(0, 0));
    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
    r.insert_labels(2, &[(&["E12", "E21"], 1), (&["E21", "E12"], -1)]).unwrap();
    let rep = check_aybe_infinity(&r, 3).unwrap();
    assert!(!rep.passed());
    assert!(rep.entries.iter().all(|e| e.indices == vec![3]));
}

#[test]
fn aybe_residual_maps_to_the_jacobi_residual() {
    // through End(V)^{⊗n} ≅ End(V^{⊗n}) the two residuals agree up to one
    // global sign per arity
    let p = end_pair(&graded_line(0, 0));
    let a = p.acting().space().clone();
    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
    let labels: Vec<String> = (0..a.dim()).map(|i| a.label(i).to_string()).collect();
    let even: Vec<&str> = labels.iter().filter(|l| a.degree(a.index_of(l).unwrap()) == 0).map(|s| s.as_str()).collect();
    r.insert_labels(
        2,
        &[(&[even[0], even[1]], 1), (&[even[1], even[0]], -1), (&[even[2], even[3]], 1), (&[even[3], even[2]], -1)],
    )
    .unwrap();
    let f = schedler_correspondence(&r, p.act_on_base()).unwrap();
    let res = aybe_residual(&r, 3).unwrap();
    assert!(!res.is_empty());
    let as_bracket = tensor_image(&res, 3, p.act_on_base()).unwrap();
    let dj = double_jacobi_residual(&f, 3).unwrap();
    let neg = as_bracket.scale(&-Scalar::one());
    assert!(dj.table() == as_bracket.table() || dj.table() == neg.table(), "residuals differ beyond a sign");
}

#[test]
fn nilpotent_r1_gives_a_differential() {
    let p = end_pair(&graded_line(0, -1));
    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
    r.insert_labels(1, &[(&["E21"], 1)]).unwrap();
    assert_pass(&check_aybe_infinity(&r, 1).unwrap(), "r1² = 0");
    let f = schedler_correspondence(&r, p.act_on_base()).unwrap();
    assert_pass(&check_double_jacobi(&f, 1).unwrap(), "d² = 0");
    let d = f.bracket(1).unwrap();
    assert_eq!(d.coeff(&[0], 1), Scalar::one());
}

#[test]
fn non_skew_elements_are_refused() {
    let p = end_pair(&graded_line(0, 0));
    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
    r.insert_labels(2, &[(&["E11", "E12"], 1)]).unwrap();
    assert!(!check_tensor_skew(&r, 2).unwrap().passed());
    assert!(matches!(schedler_correspondence(&r, p.act_on_base()), Err(Error::Precondition(_))));
}

#[test]
fn two_dimensional_lie_algebra() {
    let l = GradedSpace::from_pairs("L", &[("x", 0), ("y", 0)]).unwrap();
    let mut l2 = MultilinearOp::zero(vec![l.clone(), l.clone()], l.clone(), 0);
    l2.entry(&["x", "y"], "y", 1).unwrap();
    l2.entry(&["y", "x"], "y", -1).unwrap();
    let f = LInfFamily::new(l.clone(), vec![(2, l2.clone())]).unwrap();
    assert_eq!(check_linf(&f, 3).unwrap().verdict(), Verdict::Pass);
    // breaking skew-symmetry is located
    let mut bad = l2.clone();
    bad.entry(&["y", "x"], "y", 1).unwrap();
    let r = check_linf(&LInfFamily::new(l, vec![(2, bad)]).unwrap(), 3).unwrap();
    assert_eq!(r.first().unwrap().identity, "linf-skew");
}

#[test]
fn differential_must_square_to_zero() {
    let l = GradedSpace::from_pairs("L", &[("a", 1), ("b", 0), ("c", -1)]).unwrap();
    let mut l1 = MultilinearOp::zero(vec![l.clone()], l.clone(), -1);
    l1.entry(&["a"], "b", 1).unwrap();
    let ok = LInfFamily::new(l.clone(), vec![(1, l1.clone())]).unwrap();
    assert!(check_linf(&ok, 2).unwrap().passed());
    l1.entry(&["b"], "c", 1).unwrap();
    let bad = LInfFamily::new(l, vec![(1, l1)]).unwrap();
    let r = check_linf(&bad, 2).unwrap();
    let e = r.first().unwrap();
    assert_eq!((e.identity.as_str(), e.inputs.clone(), e.output.as_str()), ("linf-jacobi", vec!["a".to_string()], "c"));
}

#[test]
fn symmetric_algebra_poisson() {
    let (p, r) = aguiar();
    let f = schedler_correspondence(&r, p.act_on_base()).unwrap();
    let l = build_sym_poisson(&f, 3, 3).unwrap();
    assert!(l.l(2).is_some());
    let rep = check_homotopy_poisson(&l, 3).unwrap();
    assert!(rep.passed(), "{rep}");
    assert!(!rep.truncated.is_empty());
}

#[test]
fn symmetric_algebra_from_psi_brackets() {
    // the dual-numbers brackets are special, hence fully skew; the others
    // are only cyclic and must be refused
    let mut built = 0;
    for (name, p, r) in instances() {
        let f = build_brackets_psi(&p, &r, 3).unwrap();
        if !check_skew_symmetry(&f, 3).unwrap().passed() {
            assert!(!name.starts_with("dual"), "{name}");
            assert!(matches!(build_sym_poisson(&f, 3, 3), Err(Error::Precondition(_))));
            continue;
        }
        let l = build_sym_poisson(&f, 3, 3).unwrap();
        let rep = check_homotopy_poisson(&l, 3).unwrap();
        assert!(rep.passed(), "{name}: {rep}");
        built += 1;
    }
    assert!(built >= 2);
}

#[test]
fn symmetric_algebra_detects_a_sign_flip() {
    let (p, r) = aguiar();
    let f = schedler_correspondence(&r, p.act_on_base()).unwrap();
    let l = build_sym_poisson(&f, 3, 2).unwrap();
    let l2 = l.l(2).unwrap();
    let (k, v) = l2.table().iter().next().unwrap();
    let (&o, c) = v.iter().next().unwrap();
    let mut bad = l2.clone();
    let mut w = v.clone();
    w.insert(o, -c.clone());
    bad.set(k, w).unwrap();
    let broken =
        LInfFamily::new(l.space().clone(), vec![(2, bad)]).unwrap().with_product(l.product().unwrap().clone()).unwrap();
    assert!(!check_homotopy_poisson(&broken, 2).unwrap().passed());
}

#[test]
fn rota_baxter_operators_are_tensors() {
    for (name, p, r) in instances() {
        let tensors = rb_to_tensor(&p, &r).unwrap();
        let back = tensor_to_rb(&p, &tensors).unwrap();
        assert_eq!(back.family(), r.family(), "{name}");
        let via_psi = build_brackets_psi(&p, &r, 4).unwrap();
        for (&n, rn) in tensors.elements() {
            let image = tensor_image(rn, n, p.act_on_base()).unwrap();
            assert_eq!(via_psi.bracket(n).unwrap().table(), image.table(), "{name}, arity {n}");
        }
    }
}

#[test]
fn aybe_and_rota_baxter_agree_on_skew_tensors() {
    // classical case: a skew r_2 in End(ℚ²) solves AYBE exactly when the
    // matching operator A∨ → A is Rota-Baxter
    let p = end_pair(&graded_line(0, 0));
    let labels = ["E11", "E12", "E21", "E22"];
    let mut seen = [0usize; 2];
    for i in 0..4 {
        for j in i + 1..4 {
            for k in 0..4 {
                for l in k + 1..4 {
                    if (k, l) < (i, j) {
                        continue;
                    }
                    let mut r = TensorFamily::new(p.acting().clone()).unwrap();
                    let mut terms = vec![(vec![labels[i], labels[j]], 1), (vec![labels[j], labels[i]], -1)];
                    if (k, l) != (i, j) {
                        terms.push((vec![labels[k], labels[l]], 1));
                        terms.push((vec![labels[l], labels[k]], -1));
                    }
                    let refs: Vec<(&[&str], i64)> = terms.iter().map(|(v, c)| (v.as_slice(), *c)).collect();
                    r.insert_labels(2, &refs).unwrap();
                    let aybe = check_aybe_infinity(&r, 3).unwrap().passed();
                    let t = tensor_to_rb(&p, &r).unwrap();
                    let rb = homalg::rb::check_dg_relative_rb(&t, 2).unwrap().passed();
                    assert_eq!(aybe, rb, "{terms:?}");
                    seen[aybe as usize] += 1;
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
