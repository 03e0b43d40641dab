mod common;

use common::*;
use homalg::ainf::AInfStructure;
use homalg::kernel::linalg::rank;
use homalg::kernel::space::GradedSpace;
use homalg::kernel::Scalar;
use homalg::multiop::{add_into, insert_compose, MultilinearOp};
use homalg::pair::*;

fn exterior() -> AInfStructure {
    let b = GradedSpace::from_pairs("L", &[("1", 0), ("e", 1)]).unwrap();
    let mut m = MultilinearOp::zero(vec![b.clone(), b.clone()], b.clone(), 0);
    m.entry(&["1", "1"], "1", 1).unwrap();
    m.entry(&["1", "e"], "e", 1).unwrap();
    m.entry(&["e", "1"], "e", 1).unwrap();
    AInfStructure::dg(b, None, Some(m)).unwrap()
}

/// `A` acting on itself, seen as a zero-product algebra.
fn module_pair(a: &AInfStructure) -> InteractivePair {
    let b = AInfStructure::dg(a.space().clone(), a.m(1).cloned(), None).unwrap();
    InteractivePair::from_module(a, b, a.m_or_zero(2)).unwrap()
}

fn pairs() -> Vec<(&'static str, InteractivePair)> {
    vec![
        ("regular dual numbers", InteractivePair::regular(&dual_numbers()).unwrap()),
        ("regular koszul", InteractivePair::regular(&koszul_dg()).unwrap()),
        ("module dual numbers", module_pair(&dual_numbers())),
        ("module koszul", module_pair(&koszul_dg())),
        ("End dual numbers", InteractivePair::endomorphisms(&dual_numbers()).unwrap()),
        ("End exterior", InteractivePair::endomorphisms(&exterior()).unwrap()),
        ("End complex", InteractivePair::endomorphisms(&small_complex()).unwrap()),
        ("End graded line", InteractivePair::endomorphisms(&graded_line(0, 1)).unwrap()),
    ]
}

#[test]
fn example_pairs_are_interactive() {
    for (name, p) in pairs() {
        let r = check_interactive_pair(&p).unwrap();
        assert!(r.passed(), "{name}\n{r}");
    }
}

#[test]
fn broken_compatibility_is_located() {
    let b = dual_numbers();
    let p = InteractivePair::endomorphisms(&b).unwrap();
    let mut left = p.act_on_acting().clone();
    // x ▶ E12 should be E22 ∘ ... ; drop one term
    let sp = left.domain()[1].clone();
    let e12 = sp.index_of("E12").unwrap();
    let key = [b.space().index_of("x").unwrap(), e12];
    left.set(&key, Default::default()).unwrap();
    let q = InteractivePair::new(p.acting().clone(), b, p.act_on_base().clone(), left).unwrap();
    let r = check_interactive_pair(&q).unwrap();
    assert!(!r.passed());
    assert!(r.entries.iter().any(|e| e.identity == "compatibility"), "{r}");
}

#[test]
fn kappa_of_zero_action_is_zero() {
    let a = dual_numbers();
    let b = AInfStructure::zero(GradedSpace::from_pairs("Z", &[("z", 0), ("w", 1)]).unwrap());
    let act = MultilinearOp::zero(vec![a.space().clone(), b.space().clone()], b.space().clone(), 0);
    let p = InteractivePair::from_module(&a, b, act).unwrap();
    assert!(build_kappa(&p).unwrap().is_zero());
}

#[test]
fn kappa_on_the_regular_pair() {
    let p = InteractivePair::regular(&dual_numbers()).unwrap();
    let k = build_kappa(&p).unwrap();
    let b = p.base().space();
    let bd = p.base_dual_space();
    let ad = p.acting_dual_space();
    // κ(1 ⊗ x^)(x) = x^(x · 1) = 1
    let v = k.coeff(&[b.index_of("1").unwrap(), bd.index_of("x^").unwrap()], ad.index_of("x^").unwrap());
    assert_eq!(v, Scalar::one());
    // κ(x ⊗ x^)(1) = x^(1 · x) = 1 and κ(x ⊗ x^)(x) = x^(x·x) = 0
    let kx = k.get(&[b.index_of("x").unwrap(), bd.index_of("x^").unwrap()]);
    assert_eq!(kx.len(), 1);
    assert_eq!(kx[&ad.index_of("1^").unwrap()], Scalar::one());
}

#[test]
fn kappa_is_an_isomorphism_for_endomorphisms() {
    for b in [dual_numbers(), exterior(), small_complex(), graded_line(1, -2)] {
        let p = InteractivePair::endomorphisms(&b).unwrap();
        let k = build_kappa(&p).unwrap();
        let n = b.space().dim();
        let ad = p.acting_dual_space();
        let mat: Vec<Vec<Scalar>> = (0..n)
            .flat_map(|x| (0..n).map(move |f| (x, f)))
            .map(|(x, f)| (0..ad.dim()).map(|o| k.coeff(&[x, f], o)).collect())
            .collect();
        assert_eq!(rank(&mat), n * n);
    }
}

#[test]
fn kappa_is_a_bimodule_morphism() {
    for (name, p) in pairs() {
        let k = build_kappa(&p).unwrap();
        let r = check_kappa(&p, &k).unwrap();
        assert!(r.passed(), "{name}\n{r}");
    }
}

#[test]
fn kappa_sign_matters() {
    // drop the Koszul sign of κ on the exterior algebra: the right-action
    // identities notice
    let p = InteractivePair::endomorphisms(&exterior()).unwrap();
    let k = build_kappa(&p).unwrap();
    let mut unsigned = k.clone();
    for (key, val) in k.table() {
        let abs = val.iter().map(|(&o, c)| (o, c.abs())).collect();
        unsigned.set(key, abs).unwrap();
    }
    assert_ne!(unsigned, k);
    assert!(!check_kappa(&p, &unsigned).unwrap().passed());
}

#[test]
fn zero_operator_is_a_strong_derivation() {
    for (name, p) in pairs() {
        let ad = p.acting_dual_space();
        for n in 1..=3 {
            let t = MultilinearOp::zero(vec![ad.clone(); n], p.acting().space().clone(), n as i64 - 1);
            let r = check_strong_n_derivation(&p, &t).unwrap();
            assert!(r.passed(), "{name} n={n}\n{r}");
        }
    }
}

#[test]
fn zero_product_base_makes_every_operator_a_derivation() {
    let mut rng = rng(11);
    for b in [graded_line(0, 0), graded_line(0, 1), small_complex()] {
        let p = InteractivePair::endomorphisms(&b).unwrap();
        let ad = p.acting_dual_space();
        for n in 1..=2 {
            let t = random_op(&mut rng, vec![ad.clone(); n], p.acting().space().clone(), n as i64 - 1, 0.6);
            assert!(check_n_derivation(&p, &t).unwrap().passed());
            assert!(check_strong_n_derivation(&p, &t).unwrap().passed());
        }
    }
}

#[test]
fn slot_identities_are_empty_for_arity_one() {
    let p = InteractivePair::endomorphisms(&dual_numbers()).unwrap();
    let t = MultilinearOp::zero(vec![p.acting_dual_space()], p.acting().space().clone(), 0);
    let r = check_strong_n_derivation(&p, &t).unwrap();
    // the n-derivation identity and the first-component identity only
    assert_eq!(r.checked, 2);
}

#[test]
fn iota_round_trips() {
    let mut rng = rng(5);
    for b in [dual_numbers(), exterior(), graded_line(1, -1)] {
        let p = InteractivePair::endomorphisms(&b).unwrap();
        let ad = p.acting_dual_space();
        for n in 1..=2 {
            for deg in -1..=1 {
                let q = random_op(&mut rng, vec![ad.clone(); n], b.space().clone(), deg, 0.5);
                let x = iota_inverse(&p, &q).unwrap();
                let back = iota(&p, n, &x).unwrap();
                assert_eq!(back.table(), q.table());
            }
        }
    }
}

/// Restrict an `n`-derivation residual to fixed `(b₁, b₂)` and read it as a
/// map `(A∨)^{⊗n} → B`.
fn slice(r: &MultilinearOp, n: usize, b1: usize, b2: usize) -> MultilinearOp {
    let b = r.domain()[n].clone();
    let deg = r.degree() + b.degree(b1) + b.degree(b2);
    let mut out = MultilinearOp::zero(r.domain()[..n].to_vec(), r.codomain().clone(), deg);
    for (key, val) in r.table() {
        if key[n] == b1 && key[n + 1] == b2 {
            out.set(&key[..n], val.clone()).unwrap();
        }
    }
    out
}

#[test]
fn derivation_check_matches_the_iota_oracle() {
    let mut rng = rng(23);
    for b in [dual_numbers(), exterior()] {
        let p = InteractivePair::endomorphisms(&b).unwrap();
        let ad = p.acting_dual_space();
        let graded = b.space().degrees().iter().any(|&d| d != 0);
        for n in 1..=2 {
            for _ in 0..6 {
                let t = random_op(&mut rng, vec![ad.clone(); n], p.acting().space().clone(), n as i64 - 1, 0.4);
                let direct = derivation_residual(&p, &t).unwrap();
                let defect = derivation_defect_via_iota(&p, &t).unwrap();
                assert_eq!(direct.is_zero(), defect.is_empty());
                let dim = b.space().dim();
                for b1 in 0..dim {
                    for b2 in 0..dim {
                        let via = match defect.get(&(b1, b2)) {
                            Some(x) => iota(&p, n, x).unwrap().table().clone(),
                            None => Default::default(),
                        };
                        let d = slice(&direct, n, b1, b2);
                        if graded {
                            assert_eq!(via.is_empty(), d.is_zero());
                        } else {
                            assert_eq!(&via, d.table(), "n={n} b1={b1} b2={b2}");
                        }
                    }
                }
            }
        }
    }
}

/// Basis of the cyclic `n`-derivations `(A∨)^{⊗n} → A`.
fn cyclic_derivations(p: &InteractivePair, n: usize) -> Vec<MultilinearOp> {
    use homalg::multiop::{FamilyKind, OpFamily};
    use homalg::rb::{check_cyclic_rb, RbFamily};
    let ad = p.acting_dual_space();
    let a = p.acting().space().clone();
    let deg = n as i64 - 1;
    let zero = MultilinearOp::zero(vec![ad.clone(); n], a.clone(), deg);
    linear_solutions(&zero, &slots(&vec![ad.clone(); n], &a, deg), |t| {
        let mut fam = OpFamily::new(FamilyKind::RbRelative);
        fam.insert(n, t.clone()).unwrap();
        let r = RbFamily::dg_relative(p.acting_dual().clone(), fam).unwrap();
        let mut rep = check_cyclic_rb(&r, None, n).unwrap();
        rep.merge(check_n_derivation(p, t).unwrap());
        rep
    })
}

#[test]
fn cyclic_derivations_are_strong() {
    // no Rota-Baxter condition is needed for the strong identities
    for b in [dual_numbers(), exterior(), graded_line(0, 1), small_complex()] {
        let p = InteractivePair::endomorphisms(&b).unwrap();
        for n in 1..=2 {
            for t in &cyclic_derivations(&p, n) {
                let r = check_strong_n_derivation(&p, t).unwrap();
                assert!(r.passed(), "{} n={n}\n{r}", b.space().name());
            }
        }
    }
}

#[test]
fn strong_first_identity_uses_the_koszul_sign() {
    // with the sign (-1)^{|T||b₁|} removed the first-component identity
    // breaks on a graded cyclic T_2
    let p = InteractivePair::endomorphisms(&koszul_dg()).unwrap();
    let k = build_kappa(&p).unwrap();
    let basis = cyclic_derivations(&p, 2);
    assert!(!basis.is_empty());
    let mut seen = false;
    for t in &basis {
        let res = strong_first_residual(&p, t, &k).unwrap();
        assert!(res.is_zero());
        let signed = insert_compose(p.act_on_acting(), &insert_compose(t, &k, 0, 0).unwrap(), 1, 0).unwrap();
        let mut unsigned = signed.clone();
        for (key, val) in signed.table() {
            let e = p.base().space().degree(key[0]) * t.degree();
            unsigned.set(key, val.iter().map(|(&o, c)| (o, c.clone().signed(e))).collect()).unwrap();
        }
        let mut diff = res.clone();
        add_into(&mut diff, &Scalar::one(), &signed).unwrap();
        add_into(&mut diff, &-Scalar::one(), &unsigned).unwrap();
        seen |= !diff.is_zero();
    }
    assert!(seen);
}
