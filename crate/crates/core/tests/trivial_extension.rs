use homalg::ainf::{
    build_trivial_extension, check_bimodule, check_cyclic, check_stasheff, AInfBimodule, AInfStructure,
};
use homalg::kernel::space::GradedSpace;
use homalg::multiop::{FamilyKind, MultilinearOp, OpFamily};

/// `{1, u, v}`, `|u| = 1`, `d u = v`, `1` a unit, all other products zero.
fn small_dg() -> AInfStructure {
    let a = GradedSpace::from_pairs("A", &[("1", 0), ("u", 1), ("v", 0)]).unwrap();
    let mut d = MultilinearOp::zero(vec![a.clone()], a.clone(), -1);
    d.entry(&["u"], "v", 1).unwrap();
    let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
    for x in ["1", "u", "v"] {
        m.entry(&["1", x], x, 1).unwrap();
        if x != "1" {
            m.entry(&[x, "1"], x, 1).unwrap();
        }
    }
    AInfStructure::dg(a, Some(d), Some(m)).unwrap()
}

/// Exterior algebra on one odd generator.
fn exterior() -> AInfStructure {
    let a = GradedSpace::from_pairs("L", &[("1", 0), ("e", 1)]).unwrap();
    let mut m = MultilinearOp::zero(vec![a.clone(), a.clone()], a.clone(), 0);
    m.entry(&["1", "1"], "1", 1).unwrap();
    m.entry(&["1", "e"], "e", 1).unwrap();
    m.entry(&["e", "1"], "e", 1).unwrap();
    AInfStructure::dg(a, None, Some(m)).unwrap()
}

/// Only `m_3(x, x, x) = y`.
fn pure_m3(x_deg: i64) -> AInfStructure {
    let a = GradedSpace::from_pairs("P", &[("x", x_deg), ("y", 3 * x_deg + 1)]).unwrap();
    let mut m3 = MultilinearOp::zero(vec![a.clone(); 3], a.clone(), 1);
    m3.entry(&["x", "x", "x"], "y", 1).unwrap();
    let mut fam = OpFamily::new(FamilyKind::AInf);
    fam.insert(3, m3).unwrap();
    AInfStructure::new(a, fam).unwrap()
}

/// `m_3(x, z, x) = y`, `m_2(z, z) = w`; mixed degrees exercise every slot.
fn mixed(xd: i64, zd: i64) -> AInfStructure {
    let a = GradedSpace::from_pairs("Q", &[("x", xd), ("z", zd), ("y", 2 * xd + zd + 1), ("w", 2 * zd)]).unwrap();
    let mut m3 = MultilinearOp::zero(vec![a.clone(); 3], a.clone(), 1);
    m3.entry(&["x", "z", "x"], "y", 1).unwrap();
    let mut m2 = MultilinearOp::zero(vec![a.clone(); 2], a.clone(), 0);
    m2.entry(&["z", "z"], "w", 2).unwrap();
    let mut fam = OpFamily::new(FamilyKind::AInf);
    fam.insert(2, m2).unwrap();
    fam.insert(3, m3).unwrap();
    AInfStructure::new(a, fam).unwrap()
}

fn examples() -> Vec<(&'static str, AInfStructure)> {
    let mut v = vec![("small_dg", small_dg()), ("exterior", exterior())];
    for xd in [0, 1, 2] {
        v.push(("pure_m3", pure_m3(xd)));
    }
    for (xd, zd) in [(0, 1), (1, 0), (1, 1), (2, 1)] {
        v.push(("mixed", mixed(xd, zd)));
    }
    v
}

#[test]
fn examples_are_ainf() {
    for (name, a) in examples() {
        let r = check_stasheff(&a, 5).unwrap();
        assert!(r.passed(), "{name}\n{r}");
    }
}

#[test]
fn trivial_extension_is_ainf_for_all_shifts() {
    for (name, a) in examples() {
        for d in -2..=2 {
            let (ext, _) = build_trivial_extension(&a, d).unwrap();
            let r = check_stasheff(&ext, 5).unwrap();
            assert!(r.passed(), "{name} d={d}\n{r}");
        }
    }
}

#[test]
fn trivial_extension_is_cyclic_for_all_shifts() {
    for (name, a) in examples() {
        for d in -2..=2 {
            let (ext, te) = build_trivial_extension(&a, d).unwrap();
            let r = check_cyclic(&ext, &te.zeta, 3).unwrap();
            assert!(r.passed(), "{name} d={d}\n{r}");
        }
    }
}

#[test]
fn dual_bimodule_is_bimodule() {
    for (name, a) in examples() {
        let reg = AInfBimodule::regular(&a);
        assert!(check_bimodule(&reg, 4).unwrap().passed(), "{name}");
        let r = check_bimodule(&reg.dual().unwrap(), 4).unwrap();
        assert!(r.passed(), "{name}\n{r}");
    }
}
