//! Resolution of a document into library structures.
//!
//! Every failure here is an input error carrying the position of the
//! offending field. Operations are matched to the spaces a structure expects
//! by basis label and degree, so a document may name a derived space (a dual,
//! a trivial extension, `End(B)`) however it likes as long as its basis agrees.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use homalg::ainf::{build_trivial_extension, AInfBimodule, AInfStructure, CyclicForm};
use homalg::dpois::{DoubleBracketFamily, LInfFamily, Tensor, TensorFamily};
use homalg::kernel::space::{tensor_index, tensor_space, GradedSpace, Space};
use homalg::kernel::Scalar;
use homalg::multiop::{FamilyKind, MultilinearOp, OpFamily};
use homalg::pair::InteractivePair;
use homalg::precy::PreCYStructure;
use homalg::rb::{RbFamily, RbModule};

use crate::doc::{Bundle, Document, RbKind};
use crate::error::{CliError, CliResult};

const MAX_DEPTH: usize = 32;

/// An operation after name resolution, in the document's own spaces.
#[derive(Clone, Debug)]
struct ParsedOp {
    at: String,
    inputs: Vec<Space>,
    output: Vec<Space>,
    degree: i64,
    entries: Vec<(Vec<usize>, Vec<usize>, Scalar)>,
}

/// A Rota-Baxter bundle with its optional cyclic form and pair.
#[derive(Clone, Debug)]
pub struct RbBundle {
    pub family: RbFamily,
    pub form: Option<CyclicForm>,
    pub pair: Option<InteractivePair>,
}

pub struct Resolver<'a> {
    doc: &'a Document,
    spaces: BTreeMap<String, Space>,
    ops: BTreeMap<String, ParsedOp>,
    depth: Cell<usize>,
}

pub fn parse_scalar(s: &str, at: &str) -> CliResult<Scalar> {
    Scalar::from_str(s).map_err(|e| CliError::input(format!("{at}: {e}")))
}

/// The space of a list of tensor factors: the ground field for none.
pub fn product_space(parts: &[Space]) -> CliResult<Space> {
    match parts {
        [one] => Ok(one.clone()),
        _ => tensor_space(parts).map_err(|e| CliError::input(e.to_string())),
    }
}

pub fn bimodule_domain(a: &Space, m: &Space, p: usize, q: usize) -> Vec<Space> {
    let mut d = vec![a.clone(); p];
    d.push(m.clone());
    d.extend(std::iter::repeat(a.clone()).take(q));
    d
}

fn arity_key(key: &str, at: &str) -> CliResult<usize> {
    key.trim().parse().map_err(|_| CliError::input(format!("{at}: key `{key}` is not an arity")))
}

fn pair_key(key: &str, at: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::input(format!("{at}: key `{key}` is not of the form `p,q`"));
    let (p, q) = key.split_once(',').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

impl<'a> Resolver<'a> {
    /// Validate spaces and operations: names resolve, labels exist,
    /// coefficients parse, and each entry obeys the degree law.
    pub fn new(doc: &'a Document) -> CliResult<Self> {
        let mut spaces = BTreeMap::new();
        for (i, s) in doc.spaces.iter().enumerate() {
            let at = format!("spaces[{i}] `{}`", s.name);
            let sp =
                GradedSpace::new(s.name.clone(), s.basis.clone()).map_err(|e| CliError::input(format!("{at}: {e}")))?;
            if spaces.insert(s.name.clone(), Arc::new(sp)).is_some() {
                return Err(CliError::input(format!("{at}: duplicate space name")));
            }
        }
        let mut ops = BTreeMap::new();
        for (i, o) in doc.operations.iter().enumerate() {
            let at = format!("operations[{i}] `{}`", o.name);
            let resolve = |names: &[String], field: &str| -> CliResult<Vec<Space>> {
                names
                    .iter()
                    .enumerate()
                    .map(|(k, n)| {
                        spaces
                            .get(n)
                            .cloned()
                            .ok_or_else(|| CliError::input(format!("{at} {field}[{k}]: unknown space `{n}`")))
                    })
                    .collect()
            };
            let inputs = resolve(&o.inputs, "inputs")?;
            let output = resolve(&o.output, "output")?;
            let mut entries = Vec::with_capacity(o.entries.len());
            for (j, e) in o.entries.iter().enumerate() {
                let eat = format!("{at} entries[{j}]");
                let labels = |names: &[String], parts: &[Space], field: &str| -> CliResult<Vec<usize>> {
                    if names.len() != parts.len() {
                        return Err(CliError::input(format!(
                            "{eat} field {field}: {} labels for {} factors",
                            names.len(),
                            parts.len()
                        )));
                    }
                    names
                        .iter()
                        .zip(parts)
                        .map(|(l, s)| {
                            s.index_of(l).ok_or_else(|| {
                                CliError::input(format!(
                                    "{eat} field {field}: `{l}` is not a basis label of `{}`",
                                    s.name()
                                ))
                            })
                        })
                        .collect()
                };
                let key = labels(&e.inputs, &inputs, "in")?;
                let out = labels(&e.out, &output, "out")?;
                let c = parse_scalar(&e.c, &format!("{eat} field c"))?;
                let din: i64 = key.iter().zip(&inputs).map(|(&k, s)| s.degree(k)).sum();
                let dout: i64 = out.iter().zip(&output).map(|(&k, s)| s.degree(k)).sum();
                if din + o.degree != dout {
                    return Err(CliError::input(format!(
                        "{eat}: degree law violated, inputs of degree {din} with an operation of degree {} cannot reach degree {dout}",
                        o.degree
                    )));
                }
                entries.push((key, out, c));
            }
            let parsed = ParsedOp { at: at.clone(), inputs, output, degree: o.degree, entries };
            if ops.insert(o.name.clone(), parsed).is_some() {
                return Err(CliError::input(format!("{at}: duplicate operation name")));
            }
        }
        Ok(Resolver { doc, spaces, ops, depth: Cell::new(0) })
    }

    pub fn document(&self) -> &Document {
        self.doc
    }

    pub fn space(&self, name: &str, at: &str) -> CliResult<Space> {
        self.spaces.get(name).cloned().ok_or_else(|| CliError::input(format!("{at}: unknown space `{name}`")))
    }

    /// The named operation, re-expressed over `domain` and the tensor
    /// product of `out`, matching basis elements by label and degree.
    pub fn rebind(&self, name: &str, at: &str, domain: &[Space], out: &[Space]) -> CliResult<MultilinearOp> {
        let op = self.ops.get(name).ok_or_else(|| CliError::input(format!("{at}: unknown operation `{name}`")))?;
        if op.inputs.len() != domain.len() || op.output.len() != out.len() {
            return Err(CliError::input(format!(
                "{} (used by {at}): expected {} inputs and {} output factors, found {} and {}",
                op.at,
                domain.len(),
                out.len(),
                op.inputs.len(),
                op.output.len()
            )));
        }
        let map = |own: &Space, target: &Space, i: usize| -> CliResult<usize> {
            let label = own.label(i);
            match target.index_of(label) {
                Some(j) if target.degree(j) == own.degree(i) => Ok(j),
                Some(_) => Err(CliError::input(format!(
                    "{} (used by {at}): `{label}` has degree {} here and {} in `{}`",
                    op.at,
                    own.degree(i),
                    target.degree(target.index_of(label).unwrap()),
                    target.name()
                ))),
                None => Err(CliError::input(format!(
                    "{} (used by {at}): `{label}` is not a basis label of `{}`",
                    op.at,
                    target.name()
                ))),
            }
        };
        let codomain = product_space(out)?;
        let dims: Vec<usize> = out.iter().map(|s| s.dim()).collect();
        let mut result = MultilinearOp::zero(domain.to_vec(), codomain, op.degree);
        for (key, o, c) in &op.entries {
            let k = key
                .iter()
                .enumerate()
                .map(|(s, &i)| map(&op.inputs[s], &domain[s], i))
                .collect::<CliResult<Vec<_>>>()?;
            let t =
                o.iter().enumerate().map(|(s, &i)| map(&op.output[s], &out[s], i)).collect::<CliResult<Vec<_>>>()?;
            result.add_entry(&k, tensor_index(&t, &dims), c.clone()).map_err(|e| CliError::from_lib(&op.at, e))?;
        }
        Ok(result)
    }

    fn bundle(&self, name: &str, at: &str) -> CliResult<&'a Bundle> {
        self.doc.bundles.get(name).ok_or_else(|| CliError::input(format!("{at}: unknown bundle `{name}`")))
    }

    fn enter(&self, name: &str) -> CliResult<Guard<'_>> {
        let d = self.depth.get() + 1;
        if d > MAX_DEPTH {
            return Err(CliError::input(format!("bundles[`{name}`]: bundle references nest too deeply (a cycle?)")));
        }
        self.depth.set(d);
        Ok(Guard(&self.depth))
    }

    fn wrong_kind(name: &str, b: &Bundle, want: &str) -> CliError {
        CliError::input(format!("bundles[`{name}`]: expected {want}, found kind `{}`", b.kind()))
    }

    fn family<K: Copy + Ord + std::fmt::Debug + homalg::multiop::FamilyKey>(
        &self,
        at: &str,
        kind: FamilyKind,
        ops: &BTreeMap<String, String>,
        key: impl Fn(&str, &str) -> CliResult<K>,
        sig: impl Fn(K) -> (Vec<Space>, Vec<Space>),
    ) -> CliResult<OpFamily<K>> {
        let mut fam = OpFamily::new(kind);
        for (k, op) in ops {
            let oat = format!("{at} ops[`{k}`]");
            let key = key(k, &oat)?;
            let (dom, out) = sig(key);
            let m = self.rebind(op, &oat, &dom, &out)?;
            fam.insert(key, m).map_err(|e| CliError::from_lib(&oat, e))?;
        }
        Ok(fam)
    }

    pub fn ainf(&self, name: &str) -> CliResult<AInfStructure> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::Ainf { space, ops } => {
                let v = self.space(space, &format!("{at} field space"))?;
                let fam =
                    self.family(&at, FamilyKind::AInf, ops, arity_key, |n| (vec![v.clone(); n], vec![v.clone()]))?;
                AInfStructure::new(v, fam).map_err(|e| CliError::from_lib(&at, e))
            }
            b => Err(Self::wrong_kind(name, b, "an `ainf` bundle")),
        }
    }

    pub fn bimodule(&self, name: &str) -> CliResult<AInfBimodule> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::Bimodule { algebra, module, ops } => {
                let a = self.ainf(algebra)?;
                let m = self.space(module, &format!("{at} field module"))?;
                let asp = a.space().clone();
                let fam = self.family(&at, FamilyKind::AInfBimodule, ops, pair_key, |(p, q)| {
                    (bimodule_domain(&asp, &m, p, q), vec![m.clone()])
                })?;
                AInfBimodule::new(a, m, fam).map_err(|e| CliError::from_lib(&at, e))
            }
            Bundle::RegularBimodule { algebra } => Ok(AInfBimodule::regular(&self.ainf(algebra)?)),
            Bundle::DualBimodule { of } => self.bimodule(of)?.dual().map_err(|e| CliError::from_lib(&at, e)),
            b => Err(Self::wrong_kind(name, b, "a bimodule bundle")),
        }
    }

    pub fn rb(&self, name: &str) -> CliResult<RbBundle> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        let Bundle::Rb { variant, over, ops, form } = self.bundle(name, "bundle reference")? else {
            return Err(Self::wrong_kind(name, self.bundle(name, "")?, "an `rb` bundle"));
        };
        let lib = |e| CliError::from_lib(&at, e);
        let (family, pair) = match variant {
            RbKind::Absolute => {
                let a = self.ainf(over)?;
                let v = a.space().clone();
                let fam = self
                    .family(&at, FamilyKind::RbAbsolute, ops, arity_key, |n| (vec![v.clone(); n], vec![v.clone()]))?;
                (RbFamily::absolute(a, fam).map_err(lib)?, None)
            }
            _ => {
                let (module, pair) = match self.bundle(over, &format!("{at} field over"))? {
                    Bundle::Pair { .. } | Bundle::EndomorphismPair { .. } => {
                        let p = self.pair(over)?;
                        (p.acting_dual().clone(), Some(p))
                    }
                    _ => (self.bimodule(over)?, None),
                };
                let (a, m) = (module.algebra().space().clone(), module.module().clone());
                let fam = self
                    .family(&at, FamilyKind::RbRelative, ops, arity_key, |n| (vec![m.clone(); n], vec![a.clone()]))?;
                let r = match variant {
                    RbKind::Relative => RbFamily::relative(module, fam),
                    RbKind::DgRelative => RbFamily::dg_relative(module, fam),
                    _ => match (fam.get(1), fam.max_inputs()) {
                        (Some(t), 1) => RbFamily::classical(module, t.clone()),
                        _ => Err(homalg::Error::Structure(
                            "a classical operator has exactly one entry, under key `1`".into(),
                        )),
                    },
                };
                (r.map_err(lib)?, pair)
            }
        };
        let form = match form {
            Some(f) => Some(self.cyclic(f)?.1),
            None => None,
        };
        Ok(RbBundle { family, form, pair })
    }

    pub fn rb_module(&self, name: &str) -> CliResult<RbModule> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::RbModule { rb, module, ops } => {
                let r = self.rb(rb)?.family;
                let bm = self.bimodule(module)?;
                let (a, m) = (r.base().space().clone(), bm.module().clone());
                let fam = self.family(&at, FamilyKind::RbModule, ops, pair_key, |(p, q)| {
                    (bimodule_domain(&a, &m, p, q), vec![m.clone()])
                })?;
                RbModule::new(r, bm, fam).map_err(|e| CliError::from_lib(&at, e))
            }
            b => Err(Self::wrong_kind(name, b, "an `rb-module` bundle")),
        }
    }

    pub fn cyclic(&self, name: &str) -> CliResult<(AInfStructure, CyclicForm)> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::Cyclic { algebra, d, pairing } => {
                let a = self.ainf(algebra)?;
                let v = a.space().clone();
                let p = self.rebind(pairing, &format!("{at} field pairing"), &[v.clone(), v.clone()], &[])?;
                let form = CyclicForm::new(v, *d, p).map_err(|e| CliError::from_lib(&at, e))?;
                Ok((a, form))
            }
            b => Err(Self::wrong_kind(name, b, "a `cyclic` bundle")),
        }
    }

    pub fn pair(&self, name: &str) -> CliResult<InteractivePair> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        let lib = |e| CliError::from_lib(&at, e);
        match self.bundle(name, "bundle reference")? {
            Bundle::Pair { acting, base, act_on_base, act_on_acting } => {
                let a = self.ainf(acting)?;
                let b = self.ainf(base)?;
                let (asp, bsp) = (a.space().clone(), b.space().clone());
                let l = self.rebind(
                    act_on_base,
                    &format!("{at} field act_on_base"),
                    &[asp.clone(), bsp.clone()],
                    &[bsp.clone()],
                )?;
                let r =
                    self.rebind(act_on_acting, &format!("{at} field act_on_acting"), &[bsp, asp.clone()], &[asp])?;
                InteractivePair::new(a, b, l, r).map_err(lib)
            }
            Bundle::EndomorphismPair { base } => InteractivePair::endomorphisms(&self.ainf(base)?).map_err(lib),
            b => Err(Self::wrong_kind(name, b, "a pair bundle")),
        }
    }

    pub fn derivation(&self, name: &str) -> CliResult<(InteractivePair, MultilinearOp, bool)> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::Derivation { pair, op, strong } => {
                let p = self.pair(pair)?;
                let o = self
                    .ops
                    .get(op)
                    .ok_or_else(|| CliError::input(format!("{at} field op: unknown operation `{op}`")))?;
                let n = o.inputs.len();
                let t = self.rebind(
                    op,
                    &format!("{at} field op"),
                    &vec![p.acting_dual_space(); n],
                    &[p.acting().space().clone()],
                )?;
                Ok((p, t, *strong))
            }
            b => Err(Self::wrong_kind(name, b, "a `derivation` bundle")),
        }
    }

    pub fn precy(&self, name: &str) -> CliResult<PreCYStructure> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        let lib = |e| CliError::from_lib(&at, e);
        match self.bundle(name, "bundle reference")? {
            Bundle::Precy { base, ops } => {
                let b = self.ainf(base)?;
                let (ext, _) = build_trivial_extension(&b, -1).map_err(lib)?;
                let v = ext.space().clone();
                let fam =
                    self.family(&at, FamilyKind::AInf, ops, arity_key, |n| (vec![v.clone(); n], vec![v.clone()]))?;
                let s = AInfStructure::new(v, fam).map_err(lib)?;
                PreCYStructure::new(&b, s).map_err(lib)
            }
            b => Err(Self::wrong_kind(name, b, "a `precy` bundle")),
        }
    }

    pub fn double_bracket(&self, name: &str) -> CliResult<DoubleBracketFamily> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        match self.bundle(name, "bundle reference")? {
            Bundle::DoubleBracket { space, ops, product } => {
                let v = self.space(space, &format!("{at} field space"))?;
                let fam = self.family(&at, FamilyKind::DoubleBracket, ops, arity_key, |n| {
                    (vec![v.clone(); n], vec![v.clone(); n])
                })?;
                let prod = match product {
                    Some(p) => {
                        Some(self.rebind(p, &format!("{at} field product"), &[v.clone(), v.clone()], &[v.clone()])?)
                    }
                    None => None,
                };
                DoubleBracketFamily::new(v, fam, prod).map_err(|e| CliError::from_lib(&at, e))
            }
            b => Err(Self::wrong_kind(name, b, "a `double-bracket` bundle")),
        }
    }

    pub fn tensor_family(&self, name: &str) -> CliResult<(TensorFamily, Option<InteractivePair>)> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        let lib = |e| CliError::from_lib(&at, e);
        match self.bundle(name, "bundle reference")? {
            Bundle::TensorFamily { over, elements } => {
                let (algebra, pair) = match self.bundle(over, &format!("{at} field over"))? {
                    Bundle::Pair { .. } | Bundle::EndomorphismPair { .. } => {
                        let p = self.pair(over)?;
                        (p.acting().clone(), Some(p))
                    }
                    _ => (self.ainf(over)?, None),
                };
                let sp = algebra.space().clone();
                let mut r = TensorFamily::new(algebra).map_err(lib)?;
                for (k, terms) in elements {
                    let kat = format!("{at} elements[`{k}`]");
                    let n = arity_key(k, &kat)?;
                    let mut t = Tensor::new();
                    for (j, term) in terms.iter().enumerate() {
                        let tat = format!("{kat}[{j}]");
                        let key = term
                            .legs
                            .iter()
                            .map(|l| {
                                sp.index_of(l).ok_or_else(|| {
                                    CliError::input(format!(
                                        "{tat} field legs: `{l}` is not a basis label of `{}`",
                                        sp.name()
                                    ))
                                })
                            })
                            .collect::<CliResult<Vec<_>>>()?;
                        let c = parse_scalar(&term.c, &format!("{tat} field c"))?;
                        let slot = t.entry(key).or_insert_with(Scalar::zero);
                        *slot = slot.clone() + &c;
                    }
                    r.insert(n, t).map_err(|e| CliError::from_lib(&kat, e))?;
                }
                Ok((r, pair))
            }
            b => Err(Self::wrong_kind(name, b, "a `tensor-family` bundle")),
        }
    }

    pub fn linf(&self, name: &str) -> CliResult<LInfFamily> {
        let _g = self.enter(name)?;
        let at = format!("bundles[`{name}`]");
        let lib = |e| CliError::from_lib(&at, e);
        match self.bundle(name, "bundle reference")? {
            Bundle::Linf { space, ops, product, weights, max_weight } => {
                let v = self.space(space, &format!("{at} field space"))?;
                let mut list = Vec::new();
                for (k, op) in ops {
                    let oat = format!("{at} ops[`{k}`]");
                    let n = arity_key(k, &oat)?;
                    list.push((n, self.rebind(op, &oat, &vec![v.clone(); n], &[v.clone()])?));
                }
                let mut f = LInfFamily::new(v.clone(), list).map_err(lib)?;
                if let Some(p) = product {
                    f = f
                        .with_product(self.rebind(
                            p,
                            &format!("{at} field product"),
                            &[v.clone(), v.clone()],
                            &[v.clone()],
                        )?)
                        .map_err(lib)?;
                }
                match (weights, max_weight) {
                    (Some(w), Some(m)) => f = f.with_weights(w.clone(), *m).map_err(lib)?,
                    (None, None) => {}
                    _ => return Err(CliError::input(format!("{at}: `weights` and `max_weight` go together"))),
                }
                Ok(f)
            }
            b => Err(Self::wrong_kind(name, b, "an `linf` bundle")),
        }
    }
}

struct Guard<'a>(&'a Cell<usize>);

impl Drop for Guard<'_> {
    fn drop(&mut self) {
        self.0.set(self.0.get() - 1);
    }
}
