//! Writing library structures back out as a self-contained document.

use std::collections::BTreeMap;

use homalg::ainf::{AInfBimodule, AInfStructure, CyclicForm};
use homalg::dpois::{DoubleBracketFamily, LInfFamily, TensorFamily};
use homalg::kernel::space::{same_space, tensor_tuple, Space};
use homalg::multiop::MultilinearOp;
use homalg::pair::InteractivePair;
use homalg::precy::PreCYStructure;
use homalg::rb::{RbFamily, RbModule, RbVariant};

use crate::doc::{Bundle, Document, EntryDecl, OpDecl, RbKind, SpaceDecl, TermDecl};
use crate::load::bimodule_domain;

/// Accumulates spaces, operations and bundles, sharing structurally equal
/// spaces and algebras.
pub struct Writer {
    doc: Document,
    spaces: Vec<Space>,
    algebras: Vec<(AInfStructure, String)>,
    bimodules: Vec<(AInfBimodule, String)>,
    rbs: Vec<(RbFamily, String)>,
}

impl Default for Writer {
    fn default() -> Self {
        Self::new()
    }
}

impl Writer {
    pub fn new() -> Self {
        Writer {
            doc: Document::empty(),
            spaces: Vec::new(),
            algebras: Vec::new(),
            bimodules: Vec::new(),
            rbs: Vec::new(),
        }
    }

    pub fn finish(self) -> Document {
        self.doc
    }

    fn fresh(&self, base: &str, taken: impl Fn(&str) -> bool) -> String {
        if !taken(base) {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}#{k}")).find(|n| !taken(n)).expect("a free name")
    }

    /// Name of `s` in the document, declaring it on first use.
    pub fn space(&mut self, s: &Space) -> String {
        if let Some(i) = self.spaces.iter().position(|t| same_space(t, s)) {
            return self.doc.spaces[i].name.clone();
        }
        let name = self.fresh(s.name(), |n| self.doc.spaces.iter().any(|d| d.name == n));
        self.doc.spaces.push(SpaceDecl { name: name.clone(), basis: s.basis().to_vec() });
        self.spaces.push(s.clone());
        name
    }

    /// Declare `op` with codomain the tensor product of `out`; an empty `out`
    /// is the ground field.
    pub fn op(&mut self, name: &str, op: &MultilinearOp, out: &[Space]) -> String {
        let name = self.fresh(name, |n| self.doc.operations.iter().any(|o| o.name == n));
        let inputs: Vec<String> = op.domain().iter().map(|s| self.space(s)).collect();
        let output: Vec<String> = out.iter().map(|s| self.space(s)).collect();
        let dims: Vec<usize> = out.iter().map(|s| s.dim()).collect();
        let mut entries = Vec::new();
        for (key, v) in op.table() {
            let labels: Vec<String> = key.iter().zip(op.domain()).map(|(&i, s)| s.label(i).to_string()).collect();
            for (&o, c) in v {
                let t = tensor_tuple(o, &dims);
                entries.push(EntryDecl {
                    inputs: labels.clone(),
                    out: t.iter().zip(out).map(|(&i, s)| s.label(i).to_string()).collect(),
                    c: c.to_string(),
                });
            }
        }
        self.doc.operations.push(OpDecl { name: name.clone(), inputs, output, degree: op.degree(), entries });
        name
    }

    fn bundle(&mut self, name: &str, b: Bundle) -> String {
        let name = self.fresh(name, |n| self.doc.bundles.contains_key(n));
        self.doc.bundles.insert(name.clone(), b);
        name
    }

    pub fn ainf(&mut self, name: &str, a: &AInfStructure) -> String {
        if let Some((_, n)) = self.algebras.iter().find(|(b, _)| b == a) {
            return n.clone();
        }
        let space = self.space(a.space());
        let mut ops = BTreeMap::new();
        for (&n, op) in a.family().iter() {
            if !op.is_zero() {
                let o = self.op(&format!("{name}.m{n}"), op, &[a.space().clone()]);
                ops.insert(n.to_string(), o);
            }
        }
        let b = self.bundle(name, Bundle::Ainf { space, ops });
        self.algebras.push((a.clone(), b.clone()));
        b
    }

    pub fn bimodule(&mut self, name: &str, m: &AInfBimodule) -> String {
        if let Some((_, n)) = self.bimodules.iter().find(|(b, _)| b == m) {
            return n.clone();
        }
        let algebra = self.ainf(&format!("{name}.algebra"), m.algebra());
        let module = self.space(m.module());
        let mut ops = BTreeMap::new();
        for (&(p, q), op) in m.family().iter() {
            if !op.is_zero() {
                let o = self.op(&format!("{name}.m{p}{q}"), op, &[m.module().clone()]);
                ops.insert(format!("{p},{q}"), o);
            }
        }
        let b = self.bundle(name, Bundle::Bimodule { algebra, module, ops });
        self.bimodules.push((m.clone(), b.clone()));
        b
    }

    pub fn cyclic(&mut self, name: &str, a: &AInfStructure, form: &CyclicForm) -> String {
        let algebra = self.ainf(&format!("{name}.algebra"), a);
        let pairing = self.op(&format!("{name}.pairing"), form.pairing(), &[]);
        self.bundle(name, Bundle::Cyclic { algebra, d: form.d(), pairing })
    }

    /// An `rb` bundle; `over_pair` names a pair bundle whose acting dual is
    /// the family's bimodule.
    pub fn rb(&mut self, name: &str, r: &RbFamily, form: Option<&CyclicForm>, over_pair: Option<&str>) -> String {
        if form.is_none() && over_pair.is_none() {
            if let Some((_, n)) = self.rbs.iter().find(|(b, _)| b == r) {
                return n.clone();
            }
        }
        let variant = match r.variant() {
            RbVariant::Absolute => RbKind::Absolute,
            RbVariant::Relative => RbKind::Relative,
            RbVariant::DgRelative => RbKind::DgRelative,
            RbVariant::Classical => RbKind::Classical,
        };
        let over = match (over_pair, r.module()) {
            (Some(p), _) => p.to_string(),
            (None, Some(m)) => self.bimodule(&format!("{name}.module"), m),
            (None, None) => self.ainf(&format!("{name}.algebra"), r.base()),
        };
        let form = form.map(|f| self.cyclic(&format!("{name}.form"), r.base(), f));
        let mut ops = BTreeMap::new();
        for (&n, op) in r.family().iter() {
            if !op.is_zero() || variant == RbKind::Classical {
                let o = self.op(&format!("{name}.T{n}"), op, &[r.base().space().clone()]);
                ops.insert(n.to_string(), o);
            }
        }
        let b = self.bundle(name, Bundle::Rb { variant, over, ops, form });
        self.rbs.push((r.clone(), b.clone()));
        b
    }

    pub fn rb_module(&mut self, name: &str, m: &RbModule) -> String {
        let rb = self.rb(&format!("{name}.rb"), m.algebra(), None, None);
        let module = self.bimodule(&format!("{name}.module"), m.module());
        let a = m.algebra().base().space().clone();
        let mut ops = BTreeMap::new();
        for (&(p, q), op) in m.family().iter() {
            if !op.is_zero() {
                debug_assert_eq!(op.domain(), bimodule_domain(&a, m.module().module(), p, q).as_slice());
                let o = self.op(&format!("{name}.T{p}{q}"), op, &[m.module().module().clone()]);
                ops.insert(format!("{p},{q}"), o);
            }
        }
        self.bundle(name, Bundle::RbModule { rb, module, ops })
    }

    pub fn pair(&mut self, name: &str, p: &InteractivePair) -> String {
        let acting = self.ainf(&format!("{name}.acting"), p.acting());
        let base = self.ainf(&format!("{name}.base"), p.base());
        let act_on_base = self.op(&format!("{name}.act_on_base"), p.act_on_base(), &[p.base().space().clone()]);
        let act_on_acting = self.op(&format!("{name}.act_on_acting"), p.act_on_acting(), &[p.acting().space().clone()]);
        self.bundle(name, Bundle::Pair { acting, base, act_on_base, act_on_acting })
    }

    pub fn precy(&mut self, name: &str, s: &PreCYStructure) -> String {
        let base = self.ainf(&format!("{name}.base"), s.base());
        let v = s.structure().space().clone();
        let mut ops = BTreeMap::new();
        for (&n, op) in s.family().iter() {
            if !op.is_zero() {
                let o = self.op(&format!("{name}.m{n}"), op, &[v.clone()]);
                ops.insert(n.to_string(), o);
            }
        }
        self.bundle(name, Bundle::Precy { base, ops })
    }

    pub fn double_bracket(&mut self, name: &str, f: &DoubleBracketFamily) -> String {
        let v = f.space().clone();
        let space = self.space(&v);
        let mut ops = BTreeMap::new();
        for (&n, op) in f.family().iter() {
            if !op.is_zero() {
                let o = self.op(&format!("{name}.b{n}"), op, &vec![v.clone(); n]);
                ops.insert(n.to_string(), o);
            }
        }
        let product = f.product().map(|p| self.op(&format!("{name}.product"), p, &[v.clone()]));
        self.bundle(name, Bundle::DoubleBracket { space, ops, product })
    }

    pub fn tensor_family(&mut self, name: &str, r: &TensorFamily, over: &str) -> String {
        let sp = r.algebra().space().clone();
        let mut elements = BTreeMap::new();
        for (&n, t) in r.elements() {
            let terms = t
                .iter()
                .map(|(k, c)| TermDecl { legs: k.iter().map(|&i| sp.label(i).to_string()).collect(), c: c.to_string() })
                .collect();
            elements.insert(n.to_string(), terms);
        }
        self.bundle(name, Bundle::TensorFamily { over: over.to_string(), elements })
    }

    pub fn linf(&mut self, name: &str, f: &LInfFamily) -> String {
        let v = f.space().clone();
        let space = self.space(&v);
        let mut ops = BTreeMap::new();
        for (&n, op) in f.ops() {
            let o = self.op(&format!("{name}.l{n}"), op, &[v.clone()]);
            ops.insert(n.to_string(), o);
        }
        let product = f.product().map(|p| self.op(&format!("{name}.product"), p, &[v.clone()]));
        let (weights, max_weight) = match f.weights() {
            Some((w, m)) => (Some(w.to_vec()), Some(m)),
            None => (None, None),
        };
        self.bundle(name, Bundle::Linf { space, ops, product, weights, max_weight })
    }
}
