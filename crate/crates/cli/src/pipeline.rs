//! Round trips through the equivalences between structures.

use homalg::dpois::{
    build_brackets_psi, check_aybe_infinity, check_double_jacobi, check_skew_symmetry, check_tensor_skew,
    extract_brackets_from_precy, rb_to_tensor, schedler_correspondence, schedler_inverse, tensor_to_rb, Tensor,
    TensorFamily,
};
use homalg::kernel::Scalar;
use homalg::multiop::{add_into, CheckReport, MultilinearOp};
use homalg::precy::build_precy_from_pair;
use homalg::rb::{check_dg_relative_rb, RbFamily};

use crate::construct::pick_bundle;
use crate::error::{CliError, CliResult};
use crate::load::Resolver;
use crate::report::Limits;

pub const PIPELINES: [&str; 2] = ["rb-aybe-double-lie", "psi-precy"];

/// Accepts the arrow spellings as aliases.
pub fn canonical_pipeline(name: &str) -> Option<&'static str> {
    match name {
        "rb-aybe-double-lie" | "rb↔aybe↔double-lie" | "rb<->aybe<->double-lie" => Some("rb-aybe-double-lie"),
        "psi-precy" | "psi↔precy" | "psi<->precy" => Some("psi-precy"),
        _ => None,
    }
}

/// `a - b` entry by entry, recorded under `identity`.
fn compare_ops(
    report: &mut CheckReport,
    identity: &str,
    n: usize,
    a: Option<&MultilinearOp>,
    b: Option<&MultilinearOp>,
) -> CliResult<()> {
    let diff = match (a, b) {
        (None, None) => {
            report.checked += 1;
            return Ok(());
        }
        (Some(x), None) => x.clone(),
        (None, Some(y)) => y.scale(&-Scalar::one()),
        (Some(x), Some(y)) => {
            let mut d = x.clone();
            add_into(&mut d, &-Scalar::one(), y).map_err(|e| CliError::from_lib(identity, e))?;
            d
        }
    };
    report.absorb(identity, &[n as i64], &diff);
    Ok(())
}

fn compare_tensors(report: &mut CheckReport, identity: &str, a: &TensorFamily, b: &TensorFamily) {
    let sp = a.algebra().space();
    let empty = Tensor::new();
    let arities: std::collections::BTreeSet<usize> = a.elements().keys().chain(b.elements().keys()).copied().collect();
    for n in arities {
        report.checked += 1;
        let (x, y) = (a.r(n).unwrap_or(&empty), b.r(n).unwrap_or(&empty));
        let keys: std::collections::BTreeSet<&Vec<usize>> = x.keys().chain(y.keys()).collect();
        for k in keys {
            let zero = Scalar::zero();
            let v = x.get(k).unwrap_or(&zero).clone() - y.get(k).unwrap_or(&zero);
            let legs = k.iter().map(|&i| sp.label(i).to_string()).collect();
            report.push(identity, &[n as i64], legs, "r".into(), v);
        }
    }
}

fn rb_leg(t: &RbFamily, lim: Limits) -> CliResult<CheckReport> {
    let top = t.family().max_inputs().max(1);
    check_dg_relative_rb(t, lim.max_arity.max(2 * top)).map_err(|e| CliError::from_lib("operator leg", e))
}

pub fn roundtrip(
    res: &Resolver,
    pipeline: &str,
    bundle: Option<&str>,
    lim: Limits,
) -> CliResult<(Vec<CheckReport>, Vec<String>)> {
    let name = canonical_pipeline(pipeline).ok_or_else(|| {
        CliError::input(format!("--pipeline: unknown pipeline `{pipeline}` (known: {})", PIPELINES.join(", ")))
    })?;
    let n = lim.max_arity;
    let mut notes = Vec::new();
    let mut reports = Vec::new();
    match name {
        "rb-aybe-double-lie" => {
            let src = pick_bundle(res, bundle, &["rb", "tensor-family"], name)?;
            let lib = |e| CliError::from_lib(&format!("pipeline `{name}` on `{src}`"), e);
            let (p, start_t, r) = if res.document().bundles[&src].kind() == "rb" {
                let b = res.rb(&src)?;
                let p = b
                    .pair
                    .ok_or_else(|| CliError::input(format!("bundles[`{src}`]: field over must name a pair bundle")))?;
                reports.push(rb_leg(&b.family, lim)?);
                let r = rb_to_tensor(&p, &b.family).map_err(lib)?;
                (p, Some(b.family), r)
            } else {
                let (r, p) = res.tensor_family(&src)?;
                let p =
                    p.ok_or_else(|| CliError::input(format!("bundles[`{src}`]: field over must name a pair bundle")))?;
                (p, None, r)
            };
            let skew = check_tensor_skew(&r, n.max(r.max_n())).map_err(lib)?;
            let gate = skew.clone();
            reports.push(check_aybe_infinity(&r, n).map_err(lib)?);
            reports.push(skew);
            if !gate.passed() {
                let e = gate.first().expect("entry");
                notes.push(format!(
                    "refused at the skewness gate: {}{:?} at ({}) = {}",
                    e.identity,
                    e.indices,
                    e.inputs.join(", "),
                    e.value
                ));
                return Ok((reports, notes));
            }
            let f = schedler_correspondence(&r, p.act_on_base()).map_err(lib)?;
            reports.push(check_skew_symmetry(&f, n).map_err(lib)?);
            reports.push(check_double_jacobi(&f, n).map_err(lib)?);
            let back = schedler_inverse(&f, p.acting(), p.act_on_base()).map_err(lib)?;
            let mut tensor_cmp = CheckReport::new("roundtrip-tensor", n);
            compare_tensors(&mut tensor_cmp, "roundtrip-tensor", &back, &r);
            reports.push(tensor_cmp);
            if back.r(1).is_some() {
                notes.push("r_1 has no Rota-Baxter counterpart; the operator leg is skipped".into());
            } else {
                let t = tensor_to_rb(&p, &back).map_err(lib)?;
                let mut op_cmp = CheckReport::new("roundtrip-rb", n);
                match &start_t {
                    Some(t0) => {
                        let top = t.family().max_inputs().max(t0.family().max_inputs());
                        for k in 1..=top {
                            compare_ops(&mut op_cmp, "roundtrip-rb", k, t.t(k), t0.t(k))?;
                        }
                    }
                    None => {
                        reports.push(rb_leg(&t, lim)?);
                        let again = rb_to_tensor(&p, &t).map_err(lib)?;
                        compare_tensors(&mut op_cmp, "roundtrip-rb", &again, &r);
                    }
                }
                reports.push(op_cmp);
            }
        }
        _ => {
            let src = pick_bundle(res, bundle, &["rb"], name)?;
            let lib = |e| CliError::from_lib(&format!("pipeline `{name}` on `{src}`"), e);
            let b = res.rb(&src)?;
            let p = b
                .pair
                .ok_or_else(|| CliError::input(format!("bundles[`{src}`]: field over must name a pair bundle")))?;
            let psi = build_brackets_psi(&p, &b.family, n).map_err(lib)?;
            let top = b.family.family().max_inputs().max(1);
            let s = build_precy_from_pair(&p, &b.family, top).map_err(lib)?;
            let ext = extract_brackets_from_precy(&s, n).map_err(lib)?;
            let mut cmp = CheckReport::new("psi-vs-precy", n);
            for k in 1..=n {
                // the Ψ bracket of arity k is (-1)^{k-1} times the extracted one
                let e = ext.bracket(k).map(|op| op.scale(&Scalar::sign(k as i64 - 1)));
                compare_ops(&mut cmp, "psi-vs-precy", k, psi.bracket(k), e.as_ref())?;
            }
            reports.push(cmp);
        }
    }
    Ok((reports, notes))
}
