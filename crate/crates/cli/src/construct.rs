//! Named constructions. Each verifies its preconditions (through the library
//! builders), builds, re-checks the output and returns it as a new document.

use std::collections::BTreeMap;

use homalg::ainf::{build_trivial_extension, check_cyclic, check_stasheff};
use homalg::dpois::{
    build_brackets_psi, build_sym_poisson, check_cyclic_symmetry, check_double_jacobi, check_double_leibniz,
    check_homotopy_poisson, check_skew_symmetry, extract_brackets_from_precy, schedler_correspondence,
    DoubleBracketFamily,
};
use homalg::multiop::CheckReport;
use homalg::precy::{build_precy_from_pair, check_precy_cyclicity, check_precy_flags, check_precy_stasheff};
use homalg::rb::{
    build_rb_trivial_extension, check_cyclic_rb, check_homotopy_rb_absolute, check_rb_module, cyclic_completion,
    dualize_rb_module, lift_relative_to_absolute, CyclicCompletion,
};
use serde_json::json;

use crate::doc::Document;
use crate::error::{CliError, CliResult};
use crate::export::Writer;
use crate::load::{RbBundle, Resolver};
use crate::report::{combined_verdict, Limits};

pub const CONSTRUCTIONS: [&str; 10] = [
    "trivial-extension",
    "dualize",
    "cyclic-completion",
    "lift",
    "rb-extension",
    "precy",
    "psi-brackets",
    "extract-brackets",
    "schedler",
    "sym-poisson",
];

pub struct Built {
    pub document: Document,
    pub source: String,
    pub reports: Vec<CheckReport>,
    pub notes: Vec<String>,
}

/// The bundle to read: the named one, or the only bundle of a usable kind.
pub fn pick_bundle(res: &Resolver, named: Option<&str>, kinds: &[&str], what: &str) -> CliResult<String> {
    let bundles = &res.document().bundles;
    if let Some(n) = named {
        let b = bundles.get(n).ok_or_else(|| CliError::input(format!("--bundle: unknown bundle `{n}`")))?;
        if !kinds.contains(&b.kind()) {
            return Err(CliError::input(format!(
                "--bundle: {what} needs a bundle of kind {}, `{n}` is `{}`",
                kinds.join(" or "),
                b.kind()
            )));
        }
        return Ok(n.to_string());
    }
    let hits: Vec<&String> = bundles.iter().filter(|(_, b)| kinds.contains(&b.kind())).map(|(n, _)| n).collect();
    match hits.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(CliError::input(format!("{what}: the document has no bundle of kind {}", kinds.join(" or ")))),
        _ => Err(CliError::input(format!(
            "{what}: several candidate bundles ({}), choose one with --bundle",
            hits.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn param<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str, default: T) -> CliResult<T> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| CliError::input(format!("--param {key}={v}: not a valid value"))),
    }
}

fn need_pair(r: &RbBundle, name: &str) -> CliResult<homalg::pair::InteractivePair> {
    r.pair.clone().ok_or_else(|| {
        CliError::input(format!("bundles[`{name}`]: field over must name a pair bundle for this construction"))
    })
}

fn completion_output(
    w: &mut Writer,
    c: &CyclicCompletion,
    lim: Limits,
    lib: impl Fn(homalg::Error) -> CliError,
) -> CliResult<Vec<CheckReport>> {
    w.rb("completion", &c.family, Some(&c.extension.zeta), None);
    Ok(vec![
        check_homotopy_rb_absolute(&c.family, lim.max_arity).map_err(&lib)?,
        check_cyclic_rb(&c.family, Some(&c.extension.zeta), lim.max_arity).map_err(&lib)?,
    ])
}

/// Double Lie brackets are checked for full skew-symmetry; cyclic double
/// Poisson brackets only for cyclic symmetry, with full skewness noted.
fn bracket_checks(
    f: &DoubleBracketFamily,
    n: usize,
    full_skew: bool,
    notes: &mut Vec<String>,
    lib: impl Fn(homalg::Error) -> CliError,
) -> CliResult<Vec<CheckReport>> {
    let symmetry = if full_skew {
        check_skew_symmetry(f, n).map_err(&lib)?
    } else {
        let skew = check_skew_symmetry(f, n).map_err(&lib)?.passed();
        notes.push(format!("fully skew-symmetric: {}", if skew { "yes" } else { "no" }));
        check_cyclic_symmetry(f, n).map_err(&lib)?
    };
    let mut out = vec![symmetry, check_double_jacobi(f, n).map_err(&lib)?];
    if f.product().is_some() {
        out.push(check_double_leibniz(f, n).map_err(&lib)?);
    }
    Ok(out)
}

pub fn construct(
    res: &Resolver,
    op: &str,
    bundle: Option<&str>,
    params: &BTreeMap<String, String>,
    lim: Limits,
) -> CliResult<Built> {
    let at = format!("construction `{op}`");
    let lib = |e| CliError::from_lib(&at, e);
    let n = lim.max_arity;
    let mut w = Writer::new();
    let mut notes = Vec::new();
    let (source, reports) = match op {
        "trivial-extension" => {
            let src = pick_bundle(res, bundle, &["ainf"], op)?;
            let d: i64 = param(params, "d", 0)?;
            let (ext, te) = build_trivial_extension(&res.ainf(&src)?, d).map_err(lib)?;
            w.ainf("extension", &ext);
            w.cyclic("extension-form", &ext, &te.zeta);
            let reps = vec![check_stasheff(&ext, n).map_err(lib)?, check_cyclic(&ext, &te.zeta, n).map_err(lib)?];
            (src, reps)
        }
        "dualize" => {
            let src = pick_bundle(res, bundle, &["rb-module"], op)?;
            let dual = dualize_rb_module(&res.rb_module(&src)?).map_err(lib)?;
            w.rb_module("dual", &dual);
            (src, vec![check_rb_module(&dual, n.saturating_sub(1)).map_err(lib)?])
        }
        "cyclic-completion" | "lift" => {
            let src = pick_bundle(res, bundle, &["rb"], op)?;
            let r = res.rb(&src)?;
            let c = if op == "lift" { lift_relative_to_absolute(&r.family) } else { cyclic_completion(&r.family) }
                .map_err(lib)?;
            let reps = completion_output(&mut w, &c, lim, lib)?;
            (src, reps)
        }
        "rb-extension" => {
            let src = pick_bundle(res, bundle, &["rb-module"], op)?;
            let m = res.rb_module(&src)?;
            let (ext, _) = build_rb_trivial_extension(m.algebra(), &m).map_err(lib)?;
            w.rb("extension", &ext, None, None);
            (src, vec![check_homotopy_rb_absolute(&ext, n).map_err(lib)?])
        }
        "precy" => {
            let src = pick_bundle(res, bundle, &["rb"], op)?;
            let r = res.rb(&src)?;
            let p = need_pair(&r, &src)?;
            let top = param(params, "max_n", r.family.family().max_inputs().max(1))?;
            let s = build_precy_from_pair(&p, &r.family, top).map_err(lib)?;
            w.precy("precy", &s);
            let f = check_precy_flags(&s, n).map_err(lib)?;
            notes.push(format!(
                "flags: good {}, fine {}, manageable {}, special {}",
                f.good, f.fine, f.manageable, f.special
            ));
            let reps = vec![check_precy_stasheff(&s, n).map_err(lib)?, check_precy_cyclicity(&s, n).map_err(lib)?];
            (src, reps)
        }
        "psi-brackets" => {
            let src = pick_bundle(res, bundle, &["rb"], op)?;
            let r = res.rb(&src)?;
            let p = need_pair(&r, &src)?;
            let f = build_brackets_psi(&p, &r.family, n).map_err(lib)?;
            w.double_bracket("brackets", &f);
            (src, bracket_checks(&f, n, false, &mut notes, lib)?)
        }
        "extract-brackets" => {
            let src = pick_bundle(res, bundle, &["precy"], op)?;
            let f = extract_brackets_from_precy(&res.precy(&src)?, n).map_err(lib)?;
            w.double_bracket("brackets", &f);
            (src, bracket_checks(&f, n, false, &mut notes, lib)?)
        }
        "schedler" => {
            let src = pick_bundle(res, bundle, &["tensor-family"], op)?;
            let (r, pair) = res.tensor_family(&src)?;
            let p = pair.ok_or_else(|| {
                CliError::input(format!("bundles[`{src}`]: field over must name a pair bundle for `schedler`"))
            })?;
            let f = schedler_correspondence(&r, p.act_on_base()).map_err(lib)?;
            w.double_bracket("brackets", &f);
            (src, bracket_checks(&f, n, true, &mut notes, lib)?)
        }
        "sym-poisson" => {
            let src = pick_bundle(res, bundle, &["double-bracket"], op)?;
            let l = build_sym_poisson(&res.double_bracket(&src)?, lim.max_word, n).map_err(lib)?;
            w.linf("poisson", &l);
            (src, vec![check_homotopy_poisson(&l, n).map_err(lib)?])
        }
        _ => {
            return Err(CliError::input(format!(
                "--op: unknown construction `{op}` (known: {})",
                CONSTRUCTIONS.join(", ")
            )))
        }
    };
    let mut document = w.finish();
    document.cutoffs.max_arity = Some(lim.max_arity);
    document.cutoffs.max_word = Some(lim.max_word);
    document.certificate = Some(json!({
        "construction": op,
        "source": source,
        "params": params,
        "cutoffs": lim,
        "reports": reports,
        "notes": notes,
        "verdict": combined_verdict(&reports),
    }));
    Ok(Built { document, source, reports, notes })
}
