//! Checker batteries and the bundle kinds they apply to.

use homalg::ainf::{check_bimodule, check_cyclic, check_stasheff};
use homalg::dpois::{
    check_aybe_infinity, check_cyclic_symmetry, check_double_jacobi, check_double_leibniz, check_homotopy_poisson,
    check_linf, check_skew_symmetry,
};
use homalg::multiop::CheckReport;
use homalg::pair::{check_interactive_pair, check_n_derivation, check_strong_n_derivation};
use homalg::precy::{check_precy_cyclicity, check_precy_flags, check_precy_stasheff};
use homalg::rb::{
    check_classical_rb, check_cyclic_rb, check_dg_relative_rb, check_homotopy_rb_absolute, check_homotopy_rb_relative,
    check_rb_module, check_ultracyclic_rb, RbVariant,
};

use crate::doc::{Bundle, RbKind};
use crate::error::{CliError, CliResult};
use crate::load::Resolver;
use crate::report::Limits;

pub const BATTERIES: [&str; 16] = [
    "stasheff",
    "bimodule",
    "rb-absolute",
    "rb-relative",
    "rb-dg",
    "rb-module",
    "cyclic",
    "ultracyclic",
    "pair",
    "derivation",
    "precy",
    "djac",
    "leibniz",
    "aybe",
    "linf",
    "poisson",
];

pub fn default_battery(b: &Bundle) -> &'static str {
    match b {
        Bundle::Ainf { .. } => "stasheff",
        Bundle::Bimodule { .. } | Bundle::RegularBimodule { .. } | Bundle::DualBimodule { .. } => "bimodule",
        Bundle::Rb { variant, .. } => match variant {
            RbKind::Absolute => "rb-absolute",
            RbKind::Relative => "rb-relative",
            RbKind::DgRelative | RbKind::Classical => "rb-dg",
        },
        Bundle::RbModule { .. } => "rb-module",
        Bundle::Cyclic { .. } => "cyclic",
        Bundle::Pair { .. } | Bundle::EndomorphismPair { .. } => "pair",
        Bundle::Derivation { .. } => "derivation",
        Bundle::Precy { .. } => "precy",
        Bundle::DoubleBracket { .. } => "djac",
        Bundle::TensorFamily { .. } => "aybe",
        Bundle::Linf { product: Some(_), .. } => "poisson",
        Bundle::Linf { .. } => "linf",
    }
}

/// Reports of one battery, plus informational notes.
pub struct Outcome {
    pub reports: Vec<CheckReport>,
    pub notes: Vec<String>,
}

impl From<Vec<CheckReport>> for Outcome {
    fn from(reports: Vec<CheckReport>) -> Self {
        Outcome { reports, notes: Vec::new() }
    }
}

pub fn run_battery(res: &Resolver, name: &str, battery: &str, lim: Limits) -> CliResult<Outcome> {
    let bundle = res
        .document()
        .bundles
        .get(name)
        .ok_or_else(|| CliError::input(format!("--bundle: unknown bundle `{name}`")))?;
    if !BATTERIES.contains(&battery) {
        return Err(CliError::input(format!(
            "--battery: unknown battery `{battery}` (known: {})",
            BATTERIES.join(", ")
        )));
    }
    let at = format!("battery `{battery}` on bundle `{name}`");
    let lib = |e| CliError::from_lib(&at, e);
    let n = lim.max_arity;
    let out: Outcome = match (battery, bundle) {
        ("stasheff", Bundle::Ainf { .. }) => vec![check_stasheff(&res.ainf(name)?, n).map_err(lib)?].into(),
        ("stasheff", Bundle::Cyclic { .. }) => vec![check_stasheff(&res.cyclic(name)?.0, n).map_err(lib)?].into(),
        ("stasheff", Bundle::Precy { .. }) => vec![check_precy_stasheff(&res.precy(name)?, n).map_err(lib)?].into(),
        ("bimodule", Bundle::Bimodule { .. } | Bundle::RegularBimodule { .. } | Bundle::DualBimodule { .. }) => {
            vec![check_bimodule(&res.bimodule(name)?, n.saturating_sub(1)).map_err(lib)?].into()
        }
        ("rb-absolute" | "rb-relative" | "rb-dg" | "cyclic" | "ultracyclic", Bundle::Rb { .. }) => {
            let r = res.rb(name)?;
            let f = &r.family;
            let report = match (battery, f.variant()) {
                ("rb-absolute", RbVariant::Absolute) => check_homotopy_rb_absolute(f, n),
                ("rb-relative", RbVariant::Relative | RbVariant::DgRelative) => check_homotopy_rb_relative(f, n),
                ("rb-dg", RbVariant::DgRelative) => check_dg_relative_rb(f, n),
                ("rb-dg", RbVariant::Classical) => {
                    let t = f.t(1).expect("classical operator");
                    check_classical_rb(f.base(), f.module().expect("relative"), t)
                }
                ("cyclic", _) => check_cyclic_rb(f, r.form.as_ref(), n),
                ("ultracyclic", _) => check_ultracyclic_rb(f, r.form.as_ref(), n),
                _ => return Err(CliError::input(format!("{at}: does not apply to a {:?} family", f.variant()))),
            };
            vec![report.map_err(lib)?].into()
        }
        ("rb-module", Bundle::RbModule { .. }) => {
            vec![check_rb_module(&res.rb_module(name)?, n.saturating_sub(1)).map_err(lib)?].into()
        }
        ("cyclic", Bundle::Cyclic { .. }) => {
            let (a, form) = res.cyclic(name)?;
            vec![check_cyclic(&a, &form, n).map_err(lib)?].into()
        }
        ("pair", Bundle::Pair { .. } | Bundle::EndomorphismPair { .. }) => {
            vec![check_interactive_pair(&res.pair(name)?).map_err(lib)?].into()
        }
        ("derivation", Bundle::Derivation { .. }) => {
            let (p, t, strong) = res.derivation(name)?;
            let r = if strong { check_strong_n_derivation(&p, &t) } else { check_n_derivation(&p, &t) };
            vec![r.map_err(lib)?].into()
        }
        ("precy", Bundle::Precy { .. }) => {
            let s = res.precy(name)?;
            let st = check_precy_stasheff(&s, n).map_err(lib)?;
            let cy = check_precy_cyclicity(&s, n).map_err(lib)?;
            let f = check_precy_flags(&s, n).map_err(lib)?;
            Outcome {
                reports: vec![st, cy],
                notes: vec![format!(
                    "flags: good {}, fine {}, manageable {}, special {}",
                    f.good, f.fine, f.manageable, f.special
                )],
            }
        }
        ("djac", Bundle::DoubleBracket { .. }) => {
            let f = res.double_bracket(name)?;
            vec![check_skew_symmetry(&f, n).map_err(lib)?, check_double_jacobi(&f, n).map_err(lib)?].into()
        }
        // cyclic homotopy double Poisson: only cyclic symmetry is required
        ("leibniz", Bundle::DoubleBracket { .. }) => {
            let f = res.double_bracket(name)?;
            vec![
                check_cyclic_symmetry(&f, n).map_err(&lib)?,
                check_double_jacobi(&f, n).map_err(&lib)?,
                check_double_leibniz(&f, n).map_err(lib)?,
            ]
            .into()
        }
        ("aybe", Bundle::TensorFamily { .. }) => {
            vec![check_aybe_infinity(&res.tensor_family(name)?.0, n).map_err(lib)?].into()
        }
        ("linf", Bundle::Linf { .. }) => vec![check_linf(&res.linf(name)?, n).map_err(lib)?].into(),
        ("poisson", Bundle::Linf { .. }) => vec![check_homotopy_poisson(&res.linf(name)?, n).map_err(lib)?].into(),
        _ => return Err(CliError::input(format!("{at}: does not apply to bundle kind `{}`", bundle.kind()))),
    };
    Ok(out)
}
