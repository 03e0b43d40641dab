//! The on-disk structure document.
//!
//! Spaces and operations are flat, named declarations; bundles tie them into
//! algebraic structures by name. Coefficients are exact rationals written as
//! strings, never floats.

use std::collections::BTreeMap;

use homalg::kernel::space::BasisElem;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "homalg/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    pub spaces: Vec<SpaceDecl>,
    pub operations: Vec<OpDecl>,
    pub bundles: BTreeMap<String, Bundle>,
    #[serde(default, skip_serializing_if = "Cutoffs::is_empty")]
    pub cutoffs: Cutoffs,
    /// Checker reports attached by `construct`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDecl {
    pub name: String,
    pub basis: Vec<BasisElem>,
}

/// A multilinear operation. `output` lists tensor factors: one space for an
/// ordinary operation, several for a map into a tensor power, none for a
/// scalar-valued form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDecl {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: Vec<String>,
    pub degree: i64,
    pub entries: Vec<EntryDecl>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub out: Vec<String>,
    pub c: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word: Option<usize>,
}

impl Cutoffs {
    pub fn is_empty(&self) -> bool {
        self.max_arity.is_none() && self.max_word.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RbKind {
    Absolute,
    Relative,
    DgRelative,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    pub legs: Vec<String>,
    pub c: String,
}

/// Keys of `ops` maps are arities (`"2"`) or bimodule positions (`"1,0"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Bundle {
    Ainf {
        space: String,
        ops: BTreeMap<String, String>,
    },
    Bimodule {
        algebra: String,
        module: String,
        ops: BTreeMap<String, String>,
    },
    /// An algebra over itself.
    RegularBimodule {
        algebra: String,
    },
    /// The linear dual of another bimodule bundle.
    DualBimodule {
        of: String,
    },
    /// `over` names an `ainf` bundle (absolute), a bimodule bundle, or a
    /// pair bundle (relative, on the dual of the acting algebra).
    Rb {
        variant: RbKind,
        over: String,
        ops: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        form: Option<String>,
    },
    RbModule {
        rb: String,
        module: String,
        ops: BTreeMap<String, String>,
    },
    Cyclic {
        algebra: String,
        d: i64,
        pairing: String,
    },
    Pair {
        acting: String,
        base: String,
        act_on_base: String,
        act_on_acting: String,
    },
    EndomorphismPair {
        base: String,
    },
    Derivation {
        pair: String,
        op: String,
        #[serde(default)]
        strong: bool,
    },
    Precy {
        base: String,
        ops: BTreeMap<String, String>,
    },
    DoubleBracket {
        space: String,
        ops: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        product: Option<String>,
    },
    /// `over` names an `ainf` bundle or a pair bundle (its acting algebra).
    TensorFamily {
        over: String,
        elements: BTreeMap<String, Vec<TermDecl>>,
    },
    Linf {
        space: String,
        ops: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        product: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_weight: Option<usize>,
    },
}

impl Bundle {
    pub fn kind(&self) -> &'static str {
        match self {
            Bundle::Ainf { .. } => "ainf",
            Bundle::Bimodule { .. } => "bimodule",
            Bundle::RegularBimodule { .. } => "regular-bimodule",
            Bundle::DualBimodule { .. } => "dual-bimodule",
            Bundle::Rb { .. } => "rb",
            Bundle::RbModule { .. } => "rb-module",
            Bundle::Cyclic { .. } => "cyclic",
            Bundle::Pair { .. } => "pair",
            Bundle::EndomorphismPair { .. } => "endomorphism-pair",
            Bundle::Derivation { .. } => "derivation",
            Bundle::Precy { .. } => "precy",
            Bundle::DoubleBracket { .. } => "double-bracket",
            Bundle::TensorFamily { .. } => "tensor-family",
            Bundle::Linf { .. } => "linf",
        }
    }
}

impl Document {
    pub fn empty() -> Self {
        Document {
            schema_version: SCHEMA_VERSION.into(),
            spaces: Vec::new(),
            operations: Vec::new(),
            bundles: BTreeMap::new(),
            cutoffs: Cutoffs::default(),
            certificate: None,
        }
    }

    /// Parse JSON text. Syntax and shape errors carry a line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "schema_version: expected `{SCHEMA_VERSION}`, found `{}`",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    /// Canonical text: two-space indentation, fixed key order, trailing newline.
    pub fn print(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}
