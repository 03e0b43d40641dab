//! Command reports, in text and JSON.

use std::fmt::Write as _;

use homalg::multiop::{CheckReport, Verdict};
use serde::Serialize;

/// Residual lines shown per checker in text output; JSON keeps them all.
const TEXT_ENTRIES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_arity: usize,
    pub max_word: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    /// The command, without the worker count and output options.
    pub command: Vec<String>,
    pub cutoffs: Limits,
    pub reports: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

pub fn combined_verdict(reports: &[CheckReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict() == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict() == Verdict::PassUpToCutoff) {
        Verdict::PassUpToCutoff
    } else {
        Verdict::Pass
    }
}

impl RunReport {
    pub fn new(command: Vec<String>, cutoffs: Limits, reports: Vec<CheckReport>, notes: Vec<String>) -> Self {
        let verdict = combined_verdict(&reports);
        RunReport { command, cutoffs, reports, notes, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "homalg {}", self.command.join(" "));
        let _ = writeln!(s, "cutoffs: max-arity {}, max-word {}", self.cutoffs.max_arity, self.cutoffs.max_word);
        for r in &self.reports {
            let _ = writeln!(
                s,
                "{}: {} (cutoff {}, {} instances, {} residuals, {} truncation-limited)",
                r.check,
                r.verdict(),
                r.cutoff,
                r.checked,
                r.entries.len(),
                r.truncated.len()
            );
            for e in r.entries.iter().take(TEXT_ENTRIES) {
                let _ = writeln!(
                    s,
                    "  {}{:?}: ({}) -> {} : {}",
                    e.identity,
                    e.indices,
                    e.inputs.join(", "),
                    e.output,
                    e.value
                );
            }
            if r.entries.len() > TEXT_ENTRIES {
                let _ = writeln!(s, "  ... {} more", r.entries.len() - TEXT_ENTRIES);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        if let Some(e) = self.reports.iter().find_map(|r| r.first()) {
            let _ = writeln!(
                s,
                "first residual: {}{:?} at ({}) -> {} = {}",
                e.identity,
                e.indices,
                e.inputs.join(", "),
                e.output,
                e.value
            );
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }
}
