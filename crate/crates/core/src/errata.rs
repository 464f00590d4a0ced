//! Per-entry verdicts from diffing a derived table against a printed one.

use std::fmt;

use crate::bases::BasisLabel;
use crate::record::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Entrywise equal.
    Exact,
    /// Equal after one global phase.
    UpToPhase,
    /// Different matrix, not related by a global phase.
    Mismatch,
    /// Same partner, opposite coefficient sign.
    SignMismatch,
    /// Different partner label.
    PartnerMismatch,
    /// The derived row expands into several partner terms.
    NoSinglePartner,
}

impl Verdict {
    pub fn is_match(self) -> bool {
        matches!(self, Verdict::Exact | Verdict::UpToPhase)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Exact => "match-exact",
            Verdict::UpToPhase => "match-up-to-global-phase",
            Verdict::Mismatch => "mismatch",
            Verdict::SignMismatch => "sign-mismatch",
            Verdict::PartnerMismatch => "partner-mismatch",
            Verdict::NoSinglePartner => "no-single-partner",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrataLine {
    pub table: &'static str,
    pub label: BasisLabel,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrataReport {
    pub lines: Vec<ErrataLine>,
    pub warnings: Vec<String>,
}

impl ErrataReport {
    pub fn has_mismatch(&self) -> bool {
        self.lines.iter().any(|l| !l.verdict.is_match())
    }

    pub fn verdict(&self, label: BasisLabel) -> Option<Verdict> {
        self.lines.iter().find(|l| l.label == label).map(|l| l.verdict)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.lines.iter().filter(|l| l.verdict == verdict).count()
    }

    pub fn mismatched_labels(&self) -> Vec<BasisLabel> {
        self.lines.iter().filter(|l| !l.verdict.is_match()).map(|l| l.label).collect()
    }

    pub fn merge(mut self, other: ErrataReport) -> Self {
        self.lines.extend(other.lines);
        self.warnings.extend(other.warnings);
        self
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self
            .lines
            .iter()
            .map(|l| {
                Record::new("errata")
                    .with_str("table", l.table)
                    .with_str("label", &l.label.to_string())
                    .with_str("verdict", l.verdict.as_str())
                    .with_str("detail", &l.detail)
            })
            .collect();
        out.extend(self.warnings.iter().map(|w| Record::new("warning").with_str("message", w)));
        out
    }
}

impl fmt::Display for ErrataReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            write!(f, "{:<12} {:<4} {}", l.table, l.label.to_string(), l.verdict)?;
            if !l.detail.is_empty() {
                write!(f, "  {}", l.detail)?;
            }
            writeln!(f)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
