//! Hypothesis-plus-consequence records shared by the rigidity diagnostics.

use serde::Serialize;

/// Sampled values below `-HYPOTHESIS_TOL` violate a sign hypothesis; values
/// above `HYPOTHESIS_TOL` count as strict.
pub const HYPOTHESIS_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A hypothesis fails; nothing is concluded.
    NotApplicable,
    /// All hypotheses hold and the forced conclusion is observed.
    ConclusionConsistent,
    /// All hypotheses hold but the forced conclusion fails, so the inputs are
    /// inconsistent with the identities the statement rests on.
    Contradiction,
    /// The sampled hypotheses hold, but others (completeness, integrability
    /// on a noncompact manifold) cannot be checked on a truncation.
    HypothesesUnverifiable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    /// Point where the hypothesis fails, or where a strict inequality is
    /// attained.
    pub witness: Option<Witness>,
}

impl Hypothesis {
    pub fn new(name: &str, holds: bool, witness: Option<Witness>) -> Hypothesis {
        Hypothesis { name: name.into(), holds, witness }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatementReport {
    pub statement: String,
    pub hypotheses: Vec<Hypothesis>,
    /// True only when every listed hypothesis holds.
    pub applicable: bool,
    pub conclusion: String,
    /// `None` when the conclusion was not judged.
    pub conclusion_holds: Option<bool>,
    pub verdict: Verdict,
    pub note: String,
}

impl StatementReport {
    /// Assemble a report; `conclusion_holds` is consulted only when every
    /// hypothesis holds, and `verifiable = false` downgrades an applicable
    /// statement to [`Verdict::HypothesesUnverifiable`].
    pub fn judge(
        statement: &str,
        hypotheses: Vec<Hypothesis>,
        conclusion: &str,
        conclusion_holds: bool,
        verifiable: bool,
        note: String,
    ) -> StatementReport {
        let applicable = hypotheses.iter().all(|h| h.holds);
        let (verdict, judged) = match (applicable, verifiable, conclusion_holds) {
            (false, _, _) => (Verdict::NotApplicable, None),
            (true, false, c) => (Verdict::HypothesesUnverifiable, Some(c)),
            (true, true, true) => (Verdict::ConclusionConsistent, Some(true)),
            (true, true, false) => (Verdict::Contradiction, Some(false)),
        };
        StatementReport {
            statement: statement.into(),
            hypotheses,
            applicable,
            conclusion: conclusion.into(),
            conclusion_holds: judged,
            verdict,
            note,
        }
    }
}
