//! Structured outcomes of the axiom suites.
//!
//! A suite runs a list of laws over seeded samples and produces one
//! [`LawRecord`] per law. Failures carry a [`Counterexample`] whose
//! inputs are serialized in the expression grammar, so every reported
//! failure can be replayed through the CLI parser.

use serde::Serialize;

/// A failing instance: inputs as replayable literals plus the two sides
/// of the identity that differed.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of a single law within a suite.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LawRecord {
    pub law: String,
    pub paper_anchor: String,
    pub trials: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Outcome of a whole suite. Everything except `wall_ms` is a pure
/// function of the suite id, the generator parameters, and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub suite: String,
    pub laws: Vec<LawRecord>,
    pub wall_ms: u128,
}

impl AxiomReport {
    pub fn new(suite: impl Into<String>) -> Self {
        AxiomReport {
            suite: suite.into(),
            laws: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, law: LawRecord) {
        self.laws.push(law);
    }

    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(|l| l.passed)
    }

    /// JSON with the timing field; field order is fixed by declaration
    /// order, so output is deterministic up to `wall_ms`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing field zeroed: the comparison surface for the
    /// byte-identical determinism guarantee.
    pub fn to_json_stable(&self) -> String {
        let mut stable = self.clone();
        stable.wall_ms = 0;
        serde_json::to_string_pretty(&stable).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite {} ({} ms)\n", self.suite, self.wall_ms));
        for l in &self.laws {
            let status = if l.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "  {:<10} {:<44} trials={:<5} {}\n",
                l.law, l.paper_anchor, l.trials, status
            ));
            if let Some(ce) = &l.counterexample {
                for (i, input) in ce.inputs.iter().enumerate() {
                    out.push_str(&format!("    input[{i}]: {input}\n"));
                }
                out.push_str(&format!("    lhs: {}\n    rhs: {}\n", ce.lhs, ce.rhs));
            }
        }
        out
    }
}

/// Tracks the first counterexample for one law across trials.
#[derive(Debug, Clone)]
pub struct LawTracker {
    law: String,
    paper_anchor: String,
    trials: u64,
    counterexample: Option<Counterexample>,
}

impl LawTracker {
    pub fn new(law: impl Into<String>, paper_anchor: impl Into<String>) -> Self {
        LawTracker {
            law: law.into(),
            paper_anchor: paper_anchor.into(),
            trials: 0,
            counterexample: None,
        }
    }

    /// Record one trial: `witness` is `None` when the law held.
    pub fn observe(&mut self, witness: Option<Counterexample>) {
        self.trials += 1;
        if self.counterexample.is_none() {
            self.counterexample = witness;
        }
    }

    /// Convenience for equality-of-maps laws.
    pub fn check_eq<T: PartialEq + std::fmt::Display>(
        &mut self,
        inputs: &[String],
        lhs: &T,
        rhs: &T,
    ) {
        let witness = if lhs == rhs {
            None
        } else {
            Some(Counterexample {
                inputs: inputs.to_vec(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            })
        };
        self.observe(witness);
    }

    pub fn finish(self) -> LawRecord {
        LawRecord {
            law: self.law,
            paper_anchor: self.paper_anchor,
            trials: self.trials,
            passed: self.counterexample.is_none(),
            counterexample: self.counterexample,
        }
    }
}
