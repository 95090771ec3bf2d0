//! Differential runs of the decision procedures against the brute-force
//! oracle.

use std::fmt::Write;

use serde::Serialize;

use crate::error::Result;
use crate::gen::Case;
use crate::oracle::{pvcsp_oracle, OracleClass};
use crate::relax::{solve, Algorithm, Verdict};

/// Promise acceptance: on `GAP` either answer is correct.
pub fn agrees(oracle: OracleClass, verdict: Verdict) -> bool {
    match oracle {
        OracleClass::Yes => verdict == Verdict::Yes,
        OracleClass::No => verdict == Verdict::No,
        OracleClass::Gap => true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineOutcome {
    pub algorithm: Algorithm,
    pub verdict: Option<Verdict>,
    pub agrees: bool,
    /// Set when the engine failed instead of answering.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub index: usize,
    pub oracle: OracleClass,
    pub engines: Vec<EngineOutcome>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EngineSummary {
    pub algorithm: Option<Algorithm>,
    pub agreements: usize,
    pub disagreements: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub label: String,
    pub records: Vec<Record>,
    pub oracle_yes: usize,
    pub oracle_no: usize,
    pub oracle_gap: usize,
    pub summary: Vec<EngineSummary>,
}

impl ComparisonReport {
    pub fn disagreements(&self) -> usize {
        self.summary.iter().map(|s| s.disagreements).sum()
    }

    pub fn errors(&self) -> usize {
        self.summary.iter().map(|s| s.errors).sum()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "compare {}: {} cases", self.label, self.records.len());
        let _ = writeln!(
            out,
            "oracle: {} YES, {} NO, {} GAP",
            self.oracle_yes, self.oracle_no, self.oracle_gap
        );
        for s in &self.summary {
            let name = s.algorithm.map_or_else(|| "?".to_string(), |a| a.to_string());
            let _ = writeln!(
                out,
                "{name}: {} agree, {} disagree, {} errors",
                s.agreements, s.disagreements, s.errors
            );
        }
        for r in &self.records {
            for e in r.engines.iter().filter(|e| !e.agrees) {
                let answer = match (&e.verdict, &e.error) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(err)) => format!("error: {err}"),
                    (None, None) => "none".into(),
                };
                let _ = writeln!(
                    out,
                    "case {}: oracle {} but {} says {answer}",
                    r.index, r.oracle, e.algorithm
                );
            }
        }
        out
    }
}

/// Runs every engine on every case. Oracle failures (for example a
/// resource guard) abort the run; engine failures are recorded.
pub fn compare_cases(label: &str, cases: &[Case], engines: &[Algorithm]) -> Result<ComparisonReport> {
    let mut summary: Vec<EngineSummary> = engines
        .iter()
        .map(|&a| EngineSummary {
            algorithm: Some(a),
            ..Default::default()
        })
        .collect();
    let mut records = Vec::with_capacity(cases.len());
    let (mut yes, mut no, mut gap) = (0, 0, 0);
    for (index, case) in cases.iter().enumerate() {
        let oracle = pvcsp_oracle(&case.template, &case.instance)?;
        match oracle {
            OracleClass::Yes => yes += 1,
            OracleClass::No => no += 1,
            OracleClass::Gap => gap += 1,
        }
        let mut outcomes = Vec::with_capacity(engines.len());
        for (&algorithm, sum) in engines.iter().zip(summary.iter_mut()) {
            let outcome = match solve(algorithm, &case.template.delta, &case.instance) {
                Ok(answer) => EngineOutcome {
                    algorithm,
                    verdict: Some(answer.verdict),
                    agrees: agrees(oracle, answer.verdict),
                    error: None,
                },
                Err(e) => EngineOutcome {
                    algorithm,
                    verdict: None,
                    agrees: false,
                    error: Some(e.to_string()),
                },
            };
            match (&outcome.error, outcome.agrees) {
                (Some(_), _) => sum.errors += 1,
                (None, true) => sum.agreements += 1,
                (None, false) => sum.disagreements += 1,
            }
            outcomes.push(outcome);
        }
        records.push(Record {
            index,
            oracle,
            engines: outcomes,
        });
    }
    Ok(ComparisonReport {
        label: label.to_string(),
        records,
        oracle_yes: yes,
        oracle_no: no,
        oracle_gap: gap,
        summary,
    })
}
