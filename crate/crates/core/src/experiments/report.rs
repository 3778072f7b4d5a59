//! Report structures shared by the verification suites and the command-line
//! front end. Serialization is deterministic: field order is fixed, floats
//! print through the shortest round-trip formatter, and nothing
//! time-or-thread dependent is recorded.

use serde::Serialize;

use crate::stats::KsVerdict;

/// One named assertion inside an experiment.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<String>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub pass: bool,
}

impl CheckResult {
    fn base(name: &str, ensemble: Option<&str>, kind: &str) -> Self {
        Self {
            name: name.to_string(),
            ensemble: ensemble.map(str::to_string),
            kind: kind.to_string(),
            estimate: None,
            se: None,
            reference: None,
            statistic: None,
            critical: None,
            note: None,
            pass: false,
        }
    }

    /// Estimate must sit within `max_se` standard errors of the reference.
    pub fn mean_within(
        name: &str,
        ensemble: Option<&str>,
        estimate: f64,
        se: f64,
        reference: f64,
        max_se: f64,
    ) -> Self {
        let delta = (estimate - reference).abs();
        let mut check = Self::base(name, ensemble, "mean-within-se");
        check.estimate = Some(estimate);
        check.se = Some(se);
        check.reference = Some(reference);
        check.statistic = (se > 0.0).then(|| delta / se);
        check.critical = Some(max_se);
        check.pass = delta <= max_se * se;
        check
    }

    /// Estimate must sit at least `min_se` standard errors away from the
    /// reference: used to witness that a retained-but-wrong closed form
    /// really disagrees with simulation.
    pub fn mean_departs(
        name: &str,
        ensemble: Option<&str>,
        estimate: f64,
        se: f64,
        reference: f64,
        min_se: f64,
    ) -> Self {
        let delta = (estimate - reference).abs();
        let mut check = Self::base(name, ensemble, "mean-departs-se");
        check.estimate = Some(estimate);
        check.se = Some(se);
        check.reference = Some(reference);
        check.statistic = (se > 0.0).then(|| delta / se);
        check.critical = Some(min_se);
        check.pass = se > 0.0 && delta >= min_se * se;
        check
    }

    pub fn ks(name: &str, ensemble: Option<&str>, verdict: &KsVerdict) -> Self {
        let mut check = Self::base(name, ensemble, "ks");
        check.statistic = Some(verdict.statistic);
        check.critical = Some(verdict.critical);
        check.note = Some(if verdict.m == 0 {
            format!("one-sample n={}", verdict.n)
        } else {
            format!("two-sample n={} m={}", verdict.n, verdict.m)
        });
        check.pass = verdict.pass;
        check
    }

    /// Value must not exceed the bound.
    pub fn bounded(name: &str, ensemble: Option<&str>, value: f64, bound: f64) -> Self {
        let mut check = Self::base(name, ensemble, "bounded");
        check.statistic = Some(value);
        check.critical = Some(bound);
        check.pass = value <= bound;
        check
    }

    /// Plain yes/no outcome with an explanatory note.
    pub fn flag(name: &str, ensemble: Option<&str>, pass: bool, note: &str) -> Self {
        let mut check = Self::base(name, ensemble, "flag");
        check.note = Some(note.to_string());
        check.pass = pass;
        check
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

/// Outcome of one verification experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub experiment: String,
    pub seed: u64,
    pub alpha: f64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, alpha: f64, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { schema: 1, experiment: experiment.to_string(), seed, alpha, checks, pass }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "experiment,name,ensemble,kind,estimate,se,reference,statistic,critical,pass,note\n",
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&self.experiment),
                csv_field(&c.name),
                csv_field(c.ensemble.as_deref().unwrap_or("")),
                csv_field(&c.kind),
                opt_num(c.estimate),
                opt_num(c.se),
                opt_num(c.reference),
                opt_num(c.statistic),
                opt_num(c.critical),
                c.pass,
                csv_field(c.note.as_deref().unwrap_or("")),
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}
