// SPDX-License-Identifier: Apache-2.0

//! Result tables and their CSV/JSON emission.
//!
//! Floats are written as `{:.16e}`, i.e. 17 significant digits, which
//! re-parse to the identical double.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::config::OutputFormat;
use super::RunError;
use crate::functionals::PIndex;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_p(p: Option<PIndex>) -> String {
    p.map(|p| match p {
        PIndex::Finite(x) => fmt_f64(x),
        PIndex::Infinite => "inf".to_string(),
    })
    .unwrap_or_default()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// One point of an `α ↦ e(α)` curve. `p` is empty for classical systems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub system_id: String,
    pub p: Option<PIndex>,
    pub t: f64,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MeasureKind {
    P,
    Q,
    ES,
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::P => "P",
            MeasureKind::Q => "Q",
            MeasureKind::ES => "ES",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub system_id: String,
    pub t: f64,
    pub atom: f64,
    pub weight: f64,
    pub measure: MeasureKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Failed, but the invariant is not expected to hold for this system
    /// (e.g. a symmetry on a system without time-reversal invariance).
    ExpectedFail,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::ExpectedFail => "xfail",
        })
    }
}

/// How a check value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value <= threshold`
    AtMost,
    /// `value > threshold`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub system_id: String,
    pub check: String,
    pub p: Option<PIndex>,
    pub t: Option<f64>,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl CheckRow {
    /// Residual check `value <= tolerance`. When `expected` is false a
    /// failure is reported as [`CheckStatus::ExpectedFail`].
    pub fn at_most(system_id: &str, check: &str, value: f64, tolerance: f64, expected: bool) -> Self {
        let ok = value <= tolerance;
        CheckRow {
            system_id: system_id.to_string(),
            check: check.to_string(),
            p: None,
            t: None,
            value,
            bound: Bound::AtMost,
            tolerance,
            status: status(ok, expected),
        }
    }

    pub fn above(system_id: &str, check: &str, value: f64, threshold: f64) -> Self {
        CheckRow {
            bound: Bound::Above,
            status: status(value > threshold, true),
            ..CheckRow::at_most(system_id, check, value, threshold, true)
        }
    }

    pub fn with_p(mut self, p: PIndex) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }
}

fn status(ok: bool, expected: bool) -> CheckStatus {
    match (ok, expected) {
        (true, _) => CheckStatus::Pass,
        (false, true) => CheckStatus::Fail,
        (false, false) => CheckStatus::ExpectedFail,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl RunMetadata {
    pub fn new(command: &str, config_text: &str, seed: Option<u64>) -> Self {
        use sha2::{Digest, Sha256};
        RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_sha256: hex::encode(Sha256::digest(config_text.as_bytes())),
            seed,
            wall_time_seconds: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultTable {
    pub curves: Vec<CurveRow>,
    pub distributions: Vec<DistributionRow>,
    pub checks: Vec<CheckRow>,
}

fn rank(order: &[String], id: &str) -> usize {
    order.iter().position(|s| s == id).unwrap_or(usize::MAX)
}

fn cmp_opt_f64(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.is_some().cmp(&b.is_some()),
    }
}

impl ResultTable {
    pub fn extend(&mut self, other: ResultTable) {
        self.curves.extend(other.curves);
        self.distributions.extend(other.distributions);
        self.checks.extend(other.checks);
    }

    /// Sorts rows by system (in `order`), then `p` (∞ last), `t` and `α`.
    /// Rows that tie keep their insertion order.
    pub fn sort(&mut self, order: &[String]) {
        self.curves.sort_by(|a, b| {
            rank(order, &a.system_id)
                .cmp(&rank(order, &b.system_id))
                .then(a.p.cmp(&b.p))
                .then(a.t.total_cmp(&b.t))
                .then(a.alpha.total_cmp(&b.alpha))
        });
        self.distributions.sort_by(|a, b| {
            rank(order, &a.system_id)
                .cmp(&rank(order, &b.system_id))
                .then(a.measure.cmp(&b.measure))
                .then(a.t.total_cmp(&b.t))
                .then(a.atom.total_cmp(&b.atom))
        });
        self.checks.sort_by(|a, b| {
            rank(order, &a.system_id)
                .cmp(&rank(order, &b.system_id))
                .then(a.p.cmp(&b.p))
                .then(cmp_opt_f64(a.t, b.t))
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn curves_csv(&self) -> String {
        let mut out = String::from("system_id,p,t,alpha,value\n");
        for r in &self.curves {
            out.push_str(&csv_line(&[
                r.system_id.clone(),
                fmt_p(r.p),
                fmt_f64(r.t),
                fmt_f64(r.alpha),
                fmt_f64(r.value),
            ]));
        }
        out
    }

    pub fn distributions_csv(&self) -> String {
        let mut out = String::from("system_id,t,atom,weight,measure\n");
        for r in &self.distributions {
            out.push_str(&csv_line(&[
                r.system_id.clone(),
                fmt_f64(r.t),
                fmt_f64(r.atom),
                fmt_f64(r.weight),
                r.measure.to_string(),
            ]));
        }
        out
    }

    pub fn checks_csv(&self) -> String {
        let mut out = String::from("system_id,check,p,t,value,bound,tolerance,status\n");
        for r in &self.checks {
            out.push_str(&csv_line(&[
                r.system_id.clone(),
                r.check.clone(),
                fmt_p(r.p),
                fmt_opt(r.t),
                fmt_f64(r.value),
                match r.bound {
                    Bound::AtMost => "<=".into(),
                    Bound::Above => ">".into(),
                },
                fmt_f64(r.tolerance),
                r.status.to_string(),
            ]));
        }
        out
    }

    pub fn to_json(&self, meta: &RunMetadata) -> String {
        #[derive(Serialize)]
        struct Document<'a> {
            metadata: &'a RunMetadata,
            #[serde(flatten)]
            table: &'a ResultTable,
        }
        let mut s = serde_json::to_string_pretty(&Document { metadata: meta, table: self })
            .expect("result tables serialize");
        s.push('\n');
        s
    }

    /// Writes `<stem>_curves.csv`, `<stem>_distributions.csv`,
    /// `<stem>_checks.csv` (non-empty tables only) and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str, formats: &[OutputFormat], meta: &RunMetadata) -> Result<Vec<String>, RunError> {
        let io = |path: &Path| {
            let p = path.display().to_string();
            move |source| RunError::Io { path: p, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut files = Vec::new();
        let mut emit = |name: String, body: String| -> Result<(), RunError> {
            let path = dir.join(&name);
            std::fs::write(&path, body).map_err(io(&path))?;
            files.push(name);
            Ok(())
        };
        if formats.contains(&OutputFormat::Csv) {
            if !self.curves.is_empty() {
                emit(format!("{stem}_curves.csv"), self.curves_csv())?;
            }
            if !self.distributions.is_empty() {
                emit(format!("{stem}_distributions.csv"), self.distributions_csv())?;
            }
            if !self.checks.is_empty() {
                emit(format!("{stem}_checks.csv"), self.checks_csv())?;
            }
        }
        if formats.contains(&OutputFormat::Json) {
            emit(format!("{stem}.json"), self.to_json(meta))?;
        }
        Ok(files)
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = fmt_f64(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let row = |p, alpha| CurveRow {
            system_id: "a".into(),
            p: Some(p),
            t: 1.0,
            alpha,
            value: 0.0,
        };
        let mut table = ResultTable {
            curves: vec![row(PIndex::Infinite, 0.0), row(PIndex::Finite(2.0), 0.5), row(PIndex::Finite(2.0), 0.0)],
            ..Default::default()
        };
        table.sort(&["a".into()]);
        let ps: Vec<_> = table.curves.iter().map(|r| (r.p.unwrap(), r.alpha)).collect();
        assert_eq!(ps, vec![(PIndex::Finite(2.0), 0.0), (PIndex::Finite(2.0), 0.5), (PIndex::Infinite, 0.0)]);
        let csv = table.curves_csv();
        assert!(csv.starts_with("system_id,p,t,alpha,value\n"));
        assert!(csv.lines().last().unwrap().starts_with("a,inf,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn expected_fail_is_not_failure() {
        let xfail = CheckRow::at_most("s", "symmetry", 1.0, 1e-10, false);
        assert_eq!(xfail.status, CheckStatus::ExpectedFail);
        let fail = CheckRow::at_most("s", "symmetry", 1.0, 1e-10, true);
        assert_eq!(fail.status, CheckStatus::Fail);
        assert_eq!(CheckRow::above("s", "heat", 1e-3, 1e-10).status, CheckStatus::Pass);
        let table = ResultTable {
            checks: vec![xfail, fail],
            ..Default::default()
        };
        assert_eq!(table.failures().count(), 1);
    }

    #[test]
    fn json_omits_wall_time_by_default() {
        let meta = RunMetadata::new("functionals", "", Some(3));
        let json = ResultTable::default().to_json(&meta);
        assert!(!json.contains("wall_time"));
        assert!(json.contains("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"));
    }
}
