use std::collections::BTreeMap;
use std::fmt::Write;

use diagram_judge_core::verify::{Domain, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DomainStats {
    pub n_problems: usize,
    pub n_passed: usize,
    /// Percentage; absent when there are no problems.
    pub accuracy: Option<f64>,
}

impl DomainStats {
    fn add(&mut self, passed: bool) {
        self.n_problems += 1;
        self.n_passed += passed as usize;
        self.accuracy = Some(100.0 * self.n_passed as f64 / self.n_problems as f64);
    }
}

/// Batch results. `overall` weights every problem equally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_fingerprint: String,
    pub domains: BTreeMap<Domain, DomainStats>,
    pub overall: DomainStats,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(config_fingerprint: String, results: Vec<(Domain, Verdict)>) -> Self {
        let mut domains: BTreeMap<Domain, DomainStats> = BTreeMap::new();
        let mut overall = DomainStats::default();
        let mut verdicts = Vec::with_capacity(results.len());
        for (domain, v) in results {
            domains.entry(domain).or_default().add(v.passed);
            overall.add(v.passed);
            verdicts.push(v);
        }
        Self { config_fingerprint, domains, overall, verdicts }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
}

/// Renders a report. JSON output has sorted keys so equal reports are equal
/// bytes; the table lists present domains in the fixed column order, then
/// `Overall`.
pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let value = serde_json::to_value(report).expect("serializable");
            serde_json::to_string_pretty(&value).expect("serializable") + "\n"
        }
        ReportFormat::Table => {
            let cols: Vec<(String, &DomainStats)> = Domain::ALL
                .iter()
                .filter_map(|d| report.domains.get(d).map(|s| (title(d.name()), s)))
                .chain([("Overall".to_string(), &report.overall)])
                .collect();
            let pct = |s: &DomainStats| s.accuracy.map_or("n/a".to_string(), |a| format!("{a:.1}"));
            let mut out = String::new();
            let _ = write!(out, "{:<10}", "");
            for (name, _) in &cols {
                let _ = write!(out, "{name:>10}");
            }
            out.push('\n');
            let _ = write!(out, "{:<10}", "accuracy");
            for (_, s) in &cols {
                let _ = write!(out, "{:>10}", pct(s));
            }
            out.push('\n');
            let _ = write!(out, "{:<10}", "problems");
            for (_, s) in &cols {
                let _ = write!(out, "{:>10}", s.n_problems);
            }
            out.push('\n');
            out
        }
    }
}

fn title(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(id: &str, passed: bool) -> Verdict {
        Verdict { problem_id: id.into(), passed, criterion_results: vec![] }
    }

    #[test]
    fn accuracy_is_problem_weighted() {
        let r = Report::new(
            "f".into(),
            vec![
                (Domain::Angle, verdict("a", true)),
                (Domain::Angle, verdict("b", false)),
                (Domain::Set, verdict("c", true)),
                (Domain::Set, verdict("d", true)),
            ],
        );
        assert_eq!(r.domains[&Domain::Angle].accuracy, Some(50.0));
        assert_eq!(r.domains[&Domain::Set].accuracy, Some(100.0));
        assert_eq!(r.overall.accuracy, Some(75.0));
        assert_eq!(r.overall.n_passed, 3);
    }

    #[test]
    fn table_columns_follow_the_fixed_order() {
        let all = Domain::ALL.iter().map(|d| (*d, verdict(d.name(), true))).rev().collect();
        let table = emit_report(&Report::new("f".into(), all), ReportFormat::Table);
        let header: Vec<&str> = table.lines().next().unwrap().split_whitespace().collect();
        assert_eq!(header, ["Counting", "Angle", "Fraction", "Function", "Plane", "Set", "Solid", "Overall"]);
    }

    #[test]
    fn single_domain_and_empty_tables() {
        let one = emit_report(&Report::new("f".into(), vec![(Domain::Plane, verdict("p", false))]), ReportFormat::Table);
        assert_eq!(one.lines().next().unwrap().split_whitespace().collect::<Vec<_>>(), ["Plane", "Overall"]);
        assert!(one.lines().nth(1).unwrap().ends_with("0.0"));
        let empty = emit_report(&Report::new("f".into(), vec![]), ReportFormat::Table);
        assert_eq!(empty.lines().next().unwrap().trim(), "Overall");
        assert!(empty.lines().nth(1).unwrap().ends_with("n/a"));
    }

    #[test]
    fn json_keys_are_sorted() {
        let json = emit_report(&Report::new("f".into(), vec![(Domain::Set, verdict("c", true))]), ReportFormat::Json);
        let keys: Vec<usize> = ["config_fingerprint", "domains", "overall", "verdicts"]
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
