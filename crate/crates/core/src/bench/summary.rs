use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::experiment::RunRecord;
use super::stats::{mann_whitney_u, vargha_delaney_a};
use crate::error::{Error, Result};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    T,
    N,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::T => "t",
            Metric::N => "n",
        }
    }

    pub fn sample(self, records: &[RunRecord]) -> Vec<f64> {
        records
            .iter()
            .map(|r| match self {
                Metric::T => r.t,
                Metric::N => r.n as f64,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub metric: Metric,
    pub u: f64,
    pub p_value: f64,
    /// Probability that the first sample shows the higher value.
    pub a_measure: f64,
    pub significant: bool,
}

impl ComparisonResult {
    /// The A measure when significant, `-` otherwise.
    pub fn cell(&self) -> String {
        if self.significant {
            format!("{:.3}", self.a_measure)
        } else {
            "-".to_string()
        }
    }
}

pub fn compare(metric: Metric, a: &[f64], b: &[f64]) -> Result<ComparisonResult> {
    let mw = mann_whitney_u(a, b)?;
    Ok(ComparisonResult {
        metric,
        u: mw.u,
        p_value: mw.p,
        a_measure: vargha_delaney_a(a, b)?,
        significant: mw.p < SIGNIFICANCE,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub mean_t: f64,
    pub mean_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub first: String,
    pub second: String,
    pub t: ComparisonResult,
    pub n: ComparisonResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub methods: Vec<MethodSummary>,
    pub comparisons: Vec<PairComparison>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Means per method and both metrics compared for every pair `(i, j)`,
/// `i < j`, in input order.
pub fn summarize(groups: &[(String, Vec<RunRecord>)]) -> Result<Summary> {
    if groups.is_empty() {
        return Err(Error::Stats("nothing to summarize".into()));
    }
    if let Some((m, _)) = groups.iter().find(|(_, r)| r.is_empty()) {
        return Err(Error::Stats(format!("method '{m}' has no records")));
    }
    let methods = groups
        .iter()
        .map(|(m, r)| MethodSummary {
            method: m.clone(),
            runs: r.len(),
            mean_t: mean(&Metric::T.sample(r)),
            mean_n: mean(&Metric::N.sample(r)),
        })
        .collect();
    let mut comparisons = Vec::new();
    for (i, (m1, r1)) in groups.iter().enumerate() {
        for (m2, r2) in &groups[i + 1..] {
            comparisons.push(PairComparison {
                first: m1.clone(),
                second: m2.clone(),
                t: compare(Metric::T, &Metric::T.sample(r1), &Metric::T.sample(r2))?,
                n: compare(Metric::N, &Metric::N.sample(r1), &Metric::N.sample(r2))?,
            });
        }
    }
    Ok(Summary { methods, comparisons })
}

fn csv_line(cells: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(cells).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv is utf-8")
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

impl Summary {
    /// Header: `method,runs,mean_t,mean_n`.
    pub fn means_csv(&self) -> String {
        let mut out = csv_line(&["method", "runs", "mean_t", "mean_n"].map(String::from));
        for m in &self.methods {
            out.push_str(&csv_line(&[m.method.clone(), m.runs.to_string(), m.mean_t.to_string(), m.mean_n.to_string()]));
        }
        out
    }

    /// Header: `first,second,metric,u,p_value,a_measure,significant,cell`.
    /// Rows with metric `t` derive from wall-clock times.
    pub fn comparisons_csv(&self) -> String {
        let mut out = csv_line(
            &["first", "second", "metric", "u", "p_value", "a_measure", "significant", "cell"].map(String::from),
        );
        for c in &self.comparisons {
            for r in [&c.t, &c.n] {
                out.push_str(&csv_line(&[
                    c.first.clone(),
                    c.second.clone(),
                    r.metric.as_str().to_string(),
                    r.u.to_string(),
                    r.p_value.to_string(),
                    r.a_measure.to_string(),
                    r.significant.to_string(),
                    r.cell(),
                ]));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut rows = vec![["method", "runs", "t", "n"].map(String::from).to_vec()];
        for m in &self.methods {
            rows.push(vec![m.method.clone(), m.runs.to_string(), format!("{:.3}", m.mean_t), format!("{:.1}", m.mean_n)]);
        }
        let mut out = align(&rows);
        if !self.comparisons.is_empty() {
            let mut rows = vec![["comparison", "A(t)", "p(t)", "A(n)", "p(n)"].map(String::from).to_vec()];
            for c in &self.comparisons {
                rows.push(vec![
                    format!("{} vs {}", c.first, c.second),
                    c.t.cell(),
                    format!("{:.4}", c.t.p_value),
                    c.n.cell(),
                    format!("{:.4}", c.n.p_value),
                ]);
            }
            let _ = writeln!(out);
            out.push_str(&align(&rows));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(method: &str, ns: &[u64]) -> (String, Vec<RunRecord>) {
        let records = ns
            .iter()
            .enumerate()
            .map(|(i, &n)| RunRecord {
                run: i,
                seed: i as u64,
                method: method.to_string(),
                outcome: "sat".into(),
                n,
                wipeouts: 0,
                learn_nodes: 0,
                learn_time: 0.0,
                search_time: n as f64,
                t: n as f64,
            })
            .collect();
        (method.to_string(), records)
    }

    #[test]
    fn single_method_has_no_comparisons() {
        let s = summarize(&[recs("a", &[1, 2, 3])]).unwrap();
        assert_eq!(s.methods[0].mean_n, 2.0);
        assert!(s.comparisons.is_empty());
        assert_eq!(s.comparisons_csv().lines().count(), 1);
    }

    #[test]
    fn identical_methods_are_not_significant() {
        let s = summarize(&[recs("a", &[4, 1, 7, 7]), recs("b", &[4, 1, 7, 7])]).unwrap();
        let c = &s.comparisons[0];
        for r in [c.t, c.n] {
            assert!(!r.significant);
            assert_eq!(r.a_measure, 0.5);
            assert_eq!(r.cell(), "-");
        }
    }

    #[test]
    fn separated_methods_are_significant() {
        let s = summarize(&[recs("a", &[1; 50]), recs("b", &[2; 50])]).unwrap();
        let c = &s.comparisons[0];
        assert!(c.n.significant);
        assert_eq!(c.n.a_measure, 0.0);
        assert_eq!(c.n.cell(), "0.000");
        assert!(s.to_text().contains("a vs b"));
        assert!(s.comparisons_csv().contains("a,b,n,0,"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(summarize(&[]).is_err());
        assert!(summarize(&[recs("a", &[])]).is_err());
    }
}
