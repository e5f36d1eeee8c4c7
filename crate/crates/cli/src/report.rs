//! Check records, the JSON report and the human-readable summary.

use std::collections::BTreeMap;

use reflectlab_core::tensor::Residual;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;
pub const RNG_NAME: &str =
    "ChaCha8 (rand_chacha 0.9), per-suite seed = seed XOR fnv1a64(suite name)";

/// How a residual is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass when `relative ≤ threshold`.
    AtMost,
    /// Pass when `relative > threshold`; used by sensitivity checks.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRecord {
    pub absolute: f64,
    pub relative: f64,
    /// Fitted scalar `[re, im]` for proportionality checks.
    pub scalar: Option<[f64; 2]>,
}

impl From<Residual> for ResidualRecord {
    fn from(r: Residual) -> Self {
        Self {
            absolute: r.absolute,
            relative: r.relative,
            scalar: r.scalar.map(|s| [s.re, s.im]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub check_id: String,
    /// The statement being verified.
    pub anchor: String,
    pub params: Value,
    pub residual: Option<ResidualRecord>,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// The check is vacuous for these parameters and does not count as a failure.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn relative(&self) -> Option<f64> {
        self.residual.as_ref().map(|r| r.relative)
    }

    /// Failed and not excused as degenerate.
    pub fn is_failure(&self) -> bool {
        !self.pass && !self.degenerate
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub degenerate: usize,
}

impl Summary {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a Record>) -> Self {
        let mut s = Summary::default();
        for r in records {
            s.total += 1;
            if r.degenerate {
                s.degenerate += 1;
            } else if r.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub rng: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub generated_at: u64,
    pub provenance: Provenance,
    pub suites: Vec<String>,
    pub config: Value,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(
        provenance: Provenance,
        suites: Vec<String>,
        config: Value,
        mut records: Vec<Record>,
    ) -> Self {
        records.sort_by(|a, b| (&a.suite, &a.check_id).cmp(&(&b.suite, &b.check_id)));
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema: SCHEMA,
            generated_at,
            provenance,
            suites,
            config,
            summary: Summary::of(&records),
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per suite: `SUITE name: passed/total (max rel residual X.XXe-YY)`.
    pub fn human_summary(&self) -> String {
        let mut per_suite: BTreeMap<&str, Vec<&Record>> = BTreeMap::new();
        for r in &self.records {
            per_suite.entry(&r.suite).or_default().push(r);
        }
        let mut out = String::new();
        for (name, records) in per_suite {
            let s = Summary::of(records.iter().copied());
            let worst = records
                .iter()
                .filter(|r| r.comparison == Comparison::AtMost)
                .filter_map(|r| r.relative())
                .fold(0.0f64, |acc, v| {
                    if v.is_nan() || acc.is_nan() {
                        f64::NAN
                    } else {
                        acc.max(v)
                    }
                });
            out.push_str(&format!(
                "SUITE {name}: {}/{} (max rel residual {})",
                s.passed,
                s.total - s.degenerate,
                sci(worst)
            ));
            if s.degenerate > 0 {
                out.push_str(&format!(" [{} degenerate]", s.degenerate));
            }
            out.push('\n');
        }
        out
    }
}

/// `X.XXe-YY` with a sign and at least two exponent digits.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.2e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// 64-bit FNV-1a hash, used to derive per-suite seeds.
pub fn fnv1a64(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format() {
        assert_eq!(sci(1.234e-11), "1.23e-11");
        assert_eq!(sci(5.0e-5), "5.00e-05");
        assert_eq!(sci(0.0), "0.00e+00");
        assert_eq!(sci(3.0e2), "3.00e+02");
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64("a"), 0xaf63_dc4c_8601_ec8c);
    }

    fn record(suite: &str, id: &str, pass: bool, degenerate: bool) -> Record {
        Record {
            suite: suite.into(),
            check_id: id.into(),
            anchor: String::new(),
            params: Value::Null,
            residual: Some(ResidualRecord {
                absolute: 0.0,
                relative: 1e-12,
                scalar: None,
            }),
            threshold: 1e-9,
            comparison: Comparison::AtMost,
            pass,
            degenerate,
            error: None,
        }
    }

    #[test]
    fn records_are_sorted_and_counted() {
        let prov = Provenance {
            config_sha256: String::new(),
            seed: 0,
            version: String::new(),
            rng: String::new(),
        };
        let report = Report::new(
            prov,
            vec![],
            Value::Null,
            vec![
                record("b", "1", true, false),
                record("a", "2", false, true),
                record("a", "1", false, false),
            ],
        );
        let ids: Vec<_> = report
            .records
            .iter()
            .map(|r| (r.suite.as_str(), r.check_id.as_str()))
            .collect();
        assert_eq!(ids, [("a", "1"), ("a", "2"), ("b", "1")]);
        assert_eq!(
            report.summary,
            Summary {
                total: 3,
                passed: 1,
                failed: 1,
                degenerate: 1
            }
        );
        assert!(!report.all_passed());
        assert_eq!(report.human_summary(), "SUITE a: 0/1 (max rel residual 1.00e-12) [1 degenerate]\nSUITE b: 1/1 (max rel residual 1.00e-12)\n");
    }
}
