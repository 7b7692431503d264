//! JSON and CSV report writers with fixed field order and 17 significant
//! digits, so equal runs give equal bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use lefschetz_core::report::VerificationReport;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Format(other.to_string())),
        }
    }
}

/// `{:.16e}`, with non-finite values as `null`.
fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn to_json(reports: &[VerificationReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{}: {}", string(k), string(v))).collect();
        let _ = write!(
            out,
            "  {{\"test\": {}, \"lhs_re\": {}, \"lhs_im\": {}, \"rhs_re\": {}, \"rhs_im\": {}, \"abs_err\": {}, \"rel_err\": {}, \"tol\": {}, \"pass\": {}, \"params\": {{{}}}, \"seconds\": {}}}",
            string(&r.test),
            number(r.lhs_re),
            number(r.lhs_im),
            number(r.rhs_re),
            number(r.rhs_im),
            number(r.abs_err),
            number(r.rel_err),
            number(r.tol),
            r.pass,
            params.join(", "),
            number(r.seconds),
        );
        out.push_str(if i + 1 < reports.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

pub fn to_csv(reports: &[VerificationReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(["test", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "tol", "pass", "params", "seconds"]).map_err(csv_err)?;
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let num = |x: f64| if x.is_finite() { format!("{x:.16e}") } else { String::new() };
        w.write_record([
            r.test.clone(),
            num(r.lhs_re),
            num(r.lhs_im),
            num(r.rhs_re),
            num(r.rhs_im),
            num(r.abs_err),
            num(r.rel_err),
            num(r.tol),
            r.pass.to_string(),
            params.join(";"),
            num(r.seconds),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(reports: &[VerificationReport], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(to_json(reports)),
        Format::Csv => to_csv(reports),
    }
}

pub fn write(reports: &[VerificationReport], format: Format, path: &std::path::Path) -> Result<(), CliError> {
    let text = render(reports, format)?;
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lefschetz_core::C64;

    fn sample() -> Vec<VerificationReport> {
        vec![
            VerificationReport::compare("a", C64::new(0.1, -2.0), C64::new(0.1, -2.0 + 1e-13), 1e-9).with_param("seed", 3),
            VerificationReport::real("b,\"quoted\"", 1.0 / 3.0, 0.3, 1e-9),
        ]
    }

    #[test]
    fn json_round_trips() {
        let text = to_json(&sample());
        let back: Vec<VerificationReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn nan_becomes_null() {
        let text = to_json(&[VerificationReport::failure("x", "boom")]);
        assert!(text.contains("\"lhs_re\": null"));
        let _: serde_json::Value = serde_json::from_str(&text).unwrap();
    }

    #[test]
    fn csv_has_one_row_per_report() {
        let text = to_csv(&sample()).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(r.records().count(), 2);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(number(1.0 / 3.0), "3.3333333333333331e-1");
        assert!(Format::from_str("xml").is_err());
    }
}
