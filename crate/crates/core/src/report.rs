//! Labelled exact values with their decimal shadow.

use serde::Serialize;

use crate::exactnum::{serde_rational, to_decimal, Rational};

pub const DECIMAL_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub label: String,
    #[serde(with = "serde_rational")]
    pub exact: Rational,
    pub decimal: String,
    pub provenance: String,
}

impl ReportRow {
    pub fn new(label: impl Into<String>, exact: &Rational, provenance: impl Into<String>) -> Self {
        ReportRow {
            label: label.into(),
            decimal: to_decimal(exact, DECIMAL_DIGITS),
            exact: exact.clone(),
            provenance: provenance.into(),
        }
    }
}

/// Aligned plain-text table.
pub fn render_rows(rows: &[ReportRow]) -> String {
    let lw = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let ew = rows.iter().map(|r| r.exact.to_string().len()).max().unwrap_or(0);
    let dw = rows.iter().map(|r| r.decimal.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let line = format!(
            "{:<lw$}  {:>ew$}  {:>dw$}  {}",
            r.label,
            r.exact.to_string(),
            r.decimal,
            r.provenance
        );
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn row_rendering() {
        let rows = vec![ReportRow::new("DF", &rat(-1, 48), "closed form"), ReportRow::new("S1", &rat(6, 1), "")];
        let text = render_rows(&rows);
        assert_eq!(text, "DF  -1/48  -0.0208333333333  closed form\nS1      6                 6\n");
    }
}
