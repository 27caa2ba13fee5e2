//! Text formats: sections, sequences and certification reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certify::CertificationReport;
use crate::error::{Error, Result};
use crate::kernel::FiniteSection;
use crate::norm::PExponent;
use crate::operator::SequenceVector;

/// Formats like C's `printf("%.17g", x)`, which round-trips every `f64`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_f64(field: &str, what: &'static str, line: usize) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Format {
        what,
        message: format!("line {line}: `{}` is not a number", field.trim()),
    })
}

pub fn section_to_csv(section: &FiniteSection) -> String {
    let mut out = String::new();
    for row in section.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_g17(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn section_from_csv(text: &str) -> Result<FiniteSection> {
    let mut entries = Vec::new();
    let mut size = None;
    let mut rows = 0;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = line.split(',').map(|f| parse_f64(f, "section CSV", i + 1)).collect::<Result<Vec<_>>>()?;
        let width = *size.get_or_insert(row.len());
        if row.len() != width {
            return Err(Error::Format {
                what: "section CSV",
                message: format!("line {}: expected {width} columns, found {}", i + 1, row.len()),
            });
        }
        entries.extend(row);
        rows += 1;
    }
    let size = size.unwrap_or(0);
    if rows != size {
        return Err(Error::Format { what: "section CSV", message: format!("{rows} rows for {size} columns") });
    }
    FiniteSection::from_row_major(size, entries)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionDoc {
    size: usize,
    entries: Vec<f64>,
}

pub fn section_to_json(section: &FiniteSection) -> String {
    serde_json::to_string(&SectionDoc { size: section.size(), entries: section.entries().to_vec() }).expect("section serializes")
}

pub fn section_from_json(text: &str) -> Result<FiniteSection> {
    let doc: SectionDoc = serde_json::from_str(text).map_err(|e| Error::Format { what: "section JSON", message: e.to_string() })?;
    FiniteSection::from_row_major(doc.size, doc.entries)
}

/// A sequence as read from CSV, with its optional `# p=<value>` header.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFile {
    pub p: Option<PExponent>,
    pub values: SequenceVector,
}

pub fn sequence_from_csv(text: &str) -> Result<SequenceFile> {
    let mut p = None;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let spec = comment.trim().strip_prefix("p=").filter(|_| values.is_empty() && p.is_none());
            let spec = spec.ok_or_else(|| Error::Format {
                what: "sequence CSV",
                message: format!("line {}: only a leading `# p=<value>` header is allowed", i + 1),
            })?;
            p = Some(spec.trim().parse::<PExponent>()?);
            continue;
        }
        values.push(parse_f64(line, "sequence CSV", i + 1)?);
    }
    Ok(SequenceFile { p, values: SequenceVector::new(values) })
}

pub fn sequence_to_csv(values: &[f64], p: Option<PExponent>) -> String {
    let mut out = String::new();
    if let Some(p) = p {
        writeln!(out, "# p={p}").unwrap();
    }
    for &v in values {
        out.push_str(&fmt_g17(v));
        out.push('\n');
    }
    out
}

pub fn sequence_to_json(values: &[f64], p: Option<PExponent>) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(skip_serializing_if = "Option::is_none")]
        p: Option<PExponent>,
        values: &'a [f64],
    }
    serde_json::to_string(&Doc { p, values }).expect("sequence serializes")
}

/// Two tables separated by a blank line: `epsilon,K,N,ratio` then `N,sigma_max`.
pub fn report_to_csv(report: &CertificationReport) -> String {
    let mut out = String::from("epsilon,K,N,ratio\n");
    for c in &report.ratios {
        writeln!(out, "{},{},{},{}", fmt_g17(c.epsilon), c.k, c.n, fmt_g17(c.ratio)).unwrap();
    }
    out.push_str("\nN,sigma_max\n");
    for s in &report.sigma_max_series {
        writeln!(out, "{},{}", s.n, fmt_g17(s.sigma_max)).unwrap();
    }
    out
}
