//! Report serialization: pretty JSON or a flat CSV with one row per check
//! followed by that check's samples.

use std::io::Write;
use std::path::Path;

use complab_core::{Check, VerificationReport};

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 15] = [
    "row",
    "kind",
    "scope",
    "name",
    "anchor",
    "status",
    "location",
    "lhs",
    "rhs",
    "margin",
    "max_violation",
    "tol_abs",
    "tol_rel",
    "resolution",
    "note",
];

fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:?}")
    }
}

fn split_scope(name: &str) -> (&str, &str) {
    name.rsplit_once('/').unwrap_or(("", name))
}

fn check_record(row: usize, c: &Check) -> Vec<String> {
    let (scope, name) = split_scope(&c.name);
    let (loc, lhs, rhs, margin) = match c.witness {
        Some(w) => (real(w.location), real(w.lhs), real(w.rhs), real(w.margin)),
        None => Default::default(),
    };
    vec![
        row.to_string(),
        "check".into(),
        scope.into(),
        name.into(),
        c.anchor.clone(),
        c.status.as_str().into(),
        loc,
        lhs,
        rhs,
        margin,
        real(c.max_violation),
        real(c.tolerance.abs),
        real(c.tolerance.rel),
        real(c.resolution),
        c.note.clone().unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(report: &VerificationReport, w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    let mut row = 0;
    for c in &report.checks {
        out.write_record(check_record(row, c))?;
        row += 1;
        let (scope, name) = split_scope(&c.name);
        for s in &c.samples {
            out.write_record([
                row.to_string(),
                "sample".into(),
                scope.into(),
                name.into(),
                c.anchor.clone(),
                String::new(),
                real(s.location),
                real(s.lhs),
                real(s.rhs),
                real(s.margin()),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?;
            row += 1;
        }
    }
    out.flush()
}

pub fn write_json<W: Write>(report: &VerificationReport, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n")?;
    w.flush()
}

pub fn render(report: &VerificationReport, format: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(report, &mut buf),
        Format::Csv => write_csv(report, &mut buf),
    }
    .expect("writing to memory cannot fail");
    buf
}

/// Writes the report to `path`, or to `fallback` when no path is given.
pub fn emit_report(
    report: &VerificationReport,
    format: Format,
    path: Option<&Path>,
    fallback: &mut dyn Write,
) -> CliResult<()> {
    let bytes = render(report, format);
    let (written, target) = match path {
        Some(p) => (std::fs::write(p, bytes), p.to_path_buf()),
        None => (
            fallback.write_all(&bytes).and_then(|_| fallback.flush()),
            "<stdout>".into(),
        ),
    };
    written.map_err(|source| CliError::Output { path: target, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use complab_core::report::CheckBuilder;
    use complab_core::Tolerance;

    fn sample_report() -> VerificationReport {
        let mut r = VerificationReport::new("demo");
        let mut b = CheckBuilder::new("le", "demo:le", Tolerance::absolute(0.1));
        b.compare(0.5, 1.0, 2.0, 0.0);
        b.compare(1.0, 3.0, 1.0, 0.0);
        let mut inner = VerificationReport::new("inner");
        inner.push(b.finish());
        inner.value("peak", f64::INFINITY);
        r.absorb("part", inner);
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        let text = String::from_utf8(render(&VerificationReport::new("none"), Format::Csv)).unwrap();
        assert_eq!(text, format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn csv_rows_follow_checks() {
        let text = String::from_utf8(render(&sample_report(), Format::Csv)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,check,part,le,demo:le,fail,1.0,3.0,1.0,2.0,2.0,0.1,0.0,0.0,"));
        assert!(lines[2].starts_with("1,sample,part,le,demo:le,,0.5,1.0,2.0,-1.0"));
    }

    #[test]
    fn json_round_trip() {
        let r = sample_report();
        let back: VerificationReport = serde_json::from_slice(&render(&r, Format::Json)).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.values["part/peak"], f64::INFINITY);
    }
}
