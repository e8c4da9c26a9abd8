//! CSV output of sweeps: `#key=value` provenance lines, a column header,
//! and one row per record. Floats carry 17 significant digits, so parsing
//! the file gives back the exact values.

use std::io::{BufRead, BufReader, Read, Write};

use medlat_core::params::{ConditionReport, SelectedParams};

use crate::experiment::{ExperimentOutput, ExperimentRecord, NstarRow};
use crate::{Error, Result};

/// Column names, in order. `wall_time` is present only with timing enabled.
pub const COLUMNS: [&str; 13] = [
    "M_max",
    "run",
    "seed",
    "N",
    "R",
    "M",
    "tau_star",
    "n_star",
    "feasible",
    "index_set_size",
    "squared_l2_error",
    "eval_count",
    "wall_time",
];

/// Shortest text with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn selection_lines(s: &SelectedParams, c: &ConditionReport) -> Vec<(String, String)> {
    let p = format!("m{}.", s.budget.max_evals());
    let mut out = vec![
        (format!("{p}N"), s.modulus.to_string()),
        (format!("{p}R"), s.repetitions.to_string()),
        (format!("{p}tau_star"), fmt_f64(s.tau_star)),
        (format!("{p}tau0"), fmt_f64(s.roots.tau0)),
        (format!("{p}tau0_prime"), fmt_f64(s.roots.tau0_prime)),
        (format!("{p}tau1"), s.roots.interval.map(|i| fmt_f64(i.0)).unwrap_or_default()),
        (format!("{p}tau2"), s.roots.interval.map(|i| fmt_f64(i.1)).unwrap_or_default()),
        (format!("{p}n_star"), fmt_f64(s.n_star)),
        (format!("{p}feasible"), s.feasible().to_string()),
        (format!("{p}reason"), s.infeasibility.map(|r| r.label()).unwrap_or("").to_string()),
    ];
    for (name, cond) in c.entries() {
        out.push((
            format!("{p}cond.{name}"),
            format!("{}|{}|{}", cond.holds, fmt_f64(cond.lhs), fmt_f64(cond.rhs)),
        ));
    }
    out
}

/// Provenance block: configuration, then each budget's selection and
/// conditions.
pub fn header_lines(out: &ExperimentOutput) -> Vec<(String, String)> {
    let c = &out.config;
    let gammas: Vec<String> = c.gammas.iter().map(|&g| fmt_f64(g)).collect();
    let budgets: Vec<String> = c.budgets.iter().map(u64::to_string).collect();
    let mut lines = vec![
        ("function".to_string(), c.function.to_string()),
        ("alpha".to_string(), fmt_f64(c.alpha)),
        ("gamma".to_string(), gammas.join(";")),
        ("dim".to_string(), c.dim().to_string()),
        ("delta".to_string(), fmt_f64(c.delta)),
        ("budgets".to_string(), budgets.join(";")),
        ("seed".to_string(), c.seed.to_string()),
        ("runs".to_string(), c.runs.to_string()),
        ("rule".to_string(), format!("{:?}", c.rule).to_lowercase()),
    ];
    for b in &out.budgets {
        lines.extend(selection_lines(&b.selected, &b.conditions));
    }
    lines
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Writes the whole sweep.
pub fn write_csv<W: Write>(out: &ExperimentOutput, mut w: W) -> Result<()> {
    for (k, v) in header_lines(out) {
        writeln!(w, "#{k}={v}")?;
    }
    let ncol = if out.config.timing { COLUMNS.len() } else { COLUMNS.len() - 1 };
    let mut cw = csv_writer(w);
    cw.write_record(&COLUMNS[..ncol])?;
    for r in &out.records {
        let mut row = vec![
            r.max_evals.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            r.modulus.to_string(),
            r.repetitions.to_string(),
            r.total_evals.to_string(),
            fmt_f64(r.tau_star),
            fmt_f64(r.n_star),
            r.feasible.to_string(),
            fmt_opt(r.index_set_size),
            r.squared_l2_error.map(fmt_f64).unwrap_or_default(),
            fmt_opt(r.eval_count),
        ];
        if out.config.timing {
            row.push(r.wall_time.map(fmt_f64).unwrap_or_default());
        }
        cw.write_record(&row)?;
    }
    cw.flush()?;
    Ok(())
}

/// Sweep output as a string.
pub fn to_csv_string(out: &ExperimentOutput) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(out, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// A parsed sweep file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    /// `#key=value` lines in file order.
    pub header: Vec<(String, String)>,
    /// Data rows.
    pub records: Vec<ExperimentRecord>,
}

impl ParsedCsv {
    /// Value of a header key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let s = rec.get(i).ok_or_else(|| Error::Parse(format!("missing column {}", COLUMNS[i])))?;
    s.parse().map_err(|e| Error::Parse(format!("{} = {s:?}: {e}", COLUMNS[i])))
}

fn opt_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match rec.get(i) {
        None | Some("") => Ok(None),
        Some(_) => field(rec, i).map(Some),
    }
}

/// Reads a file written by [`write_csv`].
pub fn parse_csv<R: Read>(r: R) -> Result<ParsedCsv> {
    let mut text = String::new();
    BufReader::new(r).read_to_string(&mut text)?;
    let mut header = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let (k, v) = line[1..]
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("header line without '=': {line:?}")))?;
        header.push((k.to_string(), v.to_string()));
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let cols = rdr.headers()?.clone();
    if cols.iter().zip(COLUMNS).any(|(a, b)| a != b) || cols.len() < COLUMNS.len() - 1 {
        return Err(Error::Parse("unexpected column header".into()));
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        records.push(ExperimentRecord {
            max_evals: field(&row, 0)?,
            run: field(&row, 1)?,
            seed: field(&row, 2)?,
            modulus: field(&row, 3)?,
            repetitions: field(&row, 4)?,
            total_evals: field(&row, 5)?,
            tau_star: field(&row, 6)?,
            n_star: field(&row, 7)?,
            feasible: field(&row, 8)?,
            index_set_size: opt_field(&row, 9)?,
            squared_l2_error: opt_field(&row, 10)?,
            eval_count: opt_field(&row, 11)?,
            wall_time: opt_field(&row, 12)?,
        });
    }
    Ok(ParsedCsv { header, records })
}

/// Writes the `N_*` versus `M` table.
pub fn write_nstar_table<W: Write>(rows: &[NstarRow], w: W) -> Result<()> {
    let mut cw = csv_writer(w);
    cw.write_record(["M_max", "N", "R", "M", "n_star"])?;
    for r in rows {
        cw.write_record([
            r.max_evals.to_string(),
            r.modulus.to_string(),
            r.repetitions.to_string(),
            r.total_evals.to_string(),
            fmt_f64(r.n_star),
        ])?;
    }
    cw.flush()?;
    Ok(())
}

/// Reads lines until the first non-comment line; convenience for tools that
/// only want the provenance block.
pub fn read_header<R: BufRead>(r: R) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE, 2f64.sqrt()] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits: usize = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17);
        }
    }
}
