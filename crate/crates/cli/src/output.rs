use std::fs;
use std::io::{self, Write};
use std::path::Path;

use hcrpla::SystemParams;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

const SIGNIFICANT_DIGITS: i32 = 12;

/// `%.12g` style rendering: shortest of fixed and scientific notation with
/// trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_params(path: &Path) -> CliResult<SystemParams> {
    SystemParams::from_json(&read_text(path)?).map_err(|source| CliError::Config { path: path.into(), source })
}

/// Writes `bytes` to `path` through a sibling temporary file so that a
/// failed run never leaves partial output. `None` writes to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
            tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
            tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
            Ok(())
        }
    }
}

pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub fn finish_csv(writer: csv::Writer<Vec<u8>>) -> CliResult<Vec<u8>> {
    writer.into_inner().map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text.into_bytes()
}
