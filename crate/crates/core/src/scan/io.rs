//! Result files: `#`-prefixed `key: value` header, then comma-separated rows.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{evaluate, metadata_for, Metadata, ScanConfig, ScanKind, ScanResult};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, PrecisionPolicy};
use crate::selfforce::{ForceSample, Mode};

const MAGIC: &str = "# tachyon scan result";
const COLUMNS: &str = "beta,z_value,epsilon,n_roots,converged,digits_used";
const EIGENVALUE_DIGITS: u32 = 30;
/// Extra digits when reading back, so a printed value re-prints unchanged.
const READ_GUARD: u32 = 5;

/// Shortest scientific form that re-parses to the same configuration value.
fn compact(x: &BigReal) -> String {
    let s = x.to_sci_string(x.digits().saturating_sub(2).max(1));
    match s.split_once('e') {
        Some((mant, exp)) if mant.contains('.') => {
            let mant = mant.trim_end_matches('0').trim_end_matches('.');
            format!("{mant}e{exp}")
        }
        _ => s,
    }
}

fn header_text(config: &ScanConfig, meta: &Metadata) -> String {
    let mut h = String::new();
    let mut line = |k: &str, v: String| h.push_str(&format!("# {k}: {v}\n"));
    line("version", meta.version.clone());
    if let Some(ts) = &meta.timestamp {
        line("timestamp", ts.clone());
    }
    match &config.kind {
        ScanKind::Sweep => line("kind", "sweep".into()),
        ScanKind::Zoom { center, width } => {
            line("kind", "zoom".into());
            line("center", compact(center));
            line("width", compact(width));
        }
    }
    line("beta_min", compact(&config.beta_min));
    line("beta_max", compact(&config.beta_max));
    line("samples", config.samples.to_string());
    line("mode", config.mode.to_string());
    line("exclusion_radius", compact(&config.exclusion_radius));
    let p = &config.policy;
    line("start_digits", p.start_digits.to_string());
    line("growth_factor", p.growth_factor.to_string());
    line("agreement_tol", format!("{:e}", p.agreement_tol));
    line("max_digits", p.max_digits.to_string());
    let eig: Vec<String> = meta.eigenvalues.iter().map(|e| e.to_sci_string(EIGENVALUE_DIGITS)).collect();
    line("eigenvalues", eig.join(" "));
    line("columns", COLUMNS.into());
    format!("{MAGIC}\n{h}")
}

pub fn write_header<W: Write>(config: &ScanConfig, meta: &Metadata, mut out: W) -> std::io::Result<()> {
    out.write_all(header_text(config, meta).as_bytes())
}

fn row_text(s: &ForceSample) -> String {
    let d = s.digits_used;
    format!(
        "{},{},{},{},{},{}\n",
        s.beta.to_sci_string(d),
        s.z_value.to_sci_string(d),
        s.epsilon.to_sci_string(d),
        s.n_roots,
        u8::from(s.converged),
        d
    )
}

pub fn write_row<W: Write>(sample: &ForceSample, mut out: W) -> std::io::Result<()> {
    out.write_all(row_text(sample).as_bytes())
}

pub fn write_result<W: Write>(result: &ScanResult, mut out: W) -> std::io::Result<()> {
    write_header(&result.config, &result.metadata, &mut out)?;
    for s in &result.samples {
        write_row(s, &mut out)?;
    }
    Ok(())
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_row(text: &str, line: usize, mode: Mode) -> Result<ForceSample> {
    let cols: Vec<&str> = text.split(',').collect();
    if cols.len() != 6 {
        return Err(format_err(line, format!("expected 6 columns, found {}", cols.len())));
    }
    let digits: u32 = cols[5].parse().map_err(|_| format_err(line, "bad digits_used"))?;
    let num = |s: &str| -> Result<BigReal> {
        if s == "nan" {
            return Ok(BigReal::nan(digits));
        }
        BigReal::parse(s, digits + READ_GUARD).map_err(|_| format_err(line, format!("bad number `{s}`")))
    };
    let beta = num(cols[0])?;
    let z_value = num(cols[1])?;
    let epsilon = num(cols[2])?;
    let n_roots = cols[3].parse().map_err(|_| format_err(line, "bad n_roots"))?;
    let converged = match cols[4] {
        "0" => false,
        "1" => true,
        _ => return Err(format_err(line, "converged must be 0 or 1")),
    };
    let radial = -&z_value;
    let azimuthal = &epsilon * &radial;
    Ok(ForceSample {
        beta,
        z_value,
        epsilon,
        mode,
        n_roots,
        converged,
        digits_used: digits,
        radial,
        azimuthal,
    })
}

/// Parses a result file written by [`write_result`] or [`run_to_file`].
pub fn read_result<R: Read>(input: R) -> Result<ScanResult> {
    let reader = BufReader::new(input);
    let mut fields = std::collections::BTreeMap::new();
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if n == 1 {
            if line != MAGIC {
                return Err(format_err(n, "not a scan result file"));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| format_err(n, "header line without `key: value`"))?;
            fields.insert(k.to_string(), (n, v.to_string()));
        } else if !line.is_empty() {
            rows.push((n, line));
        }
    }
    let get = |k: &str| -> Result<&(usize, String)> {
        fields.get(k).ok_or_else(|| format_err(0, format!("missing header key `{k}`")))
    };
    let parse_num = |k: &str, digits: u32| -> Result<BigReal> {
        let (n, v) = get(k)?;
        BigReal::parse(v, digits).map_err(|_| format_err(*n, format!("bad `{k}`")))
    };
    let parse_int = |k: &str| -> Result<u64> {
        let (n, v) = get(k)?;
        v.parse().map_err(|_| format_err(*n, format!("bad `{k}`")))
    };
    let parse_f = |k: &str| -> Result<f64> {
        let (n, v) = get(k)?;
        v.parse().map_err(|_| format_err(*n, format!("bad `{k}`")))
    };
    let policy = PrecisionPolicy::new(
        parse_int("start_digits")? as u32,
        parse_f("growth_factor")?,
        parse_f("agreement_tol")?,
        parse_int("max_digits")? as u32,
    )?;
    let d = policy.max_digits;
    let mode: Mode = get("mode")?.1.parse()?;
    let samples = parse_int("samples")? as usize;
    let config = match get("kind")?.1.as_str() {
        "sweep" => ScanConfig::sweep(parse_num("beta_min", d)?, parse_num("beta_max", d)?, samples, mode, policy)
            .with_exclusion(parse_num("exclusion_radius", d)?),
        "zoom" => ScanConfig::zoom(parse_num("center", d)?, parse_num("width", d)?, samples, mode, policy)?,
        other => return Err(format_err(get("kind")?.0, format!("unknown kind `{other}`"))),
    };
    let eigenvalues = get("eigenvalues")?
        .1
        .split_whitespace()
        .map(|e| BigReal::parse(e, EIGENVALUE_DIGITS + READ_GUARD))
        .collect::<Result<Vec<_>>>()?;
    let metadata = Metadata {
        version: get("version")?.1.clone(),
        timestamp: fields.get("timestamp").map(|(_, v)| v.clone()),
        eigenvalues,
    };
    let samples = rows
        .iter()
        .map(|(n, r)| parse_row(r, *n, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        config,
        samples,
        metadata,
    })
}

/// Runs a scan, appending rows to `path` one chunk at a time.
///
/// With `resume`, an existing file whose header matches the configuration
/// is continued after its last complete row; a torn final row is rewritten.
/// The finished file is identical to that of an uninterrupted run.
pub fn run_to_file(config: &ScanConfig, workers: usize, path: &Path, resume: bool, chunk: usize) -> Result<ScanResult> {
    let grid = config.grid()?;
    let metadata = metadata_for(config)?;
    let header = header_text(config, &metadata);
    let mut done: Vec<ForceSample> = Vec::new();

    let existing = if resume && path.exists() {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Some(text)
    } else {
        None
    };

    let mut file = match existing {
        Some(text) => {
            let body = text
                .strip_prefix(&header)
                .ok_or_else(|| format_err(1, "existing file header does not match this configuration"))?;
            let complete = match body.rfind('\n') {
                Some(i) => &body[..=i],
                None => "",
            };
            let first_row_line = header.lines().count() + 1;
            for (i, row) in complete.lines().enumerate() {
                done.push(parse_row(row, first_row_line + i, config.mode)?);
            }
            if done.len() > grid.len() {
                return Err(format_err(first_row_line, "file holds more rows than the grid"));
            }
            let keep = (header.len() + complete.len()) as u64;
            let f = OpenOptions::new().write(true).open(path)?;
            f.set_len(keep)?;
            let mut f = OpenOptions::new().append(true).open(path)?;
            f.flush()?;
            f
        }
        None => {
            let mut f = File::create(path)?;
            f.write_all(header.as_bytes())?;
            f
        }
    };

    for part in grid[done.len()..].chunks(chunk.max(1)) {
        let samples = evaluate(part, config.mode, &config.policy, workers)?;
        let mut buf = String::new();
        for s in &samples {
            buf.push_str(&row_text(s));
        }
        file.write_all(buf.as_bytes())?;
        file.flush()?;
        done.extend(samples);
    }
    file.sync_all()?;
    Ok(ScanResult {
        config: config.clone(),
        samples: done,
        metadata,
    })
}
