//! Grid function import and export.
//!
//! Binary layout (all little-endian): a 16-byte header of `dim: u32`,
//! `points: u32`, `length: f64`, followed by `points^dim` samples stored as
//! interleaved `(re, im)` pairs of `f64` in row-major order.
//!
//! The CSV form starts with a `# dim=<n> points=<N> length=<L>` comment line,
//! then an `index,re,im` header and one row per sample.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};

pub const HEADER_LEN: usize = 16;

pub fn encode_binary(f: &GridFunction) -> Vec<u8> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * spec.len());
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.points() as u32).to_le_bytes());
    out.extend_from_slice(&spec.length().to_le_bytes());
    for z in f.samples() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<GridFunction> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(
            "binary grid file shorter than its header".into(),
        ));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let dim = word(0) as usize;
    let points = word(4) as usize;
    let length = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let spec = GridSpec::new(dim, points, length)?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * spec.len() {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            16 * spec.len(),
            body.len()
        )));
    }
    let samples = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    GridFunction::new(spec, samples)
}

pub fn encode_csv(f: &GridFunction) -> String {
    let spec = f.spec();
    let mut out = format!(
        "# dim={} points={} length={}\nindex,re,im\n",
        spec.dim(),
        spec.points(),
        spec.length()
    );
    for (i, z) in f.samples().iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", z.re, z.im));
    }
    out
}

pub fn decode_csv(text: &str) -> Result<GridFunction> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Format("missing '# dim=.. points=.. length=..' line".into()))?;
    let (mut dim, mut points, mut length) = (None, None, None);
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            Some(("points", v)) => points = v.parse::<usize>().ok(),
            Some(("length", v)) => length = v.parse::<f64>().ok(),
            _ => {}
        }
    }
    let spec = match (dim, points, length) {
        (Some(d), Some(n), Some(l)) => GridSpec::new(d, n, l)?,
        _ => return Err(Error::Format(format!("incomplete grid header '{header}'"))),
    };
    let mut samples = vec![None; spec.len()];
    for line in lines {
        if line.starts_with("index") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match cols.as_slice() {
            [i, re, im] => i
                .parse::<usize>()
                .ok()
                .zip(re.parse::<f64>().ok())
                .zip(im.parse::<f64>().ok()),
            _ => None,
        };
        let ((i, re), im) = parsed.ok_or_else(|| Error::Format(format!("bad row '{line}'")))?;
        let slot = samples
            .get_mut(i)
            .ok_or_else(|| Error::Format(format!("row index {i} out of range")))?;
        *slot = Some(Complex64::new(re, im));
    }
    let samples = samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Format(format!("missing row {i}"))))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(spec, samples)
}

/// Reads a grid function, choosing the CSV reader for `.csv` files and the binary one otherwise.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        decode_csv(&fs::read_to_string(path)?)
    } else {
        decode_binary(&fs::read(path)?)
    }
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let bytes = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        encode_csv(f).into_bytes()
    } else {
        encode_binary(f)
    };
    write_atomic(path, &bytes)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
