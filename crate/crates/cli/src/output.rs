//! CSV and JSON writers. Reals are written with 17 significant digits so
//! they read back bit-for-bit.

use crate::error::CliError;
use serde::Serialize;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub fn real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

pub struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer
            .write_record(header)
            .map_err(|e| CliError::from((path.clone(), e)))?;
        Ok(Self { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| CliError::from((self.path.clone(), e)))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut body =
        serde_json::to_string_pretty(value).map_err(|e| CliError::io(&path, e.into()))?;
    body.push('\n');
    let mut file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    file.write_all(body.as_bytes())
        .map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Print one line to stdout. A closed pipe (`| head`) is not an error.
pub fn say(line: impl Display) -> Result<(), CliError> {
    match writeln!(io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(CliError::io(Path::new("<stdout>"), e))
        }
        _ => Ok(()),
    }
}

pub fn wrote(path: &Path) -> Result<(), CliError> {
    say(format_args!("wrote {}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            14.0,
            0.7720651,
            1e-7,
            123456.789,
            6.02e23,
            f64::MIN_POSITIVE,
            2.0f64.powi(60),
        ] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(real(14.0), "14.000000000000000");
        assert_eq!(real(0.0), "0");
    }
}
