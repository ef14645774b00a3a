//! On-disk cache of exact series tables.
//!
//! One text file per `(equation, order, format version)`:
//!
//! ```text
//! tf-hpm-series
//! version 1
//! equation atom
//! order 12
//! f 0 1/1
//! f 1
//! f 2 0/1 1/1
//! ```
//!
//! Each `f` record lists the coefficients of `f_j(s)` from the constant term up.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use tf_hpm::algebra::{BigRational, UniPoly};
use tf_hpm::series::{expand_memoized, seed_memo, EquationKind, SeriesError, SeriesTable};

pub const FORMAT_VERSION: u32 = 1;
pub const ENV_VAR: &str = "TF_HANKEL_CACHE";

const MAGIC: &str = "tf-hpm-series";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("malformed cache file: {0}")]
    Malformed(String),
    #[error("cache format version {0}, expected {FORMAT_VERSION}")]
    WrongVersion(u32),
    #[error("cached table rejected: {0}")]
    Series(SeriesError),
}

pub fn file_name(kind: EquationKind, order: usize) -> String {
    format!("{}-o{order}-v{FORMAT_VERSION}.tfseries", kind.tag())
}

/// The `--cache` flag wins over the environment variable.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(ENV_VAR)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

pub fn serialize(table: &SeriesTable) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "version {FORMAT_VERSION}").unwrap();
    writeln!(out, "equation {}", table.kind().tag()).unwrap();
    writeln!(out, "order {}", table.order()).unwrap();
    for (j, p) in table.coeffs().iter().enumerate() {
        write!(out, "f {j}").unwrap();
        for c in p.coeffs() {
            write!(out, " {}/{}", c.numerator(), c.denominator()).unwrap();
        }
        out.push('\n');
    }
    out
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str, CacheError> {
    line.and_then(|l| l.strip_prefix(key))
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| CacheError::Malformed(format!("missing `{key}` line")))
}

/// Parses and re-validates a cached table against the recursion.
pub fn parse(text: &str) -> Result<SeriesTable, CacheError> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(CacheError::Malformed("bad header".into()));
    }
    let version: u32 = field(lines.next(), "version")?
        .parse()
        .map_err(|_| CacheError::Malformed("bad version".into()))?;
    if version != FORMAT_VERSION {
        return Err(CacheError::WrongVersion(version));
    }
    let kind: EquationKind = field(lines.next(), "equation")?
        .parse()
        .map_err(|_| CacheError::Malformed("bad equation".into()))?;
    let order: usize = field(lines.next(), "order")?
        .parse()
        .map_err(|_| CacheError::Malformed("bad order".into()))?;

    let mut coeffs = Vec::with_capacity(order + 1);
    for (j, line) in lines.enumerate() {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("f") || parts.next() != Some(j.to_string().as_str()) {
            return Err(CacheError::Malformed(format!("record {j}")));
        }
        let poly = parts
            .map(|s| {
                s.parse::<BigRational>()
                    .map_err(|_| CacheError::Malformed(format!("coefficient `{s}` in record {j}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        coeffs.push(UniPoly::from_coeffs(poly));
    }
    if coeffs.len() != order + 1 {
        return Err(CacheError::Malformed(format!(
            "{} records for order {order}",
            coeffs.len()
        )));
    }
    SeriesTable::from_coeffs(kind, coeffs).map_err(CacheError::Series)
}

/// Loads the cached table for `(kind, order)` into the in-process memo, or
/// computes and stores it. Cache problems are reported on stderr and never fatal.
pub fn warm(dir: &Path, kind: EquationKind, order: usize) -> Result<(), SeriesError> {
    let path = dir.join(file_name(kind, order));
    match fs::read_to_string(&path) {
        Ok(text) => match parse(&text) {
            Ok(table) if table.kind() == kind && table.order() == order => {
                seed_memo(table);
                return Ok(());
            }
            Ok(_) => eprintln!("warning: {} does not match its file name; ignoring", path.display()),
            Err(e) => eprintln!("warning: {}: {e}; recomputing", path.display()),
        },
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => eprintln!("warning: cannot read {}: {e}", path.display()),
    }
    let table = expand_memoized(kind, order)?;
    if let Err(e) = store(dir, &path, &table) {
        eprintln!("warning: cannot write {}: {e}", path.display());
    }
    Ok(())
}

fn store(dir: &Path, path: &Path, table: &SeriesTable) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serialize(table))?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tf_hpm::series::expand;

    #[test]
    fn round_trip_is_exact() {
        for kind in EquationKind::ALL {
            let t = expand(kind, 14).unwrap();
            let back = parse(&serialize(&t)).unwrap();
            assert_eq!(back.kind(), kind);
            assert_eq!(back.coeffs(), t.coeffs());
        }
    }

    #[test]
    fn header_shape() {
        let text = serialize(&expand(EquationKind::Atom, 5).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(&lines[..4], &[MAGIC, "version 1", "equation atom", "order 5"]);
        assert_eq!(lines[4], "f 0 1/1");
        assert_eq!(lines[5], "f 1");
        assert_eq!(lines[7], "f 3 2/3");
    }

    #[test]
    fn stale_version_is_rejected() {
        let text = serialize(&expand(EquationKind::Atom, 5).unwrap()).replace("version 1", "version 0");
        assert!(matches!(parse(&text), Err(CacheError::WrongVersion(0))));
    }

    #[test]
    fn tampered_coefficient_is_rejected() {
        let text = serialize(&expand(EquationKind::Atom, 6).unwrap()).replace("f 3 2/3", "f 3 3/4");
        assert!(matches!(parse(&text), Err(CacheError::Series(_))));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = serialize(&expand(EquationKind::MagneticField, 6).unwrap());
        let cut: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse(&cut), Err(CacheError::Malformed(_))));
    }

    #[test]
    fn warm_writes_then_reads() {
        let dir = tempfile::tempdir().unwrap();
        warm(dir.path(), EquationKind::Atom, 9).unwrap();
        let path = dir.path().join(file_name(EquationKind::Atom, 9));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(parse(&text).unwrap().order(), 9);
        warm(dir.path(), EquationKind::Atom, 9).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
    }
}
