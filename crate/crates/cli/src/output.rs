//! CSV emission. Floats use 17 significant digits, lines end in LF.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use membrane::montecarlo::McReport;

use crate::error::CliError;

pub const REPORT_HEADER: &str = "metric,estimate,stderr,ci_lo,ci_hi,statistic,critical,pass";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Columns of a sampled path; `t` and `value` are always present.
#[derive(Debug, Clone, Default)]
pub struct PathColumns<'a> {
    pub t: Vec<f64>,
    pub value: &'a [f64],
    pub local_time: Option<&'a [f64]>,
    pub sign: Option<Vec<i8>>,
}

pub fn path_csv(c: &PathColumns<'_>) -> String {
    let mut s = String::from("t,value");
    if c.local_time.is_some() {
        s.push_str(",local_time");
    }
    if c.sign.is_some() {
        s.push_str(",sign");
    }
    s.push('\n');
    for (i, (&t, &v)) in c.t.iter().zip(c.value).enumerate() {
        let _ = write!(s, "{},{}", float(t), float(v));
        if let Some(l) = c.local_time {
            let _ = write!(s, ",{}", float(l[i]));
        }
        if let Some(sg) = &c.sign {
            let _ = write!(s, ",{}", sg[i]);
        }
        s.push('\n');
    }
    s
}

pub fn report_csv(rows: &[McReport]) -> String {
    let mut s = format!("{REPORT_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.metric,
            float(r.estimate),
            opt(r.stderr),
            opt(r.ci_lo),
            opt(r.ci_hi),
            opt(r.statistic),
            opt(r.critical),
            r.pass
        );
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `out.csv` for a single path, `out-0.csv`, `out-1.csv`, ... otherwise.
pub fn numbered(out: &Path, i: usize, count: usize) -> PathBuf {
    if count == 1 {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{i}"),
    };
    out.with_file_name(name)
}

/// `dir/name.manifest.json` next to `dir/name.csv`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn report_rows() {
        let r = McReport::proportion("p", 1, 3, 3.0).against(0.5, 3.0, 0.0);
        let csv = report_csv(&[r, McReport::value("v", 2.0)]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert!(lines[1].starts_with("p,3.3333333333333331e-1,"));
        assert!(lines[1].ends_with(",true"));
        assert_eq!(lines[2], "v,2.0000000000000000e0,,,,,,true");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn path_columns() {
        let v = [0.0, 1.0];
        let l = [0.0, 0.5];
        let csv = path_csv(&PathColumns {
            t: vec![0.0, 0.5],
            value: &v,
            local_time: Some(&l),
            sign: Some(vec![1, -1]),
        });
        assert_eq!(csv.lines().next().unwrap(), "t,value,local_time,sign");
        assert!(csv.lines().nth(2).unwrap().ends_with(",-1"));
    }

    #[test]
    fn numbering() {
        assert_eq!(
            numbered(Path::new("a/p.csv"), 0, 1),
            PathBuf::from("a/p.csv")
        );
        assert_eq!(
            numbered(Path::new("a/p.csv"), 2, 3),
            PathBuf::from("a/p-2.csv")
        );
        assert_eq!(
            manifest_path(Path::new("a/r.csv")),
            PathBuf::from("a/r.manifest.json")
        );
    }
}
