//! CSV files. Floats are written as `{:.16e}` (17 significant digits), so
//! a value read back is bit-identical; missing values are empty fields.
//! Lines starting with `#` before the header carry warnings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use besovns_core::monitor::{CalibratedConstant, ConstantSet};

pub const TIMESERIES: &str = "timeseries.csv";
pub const REPORT: &str = "report.csv";
pub const LINKS: &str = "links.csv";
pub const TIMING: &str = "timing.csv";
pub const CONSTANTS: &str = "constants.csv";
pub const INEQUALITIES: &str = "inequalities.csv";
pub const CHECKPOINT: &str = "final.ckpt";

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Writes `# warning: …` lines, then the header and rows.
pub fn write_csv<R, I>(path: &Path, warnings: &[String], header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator,
    I::Item: AsRef<[u8]>,
{
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for w in warnings {
        writeln!(out, "# warning: {}", w.replace(['\n', '\r'], " "))?;
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Reader that skips `#` lines.
pub fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))
}

pub const CONSTANTS_HEADER: [&str; 4] = ["name", "value", "ensemble", "grids"];

pub fn write_constants(path: &Path, set: &ConstantSet) -> Result<()> {
    let rows = set.constants.iter().map(|c| {
        let grids: Vec<String> = c.grids.iter().map(|g| g.to_string()).collect();
        vec![c.name.clone(), float(c.value), c.ensemble.clone(), grids.join(";")]
    });
    write_csv(path, &[], &CONSTANTS_HEADER, rows)
}

pub fn read_constants(path: &Path) -> Result<ConstantSet> {
    let mut r = reader(path)?;
    if r.headers()?.iter().ne(CONSTANTS_HEADER) {
        bail!("{}: expected header {}", path.display(), CONSTANTS_HEADER.join(","));
    }
    let mut set = ConstantSet::default();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let value: f64 = rec[1]
            .parse()
            .with_context(|| format!("{} row {row}: bad value `{}`", path.display(), &rec[1]))?;
        let grids = rec[3]
            .split(';')
            .filter(|g| !g.is_empty())
            .map(|g| g.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{} row {row}: bad grids `{}`", path.display(), &rec[3]))?;
        set.insert(CalibratedConstant {
            name: rec[0].to_string(),
            value,
            ensemble: rec[2].to_string(),
            grids,
        });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 0.0, f64::MIN_POSITIVE] {
            assert_eq!(float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn constants_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(CONSTANTS);
        let mut set = ConstantSet::default();
        for (name, v) in [("a", 1.0 / 7.0), ("gronwall:T1.5(s=0.2)", 4.5e-32)] {
            set.insert(CalibratedConstant {
                name: name.into(),
                value: v,
                ensemble: "n=16 seeds=0..4".into(),
                grids: vec![16, 32],
            });
        }
        write_constants(&path, &set).unwrap();
        assert_eq!(read_constants(&path).unwrap(), set);
    }
}
