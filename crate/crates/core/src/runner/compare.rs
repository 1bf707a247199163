use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{sequence_distance, DistanceMetric};

const DISTRIBUTION_FILE: &str = "p_nt.csv";

#[derive(Clone, Debug, Serialize)]
pub struct TimeDistance {
    pub t: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FileComparison {
    pub path: String,
    pub bytes_equal: bool,
    /// Largest distance over the file: the distribution metric for `p_nt.csv`,
    /// otherwise the largest absolute difference of numeric cells.
    pub distance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_t: Vec<TimeDistance>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub metric: &'static str,
    pub tolerance: f64,
    pub files: Vec<FileComparison>,
    /// CSV files present on one side only.
    pub unmatched: Vec<String>,
    pub passed: bool,
}

fn metric_name(metric: DistanceMetric) -> &'static str {
    match metric {
        DistanceMetric::TotalVariation => "tv",
        DistanceMetric::KolmogorovSmirnov => "ks",
    }
}

fn csv_files(root: &Path) -> Result<BTreeMap<String, PathBuf>> {
    fn walk(dir: &Path, prefix: &str, out: &mut BTreeMap<String, PathBuf>) -> Result<()> {
        let mut entries: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io(dir, e))?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let name = entry.file_name().to_string_lossy().into_owned();
            let path = entry.path();
            let rel = if prefix.is_empty() { name.clone() } else { format!("{prefix}/{name}") };
            if path.is_dir() {
                if name != "checkpoints" {
                    walk(&path, &rel, out)?;
                }
            } else if name.ends_with(".csv") {
                out.insert(rel, path);
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, "", &mut out)?;
    Ok(out)
}

struct Table {
    header: String,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::ShapeMismatch(format!("{} is empty", path.display())))?;
    let rows = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok(Table { header: header.to_string(), rows })
}

/// `t -> [(n, p)]` from a `t,n,p` table.
fn distributions(table: &Table, path: &Path) -> Result<BTreeMap<usize, Vec<(i64, f64)>>> {
    let bad = || Error::ShapeMismatch(format!("{} is not a t,n,p table", path.display()));
    if table.header != "t,n,p" {
        return Err(bad());
    }
    let mut out: BTreeMap<usize, Vec<(i64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        let [t, n, p] = row.as_slice() else { return Err(bad()) };
        let (t, n, p) = (t.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?, p.parse().map_err(|_| bad())?);
        out.entry(t).or_default().push((n, p));
    }
    for d in out.values_mut() {
        d.sort_by_key(|&(n, _)| n);
    }
    Ok(out)
}

fn compare_distributions(a: &Path, b: &Path, metric: DistanceMetric) -> Result<Vec<TimeDistance>> {
    let da = distributions(&read_table(a)?, a)?;
    let db = distributions(&read_table(b)?, b)?;
    let mut out = Vec::new();
    for (t, pa) in &da {
        let Some(pb) = db.get(t) else { continue };
        if pa.len() != pb.len() || pa.iter().zip(pb).any(|(x, y)| x.0 != y.0) {
            return Err(Error::ShapeMismatch(format!("site labels differ at t = {t}")));
        }
        let xa: Vec<f64> = pa.iter().map(|x| x.1).collect();
        let xb: Vec<f64> = pb.iter().map(|x| x.1).collect();
        out.push(TimeDistance { t: *t, distance: sequence_distance(&xa, &xb, metric)? });
    }
    if out.is_empty() {
        return Err(Error::ShapeMismatch(format!("{} and {} share no sampled times", a.display(), b.display())));
    }
    Ok(out)
}

fn compare_series(a: &Path, b: &Path) -> Result<f64> {
    let (ta, tb) = (read_table(a)?, read_table(b)?);
    if ta.header != tb.header || ta.rows.len() != tb.rows.len() {
        return Err(Error::ShapeMismatch(format!("{} and {} differ in shape", a.display(), b.display())));
    }
    let mut worst = 0.0f64;
    for (ra, rb) in ta.rows.iter().zip(&tb.rows) {
        if ra.len() != rb.len() {
            return Err(Error::ShapeMismatch(format!("{}: ragged rows", a.display())));
        }
        for (x, y) in ra.iter().zip(rb) {
            let d = match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) if x == y => 0.0,
                (Ok(x), Ok(y)) => (x - y).abs(),
                _ if x == y => 0.0,
                _ => f64::INFINITY,
            };
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

fn compare_file(rel: String, a: &Path, b: &Path, metric: DistanceMetric, tolerance: f64) -> Result<FileComparison> {
    let bytes_equal = fs::read(a).map_err(|e| Error::io(a, e))? == fs::read(b).map_err(|e| Error::io(b, e))?;
    let is_distribution = [a, b].iter().all(|p| p.file_name().is_some_and(|n| n == DISTRIBUTION_FILE));
    let (distance, per_t) = if is_distribution {
        let per_t = compare_distributions(a, b, metric)?;
        (per_t.iter().map(|d| d.distance).fold(0.0, f64::max), per_t)
    } else {
        (compare_series(a, b)?, Vec::new())
    };
    let passed = if tolerance == 0.0 { bytes_equal || distance == 0.0 } else { distance <= tolerance };
    Ok(FileComparison { path: rel, bytes_equal, distance, per_t, passed })
}

/// Compares two run directories file by file, or two single CSV files.
pub fn compare(a: &Path, b: &Path, metric: DistanceMetric, tolerance: f64) -> Result<CompareReport> {
    let mut files = Vec::new();
    let mut unmatched = Vec::new();
    if a.is_file() && b.is_file() {
        let rel = a.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        files.push(compare_file(rel, a, b, metric, tolerance)?);
    } else if a.is_dir() && b.is_dir() {
        let fa = csv_files(a)?;
        let fb = csv_files(b)?;
        for (rel, pa) in &fa {
            match fb.get(rel) {
                Some(pb) => files.push(compare_file(rel.clone(), pa, pb, metric, tolerance)?),
                None => unmatched.push(rel.clone()),
            }
        }
        unmatched.extend(fb.keys().filter(|k| !fa.contains_key(*k)).cloned());
        if files.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "{} and {} have no CSV outputs in common",
                a.display(),
                b.display()
            )));
        }
    } else {
        return Err(Error::InvalidArgument("compare needs two directories or two files".into()));
    }
    let passed = files.iter().all(|f| f.passed);
    Ok(CompareReport { metric: metric_name(metric), tolerance, files, unmatched, passed })
}
