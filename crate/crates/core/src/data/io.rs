//! Comma-separated text files with one header line:
//!
//! * labels: `id,label` with labels `+1` / `-1`
//! * features: `id,f1,...,fd`
//! * probabilities: `id,p_plus`
//!
//! Floats are written in shortest round-trip form, so write-then-load is
//! bit-exact.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::domain::{Dataset, FeatureMatrix, Label};
use crate::error::{Error, Result};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Rows after the header, each with its 1-based line number.
fn read_table(path: &Path, expected_header: impl Fn(&[&str]) -> bool, header_desc: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(path, 1, e.to_string()))?,
        None => return Err(parse_err(path, 1, "missing header")),
    };
    let fields: Vec<&str> = header.iter().collect();
    if !expected_header(&fields) {
        return Err(parse_err(path, 1, format!("expected header `{header_desc}`")));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(rows)
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("`{field}` is not a number")))
}

pub fn load_labels(path: &Path) -> Result<Vec<(String, Label)>> {
    let rows = read_table(path, |h| h == ["id", "label"], "id,label")?;
    if rows.is_empty() {
        return Err(parse_err(path, 2, "no rows"));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        if row.len() != 2 {
            return Err(parse_err(path, line, format!("expected 2 fields, found {}", row.len())));
        }
        let value: i64 = row[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("`{}` is not a label", row[1])))?;
        let label = Label::try_from(value).map_err(|e| parse_err(path, line, e.to_string()))?;
        if !seen.insert(row[0].clone()) {
            return Err(Error::DuplicateId(row[0].clone()));
        }
        out.push((row[0].clone(), label));
    }
    Ok(out)
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let rows = read_table(
        path,
        |h| h.len() >= 2 && h[0] == "id" && h[1..].iter().enumerate().all(|(k, name)| *name == format!("f{}", k + 1)),
        "id,f1,...,fd",
    )?;
    if rows.is_empty() {
        return Err(parse_err(path, 2, "no rows"));
    }
    let dims = rows[0].1.len() - 1;
    let mut ids = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len() * dims);
    for (line, row) in &rows {
        if row.len() != dims + 1 {
            return Err(parse_err(
                path,
                *line,
                format!("row `{}` has {} features, expected {dims}", row[0], row.len() - 1),
            ));
        }
        ids.push(row[0].clone());
        for field in &row[1..] {
            values.push(parse_f64(path, *line, field)?);
        }
    }
    FeatureMatrix::new(ids, dims, values)
}

/// Reorders `features` to follow `ids`; every id must be present exactly once.
fn align(features: &FeatureMatrix, ids: &[String]) -> Result<FeatureMatrix> {
    let index: HashMap<&str, usize> = features
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let wanted: HashSet<&str> = ids.iter().map(String::as_str).collect();
    if let Some(extra) = features.ids().iter().find(|id| !wanted.contains(id.as_str())) {
        return Err(Error::UnexpectedId(extra.clone()));
    }
    let order = ids
        .iter()
        .map(|id| index.get(id.as_str()).copied().ok_or_else(|| Error::MissingId(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    features.select(&order)
}

/// Loads labels and both feature files, realigning feature rows to the
/// label file's id order.
pub fn load_dataset(label_file: &Path, phi_file: &Path, phi_prime_file: &Path) -> Result<Dataset> {
    let labeled = load_labels(label_file)?;
    let ids: Vec<String> = labeled.iter().map(|(id, _)| id.clone()).collect();
    let labels = labeled.into_iter().map(|(_, l)| l).collect();
    let phi = align(&load_features(phi_file)?, &ids)?;
    let phi_prime = align(&load_features(phi_prime_file)?, &ids)?;
    Dataset::new(labels, phi, phi_prime)
}

/// Per-id `p(+1|x)` from an external classifier.
pub fn load_probabilities(path: &Path) -> Result<BTreeMap<String, f64>> {
    let rows = read_table(path, |h| h == ["id", "p_plus"], "id,p_plus")?;
    if rows.is_empty() {
        return Err(parse_err(path, 2, "no rows"));
    }
    let mut table = BTreeMap::new();
    for (line, row) in rows {
        if row.len() != 2 {
            return Err(parse_err(path, line, format!("expected 2 fields, found {}", row.len())));
        }
        let p = parse_f64(path, line, &row[1])?;
        if !(0.0..=1.0).contains(&p) {
            return Err(parse_err(path, line, format!("probability {p} outside [0, 1]")));
        }
        if table.insert(row[0].clone(), p).is_some() {
            return Err(Error::DuplicateId(row[0].clone()));
        }
    }
    Ok(table)
}

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".tmp");
        path.with_file_name(name)
    };
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn labels_csv(data: &Dataset) -> String {
    let mut out = String::from("id,label\n");
    for (id, label) in data.ids().iter().zip(data.labels()) {
        let v = i64::from(*label);
        out.push_str(&format!("{id},{}\n", if v > 0 { "+1" } else { "-1" }));
    }
    out
}

pub fn features_csv(features: &FeatureMatrix) -> String {
    let mut out = String::from("id");
    for k in 1..=features.dims() {
        out.push_str(&format!(",f{k}"));
    }
    out.push('\n');
    for (id, row) in features.ids().iter().zip(features.iter_rows()) {
        out.push_str(id);
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn probabilities_csv<'a>(rows: impl IntoIterator<Item = (&'a str, f64)>) -> String {
    let mut out = String::from("id,p_plus\n");
    for (id, p) in rows {
        out.push_str(&format!("{id},{p}\n"));
    }
    out
}

/// Paths written by [`write_dataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFiles {
    pub labels: PathBuf,
    pub phi: PathBuf,
    pub phi_prime: PathBuf,
}

impl DatasetFiles {
    /// `<dir>/<prefix>labels.csv`, `<dir>/<prefix>phi.csv`,
    /// `<dir>/<prefix>phi_prime.csv`.
    pub fn in_dir(dir: &Path, prefix: &str) -> Self {
        DatasetFiles {
            labels: dir.join(format!("{prefix}labels.csv")),
            phi: dir.join(format!("{prefix}phi.csv")),
            phi_prime: dir.join(format!("{prefix}phi_prime.csv")),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        load_dataset(&self.labels, &self.phi, &self.phi_prime)
    }
}

pub fn write_dataset(data: &Dataset, files: &DatasetFiles) -> Result<()> {
    write_atomic(&files.labels, labels_csv(data).as_bytes())?;
    write_atomic(&files.phi, features_csv(data.phi()).as_bytes())?;
    write_atomic(&files.phi_prime, features_csv(data.phi_prime()).as_bytes())
}
