use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentReport;
use crate::error::{Error, Result};

pub const PAYLOADS: [&str; 4] = ["report.json", "loss_curves.csv", "samples.csv", "cliques.csv"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn entry(name: &str, bytes: &[u8]) -> ManifestEntry {
    ManifestEntry {
        name: name.into(),
        sha256: hex::encode(Sha256::digest(bytes)),
        bytes: bytes.len() as u64,
    }
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes the payload files and a manifest of their hashes into `dir`.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut doc = report.clone();
    doc.artifacts = PAYLOADS.iter().map(|s| s.to_string()).chain(["manifest.json".into()]).collect();
    let n = report.problem.as_ref().map_or(0, |p| p.vertices);

    let json = serde_json::to_string_pretty(&doc)?;
    let curves = csv_string(
        &["restart", "iteration", "loss"],
        report.restarts.iter().flat_map(|r| {
            r.loss_curve
                .iter()
                .enumerate()
                .map(move |(t, l)| vec![r.index.to_string(), t.to_string(), l.to_string()])
        }),
    )?;
    let samples = csv_string(
        &["restart", "bitstring", "index", "count"],
        report.restarts.iter().flat_map(|r| {
            r.samples.iter().flat_map(move |s| {
                s.counts.iter().map(move |(&z, &c)| {
                    vec![
                        r.index.to_string(),
                        crate::ising::Bitstring::from_index(z, n).to_string(),
                        z.to_string(),
                        c.to_string(),
                    ]
                })
            })
        }),
    )?;
    let cliques = report.cliques_csv.clone().unwrap_or_else(|| "rank,weight,members\n".into());

    let mut files = Vec::new();
    for (name, body) in PAYLOADS.iter().zip([json, curves, samples, cliques]) {
        write(&dir.join(name), body.as_bytes())?;
        files.push(entry(name, body.as_bytes()));
    }
    let manifest = Manifest { files };
    write(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_report(dir: &Path) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(&read(&dir.join("report.json"))?)?)
}

/// Names of manifest entries whose file no longer matches its hash.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let manifest: Manifest = serde_json::from_str(&read(&dir.join("manifest.json"))?)?;
    let mut bad = Vec::new();
    for f in &manifest.files {
        let path = dir.join(&f.name);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if entry(&f.name, &bytes) != *f {
            bad.push(f.name.clone());
        }
    }
    Ok(bad)
}

/// P_true from `samples.csv` and the targets stored in `report.json`.
pub fn recompute_p_true(dir: &Path) -> Result<f64> {
    let report = load_report(dir)?;
    let problem = report
        .problem
        .ok_or_else(|| Error::InvalidArgument("report has no problem section".into()))?;
    let mut per: BTreeMap<usize, Vec<(String, u64)>> = BTreeMap::new();
    let path = dir.join("samples.csv");
    let mut rdr = csv::Reader::from_path(&path)?;
    for row in rdr.records() {
        let row = row?;
        let bad = || Error::InvalidArgument(format!("{}: malformed row", path.display()));
        let restart: usize = row.get(0).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let count: u64 = row.get(3).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        per.entry(restart).or_default().push((row.get(1).ok_or_else(bad)?.to_string(), count));
    }
    if per.is_empty() {
        return Err(Error::InvalidArgument("no samples recorded".into()));
    }
    let hits = per
        .values()
        .filter(|rows| {
            let top = rows.iter().map(|r| r.1).max().unwrap_or(0);
            rows.iter().any(|(b, c)| *c == top && problem.targets.contains(b))
        })
        .count();
    Ok(hits as f64 / per.len() as f64)
}
