//! Structure and pharmacophore input.
//!
//! PDB files are read with fixed-column slicing of `ATOM`/`HETATM` records;
//! only the serial, atom name and coordinates are kept. Pharmacophore points
//! come from a small JSON document that either names atom serials (the point
//! is their unweighted centroid) or gives explicit coordinates.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cartesian position in Å.
pub type Vec3 = [f64; 3];

pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordKind {
    #[serde(rename = "ATOM")]
    Atom,
    #[serde(rename = "HETATM")]
    Hetatm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub serial: u32,
    pub name: String,
    pub position: Vec3,
    pub record_kind: RecordKind,
}

// 1-indexed inclusive column ranges from the PDB format, as 0-indexed half-open.
const SERIAL_COLS: (usize, usize, &str) = (6, 11, "7-11");
const NAME_COLS: (usize, usize, &str) = (12, 16, "13-16");
const X_COLS: (usize, usize, &str) = (30, 38, "31-38");
const Y_COLS: (usize, usize, &str) = (38, 46, "39-46");
const Z_COLS: (usize, usize, &str) = (46, 54, "47-54");

fn field<'a>(line: &'a str, lineno: usize, cols: (usize, usize, &'static str)) -> Result<&'a str> {
    let (start, end, label) = cols;
    line.get(start..end.min(line.len()))
        .filter(|s| !s.is_empty() || end <= line.len())
        .ok_or_else(|| Error::PdbParse {
            line: lineno,
            columns: label,
            message: "record too short".into(),
        })
}

fn numeric<T: FromStr>(line: &str, lineno: usize, cols: (usize, usize, &'static str)) -> Result<T> {
    let raw = field(line, lineno, cols)?.trim();
    raw.parse::<T>().map_err(|_| Error::PdbParse {
        line: lineno,
        columns: cols.2,
        message: format!("expected a number, found {raw:?}"),
    })
}

/// Parses every `ATOM`/`HETATM` line; all other records are skipped.
pub fn parse_pdb_atoms(text: &str) -> Result<Vec<AtomRecord>> {
    let mut atoms = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let record_kind = if line.starts_with("ATOM") {
            RecordKind::Atom
        } else if line.starts_with("HETATM") {
            RecordKind::Hetatm
        } else {
            continue;
        };
        if !line.is_ascii() {
            return Err(Error::PdbParse {
                line: lineno,
                columns: "1-80",
                message: "non-ASCII characters in record".into(),
            });
        }
        let serial: u32 = numeric(line, lineno, SERIAL_COLS)?;
        let name = line
            .get(NAME_COLS.0..NAME_COLS.1.min(line.len()))
            .unwrap_or("")
            .trim()
            .to_string();
        let position = [
            numeric::<f64>(line, lineno, X_COLS)?,
            numeric::<f64>(line, lineno, Y_COLS)?,
            numeric::<f64>(line, lineno, Z_COLS)?,
        ];
        if let Some(bad) = position.iter().position(|c| !c.is_finite()) {
            return Err(Error::PdbParse {
                line: lineno,
                columns: [X_COLS.2, Y_COLS.2, Z_COLS.2][bad],
                message: "coordinate is not finite".into(),
            });
        }
        if !seen.insert(serial) {
            return Err(Error::DuplicateSerial { serial, line: lineno });
        }
        atoms.push(AtomRecord {
            serial,
            name,
            position,
            record_kind,
        });
    }
    Ok(atoms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PharmacophoreKind {
    HD,
    HA,
    HP,
    AR,
}

impl PharmacophoreKind {
    pub const ALL: [PharmacophoreKind; 4] = [Self::HD, Self::HA, Self::HP, Self::AR];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Hydrogen-bond donor or acceptor.
    pub fn is_hbond(self) -> bool {
        matches!(self, Self::HD | Self::HA)
    }
}

impl fmt::Display for PharmacophoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::HD => "HD",
            Self::HA => "HA",
            Self::HP => "HP",
            Self::AR => "AR",
        };
        f.write_str(s)
    }
}

impl FromStr for PharmacophoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HD" => Ok(Self::HD),
            "HA" => Ok(Self::HA),
            "HP" => Ok(Self::HP),
            "AR" => Ok(Self::AR),
            other => Err(Error::UnknownKind {
                found: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Ligand,
    Protein,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    /// Centroid of the listed atom serials.
    Atoms(Vec<u32>),
    Coords(Vec3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub label: String,
    pub kind: PharmacophoreKind,
    pub source: PointSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PharmacophoreSpec {
    pub role: Role,
    pub points: Vec<PointSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    label: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec3>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    role: Role,
    points: Vec<RawPoint>,
}

pub fn parse_pharmacophore_spec(text: &str) -> Result<PharmacophoreSpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    let mut labels = HashSet::new();
    let mut points = Vec::with_capacity(raw.points.len());
    for p in raw.points {
        let kind: PharmacophoreKind = p.kind.parse()?;
        if !labels.insert(p.label.clone()) {
            return Err(Error::DuplicateLabel(p.label));
        }
        let source = match (p.atoms, p.coords) {
            (Some(_), Some(_)) => {
                return Err(Error::Spec(format!(
                    "point {:?} gives both \"atoms\" and \"coords\"",
                    p.label
                )))
            }
            (None, None) => {
                return Err(Error::Spec(format!(
                    "point {:?} needs either \"atoms\" or \"coords\"",
                    p.label
                )))
            }
            (Some(serials), None) => {
                if serials.is_empty() {
                    return Err(Error::Spec(format!("point {:?} has an empty atom list", p.label)));
                }
                PointSource::Atoms(serials)
            }
            (None, Some(c)) => {
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Spec(format!("point {:?} has non-finite coords", p.label)));
                }
                PointSource::Coords(c)
            }
        };
        points.push(PointSpec {
            label: p.label,
            kind,
            source,
        });
    }
    Ok(PharmacophoreSpec {
        role: raw.role,
        points,
    })
}

impl PharmacophoreSpec {
    pub fn to_json(&self) -> String {
        let raw = RawSpec {
            role: self.role,
            points: self
                .points
                .iter()
                .map(|p| {
                    let (atoms, coords) = match &p.source {
                        PointSource::Atoms(a) => (Some(a.clone()), None),
                        PointSource::Coords(c) => (None, Some(*c)),
                    };
                    RawPoint {
                        label: p.label.clone(),
                        kind: p.kind.to_string(),
                        atoms,
                        coords,
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("spec serialization cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PharmacophorePoint {
    pub label: String,
    pub kind: PharmacophoreKind,
    pub position: Vec3,
    pub role: Role,
}

/// Places every spec point in space. Serial lists resolve to the arithmetic
/// mean of the referenced atoms; explicit coordinates pass through.
pub fn resolve_points(spec: &PharmacophoreSpec, atoms: &[AtomRecord]) -> Result<Vec<PharmacophorePoint>> {
    let by_serial: HashMap<u32, &AtomRecord> = atoms.iter().map(|a| (a.serial, a)).collect();
    spec.points
        .iter()
        .map(|p| {
            let position = match &p.source {
                PointSource::Coords(c) => *c,
                PointSource::Atoms(serials) => {
                    let mut sum = [0.0; 3];
                    for &serial in serials {
                        let atom = by_serial.get(&serial).ok_or_else(|| Error::MissingSerial {
                            label: p.label.clone(),
                            serial,
                        })?;
                        for (s, c) in sum.iter_mut().zip(atom.position) {
                            *s += c;
                        }
                    }
                    let n = serials.len() as f64;
                    sum.map(|s| s / n)
                }
            };
            Ok(PharmacophorePoint {
                label: p.label.clone(),
                kind: p.kind,
                position,
                role: spec.role,
            })
        })
        .collect()
}
