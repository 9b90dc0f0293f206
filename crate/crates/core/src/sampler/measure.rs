use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

/// Provenance of a sampled measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMeta {
    pub seed: u64,
    pub eps_stop: f64,
    pub n_samples: usize,
    /// Walks that hit the step cap and contributed no atom.
    pub timed_out: usize,
}

/// A finitely supported measure of total mass at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<Atom>,
    total_weight: f64,
    meta: Option<SampleMeta>,
    degenerate: bool,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(a.weight > 0.0 && a.weight.is_finite()) || !a.point.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "atom at {} has invalid weight {}",
                    a.point, a.weight
                )));
            }
        }
        let total_weight = atoms.iter().map(|a| a.weight).sum();
        Ok(EmpiricalMeasure {
            atoms,
            total_weight,
            meta: None,
            degenerate: false,
        })
    }

    /// Equal weights `1 / len` on the given points.
    pub fn uniform(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("uniform measure needs at least one point".into()));
        }
        let w = 1.0 / points.len() as f64;
        Self::new(points.iter().map(|&point| Atom { point, weight: w }).collect())
    }

    pub fn point_mass(p: Point) -> Self {
        EmpiricalMeasure {
            atoms: vec![Atom { point: p, weight: 1.0 }],
            total_weight: 1.0,
            meta: None,
            degenerate: false,
        }
    }

    pub(crate) fn from_parts(atoms: Vec<Atom>, total_weight: f64, meta: Option<SampleMeta>, degenerate: bool) -> Self {
        EmpiricalMeasure {
            atoms,
            total_weight,
            meta,
            degenerate,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn meta(&self) -> Option<&SampleMeta> {
        self.meta.as_ref()
    }

    /// Set when the sampling basepoint already sat inside the absorption shell.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Fraction of walks that timed out, when known.
    pub fn mass_deficit(&self) -> f64 {
        match self.meta {
            Some(m) if m.n_samples > 0 => m.timed_out as f64 / m.n_samples as f64,
            _ => 0.0,
        }
    }

    /// Total weight of atoms satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(Point) -> bool) -> f64 {
        self.atoms.iter().filter(|a| pred(a.point)).map(|a| a.weight).sum::<f64>() + 0.0
    }

    /// Same atoms with weights rescaled so they sum to `total`.
    pub fn renormalized(&self, total: f64) -> Self {
        let s = total / self.total_weight;
        EmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: a.point,
                    weight: a.weight * s,
                })
                .collect(),
            total_weight: total,
            meta: self.meta,
            degenerate: self.degenerate,
        }
    }

    pub fn translated(&self, v: Point) -> Self {
        EmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: a.point + v,
                    weight: a.weight,
                })
                .collect(),
            ..self.clone()
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# total_weight={}", self.total_weight)?;
        if let Some(m) = &self.meta {
            writeln!(out, "# seed={}", m.seed)?;
            writeln!(out, "# eps_stop={}", m.eps_stop)?;
            writeln!(out, "# n_samples={}", m.n_samples)?;
            writeln!(out, "# timed_out={}", m.timed_out)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "weight"])?;
        for a in &self.atoms {
            w.write_record([a.point.x.to_string(), a.point.y.to_string(), a.weight.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut header = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        while reader.read_line(&mut line)? > 0 {
            match line.trim().strip_prefix('#') {
                Some(rest) => {
                    if let Some((k, v)) = rest.trim().split_once('=') {
                        header.push((k.trim().to_string(), v.trim().to_string()));
                    }
                }
                None => body.push_str(&line),
            }
            line.clear();
        }
        let bad = |reason: String| Error::Format {
            path: "<measure csv>".into(),
            reason,
        };
        let mut atoms = Vec::new();
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| bad(format!("row has {} fields, expected 3", rec.len())))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| bad(e.to_string()))
            };
            atoms.push(Atom {
                point: Point::new(field(0)?, field(1)?),
                weight: field(2)?,
            });
        }
        let mut m = EmpiricalMeasure::new(atoms)?;
        let get = |k: &str| header.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        if let Some(t) = get("total_weight") {
            let t: f64 = t.parse().map_err(|_| bad(format!("bad total_weight `{t}`")))?;
            if (t - m.total_weight).abs() > 1e-9 {
                return Err(bad(format!(
                    "header total_weight {t} disagrees with atom sum {}",
                    m.total_weight
                )));
            }
        }
        if let (Some(seed), Some(eps), Some(n)) = (get("seed"), get("eps_stop"), get("n_samples")) {
            m.meta = Some(SampleMeta {
                seed: seed.parse().map_err(|_| bad("bad seed".into()))?,
                eps_stop: eps.parse().map_err(|_| bad("bad eps_stop".into()))?,
                n_samples: n.parse().map_err(|_| bad("bad n_samples".into()))?,
                timed_out: get("timed_out").and_then(|s| s.parse().ok()).unwrap_or(0),
            });
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)?;
        Self::read_csv(f).map_err(|e| match e {
            Error::Format { reason, .. } => Error::Format {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })
    }
}
