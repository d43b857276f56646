//! Labelled curve collections and their on-disk formats.
//!
//! CSV: header `curve_id,label,t_index,dim_0,...,dim_{n-1}`, one row per
//! sample, `label` empty when unknown. JSON:
//! `{"n": n, "curves": [{"id": .., "label": ..|null, "samples": [[..], ..]}]}`.
//! Curves may have different sample counts on disk.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterLabels;
use crate::curve::Curve;
use crate::error::{Error, Result};

// Label and (t_index, point) rows gathered for one curve id.
type CsvCurve = (Option<usize>, Vec<(usize, Vec<f64>)>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DatasetMeta {
    pub generator: String,
    pub seed: u64,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub curves: Vec<Curve>,
    pub labels: Vec<Option<usize>>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn new(ids: Vec<String>, curves: Vec<Curve>, labels: Vec<Option<usize>>) -> Result<Self> {
        if ids.len() != curves.len() || labels.len() != curves.len() {
            return Err(Error::InvalidArgument("ids, curves and labels must align".into()));
        }
        if let Some(first) = curves.first() {
            if curves.iter().any(|c| c.dim() != first.dim()) {
                return Err(Error::InvalidArgument("curves have mixed dimensions".into()));
            }
        }
        Ok(Self {
            ids,
            curves,
            labels,
            meta: DatasetMeta::default(),
        })
    }

    /// Dataset with generated ids `c0000, c0001, ...` and known labels.
    pub fn labelled(curves: Vec<Curve>, labels: Vec<usize>) -> Result<Self> {
        let ids = (0..curves.len()).map(|i| format!("c{i:04}")).collect();
        Self::new(ids, curves, labels.into_iter().map(Some).collect())
    }

    pub fn with_meta(mut self, meta: DatasetMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.curves.first().map(Curve::dim)
    }

    /// Ground-truth labels; fails if any curve is unlabelled.
    pub fn truth(&self) -> Result<ClusterLabels> {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| Error::MissingData(format!("curve {} has no label", self.ids[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        ClusterLabels::from_labels(labels)
    }

    /// Every curve resampled to `t_count` samples.
    pub fn resampled(&self, t_count: usize) -> Result<Dataset> {
        let curves = self
            .curves
            .iter()
            .map(|c| c.resample(t_count))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            curves,
            ..self.clone()
        })
    }

    pub fn max_samples(&self) -> usize {
        self.curves.iter().map(Curve::len).max().unwrap_or(0)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            curves: indices.iter().map(|&i| self.curves[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let n = self.dim().unwrap_or(0);
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["curve_id".to_string(), "label".into(), "t_index".into()];
        header.extend((0..n).map(|d| format!("dim_{d}")));
        out.write_record(&header)?;
        for ((id, curve), label) in self.ids.iter().zip(&self.curves).zip(&self.labels) {
            let label = label.map(|l| l.to_string()).unwrap_or_default();
            for t in 0..curve.len() {
                let mut rec = vec![id.clone(), label.clone(), t.to_string()];
                rec.extend(curve.samples().row(t).iter().map(|v| v.to_string()));
                out.write_record(&rec)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Dataset> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers()?.clone();
        let expected = ["curve_id", "label", "t_index"];
        if header.len() < 4 || header.iter().take(3).ne(expected.iter().copied()) {
            return Err(Error::Format(
                "dataset CSV header must be curve_id,label,t_index,dim_0,...".into(),
            ));
        }
        for (d, name) in header.iter().skip(3).enumerate() {
            if name != format!("dim_{d}") {
                return Err(Error::Format(format!("unexpected column {name:?}, wanted dim_{d}")));
            }
        }
        let n = header.len() - 3;

        let mut order: Vec<String> = Vec::new();
        let mut rows: HashMap<String, CsvCurve> = HashMap::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            let at = |what: &str| Error::Format(format!("row {}: bad {what}", line + 2));
            let id = rec.get(0).ok_or_else(|| at("curve_id"))?.to_string();
            let label = match rec.get(1).map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(s.parse::<usize>().map_err(|_| at("label"))?),
            };
            let t: usize = rec.get(2).and_then(|s| s.trim().parse().ok()).ok_or_else(|| at("t_index"))?;
            let values = (0..n)
                .map(|d| rec.get(3 + d).and_then(|s| s.trim().parse::<f64>().ok()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| at("coordinate"))?;
            let entry = rows.entry(id.clone()).or_insert_with(|| {
                order.push(id.clone());
                (label, Vec::new())
            });
            if entry.0 != label {
                return Err(Error::Format(format!("curve {id} has inconsistent labels")));
            }
            entry.1.push((t, values));
        }

        let mut ids = Vec::with_capacity(order.len());
        let mut curves = Vec::with_capacity(order.len());
        let mut labels = Vec::with_capacity(order.len());
        for id in order {
            let (label, mut samples) = rows.remove(&id).expect("id recorded on insert");
            samples.sort_by_key(|(t, _)| *t);
            if samples.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Format(format!("curve {id} repeats a t_index")));
            }
            let points: Vec<Vec<f64>> = samples.into_iter().map(|(_, v)| v).collect();
            let curve = Curve::from_rows(&points)
                .map_err(|e| Error::Format(format!("curve {id}: {e}")))?;
            ids.push(id);
            curves.push(curve);
            labels.push(label);
        }
        Dataset::new(ids, curves, labels)
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        let doc = JsonDataset {
            n: self.dim().unwrap_or(0),
            curves: self
                .ids
                .iter()
                .zip(&self.curves)
                .zip(&self.labels)
                .map(|((id, c), &label)| JsonCurve {
                    id: id.clone(),
                    label,
                    samples: (0..c.len()).map(|t| c.point(t)).collect(),
                })
                .collect(),
        };
        serde_json::to_writer(w, &doc)?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Dataset> {
        let doc: JsonDataset = serde_json::from_reader(r)?;
        let mut ids = Vec::new();
        let mut curves = Vec::new();
        let mut labels = Vec::new();
        for c in doc.curves {
            if c.samples.iter().any(|s| s.len() != doc.n) {
                return Err(Error::Format(format!(
                    "curve {} has samples not of dimension {}",
                    c.id, doc.n
                )));
            }
            curves.push(
                Curve::from_rows(&c.samples).map_err(|e| Error::Format(format!("curve {}: {e}", c.id)))?,
            );
            ids.push(c.id);
            labels.push(c.label);
        }
        Dataset::new(ids, curves, labels)
    }

    /// Loads by extension: `.json` as JSON, anything else as CSV.
    pub fn load(path: &Path) -> Result<Dataset> {
        let file = BufReader::new(File::open(path)?);
        if is_json(path) {
            Self::read_json(file)
        } else {
            Self::read_csv(file)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        if is_json(path) {
            self.write_json(&mut file)?;
        } else {
            self.write_csv(&mut file)?;
        }
        file.flush()?;
        Ok(())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Serialize, Deserialize)]
struct JsonDataset {
    n: usize,
    curves: Vec<JsonCurve>,
}

#[derive(Serialize, Deserialize)]
struct JsonCurve {
    id: String,
    label: Option<usize>,
    samples: Vec<Vec<f64>>,
}

/// Column `j` is the concatenated coordinate traces of curve `j`
/// (`dim_0` samples first, then `dim_1`, ...).
pub fn flatten_for_lrr(d: &Dataset) -> Result<DMatrix<f64>> {
    let first = d
        .curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty dataset".into()))?;
    let (t, n) = (first.len(), first.dim());
    if d.curves.iter().any(|c| c.dim() != n) {
        return Err(Error::InvalidArgument("curves have mixed dimensions".into()));
    }
    if d.curves.iter().any(|c| c.len() != t) {
        return Err(Error::InvalidArgument("curves must share T; resample first".into()));
    }
    let mut x = DMatrix::zeros(t * n, d.len());
    for (j, c) in d.curves.iter().enumerate() {
        for dim in 0..n {
            for s in 0..t {
                x[(dim * t + s, j)] = c.samples()[(s, dim)];
            }
        }
    }
    Ok(x)
}

/// Labels CSV `curve_id,label`.
pub fn write_labels_csv(ids: &[String], labels: &ClusterLabels, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["curve_id", "label"])?;
    for (id, l) in ids.iter().zip(labels.labels()) {
        out.write_record([id.as_str(), &l.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_labels_csv(r: impl Read) -> Result<(Vec<String>, Vec<usize>)> {
    let mut reader = csv::Reader::from_reader(r);
    let header = reader.headers()?.clone();
    if header.iter().ne(["curve_id", "label"]) {
        return Err(Error::Format("labels CSV header must be curve_id,label".into()));
    }
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let label = rec
            .get(1)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("row {}: bad label", line + 2)))?;
        ids.push(rec.get(0).unwrap_or_default().to_string());
        labels.push(label);
    }
    Ok((ids, labels))
}
