//! Text formats for diagrams, curves, tracks, feature tables, and reports.
//!
//! All writers produce deterministic output for a fixed input: CSV floats
//! use the shortest representation that round-trips, so a re-run of the
//! same extraction yields byte-identical files, and `read_feature_csv`
//! recovers exactly the matrix `feature_csv` wrote.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{EvalReport, FeatureMatrix, MethodTag};
use crate::lkc::LkcCurves;
use crate::persistence::PersistenceDiagram;
use crate::scalar::{cast, Real};
use crate::tracking::ComponentTracking;

/// Writes text to a file, creating parent directories.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a whole text file.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct BarRecord {
    birth: f64,
    death: f64,
    dim: u8,
}

/// JSON array of `{birth, death, dim}` objects, one per bar.
pub fn diagram_json<F: Real>(diagram: &PersistenceDiagram<F>) -> Result<String> {
    let records: Vec<BarRecord> = diagram
        .bars
        .iter()
        .map(|b| BarRecord {
            birth: b.birth.to_f64().expect("finite"),
            death: b.death.to_f64().expect("finite"),
            dim: b.dim,
        })
        .collect();
    Ok(serde_json::to_string_pretty(&records)?)
}

fn csv_into_string(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// CSV barcode: `bar_id,dim,birth,death` in diagram order.
pub fn barcode_csv<F: Real>(diagram: &PersistenceDiagram<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["bar_id", "dim", "birth", "death"])?;
    for (i, bar) in diagram.bars.iter().enumerate() {
        w.serialize((
            i,
            bar.dim,
            bar.birth.to_f64().expect("finite"),
            bar.death.to_f64().expect("finite"),
        ))?;
    }
    csv_into_string(w)
}

/// CSV of the scaled curves: `threshold,euler,perimeter,area`.
pub fn curves_csv<F: Real>(curves: &LkcCurves<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["threshold", "euler", "perimeter", "area"])?;
    for i in 0..curves.thresholds.len() {
        w.serialize((
            curves.thresholds[i].to_f64().expect("finite"),
            curves.euler[i].to_f64().expect("finite"),
            curves.perimeter[i].to_f64().expect("finite"),
            curves.area[i].to_f64().expect("finite"),
        ))?;
    }
    csv_into_string(w)
}

/// CSV of per-track geometry samples: `track_id,threshold,area,perimeter`,
/// tracks in id order, each track's rows from its birth threshold downward.
pub fn tracks_csv<F: Real>(tracking: &ComponentTracking<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["track_id", "threshold", "area", "perimeter"])?;
    for track in &tracking.tracks {
        for j in 0..track.area.len() {
            w.serialize((
                track.id,
                track
                    .sample_threshold(&tracking.thresholds, j)
                    .to_f64()
                    .expect("finite"),
                track.area[j],
                track.perimeter[j],
            ))?;
        }
    }
    csv_into_string(w)
}

/// CSV of track lifespans: `track_id,birth,death,essential,absorbed_into`.
pub fn track_bars_csv<F: Real>(tracking: &ComponentTracking<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["track_id", "birth", "death", "essential", "absorbed_into"])?;
    for track in &tracking.tracks {
        w.serialize((
            track.id,
            track.birth.to_f64().expect("finite"),
            track.death.to_f64().expect("finite"),
            track.essential,
            track.absorbed_into,
        ))?;
    }
    csv_into_string(w)
}

/// CSV feature table: `source_id,label` then the method's schema columns.
///
/// Row width is checked against the schema, so only genuine tables of the
/// tagged method serialize.
pub fn feature_csv<F: Real>(matrix: &FeatureMatrix<F>) -> Result<String> {
    matrix.validate()?;
    let schema = matrix.method.schema();
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = vec!["source_id".to_string(), "label".to_string()];
    header.extend(schema.iter().cloned());
    w.write_record(&header)?;
    for ((id, label), row) in matrix.ids.iter().zip(&matrix.labels).zip(&matrix.rows) {
        if row.len() != schema.len() {
            return Err(Error::FeatureLength {
                expected: schema.len(),
                got: row.len(),
            });
        }
        let mut record = vec![id.clone(), label.to_string()];
        record.extend(
            row.iter()
                .map(|v| format_float(v.to_f64().expect("finite"))),
        );
        w.write_record(&record)?;
    }
    csv_into_string(w)
}

/// Shortest decimal that parses back to the same f64; `{}` on f64 already
/// guarantees that.
fn format_float(v: f64) -> String {
    let buffer = format!("{v}");
    debug_assert_eq!(buffer.parse::<f64>().ok(), Some(v));
    buffer
}

/// Parses a table written by [`feature_csv`], verifying the exact header.
pub fn read_feature_csv<F: Real>(text: &str, method: MethodTag) -> Result<FeatureMatrix<F>> {
    let schema = method.schema();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    {
        let header = reader.headers()?;
        let expected_len = schema.len() + 2;
        if header.len() != expected_len {
            return Err(Error::FeatureLength {
                expected: expected_len,
                got: header.len(),
            });
        }
        if &header[0] != "source_id" || &header[1] != "label" {
            return Err(Error::Config(
                "feature csv must start with source_id,label".into(),
            ));
        }
        for (i, name) in schema.iter().enumerate() {
            if &header[i + 2] != name.as_str() {
                return Err(Error::Config(format!(
                    "feature csv column {} is {:?}, schema expects {:?}",
                    i + 2,
                    &header[i + 2],
                    name
                )));
            }
        }
    }

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != schema.len() + 2 {
            return Err(Error::FeatureLength {
                expected: schema.len() + 2,
                got: record.len(),
            });
        }
        ids.push(record[0].to_string());
        let label: u8 = record[1]
            .parse()
            .map_err(|_| Error::Config(format!("label {:?} is not 0 or 1", &record[1])))?;
        if label > 1 {
            return Err(Error::Config(format!("label {label} is not 0 or 1")));
        }
        labels.push(label);
        let row: Vec<F> = record
            .iter()
            .skip(2)
            .map(|cell| {
                cell.parse::<f64>()
                    .map(|v| cast::<F, f64>(v))
                    .map_err(|_| Error::Config(format!("bad float {cell:?} in feature csv")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let matrix = FeatureMatrix {
        method,
        ids,
        labels,
        rows,
    };
    matrix.validate()?;
    Ok(matrix)
}

/// Pretty JSON for any serializable report.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// CSV of per-round metrics: one row per round, one column block per method
/// plus one adjusted-Rand column per method pair.
pub fn round_scores_csv(report: &EvalReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = vec!["round".to_string()];
    for m in &report.methods {
        header.push(format!("{}_score", m.method));
        header.push(format!("{}_f1", m.method));
        header.push(format!("{}_precision", m.method));
    }
    for pair in &report.ari {
        header.push(format!("ari_{}_{}", pair.method_a, pair.method_b));
    }
    w.write_record(&header)?;
    for round in 0..report.n_rounds {
        let mut record = vec![round.to_string()];
        for m in &report.methods {
            record.push(format_float(m.scores[round]));
            record.push(format_float(m.f1[round]));
            record.push(format_float(m.precision[round]));
        }
        for pair in &report.ari {
            record.push(format_float(pair.values[round]));
        }
        w.write_record(&record)?;
    }
    csv_into_string(w)
}
