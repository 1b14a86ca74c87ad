//! CSV and JSON emission.
//!
//! Every real is written with `{:.16e}` (17 significant digits) so values
//! round-trip exactly. Files are staged in an [`OutputSet`] and only written
//! once the whole set has been produced, so a failed run leaves no partial
//! output behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chords::Chord;
use crate::error::{Result, ThermoError};
use crate::phase_space::{PhasePoint, SampledPath};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header row followed by numeric rows.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(ThermoError::DimensionMismatch {
                what: "csv row",
                expected: header.len(),
                got: row.len(),
            });
        }
        out.write_record(row.iter().map(|x| fmt_real(*x)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn table_to_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_table(&mut buf, header, rows)?;
    Ok(buf)
}

/// Path CSV: `t,z,S,T,p_1..,q_1..` (extended) or `t,z,p_1..,q_1..` (reduced).
pub fn path_to_csv<P: PhasePoint>(path: &SampledPath<P>) -> Result<Vec<u8>> {
    let header = P::csv_header(path.dim());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = path.times().iter().zip(path.points()).map(|(t, pt)| {
        let mut row = vec![*t];
        row.extend(pt.coords());
        row
    });
    table_to_bytes(&header, rows)
}

/// Reads a path written by [`path_to_csv`]; the dimension is inferred from
/// the header, which must match exactly.
pub fn read_path_csv<P: PhasePoint, R: std::io::Read>(reader: R) -> Result<SampledPath<P>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let dim = (1..=header.len())
        .find(|&n| P::csv_header(n) == header)
        .ok_or_else(|| ThermoError::invalid(format!("unrecognised path header {:?}", header.join(","))))?;
    let (mut times, mut points) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let row = record?
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| ThermoError::invalid(format!("bad number {s:?} in path csv"))))
            .collect::<Result<Vec<_>>>()?;
        times.push(row[0]);
        points.push(P::from_coords(&row[1..], dim)?);
    }
    SampledPath::new(times, points)
}

pub const CHORD_HEADER: [&str; 6] = ["q", "p", "z_start", "z_end", "length", "direction"];

pub fn chords_to_csv(chords: &[Chord]) -> Result<Vec<u8>> {
    table_to_bytes(
        &CHORD_HEADER,
        chords
            .iter()
            .map(|c| vec![c.q, c.p, c.z_start, c.z_end, c.length, f64::from(c.direction)]),
    )
}

pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Encoding of tabular output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ThermoError::invalid(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Re-encodes a numeric CSV table as `{"columns": [...], "rows": [[...]]}`.
pub fn csv_table_to_json(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let columns: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let rows = rdr
        .records()
        .map(|r| {
            r?.iter()
                .map(|s| s.parse::<f64>().map_err(|_| ThermoError::invalid(format!("non-numeric cell {s:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    to_json_bytes(&serde_json::json!({ "columns": columns, "rows": rows }))
}

/// Named files staged in memory, written together by [`OutputSet::commit`].
#[derive(Debug, Default, Clone)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json<T: Serialize + ?Sized>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        self.add(name, to_json_bytes(value)?);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn into_files(self) -> Vec<(String, Vec<u8>)> {
        self.files
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Converts every `.csv` entry to its `.json` table form when `format`
    /// is JSON; other entries are kept as they are.
    pub fn into_format(self, format: OutputFormat) -> Result<Self> {
        if format == OutputFormat::Csv {
            return Ok(self);
        }
        let files = self
            .files
            .into_iter()
            .map(|(name, bytes)| match name.strip_suffix(".csv") {
                Some(stem) => Ok((format!("{stem}.json"), csv_table_to_json(&bytes)?)),
                None => Ok((name, bytes)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OutputSet { files })
    }

    /// Creates `dir` if needed and writes every staged file into it.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                fs::write(&path, bytes)?;
                Ok(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::ReducedPoint;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 2f64.ln(), 1e-300, 6.02214076e23, -0.0] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn reduced_path_csv() {
        let path = SampledPath::new(
            vec![0.0, 1.0],
            vec![ReducedPoint::scalar(0.0, 2.0, -0.5), ReducedPoint::scalar(1.0, 2.0, -0.5)],
        )
        .unwrap();
        let text = String::from_utf8(path_to_csv(&path).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,z,p_1,q_1"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,0.0000000000000000e0,2.0000000000000000e0,-5.0000000000000000e-1")
        );
    }

    #[test]
    fn path_csv_round_trip() {
        use crate::phase_space::ExtendedPoint;
        let pts = vec![
            ExtendedPoint::new(0.1, 1.0, 2.0, vec![1.0, 0.0], vec![-1.0, 3.0]).unwrap(),
            ExtendedPoint::new(0.2, 1.5, 2.5, vec![1.0, 0.0], vec![-1.0, 3.0]).unwrap(),
        ];
        let path = SampledPath::new(vec![0.0, 0.5], pts).unwrap();
        let bytes = path_to_csv(&path).unwrap();
        let back: SampledPath<ExtendedPoint> = read_path_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.points(), path.points());
        assert!(read_path_csv::<ReducedPoint, _>(bytes.as_slice()).is_err());
        assert!(read_path_csv::<ReducedPoint, _>("t,z,p_1,q_1\n0,x,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn json_tables() {
        let mut set = OutputSet::new();
        set.add("a.csv", table_to_bytes(&["x", "y"], vec![vec![0.5, -2.0]]).unwrap());
        set.add("m.json", b"{}\n".to_vec());
        let set = set.into_format(OutputFormat::Json).unwrap();
        assert_eq!(set.names().collect::<Vec<_>>(), ["a.json", "m.json"]);
        let v: serde_json::Value = serde_json::from_slice(set.get("a.json").unwrap()).unwrap();
        assert_eq!(v, serde_json::json!({"columns": ["x", "y"], "rows": [[0.5, -2.0]]}));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(table_to_bytes(&["a", "b"], vec![vec![1.0]]).is_err());
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = OutputSet::new();
        set.add("a.csv", b"x\n".to_vec());
        set.add_json("b.json", &serde_json::json!({"k": 1})).unwrap();
        let written = set.commit(&dir.path().join("sub")).unwrap();
        assert_eq!(written.len(), 2);
        assert_eq!(fs::read(&written[0]).unwrap(), b"x\n");
    }
}
