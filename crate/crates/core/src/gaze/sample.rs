use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One eye-tracker reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    /// Seconds; strictly increasing within a trace.
    pub t: f64,
    /// Screen position, normalized to `[0, 1]`; `v` grows downward.
    pub u: f64,
    pub v: f64,
    /// Eyelid opening, 0 closed to 1 fully open.
    pub eye_open: f64,
    /// Whether the tracker had a lock on the eyes.
    #[serde(with = "flag")]
    pub valid: bool,
}

impl GazeSample {
    pub fn new(t: f64, u: f64, v: f64) -> Self {
        Self {
            t,
            u,
            v,
            eye_open: 1.0,
            valid: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GazeKind {
    Fixation,
    Saccade,
    Pursuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeEvent {
    pub kind: GazeKind,
    pub start: f64,
    pub end: f64,
    pub centroid: (f64, f64),
    pub dispersion: f64,
    /// Trace indices of the first and last samples spanned by the event.
    pub first_sample: usize,
    pub last_sample: usize,
}

impl GazeEvent {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }
}

mod flag {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(D::Error::custom(format!("valid must be 0 or 1, got {other}"))),
        }
    }
}

/// Reads a GZ1 trace: CSV with header `t,u,v,eye_open,valid`.
pub fn read_gz1(path: &Path) -> Result<Vec<GazeSample>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers != vec!["t", "u", "v", "eye_open", "valid"] {
        return Err(Error::parse(path, format!("unexpected GZ1 header {headers:?}")));
    }
    let mut out: Vec<GazeSample> = Vec::new();
    for row in rdr.deserialize() {
        let s: GazeSample = row.map_err(|e| csv_error(path, e))?;
        if let Some(prev) = out.last() {
            if s.t <= prev.t {
                return Err(Error::parse(
                    path,
                    format!("timestamps must increase ({} after {})", s.t, prev.t),
                ));
            }
        }
        out.push(s);
    }
    Ok(out)
}

pub fn write_gz1(path: &Path, trace: &[GazeSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for s in trace {
        w.serialize(s).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path, e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gz1_roundtrip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        let mut trace = vec![GazeSample::new(0.0, 0.5, 0.25), GazeSample::new(0.01, 0.5, 0.3)];
        trace[1].valid = false;
        trace[1].eye_open = 0.1;
        write_gz1(&p, &trace).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,u,v,eye_open,valid\n0.0,0.5,0.25,1.0,1\n"));
        assert_eq!(read_gz1(&p).unwrap(), trace);
    }

    #[test]
    fn gz1_rejects_unsorted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        std::fs::write(&p, "t,u,v,eye_open,valid\n1,0,0,1,1\n0.5,0,0,1,1\n").unwrap();
        assert!(matches!(read_gz1(&p), Err(Error::Parse { .. })));
        std::fs::write(&p, "t,u,v,eye_open,valid\n1,0,0,1,2\n").unwrap();
        assert!(read_gz1(&p).is_err());
        assert!(matches!(read_gz1(&dir.path().join("missing.csv")), Err(Error::Io { .. })));
    }
}
