//! TUM trajectory text format.
//!
//! One pose per line, `timestamp tx ty tz qx qy qz qw`, separated by single
//! spaces on output and any whitespace on input. Lines starting with `#` and
//! blank lines are ignored. Translation is in meters; the quaternion is
//! vector-first.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use trajeval_core::{Normalization, Pose, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum TumError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no pose lines found")]
    Empty,
}

impl TumError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        TumError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Parses one data line into a pose. `line_no` is 1-based.
pub fn parse_line(text: &str, line_no: usize) -> Result<Pose, TumError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 8 {
        return Err(TumError::parse(
            line_no,
            format!("expected 8 fields, found {}", fields.len()),
        ));
    }
    let mut values = [0.0f64; 8];
    for (slot, field) in values.iter_mut().zip(&fields) {
        let v: f64 = field
            .parse()
            .map_err(|_| TumError::parse(line_no, format!("invalid number {field:?}")))?;
        if !v.is_finite() {
            return Err(TumError::parse(line_no, format!("non-finite value {field:?}")));
        }
        *slot = v;
    }
    Pose::from_tum(
        values[0],
        [values[1], values[2], values[3]],
        [values[4], values[5], values[6], values[7]],
    )
    .map_err(|e| TumError::parse(line_no, e.to_string()))
}

/// Reads a whole trajectory. Unsorted input is sorted and repeated
/// timestamps keep their first occurrence; the returned [`Normalization`]
/// says whether either happened.
pub fn parse_tum<R: BufRead>(reader: R, label: &str) -> Result<(Trajectory, Normalization), TumError> {
    let mut poses = Vec::new();
    for (idx, chunk) in reader.split(b'\n').enumerate() {
        let line_no = idx + 1;
        let bytes = chunk.map_err(|source| TumError::Io {
            path: label.to_string(),
            source,
        })?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| TumError::parse(line_no, "line is not valid UTF-8"))?;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        poses.push(parse_line(trimmed, line_no)?);
    }
    if poses.is_empty() {
        return Err(TumError::Empty);
    }
    Trajectory::new(label, poses).map_err(|_| TumError::Empty)
}

pub fn parse_tum_str(text: &str, label: &str) -> Result<(Trajectory, Normalization), TumError> {
    parse_tum(text.as_bytes(), label)
}

/// Reads a TUM file, labelling the trajectory with the file name.
pub fn read_tum_file(path: &Path) -> Result<(Trajectory, Normalization), TumError> {
    let file = File::open(path).map_err(|source| TumError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let label = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_tum(BufReader::new(file), &label)
}

pub const HEADER: &str = "# timestamp tx ty tz qx qy qz qw";

/// Fixed six decimals when that is exact, else the shortest representation
/// that parses back to the same bits.
pub fn format_value(v: f64) -> String {
    let v = v + 0.0; // folds -0.0 into 0.0
    let fixed = format!("{v:.6}");
    if fixed.parse::<f64>() == Ok(v) {
        return fixed;
    }
    let mut shortest = format!("{v}");
    let decimals = shortest.split_once('.').map_or(0, |(_, d)| d.len());
    if decimals == 0 {
        shortest.push('.');
    }
    for _ in decimals..6 {
        shortest.push('0');
    }
    shortest
}

/// Formats one pose as a TUM data line (no newline).
pub fn format_pose(pose: &Pose) -> String {
    let t = pose.translation();
    let q = pose.transform().quaternion().canonical();
    let fields = [
        pose.timestamp(),
        t.x,
        t.y,
        t.z,
        q.qx(),
        q.qy(),
        q.qz(),
        q.qw(),
    ];
    fields
        .iter()
        .map(|&v| format_value(v))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_tum<W: Write>(traj: &Trajectory, mut writer: W) -> io::Result<()> {
    writeln!(writer, "{HEADER}")?;
    for pose in traj.poses() {
        writeln!(writer, "{}", format_pose(pose))?;
    }
    writer.flush()
}

pub fn write_tum_file(traj: &Trajectory, path: &Path) -> io::Result<()> {
    write_tum(traj, BufWriter::new(File::create(path)?))
}
