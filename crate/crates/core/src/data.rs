//! Dataset ingestion, user splitting and synthetic series.
//!
//! The household power file is semicolon-separated with a header row
//! (`Date;Time;Global_active_power;…`) and `?` marking missing readings.

use std::f64::consts::TAU;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::perturbation::UserSeries;
use crate::rng::{self, TAG_SYNTH};

pub const DEFAULT_COLUMN: &str = "Global_active_power";
pub const MISSING_MARKER: &str = "?";

/// One numeric column pulled from a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub column_name: String,
    pub values: Vec<f64>,
    /// Rows dropped because the requested column was missing.
    pub rows_skipped: usize,
    /// File path, or `"synthetic"`.
    pub source: String,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Contiguous sub-range `[offset, offset + length)`, clipped to the data.
    /// `None` length means "to the end".
    pub fn slice(&self, offset: usize, length: Option<usize>) -> Result<RawDataset> {
        if offset >= self.values.len() {
            return Err(Error::Domain(format!(
                "offset {offset} beyond dataset of {} values",
                self.values.len()
            )));
        }
        let end = length.map_or(self.values.len(), |n| (offset + n).min(self.values.len()));
        Ok(RawDataset {
            values: self.values[offset..end].to_vec(),
            ..self.clone()
        })
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

/// Reads one column of the household power consumption file.
pub fn load_power_csv(path: impl AsRef<Path>, column_name: &str) -> Result<RawDataset> {
    let path = path.as_ref();
    let mut lines = BufReader::new(open(path)?).lines();

    let header = lines.next().ok_or(Error::EmptyInput)??;
    let column = header
        .trim_start_matches('\u{feff}')
        .split(';')
        .position(|name| name.trim() == column_name)
        .ok_or_else(|| Error::MissingColumn(column_name.to_string()))?;

    let mut values = Vec::new();
    let mut rows_skipped = 0;
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let field = line
            .split(';')
            .nth(column)
            .ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected at least {} fields", column + 1),
            })?
            .trim();
        if field == MISSING_MARKER || field.is_empty() {
            rows_skipped += 1;
            continue;
        }
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("`{field}` is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite value `{field}`"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawDataset {
        column_name: column_name.to_string(),
        values,
        rows_skipped,
        source: path.display().to_string(),
    })
}

/// Shortest representation that parses back to the same bits; scientific
/// notation outside `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Writes the dataset as a one-column comma-separated file whose header is
/// the column name. Floats are written in shortest round-trip form.
pub fn write_export<W: Write>(data: &RawDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([data.column_name.as_str()])?;
    for v in &data.values {
        w.write_record([format_float(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_export(data: &RawDataset, path: impl AsRef<Path>) -> Result<()> {
    write_export(data, fs::File::create(path)?)
}

/// Reads a file produced by [`save_export`].
pub fn load_export(path: impl AsRef<Path>) -> Result<RawDataset> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(open(path)?);
    let column_name = r.headers()?.get(0).ok_or(Error::EmptyInput)?.to_string();
    let mut values = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(0).unwrap_or("");
        values.push(field.parse().map_err(|_| Error::Parse {
            line: idx + 2,
            message: format!("`{field}` is not a number"),
        })?);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawDataset {
        column_name,
        values,
        rows_skipped: 0,
        source: path.display().to_string(),
    })
}

/// `u` equal contiguous segments; the tail that does not divide evenly is
/// reported in `dropped`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSplit {
    pub users: Vec<UserSeries>,
    pub dropped: usize,
}

pub fn split_users(data: &RawDataset, u: usize) -> Result<UserSplit> {
    let n = data.values.len();
    if u == 0 || u > n {
        return Err(Error::Domain(format!(
            "cannot split {n} samples across {u} users"
        )));
    }
    let seg = n / u;
    let users = data.values[..seg * u]
        .chunks_exact(seg)
        .enumerate()
        .map(|(i, chunk)| UserSeries::new(i + 1, chunk.to_vec()))
        .collect();
    Ok(UserSplit {
        users,
        dropped: n - seg * u,
    })
}

/// Base signal for synthetic users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Constant {
        level: f64,
    },
    /// `level + amplitude·sin(2π·t/period + φ)` with a per-user random phase
    /// `φ`; `period` is in samples.
    Sinusoid {
        level: f64,
        amplitude: f64,
        period: f64,
    },
    /// Gaussian random walk starting at `level`.
    RandomWalk {
        level: f64,
        step_std: f64,
    },
}

impl Signal {
    pub fn name(&self) -> &'static str {
        match self {
            Signal::Constant { .. } => "constant",
            Signal::Sinusoid { .. } => "sinusoid",
            Signal::RandomWalk { .. } => "random-walk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub num_users: usize,
    pub samples_per_user: usize,
    pub signal: Signal,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 || self.samples_per_user == 0 {
            return Err(Error::Domain(
                "user and sample counts must be positive".into(),
            ));
        }
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite")))
            }
        };
        match self.signal {
            Signal::Constant { level } => finite("level", level),
            Signal::Sinusoid {
                level,
                amplitude,
                period,
            } => {
                finite("level", level)?;
                finite("amplitude", amplitude)?;
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::Domain(format!(
                        "period must be positive, got {period}"
                    )));
                }
                Ok(())
            }
            Signal::RandomWalk { level, step_std } => {
                finite("level", level)?;
                if !(step_std.is_finite() && step_std >= 0.0) {
                    return Err(Error::Domain(format!(
                        "step std must be non-negative, got {step_std}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Generates one series per user. User `i` draws from its own stream, so the
/// series of existing users do not change when users are added.
pub fn synth_series(spec: &SynthSpec) -> Result<Vec<UserSeries>> {
    spec.validate()?;
    let n = spec.samples_per_user;
    (1..=spec.num_users)
        .map(|user| {
            let mut rng = rng::stream(spec.seed, &[TAG_SYNTH, user as u64]);
            let samples = match spec.signal {
                Signal::Constant { level } => vec![level; n],
                Signal::Sinusoid {
                    level,
                    amplitude,
                    period,
                } => {
                    let phase = rng.random::<f64>() * TAU;
                    (0..n)
                        .map(|t| level + amplitude * (TAU * t as f64 / period + phase).sin())
                        .collect()
                }
                Signal::RandomWalk { level, step_std } => {
                    let step =
                        Normal::new(0.0, step_std).map_err(|e| Error::Domain(e.to_string()))?;
                    let mut x = level;
                    (0..n)
                        .map(|_| {
                            let current = x;
                            x += step.sample(&mut rng);
                            current
                        })
                        .collect()
                }
            };
            Ok(UserSeries::new(user, samples))
        })
        .collect()
}

/// Wraps synthetic users as a single dataset, users concatenated in order.
pub fn synth_dataset(spec: &SynthSpec) -> Result<RawDataset> {
    let values = synth_series(spec)?
        .into_iter()
        .flat_map(|s| s.samples)
        .collect();
    Ok(RawDataset {
        column_name: spec.signal.name().to_string(),
        values,
        rows_skipped: 0,
        source: "synthetic".to_string(),
    })
}
