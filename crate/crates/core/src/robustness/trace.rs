use std::io::Read;
use std::path::Path;

use crate::word::Width;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("{times} timestamps but {values} values")]
    LengthMismatch { times: usize, values: usize },
    #[error("first timestamp must be 0, got {0}")]
    NonZeroStart(i64),
    #[error("timestamps not strictly increasing at sample {index}")]
    NotIncreasing { index: usize },
    #[error("sample {index}: {what} {value} outside the {width}-bit range")]
    OutOfRange {
        index: usize,
        what: &'static str,
        value: i64,
        width: u32,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv line {line}: {msg}")]
    Format { line: u64, msg: String },
}

/// A timed 1-dimensional signal: `(timestamp, value)` samples with
/// `times[0] == 0` and strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    times: Vec<i64>,
    values: Vec<i64>,
    width: Width,
}

impl Trace {
    pub fn new(times: Vec<i64>, values: Vec<i64>, width: Width) -> Result<Self, TraceError> {
        if times.len() != values.len() {
            return Err(TraceError::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(TraceError::Empty);
        }
        if times[0] != 0 {
            return Err(TraceError::NonZeroStart(times[0]));
        }
        for (index, (&t, &x)) in times.iter().zip(&values).enumerate() {
            if index > 0 && t <= times[index - 1] {
                return Err(TraceError::NotIncreasing { index });
            }
            if t > width.pinf() {
                return Err(TraceError::OutOfRange {
                    index,
                    what: "timestamp",
                    value: t,
                    width: width.bits(),
                });
            }
            if !width.contains(x) {
                return Err(TraceError::OutOfRange {
                    index,
                    what: "value",
                    value: x,
                    width: width.bits(),
                });
            }
        }
        Ok(Trace {
            times,
            values,
            width,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// First `len` samples.
    pub fn prefix(&self, len: usize) -> Result<Trace, TraceError> {
        let len = len.min(self.len());
        Trace::new(
            self.times[..len].to_vec(),
            self.values[..len].to_vec(),
            self.width,
        )
    }

    /// Parse a `t,x` CSV.
    pub fn from_csv<R: Read>(reader: R, width: Width) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "x" {
            return Err(TraceError::Format {
                line: 1,
                msg: "header must be `t,x`".into(),
            });
        }
        let (mut times, mut values) = (Vec::new(), Vec::new());
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |k: usize| {
                record[k].parse::<i64>().map_err(|_| TraceError::Format {
                    line,
                    msg: format!("not an integer: `{}`", &record[k]),
                })
            };
            times.push(field(0)?);
            values.push(field(1)?);
        }
        Trace::new(times, values, width)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, width: Width) -> Result<Self, TraceError> {
        let file = std::fs::File::open(path).map_err(|e| TraceError::Csv(e.into()))?;
        Self::from_csv(file, width)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x\n");
        for (t, x) in self.times.iter().zip(&self.values) {
            s.push_str(&format!("{t},{x}\n"));
        }
        s
    }
}
