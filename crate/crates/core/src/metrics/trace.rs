use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = ["solver", "seed", "passes", "ifo", "po", "F", "subopt", "gmap_sq"];

/// Identifies the run a trace came from.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceMeta {
    pub solver: String,
    pub seed: u64,
    /// Step size used for the reported `‖G_η‖²`, when known.
    pub eta: Option<f64>,
    /// Free-form plan description, e.g. `svrg-minibatch b=64 m=8`.
    pub plan: String,
}

impl TraceMeta {
    pub fn new(solver: impl Into<String>, seed: u64) -> Self {
        TraceMeta {
            solver: solver.into(),
            seed,
            eta: None,
            plan: String::new(),
        }
    }
}

/// One checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    /// IFO calls divided by `n`.
    pub passes: f64,
    pub ifo: u64,
    pub po: u64,
    pub objective: f64,
    /// `F − F̂` when a baseline is known.
    pub subopt: Option<f64>,
    pub gmap_sq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub meta: TraceMeta,
    records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(meta: TraceMeta) -> Self {
        RunTrace { meta, records: Vec::new() }
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Appends a checkpoint. Passes must not decrease.
    pub fn record(&mut self, rec: TraceRecord) -> Result<()> {
        let finite = rec.passes.is_finite()
            && rec.objective.is_finite()
            && rec.gmap_sq.is_finite()
            && rec.subopt.is_none_or(f64::is_finite);
        if !finite || rec.passes < 0.0 || rec.gmap_sq < 0.0 {
            return Err(Error::Internal(format!("malformed checkpoint {rec:?}")));
        }
        if let Some(last) = self.records.last() {
            if rec.passes < last.passes {
                return Err(Error::Internal(format!(
                    "checkpoint passes went backwards: {} after {}",
                    rec.passes, last.passes
                )));
            }
        }
        self.records.push(rec);
        Ok(())
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes traces in the benchmark CSV schema with LF line endings.
pub fn traces_to_csv(traces: &[RunTrace]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for t in traces {
        for r in &t.records {
            w.write_record([
                t.meta.solver.clone(),
                t.meta.seed.to_string(),
                fmt_real(r.passes),
                r.ifo.to_string(),
                r.po.to_string(),
                fmt_real(r.objective),
                r.subopt.map(fmt_real).unwrap_or_default(),
                fmt_real(r.gmap_sq),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Parses CSV produced by [`traces_to_csv`]. Consecutive rows with the same
/// `(solver, seed)` form one trace.
pub fn traces_from_csv(text: &str) -> Result<Vec<RunTrace>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut traces: Vec<RunTrace> = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(csv_err)?;
        let perr = |message: String| Error::Parse { line, message };
        if row.len() != CSV_HEADER.len() {
            return Err(perr(format!("expected {} fields, got {}", CSV_HEADER.len(), row.len())));
        }
        let real = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|_| perr(format!("bad {} value {:?}", CSV_HEADER[i], &row[i])))
        };
        let int = |i: usize| -> Result<u64> {
            row[i]
                .parse::<u64>()
                .map_err(|_| perr(format!("bad {} value {:?}", CSV_HEADER[i], &row[i])))
        };
        let solver = &row[0];
        let seed = int(1)?;
        let rec = TraceRecord {
            passes: real(2)?,
            ifo: int(3)?,
            po: int(4)?,
            objective: real(5)?,
            subopt: if row[6].is_empty() { None } else { Some(real(6)?) },
            gmap_sq: real(7)?,
        };
        let same = traces.last().is_some_and(|t| t.meta.solver == solver && t.meta.seed == seed);
        if !same {
            traces.push(RunTrace::new(TraceMeta::new(solver, seed)));
        }
        traces
            .last_mut()
            .expect("pushed above")
            .record(rec)
            .map_err(|e| perr(e.to_string()))?;
    }
    Ok(traces)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}
