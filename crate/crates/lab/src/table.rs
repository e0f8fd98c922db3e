//! CSV tables with fixed schemas and 6-significant-digit numbers.

use std::path::Path;

use crate::LabError;

/// Bump whenever a column in [`SCHEMAS`] changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOY_SWEEP: &[&str] = &["dim", "alpha", "seed", "energy_distance", "train_loss_final", "n_samples"];
pub const LOSS_TRACE: &[&str] = &["step", "loss"];
pub const STAGE1_TRACE: &[&str] = &["step", "rec_loss", "align_loss"];
pub const STAGE1_EVAL: &[&str] = &["latent", "mse", "psnr_analog", "high_band_ratio", "cknna"];
pub const STAGE2_TRACE: &[&str] = &["step", "rec_loss", "gan_loss", "disc_loss", "gan_weight"];
pub const NOISE_ABLATION: &[&str] = &["decoder", "noise_level", "mse", "psnr_analog", "cknna"];
pub const AMPLIFICATION: &[&str] = &["decoder", "delta", "amplification"];
pub const SIGMA_SWEEP: &[&str] = &["sigma_bar", "energy_distance"];
pub const GRAD_CHECK: &[&str] = &["check", "max_rel_err", "tolerance", "passed"];
pub const METRICS: &[&str] = &["metric", "value"];

pub const SCHEMAS: &[(&str, &[&str])] = &[
    ("toy_sweep", TOY_SWEEP),
    ("loss_trace", LOSS_TRACE),
    ("stage1_trace", STAGE1_TRACE),
    ("stage1_eval", STAGE1_EVAL),
    ("stage2_trace", STAGE2_TRACE),
    ("noise_ablation", NOISE_ABLATION),
    ("amplification", AMPLIFICATION),
    ("sigma_sweep", SIGMA_SWEEP),
    ("grad_check", GRAD_CHECK),
    ("metrics", METRICS),
];

/// FNV-1a over every schema name and column, in order.
pub fn schema_hash() -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for (name, cols) in SCHEMAS {
        for s in std::iter::once(name).chain(cols.iter()) {
            for b in s.bytes().chain(std::iter::once(0)) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

/// `x` with 6 significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise. Non-finite values print as `nan`, `inf`, `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| LabError::io(path, e))
    }
}

/// One loss value per step.
pub fn trace_table(trace: &[f64]) -> Table {
    let mut t = Table::new(LOSS_TRACE);
    for (i, &v) in trace.iter().enumerate() {
        t.push(vec![i.into(), v.into()]);
    }
    t
}

/// Rows of a matrix under columns `x0, x1, ...`.
pub fn samples_table(m: &lvrae_core::Mat) -> Table {
    let header: Vec<String> = (0..m.cols()).map(|j| format!("x{j}")).collect();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    for r in m.row_iter() {
        t.push(r.iter().map(|&v| Cell::Num(v)).collect());
    }
    t
}

/// Reads an all-numeric CSV with a header row into a matrix.
pub fn read_matrix(path: &Path) -> Result<lvrae_core::Mat, LabError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| LabError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let cols = rdr
        .headers()
        .map_err(|e| LabError::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
        .len();
    let mut data = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| LabError::Format {
                path: path.display().to_string(),
                message: format!("row {}, column {}: `{field}` is not a number", i + 1, j + 1),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    lvrae_core::Mat::from_vec(rows, cols, data).map_err(LabError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(6.928203230275509), "6.9282");
        assert_eq!(fmt_num(123456.7), "123457");
        assert_eq!(fmt_num(1234567.0), "1.23457e6");
        assert_eq!(fmt_num(12345.67), "12345.7");
        assert_eq!(fmt_num(-0.000123456789), "-0.000123457");
        assert_eq!(fmt_num(1.23456789e-7), "1.23457e-7");
        assert_eq!(fmt_num(9.9999996), "10");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![3usize.into(), 0.5.into()]);
        t.push(vec!["x,y".into(), f64::INFINITY.into()]);
        assert_eq!(t.to_csv_string(), "a,b\n3,0.5\n\"x,y\",inf\n");
    }
}
