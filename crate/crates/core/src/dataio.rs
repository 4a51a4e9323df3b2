//! CSV ingestion and export.
//!
//! Number formatting is fixed so that outputs are byte-identical for equal
//! inputs:
//!
//! * series, predictors and similarity matrices use Rust's shortest
//!   round-trip decimal representation (`{}` on `f64`), never exponents;
//! * forecast and evaluation tables use [`format_significant`] with 10
//!   significant digits, trailing zeros trimmed.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::dataset::{build_dataset, Matrix, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::forecast::ForecastResult;
use crate::similarity::SimilarityMatrix;
use crate::simulation::SimulatedSeries;
use crate::tuning::{ape, GridRow, TuningReport};

/// Significant digits used in forecast and evaluation tables.
pub const TABLE_DIGITS: usize = 10;

/// How seasonal periods are assigned to rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PeriodMode {
    /// Calendar month (1-12) of the date column; 12 periods.
    FromMonthOfDate,
    /// `1, 2, ..., n_periods, 1, 2, ...` in row order.
    Cyclic { n_periods: u32 },
    /// Integer periods read from a column; `n_periods` defaults to the
    /// largest value present.
    ExplicitColumn {
        column: String,
        #[serde(default)]
        n_periods: Option<u32>,
    },
}

/// Column mapping for [`read_dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    #[serde(default)]
    pub date_column: Option<String>,
    pub response_column: String,
    #[serde(default)]
    pub predictor_columns: Vec<String>,
    pub period_mode: PeriodMode,
}

impl DatasetSchema {
    pub fn validate(&self) -> Result<()> {
        for p in &self.predictor_columns {
            if *p == self.response_column || Some(p) == self.date_column.as_ref() {
                return Err(Error::InvalidConfig(format!(
                    "predictor column `{p}` overlaps the response or date column"
                )));
            }
        }
        if self.period_mode == PeriodMode::FromMonthOfDate && self.date_column.is_none() {
            return Err(Error::InvalidConfig(
                "period mode from_month_of_date needs a date column".into(),
            ));
        }
        Ok(())
    }

    /// Layout written by [`write_series_csv`]: `t`, `p`, `y`, `x1..xd`.
    pub fn series_layout(header: &[String]) -> Self {
        let predictor_columns = header
            .iter()
            .filter(|h| {
                h.len() > 1 && h.starts_with('x') && h[1..].chars().all(|c| c.is_ascii_digit())
            })
            .cloned()
            .collect();
        Self {
            date_column: None,
            response_column: "y".into(),
            predictor_columns,
            period_mode: PeriodMode::ExplicitColumn {
                column: "p".into(),
                n_periods: None,
            },
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        schema.validate()?;
        Ok(schema)
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn column_position(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn parse_number(raw: &str, row: usize, column: &str) -> Result<f64> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumericValue {
            row,
            column: column.to_string(),
            value: raw.to_string(),
        }),
    }
}

fn parse_integer(raw: &str, row: usize, column: &str) -> Result<i64> {
    raw.trim().parse::<i64>().map_err(|_| Error::NonNumericValue {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

/// Reads the header row of a CSV file.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    Ok(reader.headers()?.iter().map(|h| h.trim().to_string()).collect())
}

/// Reads a dataset from a CSV file with a header row. Time orders are
/// `1..=n` in row order.
pub fn read_dataset(path: &Path, schema: &DatasetSchema) -> Result<TimeSeriesDataset> {
    read_dataset_from(open(path)?, schema)
}

pub fn read_dataset_from<R: Read>(source: R, schema: &DatasetSchema) -> Result<TimeSeriesDataset> {
    schema.validate()?;
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers()?.clone();
    let response = column_position(&header, &schema.response_column)?;
    let predictors = schema
        .predictor_columns
        .iter()
        .map(|c| column_position(&header, c))
        .collect::<Result<Vec<_>>>()?;
    let date = schema
        .date_column
        .as_deref()
        .map(|c| column_position(&header, c))
        .transpose()?;
    let period_column = match &schema.period_mode {
        PeriodMode::ExplicitColumn { column, .. } => Some(column_position(&header, column)?),
        _ => None,
    };

    let mut y = Vec::new();
    let mut p = Vec::new();
    let mut x = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let cell = |pos: usize| record.get(pos).unwrap_or("");
        y.push(parse_number(cell(response), row, &schema.response_column)?);
        for (pos, name) in predictors.iter().zip(&schema.predictor_columns) {
            x.push(parse_number(cell(*pos), row, name)?);
        }
        if let Some(pos) = date {
            let raw = cell(pos);
            let parsed = NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").map_err(|_| {
                Error::BadDate {
                    row,
                    value: raw.to_string(),
                }
            })?;
            if schema.period_mode == PeriodMode::FromMonthOfDate {
                p.push(i64::from(parsed.month()));
            }
        }
        if let (Some(pos), PeriodMode::ExplicitColumn { column, .. }) =
            (period_column, &schema.period_mode)
        {
            p.push(parse_integer(cell(pos), row, column)?);
        }
    }
    let n = y.len();
    if n == 0 {
        return Err(Error::Empty("dataset rows"));
    }
    let n_periods = match &schema.period_mode {
        PeriodMode::FromMonthOfDate => 12,
        PeriodMode::Cyclic { n_periods } => {
            let count = i64::from((*n_periods).max(1));
            p = (0..n as i64).map(|i| i % count + 1).collect();
            *n_periods
        }
        PeriodMode::ExplicitColumn { n_periods, .. } => match n_periods {
            Some(v) => *v,
            None => p.iter().copied().max().unwrap_or(1).clamp(1, i64::from(u32::MAX)) as u32,
        },
    };
    let x = if predictors.is_empty() {
        None
    } else {
        Some(Matrix::from_row_major(n, predictors.len(), x)?)
    };
    let t = (1..=n as i64).collect();
    build_dataset(y, t, p, n_periods, x)
}

/// Writes `t,p,y,x1..xd` with shortest round-trip decimals.
pub fn write_series_csv(path: &Path, dataset: &TimeSeriesDataset) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    let d = dataset.x().map_or(0, Matrix::cols);
    let mut header = vec!["t".to_string(), "p".to_string(), "y".to_string()];
    header.extend((1..=d).map(|j| format!("x{j}")));
    writer.write_record(&header)?;
    for i in 0..dataset.len() {
        let mut record = vec![
            dataset.t()[i].to_string(),
            dataset.p()[i].to_string(),
            dataset.y()[i].to_string(),
        ];
        if let Some(x) = dataset.x() {
            record.extend(x.row(i).iter().map(f64::to_string));
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Decimal representation of `value` rounded to `digits` significant digits,
/// without exponent or trailing zeros.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value.is_nan() {
        return "NaN".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let scientific = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = scientific.split_once('e').expect("exponent present");
    let exponent: i64 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let significand: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let int_len = exponent + 1;
    let mut text = if int_len <= 0 {
        format!("0.{}{}", "0".repeat((-int_len) as usize), significand)
    } else if int_len as usize >= significand.len() {
        format!("{}{}", significand, "0".repeat(int_len as usize - significand.len()))
    } else {
        let (head, tail) = significand.split_at(int_len as usize);
        format!("{head}.{tail}")
    };
    if text.contains('.') {
        text.truncate(text.trim_end_matches('0').trim_end_matches('.').len());
    }
    if negative {
        text.insert(0, '-');
    }
    text
}

fn table_number(value: f64) -> String {
    format_significant(value, TABLE_DIGITS)
}

/// Writes a forecast table: `index,estimate` plus `actual,ape` when actuals
/// are supplied (one actual per forecast, in `f_index` order). A zero actual
/// leaves its `ape` cell empty.
pub fn write_forecast(result: &ForecastResult, actuals: Option<&[f64]>, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_forecast_to(result, actuals, file).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn write_forecast_to<W: Write>(
    result: &ForecastResult,
    actuals: Option<&[f64]>,
    sink: W,
) -> Result<()> {
    if let Some(a) = actuals {
        if a.len() != result.estimates.len() {
            return Err(Error::LengthMismatch {
                what: "actuals",
                expected: result.estimates.len(),
                found: a.len(),
            });
        }
    }
    let mut writer = csv::Writer::from_writer(sink);
    match actuals {
        Some(_) => writer.write_record(["index", "estimate", "actual", "ape"])?,
        None => writer.write_record(["index", "estimate"])?,
    }
    for (row, (&index, &estimate)) in result.f_index.iter().zip(&result.estimates).enumerate() {
        let mut record = vec![index.to_string(), table_number(estimate)];
        if let Some(actuals) = actuals {
            let actual = actuals[row];
            record.push(table_number(actual));
            match ape(actual, estimate) {
                Ok(v) => record.push(table_number(v)),
                Err(_) => {
                    log::warn!("actual at index {index} is zero; leaving its ape cell empty");
                    record.push(String::new());
                }
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io("<forecast>", e))?;
    Ok(())
}

/// Columns of a forecast or actuals table.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastTable {
    pub index: Vec<usize>,
    pub estimate: Option<Vec<f64>>,
    pub actual: Option<Vec<f64>>,
}

/// Reads a table with an `index` column and optional `estimate` and
/// `actual` columns.
pub fn read_forecast_table(path: &Path) -> Result<ForecastTable> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    let header = reader.headers()?.clone();
    let index_pos = column_position(&header, "index")?;
    let estimate_pos = column_position(&header, "estimate").ok();
    let actual_pos = column_position(&header, "actual").ok();
    let mut table = ForecastTable {
        index: Vec::new(),
        estimate: estimate_pos.map(|_| Vec::new()),
        actual: actual_pos.map(|_| Vec::new()),
    };
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let cell = |pos: usize| record.get(pos).unwrap_or("");
        let index = parse_integer(cell(index_pos), row, "index")?;
        if index < 1 {
            return Err(Error::NonNumericValue {
                row,
                column: "index".into(),
                value: cell(index_pos).to_string(),
            });
        }
        table.index.push(index as usize);
        if let (Some(pos), Some(values)) = (estimate_pos, table.estimate.as_mut()) {
            values.push(parse_number(cell(pos), row, "estimate")?);
        }
        if let (Some(pos), Some(values)) = (actual_pos, table.actual.as_mut()) {
            values.push(parse_number(cell(pos), row, "actual")?);
        }
    }
    Ok(table)
}

/// Writes an `n x n` matrix as CSV without header.
pub fn write_matrix_csv(matrix: &SimilarityMatrix, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(create(path)?);
    let mut line = String::new();
    for i in 0..matrix.n() {
        line.clear();
        for (j, v) in matrix.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a header-less numeric CSV matrix.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(open(path)?);
    reader
        .records()
        .enumerate()
        .map(|(i, record)| {
            let record = record?;
            record
                .iter()
                .enumerate()
                .map(|(j, cell)| parse_number(cell, i + 1, &(j + 1).to_string()))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct TuningReportDocument<'a> {
    weight_opt: [f64; 3],
    k_opt: usize,
    test_mape: f64,
    mape_all: Vec<Option<f64>>,
    grid: &'a [GridRow],
    matrix_path: String,
}

/// Serializes a tuning report as JSON. Infeasible rows (`+inf` MAPE) are
/// written as `null`.
pub fn tuning_report_json(report: &TuningReport, matrix_path: &str) -> Result<String> {
    let document = TuningReportDocument {
        weight_opt: report.weight_opt.as_array(),
        k_opt: report.k_opt,
        test_mape: report.test_mape,
        mape_all: report
            .mape_all
            .iter()
            .map(|v| v.is_finite().then_some(*v))
            .collect(),
        grid: &report.grid,
        matrix_path: matrix_path.to_string(),
    };
    let mut text = serde_json::to_string_pretty(&document)?;
    text.push('\n');
    Ok(text)
}

/// Path of the winning-matrix CSV written next to a report:
/// `report.json` -> `report.sw.csv`.
pub fn matrix_path_for(report_path: &Path) -> PathBuf {
    let stem = report_path
        .file_stem()
        .map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    report_path.with_file_name(format!("{stem}.sw.csv"))
}

/// Writes the report JSON and the winning `S_w` CSV beside it. The JSON
/// refers to the matrix by file name. Returns the matrix path.
pub fn write_tuning_report(report: &TuningReport, path: &Path) -> Result<PathBuf> {
    let matrix_path = matrix_path_for(path);
    let file_name = matrix_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let json = tuning_report_json(report, &file_name)?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
    write_matrix_csv(&report.sw_opt, &matrix_path)?;
    Ok(matrix_path)
}

/// Writes `<family>_seed<seed>.csv` and `<family>_seed<seed>.json` into
/// `dir`, returning both paths.
pub fn write_simulation(series: &SimulatedSeries, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!("{}_seed{}", series.family.name(), series.seed);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_series_csv(&csv_path, &series.to_dataset()?)?;
    let mut json = serde_json::to_string_pretty(series)?;
    json.push('\n');
    std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// Writes a one-row table of named MAPE values.
pub fn write_mape_table(path: &Path, columns: &[(String, f64)]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer.write_record(columns.iter().map(|(name, _)| name.as_str()))?;
    writer.write_record(columns.iter().map(|(_, v)| table_number(*v)))?;
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
