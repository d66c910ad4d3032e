//! Daily price files: `date,close,dollar_volume` with ISO dates.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use infoflow_core::{PriceObservation, PriceSeries};

use crate::error::{Error, Result};
use crate::format::real;

const HEADER: [&str; 3] = ["date", "close", "dollar_volume"];

/// Loads a price file, naming the series after the file stem.
pub fn load_prices(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let ticker = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    load_prices_as(path, &ticker)
}

pub fn load_prices_as(path: impl AsRef<Path>, ticker: &str) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(parse(1, "empty file".into())),
        Some(r) => r.map_err(|e| csv_error(path, e))?,
    };
    let columns: Vec<&str> = header.iter().collect();
    if !(columns == HEADER[..2] || columns == HEADER) {
        return Err(parse(1, format!("expected header `date,close,dollar_volume`, found `{}`", columns.join(","))));
    }

    let mut rows: Vec<(PriceObservation, u64)> = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns.len() {
            return Err(parse(line, format!("expected {} fields, found {}", columns.len(), record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| parse(line, format!("date `{}`: {e}", &record[0])))?;
        let close: f64 = record[1]
            .parse()
            .map_err(|e| parse(line, format!("close `{}`: {e}", &record[1])))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(parse(line, format!("close {close} is not a positive price")));
        }
        let dollar_volume = match record.get(2) {
            None | Some("") => None,
            Some(v) => {
                let v: f64 = v
                    .parse()
                    .map_err(|e| parse(line, format!("dollar_volume `{v}`: {e}")))?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(parse(line, format!("dollar_volume {v} is negative or not finite")));
                }
                Some(v)
            }
        };
        rows.push((
            PriceObservation {
                date,
                close,
                dollar_volume,
            },
            line,
        ));
    }
    if rows.is_empty() {
        return Err(parse(2, "no observations after header".into()));
    }

    rows.sort_by_key(|(o, _)| o.date);
    if let Some(w) = rows.windows(2).find(|w| w[0].0.date == w[1].0.date) {
        return Err(Error::DuplicateDate {
            path: path.to_path_buf(),
            date: w[0].0.date,
        });
    }
    let observations = rows.into_iter().map(|(o, _)| o).collect();
    PriceSeries::new(ticker, observations).map_err(|e| Error::Integrity {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

pub fn write_prices(path: impl AsRef<Path>, prices: &PriceSeries) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("date,close,dollar_volume\n");
    for o in prices.observations() {
        let volume = o.dollar_volume.map(real).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", o.date, real(o.close), volume));
    }
    File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
