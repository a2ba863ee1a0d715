//! Plot data as CSV. Row order is the order of the input slices, then ascending length.

use std::io::Write;

use mlmask_core::analysis::{CoverageReport, SpanLengthHistogram};
use mlmask_core::masking::Strategy;
use mlmask_core::{Error, Result};

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Integrity(format!("csv: {other:?}")),
    }
}

/// Columns `strategy,masking_rate,ngram_len,coverage`.
pub fn coverage_csv<W: Write>(reports: &[CoverageReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "masking_rate", "ngram_len", "coverage"])
        .map_err(csv_error)?;
    for r in reports {
        for (len, count) in &r.per_length {
            w.write_record([
                r.strategy.to_string(),
                r.masking_rate.to_string(),
                len.to_string(),
                count.probability::<f64>().to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `strategy,masking_rate,span_len,count`.
pub fn spans_csv<W: Write>(
    histograms: &[(Strategy, f64, SpanLengthHistogram)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "masking_rate", "span_len", "count"])
        .map_err(csv_error)?;
    for (strategy, rate, h) in histograms {
        for (len, count) in &h.counts {
            w.write_record([
                strategy.to_string(),
                rate.to_string(),
                len.to_string(),
                count.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `masking_rate,<value_column>`.
pub fn sweep_csv<W: Write>(values: &[(f64, f64)], value_column: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["masking_rate", value_column])
        .map_err(csv_error)?;
    for (rate, v) in values {
        w.write_record([rate.to_string(), v.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
