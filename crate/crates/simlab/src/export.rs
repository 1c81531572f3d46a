//! CSV output for distributions, series and tables.

use std::path::Path;

use emogen_core::Result;

use crate::gmm::SeparabilityTable;
use crate::simulate::DistributionStats;
use crate::studies::ActivationRow;

fn csv_error(e: csv::Error) -> emogen_core::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => emogen_core::Error::invalid(format!("{other:?}")),
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per repetition and generation.
pub fn write_distribution_csv(path: &Path, stats: &DistributionStats) -> Result<()> {
    let rows = stats.repetitions.iter().flat_map(|r| {
        r.errors
            .iter()
            .enumerate()
            .map(move |(g, e)| vec![r.index.to_string(), g.to_string(), e.to_string()])
    });
    write_rows(path, &["repetition", "generation", "cd_error"], rows)
}

pub fn write_summary_csv(path: &Path, stats: &DistributionStats) -> Result<()> {
    let rows = stats
        .generations
        .iter()
        .map(|g| vec![g.generation.to_string(), g.mean.to_string(), g.std.to_string()]);
    write_rows(path, &["generation", "mean", "std"], rows)
}

pub fn write_kl_csv(path: &Path, series: &[f64]) -> Result<()> {
    let rows = series
        .iter()
        .enumerate()
        .map(|(g, kl)| vec![g.to_string(), (g + 1).to_string(), kl.to_string()]);
    write_rows(path, &["from_generation", "to_generation", "kl"], rows)
}

pub fn write_separability_csv(path: &Path, table: &SeparabilityTable) -> Result<()> {
    let mut header: Vec<&str> = vec!["target"];
    header.extend(table.labels.iter().map(String::as_str));
    header.push("unnamed");
    let rows = table.labels.iter().zip(&table.counts).map(|(label, counts)| {
        std::iter::once(label.clone())
            .chain(counts.iter().map(|c| c.to_string()))
            .collect()
    });
    write_rows(path, &header, rows)
}

pub fn write_activation_csv(path: &Path, rows: &[ActivationRow]) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            r.range.0.to_string(),
            r.range.1.to_string(),
            r.target.clone(),
            r.mu0.to_string(),
            r.sigma0.to_string(),
            r.mu_final.to_string(),
            r.sigma_final.to_string(),
        ]
    });
    write_rows(
        path,
        &["range_lo", "range_hi", "target", "mu0", "sigma0", "mu_final", "sigma_final"],
        rows,
    )
}

pub fn write_bins_csv(path: &Path, bins: &[f64; 4]) -> Result<()> {
    let labels = ["[0,0.25)", "[0.25,0.5)", "[0.5,0.75)", "[0.75,1]"];
    let rows = labels.iter().zip(bins).map(|(l, b)| vec![l.to_string(), b.to_string()]);
    write_rows(path, &["bin", "percent"], rows)
}
