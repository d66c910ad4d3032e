//! Report files: one wide CSV per section, tidy CSVs for the two figures,
//! and `report.json` holding the whole bundle.

use std::fs;
use std::path::Path;

use infoflow_core::{CorrResult, RollingTeTrack, TeResult};

use crate::error::{Error, Result};
use crate::format::{opt_real, real};
use crate::pipeline::ReportBundle;

pub const JSON_FILE: &str = "report.json";

pub fn write_report(bundle: &ReportBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut json = serde_json::to_string_pretty(bundle)?;
    json.push('\n');
    write(&dir.join(JSON_FILE), json.as_bytes())?;
    write(&dir.join("firms.csv"), &firms_csv(bundle))?;
    write(&dir.join("te.csv"), &te_csv(bundle))?;
    write(&dir.join("summary.csv"), &summary_csv(bundle))?;
    write(&dir.join("fig7.csv"), &fig7_csv(bundle))?;
    write(&dir.join("fig8.csv"), &fig8_csv(bundle))?;
    Ok(())
}

pub fn read_report(dir: impl AsRef<Path>) -> Result<ReportBundle> {
    let path = dir.as_ref().join(JSON_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

fn corr_cells(c: &CorrResult) -> [String; 3] {
    [real(c.rho), real(c.p_value), c.star.as_str().to_string()]
}

pub fn firms_csv(bundle: &ReportBundle) -> Vec<u8> {
    let header = [
        "ticker", "n", "mean", "median", "std", "skewness", "excess_kurtosis", "min", "max",
        "rho_same_day", "p_same_day", "star_same_day", "rho_driver_leads", "p_driver_leads",
        "star_driver_leads", "rho_target_leads", "p_target_leads", "star_target_leads", "alpha",
        "beta", "r_squared", "amihud_delta", "liquidity_score", "amihud_days_used",
        "amihud_days_skipped", "btc_holdings", "market_cap", "gamma", "group", "notes",
    ];
    let rows = bundle.firms.iter().map(|f| {
        let s = &f.stats;
        let c = &f.correlations;
        let mut row = vec![
            f.ticker.clone(),
            s.n.to_string(),
            real(s.mean),
            real(s.median),
            real(s.std),
            opt_real(s.skewness),
            opt_real(s.excess_kurtosis),
            real(s.min),
            real(s.max),
        ];
        row.extend(corr_cells(&c.same_day));
        row.extend(corr_cells(&c.driver_leads));
        row.extend(corr_cells(&c.target_leads));
        row.extend([
            real(f.sfm.alpha),
            real(f.sfm.beta),
            real(f.sfm.r_squared),
            opt_real(f.amihud.map(|a| a.delta)),
            opt_real(f.amihud.map(|a| a.liquidity_score)),
            f.amihud.map(|a| a.days_used.to_string()).unwrap_or_default(),
            f.amihud.map(|a| a.days_skipped.to_string()).unwrap_or_default(),
            real(f.btc_holdings),
            real(f.market_cap),
            opt_real(f.gamma),
            f.group.map(|g| g.as_str().to_string()).unwrap_or_default(),
            f.notes.join("; "),
        ]);
        row
    });
    table(&header, rows)
}

fn te_cells(ticker: &str, t: &TeResult) -> Vec<String> {
    vec![
        ticker.to_string(),
        t.direction.as_str().to_string(),
        t.lags.driver.to_string(),
        t.lags.target.to_string(),
        t.lags.horizon.to_string(),
        real(t.te_observed),
        real(t.p_value),
        real(t.null_mean),
        real(t.null_std),
        real(t.effective_te),
        t.n_shuffles.to_string(),
    ]
}

pub fn te_csv(bundle: &ReportBundle) -> Vec<u8> {
    let header = [
        "ticker", "direction", "j", "k", "h", "te", "p_value", "null_mean", "null_std",
        "effective_te", "n_shuffles",
    ];
    let rows = bundle.firms.iter().flat_map(|f| {
        [f.te_xy, f.te_yx]
            .into_iter()
            .flatten()
            .map(|t| te_cells(&f.ticker, &t))
            .collect::<Vec<_>>()
    });
    table(&header, rows)
}

pub fn summary_csv(bundle: &ReportBundle) -> Vec<u8> {
    let header = ["measure", "n", "mean", "median", "std", "skewness", "excess_kurtosis"];
    let rows = bundle.summary.iter().map(|c| {
        vec![
            c.measure.clone(),
            c.n.to_string(),
            real(c.mean),
            real(c.median),
            opt_real(c.std),
            opt_real(c.skewness),
            opt_real(c.excess_kurtosis),
        ]
    });
    table(&header, rows)
}

/// Exposure scatter: one row per firm.
pub fn fig7_csv(bundle: &ReportBundle) -> Vec<u8> {
    let header = ["ticker", "gamma", "rho_same_day", "liquidity_score", "beta", "group"];
    let rows = bundle.firms.iter().map(|f| {
        vec![
            f.ticker.clone(),
            opt_real(f.gamma),
            real(f.correlations.same_day.rho),
            opt_real(f.amihud.map(|a| a.liquidity_score)),
            real(f.sfm.beta),
            f.group.map(|g| g.as_str().to_string()).unwrap_or_default(),
        ]
    });
    table(&header, rows)
}

/// Rolling tracks: one row per firm, direction and window.
pub fn fig8_csv(bundle: &ReportBundle) -> Vec<u8> {
    let tracks = bundle
        .rolling
        .iter()
        .flat_map(|r| [(r.ticker.as_str(), &r.xy), (r.ticker.as_str(), &r.yx)]);
    track_csv(tracks)
}

pub fn track_csv<'a>(tracks: impl IntoIterator<Item = (&'a str, &'a RollingTeTrack)>) -> Vec<u8> {
    let header = ["ticker", "direction", "end_date", "te", "p_value", "tier", "effective_te"];
    let rows = tracks.into_iter().flat_map(|(ticker, track)| {
        track.windows.iter().map(move |w| {
            vec![
                ticker.to_string(),
                track.direction.as_str().to_string(),
                w.end_date.to_string(),
                real(w.te),
                real(w.p_value),
                w.tier.as_str().to_string(),
                real(w.effective_te),
            ]
        })
    });
    table(&header, rows)
}
