use std::fs;
use std::path::Path;
use std::process::Command;

use infoflow::pipeline::run_pipeline;
use infoflow::synth::prices_from_returns;
use infoflow::{read_report, with_threads, write_prices, write_report, Error, UniverseConfig};
use infoflow_core::{generate, Group, ProcessKind, ProcessSpec};

const LEN: usize = 400;

/// Driver `BTC` plus firms. `FIRM` copies the driver with a one-day lag,
/// the others are independent of it.
fn fixture(dir: &Path, firms: &[&str], rolling: &[&str]) -> std::path::PathBuf {
    let copy = generate(&ProcessSpec::new(ProcessKind::Copy { lag: 1 }, LEN, 7)).unwrap();
    write_prices(dir.join("BTC.csv"), &prices_from_returns(copy.driver()).unwrap()).unwrap();
    let mut universe = String::from("ticker,price_file,btc_holdings,market_cap,latest_acquisition_date\n");
    for (i, &t) in firms.iter().enumerate() {
        let target = if t == "FIRM" {
            copy.target().clone()
        } else {
            let kind = ProcessKind::LinearCoupled { a: 0.5, sigma_eps: 1.0 };
            generate(&ProcessSpec::new(kind, LEN, 100 + i as u64)).unwrap().target().clone()
        };
        write_prices(dir.join(format!("{t}.csv")), &prices_from_returns(&target).unwrap()).unwrap();
        universe.push_str(&format!("{t},{t}.csv,{},{},2020-06-01\n", 100 * (i + 1), 1.0e5 * (i + 1) as f64));
    }
    fs::write(dir.join("universe.csv"), universe).unwrap();
    let rolling: Vec<String> = rolling.iter().map(|t| format!("\"{t}\"")).collect();
    let config = format!(
        "driver_ticker = \"BTC\"\n\
         driver_file = \"BTC.csv\"\n\
         universe_file = \"universe.csv\"\n\
         start = \"2019-01-01\"\n\
         end = \"2030-01-01\"\n\n\
         [analysis]\n\
         binning = {{ kind = \"quantile\", q = 3 }}\n\
         window = 100\n\
         stride = 25\n\
         n_shuffles = 200\n\
         seed = 11\n\
         rolling = [{}]\n",
        rolling.join(", ")
    );
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    path
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn single_copy_coupled_firm() {
    let d = tempfile::tempdir().unwrap();
    let config = UniverseConfig::load(fixture(d.path(), &["FIRM"], &["FIRM"])).unwrap();
    let b = run_pipeline(&config).unwrap();
    assert_eq!(b.firms.len(), 1);
    assert!(b.warnings.is_empty(), "{:?}", b.warnings);
    let f = &b.firms[0];
    assert!(f.sfm.beta.is_finite());
    assert!(f.correlations.same_day.rho.is_finite());
    // The lagged copy shows up as a driver-leads correlation of one.
    assert!((f.correlations.driver_leads.rho - 1.0).abs() < 1e-9);
    let xy = f.te_xy.unwrap();
    assert!(xy.p_value <= 0.01, "p = {}", xy.p_value);
    assert!(f.te_yx.unwrap().p_value > 0.01);
    assert!(f.amihud.is_some());
    assert!(f.gamma.is_some());
    assert_eq!(f.group, Some(Group::LowBetaLiquid));
    assert_eq!(b.rolling.len(), 1);
    assert_eq!(b.rolling[0].xy.windows.len(), (LEN - 100) / 25 + 1);
}

#[test]
fn report_round_trips_and_is_idempotent() {
    let d = tempfile::tempdir().unwrap();
    let config = UniverseConfig::load(fixture(d.path(), &["FIRM", "AAA", "BBB", "CCC"], &["FIRM"])).unwrap();
    let b = run_pipeline(&config).unwrap();
    assert_eq!(b.firms.len(), 4);
    assert_eq!(b.summary.iter().find(|c| c.measure == "beta").unwrap().n, 4);

    let out1 = d.path().join("out1");
    write_report(&b, &out1).unwrap();
    assert_eq!(read_report(&out1).unwrap(), b);

    let out2 = d.path().join("out2");
    write_report(&run_pipeline(&config).unwrap(), &out2).unwrap();
    assert_eq!(files(&out1), files(&out2));
}

#[test]
fn thread_count_does_not_change_output() {
    let d = tempfile::tempdir().unwrap();
    let config = UniverseConfig::load(fixture(d.path(), &["FIRM", "AAA", "BBB"], &["FIRM", "BBB"])).unwrap();
    let one = with_threads(Some(1), || run_pipeline(&config)).unwrap().unwrap();
    let many = with_threads(Some(6), || run_pipeline(&config)).unwrap().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    write_report(&one, &a).unwrap();
    write_report(&many, &b).unwrap();
    assert_eq!(files(&a), files(&b));
}

#[test]
fn corrupt_firm_is_isolated() {
    let d = tempfile::tempdir().unwrap();
    let path = fixture(d.path(), &["FIRM", "AAA", "BBB"], &[]);
    let baseline = {
        let mut c = UniverseConfig::load(&path).unwrap();
        c.firms.retain(|f| f.ticker != "AAA");
        run_pipeline(&c).unwrap()
    };
    fs::write(d.path().join("AAA.csv"), "date,close,dollar_volume\n2020-01-01,oops,1\n").unwrap();
    let b = run_pipeline(&UniverseConfig::load(&path).unwrap()).unwrap();
    assert_eq!(b.warnings.len(), 1);
    assert_eq!(b.warnings[0].ticker, "AAA");
    assert!(b.warnings[0].to_string().starts_with("WARN AAA "));
    assert_eq!(b.firms, baseline.firms);
}

#[test]
fn no_loadable_firm_is_fatal() {
    let d = tempfile::tempdir().unwrap();
    let path = fixture(d.path(), &["AAA"], &[]);
    fs::write(d.path().join("AAA.csv"), "").unwrap();
    let err = run_pipeline(&UniverseConfig::load(&path).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn config_validation() {
    let d = tempfile::tempdir().unwrap();
    let path = fixture(d.path(), &["AAA"], &[]);
    fs::remove_file(d.path().join("AAA.csv")).unwrap();
    assert!(matches!(UniverseConfig::load(&path), Err(Error::Config(m)) if m.contains("AAA.csv")));

    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replace("end = \"2030-01-01\"", "end = \"2018-01-01\"")).unwrap();
    assert!(matches!(UniverseConfig::load(&path), Err(Error::Config(_))));
    fs::write(&path, "driver_file = 3\n").unwrap();
    assert!(matches!(UniverseConfig::load(&path), Err(Error::Config(_))));
}

#[test]
fn cli_report_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_infoflow");
    let d = tempfile::tempdir().unwrap();
    let config = fixture(d.path(), &["FIRM", "AAA"], &["FIRM"]);
    fs::write(d.path().join("AAA.csv"), "date,close,dollar_volume\n2020-01-01,1,1\n2020-01-01,2,1\n").unwrap();
    let out = d.path().join("report");
    let run = |threads: &str, out: &Path| {
        Command::new(bin)
            .args(["--config", config.to_str().unwrap(), "--threads", threads, "--out-dir"])
            .arg(out)
            .arg("report")
            .output()
            .unwrap()
    };
    let r = run("1", &out);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("WARN AAA ") && l.contains("duplicate date 2020-01-01")), "{stderr}");
    for f in ["report.json", "firms.csv", "te.csv", "summary.csv", "fig7.csv", "fig8.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let out4 = d.path().join("report4");
    assert!(run("4", &out4).status.success());
    assert_eq!(files(&out), files(&out4));

    let dup = Command::new(bin)
        .args(["stats", "--prices"])
        .arg(d.path().join("AAA.csv"))
        .output()
        .unwrap();
    assert_eq!(dup.status.code(), Some(2));
    let missing = Command::new(bin).args(["report"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let synth = d.path().join("synth");
    let s = Command::new(bin)
        .args(["--seed", "5", "--out-dir"])
        .arg(&synth)
        .args(["synth", "--kind", "copy", "--length", "300"])
        .output()
        .unwrap();
    assert!(s.status.success());
    let te = Command::new(bin)
        .args(["te", "--driver"])
        .arg(synth.join("x.csv"))
        .arg("--target")
        .arg(synth.join("y.csv"))
        .args(["--shuffles", "200", "--binning", "quantile", "--bins", "3"])
        .output()
        .unwrap();
    assert!(te.status.success());
    let text = String::from_utf8(te.stdout).unwrap();
    let xy: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(xy[0], "x_to_y");
    assert_eq!(xy[2].parse::<f64>().unwrap(), 0.0);
}
