use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ghqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghqc")).args(args).env_remove("GHQC_LOG").output().expect("binary runs")
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("contracts").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_prices(path: &Path) -> Vec<(String, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    let id = headers.iter().position(|h| h == "id").unwrap();
    let price = headers.iter().position(|h| h == "price").unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[id].to_string(), rec[price].parse().unwrap())
        })
        .collect()
}

#[test]
fn prices_the_bermudan_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let contract = sample("bermudan-put.toml");
    let o = ghqc(&["price", "--contract", contract.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("price       4.477"), "{}", stdout(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("id,method,M,N,q,N_A,price,reference,relError,wallMillis\n"), "{text}");
    let rows = csv_prices(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].0, "put-S36-v0.2-T1");
    assert!((rows[0].1 - 4.4778).abs() < 1e-4, "{}", rows[0].1);
}

#[test]
fn moment_matched_method_gives_the_same_price() {
    let dir = tempfile::tempdir().unwrap();
    let contract = sample("bermudan-put.toml");
    let mut prices = Vec::new();
    for method in ["ghqc", "ghqc-m"] {
        let out = dir.path().join(format!("{method}.csv"));
        let o = ghqc(&[
            "price",
            "--contract",
            contract.to_str().unwrap(),
            "--method",
            method,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        prices.push(csv_prices(&out)[0].1);
    }
    assert!(((prices[0] - prices[1]) / prices[0]).abs() < 1e-9, "{prices:?}");
}

#[test]
fn malformed_file_is_a_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(sample("bermudan-put.toml")).unwrap().replace("strike = 40.0", "strike = forty");
    std::fs::write(&bad, text).unwrap();
    let out = dir.path().join("never.csv");
    let o = ghqc(&["price", "--contract", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn invalid_overrides_are_config_errors() {
    let contract = sample("bermudan-put.toml");
    let c = contract.to_str().unwrap();
    assert_eq!(ghqc(&["price", "--contract", c, "--q", "0"]).status.code(), Some(2));
    assert_eq!(ghqc(&["price", "--contract", c, "--N", "7"]).status.code(), Some(2));
    assert_eq!(ghqc(&["price", "--contract", "/no/such/file.toml"]).status.code(), Some(2));
    assert_eq!(ghqc(&["bench", "table1", "--method", "mc"]).status.code(), Some(2));
}

#[test]
fn reruns_with_the_same_seed_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let contract = sample("asian-call.toml");
    let run = |name: &str, method: &str| {
        let out = dir.path().join(name);
        let o = ghqc(&[
            "price",
            "--contract",
            contract.to_str().unwrap(),
            "--method",
            method,
            "--paths",
            "20000",
            "--seed",
            "7",
            "--M",
            "100",
            "--NA",
            "100",
            "--no-timing",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv", "mc"), run("b.csv", "mc"));
    assert_eq!(run("c.csv", "ghqc"), run("d.csv", "ghqc"));
}

#[test]
fn bench_writes_sorted_rows_and_the_error_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1.csv");
    let o = ghqc(&["bench", "table1", "--no-timing", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o).lines().find(|l| l.starts_with("rRMSE vs exact:")).unwrap().to_string();
    let e: f64 = line.trim_start_matches("rRMSE vs exact:").trim().parse().unwrap();
    assert!(e <= 1e-4, "{line}");
    let rows = csv_prices(&out);
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[0].0 <= w[1].0));
}

#[test]
fn path_dependent_samples_price() {
    for name in ["tarn-call.toml", "barrier-discrete.toml", "gmwb-dynamic.toml"] {
        let contract = sample(name);
        let o = ghqc(&["price", "--contract", contract.to_str().unwrap(), "--M", "200"]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let price: f64 =
            stdout(&o).lines().find_map(|l| l.strip_prefix("price")).map(|v| v.trim().parse().unwrap()).unwrap();
        assert!(price > 0.0 && price.is_finite(), "{name}: {price}");
    }
}
