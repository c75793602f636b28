use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chainmarket"));
    cmd.env_remove("CHAINMARKET_SEED");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chainmarket-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture(name: &str, body: &str) -> PathBuf {
    let path = scratch(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    let code = status.code().unwrap();
    if code != 0 {
        eprintln!("{}", String::from_utf8_lossy(&stderr));
    }
    (code, String::from_utf8(stdout).unwrap())
}

fn summary_value(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with("# ")).expect("summary line");
    line[2..]
        .split(',')
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

fn column(csv: &str, index: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(index).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn two_miner_constant_demand_auction() {
    let inst = fixture("two.csv", "id,s,d,b\n1,100,10,150\n2,100,10,100\n");
    let (code, out) = run(bin().args(["auction", "--mechanism", "cdb", "--instance"]).arg(&inst));
    assert_eq!(code, 0);
    assert!((summary_value(&out, "welfare") - 4.01197).abs() < 1e-5, "{out}");
    assert_eq!(summary_value(&out, "winners"), 2.0);
    assert!(out.starts_with("miner_id,s,d,b,x,payment,ex_post_value,utility\n"));
}

#[test]
fn empty_market_has_zero_welfare() {
    let inst = fixture("empty.csv", "id,s,d\n");
    let (code, out) = run(bin().args(["auction", "--mechanism", "mdb", "--instance"]).arg(&inst));
    assert_eq!(code, 0);
    assert_eq!(summary_value(&out, "welfare"), 0.0);
    assert_eq!(summary_value(&out, "winners"), 0.0);
}

#[test]
fn exit_codes_for_bad_requests() {
    let multi = fixture("multi.csv", "id,s,d\n1,100,10\n2,300,7\n");
    let (code, _) = run(bin().args(["auction", "--mechanism", "cdb", "--instance"]).arg(&multi));
    assert_eq!(code, 3);

    let garbled = fixture("garbled.csv", "id,s,d\n1,abc,10\n");
    let (code, _) = run(bin()
        .args(["auction", "--mechanism", "mdb", "--instance"])
        .arg(&garbled));
    assert_eq!(code, 2);

    let (code, _) = run(bin().args(["auction", "--mechanism", "vcg", "--instance"]).arg(&multi));
    assert_eq!(code, 2);

    let (code, _) = run(bin()
        .args(["auction", "--mechanism", "mdb", "--set", "speed=3", "--instance"])
        .arg(&multi));
    assert_eq!(code, 2);

    let (code, _) = run(bin()
        .args(["auction", "--mechanism", "mdb", "--set", "lambda=-1", "--instance"])
        .arg(&multi));
    assert_eq!(code, 3);

    let (code, _) = run(bin().args(["sweep", "--preset", "fig9"]));
    assert_eq!(code, 2);
}

#[test]
fn brute_force_size_guard() {
    let inst = scratch("big.csv");
    let (code, _) = run(bin().args(["gen", "--miners", "30", "--seed", "5", "--out"]).arg(&inst));
    assert_eq!(code, 0);
    let (code, _) = run(bin().args(["auction", "--mechanism", "brute", "--instance"]).arg(&inst));
    assert_eq!(code, 4);
}

#[test]
fn generated_instances_round_trip() {
    let inst = scratch("gen.csv");
    run(bin()
        .args(["gen", "--miners", "12", "--mode", "constant", "--seed", "9", "--out"])
        .arg(&inst));
    let (code, out) = run(bin().args(["auction", "--mechanism", "cdb", "--instance"]).arg(&inst));
    assert_eq!(code, 0);
    let (_, brute) = run(bin().args(["auction", "--mechanism", "brute", "--instance"]).arg(&inst));
    let (a, b) = (summary_value(&out, "welfare"), summary_value(&brute, "welfare"));
    assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
}

#[test]
fn config_file_and_overrides() {
    let inst = fixture("cfg-inst.csv", "id,s,d,b\n1,100,10,150\n2,100,10,100\n");
    let cfg = fixture("market.cfg", "# cheaper resources\nc = 0.0005\n");
    let base = run(bin().args(["auction", "--mechanism", "cdb", "--instance"]).arg(&inst)).1;
    let cheap = run(bin()
        .args(["auction", "--mechanism", "cdb", "--config"])
        .arg(&cfg)
        .arg("--instance")
        .arg(&inst))
    .1;
    let dearer = run(bin()
        .args(["auction", "--mechanism", "cdb", "--set", "c=0.002", "--config"])
        .arg(&cfg)
        .arg("--instance")
        .arg(&inst))
    .1;
    let w = |out: &str| summary_value(out, "welfare");
    assert!(w(&cheap) > w(&base) && w(&base) > w(&dearer));
}

#[test]
fn sweeps_are_reproducible_across_workers() {
    let (a, b) = (scratch("k1-a.csv"), scratch("k1-b.csv"));
    let args = ["sweep", "--preset", "fig4T", "--instances", "1", "--seed", "42"];
    assert_eq!(run(bin().args(args).arg("--out").arg(&a)).0, 0);
    assert_eq!(run(bin().args(args).args(["--jobs", "3"]).arg("--out").arg(&b)).0, 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (_, env_seeded) =
        run(bin()
            .env("CHAINMARKET_SEED", "42")
            .args(["sweep", "--preset", "fig4T", "--instances", "1"]));
    assert_eq!(env_seeded.as_bytes(), fs::read(&a).unwrap());
}

#[test]
fn unit_cost_preset_decreases() {
    let (code, out) = run(bin().args(["sweep", "--preset", "fig4c"]));
    assert_eq!(code, 0);
    assert!(out.starts_with("parameter_value,mean_welfare,ci_halfwidth,mean_satisfaction,K,seed\n"));
    let welfare = column(&out, 1);
    assert_eq!(welfare.len(), 10);
    assert!(welfare.windows(2).all(|w| w[1] < w[0]), "{welfare:?}");
    assert!(column(&out, 4).iter().all(|&k| k == 600.0));
}

#[test]
fn table_preset_has_four_rows() {
    let (code, out) = run(bin().args(["sweep", "--preset", "table3", "--instances", "100"]));
    assert_eq!(code, 0);
    assert_eq!(column(&out, 0), [10.0, 15.0, 20.0, 25.0]);
}

#[test]
fn explicit_grid_sweep() {
    let (code, out) = run(bin().args([
        "sweep",
        "--mechanism",
        "cdb",
        "--param",
        "N",
        "--grid",
        "20,40",
        "--instances",
        "5",
    ]));
    assert_eq!(code, 0);
    assert_eq!(column(&out, 0), [20.0, 40.0]);
    let (code, _) = run(bin().args(["sweep", "--param", "theta", "--grid", "0.5", "--instances", "5"]));
    assert_eq!(code, 2);
}

#[test]
fn utility_curve_preset() {
    let (code, out) = run(bin().args(["sweep", "--preset", "fig5a"]));
    assert_eq!(code, 0);
    assert!(out.starts_with("demand,utility_s300,utility_s1000\n"));
    let (low, high) = (column(&out, 1), column(&out, 2));
    assert_eq!(low.len(), 39);
    assert_eq!(low[0], 0.0);
    assert!(*high.last().unwrap() > 0.0);
}

#[test]
fn probe_exit_codes() {
    let (code, _) = run(bin().args(["probe", "--instances", "0"]));
    assert_eq!(code, 2);
    let (code, _) = run(bin().args(["probe", "--mechanism", "frls", "--instances", "3"]));
    assert_eq!(code, 2);
    let (code, report) = run(bin().args(["probe", "--mechanism", "mdb", "--instances", "4", "--tamper-payments"]));
    assert_eq!(code, 5);
    let rationality = report.lines().find(|l| l.starts_with("rationality,")).unwrap();
    assert!(rationality.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 1e-9);
}

#[test]
fn probe_exit_code_follows_report() {
    for mechanism in ["cdb", "mdb"] {
        let (code, report) = run(bin().args(["probe", "--mechanism", mechanism, "--instances", "6", "--seed", "3"]));
        let worst = column(&report, 1).into_iter().fold(0.0f64, f64::max);
        assert_eq!(code, if worst > 1e-9 { 5 } else { 0 }, "{mechanism}: {report}");
    }
}
