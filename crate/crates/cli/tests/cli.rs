use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_building-lab"))
        .args(args)
        .env_remove("BUILDING_LAB_GUARD")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn coset_counts() {
    let o = run(&["cosets", "--n", "2", "--p", "2", "--e-max", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let counts: Vec<u64> = v["payload"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["double_cosets"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [3, 6, 12]);
    assert_eq!(v["convention"], building_lab_convention());
    let o = run(&[
        "cosets", "--n", "2", "--p", "3", "--e-max", "1", "--format", "csv",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text,
        "e,double_cosets,closed_form,ratio_to_q_power\n0,4,4,4\n1,12,12,4\n"
    );
}

fn building_lab_convention() -> &'static str {
    "lex-hnf;root(i,j)=e_i-e_j;K_e=K(e+1)"
}

#[test]
fn resource_guard() {
    assert_eq!(
        code(&run(&["cosets", "--n", "2", "--p", "2", "--e-max", "50"])),
        2
    );
    let o = Command::new(env!("CARGO_BIN_EXE_building-lab"))
        .args(["cosets", "--e-max", "3"])
        .env("BUILDING_LAB_GUARD", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("guard"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["cosets", "--p", "6"])), 1);
    assert_eq!(code(&run(&["charscan", "--gamma", "1"])), 1);
    assert_eq!(code(&run(&["charscan", "--gamma", "3^1,1"])), 1);
    assert_eq!(code(&run(&["growth", "--chi", "legendre"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["roots", "--n", "1"])), 1);
}

#[test]
fn charscan_reports() {
    let o = run(&["charscan", "--gamma", "1,3", "--p", "2", "--e", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["payload"]["r_split"], 1);
    assert_eq!(v["payload"]["constant"], true);
    assert!(v["payload"]["cells"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["value"] == "4"));

    let o = run(&["charscan", "--gamma", "1,1"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("irregular"));

    let v = json(&run(&["charscan", "--gamma", "2^1*1,1"]));
    assert_eq!(v["payload"]["compact"], false);
    assert_eq!(v["payload"]["stable_in_s"], true);
}

#[test]
fn payload_is_reproducible() {
    for args in [
        &[
            "charscan",
            "--gamma",
            "1,3",
            "--samples",
            "32",
            "--seed",
            "9",
        ][..],
        &[
            "growth",
            "--p",
            "3",
            "--e-max",
            "2",
            "--seed",
            "9",
            "--samples",
            "1",
        ],
    ] {
        let a = json(&run(args));
        let b = json(&run(args));
        assert_eq!(
            serde_json::to_string(&a["payload"]).unwrap(),
            serde_json::to_string(&b["payload"]).unwrap()
        );
    }
}

#[test]
fn other_commands() {
    let v = json(&run(&["roots", "--n", "4"]));
    assert_eq!(v["payload"]["roots"].as_array().unwrap().len(), 12);
    let v = json(&run(&["fixed", "--gamma", "1,3", "--radius", "3"]));
    assert_eq!(v["passed"], true);
    // 7 apartment vertices plus one hair at each of the 5 inner ones
    assert_eq!(v["payload"]["fixed_count"], 12);
    let o = run(&["complex", "--p", "2", "--radius", "1", "--chi", "sign"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["payload"]["homology"]["exact"], true);
    let dir = std::env::temp_dir().join(format!("building-lab-{}.csv", std::process::id()));
    let o = run(&["growth", "--format", "csv", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&dir).unwrap();
    std::fs::remove_file(&dir).unwrap();
    assert!(text.starts_with("e,double_cosets,closed_form,dim_invariants,m_v,bound,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn verify_all_formats_and_forced_failure() {
    let o = run(&["verify-all"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    let from_json: Vec<(u64, bool)> = v["payload"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["id"].as_u64().unwrap(), r["passed"].as_bool().unwrap()))
        .collect();
    assert_eq!(from_json.len(), 10);

    let o = run(&["verify-all", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let mut rd = csv::Reader::from_reader(o.stdout.as_slice());
    let from_csv: Vec<(u64, bool)> = rd
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect();
    assert_eq!(from_json, from_csv);

    let o = run(&["verify-all", "--precision", "2"]);
    assert_eq!(code(&o), 4);
    let v = json(&o);
    assert!(v["payload"].as_array().unwrap().iter().any(|r| r["error"]
        .as_str()
        .is_some_and(|e| e.contains("insufficient precision"))));
}
