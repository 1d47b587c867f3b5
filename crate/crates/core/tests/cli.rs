use std::process::Command;

fn cmgamma(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cmgamma"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

#[test]
fn loggamma_of_six() {
    let (code, out) = cmgamma(&["eval", "loggamma", "--x", "6", "--tol", "1e-12"]);
    assert_eq!(code, 0);
    let mid: f64 = column(&out, "midpoint")[0].parse().unwrap();
    assert!((mid - 4.787491742782046).abs() < 5e-13);
}

#[test]
fn cm_check_of_euler_remainder() {
    let (code, out) = cmgamma(&[
        "--format",
        "json",
        "verify",
        "cm",
        "--fixture",
        "rn",
        "--n",
        "2",
        "--order",
        "2",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["margins"][0].as_array().unwrap().len(), 4);
}

#[test]
fn cm_check_outside_the_claim_fails() {
    let (code, _) = cmgamma(&[
        "verify",
        "cm",
        "--fixture",
        "r2",
        "--n",
        "1",
        "--order",
        "1",
        "--max-diff",
        "4",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn kernels_and_vkernel() {
    let (code, out) = cmgamma(&["verify", "kernels", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(column(&out, "check").iter().any(|c| c == "p_2"));
    for rep in ["series", "recursion", "integral"] {
        let (code, out) = cmgamma(&["eval", "vkernel", "--n", "1", "--t", "1", "--rep", rep]);
        assert_eq!(code, 0);
        let v: f64 = column(&out, "value")[0].parse().unwrap();
        assert!((v - 0.0013566264640069).abs() < 1e-10, "{rep}");
    }
}

#[test]
fn out_of_range_inputs_are_usage_errors() {
    assert_eq!(cmgamma(&["table", "bernoulli", "--max", "100000"]).0, 2);
    assert_eq!(cmgamma(&["eval", "loggamma2", "--w", "1", "--M", "1"]).0, 2);
    assert_eq!(
        cmgamma(&[
            "verify",
            "cm",
            "--fixture",
            "fn",
            "--n",
            "0",
            "--order",
            "0"
        ])
        .0,
        2
    );
}
