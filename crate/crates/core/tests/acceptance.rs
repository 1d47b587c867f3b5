// Criteria 1-9 from the library, criterion 10 from two runs of the binary.
// Runs without the libtest harness so that every line is printed.

use std::process::{Command, ExitCode};

fn verify_all() -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cmgamma"))
        .args(["verify", "all"])
        .output()
        .expect("cmgamma binary runs");
    (out.status.code(), out.stdout)
}

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    let mut all = true;
    for o in cmgamma::acceptance::run_all() {
        println!("{}", o.line());
        all &= o.passed;
    }
    let (code_a, first) = verify_all();
    let (code_b, second) = verify_all();
    let identical = first == second && code_a == code_b;
    let exit_ok = code_a == Some(if all { 0 } else { 1 });
    let passed = identical && exit_ok && !first.is_empty();
    println!(
        "criterion 10 [{}] determinism: two runs of `cmgamma verify all` {} ({} bytes), exit code {:?}",
        if passed { "PASS" } else { "FAIL" },
        if identical { "byte-identical" } else { "DIFFER" },
        first.len(),
        code_a
    );
    all &= passed;
    println!(
        "acceptance: {} in {:.1}s",
        if all { "all criteria pass" } else { "FAILED" },
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
