// The combined JSON report, built in-process instead of through `wpen`.
// Pass a file name to write it there.

use weibull_penultimate::cli::{run_with, EXIT_OK};

pub fn run_example() -> Result<Vec<u8>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = [
        "wpen",
        "report",
        "--model",
        "pure-weibull",
        "--theta",
        "2",
        "--log-n",
        "10,40",
    ];
    let code = run_with(args, &mut out, &mut err);
    if code != EXIT_OK {
        return Err(String::from_utf8_lossy(&err).into_owned().into());
    }
    let doc: serde_json::Value = serde_json::from_slice(&out)?;
    for row in doc["penultimate"].as_array().unwrap() {
        println!("log n {}: gamma_n {}", row["log_n"], row["gamma_exact"]);
    }
    println!("gomes84: {}", doc["vonmises"]["verdicts"]["gomes84"]);
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    let out = run_example().unwrap();
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &out).unwrap();
        println!("wrote {path}");
    }
}
