// The penultimate shape gamma_n = -k'(b_n)/k(b_n)^2 against its
// asymptote (theta - 1)/log n, and what happens at theta = 1.

use weibull_penultimate::catalog::{build_model, pure_weibull, PURE_WEIBULL_THETAS};
use weibull_penultimate::penultimate::penultimate_index;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for theta in PURE_WEIBULL_THETAS {
        let m = pure_weibull(theta)?;
        for log_n in [10.0, 50.0] {
            let p = penultimate_index(&m, log_n)?;
            let a = p.asymptotic()?;
            println!(
                "theta {theta:<5} log n {log_n:<4} gamma_n {:+.6}  asymptote {:+.6}  ({})",
                p.gamma_exact,
                a.gamma_asymptotic,
                p.classification.as_str()
            );
        }
    }

    let exp = build_model("exponential", &Default::default())?;
    let p = penultimate_index(&exp, 10.0)?;
    println!(
        "exponential: gamma_n {:e}, asymptotic part: {}",
        p.gamma_exact,
        p.asymptotic().unwrap_err()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
