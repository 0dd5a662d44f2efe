// How far F^n(a_n x + b_n) is from the Gumbel limit and from the
// penultimate GEV with shape gamma_n.

use weibull_penultimate::catalog::{build_model, pure_weibull};
use weibull_penultimate::penultimate::{error_comparison, remainder_profile, GammaMode, GridSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::default();
    let models = vec![
        pure_weibull(0.5)?,
        pure_weibull(2.0)?,
        build_model("normal", &Default::default())?,
    ];
    for m in &models {
        println!("{}", m.label());
        for log_n in [10.0, 20.0, 40.0] {
            let e = error_comparison(m, log_n, &grid, GammaMode::Exact)?;
            println!(
                "  log n {log_n:>4}: ultimate {:.3e} at x = {:+.2}, penultimate {:.3e} at x = {:+.2}",
                e.sup_error_ultimate, e.argmax_ultimate, e.sup_error_penultimate, e.argmax_penultimate
            );
            assert!(e.sup_error_penultimate < e.sup_error_ultimate);
        }
    }

    // the ultimate error is close to (x^2/2) gamma_n g_0(x) on bounded sets
    let window = GridSpec::new(0.5, 3.0, 500)?;
    let r = remainder_profile(&pure_weibull(2.0)?, 40.0, &window)?;
    println!(
        "remainder shape deviation on [0.5, 3] at log n = 40: {:.4}",
        r.max_deviation
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
