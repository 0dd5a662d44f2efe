// Richardson-extrapolated derivatives, a bracketed monotone solver and the
// log-space helpers that keep `-log(-log F)` exact deep in the tail.

use weibull_penultimate::numerics::{
    derivative, hazard_at_level, hazard_deficit, log_neg_log_cdf_from_hazard, solve_increasing,
    Bracket, DiffConfig,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = DiffConfig::default();
    for order in 1..=4 {
        let d = derivative(f64::exp, 0.0, order, &cfg)?;
        println!(
            "exp^({order})(0) = {:.15}  (error estimate {:.1e})",
            d.value, d.error_estimate
        );
        assert!((d.value - 1.0).abs() < 1e-5);
    }

    // x^3 + x = 10 has the root x = 2
    let root = solve_increasing(|x| x * x * x + x, 10.0, Bracket::new(0.0, 5.0)?, 1e-15)?;
    println!("root of x^3 + x = 10: {root}");
    assert!((root - 2.0).abs() < 1e-14);

    // F = 1 - exp(-H) is 1.0 in double precision here, yet -log(-log F) is not lost
    for h in [1.0, 30.0, 300.0] {
        let level = log_neg_log_cdf_from_hazard(h)?;
        println!(
            "H = {h:>5}: deficit {:.3e}, -log(-log F) = {level}, back to H = {}",
            hazard_deficit(h)?,
            hazard_at_level(level)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
