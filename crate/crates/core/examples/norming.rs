// Norming constants for block maxima: `b_n` from `F(b_n) = exp(-1/n)`,
// the asymptotic `H^{-1}(log n)`, and `a_n = 1/k(b_n)`.

use weibull_penultimate::catalog::pure_weibull;
use weibull_penultimate::norming::norming;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = pure_weibull(2.0)?;
    println!("{}", m.label());
    println!(
        "{:>6} {:>14} {:>14} {:>12}",
        "log n", "b exact", "b asymptotic", "a"
    );
    for log_n in [5.0, 10.0, 25.0, 50.0] {
        let c = norming(&m, log_n)?;
        println!(
            "{:>6} {:>14.6} {:>14.6} {:>12.6}",
            log_n, c.b_exact, c.b_asymptotic, c.a_scale
        );
        // H = sqrt(x) so H^{-1}(log n) = (log n)^2
        assert_eq!(c.b_asymptotic, log_n * log_n);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
