// The k-function `k = d/dx[-log(-log F)]` and its first three derivatives,
// along the closed-form and the numerically differentiated paths.

use weibull_penultimate::catalog::builtin_instances;
use weibull_penultimate::model::DerivPath;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = 1e4;
    println!(
        "{:<40} {:>12} {:>12} {:>10} {:>10}",
        "model", "k", "k'", "gap k'", "theta~"
    );
    for inst in builtin_instances() {
        let m = inst.build()?;
        let jet = m.k_jet(x)?;
        let numeric = m.k_derivative(x, 1, DerivPath::Numeric)?;
        let gap = (numeric.value - jet.d1).abs() / jet.d1.abs().max(jet.k / x);
        println!(
            "{:<40} {:>12.4e} {:>12.4e} {:>10.1e} {:>10.4}",
            m.label(),
            jet.k,
            jet.d1,
            gap,
            m.theta_diagnostic(x)?
        );
        assert!(gap < 1e-6);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
