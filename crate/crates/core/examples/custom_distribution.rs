// Plugging in a distribution of your own: a Weibull-type tail with
// 1 - F = exp(-x^2 / 2) (Rayleigh), given through cdf and density only.

use std::sync::Arc;

use weibull_penultimate::model::{ClassicalTail, WeibullTypeModel};
use weibull_penultimate::penultimate::{error_comparison, penultimate_index, GammaMode, GridSpec};

#[derive(Debug)]
struct Rayleigh;

impl ClassicalTail for Rayleigh {
    fn name(&self) -> &str {
        "rayleigh"
    }
    fn support_lower(&self) -> f64 {
        0.0
    }
    fn cdf(&self, x: f64) -> f64 {
        -(-0.5 * x * x).exp_m1()
    }
    fn log_cdf(&self, x: f64) -> f64 {
        self.cdf(x).ln()
    }
    fn log_sf(&self, x: f64) -> f64 {
        -0.5 * x * x
    }
    fn log_density(&self, x: f64) -> f64 {
        x.ln() - 0.5 * x * x
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = WeibullTypeModel::classical(Arc::new(Rayleigh), 0.5, 0.0, "rayleigh")?;
    // no closed-form derivatives were given, so k' comes from Richardson
    assert!(!m.has_analytic_k());
    for log_n in [10.0, 40.0] {
        let p = penultimate_index(&m, log_n)?;
        let e = error_comparison(&m, log_n, &GridSpec::default(), GammaMode::Exact)?;
        println!(
            "log n {log_n}: gamma_n {:+.5} (asymptote {:+.5}), sup errors {:.2e} -> {:.2e}",
            p.gamma_exact,
            p.asymptotic()?.gamma_asymptotic,
            e.sup_error_ultimate,
            e.sup_error_penultimate
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
