// Slowly varying corrections: the built-in shapes, a custom one with only
// a value function, and the decay checks on `x^j l^(j)(x) / l(x)`.

use weibull_penultimate::slowly_varying::{
    check_sv_conditions, slow_variation_profile, sv_ratios, SlowlyVaryingSpec, SvVerdict,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid: Vec<f64> = (2..=10).step_by(2).map(|j| 10f64.powi(j)).collect();

    for spec in SlowlyVaryingSpec::builtins() {
        let checks = check_sv_conditions(&spec, &grid)?;
        let verdicts: Vec<&str> = checks
            .iter()
            .map(|c| {
                if c.verdict == SvVerdict::Decaying {
                    "decaying"
                } else {
                    "not confirmed"
                }
            })
            .collect();
        println!("{:<32} {:?}", spec.label(), verdicts);
    }

    // no derivatives supplied: they are estimated numerically
    let custom = SlowlyVaryingSpec::new("loglog", 16.0, |x: f64| x.ln().ln());
    let r = sv_ratios(&custom, 1e6)?;
    println!("log log x at 1e6: ratios {r:?}");
    let profile = slow_variation_profile(&custom, &grid)?;
    let shown: Vec<String> = profile.iter().map(|v| format!("{v:.2e}")).collect();
    println!("|l(2t)/l(t) - 1| along the grid: {}", shown.join(" "));
    assert!(profile.last().unwrap() < profile.first().unwrap());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
