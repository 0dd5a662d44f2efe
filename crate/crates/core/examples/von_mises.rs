// Limit functionals along a diverging grid, with their verdicts.

use weibull_penultimate::catalog::{build_model, pure_weibull};
use weibull_penultimate::vonmises::{condition_sweep, log_grid, Verdict};

fn show(v: &Verdict) -> String {
    match v {
        Verdict::ConfirmedDecaying => "-> 0".into(),
        Verdict::ConfirmedLimit { value } => format!("-> {value:.4}"),
        Verdict::NotConfirmed { reason } => format!("? ({reason})"),
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = log_grid(2.0, 10.0, 9);
    let models = vec![
        pure_weibull(0.5)?,
        pure_weibull(4.0)?,
        build_model("weibull-log", &[("theta".to_string(), 2.0)].into())?,
        build_model("gumbel-fixture", &Default::default())?,
    ];
    for m in &models {
        let r = condition_sweep(m, &grid)?;
        let v = &r.verdicts;
        println!("{}", m.label());
        println!("  first order   {}", show(&v.first_order));
        println!("  second order  {}", show(&v.second_order));
        println!("  penultimate   {}", show(&v.penultimate_cond));
        println!("  anderson      {}", show(&v.anderson));
        match r.gomes84_theory {
            Some(t) => println!(
                "  gomes84       {}  (1/(1-theta) = {t:.4})",
                show(&v.gomes84)
            ),
            None => println!("  gomes84       {}", show(&v.gomes84)),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
