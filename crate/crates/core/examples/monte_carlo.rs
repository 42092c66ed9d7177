//! Sample measurement outcomes for the qutrit plan with a fixed seed and
//! compare every empirical statistic against its analytic value.

use seqmc::linalg::Tolerances;
use seqmc::montecarlo::{consistency_report, simulate, SeedConfig};
use seqmc::smc::plan;
use seqmc::symmetric::example_qutrit_set;

fn main() {
    let tol = Tolerances::default();
    let p = plan(&example_qutrit_set(), &tol).unwrap();
    let cfg = SeedConfig {
        seed: 42,
        trials: 100_000,
    };
    let summary = simulate(&p, &cfg).unwrap();
    let report = consistency_report(&summary, &p);
    println!("seed {} / {} trials", cfg.seed, cfg.trials);
    for check in &report.checks {
        println!(
            "  {:<22} analytic {:.6}  empirical {:.6}  z {:+.3}",
            check.name, check.analytic, check.empirical, check.z_score
        );
    }
    println!("all within |z| <= {}: {}", report.z_threshold, report.pass);
}
