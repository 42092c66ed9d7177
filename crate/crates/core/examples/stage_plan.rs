//! Build sequential stage plans: the two-stage qutrit example and a
//! seven-dimensional set whose magnitude groups (3, 2, 2) give three stages.

use num_complex::Complex64;
use seqmc::linalg::Tolerances;
use seqmc::smc::plan;
use seqmc::symmetric::{example_qutrit_set, SymmetricSet};

fn show(label: &str, set: &SymmetricSet, tol: &Tolerances) {
    let p = plan(set, tol).unwrap();
    println!("{label} (N = {}, D = {})", p.order, set.dim());
    println!("  stage  dim  confidence  failure_prob");
    for s in &p.stages {
        println!(
            "  {:<5}  {:<3}  {:<10.6}  {:.6}",
            s.index, s.dim, s.confidence, s.failure_probability
        );
    }
    println!(
        "  totals: correct {:.6}, inconclusive {:.6}, error {:.6} ({:?})",
        p.p_correct_total, p.p_inconclusive_total, p.p_error_total, p.termination
    );
}

fn main() {
    let tol = Tolerances::default();
    show("qutrit example", &example_qutrit_set(), &tol);

    let sq: [f64; 7] = [0.2, 0.2, 0.2, 0.12, 0.12, 0.08, 0.08];
    let coeffs: Vec<Complex64> = sq.iter().map(|&x| Complex64::new(x.sqrt(), 0.0)).collect();
    let seven = SymmetricSet::make_root_set(8, &coeffs).unwrap();
    show("three-stage D = 7 set", &seven, &tol);
}
