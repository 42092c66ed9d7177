//! Tabulate sequential vs minimum-error figures of merit on a small
//! (|c0|, |c1|) grid and print the CSV.

use seqmc::linalg::Tolerances;
use seqmc::smc::{sweep_csv, sweep_qutrit};

fn main() {
    let tol = Tolerances::default();
    let axis: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let mut points = Vec::new();
    for &x in &axis {
        for &y in &axis {
            points.push((x, y));
        }
    }
    let result = sweep_qutrit(&points, &tol);
    print!("{}", sweep_csv(&result.rows));
    eprintln!(
        "{} rows, {} infeasible points skipped",
        result.rows.len(),
        result.skipped.len()
    );
}
