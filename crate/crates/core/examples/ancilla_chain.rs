//! Walk one stage through its two-outcome ancilla realization and verify
//! that the chain reproduces the closed-form POVM probabilities.

use seqmc::linalg::Tolerances;
use seqmc::neumark::{apply_stage, conclusive_chain_distribution, effect_operators};
use seqmc::povm::mc_povm_symmetric;
use seqmc::symmetric::example_qutrit_set;

fn main() {
    let tol = Tolerances::default();
    let set = example_qutrit_set();

    let real = effect_operators(&set, &tol).unwrap();
    println!(
        "coupling unitary: {}x{} on system + qubit ancilla",
        real.coupling.nrows(),
        real.coupling.ncols()
    );
    let branches = apply_stage(&set, 0, &tol).unwrap();
    println!(
        "branch probabilities: success {:.4}, failure {:.4}",
        branches.success_probability, branches.failure_probability
    );

    let (povm, _) = mc_povm_symmetric(&set, &tol);
    let mut worst: f64 = 0.0;
    for j in 0..set.order() {
        let chain = conclusive_chain_distribution(&set, j, &tol).unwrap();
        let psi = set.state(j).unwrap();
        for (k, element) in povm.elements.iter().enumerate() {
            let born = (psi.adjoint() * element * &psi)[(0, 0)].re;
            worst = worst.max((chain[k] - born).abs());
        }
    }
    println!("max |chain - Born| over all (j, k): {worst:.2e}");
}
