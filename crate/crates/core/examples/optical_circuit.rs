//! Compile the two-stage path/polarization network for the qutrit example
//! and print the detector distribution for each prepared state.

use seqmc::linalg::Tolerances;
use seqmc::optics::{build_circuit, compile_angles, simulate_network};
use seqmc::symmetric::example_qutrit_set;

fn main() {
    let tol = Tolerances::default();
    let set = example_qutrit_set();
    let angles = compile_angles(&set, &tol).unwrap();
    println!(
        "wave plates: chi = {:.4?}, alpha = {:.4?}, beta = {:.4?}",
        angles.chi, angles.alpha, angles.beta
    );

    let circuit = build_circuit(&set, &tol).unwrap();
    println!(
        "{} elements over {} paths, {} detectors",
        circuit.elements.len(),
        circuit.paths,
        circuit.detectors.len()
    );
    println!("input   stage-1 detectors              stage-2 detectors              ?");
    for j in 0..4 {
        let dist = simulate_network(&circuit, j).unwrap();
        let s1: Vec<String> = dist.stage1.iter().map(|p| format!("{p:.4}")).collect();
        let s2: Vec<String> = dist.stage2.iter().map(|p| format!("{p:.4}")).collect();
        println!(
            "|psi_{j}>  [{}]  [{}]  {:.4}",
            s1.join(" "),
            s2.join(" "),
            dist.inconclusive
        );
    }
}
