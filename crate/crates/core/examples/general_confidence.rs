//! Maximum confidence for an ensemble that is not a symmetric set: the
//! three equiprobable trine states in a qubit.

use num_complex::Complex64;
use seqmc::linalg::{CVec, Tolerances};
use seqmc::povm::max_confidence;
use std::f64::consts::TAU;

fn main() {
    let tol = Tolerances::default();
    // |t_j> = cos(j*2pi/3)|0> + sin(j*2pi/3)|1>
    let states: Vec<CVec> = (0..3)
        .map(|j| {
            let angle = TAU * j as f64 / 3.0;
            CVec::from_vec(vec![
                Complex64::new(angle.cos(), 0.0),
                Complex64::new(angle.sin(), 0.0),
            ])
        })
        .collect();
    let priors = [1.0 / 3.0; 3];
    for j in 0..3 {
        let confidence = max_confidence(&states, &priors, j, &tol).unwrap();
        println!("trine state {j}: max confidence {confidence:.6}");
    }
    println!("(linearly dependent in D = 2, so confidence stays below 1)");
}
