//! Design the max-confidence and min-error POVMs for the four-state qutrit
//! example and validate both.

use seqmc::linalg::Tolerances;
use seqmc::povm::{mc_povm_symmetric, me_povm, validate_povm};
use seqmc::symmetric::example_qutrit_set;

fn main() {
    let tol = Tolerances::default();
    let set = example_qutrit_set();

    let (mc, mc_report) = mc_povm_symmetric(&set, &tol);
    let mc_check = validate_povm(&mc, &tol).unwrap();
    println!("max-confidence POVM ({} outcomes + inconclusive)", mc.elements.len());
    println!("  confidence per outcome : {:.6}", mc_report.confidence_per_outcome[0]);
    println!("  inconclusive probability: {:.6}", mc_report.inconclusive_probability);
    println!(
        "  valid: {} (completeness deviation {:.2e})",
        mc_check.pass, mc_check.completeness_deviation
    );

    let (me, me_report) = me_povm(&set);
    let me_check = validate_povm(&me, &tol).unwrap();
    println!("min-error POVM ({} outcomes)", me.elements.len());
    println!("  confidence per outcome : {:.6}", me_report.confidence_per_outcome[0]);
    println!(
        "  valid: {} (completeness deviation {:.2e})",
        me_check.pass, me_check.completeness_deviation
    );
}
