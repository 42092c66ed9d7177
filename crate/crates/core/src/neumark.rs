//! Physical realization of one MC stage: effect operators, phase-removal
//! unitary, system–ancilla coupling, success/failure maps, and the
//! extended-space inverse-DFT projective measurement.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Tolerances};
use crate::symmetric::{Mode, SymmetricSet};

/// Two-outcome POVM realization via a qubit ancilla.
///
/// Ordering convention is system-major, ancilla-minor: composite index
/// 2·s + a with ancilla basis |0⟩_a, |1⟩_a. The coupling acts as
/// |ψ⟩|0⟩_a → Â_s|ψ⟩|0⟩_a + Â_?|ψ⟩|1⟩_a.
#[derive(Debug, Clone)]
pub struct TwoOutcomeRealization {
    pub a_success: CMat,
    pub a_fail: CMat,
    pub phase_removal: CMat,
    /// Unitary on the 2D-dimensional system⊗ancilla space.
    pub coupling: CMat,
}

/// Inverse-DFT projective measurement on the N-dimensional extension.
#[derive(Debug, Clone)]
pub struct ExtendedProjective {
    pub order: usize,
    /// Extended positions occupied by the success-family modes.
    pub positions: Vec<usize>,
    pub inverse_dft: CMat,
    /// Fourier leakage amplitudes β_k = (1/√(N·D'))Σ_{m∈positions} e^{2πimk/N}.
    pub leakage_amplitudes: Vec<Complex64>,
}

/// What the failure branch of a stage maps onto.
#[derive(Debug, Clone)]
pub enum FailureSpace {
    /// A genuine symmetric descendant of dimension D − d ≥ 2.
    Set(SymmetricSet),
    /// One-dimensional: all failure states identical up to phase; no further
    /// information can be gained.
    OneDimensional,
    /// Uniform coefficients: the failure branch has probability zero.
    Empty,
}

/// Everything needed to run one MC stage.
#[derive(Debug, Clone)]
pub struct StageRealization {
    pub two_outcome: TwoOutcomeRealization,
    /// Success states |u_j⟩ for j = 0..N−1.
    pub success_states: Vec<CVec>,
    pub failure_space: FailureSpace,
    /// D · c_min², independent of j.
    pub success_probability: f64,
    pub conclusive_measure: ExtendedProjective,
}

/// Effect operators and the coupling unitary for a set's two-outcome POVM:
/// Â_s = Ŵ·diag(c_min/|c_m|), Â_? = Ŵ·diag(√(1−c_min²/|c_m|²)),
/// Ŵ = diag(e^{−i arg c_k}), 𝒰 = Â_s⊗I_a − Â_?⊗iσ̂_y.
pub fn effect_operators(set: &SymmetricSet, tol: &Tolerances) -> Result<TwoOutcomeRealization> {
    let d = set.dim();
    let profile = set.coefficient_profile(tol);
    let c_min = profile.c_min;

    let w = CMat::from_diagonal(&CVec::from_iterator(
        d,
        set.modes()
            .iter()
            .map(|m| Complex64::from_polar(1.0, -m.coefficient.arg())),
    ));
    let diag_s = CMat::from_diagonal(&CVec::from_iterator(
        d,
        set.modes()
            .iter()
            .map(|m| Complex64::new(c_min / m.coefficient.norm(), 0.0)),
    ));
    let diag_f = CMat::from_diagonal(&CVec::from_iterator(
        d,
        set.modes().iter().map(|m| {
            let r = c_min * c_min / m.coefficient.norm_sqr();
            Complex64::new((1.0 - r).max(0.0).sqrt(), 0.0)
        }),
    ));
    let a_success = &w * diag_s;
    let a_fail = &w * diag_f;

    // iσ_y = |0⟩⟨1| − |1⟩⟨0| on the ancilla.
    let i_sigma_y = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let coupling = linalg::tensor(&a_success, &linalg::identity(2))
        - linalg::tensor(&a_fail, &i_sigma_y);

    let dev = linalg::unitarity_deviation(&coupling);
    if dev > tol.eps_unitary.max(1e-12) {
        return Err(Error::NotUnitary(dev));
    }

    Ok(TwoOutcomeRealization {
        a_success,
        a_fail,
        phase_removal: w,
        coupling,
    })
}

/// One branch of a stage application: probability and post-measurement state.
#[derive(Debug, Clone)]
pub struct StageBranches {
    pub success_probability: f64,
    pub success_state: CVec,
    pub failure_probability: f64,
    /// None when the set is uniform (failure has probability zero).
    pub failure_state: Option<CVec>,
}

/// Apply one stage to input state j: couple, measure the ancilla, and return
/// both branches. Branch probabilities are j-independent by symmetry.
pub fn apply_stage(set: &SymmetricSet, j: usize, tol: &Tolerances) -> Result<StageBranches> {
    if j >= set.order() {
        return Err(Error::IndexOutOfRange(format!(
            "input index {j} not in 0..{}",
            set.order()
        )));
    }
    let d = set.dim();
    let n = set.order() as f64;
    let profile = set.coefficient_profile(tol);
    let c_min2 = profile.c_min * profile.c_min;
    let p_success = (d as f64 * c_min2).min(1.0);
    let p_fail = 1.0 - p_success;

    let scale = 1.0 / (d as f64).sqrt();
    let success_state = CVec::from_iterator(
        d,
        set.modes()
            .iter()
            .map(|m| Complex64::from_polar(scale, TAU * (j * m.exponent) as f64 / n)),
    );

    let failure_state = if p_fail <= tol.eps_prob {
        None
    } else {
        Some(CVec::from_iterator(
            d,
            set.modes().iter().map(|m| {
                let c2 = ((m.coefficient.norm_sqr() - c_min2) / p_fail).max(0.0);
                Complex64::from_polar(c2.sqrt(), TAU * (j * m.exponent) as f64 / n)
            }),
        ))
    };

    Ok(StageBranches {
        success_probability: p_success,
        success_state,
        failure_probability: if failure_state.is_some() { p_fail } else { 0.0 },
        failure_state,
    })
}

/// Drop the minimum-magnitude modes and renormalize, keeping the original
/// exponents and embedding positions.
pub fn failure_descendant(set: &SymmetricSet, tol: &Tolerances) -> Result<FailureSpace> {
    let profile = set.coefficient_profile(tol);
    let c_min2 = profile.c_min * profile.c_min;
    if profile.magnitude_groups.len() == 1 {
        return Ok(FailureSpace::Empty);
    }
    let p_fail = 1.0 - set.dim() as f64 * c_min2;
    let survivors: Vec<Mode> = set
        .modes()
        .iter()
        .filter(|m| m.coefficient.norm() - profile.c_min > tol.eps_group)
        .map(|m| {
            let mag2 = (m.coefficient.norm_sqr() - c_min2) / p_fail;
            Mode {
                exponent: m.exponent,
                coefficient: Complex64::from_polar(mag2.max(0.0).sqrt(), m.coefficient.arg()),
            }
        })
        .collect();
    match survivors.len() {
        0 => Ok(FailureSpace::Empty),
        1 => Ok(FailureSpace::OneDimensional),
        _ => Ok(FailureSpace::Set(SymmetricSet::from_modes(
            set.order(),
            survivors,
        )?)),
    }
}

impl ExtendedProjective {
    /// Outcome distribution P(k|u_j) over k = 0..N−1 for the success state
    /// with index j: embed |u_j⟩ at the recorded positions, apply F̂_N⁻¹,
    /// and project onto the logical basis.
    pub fn outcome_distribution(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.order {
            return Err(Error::IndexOutOfRange(format!(
                "input index {j} not in 0..{}",
                self.order
            )));
        }
        let n = self.order;
        let d = self.positions.len() as f64;
        let scale = 1.0 / d.sqrt();
        let mut extended = CVec::zeros(n);
        for &pos in &self.positions {
            extended[pos] = Complex64::from_polar(scale, TAU * (j * pos) as f64 / n as f64);
        }
        let transformed = &self.inverse_dft * extended;
        Ok(transformed.iter().map(|z| z.norm_sqr()).collect())
    }
}

/// Build the extended projective measurement for a success family living on
/// the given extended positions: F̂_N⁻¹ of the full order N plus the Fourier
/// leakage amplitudes.
pub fn conclusive_measurement(order: usize, positions: &[usize]) -> Result<ExtendedProjective> {
    if order == 0 {
        return Err(Error::InvalidDimension("order must be >= 1".into()));
    }
    if positions.is_empty() || positions.len() > order {
        return Err(Error::ContractViolation(format!(
            "need 1 <= D' <= N positions, got {} of {order}",
            positions.len()
        )));
    }
    let mut seen = vec![false; order];
    for &p in positions {
        if p >= order || seen[p] {
            return Err(Error::ContractViolation(format!(
                "positions must be distinct and < {order}"
            )));
        }
        seen[p] = true;
    }
    let inverse_dft = linalg::inverse_dft_matrix(order)?;
    let dprime = positions.len() as f64;
    let scale = 1.0 / (order as f64 * dprime).sqrt();
    let leakage_amplitudes: Vec<Complex64> = (0..order)
        .map(|k| {
            positions
                .iter()
                .map(|&m| Complex64::from_polar(scale, TAU * (m * k) as f64 / order as f64))
                .sum()
        })
        .collect();
    Ok(ExtendedProjective {
        order,
        positions: positions.to_vec(),
        inverse_dft,
        leakage_amplitudes,
    })
}

/// Realize one full MC stage for a set.
pub fn realize_stage(set: &SymmetricSet, tol: &Tolerances) -> Result<StageRealization> {
    let two_outcome = effect_operators(set, tol)?;
    let mut success_states = Vec::with_capacity(set.order());
    let mut success_probability = 0.0;
    for j in 0..set.order() {
        let branches = apply_stage(set, j, tol)?;
        success_probability = branches.success_probability;
        success_states.push(branches.success_state);
    }
    let failure_space = failure_descendant(set, tol)?;
    let conclusive_measure = conclusive_measurement(set.order(), &set.embed_positions())?;
    Ok(StageRealization {
        two_outcome,
        success_states,
        failure_space,
        success_probability,
        conclusive_measure,
    })
}

/// Joint probability of (success, conclusive outcome k) for input |ψ_j⟩,
/// computed through the full chain: couple with 𝒰, project the ancilla on
/// |0⟩_a, embed in N dimensions, apply F̂_N⁻¹, project the logical basis.
///
/// Independent of the closed-form POVM path; used as the equivalence oracle.
pub fn conclusive_chain_distribution(
    set: &SymmetricSet,
    j: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let d = set.dim();
    let n = set.order();
    let real = effect_operators(set, tol)?;
    let psi = set.state(j)?;
    // |ψ_j⟩ ⊗ |0⟩_a, system-major ordering.
    let mut composite = CVec::zeros(2 * d);
    for s in 0..d {
        composite[2 * s] = psi[s];
    }
    let coupled = &real.coupling * composite;
    // Project the ancilla on |0⟩_a (unnormalized branch).
    let mut success_branch = CVec::zeros(d);
    for s in 0..d {
        success_branch[s] = coupled[2 * s];
    }
    // Embed at the extended positions and Fourier-analyze.
    let mut extended = CVec::zeros(n);
    for (mode_idx, &pos) in set.embed_positions().iter().enumerate() {
        extended[pos] = success_branch[mode_idx];
    }
    let transformed = linalg::inverse_dft_matrix(n)? * extended;
    Ok(transformed.iter().map(|z| z.norm_sqr()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_norm_diff;
    use crate::povm::mc_povm_symmetric;
    use crate::symmetric::example_qutrit_set;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_set() -> SymmetricSet {
        SymmetricSet::make_root_set(
            3,
            &[c((2.0 / 3.0f64).sqrt(), 0.0), c((1.0 / 3.0f64).sqrt(), 0.0)],
        )
        .unwrap()
    }

    fn uniform_set() -> SymmetricSet {
        let u = 1.0 / 3.0f64.sqrt();
        SymmetricSet::make_root_set(4, &[c(u, 0.0), c(u, 0.0), c(u, 0.0)]).unwrap()
    }

    #[test]
    fn effect_operators_qutrit_values() {
        let tol = Tolerances::default();
        let real = effect_operators(&example_qutrit_set(), &tol).unwrap();
        let expected = [
            (0.2f64 / 0.5).sqrt(),
            (0.2f64 / 0.3).sqrt(),
            1.0,
        ];
        for (k, &e) in expected.iter().enumerate() {
            assert!((real.a_success[(k, k)] - c(e, 0.0)).norm() < 1e-12);
        }
        // Completeness of the effect pair.
        let sum = real.a_success.adjoint() * &real.a_success
            + real.a_fail.adjoint() * &real.a_fail;
        assert!(max_norm_diff(&sum, &linalg::identity(3)) < 1e-12);
        assert!(linalg::is_unitary(&real.coupling, 1e-12));
    }

    #[test]
    fn effect_operators_uniform_set() {
        let tol = Tolerances::default();
        let real = effect_operators(&uniform_set(), &tol).unwrap();
        assert!(max_norm_diff(&real.a_success, &linalg::identity(3)) < 1e-12);
        assert!(real.a_fail.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn phase_removal_yields_nonnegative_amplitudes() {
        let tol = Tolerances::default();
        // Coefficients with explicit phases.
        let set = SymmetricSet::make_root_set(
            5,
            &[
                Complex64::from_polar(0.6, 0.7),
                Complex64::from_polar(0.5, -1.2),
                Complex64::from_polar((1.0f64 - 0.36 - 0.25).sqrt(), 2.3),
            ],
        )
        .unwrap();
        let real = effect_operators(&set, &tol).unwrap();
        let w_psi = &real.phase_removal * set.state(0).unwrap();
        for amp in w_psi.iter() {
            assert!(amp.im.abs() < 1e-12);
            assert!(amp.re >= 0.0);
        }
    }

    #[test]
    fn apply_stage_qutrit_branches() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let b = apply_stage(&set, 0, &tol).unwrap();
        assert!((b.success_probability - 0.6).abs() < 1e-12);
        assert!((b.failure_probability - 0.4).abs() < 1e-12);
        let s = 1.0 / 3.0f64.sqrt();
        for amp in b.success_state.iter() {
            assert!((amp - c(s, 0.0)).norm() < 1e-12);
        }
        let f = b.failure_state.unwrap();
        assert!((f[0] - c(0.75f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((f[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(f[2].norm() < 1e-12);
    }

    #[test]
    fn apply_stage_oracle_via_coupling() {
        // Oracle: apply 𝒰 to |ψ_j⟩|0⟩_a and project the ancilla.
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let real = effect_operators(&set, &tol).unwrap();
        for j in 0..4 {
            let b = apply_stage(&set, j, &tol).unwrap();
            let psi = set.state(j).unwrap();
            let mut composite = CVec::zeros(6);
            for s in 0..3 {
                composite[2 * s] = psi[s];
            }
            let out = &real.coupling * composite;
            let mut succ = CVec::zeros(3);
            let mut fail = CVec::zeros(3);
            for s in 0..3 {
                succ[s] = out[2 * s];
                fail[s] = out[2 * s + 1];
            }
            assert!((succ.norm_squared() - b.success_probability).abs() < 1e-12);
            assert!((fail.norm_squared() - b.failure_probability).abs() < 1e-12);
            let succ_n = succ / c(b.success_probability.sqrt(), 0.0);
            assert!((succ_n - &b.success_state).iter().all(|z| z.norm() < 1e-12));
            let fail_n = fail / c(b.failure_probability.sqrt(), 0.0);
            assert!((fail_n - b.failure_state.unwrap())
                .iter()
                .all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn apply_stage_uniform_and_qubit() {
        let tol = Tolerances::default();
        let b = apply_stage(&uniform_set(), 0, &tol).unwrap();
        assert!((b.success_probability - 1.0).abs() < 1e-12);
        assert!(b.failure_state.is_none());

        let b = apply_stage(&qubit_set(), 0, &tol).unwrap();
        assert!((b.success_probability - 2.0 / 3.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        assert!((b.success_state[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((b.success_state[1] - c(s, 0.0)).norm() < 1e-12);
        let f = b.failure_state.unwrap();
        assert!((f[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(f[1].norm() < 1e-12);
    }

    #[test]
    fn failure_descendant_cases() {
        let tol = Tolerances::default();
        // Qutrit example → 2-dim descendant with exponents {0, 1}.
        match failure_descendant(&example_qutrit_set(), &tol).unwrap() {
            FailureSpace::Set(desc) => {
                assert_eq!(desc.order(), 4);
                assert_eq!(desc.embed_positions(), vec![0, 1]);
                let coeffs = desc.coefficients();
                assert!((coeffs[0] - c(0.75f64.sqrt(), 0.0)).norm() < 1e-12);
                assert!((coeffs[1] - c(0.5, 0.0)).norm() < 1e-12);
                // Oracle: normalizing Â_?|ψ_0⟩ projected onto survivors.
                let real = effect_operators(&example_qutrit_set(), &tol).unwrap();
                let xi = &real.a_fail * example_qutrit_set().state(0).unwrap();
                let norm = xi.norm();
                assert!((xi[0] / norm - coeffs[0]).norm() < 1e-12);
                assert!((xi[1] / norm - coeffs[1]).norm() < 1e-12);
            }
            other => panic!("expected descendant set, got {other:?}"),
        }
        // Qubit set has d = D − 1 → one-dimensional failure space.
        assert!(matches!(
            failure_descendant(&qubit_set(), &tol).unwrap(),
            FailureSpace::OneDimensional
        ));
        // Uniform set → no failure branch.
        assert!(matches!(
            failure_descendant(&uniform_set(), &tol).unwrap(),
            FailureSpace::Empty
        ));
    }

    #[test]
    fn descendant_is_symmetric_under_its_generator() {
        let tol = Tolerances::default();
        if let FailureSpace::Set(desc) = failure_descendant(&example_qutrit_set(), &tol).unwrap() {
            let g = desc.generator_unitary();
            for j in 0..desc.order() - 1 {
                let mapped = &g * desc.state(j).unwrap();
                let next = desc.state(j + 1).unwrap();
                assert!((mapped - next).iter().all(|z| z.norm() < 1e-12));
            }
        } else {
            panic!("expected a descendant set");
        }
    }

    #[test]
    fn conclusive_measurement_full_family() {
        // D' = 3 of N = 4: P(k|u_j) = (3/4)δ_jk + 1/12 otherwise.
        let ep = conclusive_measurement(4, &[0, 1, 2]).unwrap();
        for j in 0..4 {
            let dist = ep.outcome_distribution(j).unwrap();
            let total: f64 = dist.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (k, &p) in dist.iter().enumerate() {
                let expected = if k == j { 0.75 } else { 1.0 / 12.0 };
                assert!((p - expected).abs() < 1e-12, "j={j} k={k} p={p}");
            }
        }
    }

    #[test]
    fn conclusive_measurement_two_mode_family() {
        // D' = 2 of N = 4: (1/2)δ_jk, 0 at k = j⊕2, 1/4 elsewhere.
        let ep = conclusive_measurement(4, &[0, 1]).unwrap();
        for j in 0..4 {
            let dist = ep.outcome_distribution(j).unwrap();
            for (k, &p) in dist.iter().enumerate() {
                let expected = if k == j {
                    0.5
                } else if k == (j + 2) % 4 {
                    0.0
                } else {
                    0.25
                };
                assert!((p - expected).abs() < 1e-12, "j={j} k={k} p={p}");
            }
        }
    }

    #[test]
    fn conclusive_measurement_saturated_family() {
        // D' = N: u_j are DFT columns, P(j|u_j) = 1.
        let ep = conclusive_measurement(4, &[0, 1, 2, 3]).unwrap();
        for j in 0..4 {
            let dist = ep.outcome_distribution(j).unwrap();
            assert!((dist[j] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conclusive_measurement_rejects_bad_positions() {
        assert!(conclusive_measurement(4, &[]).is_err());
        assert!(conclusive_measurement(4, &[0, 0]).is_err());
        assert!(conclusive_measurement(4, &[0, 5]).is_err());
    }

    #[test]
    fn chain_matches_povm_statistics() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let (povm, _) = mc_povm_symmetric(&set, &tol);
        for j in 0..4 {
            let chain = conclusive_chain_distribution(&set, j, &tol).unwrap();
            let psi = set.state(j).unwrap();
            for (k, el) in povm.elements.iter().enumerate() {
                let direct = (psi.adjoint() * el * &psi)[(0, 0)].re;
                assert!(
                    (chain[k] - direct).abs() < 1e-12,
                    "j={j} k={k}: chain {} vs povm {}",
                    chain[k],
                    direct
                );
            }
        }
    }

    #[test]
    fn leakage_amplitudes_match_definition() {
        let ep = conclusive_measurement(4, &[0, 1, 2]).unwrap();
        // β_0 = 3/√12 = √(3)/2; |β_k|² for k≠0 should be 1/12.
        assert!((ep.leakage_amplitudes[0].norm() - 3.0 / 12.0f64.sqrt()).abs() < 1e-12);
        for k in 1..4 {
            assert!((ep.leakage_amplitudes[k].norm_sqr() - 1.0 / 12.0).abs() < 1e-12);
        }
    }
}
