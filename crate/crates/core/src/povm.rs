//! Optimal maximum-confidence POVMs (general pure-state form and the
//! symmetric specialization) and the square-root minimum-error measurement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Tolerances};
use crate::symmetric::SymmetricSet;

/// A POVM: PSD elements, one per conclusive outcome, plus an optional
/// inconclusive element. Elements (+ inconclusive) sum to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    pub dim: usize,
    pub elements: Vec<CMat>,
    pub inconclusive: Option<CMat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    MaxConfidence,
    MinError,
}

/// Figures of merit for a designed measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignReport {
    pub strategy: Strategy,
    pub confidence_per_outcome: Vec<f64>,
    pub inconclusive_probability: f64,
}

/// Outcome of [`validate_povm`]: per-element PSD violations and the
/// completeness deviation, with an overall pass flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmValidation {
    /// (element index, minimum eigenvalue) for elements failing PSD;
    /// index `usize::MAX` denotes the inconclusive element.
    pub psd_violations: Vec<(usize, f64)>,
    pub completeness_deviation: f64,
    pub pass: bool,
}

fn ensemble_density(states: &[CVec], priors: &[f64]) -> Result<CMat> {
    if states.is_empty() || states.len() != priors.len() {
        return Err(Error::DimensionMismatch(
            "states and priors must be nonempty and of equal length".into(),
        ));
    }
    let dim = states[0].len();
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch(
            "all states must share a dimension".into(),
        ));
    }
    let psum: f64 = priors.iter().sum();
    if (psum - 1.0).abs() > 1e-9 || priors.iter().any(|&p| p < 0.0) {
        return Err(Error::Probability(format!(
            "priors must be nonnegative and sum to 1, got sum {psum}"
        )));
    }
    let mut rho = CMat::zeros(dim, dim);
    for (s, &p) in states.iter().zip(priors) {
        rho += (s * s.adjoint()) * Complex64::new(p, 0.0);
    }
    Ok(rho)
}

/// Support-restricted ρ⁻¹ plus a check that every state lies inside the
/// support of ρ; leaking states are rejected loudly instead of regularized.
fn support_inverse(rho: &CMat, states: &[CVec], tol: &Tolerances) -> Result<CMat> {
    let (pinv, proj) = linalg::support_pinv(rho, tol.eps_psd, tol)?;
    for (j, s) in states.iter().enumerate() {
        let leak = (s - &proj * s).norm();
        if leak > 1e-8 {
            return Err(Error::SupportViolation(format!(
                "state {j} has norm {leak:.3e} outside supp(ρ)"
            )));
        }
    }
    Ok(pinv)
}

/// Optimal MC POVM element for a general pure-state ensemble:
/// a_j · ρ⁻¹ |ψ_j⟩⟨ψ_j| ρ⁻¹ on the support of ρ.
pub fn mc_element_general(
    states: &[CVec],
    priors: &[f64],
    j: usize,
    weight: f64,
    tol: &Tolerances,
) -> Result<CMat> {
    if j >= states.len() {
        return Err(Error::IndexOutOfRange(format!(
            "outcome index {j} not in 0..{}",
            states.len()
        )));
    }
    if weight <= 0.0 {
        return Err(Error::ContractViolation("weight must be positive".into()));
    }
    let rho = ensemble_density(states, priors)?;
    let pinv = support_inverse(&rho, states, tol)?;
    let rho_j = &states[j] * states[j].adjoint();
    Ok((&pinv * rho_j * &pinv) * Complex64::new(weight, 0.0))
}

/// Maximum confidence achievable for outcome j: p_j · Tr(ρ_j ρ⁻¹).
pub fn max_confidence(states: &[CVec], priors: &[f64], j: usize, tol: &Tolerances) -> Result<f64> {
    if j >= states.len() {
        return Err(Error::IndexOutOfRange(format!(
            "outcome index {j} not in 0..{}",
            states.len()
        )));
    }
    let rho = ensemble_density(states, priors)?;
    let pinv = support_inverse(&rho, states, tol)?;
    let val = priors[j] * (states[j].adjoint() * &pinv * &states[j])[(0, 0)].re;
    if val < -tol.eps_prob || val > 1.0 + tol.eps_prob {
        return Err(Error::Probability(format!(
            "confidence {val} outside [0,1] beyond tolerance"
        )));
    }
    Ok(val.clamp(0.0, 1.0))
}

/// Reciprocal state |φ_j⟩ = Σ_k (c_k*)⁻¹ e^{2πi j m_k / N} |k⟩ (not normalized).
pub fn reciprocal_state(set: &SymmetricSet, j: usize) -> CVec {
    let n = set.order() as f64;
    CVec::from_iterator(
        set.dim(),
        set.modes().iter().map(|m| {
            Complex64::from_polar(1.0, TAU * (j * m.exponent) as f64 / n) / m.coefficient.conj()
        }),
    )
}

/// Optimal MC POVM for a symmetric set: Π_j = (c_min²/N)|φ_j⟩⟨φ_j| with the
/// diagonal inconclusive element Π_? = Σ_m (1 − c_min²/|c_m|²)|m⟩⟨m|.
///
/// For uniform-magnitude coefficients the inconclusive element is absent and
/// the POVM coincides with the square-root (minimum-error) measurement.
pub fn mc_povm_symmetric(set: &SymmetricSet, tol: &Tolerances) -> (Povm, DesignReport) {
    let n = set.order();
    let d = set.dim();
    let profile = set.coefficient_profile(tol);
    let c_min2 = profile.c_min * profile.c_min;
    let a = Complex64::new(c_min2 / n as f64, 0.0);

    let elements: Vec<CMat> = (0..n)
        .map(|j| {
            let phi = reciprocal_state(set, j);
            (&phi * phi.adjoint()) * a
        })
        .collect();

    let uniform = profile.magnitude_groups.len() == 1;
    let inconclusive = if uniform {
        None
    } else {
        Some(CMat::from_diagonal(&CVec::from_iterator(
            d,
            set.modes()
                .iter()
                .map(|m| Complex64::new(1.0 - c_min2 / m.coefficient.norm_sqr(), 0.0)),
        )))
    };

    let confidence = d as f64 / n as f64;
    let p_inconclusive = if uniform { 0.0 } else { 1.0 - d as f64 * c_min2 };
    let report = DesignReport {
        strategy: Strategy::MaxConfidence,
        confidence_per_outcome: vec![confidence; n],
        inconclusive_probability: p_inconclusive,
    };
    (
        Povm {
            dim: d,
            elements,
            inconclusive,
        },
        report,
    )
}

/// ME measurement state |μ_j⟩ with amplitudes e^{i arg c_k} e^{2πi j m_k/N}/√D.
pub fn me_state(set: &SymmetricSet, j: usize) -> CVec {
    let n = set.order() as f64;
    let scale = 1.0 / (set.dim() as f64).sqrt();
    CVec::from_iterator(
        set.dim(),
        set.modes().iter().map(|m| {
            Complex64::from_polar(
                scale,
                m.coefficient.arg() + TAU * (j * m.exponent) as f64 / n,
            )
        }),
    )
}

/// Square-root measurement, optimal for minimum error on equiprobable
/// symmetric states: Π_j = (D/N)|μ_j⟩⟨μ_j|, complete without an
/// inconclusive element. Confidence is (Σ|c_m|)²/N per outcome.
pub fn me_povm(set: &SymmetricSet) -> (Povm, DesignReport) {
    let n = set.order();
    let d = set.dim();
    let w = Complex64::new(d as f64 / n as f64, 0.0);
    let elements: Vec<CMat> = (0..n)
        .map(|j| {
            let mu = me_state(set, j);
            (&mu * mu.adjoint()) * w
        })
        .collect();
    let mag_sum: f64 = set.modes().iter().map(|m| m.coefficient.norm()).sum();
    let confidence = mag_sum * mag_sum / n as f64;
    let report = DesignReport {
        strategy: Strategy::MinError,
        confidence_per_outcome: vec![confidence; n],
        inconclusive_probability: 0.0,
    };
    (
        Povm {
            dim: d,
            elements,
            inconclusive: None,
        },
        report,
    )
}

/// Check PSD per element and completeness; report violations with magnitudes.
pub fn validate_povm(povm: &Povm, tol: &Tolerances) -> Result<PovmValidation> {
    let mut psd_violations = Vec::new();
    let mut sum = CMat::zeros(povm.dim, povm.dim);
    for (idx, el) in povm.elements.iter().enumerate() {
        let min_eig = linalg::min_eigenvalue(el, tol)?;
        if min_eig < -tol.eps_psd {
            psd_violations.push((idx, min_eig));
        }
        sum += el;
    }
    if let Some(q) = &povm.inconclusive {
        let min_eig = linalg::min_eigenvalue(q, tol)?;
        if min_eig < -tol.eps_psd {
            psd_violations.push((usize::MAX, min_eig));
        }
        sum += q;
    }
    let completeness_deviation = linalg::max_norm_diff(&sum, &linalg::identity(povm.dim));
    let pass = psd_violations.is_empty() && completeness_deviation <= tol.eps_unitary;
    Ok(PovmValidation {
        psd_violations,
        completeness_deviation,
        pass,
    })
}

/// Confidence of outcome j computed directly from a POVM via Bayes' rule:
/// p_j Tr(Π_j ρ_j) / Tr(Π_j ρ). Cross-checks the closed forms.
pub fn confidence_from_povm(povm: &Povm, set: &SymmetricSet, j: usize) -> Result<f64> {
    if j >= povm.elements.len() {
        return Err(Error::IndexOutOfRange(format!("outcome {j}")));
    }
    let psi = set.state(j)?;
    let rho = set.prior_density();
    let el = &povm.elements[j];
    let num = (psi.adjoint() * el * &psi)[(0, 0)].re / set.order() as f64;
    let den = (el * rho).trace().re;
    Ok(num / den)
}

/// JSON form of a POVM: row-major complex matrices as (re, im) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmDescription {
    pub dim: usize,
    pub elements: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<Vec<[f64; 2]>>,
}

fn matrix_to_rows(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

fn rows_to_matrix(dim: usize, rows: &[[f64; 2]]) -> Result<CMat> {
    if rows.len() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "expected {} entries for a {dim}x{dim} matrix, got {}",
            dim * dim,
            rows.len()
        )));
    }
    Ok(CMat::from_fn(dim, dim, |r, c| {
        let [re, im] = rows[r * dim + c];
        Complex64::new(re, im)
    }))
}

impl PovmDescription {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            dim: p.dim,
            elements: p.elements.iter().map(matrix_to_rows).collect(),
            inconclusive: p.inconclusive.as_ref().map(matrix_to_rows),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .map(|rows| rows_to_matrix(self.dim, rows))
            .collect::<Result<Vec<_>>>()?;
        let inconclusive = self
            .inconclusive
            .as_ref()
            .map(|rows| rows_to_matrix(self.dim, rows))
            .transpose()?;
        Ok(Povm {
            dim: self.dim,
            elements,
            inconclusive,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_norm_diff;
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

    #[test]
    fn general_element_orthonormal_pair_is_projector() {
        // Two orthonormal equiprobable states: ρ = I/2, so with the weight
        // a_j = P(ω_j)/Tr(ρ⁻¹ρ_j) = (1/2)/2 = 1/4 the element is the
        // projector onto |ψ_j⟩.
        let tol = Tolerances::default();
        let s0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s1 = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let states = vec![s0.clone(), s1];
        let el = mc_element_general(&states, &[0.5, 0.5], 0, 0.25, &tol).unwrap();
        let proj = &s0 * s0.adjoint();
        assert!(max_norm_diff(&el, &proj) < 1e-10);
    }

    #[test]
    fn general_element_matches_symmetric_reciprocal() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let states: Vec<CVec> = (0..4).map(|j| set.state(j).unwrap()).collect();
        let priors = vec![0.25; 4];
        let a = 0.05;
        let el = mc_element_general(&states, &priors, 0, a, &tol).unwrap();
        // Oracle: explicit ρ⁻¹ ρ_0 ρ⁻¹ with entry (k,m) = a/(c_k c_m) for real c.
        let coeffs = [0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()];
        let oracle = CMat::from_fn(3, 3, |k, m| c(a / (coeffs[k] * coeffs[m]), 0.0));
        assert!(max_norm_diff(&el, &oracle) < 1e-10);
        // And proportional to |φ_0⟩⟨φ_0|.
        let phi = reciprocal_state(&set, 0);
        let outer = (&phi * phi.adjoint()) * c(a, 0.0);
        assert!(max_norm_diff(&el, &outer) < 1e-10);
    }

    #[test]
    fn general_element_rejects_support_leak() {
        let tol = Tolerances::default();
        // ρ built from states on mode 0 only; probe state leaks onto mode 1.
        let s0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s1 = CVec::from_vec(vec![c(0.6, 0.0), c(0.8, 0.0)]);
        let states = vec![s0, s1];
        // Make ρ rank-1 by giving the leaking state zero prior... priors must
        // sum to 1, so use (1, 0): ρ = |s0⟩⟨s0| but state 1 leaks outside.
        let err = mc_element_general(&states, &[1.0, 0.0], 1, 0.5, &tol);
        assert!(matches!(err, Err(Error::SupportViolation(_))));
    }

    #[test]
    fn max_confidence_symmetric_is_d_over_n() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let states: Vec<CVec> = (0..4).map(|j| set.state(j).unwrap()).collect();
        for j in 0..4 {
            let conf = max_confidence(&states, &[0.25; 4], j, &tol).unwrap();
            assert!((conf - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn max_confidence_orthonormal_pair_is_one() {
        let tol = Tolerances::default();
        let s0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s1 = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let conf = max_confidence(&[s0, s1], &[0.5, 0.5], 0, &tol).unwrap();
        assert!((conf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mc_povm_qutrit_inconclusive_element() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let (povm, report) = mc_povm_symmetric(&set, &tol);
        let q = povm.inconclusive.as_ref().unwrap();
        assert!((q[(0, 0)] - c(0.6, 0.0)).norm() < 1e-12);
        assert!((q[(1, 1)] - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!(q[(2, 2)].norm() < 1e-12);
        assert!((report.inconclusive_probability - 0.4).abs() < 1e-12);
        // Oracle: Tr(Π_? ρ) recomputed from explicit matrices.
        let p_inc = (q * set.prior_density()).trace().re;
        assert!((p_inc - 0.4).abs() < 1e-12);
        assert!(report
            .confidence_per_outcome
            .iter()
            .all(|&v| (v - 0.75).abs() < 1e-12));
        assert!(validate_povm(&povm, &tol).unwrap().pass);
    }

    #[test]
    fn mc_povm_uniform_equals_me() {
        let tol = Tolerances::default();
        let u = 1.0 / 3.0f64.sqrt();
        let set = SymmetricSet::make_root_set(4, &[c(u, 0.0), c(u, 0.0), c(u, 0.0)]).unwrap();
        let (mc, mc_rep) = mc_povm_symmetric(&set, &tol);
        let (me, me_rep) = me_povm(&set);
        assert!(mc.inconclusive.is_none());
        assert!((mc_rep.inconclusive_probability).abs() < 1e-12);
        for (a, b) in mc.elements.iter().zip(&me.elements) {
            assert!(max_norm_diff(a, b) < 1e-10);
        }
        assert!((me_rep.confidence_per_outcome[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn mc_povm_qubit_set_figures() {
        let tol = Tolerances::default();
        let (povm, report) = mc_povm_symmetric(&qubit_set(), &tol);
        assert!((report.inconclusive_probability - 1.0 / 3.0).abs() < 1e-12);
        assert!((report.confidence_per_outcome[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!(validate_povm(&povm, &tol).unwrap().pass);
    }

    #[test]
    fn me_confidence_closed_form_vs_trace_oracle() {
        let set = example_qutrit_set();
        let (povm, report) = me_povm(&set);
        let expected = (0.5f64.sqrt() + 0.3f64.sqrt() + 0.2f64.sqrt()).powi(2) / 4.0;
        assert!((report.confidence_per_outcome[0] - expected).abs() < 1e-12);
        assert!((expected - 0.72424).abs() < 1e-5);
        // Oracle: explicit Tr(Π_j ρ_j)/Tr(Π_j ρ) per outcome.
        for j in 0..4 {
            let conf = confidence_from_povm(&povm, &set, j).unwrap();
            assert!((conf - expected).abs() < 1e-12);
        }
        // Completeness is exact for ME.
        let v = validate_povm(&povm, &Tolerances::default()).unwrap();
        assert!(v.pass, "completeness deviation {}", v.completeness_deviation);
    }

    #[test]
    fn me_confidence_qubit_set() {
        let (_, report) = me_povm(&qubit_set());
        let expected = ((2.0f64 / 3.0).sqrt() + (1.0f64 / 3.0).sqrt()).powi(2) / 3.0;
        assert!((report.confidence_per_outcome[0] - expected).abs() < 1e-12);
        // (3 + 2√2)/9 ≈ 0.647614
        assert!((expected - (3.0 + 2.0 * 2.0f64.sqrt()) / 9.0).abs() < 1e-12);
    }

    #[test]
    fn validate_flags_scaled_elements() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let (mut povm, _) = mc_povm_symmetric(&set, &tol);
        for el in &mut povm.elements {
            *el *= c(1.01, 0.0);
        }
        let v = validate_povm(&povm, &tol).unwrap();
        assert!(!v.pass);
        assert!(v.completeness_deviation > 1e-3);
    }

    #[test]
    fn validate_flags_injected_negative_eigenvalue() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let (mut povm, _) = mc_povm_symmetric(&set, &tol);
        if let Some(q) = povm.inconclusive.as_mut() {
            q[(2, 2)] = c(-1e-6, 0.0);
        }
        let v = validate_povm(&povm, &tol).unwrap();
        assert!(!v.pass);
        assert!(v.psd_violations.iter().any(|&(i, _)| i == usize::MAX));
    }

    #[test]
    fn outcome_total_probability_symmetry() {
        let tol = Tolerances::default();
        let set = example_qutrit_set();
        let (povm, _) = mc_povm_symmetric(&set, &tol);
        let rho = set.prior_density();
        let probs: Vec<f64> = povm.elements.iter().map(|e| (e * &rho).trace().re).collect();
        for &p in &probs {
            assert!((p - probs[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn povm_serialization_round_trip() {
        let tol = Tolerances::default();
        let (povm, _) = mc_povm_symmetric(&example_qutrit_set(), &tol);
        let desc = PovmDescription::from_povm(&povm);
        let json = serde_json::to_string(&desc).unwrap();
        let back: PovmDescription = serde_json::from_str(&json).unwrap();
        let povm2 = back.to_povm().unwrap();
        for (a, b) in povm.elements.iter().zip(&povm2.elements) {
            assert!(max_norm_diff(a, b) < 1e-15);
        }
    }
}
