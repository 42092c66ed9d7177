//! Ensembles of N equiprobable symmetric pure states on a D-dimensional
//! (sub)space, including failure-subspace descendants whose phase exponents
//! are no longer contiguous.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, Tolerances};

/// One populated mode of the ensemble: its phase exponent in the extended
/// N-dimensional space and its complex coefficient. The exponent doubles as
/// the mode's embedding position for the extended DFT measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub exponent: usize,
    pub coefficient: Complex64,
}

/// N equiprobable symmetric pure states |ψ_j⟩ = Σ_k c_k e^{2πi j m_k / N} |k⟩,
/// generated from the fiducial j = 0 state by a diagonal unitary of order N.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSet {
    order: usize,
    modes: Vec<Mode>,
}

/// Magnitude structure of the coefficients: smallest magnitude, its
/// multiplicity, and all magnitude groups sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub c_min: f64,
    pub multiplicity_d: usize,
    /// (representative magnitude, count), sorted by magnitude descending.
    pub magnitude_groups: Vec<(f64, usize)>,
}

impl SymmetricSet {
    /// Root set: D coefficients on modes with exponents 0..D−1.
    ///
    /// Rejects zero coefficients and non-normalized inputs.
    pub fn make_root_set(n: usize, coefficients: &[Complex64]) -> Result<Self> {
        let modes = coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| Mode {
                exponent: k,
                coefficient: c,
            })
            .collect();
        Self::from_modes(n, modes)
    }

    /// General constructor used for failure descendants: arbitrary distinct
    /// exponents in 0..N−1.
    pub fn from_modes(n: usize, modes: Vec<Mode>) -> Result<Self> {
        let tol = Tolerances::default();
        if n == 0 {
            return Err(Error::InvalidSet("symmetry order must be >= 1".into()));
        }
        let d = modes.len();
        if d == 0 || d > n {
            return Err(Error::InvalidSet(format!(
                "need 1 <= D <= N, got D = {d}, N = {n}"
            )));
        }
        let mut seen = vec![false; n];
        let mut norm2 = 0.0;
        for m in &modes {
            if m.exponent >= n {
                return Err(Error::InvalidSet(format!(
                    "exponent {} out of range 0..{n}",
                    m.exponent
                )));
            }
            if seen[m.exponent] {
                return Err(Error::InvalidSet(format!(
                    "duplicate exponent {}",
                    m.exponent
                )));
            }
            seen[m.exponent] = true;
            let mag = m.coefficient.norm();
            if mag <= tol.eps_group {
                return Err(Error::InvalidSet(
                    "all coefficients must be nonzero".into(),
                ));
            }
            norm2 += mag * mag;
        }
        if (norm2 - 1.0).abs() > tol.eps_norm {
            return Err(Error::InvalidSet(format!(
                "coefficients not normalized: sum of squares = {norm2}"
            )));
        }
        Ok(Self { order: n, modes })
    }

    /// Number of states N (also the dimension of the extended space).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Dimension D of the populated subspace.
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.coefficient).collect()
    }

    /// Embedding positions of the modes in the extended N-dimensional space.
    pub fn embed_positions(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.exponent).collect()
    }

    /// The j-th state as a D-dimensional vector over the mode basis.
    pub fn state(&self, j: usize) -> Result<CVec> {
        if j >= self.order {
            return Err(Error::IndexOutOfRange(format!(
                "state index {j} not in 0..{}",
                self.order
            )));
        }
        let n = self.order as f64;
        Ok(CVec::from_iterator(
            self.dim(),
            self.modes.iter().map(|m| {
                m.coefficient * Complex64::from_polar(1.0, TAU * (j * m.exponent) as f64 / n)
            }),
        ))
    }

    /// Diagonal generator Û with entries e^{2πi m_k / N}; Û|ψ_j⟩ = |ψ_{j+1 mod N}⟩.
    pub fn generator_unitary(&self) -> CMat {
        let n = self.order as f64;
        CMat::from_diagonal(&CVec::from_iterator(
            self.dim(),
            self.modes
                .iter()
                .map(|m| Complex64::from_polar(1.0, TAU * m.exponent as f64 / n)),
        ))
    }

    /// Prior density operator ρ = (1/N) Σ_j |ψ_j⟩⟨ψ_j| = diag(|c_k|²).
    pub fn prior_density(&self) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(
            self.dim(),
            self.modes
                .iter()
                .map(|m| Complex64::new(m.coefficient.norm_sqr(), 0.0)),
        ))
    }

    /// Group the coefficient magnitudes within `eps_group` and report the
    /// minimum magnitude together with its multiplicity.
    pub fn coefficient_profile(&self, tol: &Tolerances) -> CoefficientProfile {
        let mut mags: Vec<f64> = self.modes.iter().map(|m| m.coefficient.norm()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for mag in mags {
            match groups.last_mut() {
                Some((rep, count)) if (*rep - mag).abs() <= tol.eps_group => *count += 1,
                _ => groups.push((mag, 1)),
            }
        }
        let (c_min, multiplicity_d) = *groups.last().expect("set is nonempty");
        CoefficientProfile {
            c_min,
            multiplicity_d,
            magnitude_groups: groups,
        }
    }

    /// True when all coefficient magnitudes fall into a single group.
    pub fn is_uniform(&self, tol: &Tolerances) -> bool {
        self.coefficient_profile(tol).magnitude_groups.len() == 1
    }
}

/// JSON description of a symmetric set: {N, coefficients, optional exponents}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDescription {
    pub n: usize,
    pub coefficients: Vec<ComplexEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(e: ComplexEntry) -> Self {
        Complex64::new(e.re, e.im)
    }
}

impl SetDescription {
    pub fn to_set(&self) -> Result<SymmetricSet> {
        match &self.exponents {
            None => {
                let coeffs: Vec<Complex64> =
                    self.coefficients.iter().map(|&e| e.into()).collect();
                SymmetricSet::make_root_set(self.n, &coeffs)
            }
            Some(exps) => {
                if exps.len() != self.coefficients.len() {
                    return Err(Error::InvalidSet(
                        "exponents and coefficients must have equal length".into(),
                    ));
                }
                let modes = exps
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(&exponent, &c)| Mode {
                        exponent,
                        coefficient: c.into(),
                    })
                    .collect();
                SymmetricSet::from_modes(self.n, modes)
            }
        }
    }

    pub fn from_set(set: &SymmetricSet) -> Self {
        Self {
            n: set.order(),
            coefficients: set.coefficients().into_iter().map(Into::into).collect(),
            exponents: Some(set.embed_positions()),
        }
    }
}

/// The worked four-state qutrit set with |c|² = (0.5, 0.3, 0.2).
pub fn example_qutrit_set() -> SymmetricSet {
    SymmetricSet::make_root_set(
        4,
        &[
            Complex64::new(0.5f64.sqrt(), 0.0),
            Complex64::new(0.3f64.sqrt(), 0.0),
            Complex64::new(0.2f64.sqrt(), 0.0),
        ],
    )
    .expect("example set is valid")
}
