//! Linear-optical compilation of the two-stage N = 4, D = 3 discriminator.
//!
//! Qutrit amplitudes are encoded in path ⊗ polarization: logical mode m is
//! the horizontal component of path m. Wave plates split each stage into its
//! conclusive (H) and descend (V) branches, polarizing beam splitters route
//! the branches apart, and each stage's conclusive four-outcome measurement
//! is an inverse-DFT interferometer obtained by Givens nulling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Tolerances};
use crate::symmetric::SymmetricSet;

/// Wave-plate and phase settings for one compiled instance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CompiledAngles {
    /// Preparation polar angle, cos θ = c0.
    pub theta: f64,
    /// Preparation azimuthal angle, tan φ = c2/c1.
    pub phi: f64,
    /// Preparation half-wave plates: θ/2, φ/2 + π/4, π/4.
    pub chi: [f64; 3],
    /// Stage-1 splitting plates on paths 0 and 1 (path 2 needs none).
    pub alpha: [f64; 2],
    /// Stage-2 splitting plates on paths 0 and 1.
    pub beta: [f64; 2],
    /// Set when the stage-1 failure branch is empty (uniform magnitudes),
    /// leaving the stage-2 hardware dark.
    pub stage2_inert: bool,
}

fn qutrit_magnitudes(set: &SymmetricSet, tol: &Tolerances) -> Result<[f64; 3]> {
    if set.order() != 4 || set.dim() != 3 || set.embed_positions() != [0, 1, 2] {
        return Err(Error::UnsupportedInstance(
            "optical compilation targets N = 4 sets on modes 0, 1, 2".into(),
        ));
    }
    let c: Vec<f64> = set.coefficients().iter().map(|z| z.norm()).collect();
    for z in set.coefficients() {
        if z.im.abs() > tol.eps_norm || z.re < 0.0 {
            return Err(Error::UnsupportedInstance(
                "optical compilation expects real non-negative coefficients".into(),
            ));
        }
    }
    if c[0] < c[1] - tol.eps_group || c[1] < c[2] - tol.eps_group {
        return Err(Error::UnsupportedInstance(
            "coefficients must be sorted non-increasing".into(),
        ));
    }
    Ok([c[0], c[1], c[2]])
}

fn angles_from(c: [f64; 3], tol: &Tolerances) -> (CompiledAngles, bool) {
    let theta = c[0].min(1.0).acos();
    let phi = c[2].atan2(c[1]);
    let chi = [theta / 2.0, phi / 2.0 + FRAC_PI_4, FRAC_PI_4];
    let alpha = [
        0.5 * (c[2] / c[0]).min(1.0).acos(),
        0.5 * (c[2] / c[1]).min(1.0).acos(),
    ];
    let a0 = (c[0] * c[0] - c[2] * c[2]).max(0.0);
    let a1 = (c[1] * c[1] - c[2] * c[2]).max(0.0);
    let stage2_inert = (c[0] - c[2]).abs() <= tol.eps_group;
    let degenerate = !stage2_inert && (c[0] - c[1]).abs() <= tol.eps_group;
    // sin 2β0 equals the ratio of the stage-2 split amplitudes; when the
    // ratio is 0/0 the branch carries no weight and π/4 keeps the plate
    // trivially consistent.
    let beta0 = if stage2_inert || degenerate {
        FRAC_PI_4
    } else {
        0.5 * (a1 / a0).sqrt().min(1.0).acos() + FRAC_PI_4
    };
    (
        CompiledAngles {
            theta,
            phi,
            chi,
            alpha,
            beta: [beta0, FRAC_PI_4],
            stage2_inert,
        },
        degenerate,
    )
}

/// Compute all wave-plate settings for an N = 4 qutrit set with real
/// non-increasing coefficients. A set with c0 = c1 > c2 has no unique
/// stage-2 split and is rejected; `build_circuit` applies the β0 = π/4
/// convention for it instead.
pub fn compile_angles(set: &SymmetricSet, tol: &Tolerances) -> Result<CompiledAngles> {
    let c = qutrit_magnitudes(set, tol)?;
    let (angles, degenerate) = angles_from(c, tol);
    if degenerate {
        return Err(Error::DegenerateStage(
            "c0 = c1 > c2 leaves the stage-2 plate angle unconstrained".into(),
        ));
    }
    Ok(angles)
}

/// One two-path coupling layer of a triangular mesh, acting on the given
/// row pair of the mode vector.
#[derive(Debug, Clone)]
pub struct ReckLayer {
    pub rows: (usize, usize),
    pub matrix: [[Complex64; 2]; 2],
}

/// Triangular mesh: input phases followed by two-path layers, in
/// application order.
#[derive(Debug, Clone)]
pub struct ReckMesh {
    pub dim: usize,
    pub input_phases: Vec<f64>,
    pub layers: Vec<ReckLayer>,
}

/// Decompose a unitary into a triangular two-path mesh by Givens nulling.
pub fn reck_decompose(unitary: &CMat, tol: &Tolerances) -> Result<ReckMesh> {
    let n = unitary.nrows();
    if !linalg::is_unitary(unitary, tol.eps_unitary) {
        return Err(Error::NotUnitary(linalg::unitarity_deviation(unitary)));
    }
    let mut work = unitary.clone();
    let mut givens: Vec<ReckLayer> = Vec::new();
    for j in 0..n {
        for i in j + 1..n {
            let a = work[(j, j)];
            let b = work[(i, j)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if r < 1e-14 {
                continue;
            }
            let g = [[a.conj() / r, b.conj() / r], [-b / r, a / r]];
            for col in 0..n {
                let top = work[(j, col)];
                let bot = work[(i, col)];
                work[(j, col)] = g[0][0] * top + g[0][1] * bot;
                work[(i, col)] = g[1][0] * top + g[1][1] * bot;
            }
            givens.push(ReckLayer {
                rows: (j, i),
                matrix: g,
            });
        }
    }
    let input_phases: Vec<f64> = (0..n).map(|k| work[(k, k)].arg()).collect();
    for row in 0..n {
        for col in 0..n {
            if row != col && work[(row, col)].norm() > 1e-9 {
                return Err(Error::ContractViolation(format!(
                    "nulling left residual {:.3e} at ({row}, {col})",
                    work[(row, col)].norm()
                )));
            }
        }
    }
    // U = G_1† … G_m† D, so after the phases the adjoints apply in
    // reverse recording order.
    let layers = givens
        .into_iter()
        .rev()
        .map(|g| {
            let m = g.matrix;
            ReckLayer {
                rows: g.rows,
                matrix: [
                    [m[0][0].conj(), m[1][0].conj()],
                    [m[0][1].conj(), m[1][1].conj()],
                ],
            }
        })
        .collect();
    Ok(ReckMesh {
        dim: n,
        input_phases,
        layers,
    })
}

/// Multiply the mesh back out into a dense matrix.
pub fn reconstruct(mesh: &ReckMesh) -> CMat {
    let n = mesh.dim;
    let mut out = CMat::identity(n, n);
    for (k, &phase) in mesh.input_phases.iter().enumerate() {
        let f = Complex64::from_polar(1.0, phase);
        for col in 0..n {
            out[(k, col)] *= f;
        }
    }
    for layer in &mesh.layers {
        let (p, q) = layer.rows;
        let m = layer.matrix;
        for col in 0..n {
            let top = out[(p, col)];
            let bot = out[(q, col)];
            out[(p, col)] = m[0][0] * top + m[0][1] * bot;
            out[(q, col)] = m[1][0] * top + m[1][1] * bot;
        }
    }
    out
}

/// One optical element, in propagation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    /// Half-wave plate at the given angle: (H, V) ↦
    /// (H cos 2χ + V sin 2χ, H sin 2χ − V cos 2χ).
    Hwp { path: usize, angle: f64 },
    /// Polarizing beam splitter: swaps the H components of the two paths,
    /// transmits V.
    Pbs { paths: (usize, usize) },
    /// Phase shifter e^{iφ} on both polarizations of a path. When
    /// `per_input` is set the phase is multiplied by the prepared state
    /// index at simulation time.
    Ps {
        path: usize,
        phase: f64,
        per_input: bool,
    },
    /// Variable beam splitter on two paths, polarization-preserving:
    /// (p, q) ↦ (p cos θ − q sin θ, p sin θ + q cos θ). θ = π/4 is 50:50.
    Bs { paths: (usize, usize), angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "outcome", rename_all = "snake_case")]
pub enum DetectorLabel {
    Stage1(usize),
    Stage2(usize),
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Detector {
    pub path: usize,
    pub label: DetectorLabel,
}

/// Full single-photon network: the photon enters `input_path` horizontally
/// polarized and every path ends on a detector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Circuit {
    pub paths: usize,
    pub input_path: usize,
    pub elements: Vec<Element>,
    pub detectors: Vec<Detector>,
    pub stage2_inert: bool,
}

const NUM_PATHS: usize = 9;
const STAGE1_PATHS: [usize; 4] = [3, 4, 2, 5];
const STAGE2_PATHS: [usize; 4] = [8, 1, 6, 7];

fn push_phase(elements: &mut Vec<Element>, path: usize, phase: f64) {
    let wrapped = phase.rem_euclid(2.0 * PI);
    if wrapped.min(2.0 * PI - wrapped) > 1e-12 {
        elements.push(Element::Ps {
            path,
            phase,
            per_input: false,
        });
    }
}

/// Expand a mesh into phase-shifter and beam-splitter elements on the given
/// physical paths. Each layer V factors as P_left · BS(θ) · P_right.
fn mesh_elements(mesh: &ReckMesh, path_map: &[usize]) -> Vec<Element> {
    let mut elements = Vec::new();
    for (k, &phase) in mesh.input_phases.iter().enumerate() {
        push_phase(&mut elements, path_map[k], phase);
    }
    for layer in &mesh.layers {
        let (p, q) = (path_map[layer.rows.0], path_map[layer.rows.1]);
        let m = layer.matrix;
        let theta = m[1][0].norm().atan2(m[0][0].norm());
        let a = (-m[0][1]).arg();
        let b = m[1][1].arg();
        let c = m[0][0].arg() - a;
        push_phase(&mut elements, p, c);
        elements.push(Element::Bs {
            paths: (p, q),
            angle: theta,
        });
        push_phase(&mut elements, p, a);
        push_phase(&mut elements, q, b);
    }
    elements
}

/// Compile the full two-stage network for an N = 4 qutrit set.
///
/// Paths 0–2 carry the logical modes after preparation; paths 3, 4, 2, 5
/// feed the stage-1 interferometer, paths 8, 1, 6, 7 the stage-2 one, and
/// the vertical remainder on path 0 is the inconclusive port.
pub fn build_circuit(set: &SymmetricSet, tol: &Tolerances) -> Result<Circuit> {
    let c = qutrit_magnitudes(set, tol)?;
    let (angles, _) = angles_from(c, tol);

    let mut elements = Vec::new();
    // Preparation: fan c0, c1, c2 out onto the H components of paths 0–2.
    elements.push(Element::Hwp {
        path: 2,
        angle: angles.chi[0],
    });
    elements.push(Element::Pbs { paths: (2, 0) });
    elements.push(Element::Hwp {
        path: 2,
        angle: angles.chi[1],
    });
    elements.push(Element::Pbs { paths: (2, 1) });
    elements.push(Element::Hwp {
        path: 2,
        angle: angles.chi[2],
    });
    // State-index phases e^{2πi j m / 4} on modes m = 1, 2.
    elements.push(Element::Ps {
        path: 1,
        phase: FRAC_PI_2,
        per_input: true,
    });
    elements.push(Element::Ps {
        path: 2,
        phase: PI,
        per_input: true,
    });
    // Stage 1: split each mode into conclusive (H) and descend (V) parts,
    // then route the H parts into the four-mode analyzer.
    elements.push(Element::Hwp {
        path: 0,
        angle: angles.alpha[0],
    });
    elements.push(Element::Hwp {
        path: 1,
        angle: angles.alpha[1],
    });
    elements.push(Element::Pbs { paths: (0, 3) });
    elements.push(Element::Pbs { paths: (1, 4) });
    let analyzer = reck_decompose(&linalg::inverse_dft_matrix(4)?, tol)?;
    elements.extend(mesh_elements(&analyzer, &STAGE1_PATHS));
    // Stage 2 on the vertical remainders of paths 0 and 1.
    elements.push(Element::Hwp {
        path: 0,
        angle: angles.beta[0],
    });
    elements.push(Element::Hwp {
        path: 1,
        angle: angles.beta[1],
    });
    elements.push(Element::Pbs { paths: (0, 8) });
    elements.extend(mesh_elements(&analyzer, &STAGE2_PATHS));

    let mut detectors = Vec::new();
    for (k, &p) in STAGE1_PATHS.iter().enumerate() {
        detectors.push(Detector {
            path: p,
            label: DetectorLabel::Stage1(k),
        });
    }
    for (k, &p) in STAGE2_PATHS.iter().enumerate() {
        detectors.push(Detector {
            path: p,
            label: DetectorLabel::Stage2(k),
        });
    }
    detectors.push(Detector {
        path: 0,
        label: DetectorLabel::Inconclusive,
    });

    Ok(Circuit {
        paths: NUM_PATHS,
        input_path: 2,
        elements,
        detectors,
        stage2_inert: angles.stage2_inert,
    })
}

/// Detector click probabilities for one prepared state index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub stage1: Vec<f64>,
    pub stage2: Vec<f64>,
    pub inconclusive: f64,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.stage1.iter().sum::<f64>() + self.stage2.iter().sum::<f64>() + self.inconclusive
    }
}

fn apply_elements(state: &mut [Complex64], elements: &[Element], input_index: usize) {
    for element in elements {
        match element {
            Element::Hwp { path, angle } => {
                let (s, c) = (2.0 * angle).sin_cos();
                let h = state[2 * path];
                let v = state[2 * path + 1];
                state[2 * path] = c * h + s * v;
                state[2 * path + 1] = s * h - c * v;
            }
            Element::Pbs { paths: (p, q) } => {
                state.swap(2 * p, 2 * q);
            }
            Element::Ps {
                path,
                phase,
                per_input,
            } => {
                let scale = if *per_input { input_index as f64 } else { 1.0 };
                let f = Complex64::from_polar(1.0, phase * scale);
                state[2 * path] *= f;
                state[2 * path + 1] *= f;
            }
            Element::Bs { paths: (p, q), angle } => {
                let (s, c) = angle.sin_cos();
                for pol in 0..2 {
                    let top = state[2 * p + pol];
                    let bot = state[2 * q + pol];
                    state[2 * p + pol] = c * top - s * bot;
                    state[2 * q + pol] = s * top + c * bot;
                }
            }
        }
    }
}

/// Propagate a single photon prepared in state `j` through the network and
/// read out every detector.
pub fn simulate_network(circuit: &Circuit, j: usize) -> Result<OutcomeDistribution> {
    if j >= 4 {
        return Err(Error::IndexOutOfRange(format!("input index {j} not in 0..4")));
    }
    let mut state = vec![Complex64::default(); 2 * circuit.paths];
    state[2 * circuit.input_path] = Complex64::new(1.0, 0.0);
    apply_elements(&mut state, &circuit.elements, j);

    let mut stage1 = vec![0.0; 4];
    let mut stage2 = vec![0.0; 4];
    let mut inconclusive = 0.0;
    for det in &circuit.detectors {
        let p = state[2 * det.path].norm_sqr() + state[2 * det.path + 1].norm_sqr();
        match det.label {
            DetectorLabel::Stage1(k) => stage1[k] += p,
            DetectorLabel::Stage2(k) => stage2[k] += p,
            DetectorLabel::Inconclusive => inconclusive += p,
        }
    }
    Ok(OutcomeDistribution {
        stage1,
        stage2,
        inconclusive,
    })
}
