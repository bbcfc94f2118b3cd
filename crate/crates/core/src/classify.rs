//! Bessel / complete / frame / tight / Riesz / orthonormal / exact predicates.

use serde::{Deserialize, Serialize};

use crate::duality;
use crate::error::{Error, Result};
use crate::excess;
use crate::generators;
use crate::gframe::{self, FrameBounds, GFrame};
use crate::linalg::{self, ComplexMatrix, SpdPower, C64};
use crate::par;
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub is_bessel: bool,
    pub bessel_bound: f64,
    pub is_complete: bool,
    pub is_frame: bool,
    pub frame_bounds: Option<FrameBounds>,
    pub is_tight: bool,
    pub is_riesz: bool,
    pub riesz_bounds: Option<FrameBounds>,
    pub is_orthonormal: bool,
    pub is_exact: bool,
    pub dim_sum: usize,
    pub dim_u: usize,
    pub rank: usize,
}

/// Shared by the g-frame and vector-frame classifiers once the spectral data is known.
pub(crate) struct Spectral {
    pub rank: usize,
    pub bounds: FrameBounds,
}

pub(crate) fn tight_from_bounds(b: &FrameBounds, tol: &Tolerances) -> bool {
    b.upper > 0.0 && (b.upper - b.lower) / b.upper <= tol.tight
}

pub(crate) fn unitary_defect(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    (&m.matmul(&m.adjoint()) - &ComplexMatrix::identity(n)).frobenius_norm() / (n.max(1) as f64).sqrt()
}

/// Classifies `f` from its stacked analysis matrix `M` and frame operator `S = M*M`.
pub fn classify(f: &GFrame, tol: &Tolerances) -> Result<ClassificationReport> {
    let n = f.dim_u();
    let m = f.stacked();
    let sv = linalg::singular_values(&m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax > 0.0 {
        sv.iter().filter(|&&s| s > tol.rank * smax).count()
    } else {
        0
    };
    let op = gframe::frame_operator(f)?;
    let spectral = Spectral {
        rank,
        bounds: op.bounds(),
    };
    let mut report = report_from_spectral(&spectral, n, f.dim_sum(), tol);
    if report.is_riesz {
        let smin = sv.last().copied().unwrap_or(0.0);
        report.riesz_bounds = Some(FrameBounds {
            lower: smin * smin,
            upper: smax * smax,
        });
        let square_defect = unitary_defect(&m).max(unitary_defect(&m.adjoint()));
        report.is_orthonormal = square_defect <= tol.orthonormal;
    }
    if report.is_frame {
        report.is_exact = excess::exactness(f, tol)?.exact;
    }
    Ok(report)
}

pub(crate) fn report_from_spectral(
    sp: &Spectral,
    n: usize,
    dim_sum: usize,
    tol: &Tolerances,
) -> ClassificationReport {
    let is_complete = sp.rank == n;
    let is_frame = is_complete && n > 0 && sp.bounds.is_frame(tol);
    let is_riesz = is_frame && dim_sum == n;
    ClassificationReport {
        is_bessel: true,
        bessel_bound: sp.bounds.upper,
        is_complete,
        is_frame,
        frame_bounds: is_frame.then_some(sp.bounds),
        is_tight: is_frame && tight_from_bounds(&sp.bounds, tol),
        is_riesz,
        riesz_bounds: None,
        is_orthonormal: false,
        is_exact: false,
        dim_sum,
        dim_u: n,
        rank: sp.rank,
    }
}

/// Classifies many families, in parallel when enabled; output order matches input.
pub fn classify_many(frames: &[GFrame], tol: &Tolerances) -> Vec<Result<ClassificationReport>> {
    par::map(frames, |f| classify(f, tol))
}

/// Extreme sampled values of `‖Σ_{J₁} Λ_j* g_j‖² / Σ_{J₁} ‖g_j‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszWitness {
    pub trials: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Samples random subsets `J₁` and coefficient families. Every other trial is
/// pushed towards the bottom singular direction of the subset's synthesis map
/// so redundant families expose ratios near zero.
pub fn riesz_inequality_witness(f: &GFrame, trials: usize, seed: u64) -> Result<RieszWitness> {
    let mut rng = generators::rng(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let count = f.len();
    let mut done = 0;
    for t in 0..trials {
        if count == 0 {
            break;
        }
        let mut subset: Vec<usize> = (0..count).filter(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect();
        if subset.is_empty() {
            subset.push(rand::Rng::random_range(&mut rng, 0..count));
        }
        let blocks: Vec<&ComplexMatrix> = subset.iter().map(|&i| &f.elements()[i].block).collect();
        let m1 = ComplexMatrix::vstack(f.dim_u(), blocks.iter().copied());
        let len = m1.rows();
        if len == 0 {
            continue;
        }
        let mut g = generators::gaussian_vector(&mut rng, len);
        if t % 2 == 1 {
            let gram = m1.matmul(&m1.adjoint());
            let eig = linalg::herm_eig(&gram)?;
            let bottom = eig.eigenvectors.column(0);
            let delta = 10f64.powi(-(((t / 2) % 8) as i32));
            g = linalg::add_vec(&bottom, &linalg::scale_vec(&g, C64::new(delta, 0.0)));
        }
        let synth = m1.adjoint_mul_vec(&g);
        let ratio = linalg::norm_sqr(&synth) / linalg::norm_sqr(&g);
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        done += 1;
    }
    if done == 0 {
        min_ratio = 0.0;
    }
    Ok(RieszWitness {
        trials: done,
        min_ratio,
        max_ratio,
    })
}

/// `Λ_j = Q_j T` with `{Q_j}` g-orthonormal.
#[derive(Debug, Clone)]
pub struct QtFactorization {
    pub q: GFrame,
    pub t: ComplexMatrix,
}

/// `T = S^{1/2}`, `Q_j = Λ_j S^{-1/2}` for a g-Riesz basis.
pub fn qt_factorize(f: &GFrame, tol: &Tolerances) -> Result<QtFactorization> {
    let report = classify(f, tol)?;
    if !report.is_riesz {
        return Err(Error::NotRieszBasis);
    }
    let op = gframe::frame_operator(f)?;
    let t = linalg::spd_power_from_eig(&op.spectrum, SpdPower::Sqrt, tol.frame)?;
    let q = duality::tight_transform(f, tol)?;
    Ok(QtFactorization { q, t })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiorthonormalityReport {
    pub passes: bool,
    /// Largest `‖Λ̃_{j₂} Λ_{j₁}*‖_F`, `j₁ ≠ j₂`.
    pub max_cross: f64,
    /// Largest `‖Λ̃_j Λ_j* − I‖_F`.
    pub max_diagonal_defect: f64,
}

/// Checks `Λ̃_{j₂} Λ_{j₁}* = δ_{j₁j₂} I`. Redundant frames are reported as
/// failing; families that are not frames at all are rejected.
pub fn biorthonormality_check(f: &GFrame, tol: &Tolerances) -> Result<BiorthonormalityReport> {
    let dual = match duality::canonical_dual(f, tol) {
        Ok(d) => d,
        Err(Error::NotAFrame { .. }) => return Err(Error::NotRieszBasis),
        Err(e) => return Err(e),
    };
    let mut max_cross = 0.0f64;
    let mut max_diagonal_defect = 0.0f64;
    for (i, a) in f.elements().iter().enumerate() {
        for (k, d) in dual.elements().iter().enumerate() {
            let p = d.block.matmul(&a.block.adjoint());
            if i == k {
                let defect = (&p - &ComplexMatrix::identity(p.rows())).frobenius_norm();
                max_diagonal_defect = max_diagonal_defect.max(defect);
            } else {
                max_cross = max_cross.max(p.frobenius_norm());
            }
        }
    }
    Ok(BiorthonormalityReport {
        passes: max_cross <= tol.orthonormal && max_diagonal_defect <= tol.orthonormal,
        max_cross,
        max_diagonal_defect,
    })
}
