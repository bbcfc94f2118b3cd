//! Removing one element from a g-frame.
//!
//! With `T₀ = Λ̃_{j₀} Λ_{j₀}* = Λ_{j₀} S⁻¹ Λ_{j₀}*` (Hermitian, spectrum in
//! `[0, 1]`), the reduced family loses completeness exactly when `T₀` has the
//! eigenvalue 1, and is otherwise still a g-frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gframe::{self, FrameBounds, GFrame};
use crate::linalg::{self, SpdPower, C64};
use crate::par;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NotGComplete,
    StillGFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `g₀` with `Λ̃_{j₀} Λ_{j₀}* g₀ = g₀`.
    Eigenvector(Vec<C64>),
    /// `min |λ − 1|` over the spectrum of `T₀`.
    SpectralGap(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalVerdict {
    pub removed_index: i64,
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub new_bounds: Option<FrameBounds>,
    /// Spectrum of `T₀`, ascending.
    pub t0_spectrum: Vec<f64>,
    /// Gap to 1 lies between the detection threshold and the ill-conditioning band.
    pub ill_conditioned: bool,
}

/// The family without element `j0`; the others keep their order.
pub fn remove_element(f: &GFrame, j0: i64) -> Result<GFrame> {
    if f.position(j0).is_none() {
        return Err(Error::UnknownIndex(j0));
    }
    let elements = f.elements().iter().filter(|e| e.index != j0).cloned().collect();
    GFrame::new(f.dim_u(), elements)
}

pub fn classify_removal(f: &GFrame, j0: i64, tol: &Tolerances) -> Result<RemovalVerdict> {
    let pos = f.position(j0).ok_or(Error::UnknownIndex(j0))?;
    let op = gframe::require_frame(f, tol)?;
    let inv = linalg::spd_power_from_eig(&op.spectrum, SpdPower::Inverse, tol.frame)?;
    removal_with_inverse(f, pos, &inv, tol)
}

fn removal_with_inverse(
    f: &GFrame,
    pos: usize,
    s_inv: &linalg::ComplexMatrix,
    tol: &Tolerances,
) -> Result<RemovalVerdict> {
    let element = &f.elements()[pos];
    let block = &element.block;
    let t0 = block.matmul(s_inv).matmul(&block.adjoint()).hermitian_part();
    let eig = linalg::herm_eig(&t0)?;
    // T₀ on a zero-dimensional space: I − T₀ is trivially invertible
    let (gap, nearest) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| ((l - 1.0).abs(), k))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((1.0, usize::MAX));

    if gap <= tol.eigen_one {
        return Ok(RemovalVerdict {
            removed_index: element.index,
            verdict: Verdict::NotGComplete,
            certificate: Certificate::Eigenvector(eig.eigenvectors.column(nearest)),
            new_bounds: None,
            t0_spectrum: eig.eigenvalues,
            ill_conditioned: false,
        });
    }
    let reduced = remove_element(f, element.index)?;
    let new_bounds = gframe::optimal_bounds(&reduced)?;
    Ok(RemovalVerdict {
        removed_index: element.index,
        verdict: Verdict::StillGFrame,
        certificate: Certificate::SpectralGap(gap),
        new_bounds: Some(new_bounds),
        t0_spectrum: eig.eigenvalues,
        ill_conditioned: gap < tol.ill_conditioned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exactness {
    pub exact: bool,
    pub verdicts: Vec<RemovalVerdict>,
}

/// Exact when every single removal destroys completeness. Verdicts are
/// computed per index (in parallel when enabled) and kept in element order.
pub fn exactness(f: &GFrame, tol: &Tolerances) -> Result<Exactness> {
    let op = gframe::require_frame(f, tol)?;
    let inv = linalg::spd_power_from_eig(&op.spectrum, SpdPower::Inverse, tol.frame)?;
    let verdicts = par::map_range(f.len(), |pos| removal_with_inverse(f, pos, &inv, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Exactness {
        exact: verdicts.iter().all(|v| v.verdict == Verdict::NotGComplete),
        verdicts,
    })
}
