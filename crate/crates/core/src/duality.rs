//! Canonical duals, the tight transform, reconstruction and minimal-norm coefficients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators;
use crate::gframe::{self, analyze, synthesize, CoefficientFamily, FrameBounds, GFrame};
use crate::linalg::{self, ComplexMatrix, SpdPower, C64};
use crate::tol::Tolerances;

/// Two g-frames with `Σ Λ_j* Γ_j = I`.
#[derive(Debug, Clone)]
pub struct DualPair {
    primal: GFrame,
    dual: GFrame,
}

impl DualPair {
    /// Accepts any pair satisfying the resolution of the identity.
    pub fn new(primal: GFrame, dual: GFrame, tol: &Tolerances) -> Result<Self> {
        let check = verify_dual_pair(&primal, &dual, tol)?;
        if !check.is_dual {
            return Err(Error::NotDualPair {
                residual: check.residual,
            });
        }
        Ok(Self { primal, dual })
    }

    /// `(f, canonical_dual(f))`.
    pub fn canonical(f: &GFrame, tol: &Tolerances) -> Result<Self> {
        let dual = canonical_dual(f, tol)?;
        Ok(Self {
            primal: f.clone(),
            dual,
        })
    }

    pub fn primal(&self) -> &GFrame {
        &self.primal
    }

    pub fn dual(&self) -> &GFrame {
        &self.dual
    }

    pub fn swapped(&self) -> Self {
        Self {
            primal: self.dual.clone(),
            dual: self.primal.clone(),
        }
    }

    /// Whether `Γ_j = Λ_j S⁻¹` within the dual tolerance.
    pub fn is_canonical(&self, tol: &Tolerances) -> Result<bool> {
        let canon = canonical_dual(&self.primal, tol)?;
        let num: f64 = self
            .dual
            .elements()
            .iter()
            .zip(canon.elements())
            .map(|(a, b)| (&a.block - &b.block).frobenius_norm().powi(2))
            .sum();
        let den: f64 = canon.elements().iter().map(|e| e.block.frobenius_norm().powi(2)).sum();
        Ok(num.sqrt() <= tol.dual * den.sqrt().max(1.0))
    }
}

/// `Λ̃_j = Λ_j S⁻¹`.
pub fn canonical_dual(f: &GFrame, tol: &Tolerances) -> Result<GFrame> {
    let op = gframe::require_frame(f, tol)?;
    let inv = linalg::spd_power_from_eig(&op.spectrum, SpdPower::Inverse, tol.frame)?;
    Ok(f.compose_right(&inv))
}

/// `Q_j = Λ_j S^{-1/2}`, a Parseval g-frame.
pub fn tight_transform(f: &GFrame, tol: &Tolerances) -> Result<GFrame> {
    let op = gframe::require_frame(f, tol)?;
    let inv_sqrt = linalg::spd_power_from_eig(&op.spectrum, SpdPower::InvSqrt, tol.frame)?;
    Ok(f.compose_right(&inv_sqrt))
}

/// Which family analyses and which synthesizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionOrder {
    /// `Σ Λ_j* Γ_j x`
    PrimalSynthesis,
    /// `Σ Γ_j* Λ_j x`
    DualSynthesis,
}

pub fn reconstruct(p: &DualPair, x: &[C64], order: ExpansionOrder) -> Result<Vec<C64>> {
    let (analysis, synthesis) = match order {
        ExpansionOrder::PrimalSynthesis => (&p.dual, &p.primal),
        ExpansionOrder::DualSynthesis => (&p.primal, &p.dual),
    };
    synthesize(synthesis, &analyze(analysis, x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCheck {
    pub is_dual: bool,
    /// `‖Σ Λ_j* Γ_j − I‖_F / √n`
    pub residual: f64,
}

pub fn verify_dual_pair(a: &GFrame, b: &GFrame, tol: &Tolerances) -> Result<DualCheck> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch(
            "dual pair candidates differ in space, labels or element dimensions".into(),
        ));
    }
    let n = a.dim_u();
    let mut sum = ComplexMatrix::zeros(n, n);
    for (x, y) in a.elements().iter().zip(b.elements()) {
        sum += &x.block.adjoint_matmul(&y.block);
    }
    let residual = if n == 0 {
        0.0
    } else {
        (&sum - &ComplexMatrix::identity(n)).frobenius_norm() / (n as f64).sqrt()
    };
    Ok(DualCheck {
        is_dual: residual <= tol.dual,
        residual,
    })
}

/// Both sides of `Σ‖g_j‖² = Σ‖Λ̃_j x‖² + Σ‖g_j − Λ̃_j x‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalNormReport {
    /// `Σ‖g_j‖²`
    pub lhs: f64,
    /// canonical energy plus correction
    pub rhs: f64,
    /// `Σ‖Λ̃_j x‖²`
    pub canonical_energy: f64,
    /// `Σ‖g_j − Λ̃_j x‖²`
    pub correction: f64,
    pub gap: f64,
}

pub fn minimal_norm_check(
    f: &GFrame,
    x: &[C64],
    g: &CoefficientFamily,
    tol: &Tolerances,
) -> Result<MinimalNormReport> {
    f.check_vector(x)?;
    let synth = synthesize(f, g)?;
    let residual = linalg::norm(&linalg::sub_vec(&synth, x)) / linalg::norm(x).max(1.0);
    if residual > tol.representation {
        return Err(Error::NotARepresentation { residual });
    }
    let canonical = analyze(&canonical_dual(f, tol)?, x)?;
    let lhs = g.energy();
    let canonical_energy = canonical.energy();
    let correction = g.sub(&canonical).energy();
    let rhs = canonical_energy + correction;
    Ok(MinimalNormReport {
        lhs,
        rhs,
        canonical_energy,
        correction,
        gap: (lhs - rhs).abs(),
    })
}

/// Canonical coefficients plus a seeded random vector from the kernel of the
/// synthesis map, so that `synthesize(f, result) = x`.
pub fn general_coefficients(
    f: &GFrame,
    x: &[C64],
    seed: u64,
    tol: &Tolerances,
) -> Result<CoefficientFamily> {
    let canonical = analyze(&canonical_dual(f, tol)?, x)?;
    let mut rng = generators::rng(seed);
    let scale = rng.random_range(0.5..2.0) * linalg::norm(&canonical.flatten()).max(1.0);
    let r = generators::gaussian_vector(&mut rng, f.dim_sum());
    let k = kernel_component(f, &r, tol)?;
    let nk = linalg::norm(&k);
    let k = if nk > 0.0 {
        linalg::scale_vec(&k, C64::new(scale / nk, 0.0))
    } else {
        k
    };
    Ok(canonical.add(&CoefficientFamily::from_flat(f, &k)?))
}

/// Projection of a flat coefficient vector onto `ker(synthesis)`:
/// `r − M S⁻¹ M* r` with `M` the stacked analysis matrix.
pub fn kernel_component(f: &GFrame, r: &[C64], tol: &Tolerances) -> Result<Vec<C64>> {
    let op = gframe::require_frame(f, tol)?;
    let inv = linalg::spd_power_from_eig(&op.spectrum, SpdPower::Inverse, tol.frame)?;
    let m = f.stacked();
    let range = m.mul_vec(&inv.mul_vec(&m.adjoint_mul_vec(r)));
    let mut k = linalg::sub_vec(r, &range);
    // second pass removes the rounding residue left in the range
    let again = m.mul_vec(&inv.mul_vec(&m.adjoint_mul_vec(&k)));
    k = linalg::sub_vec(&k, &again);
    Ok(k)
}

/// Bounds of the canonical dual predicted from those of `f`: `(1/B, 1/A)`.
pub fn predicted_dual_bounds(b: &FrameBounds) -> FrameBounds {
    FrameBounds {
        lower: 1.0 / b.upper,
        upper: 1.0 / b.lower,
    }
}
