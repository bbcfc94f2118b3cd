//! Stable space splittings.
//!
//! With lifts `R_j = Λ_j*` and local forms `b_j(u, v) = ⟨B_j u, v⟩`, the
//! splitting operator is `P = Σ Λ_j* B_j⁻¹ Λ_j` and
//! `inf { Σ b_j(u_j, u_j) : Σ Λ_j* u_j = u } = ⟨P⁻¹ u, u⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gframe::{self, CoefficientFamily, FrameBounds, GFrame};
use crate::linalg::{self, ComplexMatrix, HermEig, SpdPower, C64};
use crate::par;
use crate::tol::Tolerances;

/// SPD forms keyed by element index, with their spectral extremes `c1`, `c2`.
#[derive(Debug, Clone)]
pub struct BilinearFormFamily {
    forms: Vec<(i64, ComplexMatrix)>,
    inverses: Vec<ComplexMatrix>,
    c1: f64,
    c2: f64,
}

impl BilinearFormFamily {
    /// Rejects non-Hermitian or non-positive-definite forms, naming the index.
    pub fn new(forms: Vec<(i64, ComplexMatrix)>, tol: &Tolerances) -> Result<Self> {
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0f64;
        let mut inverses = Vec::with_capacity(forms.len());
        for (index, b) in &forms {
            let eig = match linalg::herm_eig(b) {
                Ok(e) => e,
                Err(Error::NotHermitian { .. }) | Err(Error::DimensionMismatch(_)) => {
                    return Err(Error::NotSpd { index: *index })
                }
                Err(e) => return Err(e),
            };
            if b.rows() > 0 {
                if eig.min() <= tol.frame * eig.max() || eig.min() <= 0.0 {
                    return Err(Error::NotSpd { index: *index });
                }
                c1 = c1.min(eig.min());
                c2 = c2.max(eig.max());
            }
            inverses.push(inverse_from(&eig, tol)?);
        }
        if c2 == 0.0 {
            c1 = 1.0;
            c2 = 1.0;
        }
        Ok(Self {
            forms,
            inverses,
            c1,
            c2,
        })
    }

    /// `B_j = c I` on every element of `f`.
    pub fn scaled_identity(f: &GFrame, c: f64, tol: &Tolerances) -> Result<Self> {
        let forms = f
            .elements()
            .iter()
            .map(|e| (e.index, ComplexMatrix::identity(e.dim_v()).scale_real(c)))
            .collect();
        Self::new(forms, tol)
    }

    pub fn forms(&self) -> &[(i64, ComplexMatrix)] {
        &self.forms
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Position of each element's form, matched by index.
    fn align(&self, f: &GFrame) -> Result<Vec<usize>> {
        if self.forms.len() != f.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} forms for {} elements",
                self.forms.len(),
                f.len()
            )));
        }
        f.elements()
            .iter()
            .map(|e| {
                let pos = self
                    .forms
                    .iter()
                    .position(|(j, _)| *j == e.index)
                    .ok_or(Error::UnknownIndex(e.index))?;
                let b = &self.forms[pos].1;
                if b.rows() != e.dim_v() {
                    return Err(Error::DimensionMismatch(format!(
                        "form {} is {}x{}, element has dimension {}",
                        e.index,
                        b.rows(),
                        b.cols(),
                        e.dim_v()
                    )));
                }
                Ok(pos)
            })
            .collect()
    }
}

fn inverse_from(eig: &HermEig, tol: &Tolerances) -> Result<ComplexMatrix> {
    if eig.eigenvalues.is_empty() {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    linalg::spd_power_from_eig(eig, SpdPower::Inverse, tol.frame)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingConstants {
    pub lower: f64,
    pub upper: f64,
}

/// `P = Σ Λ_j* B_j⁻¹ Λ_j`, summed in element order.
pub fn splitting_operator(
    f: &GFrame,
    forms: &BilinearFormFamily,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    Ok(splitting_spectrum(f, forms, tol)?.0)
}

fn splitting_spectrum(
    f: &GFrame,
    forms: &BilinearFormFamily,
    tol: &Tolerances,
) -> Result<(ComplexMatrix, HermEig)> {
    let align = forms.align(f)?;
    let n = f.dim_u();
    let terms = par::map_range(f.len(), |i| {
        let block = &f.elements()[i].block;
        block.adjoint_matmul(&forms.inverses[align[i]].matmul(block))
    });
    let mut p = ComplexMatrix::zeros(n, n);
    for t in &terms {
        p += t;
    }
    let p = p.hermitian_part();
    let eig = linalg::herm_eig(&p)?;
    if n == 0 || eig.max() <= 0.0 || eig.min() <= tol.frame * eig.max() {
        return Err(Error::SingularSplitting {
            lower: eig.min(),
            upper: eig.max(),
        });
    }
    Ok((p, eig))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingInfimum {
    pub value: f64,
    pub minimizer: CoefficientFamily,
}

/// Closed-form minimizer `u_j = B_j⁻¹ Λ_j P⁻¹ u` and value `⟨P⁻¹u, u⟩`.
pub fn splitting_infimum(
    f: &GFrame,
    forms: &BilinearFormFamily,
    u: &[C64],
    tol: &Tolerances,
) -> Result<SplittingInfimum> {
    f.check_vector(u)?;
    let (_, eig) = splitting_spectrum(f, forms, tol)?;
    let align = forms.align(f)?;
    let p_inv = eig.apply_fn(|x| 1.0 / x);
    let w = p_inv.mul_vec(u);
    let value = linalg::inner(&w, u).re;
    let coefficients = f
        .elements()
        .iter()
        .zip(&align)
        .map(|(e, &pos)| forms.inverses[pos].mul_vec(&e.block.mul_vec(&w)))
        .collect();
    Ok(SplittingInfimum {
        value,
        minimizer: CoefficientFamily {
            indices: f.indices(),
            coefficients,
        },
    })
}

/// `(1/λ_max(P), 1/λ_min(P))`: the extremes of the infimum over unit vectors.
pub fn splitting_constants(
    f: &GFrame,
    forms: &BilinearFormFamily,
    tol: &Tolerances,
) -> Result<SplittingConstants> {
    let (_, eig) = splitting_spectrum(f, forms, tol)?;
    Ok(SplittingConstants {
        lower: 1.0 / eig.max(),
        upper: 1.0 / eig.min(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub c1: f64,
    pub c2: f64,
    pub frame_bounds: FrameBounds,
    pub constants: SplittingConstants,
    /// `c1 / B`
    pub lower_bound: f64,
    /// `c2 / A`
    pub upper_bound: f64,
    pub holds: bool,
}

/// Checks `c1/B ≤ lower ≤ upper ≤ c2/A` with slack `1e-8 · c2/A`.
pub fn verify_sandwich(
    f: &GFrame,
    forms: &BilinearFormFamily,
    tol: &Tolerances,
) -> Result<SandwichReport> {
    let op = gframe::require_frame(f, tol)?;
    let frame_bounds = op.bounds();
    let constants = splitting_constants(f, forms, tol)?;
    let lower_bound = forms.c1 / frame_bounds.upper;
    let upper_bound = forms.c2 / frame_bounds.lower;
    let eps = 1e-8 * upper_bound;
    Ok(SandwichReport {
        c1: forms.c1,
        c2: forms.c2,
        frame_bounds,
        constants,
        lower_bound,
        upper_bound,
        holds: lower_bound - eps <= constants.lower && constants.upper <= upper_bound + eps,
    })
}
