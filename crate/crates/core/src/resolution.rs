//! Atomic resolutions of an operator `T` on ℂⁿ against a dual pair.

use serde::{Deserialize, Serialize};

use crate::duality::{self, DualPair};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::par;
use crate::tol::Tolerances;

/// Placement of the per-element product relative to `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `T Λ_j* Λ̃_j`
    TLambdaDual,
    /// `T Λ̃_j* Λ_j`
    TDualLambda,
    /// `Λ_j* Λ̃_j T`
    LambdaDualT,
    /// `Λ̃_j* Λ_j T`
    DualLambdaT,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::TLambdaDual,
        Variant::TDualLambda,
        Variant::LambdaDualT,
        Variant::DualLambdaT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::TLambdaDual => "t-lambda-dual",
            Variant::TDualLambda => "t-dual-lambda",
            Variant::LambdaDualT => "lambda-dual-t",
            Variant::DualLambdaT => "dual-lambda-t",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone)]
pub struct AtomicResolution {
    pub variant: Variant,
    pub indices: Vec<i64>,
    /// Element dimensions `m_j`, aligned with `atoms`.
    pub dims: Vec<usize>,
    pub atoms: Vec<ComplexMatrix>,
    /// `‖Σ atoms − T‖_F / max(1, ‖T‖_F)`
    pub residual: f64,
}

impl AtomicResolution {
    pub fn sum(&self) -> ComplexMatrix {
        let n = self.atoms.first().map_or(0, |a| a.rows());
        let mut s = ComplexMatrix::zeros(n, n);
        for a in &self.atoms {
            s += a;
        }
        s
    }
}

pub fn resolve(
    p: &DualPair,
    t: &ComplexMatrix,
    variant: Variant,
    tol: &Tolerances,
) -> Result<AtomicResolution> {
    let n = p.primal().dim_u();
    if t.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, pair acts on dimension {n}",
            t.rows(),
            t.cols()
        )));
    }
    let check = duality::verify_dual_pair(p.primal(), p.dual(), tol)?;
    if !check.is_dual {
        return Err(Error::NotDualPair {
            residual: check.residual,
        });
    }
    let primal = p.primal().elements();
    let dual = p.dual().elements();
    let atoms = par::map_range(primal.len(), |i| {
        let (lam, gam) = (&primal[i].block, &dual[i].block);
        match variant {
            Variant::TLambdaDual => t.matmul(&lam.adjoint_matmul(gam)),
            Variant::TDualLambda => t.matmul(&gam.adjoint_matmul(lam)),
            Variant::LambdaDualT => lam.adjoint_matmul(gam).matmul(t),
            Variant::DualLambdaT => gam.adjoint_matmul(lam).matmul(t),
        }
    });
    let mut res = AtomicResolution {
        variant,
        indices: p.primal().indices(),
        dims: p.primal().dims(),
        atoms,
        residual: 0.0,
    };
    res.residual = if n == 0 {
        0.0
    } else {
        (&res.sum() - t).frobenius_norm() / t.frobenius_norm().max(1.0)
    };
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub indices: Vec<i64>,
    pub ranks: Vec<usize>,
    /// Every atom has rank at most `m_j`.
    pub within_bounds: bool,
}

pub fn atom_rank_profile(r: &AtomicResolution, tol: &Tolerances) -> RankProfile {
    let ranks: Vec<usize> = r
        .atoms
        .iter()
        .map(|a| linalg::numerical_rank(a, tol.rank))
        .collect();
    let within_bounds = ranks.iter().zip(&r.dims).all(|(k, m)| k <= m);
    debug_assert!(within_bounds, "atom rank exceeds element dimension");
    RankProfile {
        indices: r.indices.clone(),
        ranks,
        within_bounds,
    }
}
