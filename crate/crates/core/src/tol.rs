use serde::{Deserialize, Serialize};

/// Thresholds used by the predicates in this crate. All are relative unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `rank · σ_max` count as zero.
    pub rank: f64,
    /// A family is a g-frame when `λ_min(S) > frame · λ_max(S)`.
    pub frame: f64,
    /// Tight when `(B − A) / B` is at most this.
    pub tight: f64,
    /// Unitarity residual for orthonormal bases and ONB choices.
    pub orthonormal: f64,
    /// Normalized residual `‖Σ Λ_j* Γ_j − I‖_F / √n` accepted for a dual pair.
    pub dual: f64,
    /// Relative residual for `Σ Λ_j* g_j = x`.
    pub representation: f64,
    /// Absolute distance of an eigenvalue of `Λ̃_j Λ_j*` to 1 that certifies incompleteness.
    pub eigen_one: f64,
    /// Removal gaps below this (but above `eigen_one`) are flagged as ill-conditioned.
    pub ill_conditioned: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            frame: 1e-10,
            tight: 1e-8,
            orthonormal: 1e-9,
            dual: 1e-9,
            representation: 1e-9,
            eigen_one: 1e-8,
            ill_conditioned: 1e-6,
        }
    }
}

impl Tolerances {
    /// Defaults with the rank and frame thresholds replaced by `base`.
    pub fn with_base(base: f64) -> Self {
        Self {
            rank: base,
            frame: base,
            ..Self::default()
        }
    }
}
