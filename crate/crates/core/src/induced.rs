//! Induced vector sequences `u_{j,k} = Λ_j* e_{j,k}` and dual frames built from
//! a dual g-frame pair and local dual frames.

use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassificationReport, Spectral};
use crate::duality::DualPair;
use crate::error::{Error, Result};
use crate::gframe::{FrameBounds, GFrame};
use crate::linalg::{self, ComplexMatrix, SpdPower, C64};
use crate::par;
use crate::tol::Tolerances;

/// Ordered vectors of `ℂ^dim` with `(j, k)` provenance labels.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFrame {
    dim: usize,
    labels: Vec<(i64, usize)>,
    vectors: Vec<Vec<C64>>,
}

impl VectorFrame {
    /// Labels must be unique and ascending (by `j`, then `k`).
    pub fn new(dim: usize, labels: Vec<(i64, usize)>, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} vectors",
                labels.len(),
                vectors.len()
            )));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector {i} has length {}, expected {dim}",
                vectors[i].len()
            )));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch(
                "vector labels must be strictly ascending".into(),
            ));
        }
        Ok(Self {
            dim,
            labels,
            vectors,
        })
    }

    /// Labels vector `i` as `(i + 1, 0)`.
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<C64>>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| (i as i64 + 1, 0)).collect();
        Self::new(dim, labels, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn labels(&self) -> &[(i64, usize)] {
        &self.labels
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// The `dim × N` synthesis matrix with the vectors as columns.
    pub fn synthesis_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.len(), |i, j| self.vectors[j][i])
    }

    /// `Σ u u*`.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for v in &self.vectors {
            for i in 0..self.dim {
                let a = v[i];
                for j in 0..self.dim {
                    s[(i, j)] += a * v[j].conj();
                }
            }
        }
        s
    }
}

/// One unitary `m_j × m_j` matrix per element; its columns are `e_{j,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnbChoice {
    bases: Vec<ComplexMatrix>,
}

impl OnbChoice {
    pub fn new(bases: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        for (i, b) in bases.iter().enumerate() {
            if !b.is_square() {
                return Err(Error::NotUnitary {
                    index: i as i64,
                    residual: f64::INFINITY,
                });
            }
            let residual = classify::unitary_defect(&b.adjoint());
            if residual > tol.orthonormal {
                return Err(Error::NotUnitary {
                    index: i as i64,
                    residual,
                });
            }
        }
        Ok(Self { bases })
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }
}

/// `u_{j,k} = Λ_j* e_{j,k}`, ordered by element then `k`. Without an ONB the
/// standard basis is used and `u_{j,k}` is the conjugate of row `k` of `Λ_j`.
pub fn induced_sequence(f: &GFrame, onb: Option<&OnbChoice>) -> Result<VectorFrame> {
    if let Some(o) = onb {
        if o.bases.len() != f.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bases for {} elements",
                o.bases.len(),
                f.len()
            )));
        }
        for (e, b) in f.elements().iter().zip(&o.bases) {
            if b.rows() != e.dim_v() {
                return Err(Error::DimensionMismatch(format!(
                    "basis for element {} has size {}, expected {}",
                    e.index,
                    b.rows(),
                    e.dim_v()
                )));
            }
        }
    }
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by_key(|&i| f.elements()[i].index);
    let mut labels = Vec::with_capacity(f.dim_sum());
    let mut vectors = Vec::with_capacity(f.dim_sum());
    for i in order {
        let e = &f.elements()[i];
        let lifted = match onb {
            Some(o) => e.block.adjoint().matmul(&o.bases[i]),
            None => e.block.adjoint(),
        };
        for k in 0..e.dim_v() {
            labels.push((e.index, k));
            vectors.push(lifted.column(k));
        }
    }
    VectorFrame::new(f.dim_u(), labels, vectors)
}

/// Classification of an ordinary vector family through its synthesis matrix
/// `U`: frame data from `U U*`, Riesz bounds from the Gram matrix `U* U`.
pub fn classify_vectors(vf: &VectorFrame, tol: &Tolerances) -> Result<ClassificationReport> {
    let n = vf.dim();
    let u = vf.synthesis_matrix();
    let s = vf.frame_operator();
    let eig = linalg::herm_eig(&s)?;
    let bounds = FrameBounds {
        lower: eig.min().max(0.0),
        upper: eig.max().max(0.0),
    };
    let rank = linalg::numerical_rank(&u, tol.rank);
    let mut report = classify::report_from_spectral(&Spectral { rank, bounds }, n, vf.len(), tol);
    if report.is_riesz {
        let gram = u.adjoint_matmul(&u);
        let g = linalg::herm_eig(&gram.hermitian_part())?;
        report.riesz_bounds = Some(FrameBounds {
            lower: g.min(),
            upper: g.max(),
        });
        let defect = classify::unitary_defect(&u).max(classify::unitary_defect(&u.adjoint()));
        report.is_orthonormal = defect <= tol.orthonormal;
    }
    // for vector frames exactness coincides with being a Riesz basis
    report.is_exact = report.is_riesz;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub gframe: ClassificationReport,
    pub induced: ClassificationReport,
    /// Bessel, complete, frame, tight, Riesz and orthonormal flags coincide and
    /// bounds agree within tolerance.
    pub statuses_agree: bool,
    /// Largest entry of `|Σ u u* − S|`.
    pub operator_residual: f64,
    pub operators_agree: bool,
}

fn bounds_close(a: Option<FrameBounds>, b: Option<FrameBounds>, scale: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            (x.lower - y.lower).abs() <= 1e-9 * scale.max(1.0)
                && (x.upper - y.upper).abs() <= 1e-9 * scale.max(1.0)
        }
        _ => false,
    }
}

pub fn equivalence_report(
    f: &GFrame,
    onb: Option<&OnbChoice>,
    tol: &Tolerances,
) -> Result<EquivalenceReport> {
    let gframe = classify::classify(f, tol)?;
    let seq = induced_sequence(f, onb)?;
    let induced = classify_vectors(&seq, tol)?;
    let s = crate::gframe::frame_operator_matrix(f);
    let operator_residual = (&seq.frame_operator() - &s).max_abs();
    let scale = s.max_abs().max(1.0);
    let statuses_agree = gframe.is_bessel == induced.is_bessel
        && gframe.is_complete == induced.is_complete
        && gframe.is_frame == induced.is_frame
        && gframe.is_tight == induced.is_tight
        && gframe.is_riesz == induced.is_riesz
        && gframe.is_orthonormal == induced.is_orthonormal
        && bounds_close(gframe.frame_bounds, induced.frame_bounds, gframe.bessel_bound)
        && bounds_close(gframe.riesz_bounds, induced.riesz_bounds, gframe.bessel_bound);
    Ok(EquivalenceReport {
        gframe,
        induced,
        statuses_agree,
        operator_residual,
        operators_agree: operator_residual <= 1e-11 * scale,
    })
}

/// `Σ_k g̃_k g_k* = I` on `ℂ^m`, as the normalized Frobenius residual.
pub fn local_dual_residual(primal: &VectorFrame, dual: &VectorFrame) -> f64 {
    let m = primal.dim();
    let mut sum = ComplexMatrix::zeros(m, m);
    for (g, d) in primal.vectors().iter().zip(dual.vectors()) {
        for i in 0..m {
            for j in 0..m {
                sum[(i, j)] += d[i] * g[j].conj();
            }
        }
    }
    if m == 0 {
        return 0.0;
    }
    (&sum - &ComplexMatrix::identity(m)).frobenius_norm() / (m as f64).sqrt()
}

/// `({Λ_j* g_{j,k}}, {Γ_j* g̃_{j,k}})` from a dual g-frame pair and, per
/// element, a dual pair of frames of `ℂ^{m_j}`.
pub fn construct_dual_frames(
    p: &DualPair,
    local_primal: &[VectorFrame],
    local_dual: &[VectorFrame],
    tol: &Tolerances,
) -> Result<(VectorFrame, VectorFrame)> {
    let primal = p.primal();
    let dual = p.dual();
    let check = crate::duality::verify_dual_pair(primal, dual, tol)?;
    if !check.is_dual {
        return Err(Error::NotDualPair {
            residual: check.residual,
        });
    }
    if local_primal.len() != primal.len() || local_dual.len() != primal.len() {
        return Err(Error::DimensionMismatch(format!(
            "need one local frame pair per element ({}), got {} and {}",
            primal.len(),
            local_primal.len(),
            local_dual.len()
        )));
    }
    for ((e, lp), ld) in primal.elements().iter().zip(local_primal).zip(local_dual) {
        if lp.dim() != e.dim_v() || ld.dim() != e.dim_v() || lp.len() != ld.len() {
            return Err(Error::DimensionMismatch(format!(
                "local frames for element {} do not match its dimension {}",
                e.index,
                e.dim_v()
            )));
        }
        let residual = local_dual_residual(lp, ld);
        if residual > tol.dual {
            return Err(Error::LocalPairNotDual {
                index: e.index,
                residual,
            });
        }
    }

    let n = primal.dim_u();
    let lifted = par::map_range(primal.len(), |i| {
        let a = &primal.elements()[i];
        let b = &dual.elements()[i];
        let first: Vec<Vec<C64>> = local_primal[i].vectors().iter().map(|g| a.block.adjoint_mul_vec(g)).collect();
        let second: Vec<Vec<C64>> = local_dual[i].vectors().iter().map(|g| b.block.adjoint_mul_vec(g)).collect();
        (a.index, first, second)
    });
    let mut labels = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut sorted = lifted;
    sorted.sort_by_key(|t| t.0);
    for (j, a, b) in sorted {
        for (k, (x, y)) in a.into_iter().zip(b).enumerate() {
            labels.push((j, k));
            first.push(x);
            second.push(y);
        }
    }
    Ok((
        VectorFrame::new(n, labels.clone(), first)?,
        VectorFrame::new(n, labels, second)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalDualityReport {
    pub is_dual: bool,
    pub dual_residual: f64,
    pub is_canonical: bool,
    /// `max_i ‖second_i − S⁻¹ first_i‖ / max_i ‖S⁻¹ first_i‖`
    pub canonical_residual: f64,
}

pub fn canonical_duality_check(
    first: &VectorFrame,
    second: &VectorFrame,
    tol: &Tolerances,
) -> Result<CanonicalDualityReport> {
    if first.dim() != second.dim() || first.len() != second.len() {
        return Err(Error::DimensionMismatch(
            "vector frames differ in dimension or cardinality".into(),
        ));
    }
    let dual_residual = local_dual_residual(first, second);
    let s = first.frame_operator();
    let (is_canonical, canonical_residual) = match linalg::spd_power(&s, SpdPower::Inverse, tol.frame) {
        Ok(inv) => {
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for (a, b) in first.vectors().iter().zip(second.vectors()) {
                let c = inv.mul_vec(a);
                num = num.max(linalg::norm(&linalg::sub_vec(b, &c)));
                den = den.max(linalg::norm(&c));
            }
            let r = if den > 0.0 { num / den } else { num };
            (r <= 1e-8, r)
        }
        Err(Error::NotPositiveDefinite { .. }) => (false, f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok(CanonicalDualityReport {
        is_dual: dual_residual <= tol.dual,
        dual_residual,
        is_canonical,
        canonical_residual,
    })
}
