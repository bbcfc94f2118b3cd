//! Deterministic constructors for example families and seeded random instances.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gframe::{self, Element, GFrame};
use crate::induced::VectorFrame;
use crate::linalg::{self, ComplexMatrix, SpdPower, C64};
use crate::tol::Tolerances;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entries.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    gaussian_matrix(rng, n, 1).column(0)
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let r = linalg::inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= r * qi;
                }
            }
        }
        let nv = linalg::norm(&v);
        cols.push(linalg::scale_vec(&v, C64::new(1.0 / nv, 0.0)));
    }
    ComplexMatrix::from_columns(n, &cols).expect("columns have length n")
}

/// `U diag(σ) V*` with σ log-spaced between 1 and `sqrt(condition)`.
pub fn random_riesz_basis(rng: &mut impl Rng, n: usize, condition: f64) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let sigma = log_spaced(n, condition.sqrt());
    u.matmul(&ComplexMatrix::from_real_diag(&sigma)).matmul(&v.adjoint())
}

fn log_spaced(n: usize, top: f64) -> Vec<f64> {
    if n <= 1 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|k| top.powf(k as f64 / (n - 1) as f64))
        .collect()
}

pub fn identity_frame(n: usize) -> GFrame {
    GFrame::from_blocks(n, vec![ComplexMatrix::identity(n)]).expect("valid identity frame")
}

/// Three unit vectors of ℝ² at 90°, 210° and 330°, as rank-one functionals.
pub fn mercedes_benz() -> GFrame {
    let vectors: Vec<Vec<C64>> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let t = deg.to_radians();
            vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]
        })
        .collect();
    from_vector_frame(&VectorFrame::from_vectors(2, vectors).expect("vectors in ℝ²"))
        .expect("non-empty")
}

/// One 1×n element `x ↦ ⟨x, f_k⟩` per vector.
///
/// Element indices are the vectors' `j` labels when every label has `k = 0`
/// and the `j`s are distinct, otherwise `1..=N`.
pub fn from_vector_frame(vectors: &VectorFrame) -> Result<GFrame> {
    if vectors.is_empty() {
        return Err(Error::DimensionMismatch("vector frame is empty".into()));
    }
    let labels = vectors.labels();
    let keep = labels.iter().all(|&(_, k)| k == 0) && {
        let mut js: Vec<i64> = labels.iter().map(|&(j, _)| j).collect();
        js.sort_unstable();
        js.windows(2).all(|w| w[0] != w[1])
    };
    let elements = vectors
        .vectors()
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (v, (j, _)))| Element {
            index: if keep { *j } else { i as i64 + 1 },
            block: ComplexMatrix::row_vector(&v.iter().map(|z| z.conj()).collect::<Vec<_>>()),
        })
        .collect();
    GFrame::new(vectors.dim(), elements)
}

/// Coordinate selections `x ↦ x|_{X_j}` for 1-based subsets of `{1..n}`.
pub fn from_partition_projections(n: usize, subsets: &[Vec<usize>]) -> Result<GFrame> {
    let mut blocks = Vec::with_capacity(subsets.len());
    for set in subsets {
        let mut block = ComplexMatrix::zeros(set.len(), n);
        for (r, &i) in set.iter().enumerate() {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            block[(r, i - 1)] = linalg::ONE;
        }
        blocks.push(block);
    }
    GFrame::from_blocks(n, blocks)
}

/// A single invertible operator viewed as a one-element g-frame.
pub fn from_operator(m: &ComplexMatrix, tol: &Tolerances) -> Result<GFrame> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let rank = linalg::numerical_rank(m, tol.rank);
    if rank < m.cols() {
        return Err(Error::SingularOperator {
            rank,
            dim: m.cols(),
        });
    }
    GFrame::from_blocks(m.cols(), vec![m.clone()])
}

/// Cyclic groups of analysis functionals of a Riesz basis `{φ_k}` of ℂⁿ.
///
/// Element `j` maps `x` to `(⟨x, φ_{js}⟩, …, ⟨x, φ_{js+group-1}⟩, 0, …, 0)` with
/// stride `s = group − overlap`, indices mod n, followed by `padding` zero rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingSpec {
    pub n: usize,
    pub group: usize,
    pub overlap: usize,
    pub padding: usize,
    /// `None` uses the standard basis.
    pub seed: Option<u64>,
    /// Condition number of the Gram matrix of the random basis.
    pub condition: f64,
}

pub fn grouped_riesz(spec: &GroupingSpec) -> Result<GFrame> {
    let GroupingSpec {
        n,
        group,
        overlap,
        padding,
        ..
    } = *spec;
    if n == 0 || group == 0 {
        return Err(Error::InvalidGrouping("dimension and group size must be positive".into()));
    }
    if overlap >= group {
        return Err(Error::InvalidGrouping(format!(
            "overlap {overlap} must be smaller than the group size {group}"
        )));
    }
    if group > n {
        return Err(Error::InvalidGrouping(format!("group size {group} exceeds dimension {n}")));
    }
    let stride = group - overlap;
    if n % stride != 0 {
        return Err(Error::InvalidGrouping(format!(
            "stride {stride} does not divide {n}, so the groups do not close up cyclically"
        )));
    }
    if spec.condition.is_nan() || spec.condition < 1.0 {
        return Err(Error::InvalidGrouping("condition must be at least 1".into()));
    }
    let basis = match spec.seed {
        Some(seed) => random_riesz_basis(&mut rng(seed), n, spec.condition),
        None => ComplexMatrix::identity(n),
    };
    // rows of Φ* are the functionals ⟨·, φ_k⟩
    let analysis = basis.adjoint();
    let blocks = (0..n / stride)
        .map(|j| {
            ComplexMatrix::from_fn(group + padding, n, |r, c| {
                if r < group {
                    analysis[((j * stride + r) % n, c)]
                } else {
                    linalg::ZERO
                }
            })
        })
        .collect();
    GFrame::from_blocks(n, blocks)
}

/// Finite cyclic Gabor system on ℂ^L grouped by time shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborSpec {
    pub length: usize,
    pub time_step: usize,
    pub freq_step: usize,
    pub window: Vec<C64>,
}

/// The modulated translate `g(· − t) e^{2πi m b · / L}`.
pub fn gabor_atom(spec: &GaborSpec, shift: usize, modulation: usize) -> Vec<C64> {
    let l = spec.length;
    (0..l)
        .map(|k| {
            let w = spec.window[(k + l - shift % l) % l];
            let phase = 2.0 * PI * (modulation * spec.freq_step * k % l) as f64 / l as f64;
            w * C64::from_polar(1.0, phase)
        })
        .collect()
}

/// Element `t` (one per shift `t·a`) has the rows `⟨·, g_{ta, mb}⟩`, `m = 0..L/b`.
pub fn discrete_gabor(spec: &GaborSpec) -> Result<GFrame> {
    let l = spec.length;
    let (a, b) = (spec.time_step, spec.freq_step);
    if l == 0 || a == 0 || b == 0 || !l.is_multiple_of(a) || !l.is_multiple_of(b) {
        return Err(Error::InvalidLattice(format!(
            "time step {a} and frequency step {b} must divide the length {l}"
        )));
    }
    if spec.window.len() != l {
        return Err(Error::InvalidLattice(format!(
            "window has length {}, expected {l}",
            spec.window.len()
        )));
    }
    let elements = (0..l / a)
        .map(|t| {
            let rows: Vec<Vec<C64>> = (0..l / b)
                .map(|m| gabor_atom(spec, t * a, m).iter().map(|z| z.conj()).collect())
                .collect();
            Element {
                index: t as i64,
                block: ComplexMatrix::from_fn(rows.len(), l, |i, k| rows[i][k]),
            }
        })
        .collect();
    GFrame::new(l, elements)
}

/// Random g-frame with element dimensions `dims` and bound ratio `conditioning`.
///
/// A Gaussian stacked matrix is made Parseval and then composed with
/// `V diag(s) V*`, `s²` log-spaced on `[1, conditioning]`.
pub fn random_gframe(n: usize, dims: &[usize], seed: u64, conditioning: f64) -> Result<GFrame> {
    let total: usize = dims.iter().sum();
    if n == 0 {
        return Err(Error::InfeasibleSpec("dimension must be positive".into()));
    }
    if total < n {
        return Err(Error::InfeasibleSpec(format!(
            "element dimensions sum to {total} < {n}; no frame exists"
        )));
    }
    if !conditioning.is_finite() || conditioning < 1.0 {
        return Err(Error::InfeasibleSpec(format!(
            "conditioning must be a finite ratio ≥ 1, got {conditioning}"
        )));
    }
    if n == 1 && conditioning != 1.0 {
        return Err(Error::InfeasibleSpec("a frame of ℂ¹ always has ratio 1".into()));
    }
    let mut rng = rng(seed);
    let blocks: Vec<ComplexMatrix> = dims.iter().map(|&m| gaussian_matrix(&mut rng, m, n)).collect();
    let raw = GFrame::from_blocks(n, blocks)?;
    let s = gframe::frame_operator_matrix(&raw);
    let inv_sqrt = linalg::spd_power(&s, SpdPower::InvSqrt, 1e-12)
        .map_err(|_| Error::InfeasibleSpec("random draw was rank deficient".into()))?;
    let v = random_unitary(&mut rng, n);
    let shape = v
        .matmul(&ComplexMatrix::from_real_diag(&log_spaced(n, conditioning.sqrt())))
        .matmul(&v.adjoint());
    Ok(raw.compose_right(&inv_sqrt.matmul(&shape)))
}

/// Serializable description of any generator output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Identity { dim: usize },
    MercedesBenz,
    Partition { dim: usize, sets: Vec<Vec<usize>> },
    Grouped(GroupingSpec),
    Gabor(GaborSpec),
    Random { dim: usize, dims: Vec<usize>, seed: u64, conditioning: f64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<GFrame> {
        match self {
            GeneratorSpec::Identity { dim } => {
                if *dim == 0 {
                    return Err(Error::InfeasibleSpec("dimension must be positive".into()));
                }
                Ok(identity_frame(*dim))
            }
            GeneratorSpec::MercedesBenz => Ok(mercedes_benz()),
            GeneratorSpec::Partition { dim, sets } => from_partition_projections(*dim, sets),
            GeneratorSpec::Grouped(spec) => grouped_riesz(spec),
            GeneratorSpec::Gabor(spec) => discrete_gabor(spec),
            GeneratorSpec::Random {
                dim,
                dims,
                seed,
                conditioning,
            } => random_gframe(*dim, dims, *seed, *conditioning),
        }
    }
}
