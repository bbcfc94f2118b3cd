//! The g-frame data model: analysis, synthesis, frame operator and bounds.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermEig, C64};
use crate::par;
use crate::tol::Tolerances;

/// One element `Λ_j : ℂⁿ → ℂ^{m_j}` of a g-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub index: i64,
    pub block: ComplexMatrix,
}

impl Element {
    pub fn dim_v(&self) -> usize {
        self.block.rows()
    }
}

/// Ordered finite family of operator blocks acting on `ℂ^dim_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct GFrame {
    dim_u: usize,
    elements: Vec<Element>,
}

impl GFrame {
    /// Checks that every block has `dim_u` columns and that labels are distinct.
    pub fn new(dim_u: usize, elements: Vec<Element>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(elements.len());
        for e in &elements {
            if e.block.cols() != dim_u {
                return Err(Error::DimensionMismatch(format!(
                    "element {} has {} columns, expected {dim_u}",
                    e.index,
                    e.block.cols()
                )));
            }
            if !seen.insert(e.index) {
                return Err(Error::DuplicateIndex(e.index));
            }
        }
        Ok(Self { dim_u, elements })
    }

    /// Labels the blocks `1, 2, …` in order.
    pub fn from_blocks(dim_u: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let elements = blocks
            .into_iter()
            .enumerate()
            .map(|(i, block)| Element {
                index: i as i64 + 1,
                block,
            })
            .collect();
        Self::new(dim_u, elements)
    }

    pub fn dim_u(&self) -> usize {
        self.dim_u
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn indices(&self) -> Vec<i64> {
        self.elements.iter().map(|e| e.index).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.elements.iter().map(Element::dim_v).collect()
    }

    /// `Σ m_j`.
    pub fn dim_sum(&self) -> usize {
        self.elements.iter().map(Element::dim_v).sum()
    }

    pub fn position(&self, index: i64) -> Option<usize> {
        self.elements.iter().position(|e| e.index == index)
    }

    pub fn block(&self, index: i64) -> Option<&ComplexMatrix> {
        self.elements.iter().find(|e| e.index == index).map(|e| &e.block)
    }

    /// All blocks stacked vertically: the `Σ m_j × n` analysis matrix.
    pub fn stacked(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(self.dim_u, self.elements.iter().map(|e| &e.block))
    }

    /// Same labels, each block replaced by `f(block)`.
    pub fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let elements: Vec<Element> = self
            .elements
            .iter()
            .map(|e| Element {
                index: e.index,
                block: f(&e.block),
            })
            .collect();
        let dim_u = elements.first().map_or(self.dim_u, |e| e.block.cols());
        Self::new(dim_u, elements)
    }

    /// Right-multiplies every block by `m` (n × n).
    pub fn compose_right(&self, m: &ComplexMatrix) -> Self {
        assert_eq!(m.rows(), self.dim_u, "operator must act on the frame's space");
        Self {
            dim_u: m.cols(),
            elements: self
                .elements
                .iter()
                .map(|e| Element {
                    index: e.index,
                    block: e.block.matmul(m),
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim_u: self.dim_u,
            elements: self
                .elements
                .iter()
                .map(|e| Element {
                    index: e.index,
                    block: e.block.scale_real(c),
                })
                .collect(),
        }
    }

    /// Whether `other` has the same space, labels and per-element dimensions.
    pub fn same_shape(&self, other: &GFrame) -> bool {
        self.dim_u == other.dim_u
            && self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.index == b.index && a.block.shape() == b.block.shape())
    }

    pub(crate) fn check_vector(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.dim_u {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, frame acts on dimension {}",
                x.len(),
                self.dim_u
            )));
        }
        Ok(())
    }
}

/// One coefficient vector `g_j ∈ ℂ^{m_j}` per element of a companion frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFamily {
    pub indices: Vec<i64>,
    pub coefficients: Vec<Vec<C64>>,
}

impl CoefficientFamily {
    pub fn zeros_like(f: &GFrame) -> Self {
        Self {
            indices: f.indices(),
            coefficients: f.dims().into_iter().map(|m| vec![linalg::ZERO; m]).collect(),
        }
    }

    /// `Σ ‖g_j‖²`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|g| linalg::norm_sqr(g)).sum()
    }

    /// Concatenation of all `g_j` in element order.
    pub fn flatten(&self) -> Vec<C64> {
        self.coefficients.iter().flatten().copied().collect()
    }

    /// Splits a flat vector according to the element dimensions of `f`.
    pub fn from_flat(f: &GFrame, flat: &[C64]) -> Result<Self> {
        if flat.len() != f.dim_sum() {
            return Err(Error::DimensionMismatch(format!(
                "flat coefficient vector has length {}, expected {}",
                flat.len(),
                f.dim_sum()
            )));
        }
        let mut offset = 0;
        let mut coefficients = Vec::with_capacity(f.len());
        for m in f.dims() {
            coefficients.push(flat[offset..offset + m].to_vec());
            offset += m;
        }
        Ok(Self {
            indices: f.indices(),
            coefficients,
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            indices: self.indices.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| linalg::sub_vec(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            indices: self.indices.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| linalg::add_vec(a, b))
                .collect(),
        }
    }

    pub fn is_compatible(&self, f: &GFrame) -> bool {
        self.indices == f.indices()
            && self
                .coefficients
                .iter()
                .zip(f.elements())
                .all(|(g, e)| g.len() == e.dim_v())
    }
}

/// Lower and upper frame bounds `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }

    pub fn is_frame(&self, tol: &Tolerances) -> bool {
        self.upper > 0.0 && self.lower > tol.frame * self.upper
    }
}

/// `S = Σ Λ_j* Λ_j` with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct FrameOperatorMatrix {
    pub s: ComplexMatrix,
    pub spectrum: HermEig,
}

impl FrameOperatorMatrix {
    pub fn bounds(&self) -> FrameBounds {
        FrameBounds {
            lower: self.spectrum.min().max(0.0),
            upper: self.spectrum.max().max(0.0),
        }
    }
}

/// `g_j = Λ_j x` for every element.
pub fn analyze(f: &GFrame, x: &[C64]) -> Result<CoefficientFamily> {
    f.check_vector(x)?;
    Ok(CoefficientFamily {
        indices: f.indices(),
        coefficients: f.elements().iter().map(|e| e.block.mul_vec(x)).collect(),
    })
}

/// `Σ_j Λ_j* g_j`.
pub fn synthesize(f: &GFrame, g: &CoefficientFamily) -> Result<Vec<C64>> {
    if !g.is_compatible(f) {
        return Err(Error::DimensionMismatch(
            "coefficient family does not match the frame's indices or dimensions".into(),
        ));
    }
    let mut out = vec![linalg::ZERO; f.dim_u()];
    for (e, gj) in f.elements().iter().zip(&g.coefficients) {
        for (o, v) in out.iter_mut().zip(e.block.adjoint_mul_vec(gj)) {
            *o += v;
        }
    }
    Ok(out)
}

/// `Σ_j Λ_j* Λ_j` summed in element order. The per-element products may be
/// computed in parallel; the sum is always taken sequentially.
pub fn frame_operator_matrix(f: &GFrame) -> ComplexMatrix {
    let n = f.dim_u();
    let terms = par::map(f.elements(), |e| e.block.adjoint_matmul(&e.block));
    let mut s = ComplexMatrix::zeros(n, n);
    for t in &terms {
        s += t;
    }
    s.hermitian_part()
}

pub fn frame_operator(f: &GFrame) -> Result<FrameOperatorMatrix> {
    let s = frame_operator_matrix(f);
    let spectrum = linalg::herm_eig(&s)?;
    Ok(FrameOperatorMatrix { s, spectrum })
}

/// Sharp bounds: the extreme eigenvalues of `S`.
pub fn optimal_bounds(f: &GFrame) -> Result<FrameBounds> {
    Ok(frame_operator(f)?.bounds())
}

/// `Σ ‖Λ_j x‖²`.
pub fn frame_energy(f: &GFrame, x: &[C64]) -> Result<f64> {
    Ok(analyze(f, x)?.energy())
}

/// Frame operator after checking the g-frame threshold.
pub(crate) fn require_frame(f: &GFrame, tol: &Tolerances) -> Result<FrameOperatorMatrix> {
    let op = frame_operator(f)?;
    let b = op.bounds();
    if f.dim_u() == 0 || !b.is_frame(tol) {
        return Err(Error::NotAFrame {
            lower: b.lower,
            upper: b.upper,
        });
    }
    Ok(op)
}
