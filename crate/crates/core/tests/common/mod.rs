//! Seeded instance families and independent oracles shared by the integration tests.

#![allow(dead_code)]

use gframekit::generators::{
    self, gaussian_matrix, gaussian_vector, random_gframe, random_riesz_basis, rng, GroupingSpec,
};
use gframekit::gframe::{frame_operator_matrix, Element};
use gframekit::linalg::{self, ComplexMatrix, C64};
use gframekit::GFrame;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub const MAX_DIM: usize = 16;
pub const MAX_ELEMENTS: usize = 10;
pub const MAX_BLOCK: usize = 6;

pub fn rel_err(y: &[C64], x: &[C64]) -> f64 {
    linalg::norm(&linalg::sub_vec(y, x)) / linalg::norm(x).max(f64::MIN_POSITIVE)
}

fn conditioning(r: &mut impl Rng, n: usize, max_log10: f64) -> f64 {
    if n == 1 {
        1.0
    } else {
        10f64.powf(r.random_range(0.0..max_log10))
    }
}

/// Element dimensions in `1..=6`, at most ten of them, summing to at least `min_total`.
fn dims_at_least(r: &mut impl Rng, min_total: usize) -> Vec<usize> {
    let lo = min_total.div_ceil(MAX_BLOCK).max(1);
    loop {
        let k = r.random_range(lo..=MAX_ELEMENTS);
        let dims: Vec<usize> = (0..k).map(|_| r.random_range(1..=MAX_BLOCK)).collect();
        if dims.iter().sum::<usize>() >= min_total {
            return dims;
        }
    }
}

/// Element dimensions summing to exactly `total` (at most ten parts of size ≤ 6).
fn dims_exactly(r: &mut impl Rng, total: usize) -> Vec<usize> {
    let mut dims = Vec::new();
    let mut rem = total;
    while rem > 0 {
        let slots = MAX_ELEMENTS - dims.len();
        let lo = rem.div_ceil(slots).max(1);
        let hi = rem.min(MAX_BLOCK);
        let m = r.random_range(lo..=hi);
        dims.push(m);
        rem -= m;
    }
    dims
}

pub fn split_rows(n: usize, m: &ComplexMatrix, dims: &[usize]) -> GFrame {
    let mut start = 0;
    let blocks = dims
        .iter()
        .map(|&d| {
            let b = m.row_block(start, d);
            start += d;
            b
        })
        .collect();
    GFrame::from_blocks(n, blocks).unwrap()
}

/// A g-frame with random dimensions and bounds ratio up to 10³.
pub fn random_frame(seed: u64) -> GFrame {
    let mut r = rng(seed ^ 0x9e37_79b9);
    let n = r.random_range(1..=MAX_DIM);
    let dims = dims_at_least(&mut r, n);
    let kappa = conditioning(&mut r, n, 3.0);
    random_gframe(n, &dims, seed, kappa).unwrap()
}

/// A g-frame whose synthesis map has a non-trivial kernel.
pub fn redundant_frame(seed: u64) -> GFrame {
    let mut r = rng(seed ^ 0x7f4a_7c15);
    let n = r.random_range(1..=MAX_DIM);
    let dims = dims_at_least(&mut r, n + 1);
    let kappa = conditioning(&mut r, n, 3.0);
    random_gframe(n, &dims, seed, kappa).unwrap()
}

pub fn riesz_basis(seed: u64) -> GFrame {
    let mut r = rng(seed ^ 0x2545_f491);
    let n = r.random_range(1..=MAX_DIM);
    let dims = dims_exactly(&mut r, n);
    let kappa = conditioning(&mut r, n, 3.0);
    split_rows(n, &random_riesz_basis(&mut r, n, kappa), &dims)
}

fn orthonormal_basis(r: &mut impl Rng) -> GFrame {
    let n = r.random_range(1..=MAX_DIM);
    let dims = dims_exactly(r, n);
    split_rows(n, &generators::random_unitary(r, n), &dims)
}

/// Gaussian blocks whose dimensions sum to less than `n`.
fn too_few_rows(r: &mut impl Rng) -> GFrame {
    let n = r.random_range(2..=MAX_DIM);
    let total = r.random_range(1..n);
    let dims = dims_exactly(r, total);
    let blocks = dims.iter().map(|&m| gaussian_matrix(r, m, n)).collect();
    GFrame::from_blocks(n, blocks).unwrap()
}

/// Enough rows, but every block annihilates one fixed direction.
fn missing_direction(r: &mut impl Rng) -> GFrame {
    let n = r.random_range(2..=MAX_DIM);
    let dims = dims_at_least(r, n);
    let v = gaussian_vector(r, n);
    let nv = linalg::norm(&v);
    let p = ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        C64::new(id, 0.0) - v[i] * v[j].conj() / (nv * nv)
    });
    let blocks = dims.iter().map(|&m| gaussian_matrix(r, m, n).matmul(&p)).collect();
    GFrame::from_blocks(n, blocks).unwrap()
}

fn partition(r: &mut impl Rng) -> GFrame {
    let n = r.random_range(2..=12);
    let k = r.random_range(1..=MAX_ELEMENTS);
    let mut all: Vec<usize> = (1..=n).collect();
    let subsets: Vec<Vec<usize>> = (0..k)
        .map(|_| {
            all.shuffle(r);
            let size = r.random_range(1..=n.min(MAX_BLOCK));
            let mut s = all[..size].to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    generators::from_partition_projections(n, &subsets).unwrap()
}

fn grouped(r: &mut impl Rng, seed: u64) -> GFrame {
    loop {
        let n = r.random_range(2..=MAX_DIM);
        let strides: Vec<usize> = (1..=MAX_BLOCK.min(n))
            .filter(|s| n % s == 0 && n / s <= MAX_ELEMENTS)
            .collect();
        let Some(&stride) = strides.choose(r) else { continue };
        let overlap = r.random_range(0..=2usize.min(MAX_BLOCK - stride));
        let group = stride + overlap;
        if group > n {
            continue;
        }
        let padding = r.random_range(0..=MAX_BLOCK - group);
        let spec = GroupingSpec {
            n,
            group,
            overlap,
            padding,
            seed: Some(seed),
            condition: conditioning(r, n, 2.0),
        };
        return generators::grouped_riesz(&spec).unwrap();
    }
}

/// A g-Riesz basis plus one extra element that repeats the functionals of the
/// first one, so only the first and the extra element are removable.
fn riesz_plus_echo(seed: u64) -> GFrame {
    let f = riesz_basis(seed);
    let mut r = rng(seed ^ 0x51_7cc1);
    let first = &f.elements()[0];
    let m = first.dim_v();
    let c = gaussian_matrix(&mut r, m, m);
    let mut elements = f.elements().to_vec();
    elements.push(Element {
        index: f.indices().into_iter().max().unwrap() + 1,
        block: c.matmul(&first.block),
    });
    if elements.len() > MAX_ELEMENTS {
        return f;
    }
    GFrame::new(f.dim_u(), elements).unwrap()
}

/// Frames, Riesz and orthonormal bases, incomplete families and structured
/// examples, cycling with the seed.
pub fn mixed_instance(seed: u64) -> GFrame {
    let mut r = rng(seed ^ 0x1234_5678);
    match seed % 6 {
        0 => random_frame(seed),
        1 => riesz_basis(seed),
        2 => orthonormal_basis(&mut r),
        3 => {
            if seed % 12 == 3 {
                too_few_rows(&mut r)
            } else {
                missing_direction(&mut r)
            }
        }
        4 => partition(&mut r),
        _ => {
            if seed % 12 == 5 {
                grouped(&mut r, seed)
            } else {
                riesz_plus_echo(seed)
            }
        }
    }
}

/// `r − M (M*M)⁻¹ M* r` by linear solves, with one refinement pass.
pub fn null_space_projection(f: &GFrame, r: &[C64]) -> Vec<C64> {
    let m = f.stacked();
    let s = m.adjoint_matmul(&m);
    let project = |v: &[C64]| {
        let rhs = ComplexMatrix::from_columns(f.dim_u(), &[m.adjoint_mul_vec(v)]).unwrap();
        let y = linalg::solve(&s, &rhs).unwrap().column(0);
        linalg::sub_vec(v, &m.mul_vec(&y))
    };
    project(&project(r))
}

/// Minimizes `Σ ⟨B_j u_j, u_j⟩` subject to `Σ Λ_j* u_j = u` through the dense
/// saddle-point system `[[B, −M], [M*, 0]]`.
pub fn kkt_infimum(f: &GFrame, forms: &[(i64, ComplexMatrix)], u: &[C64]) -> f64 {
    let n = f.dim_u();
    let d = f.dim_sum();
    let m = f.stacked();
    let mut k = ComplexMatrix::zeros(d + n, d + n);
    let mut offset = 0;
    for e in f.elements() {
        let b = &forms.iter().find(|(i, _)| *i == e.index).unwrap().1;
        for i in 0..e.dim_v() {
            for j in 0..e.dim_v() {
                k[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += e.dim_v();
    }
    for i in 0..d {
        for j in 0..n {
            k[(i, d + j)] = -m[(i, j)];
            k[(d + j, i)] = m[(i, j)].conj();
        }
    }
    let mut rhs = vec![C64::new(0.0, 0.0); d + n];
    rhs[d..].copy_from_slice(u);
    let sol = linalg::solve(&k, &ComplexMatrix::from_columns(d + n, &[rhs]).unwrap())
        .unwrap()
        .column(0);
    let g = &sol[..d];
    let mut value = 0.0;
    let mut offset = 0;
    for e in f.elements() {
        let b = &forms.iter().find(|(i, _)| *i == e.index).unwrap().1;
        let gj = &g[offset..offset + e.dim_v()];
        value += linalg::inner(&b.mul_vec(gj), gj).re;
        offset += e.dim_v();
    }
    value
}

/// A non-canonical dual: stacked `M S⁻¹ + (I − M S⁻¹ M*) Z` for Gaussian `Z`.
pub fn alternate_dual(f: &GFrame, r: &mut impl Rng) -> GFrame {
    let n = f.dim_u();
    let m = f.stacked();
    let s = frame_operator_matrix(f);
    let s_inv = linalg::solve(&s, &ComplexMatrix::identity(n)).unwrap();
    let canon = m.matmul(&s_inv);
    let z = gaussian_matrix(r, f.dim_sum(), n);
    let proj = &ComplexMatrix::identity(f.dim_sum()) - &canon.matmul(&m.adjoint());
    let stacked = &canon + &proj.matmul(&z);
    let mut start = 0;
    let elements = f
        .elements()
        .iter()
        .map(|e| {
            let block = stacked.row_block(start, e.dim_v());
            start += e.dim_v();
            Element {
                index: e.index,
                block,
            }
        })
        .collect();
    GFrame::new(n, elements).unwrap()
}
