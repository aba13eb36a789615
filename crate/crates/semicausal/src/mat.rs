//! Dense complex matrices and tensor-leg bookkeeping.
//!
//! Everything downstream manipulates operators on tensor products of small
//! Hilbert spaces, so the primitive that matters most here is reindexing: a
//! composite index over legs of dimensions `d_0, d_1, …` is always row-major
//! (leg 0 slowest). [`permute_legs`] and [`partial_trace`] are the only
//! places such reindexing is written out; all higher modules go through them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Kronecker product, left factor slow.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// The matrix unit |i⟩⟨j| in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// All matrix units of dimension `d`, row-major: element `i·d + j` is |i⟩⟨j|.
pub fn matrix_units(d: usize) -> Vec<CMatrix> {
    let mut units = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            units.push(matrix_unit(d, i, j));
        }
    }
    units
}

/// Frobenius distance ‖a − b‖_F.
pub fn frob_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// ‖M − M†‖_F, zero exactly when `m` is Hermitian.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// First non-finite entry of `m`, if any.
pub fn non_finite_entry(m: &CMatrix) -> Option<(usize, usize)> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Splits a row-major composite index into per-leg digits.
pub fn split_index(idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    let mut rest = idx;
    for l in (0..dims.len()).rev() {
        digits[l] = rest % dims[l];
        rest /= dims[l];
    }
    digits
}

/// Joins per-leg digits into a row-major composite index.
pub fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (digit, d) in digits.iter().zip(dims) {
        idx = idx * d + digit;
    }
    idx
}

fn permuted_dims(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|&l| dims[l]).collect()
}

fn assert_valid_perm(dims: &[usize], perm: &[usize]) {
    assert_eq!(dims.len(), perm.len(), "permutation length must match leg count");
    let mut seen = vec![false; dims.len()];
    for &l in perm {
        assert!(l < dims.len() && !seen[l], "invalid leg permutation {perm:?}");
        seen[l] = true;
    }
}

/// Reorders the tensor legs of the row space of `m`.
///
/// Rows of `m` are composite over `row_dims`; the result's row at position
/// `p` carries old leg `perm[p]`. Columns are untouched, which is what the
/// Stinespring plumbing needs for rectangular `V: H_in → H_out ⊗ K`.
pub fn permute_rows(m: &CMatrix, row_dims: &[usize], perm: &[usize]) -> CMatrix {
    assert_valid_perm(row_dims, perm);
    let total: usize = row_dims.iter().product();
    assert_eq!(m.nrows(), total, "row count must match leg dimensions");
    let new_dims = permuted_dims(row_dims, perm);
    let mut out = zeros(m.nrows(), m.ncols());
    for old_row in 0..m.nrows() {
        let digits = split_index(old_row, row_dims);
        let new_digits: Vec<usize> = perm.iter().map(|&l| digits[l]).collect();
        let new_row = join_index(&new_digits, &new_dims);
        for c in 0..m.ncols() {
            out[(new_row, c)] = m[(old_row, c)];
        }
    }
    out
}

/// Reorders the tensor legs of a square operator, rows and columns together.
///
/// `m` acts on `H_0 ⊗ … ⊗ H_{k−1}` with `dims[l] = dim H_l`; the result acts
/// on `H_{perm[0]} ⊗ … ⊗ H_{perm[k−1]}` and represents the same operator.
/// Equivalently `P · m · P⁻¹` for the basis permutation `P` sending
/// `|i_0 … i_{k−1}⟩` to `|i_{perm[0]} … i_{perm[k−1]}⟩`.
pub fn permute_legs(m: &CMatrix, dims: &[usize], perm: &[usize]) -> CMatrix {
    assert_valid_perm(dims, perm);
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix must be square over the given legs");
    assert_eq!(m.ncols(), total, "matrix must be square over the given legs");
    let new_dims = permuted_dims(dims, perm);
    let mut out = zeros(total, total);
    for row in 0..total {
        let rd = split_index(row, dims);
        let new_row = join_index(&perm.iter().map(|&l| rd[l]).collect::<Vec<_>>(), &new_dims);
        for col in 0..total {
            let cd = split_index(col, dims);
            let new_col =
                join_index(&perm.iter().map(|&l| cd[l]).collect::<Vec<_>>(), &new_dims);
            out[(new_row, new_col)] = m[(row, col)];
        }
    }
    out
}

/// Traces out leg `traced` of a square operator over `dims`, keeping the
/// remaining legs in their original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], traced: usize) -> CMatrix {
    assert!(traced < dims.len(), "traced leg out of range");
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix must be square over the given legs");
    assert_eq!(m.ncols(), total, "matrix must be square over the given legs");
    let kept_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != traced)
        .map(|(_, &d)| d)
        .collect();
    let kept_total: usize = kept_dims.iter().product();
    let mut out = zeros(kept_total, kept_total);
    let insert = |kept: &[usize], t: usize| -> usize {
        let mut digits = Vec::with_capacity(dims.len());
        let mut k = 0;
        for l in 0..dims.len() {
            if l == traced {
                digits.push(t);
            } else {
                digits.push(kept[k]);
                k += 1;
            }
        }
        join_index(&digits, dims)
    };
    for row in 0..kept_total {
        let rk = split_index(row, &kept_dims);
        for col in 0..kept_total {
            let ck = split_index(col, &kept_dims);
            let mut acc = ZERO;
            for t in 0..dims[traced] {
                acc += m[(insert(&rk, t), insert(&ck, t))];
            }
            out[(row, col)] = acc;
        }
    }
    out
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// Returns `(values, vectors)` with `vectors` holding orthonormal
/// eigenvectors as columns, so `m ≈ vectors · diag(values) · vectors†`.
/// The caller is responsible for `m` being Hermitian; only the Hermitian
/// part enters the decomposition.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let decomp = herm.symmetric_eigen();
    let n = decomp.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[b].total_cmp(&decomp.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| decomp.eigenvalues[i]));
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| decomp.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Thin singular value decomposition `m = u · diag(s) · v_t`, singular
/// values sorted descending.
///
/// Uses a one-sided Jacobi iteration rather than the bidiagonalization
/// solver that ships with the linear algebra backend: the latter returns
/// factors with `u · diag(s) · v_t != m` for some complex rectangular
/// inputs. Jacobi is slower but self-correcting and keeps relative
/// accuracy on small singular values. Columns of `u` matching an exactly
/// zero singular value are zero, not an arbitrary basis completion.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, DVector<f64>, CMatrix) {
    if m.nrows() >= m.ncols() {
        let (u, s, v) = jacobi_svd_tall(m);
        (u, s, v.adjoint())
    } else {
        let (u, s, v) = jacobi_svd_tall(&m.adjoint());
        (v, s, u.adjoint())
    }
}

/// One-sided Jacobi body for `nrows >= ncols`; returns `(u, s, v)` with
/// `m = u · diag(s) · v†`, not yet sorted by the caller's convention.
fn jacobi_svd_tall(m: &CMatrix) -> (CMatrix, DVector<f64>, CMatrix) {
    let rows = m.nrows();
    let n = m.ncols();
    let mut w = m.clone();
    let mut v = identity(n);
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let a = w.column(p).norm_squared();
                let b = w.column(q).norm_squared();
                let c = w.column(p).dotc(&w.column(q));
                if a == 0.0 || b == 0.0 || c.norm() <= eps * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                // The Gram block [[a, c], [conj(c), b]] factors as
                // D [[a, |c|], [|c|, b]] D† with D = diag(1, conj(alpha)),
                // so a real rotation diagonalizes it after pulling the
                // phase of c into column q.
                let alpha = c / c.norm();
                let tau = (b - a) / (2.0 * c.norm());
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for row in 0..rows {
                    let x = w[(row, p)];
                    let y = w[(row, q)];
                    w[(row, p)] = x * cs + y * alpha.conj() * sn;
                    w[(row, q)] = y * cs - x * alpha * sn;
                }
                for row in 0..n {
                    let x = v[(row, p)];
                    let y = v[(row, q)];
                    v[(row, p)] = x * cs + y * alpha.conj() * sn;
                    v[(row, q)] = y * cs - x * alpha * sn;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let s = DVector::from_iterator(n, order.iter().map(|&j| norms[j]));
    let mut u = zeros(rows, n);
    let mut v_sorted = zeros(n, n);
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.column_mut(slot).copy_from(&w.column(j).unscale(norms[j]));
        }
        v_sorted.column_mut(slot).copy_from(&v.column(j));
    }
    (u, s, v_sorted)
}

/// Number of values strictly above `rel_tol` times the largest value.
pub fn rank_from_values(values: &[f64], rel_tol: f64) -> usize {
    let largest = values.iter().cloned().fold(0.0_f64, f64::max);
    if largest <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > rel_tol * largest).count()
}

/// Moore–Penrose pseudo-inverse with singular values below
/// `rel_tol · σ_max` treated as zero.
pub fn pinv(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (u, s, v_t) = svd_sorted(m);
    let cutoff = rel_tol * s.max();
    let mut inv = zeros(s.len(), s.len());
    for i in 0..s.len() {
        if s[i] > cutoff && s[i] > 0.0 {
            inv[(i, i)] = C64::new(1.0 / s[i], 0.0);
        }
    }
    v_t.adjoint() * inv * u.adjoint()
}

/// Nearest isometry to `m` (tall or square, full column rank assumed):
/// the unitary polar factor `u · v_t` of the thin SVD.
pub fn polar_isometry(m: &CMatrix) -> CMatrix {
    let (u, _, v_t) = svd_sorted(m);
    u * v_t
}

/// Orthonormalizes the columns of `m` in place order by modified
/// Gram–Schmidt with one re-orthogonalization pass. Fails if a column
/// becomes numerically dependent on its predecessors.
pub fn orthonormalize_columns(m: &CMatrix) -> Result<CMatrix> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _pass in 0..2 {
            for k in 0..j {
                let overlap = q.column(k).dotc(&q.column(j));
                let proj = q.column(k) * overlap;
                let mut col = q.column_mut(j);
                col -= proj;
            }
        }
        let norm = q.column(j).norm();
        if norm < 1e-12 {
            return Err(Error::RankDeficient { col: j, norm });
        }
        q.column_mut(j).unscale_mut(norm);
    }
    Ok(q)
}
