//! Stinespring dilations and their uniqueness structure.
//!
//! A dilation of a map `E: B(H_out) → B(H_in)` is an operator
//! `V: H_in → H_out ⊗ K` with `E(a) = V† (a ⊗ 1_K) V`. The composite row
//! index of `V` is `(out, K)` with the output leg slow. From a Kraus set the
//! dilation is `V ψ = Σ_α (K_α ψ) ⊗ ε_α`, i.e. `V[(m, α), i] = K_α[m, i]`.
//!
//! A dilation is *minimal* when the vectors `(a ⊗ 1_K) V φ` span all of
//! `H_out ⊗ K`. Minimal dilations are unique up to a unitary rotation of
//! `K`, and more generally any other dilation of the same map is reached
//! from a minimal one by an isometry `1_out ⊗ U` acting only on the
//! dilation space. [`connecting_isometry`] computes that `U`; it is the
//! engine behind the factorization in [`crate::factorize`].

use crate::error::{Error, Result};
use crate::mat::{
    frob_dist, identity, kron, matrix_unit, pinv, polar_isometry, rank_from_values, svd_sorted,
    zeros, CMatrix,
};
use crate::qmap::{CpMap, RANK_TOL};

/// Floor for the Frobenius agreement required between the realized Choi
/// matrices of two dilations before a connecting isometry is attempted; the
/// effective threshold is `max(DILATION_MATCH_SCALE, tol) · din · dout`.
pub const DILATION_MATCH_SCALE: f64 = 1e-8;

/// An operator `U: C^dsrc → C^ddst` with orthonormal columns.
#[derive(Debug, Clone)]
pub struct Isometry {
    dsrc: usize,
    ddst: usize,
    u: CMatrix,
}

impl Isometry {
    /// Validates `‖U†U − 1‖_F ≤ tol`.
    pub fn new(u: CMatrix, tol: f64) -> Result<Self> {
        let (ddst, dsrc) = (u.nrows(), u.ncols());
        let defect = frob_dist(&(u.adjoint() * &u), &identity(dsrc));
        if defect > tol {
            return Err(Error::NotIsometry { defect, tol });
        }
        Ok(Self { dsrc, ddst, u })
    }

    pub fn dsrc(&self) -> usize {
        self.dsrc
    }

    pub fn ddst(&self) -> usize {
        self.ddst
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    /// ‖U†U − 1‖_F.
    pub fn defect(&self) -> f64 {
        frob_dist(&(self.u.adjoint() * &self.u), &identity(self.dsrc))
    }

    /// True when `U` is square and also co-isometric, `‖UU† − 1‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dsrc == self.ddst
            && frob_dist(&(&self.u * self.u.adjoint()), &identity(self.ddst)) <= tol
    }
}

/// A Stinespring dilation `V: H_in → H_out ⊗ K`.
#[derive(Debug, Clone)]
pub struct Dilation {
    din: usize,
    dout: usize,
    k: usize,
    v: CMatrix,
    minimal: bool,
}

impl Dilation {
    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    /// Dimension of the dilation space `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The dilation operator, `(dout·k) × din`, row index `(out, K)`.
    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// Result of the span-rank check performed at construction.
    pub fn minimal(&self) -> bool {
        self.minimal
    }

    /// Stacks Kraus operators into a dilation: `V[(m, α), i] = K_α[m, i]`.
    /// The minimality flag is set by an explicit span-rank check at
    /// [`RANK_TOL`].
    pub fn from_kraus_ops(din: usize, dout: usize, operators: &[CMatrix]) -> Self {
        assert!(!operators.is_empty(), "dilation needs at least one Kraus operator");
        let k = operators.len();
        let mut v = zeros(dout * k, din);
        for (alpha, op) in operators.iter().enumerate() {
            assert_eq!(op.nrows(), dout, "Kraus operator rows must equal dout");
            assert_eq!(op.ncols(), din, "Kraus operator cols must equal din");
            for m in 0..dout {
                for i in 0..din {
                    v[(m * k + alpha, i)] = op[(m, i)];
                }
            }
        }
        let mut dilation = Self { din, dout, k, v, minimal: false };
        dilation.minimal = dilation.is_minimal(RANK_TOL);
        dilation
    }

    /// Wraps an explicit dilation operator; `v` must be `(dout·k) × din`
    /// with composite row index `(out, K)`, output slow.
    ///
    /// Because composite indices are row-major throughout, the same matrix
    /// re-read with a coarser split, say `dout' = d1` and `k' = d2·k` for
    /// `dout = d1·d2`, is the dilation of the restricted map
    /// `a ↦ V†(a ⊗ 1_{d2·k})V`. The factorization pipeline leans on this.
    pub fn from_parts(din: usize, dout: usize, k: usize, v: CMatrix) -> Result<Self> {
        if v.nrows() != dout * k || v.ncols() != din {
            return Err(Error::DimensionMismatch {
                context: "dilation operator shape",
                expected: dout * k * din,
                got: v.nrows() * v.ncols(),
            });
        }
        let mut dilation = Self { din, dout, k, v, minimal: false };
        dilation.minimal = dilation.is_minimal(RANK_TOL);
        Ok(dilation)
    }

    /// Recovers the Kraus slices `K_α[m, i] = V[(m, α), i]`.
    pub fn kraus_slices(&self) -> Vec<CMatrix> {
        (0..self.k)
            .map(|alpha| {
                CMatrix::from_fn(self.dout, self.din, |m, i| self.v[(m * self.k + alpha, i)])
            })
            .collect()
    }

    /// The Heisenberg action `V† (a ⊗ 1_K) V` realized by this dilation.
    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        assert_eq!(a.nrows(), self.dout, "observable must act on H_out");
        assert_eq!(a.ncols(), self.dout, "observable must act on H_out");
        self.v.adjoint() * kron(a, &identity(self.k)) * &self.v
    }

    /// The map this dilation realizes, as a Choi-form [`CpMap`].
    pub fn realized_map(&self) -> CpMap {
        let slices = self.kraus_slices();
        CpMap::from_schrodinger_action(self.din, self.dout, |unit| {
            let mut out = zeros(self.dout, self.dout);
            for op in &slices {
                out += op * unit * op.adjoint();
            }
            out
        })
        .expect("operator-sum action is Hermiticity preserving")
    }

    /// Matrix whose columns are the spanning vectors
    /// `(|i⟩⟨j| ⊗ 1_K) V e_m`; the dilation is minimal iff this has full
    /// row rank `dout·k`.
    fn span_matrix(&self) -> CMatrix {
        let (din, dout, k) = (self.din, self.dout, self.k);
        let mut span = zeros(dout * k, dout * dout * din);
        for i in 0..dout {
            for j in 0..dout {
                for m in 0..din {
                    let col = (i * dout + j) * din + m;
                    // (|i⟩⟨j| ⊗ 1_K) V e_m lives in block i and copies the
                    // K-components of block j of column m.
                    for alpha in 0..k {
                        span[(i * k + alpha, col)] = self.v[(j * k + alpha, m)];
                    }
                }
            }
        }
        span
    }

    /// Span-rank minimality test at relative singular-value cutoff `tol`.
    pub fn is_minimal(&self, tol: f64) -> bool {
        let (_, s, _) = svd_sorted(&self.span_matrix());
        rank_from_values(s.as_slice(), tol) == self.dout * self.k
    }
}

/// Minimal Stinespring dilation of `e`, built from the Choi
/// eigendecomposition at relative eigenvalue cutoff `tol`.
pub fn minimal_stinespring(e: &CpMap, tol: f64) -> Result<Dilation> {
    let kraus = e.kraus(tol)?;
    let dilation = Dilation::from_kraus_ops(kraus.din(), kraus.dout(), kraus.operators());
    debug_assert!(dilation.minimal, "eigenvector Kraus operators are independent");
    Ok(dilation)
}

/// Computes the isometry `U: K_min → K_other` with
/// `(1_dout ⊗ U) · V_min = V_other`, which exists and is unique whenever
/// `minimal` is a minimal dilation and both arguments realize the same map.
/// When `other` is also minimal, `U` is unitary.
///
/// The solve runs over the spanning vectors of the minimality test: with
/// `X` (resp. `Y`) collecting `(|i⟩⟨j| ⊗ 1) V e_m` for `minimal` (resp.
/// `other`), the full-space connector is the least-squares solution of
/// `Ũ X = Y`, which must commute with `a ⊗ 1`; its dilation-space factor is
/// averaged out and snapped to the nearest exact isometry by polar
/// decomposition.
pub fn connecting_isometry(minimal: &Dilation, other: &Dilation, tol: f64) -> Result<Isometry> {
    if minimal.din != other.din || minimal.dout != other.dout {
        return Err(Error::DimensionMismatch {
            context: "dilations of maps with different spaces",
            expected: minimal.dout * minimal.din,
            got: other.dout * other.din,
        });
    }
    if !minimal.is_minimal(RANK_TOL) {
        return Err(Error::NotMinimal {
            rank: {
                let (_, s, _) = svd_sorted(&minimal.span_matrix());
                rank_from_values(s.as_slice(), RANK_TOL)
            },
            required: minimal.dout * minimal.k,
        });
    }
    let match_tol = DILATION_MATCH_SCALE.max(tol) * (minimal.din * minimal.dout) as f64;
    let distance = minimal.realized_map().choi_distance(&other.realized_map());
    if distance > match_tol {
        return Err(Error::DilationMismatch { distance, tol: match_tol });
    }

    let x = minimal.span_matrix();
    let y = other.span_matrix();
    let utilde = &y * pinv(&x, RANK_TOL);
    let factor = extract_tensor_factor(&utilde, minimal.dout, tol)?;
    let u = polar_isometry(factor.u());
    let isometry = Isometry::new(u, tol)?;

    let lifted = kron(&identity(minimal.dout), isometry.u());
    let residual = frob_dist(&(lifted * &minimal.v), &other.v);
    let residual_tol = tol * (minimal.din as f64).sqrt();
    if residual > residual_tol {
        return Err(Error::DilationMismatch { distance: residual, tol: residual_tol });
    }
    Ok(isometry)
}

/// Splits `Ũ: C^dcommon ⊗ C^ksrc → C^dcommon ⊗ C^kdst` as `1_dcommon ⊗ U`.
///
/// Requires `Ũ` to commute with `a ⊗ 1` for every `a` on the common factor
/// (checked on matrix units within `tol`); the factor is recovered by
/// averaging the diagonal blocks, `U = (1/dcommon) Σ_m ⟨m|⊗1 · Ũ · |m⟩⊗1`.
pub fn extract_tensor_factor(utilde: &CMatrix, dcommon: usize, tol: f64) -> Result<Isometry> {
    assert!(dcommon > 0, "common factor dimension must be positive");
    if utilde.nrows() % dcommon != 0 {
        return Err(Error::DimensionMismatch {
            context: "tensor factor rows",
            expected: dcommon,
            got: utilde.nrows(),
        });
    }
    if utilde.ncols() % dcommon != 0 {
        return Err(Error::DimensionMismatch {
            context: "tensor factor cols",
            expected: dcommon,
            got: utilde.ncols(),
        });
    }
    let kdst = utilde.nrows() / dcommon;
    let ksrc = utilde.ncols() / dcommon;

    let mut worst = 0.0_f64;
    for p in 0..dcommon {
        for q in 0..dcommon {
            let unit = matrix_unit(dcommon, p, q);
            let right = utilde * kron(&unit, &identity(ksrc));
            let left = kron(&unit, &identity(kdst)) * utilde;
            worst = worst.max(frob_dist(&right, &left));
        }
    }
    if worst > tol {
        return Err(Error::NotIntertwining { residual: worst, tol });
    }

    let mut u = zeros(kdst, ksrc);
    for m in 0..dcommon {
        u += utilde.view((m * kdst, m * ksrc), (kdst, ksrc));
    }
    u.unscale_mut(dcommon as f64);

    let reconstruction = frob_dist(&kron(&identity(dcommon), &u), utilde);
    if reconstruction > tol * (dcommon as f64) {
        return Err(Error::NotIntertwining { residual: reconstruction, tol });
    }
    Isometry::new(u, tol)
}
