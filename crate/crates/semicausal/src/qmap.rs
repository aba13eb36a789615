//! Completely positive maps in Choi form.
//!
//! A [`CpMap`] stores one `(din·dout) × (din·dout)` Choi matrix and exposes
//! the map in both pictures: the Heisenberg action `E: B(H_out) → B(H_in)`
//! and its Schrödinger dual `E_*: states(H_in) → states(H_out)`, linked by
//! `tr(E_*(ρ)·a) = tr(ρ·E(a))`. The Choi convention is
//!
//! ```text
//! choi(E) = Σ_ij |i⟩⟨j|_in ⊗ E_*(|i⟩⟨j|)        (i, j over H_in, unnormalized)
//! ```
//!
//! so the Choi matrix is block-structured with `din × din` blocks of size
//! `dout × dout`, block `(i, j)` holding `E_*(|i⟩⟨j|)`.
//!
//! Construction validates shape and Hermiticity (symmetrizing sub-tolerance
//! asymmetry). Positivity and subunitality are intentionally *queries*
//! ([`CpMap::is_cp`], [`CpMap::is_subunital`]) rather than constructor
//! invariants, so that non-CP operators like the transpose map can be built
//! and classified; file ingestion in [`crate::schema`] enforces both.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mat::{
    self, eigh, frob_dist, hermitian_asymmetry, identity, kron, matrix_unit, non_finite_entry,
    permute_legs, rank_from_values, zeros, CMatrix, ZERO,
};
use crate::DEFAULT_TOL;

/// Relative eigenvalue/singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Dimensions of a bipartite system `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub da: usize,
    pub db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Self {
        assert!(da > 0 && db > 0, "dimensions must be positive");
        Self { da, db }
    }

    /// Dimension of the composite space.
    pub fn composite(self) -> usize {
        self.da * self.db
    }

    /// The same system with the roles of A and B exchanged.
    pub fn swapped(self) -> Self {
        Self { da: self.db, db: self.da }
    }

    /// Leg dimensions of a bipartite Choi matrix: `(A_in, B_in, A_out, B_out)`.
    pub fn choi_legs(self) -> [usize; 4] {
        [self.da, self.db, self.da, self.db]
    }
}

/// A list of Kraus operators `K_α: H_in → H_out`, each of shape `dout × din`,
/// with `Σ_α K_α† K_α ⪯ 1` within tolerance.
#[derive(Debug, Clone)]
pub struct KrausSet {
    din: usize,
    dout: usize,
    operators: Vec<CMatrix>,
}

impl KrausSet {
    /// Validates shapes, finiteness, and subunitality (`Σ K†K ⪯ 1 + tol`).
    pub fn new(operators: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyKrausSet)?;
        let (dout, din) = (first.nrows(), first.ncols());
        for k in &operators {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shape",
                    expected: dout * din,
                    got: k.nrows() * k.ncols(),
                });
            }
            if let Some((row, col)) = non_finite_entry(k) {
                return Err(Error::NonFinite { row, col });
            }
        }
        let set = Self { din, dout, operators };
        let (vals, _) = eigh(&set.completeness());
        let excess = vals.max() - 1.0;
        if excess > tol {
            return Err(Error::NotSubunital { excess });
        }
        Ok(set)
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ_α K_α† K_α`, the Heisenberg image of the identity.
    pub fn completeness(&self) -> CMatrix {
        let mut acc = zeros(self.din, self.din);
        for k in &self.operators {
            acc += k.adjoint() * k;
        }
        acc
    }
}

/// A linear map between operator algebras, stored as its Choi matrix.
#[derive(Debug, Clone)]
pub struct CpMap {
    din: usize,
    dout: usize,
    choi: CMatrix,
}

impl CpMap {
    /// Wraps a Choi matrix, checking shape, finiteness, and Hermiticity.
    /// Asymmetry below `DEFAULT_TOL` is symmetrized away; larger asymmetry
    /// is rejected.
    pub fn new(din: usize, dout: usize, choi: CMatrix) -> Result<Self> {
        assert!(din > 0 && dout > 0, "dimensions must be positive");
        let n = din * dout;
        if choi.nrows() != n || choi.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "Choi matrix size",
                expected: n,
                got: choi.nrows(),
            });
        }
        if let Some((row, col)) = non_finite_entry(&choi) {
            return Err(Error::NonFinite { row, col });
        }
        let asymmetry = hermitian_asymmetry(&choi);
        if asymmetry > DEFAULT_TOL {
            return Err(Error::NotHermitian { asymmetry, tol: DEFAULT_TOL });
        }
        let symmetrized = (&choi + choi.adjoint()).scale(0.5);
        Ok(Self { din, dout, choi: symmetrized })
    }

    /// The identity map on a `d`-dimensional system.
    pub fn identity(d: usize) -> Self {
        let mut choi = zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                choi[(i * d + i, j * d + j)] = mat::ONE;
            }
        }
        Self { din: d, dout: d, choi }
    }

    /// Builds the Choi matrix `Σ_ij |i⟩⟨j| ⊗ Σ_α K_α |i⟩⟨j| K_α†` from a
    /// Kraus set.
    pub fn from_kraus(kraus: &KrausSet) -> Self {
        let (din, dout) = (kraus.din(), kraus.dout());
        let n = din * dout;
        let mut choi = zeros(n, n);
        for k in kraus.operators() {
            // choi += w w† with w[(i, m)] = K[m, i].
            let w = DVector::from_fn(n, |idx, _| {
                let (i, m) = (idx / dout, idx % dout);
                k[(m, i)]
            });
            choi += &w * w.adjoint();
        }
        Self { din, dout, choi }
    }

    /// Convenience wrapper: validates the operators as a [`KrausSet`] and
    /// converts.
    pub fn from_kraus_ops(operators: Vec<CMatrix>, tol: f64) -> Result<Self> {
        Ok(Self::from_kraus(&KrausSet::new(operators, tol)?))
    }

    /// Builds a map from its Schrödinger action on matrix units of `H_in`.
    pub fn from_schrodinger_action<F>(din: usize, dout: usize, mut action: F) -> Result<Self>
    where
        F: FnMut(&CMatrix) -> CMatrix,
    {
        let mut choi = zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let block = action(&matrix_unit(din, i, j));
                assert_eq!(block.nrows(), dout, "action must produce dout×dout blocks");
                assert_eq!(block.ncols(), dout, "action must produce dout×dout blocks");
                for m in 0..dout {
                    for n in 0..dout {
                        choi[(i * dout + m, j * dout + n)] = block[(m, n)];
                    }
                }
            }
        }
        Self::new(din, dout, choi)
    }

    /// Builds a map from its Heisenberg action on matrix units of `H_out`.
    ///
    /// Uses `choi[(i,m),(j,n)] = E(|n⟩⟨m|)[j, i]`, which follows from the
    /// duality pairing.
    pub fn from_heisenberg_action<F>(din: usize, dout: usize, mut action: F) -> Result<Self>
    where
        F: FnMut(&CMatrix) -> CMatrix,
    {
        let mut choi = zeros(din * dout, din * dout);
        for n in 0..dout {
            for m in 0..dout {
                let image = action(&matrix_unit(dout, n, m));
                assert_eq!(image.nrows(), din, "action must produce din×din images");
                assert_eq!(image.ncols(), din, "action must produce din×din images");
                for i in 0..din {
                    for j in 0..din {
                        choi[(i * dout + m, j * dout + n)] = image[(j, i)];
                    }
                }
            }
        }
        Self::new(din, dout, choi)
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// The block `E_*(|i⟩⟨j|)` of the Choi matrix.
    pub fn choi_block(&self, i: usize, j: usize) -> CMatrix {
        let d = self.dout;
        CMatrix::from_fn(d, d, |m, n| self.choi[(i * d + m, j * d + n)])
    }

    /// Heisenberg action `E(a)` for an observable `a` on `H_out`.
    pub fn apply_heisenberg(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.dout || a.ncols() != self.dout {
            return Err(Error::DimensionMismatch {
                context: "Heisenberg observable dimension",
                expected: self.dout,
                got: a.nrows(),
            });
        }
        let d = self.dout;
        Ok(CMatrix::from_fn(self.din, self.din, |p, q| {
            let mut acc = ZERO;
            for m in 0..d {
                for n in 0..d {
                    acc += self.choi[(q * d + m, p * d + n)] * a[(n, m)];
                }
            }
            acc
        }))
    }

    /// Schrödinger action `E_*(ρ)` for a state (or any operator) on `H_in`.
    pub fn apply_schrodinger(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.din || rho.ncols() != self.din {
            return Err(Error::DimensionMismatch {
                context: "Schrödinger state dimension",
                expected: self.din,
                got: rho.nrows(),
            });
        }
        let d = self.dout;
        let mut out = zeros(d, d);
        for i in 0..self.din {
            for j in 0..self.din {
                let w = rho[(i, j)];
                if w == ZERO {
                    continue;
                }
                for m in 0..d {
                    for n in 0..d {
                        out[(m, n)] += w * self.choi[(i * d + m, j * d + n)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `E(1)`, the Heisenberg image of the identity. Equals `Σ K†K` for any
    /// Kraus representation; the map is subunital when this is ⪯ 1.
    pub fn on_identity(&self) -> CMatrix {
        let d = self.dout;
        CMatrix::from_fn(self.din, self.din, |p, q| {
            let mut acc = ZERO;
            for m in 0..d {
                acc += self.choi[(q * d + m, p * d + m)];
            }
            acc
        })
    }

    /// The trace-pairing dual: exchanges the Heisenberg and Schrödinger
    /// roles, swapping `din` and `dout`. On Kraus operators this is
    /// `{K_α} ↦ {K_α†}`. Pure reindexing plus conjugation, so
    /// `e.dual().dual()` reproduces `e` bit for bit.
    pub fn dual(&self) -> Self {
        let (din, dout) = (self.din, self.dout);
        let mut choi = zeros(din * dout, din * dout);
        for i in 0..din {
            for m in 0..dout {
                for j in 0..din {
                    for n in 0..dout {
                        choi[(m * din + i, n * din + j)] =
                            self.choi[(i * dout + m, j * dout + n)].conj();
                    }
                }
            }
        }
        Self { din: dout, dout: din, choi }
    }

    /// Sequential composition: `self` is applied *after* `earlier` in the
    /// Schrödinger picture. The Heisenberg action of the result is
    /// `a ↦ earlier(self(a))`.
    pub fn compose(&self, earlier: &Self) -> Result<Self> {
        if earlier.dout != self.din {
            return Err(Error::DimensionMismatch {
                context: "composition intermediate dimension",
                expected: earlier.dout,
                got: self.din,
            });
        }
        Self::from_schrodinger_action(earlier.din, self.dout, |unit| {
            let mid = earlier.apply_schrodinger(unit).expect("unit has din dimension");
            self.apply_schrodinger(&mid).expect("intermediate dimension checked")
        })
    }

    /// Tensor product, with input legs ordered `(in₁, in₂)` and output legs
    /// `(out₁, out₂)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let raw = kron(&self.choi, &other.choi);
        // kron index order is (in₁, out₁, in₂, out₂); regroup inputs first.
        let legs = [self.din, self.dout, other.din, other.dout];
        let choi = permute_legs(&raw, &legs, &[0, 2, 1, 3]);
        Self {
            din: self.din * other.din,
            dout: self.dout * other.dout,
            choi,
        }
    }

    /// Complete positivity: no Choi eigenvalue below `−tol`.
    pub fn is_cp(&self, tol: f64) -> bool {
        let (vals, _) = eigh(&self.choi);
        vals.min() >= -tol
    }

    /// Subunitality `E(1) ⪯ 1`: no eigenvalue of `E(1)` above `1 + tol`.
    pub fn is_subunital(&self, tol: f64) -> bool {
        let (vals, _) = eigh(&self.on_identity());
        vals.max() <= 1.0 + tol
    }

    /// Unitality `E(1) = 1` within Frobenius distance `tol`.
    pub fn is_unital(&self, tol: f64) -> bool {
        frob_dist(&self.on_identity(), &identity(self.din)) <= tol
    }

    /// Numerical rank of the Choi matrix at relative cutoff `rel_tol`.
    pub fn choi_rank(&self, rel_tol: f64) -> usize {
        let (vals, _) = eigh(&self.choi);
        rank_from_values(vals.as_slice(), rel_tol)
    }

    /// Extracts Kraus operators from the Choi eigendecomposition, keeping
    /// eigenvalues above `tol` relative to the largest. Errors if any
    /// eigenvalue is below `−tol` (the map is not CP). A numerically zero
    /// map yields a single zero operator.
    pub fn kraus(&self, tol: f64) -> Result<KrausSet> {
        let (vals, vecs) = eigh(&self.choi);
        if vals.min() < -tol {
            return Err(Error::NotPositive { min_eigenvalue: vals.min() });
        }
        let rank = rank_from_values(vals.as_slice(), tol);
        let mut operators = Vec::with_capacity(rank.max(1));
        for alpha in 0..rank {
            let scale = vals[alpha].max(0.0).sqrt();
            let v = vecs.column(alpha);
            operators.push(CMatrix::from_fn(self.dout, self.din, |m, i| {
                v[i * self.dout + m] * scale
            }));
        }
        if operators.is_empty() {
            operators.push(zeros(self.dout, self.din));
        }
        KrausSet::new(operators, tol.max(DEFAULT_TOL))
    }

    /// Frobenius distance between Choi matrices. Panics on dimension
    /// mismatch.
    pub fn choi_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.din, other.din, "maps must share input dimension");
        assert_eq!(self.dout, other.dout, "maps must share output dimension");
        frob_dist(&self.choi, &other.choi)
    }
}
