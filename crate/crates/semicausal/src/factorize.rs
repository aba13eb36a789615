//! One-way factorization of semicausal maps.
//!
//! Whenever signalling B → A is blocked, the map is not merely abstractly
//! constrained: it literally factors through a channel on Bob's side,
//!
//! ```text
//! E = (G ⊗ id_B) ∘ (id_A ⊗ F),       F a channel,  G completely positive,
//! ```
//!
//! read right to left in the Heisenberg picture. Operationally: Alice
//! applies `G`, producing a message system `C` that is handed to Bob, who
//! applies the channel `F` to `C ⊗ B`. No information ever travels from B
//! to A, which makes the blocked direction manifest.
//!
//! [`semilocalize`] constructs the factors. The route is through dilation
//! uniqueness:
//!
//! 1. recover the A-side marginal `T` and check the map really is blocked;
//! 2. take a minimal dilation `W: H_A → H_A ⊗ H_C` of `T`;
//! 3. take a minimal dilation `V: H_AB → H_AB ⊗ H_D` of `E`;
//! 4. observe that `W ⊗ 1_B` and `V` both dilate the *same* restricted map
//!    `a ↦ E(a ⊗ 1_B)`, the former minimally, so a connecting isometry
//!    `U: H_C ⊗ H_B → H_B ⊗ H_D` with `(1_A ⊗ U)(W ⊗ 1_B) = V` exists;
//! 5. set `G(x) = W† x W` and `F(b) = U†(b ⊗ 1_D)U`.
//!
//! `F` is automatically unital because `U` is an isometry, and `G` inherits
//! subunitality from `E`. The message dimension `d_C` is the Choi rank of
//! `T`, so it never exceeds `d_A²`.

use crate::causality::{is_semicausal, BipartiteMap};
use crate::dilation::{connecting_isometry, minimal_stinespring, Dilation, Isometry};
use crate::error::{Error, Result};
use crate::mat::{frob_dist, identity, kron, CMatrix};
use crate::qmap::{BipartiteDims, CpMap, RANK_TOL};

/// The constructed factorization of a semicausal map.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Dimension of the message system C passed from Alice to Bob.
    pub d_c: usize,
    /// Dimension of the dilation space of the full map.
    pub d_d: usize,
    /// Alice's Stinespring operator, `W: H_A → H_A ⊗ H_C`, `(d_A·d_C) × d_A`.
    pub w: CMatrix,
    /// The connecting isometry `U: H_C ⊗ H_B → H_B ⊗ H_D`.
    pub u: Isometry,
    /// Alice's CP map `G(x) = W† x W`, from `B(H_A ⊗ H_C)` to `B(H_A)`.
    pub g: CpMap,
    /// Bob's channel `F(b) = U†(b ⊗ 1_D)U`, from `B(H_B)` to `B(H_C ⊗ H_B)`.
    pub f: CpMap,
    /// Choi distance between the original map and `(G ⊗ id) ∘ (id ⊗ F)`.
    pub reconstruction_residual: f64,
    /// `‖F(1_B) − 1_{CB}‖_F`; zero exactly when `F` is a channel.
    pub f_unitality: f64,
}

/// Result of checking an alleged factorization against the original map.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Inferred message dimension.
    pub d_c: usize,
    /// Choi distance between the original and the reassembled map.
    pub choi_distance: f64,
    /// `‖F(1) − 1‖_F`.
    pub f_unitality_defect: f64,
    /// Both figures below tolerance.
    pub pass: bool,
}

/// Factorizes a semicausal map as `(G ⊗ id_B) ∘ (id_A ⊗ F)`.
///
/// Fails with [`Error::NotSemicausal`] when the B → A residual is not below
/// `tol`. On success the reconstruction residual has been verified to be
/// below `10·tol`.
pub fn semilocalize(m: &BipartiteMap, tol: f64) -> Result<Decomposition> {
    let BipartiteDims { da, db } = m.dims();

    let check = is_semicausal(m, tol);
    if !check.blocked {
        return Err(Error::NotSemicausal { residual: check.residual, tol });
    }

    // Alice's isometry-like operator W dilates the marginal map minimally,
    // which is what keeps the message system as small as possible.
    let w_dilation = minimal_stinespring(&check.marginal, RANK_TOL)?;
    let d_c = w_dilation.k();
    let w = w_dilation.v().clone();

    let v_dilation = minimal_stinespring(m.map(), RANK_TOL)?;
    let d_d = v_dilation.k();

    // Both dilate the restricted map a ↦ E(a ⊗ 1_B). The V side is the
    // same matrix with its row index re-split as (A, (B, D)); the W side
    // tensors on an untouched H_B, and stays minimal because the spanning
    // vectors of W simply pick up a full H_B factor.
    let v_restricted = Dilation::from_parts(da * db, da, db * d_d, v_dilation.v().clone())?;
    let w_restricted = Dilation::from_parts(da * db, da, d_c * db, kron(&w, &identity(db)))?;

    let u = connecting_isometry(&w_restricted, &v_restricted, tol)?;

    let g = CpMap::from_kraus_ops(vec![w.clone()], tol.max(crate::DEFAULT_TOL))?;
    // F(b) = U†(b ⊗ 1_D)U is itself in dilation form: U rows are (B, D).
    let f = Dilation::from_parts(d_c * db, db, d_d, u.u().clone())?.realized_map();
    let f_unitality = frob_dist(&f.on_identity(), &identity(d_c * db));

    let rebuilt = reconstruct(&g, &f, m.dims(), d_c)?;
    let reconstruction_residual = rebuilt.map().choi_distance(m.map());
    let residual_tol = 10.0 * tol;
    if reconstruction_residual > residual_tol {
        return Err(Error::DilationMismatch {
            distance: reconstruction_residual,
            tol: residual_tol,
        });
    }

    Ok(Decomposition { d_c, d_d, w, u, g, f, reconstruction_residual, f_unitality })
}

/// Reassembles `(G ⊗ id_B) ∘ (id_A ⊗ F)` from factor maps with message
/// dimension `d_c`, validating all four leg dimensions first.
pub fn reconstruct(g: &CpMap, f: &CpMap, dims: BipartiteDims, d_c: usize) -> Result<BipartiteMap> {
    let BipartiteDims { da, db } = dims;
    if g.din() != da || g.dout() != da * d_c {
        return Err(Error::DimensionMismatch {
            context: "Alice factor shape",
            expected: da * (da * d_c),
            got: g.din() * g.dout(),
        });
    }
    if f.din() != d_c * db || f.dout() != db {
        return Err(Error::DimensionMismatch {
            context: "Bob factor shape",
            expected: (d_c * db) * db,
            got: f.din() * f.dout(),
        });
    }
    let alice_first = g.tensor(&CpMap::identity(db));
    let bob_second = CpMap::identity(da).tensor(f);
    let e = bob_second.compose(&alice_first)?;
    BipartiteMap::new(dims, e)
}

/// Checks an alleged factorization `(g, f)` of `original`: reassembles the
/// composite, measures its Choi distance to the original and the unitality
/// defect of `f`, and passes iff both are below `tol`. The message
/// dimension is inferred from the factor shapes.
pub fn verify_decomposition(
    original: &BipartiteMap,
    g: &CpMap,
    f: &CpMap,
    tol: f64,
) -> Result<VerificationReport> {
    let BipartiteDims { da, .. } = original.dims();
    if g.din() != da || g.dout() % da != 0 {
        return Err(Error::DimensionMismatch {
            context: "Alice factor input dimension",
            expected: da,
            got: g.din(),
        });
    }
    let d_c = g.dout() / da;
    let rebuilt = reconstruct(g, f, original.dims(), d_c)?;
    let choi_distance = rebuilt.map().choi_distance(original.map());
    let f_unitality_defect = frob_dist(&f.on_identity(), &identity(f.din()));
    Ok(VerificationReport {
        d_c,
        choi_distance,
        f_unitality_defect,
        pass: choi_distance < tol && f_unitality_defect < tol,
    })
}
