//! Signalling structure of bipartite operations.
//!
//! For a map `E` on `B(H_A ⊗ H_B)` the core question is directional: can
//! Bob's choice of local operation influence Alice's marginal statistics?
//! It cannot exactly when
//!
//! ```text
//! E(a ⊗ 1_B) = T(a) ⊗ 1_B          for all a, for some map T on B(H_A),
//! ```
//!
//! in which case we say signalling **B → A is blocked** and call `T` the
//! A-side marginal map. [`marginal_map_a`] recovers the candidate
//! `T(a) = Tr_B[E(a ⊗ 1_B)]/d_B` and reports the worst-case deviation over
//! a complete set of matrix units, so the residual is an exact linear test,
//! not a sample.
//!
//! The opposite direction (**A → B blocked**) is the same test after
//! exchanging the parties, with one refinement: Alice's side is allowed to
//! be selective (subunital), so the comparison is against `Q ⊗ T'(b)` where
//! `Q = Tr_B[E(1)]/d_B` is the fixed A-side factor of the image of the
//! identity. For unital maps `Q = 1_A` and the test coincides with the
//! plain marginal comparison on the swapped map; for selective maps it
//! captures that renormalized statistics on Bob's side are unaffected.
//! This matches the asymmetric roles of the parties in the product and
//! one-way factorization forms, where Bob's factor is required to be a
//! channel while Alice's may be any CP map.
//!
//! A map blocked in both directions is **causal**. A map of exact product
//! form `E = G ⊗ F` with `F` a channel is **product localizable**;
//! [`is_product_localizable`] detects this by an operator Schmidt
//! decomposition of the Choi matrix across the `(A_in A_out) | (B_in B_out)`
//! split.

use crate::error::{Error, Result};
use crate::mat::{frob_dist, identity, kron, partial_trace, permute_legs, zeros, CMatrix};
use crate::qmap::{BipartiteDims, CpMap};

/// A CP map on a bipartite system, `E: B(H_A ⊗ H_B) → B(H_A ⊗ H_B)`.
#[derive(Debug, Clone)]
pub struct BipartiteMap {
    dims: BipartiteDims,
    e: CpMap,
}

impl BipartiteMap {
    pub fn new(dims: BipartiteDims, e: CpMap) -> Result<Self> {
        let d = dims.composite();
        if e.din() != d || e.dout() != d {
            return Err(Error::DimensionMismatch {
                context: "bipartite map dimension",
                expected: d,
                got: e.din(),
            });
        }
        Ok(Self { dims, e })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn map(&self) -> &CpMap {
        &self.e
    }

    /// The same operation with the roles of A and B exchanged:
    /// `E'(y) = S E(S y S†) S†` for the leg swap `S`. Implemented as a leg
    /// permutation of the Choi matrix, so it is exact.
    pub fn swapped(&self) -> Self {
        let legs = self.dims.choi_legs();
        let choi = permute_legs(self.e.choi(), &legs, &[1, 0, 3, 2]);
        let d = self.dims.composite();
        Self {
            dims: self.dims.swapped(),
            e: CpMap::new(d, d, choi).expect("leg permutation preserves Hermiticity"),
        }
    }
}

/// Result of a one-directional signalling test.
#[derive(Debug, Clone)]
pub struct SemicausalCheck {
    /// True when the direction is blocked (residual below tolerance).
    pub blocked: bool,
    /// The candidate marginal map (`T` on A for the B → A test).
    pub marginal: CpMap,
    /// Worst-case Frobenius deviation over a complete set of matrix units.
    pub residual: f64,
}

/// Verdict of the full classification.
#[derive(Debug, Clone)]
pub struct CausalityVerdict {
    /// Bob cannot signal Alice: `E(a ⊗ 1) = T(a) ⊗ 1`.
    pub semicausal_b_to_a_blocked: bool,
    /// Alice cannot signal Bob: `E(1 ⊗ b) = Q ⊗ T'(b)`.
    pub semicausal_a_to_b_blocked: bool,
    /// Both directions blocked.
    pub causal: bool,
    /// Exact product form `G ⊗ F` with `F` a channel.
    pub product_localizable: bool,
    /// Residual of the B → A test.
    pub residual_b_to_a: f64,
    /// Residual of the A → B test.
    pub residual_a_to_b: f64,
    /// A-side marginal map, present when B → A is blocked.
    pub t: Option<CpMap>,
    /// B-side marginal map, present when A → B is blocked.
    pub t_prime: Option<CpMap>,
}

/// Candidate A-side marginal `T(a) = Tr_B[E(a ⊗ 1_B)] / d_B` and the
/// worst-case deviation `max_a ‖E(a ⊗ 1_B) − T(a) ⊗ 1_B‖_F` over matrix
/// units of `B(H_A)`.
pub fn marginal_map_a(m: &BipartiteMap) -> (CpMap, f64) {
    let BipartiteDims { da, db } = m.dims();
    let id_b = identity(db);
    let mut residual = 0.0_f64;
    let t = CpMap::from_heisenberg_action(da, da, |a_unit| {
        let image = m
            .e
            .apply_heisenberg(&kron(a_unit, &id_b))
            .expect("a ⊗ 1 acts on the composite space");
        let t_a = partial_trace(&image, &[da, db], 1).unscale(db as f64);
        residual = residual.max(frob_dist(&image, &kron(&t_a, &id_b)));
        t_a
    })
    .expect("marginal action preserves Hermiticity");
    debug_assert!(t.is_cp(crate::DEFAULT_TOL), "marginal of a CP map is CP");
    (t, residual)
}

/// B-side marginal with the A-side normalization operator
/// `Q = Tr_B[E(1)]/d_B`: returns `T'` with
/// `T'(b) = Tr_A[E(1 ⊗ b)]/tr(Q)` and the worst-case deviation
/// `max_b ‖E(1 ⊗ b) − Q ⊗ T'(b)‖_F`. For unital `E` this is exactly the
/// swapped-map version of [`marginal_map_a`].
pub fn mirror_marginal_b(m: &BipartiteMap) -> (CpMap, f64) {
    let BipartiteDims { da, db } = m.dims();
    let id_a = identity(da);
    let q = partial_trace(&m.e.on_identity(), &[da, db], 1).unscale(db as f64);
    let trq = q.trace().re;
    let mut residual = 0.0_f64;
    let t_prime = CpMap::from_heisenberg_action(db, db, |b_unit| {
        let image = m
            .e
            .apply_heisenberg(&kron(&id_a, b_unit))
            .expect("1 ⊗ b acts on the composite space");
        let t_b = if trq > 1e-14 {
            partial_trace(&image, &[da, db], 0).unscale(trq)
        } else {
            zeros(db, db)
        };
        residual = residual.max(frob_dist(&image, &kron(&q, &t_b)));
        t_b
    })
    .expect("marginal action preserves Hermiticity");
    (t_prime, residual)
}

/// Tests whether signalling B → A is blocked at tolerance `tol`.
pub fn is_semicausal(m: &BipartiteMap, tol: f64) -> SemicausalCheck {
    let (marginal, residual) = marginal_map_a(m);
    SemicausalCheck { blocked: residual < tol, marginal, residual }
}

/// Full classification: both signalling directions plus product
/// localizability.
pub fn is_causal(m: &BipartiteMap, tol: f64) -> CausalityVerdict {
    let forward = is_semicausal(m, tol);
    let (t_prime, residual_a_to_b) = mirror_marginal_b(m);
    let a_to_b_blocked = residual_a_to_b < tol;
    let causal = forward.blocked && a_to_b_blocked;
    let (product_localizable, _) = is_product_localizable(m, tol);
    CausalityVerdict {
        semicausal_b_to_a_blocked: forward.blocked,
        semicausal_a_to_b_blocked: a_to_b_blocked,
        causal,
        product_localizable,
        residual_b_to_a: forward.residual,
        residual_a_to_b,
        t: forward.blocked.then_some(forward.marginal),
        t_prime: a_to_b_blocked.then_some(t_prime),
    }
}

/// Realigns a bipartite Choi matrix so that rows collect the A legs
/// `(A_in, A_out, A_in', A_out')` and columns the B legs; a product map
/// `G ⊗ F` realigns to the rank-one matrix `vec(choi_G) · vec(choi_F)ᵀ`.
fn realigned_choi(m: &BipartiteMap) -> CMatrix {
    let BipartiteDims { da, db } = m.dims();
    let choi = m.e.choi();
    let a4 = da * da * da * da;
    let b4 = db * db * db * db;
    let mut r = zeros(a4, b4);
    for ai in 0..da {
        for bi in 0..db {
            for ao in 0..da {
                for bo in 0..db {
                    let row_full = ((ai * db + bi) * da + ao) * db + bo;
                    for aj in 0..da {
                        for bj in 0..db {
                            for ap in 0..da {
                                for bp in 0..db {
                                    let col_full = ((aj * db + bj) * da + ap) * db + bp;
                                    let row = ((ai * da + ao) * da + aj) * da + ap;
                                    let col = ((bi * db + bo) * db + bj) * db + bp;
                                    r[(row, col)] = choi[(row_full, col_full)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    r
}

/// Tests for exact product form `E = G ⊗ F` with `F` a channel (unital) and
/// `G` completely positive.
///
/// True requires the realigned Choi matrix to have exactly one singular
/// value above `tol · σ_max` *and* the rank-one factors to split with a
/// unital `F`; a product with a selective B factor is rejected. On success
/// the factors `(G, F)` are returned with the scale fixed by `F(1) = 1`.
pub fn is_product_localizable(m: &BipartiteMap, tol: f64) -> (bool, Option<(CpMap, CpMap)>) {
    let BipartiteDims { da, db } = m.dims();
    let r = realigned_choi(m);
    let (u, s, v_t) = crate::mat::svd_sorted(&r);
    if crate::mat::rank_from_values(s.as_slice(), tol) != 1 {
        return (false, None);
    }
    let sigma = s[0];
    let a2 = da * da;
    let b2 = db * db;
    let mut choi_g = CMatrix::from_fn(a2, a2, |r1, r2| u[(r1 * a2 + r2, 0)]);
    let mut choi_f = CMatrix::from_fn(b2, b2, |c1, c2| v_t[(0, c1 * b2 + c2)] * sigma);

    // The singular pair is unique up to a phase; rotate it so the A factor
    // has positive real trace, which a CP factor must.
    let t = choi_g.trace();
    if t.norm() < 1e-12 {
        return (false, None);
    }
    let phase = t / t.norm();
    choi_g /= phase;
    choi_f *= phase;
    let herm_defect = crate::mat::hermitian_asymmetry(&choi_g).max(
        crate::mat::hermitian_asymmetry(&choi_f),
    );
    if herm_defect > tol.max(1e-9) * (1.0 + sigma) {
        return (false, None);
    }

    // Fix the G/F scale split so that F is unital, then insist it really is.
    let g = match CpMap::new(da, da, choi_g) {
        Ok(g) => g,
        Err(_) => return (false, None),
    };
    let f_raw = match CpMap::new(db, db, choi_f) {
        Ok(f) => f,
        Err(_) => return (false, None),
    };
    let lambda = f_raw.choi().trace().re / db as f64;
    if lambda <= 1e-12 {
        return (false, None);
    }
    let f = CpMap::new(db, db, f_raw.choi().unscale(lambda)).expect("rescaling keeps Hermiticity");
    let g = CpMap::new(da, da, g.choi().scale(lambda)).expect("rescaling keeps Hermiticity");
    if !f.is_unital(tol.max(1e-9) * db as f64) {
        return (false, None);
    }
    if !g.is_cp(tol.max(1e-9)) || !f.is_cp(tol.max(1e-9)) {
        return (false, None);
    }
    (true, Some((g, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{matrix_unit, polar_isometry, C64, ONE, ZERO};
    use crate::DEFAULT_TOL;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn projector(i: usize) -> CMatrix {
        matrix_unit(2, i, i)
    }

    fn swap_matrix(d: usize) -> CMatrix {
        let mut s = zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                s[(b * d + a, a * d + b)] = ONE;
            }
        }
        s
    }

    fn probe(rows: usize, cols: usize, salt: u64) -> CMatrix {
        let mut state = salt.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(17);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    fn bip(da: usize, db: usize, e: CpMap) -> BipartiteMap {
        BipartiteMap::new(BipartiteDims::new(da, db), e).unwrap()
    }

    fn identity_map() -> BipartiteMap {
        bip(2, 2, CpMap::identity(4))
    }

    fn swap_map() -> BipartiteMap {
        bip(2, 2, CpMap::from_kraus_ops(vec![swap_matrix(2)], 1e-12).unwrap())
    }

    /// Measure Alice in the computational basis, apply X to Bob when the
    /// outcome is 1: `E(a ⊗ b) = Σ_i P_i a P_i ⊗ V_i† b V_i` with `V_0 = 1`,
    /// `V_1 = X`.
    fn measure_and_correct() -> BipartiteMap {
        let k0 = kron(&projector(0), &identity(2));
        let k1 = kron(&projector(1), &pauli_x());
        bip(2, 2, CpMap::from_kraus_ops(vec![k0, k1], 1e-12).unwrap())
    }

    fn cz_map() -> BipartiteMap {
        let mut cz = identity(4);
        cz[(3, 3)] = c(-1.0, 0.0);
        bip(2, 2, CpMap::from_kraus_ops(vec![cz], 1e-12).unwrap())
    }

    /// Selective projection on Alice, identity on Bob.
    fn selective_projective() -> BipartiteMap {
        bip(
            2,
            2,
            CpMap::from_kraus_ops(vec![kron(&projector(0), &identity(2))], 1e-12).unwrap(),
        )
    }

    fn dephasing() -> CpMap {
        CpMap::from_kraus_ops(vec![projector(0), projector(1)], 1e-12).unwrap()
    }

    fn depolarizing() -> CpMap {
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]);
        CpMap::from_kraus_ops(
            vec![
                identity(2).scale(0.5),
                pauli_x().scale(0.5),
                y.scale(0.5),
                z.scale(0.5),
            ],
            1e-12,
        )
        .unwrap()
    }

    // ---- A-side marginal ---------------------------------------------------

    #[test]
    fn identity_marginal_is_identity_with_zero_residual() {
        let (t, residual) = marginal_map_a(&identity_map());
        assert!(residual < 1e-14);
        assert!(t.choi_distance(&CpMap::identity(2)) < 1e-14);
    }

    #[test]
    fn swap_marginal_residual_is_sqrt_two() {
        let m = swap_map();
        let (_, residual) = marginal_map_a(&m);
        assert!((residual - 2.0_f64.sqrt()).abs() < 1e-12);
        // Oracle for the worst unit: E(|0⟩⟨1| ⊗ 1) = 1 ⊗ |0⟩⟨1|, whose
        // marginal is traceless, so the full image remains as deviation.
        let unit = kron(&matrix_unit(2, 0, 1), &identity(2));
        let image = m.map().apply_heisenberg(&unit).unwrap();
        let expected = kron(&identity(2), &matrix_unit(2, 0, 1));
        assert!(frob_dist(&image, &expected) < 1e-14);
        assert!((image.norm() - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn measure_and_correct_marginal_is_dephasing() {
        let (t, residual) = marginal_map_a(&measure_and_correct());
        assert!(residual < 1e-12);
        assert!(t.choi_distance(&dephasing()) < 1e-12);
    }

    #[test]
    fn unital_map_has_unital_marginal() {
        for m in [identity_map(), measure_and_correct(), cz_map()] {
            assert!(m.map().is_unital(1e-12));
            let (t, _) = marginal_map_a(&m);
            assert!(t.is_unital(1e-10));
        }
    }

    // ---- Directional verdicts ----------------------------------------------

    #[test]
    fn identity_is_blocked_both_ways() {
        let v = is_causal(&identity_map(), DEFAULT_TOL);
        assert!(v.semicausal_b_to_a_blocked);
        assert!(v.semicausal_a_to_b_blocked);
        assert!(v.causal);
        assert!(v.product_localizable);
        assert!(v.residual_b_to_a < 1e-13 && v.residual_a_to_b < 1e-13);
        assert!(v.t.is_some() && v.t_prime.is_some());
    }

    #[test]
    fn swap_signals_both_ways_with_sqrt_two_residuals() {
        let v = is_causal(&swap_map(), DEFAULT_TOL);
        assert!(!v.semicausal_b_to_a_blocked);
        assert!(!v.semicausal_a_to_b_blocked);
        assert!(!v.causal);
        assert!(!v.product_localizable);
        let root2 = 2.0_f64.sqrt();
        assert!((v.residual_b_to_a - root2).abs() < 1e-10);
        assert!((v.residual_a_to_b - root2).abs() < 1e-10);
        assert!(v.t.is_none() && v.t_prime.is_none());
    }

    #[test]
    fn measure_and_correct_blocks_only_bob_to_alice() {
        let m = measure_and_correct();
        let v = is_causal(&m, DEFAULT_TOL);
        assert!(v.semicausal_b_to_a_blocked);
        assert!(!v.semicausal_a_to_b_blocked);
        assert!(!v.causal);
        assert!(!v.product_localizable);

        // Frozen residual for the A → B direction, derived by hand:
        // E(1 ⊗ |0⟩⟨1|) = P₀ ⊗ |0⟩⟨1| + P₁ ⊗ |1⟩⟨0| while Q ⊗ T' averages
        // the two corrections, leaving deviation (P₀ − P₁) ⊗ (b − XbX)/2 of
        // norm 1. Independent evaluation:
        let unit = kron(&identity(2), &matrix_unit(2, 0, 1));
        let image = m.map().apply_heisenberg(&unit).unwrap();
        let direct = kron(&projector(0), &matrix_unit(2, 0, 1))
            + kron(&projector(1), &matrix_unit(2, 1, 0));
        assert!(frob_dist(&image, &direct) < 1e-14);
        assert!((v.residual_a_to_b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cz_signals_both_ways() {
        let v = is_causal(&cz_map(), DEFAULT_TOL);
        assert!(!v.semicausal_b_to_a_blocked);
        assert!(!v.semicausal_a_to_b_blocked);
        assert!(!v.product_localizable);
        let root2 = 2.0_f64.sqrt();
        assert!((v.residual_b_to_a - root2).abs() < 1e-10);
        assert!((v.residual_a_to_b - root2).abs() < 1e-10);
    }

    #[test]
    fn selective_projection_on_alice_blocks_both_ways() {
        let v = is_causal(&selective_projective(), DEFAULT_TOL);
        assert!(v.semicausal_b_to_a_blocked);
        assert!(v.semicausal_a_to_b_blocked);
        assert!(v.causal);
        assert!(v.product_localizable);
        assert!(v.residual_b_to_a < 1e-13);
        assert!(v.residual_a_to_b < 1e-13);
        // The map is selective: strictly subunital.
        assert!(v.t.as_ref().unwrap().is_subunital(1e-12));
        assert!(!v.t.as_ref().unwrap().is_unital(1e-8));
    }

    #[test]
    fn selective_map_on_bob_fails_the_forward_direction_only() {
        // id_A ⊗ (P·P): Bob's post-selection shifts Alice's raw marginal,
        // and no channel completion on Bob's side can represent it.
        let e = CpMap::from_kraus_ops(vec![kron(&identity(2), &projector(0))], 1e-12).unwrap();
        let v = is_causal(&bip(2, 2, e), DEFAULT_TOL);
        assert!(!v.semicausal_b_to_a_blocked);
        assert!(v.semicausal_a_to_b_blocked);
        assert!(!v.causal);
        // Product form exists, but its B factor is not a channel.
        assert!(!v.product_localizable);
    }

    #[test]
    fn mirror_equals_swapped_marginal_for_unital_maps() {
        for m in [identity_map(), measure_and_correct(), cz_map(), swap_map()] {
            let (t_mirror, r_mirror) = mirror_marginal_b(&m);
            let (t_swapped, r_swapped) = marginal_map_a(&m.swapped());
            assert!((r_mirror - r_swapped).abs() < 1e-12);
            assert!(t_mirror.choi_distance(&t_swapped) < 1e-12);
        }
    }

    #[test]
    fn swapped_conjugation_matches_direct_leg_exchange() {
        let m = measure_and_correct();
        let sw = m.swapped();
        let a = probe(2, 2, 1);
        let b = probe(2, 2, 2);
        let image = m.map().apply_heisenberg(&kron(&a, &b)).unwrap();
        let image_sw = sw.map().apply_heisenberg(&kron(&b, &a)).unwrap();
        assert!(frob_dist(&permute_legs(&image, &[2, 2], &[1, 0]), &image_sw) < 1e-13);
        // Swapping twice is the identity.
        assert!(sw.swapped().map().choi_distance(m.map()) < 1e-14);
    }

    // ---- Residual is basis robust ------------------------------------------

    #[test]
    fn residual_classification_survives_basis_rotation() {
        let rotation = polar_isometry(&probe(2, 2, 3));
        let rotated_residual = |m: &BipartiteMap| -> f64 {
            let (t, _) = marginal_map_a(m);
            let db = m.dims().db;
            let mut worst = 0.0_f64;
            for i in 0..m.dims().da {
                for j in 0..m.dims().da {
                    let unit = &rotation * matrix_unit(2, i, j) * rotation.adjoint();
                    let image = m.map().apply_heisenberg(&kron(&unit, &identity(db))).unwrap();
                    let t_a = t.apply_heisenberg(&unit).unwrap();
                    worst = worst.max(frob_dist(&image, &kron(&t_a, &identity(db))));
                }
            }
            worst
        };
        for (m, blocked) in [
            (identity_map(), true),
            (measure_and_correct(), true),
            (swap_map(), false),
            (cz_map(), false),
        ] {
            let (_, residual) = marginal_map_a(&m);
            let rotated = rotated_residual(&m);
            let da = m.dims().da as f64;
            // Zero/nonzero classification is basis independent, and the
            // value moves by at most a factor of the A dimension.
            assert_eq!(rotated < DEFAULT_TOL, blocked);
            assert!(rotated <= da * residual + 1e-12);
            assert!(residual <= da * rotated + 1e-12);
        }
    }

    // ---- Product localizability --------------------------------------------

    #[test]
    fn identity_product_splits_into_identity_factors() {
        let (ok, factors) = is_product_localizable(&identity_map(), DEFAULT_TOL);
        assert!(ok);
        let (g, f) = factors.unwrap();
        assert!(g.choi_distance(&CpMap::identity(2)) < 1e-10);
        assert!(f.choi_distance(&CpMap::identity(2)) < 1e-10);
    }

    #[test]
    fn swap_and_measure_and_correct_are_not_products() {
        assert!(!is_product_localizable(&swap_map(), DEFAULT_TOL).0);
        assert!(!is_product_localizable(&measure_and_correct(), DEFAULT_TOL).0);
        assert!(!is_product_localizable(&cz_map(), DEFAULT_TOL).0);
    }

    #[test]
    fn dephasing_times_depolarizing_splits_with_unital_factors() {
        let e = dephasing().tensor(&depolarizing());
        let m = bip(2, 2, e);
        let (ok, factors) = is_product_localizable(&m, DEFAULT_TOL);
        assert!(ok);
        let (g, f) = factors.unwrap();
        assert!(f.is_unital(1e-10));
        assert!(g.tensor(&f).choi_distance(m.map()) < 1e-10);
        assert!(g.choi_distance(&dephasing()) < 1e-10);
        assert!(f.choi_distance(&depolarizing()) < 1e-10);
    }

    #[test]
    fn scale_lands_on_alice_factor() {
        // 0.7 · (id ⊗ id): the product split must keep F unital and push
        // the scale into G.
        let e = CpMap::new(4, 4, CpMap::identity(4).choi().scale(0.7)).unwrap();
        let (ok, factors) = is_product_localizable(&bip(2, 2, e), DEFAULT_TOL);
        assert!(ok);
        let (g, f) = factors.unwrap();
        assert!(f.is_unital(1e-10));
        assert!(g.choi_distance(&CpMap::new(2, 2, CpMap::identity(2).choi().scale(0.7)).unwrap()) < 1e-10);
    }

    #[test]
    fn product_split_handles_unequal_factor_dimensions() {
        // A 3-level times 2-level product gives a wide 81 x 16 realignment
        // rectangle; the factor search must still resolve it as rank one
        // and hand back Hermitian pieces.
        let g = crate::corpus::random_channel(3, 3, 9, 206).unwrap();
        let f = crate::corpus::random_channel(2, 2, 3, 207).unwrap();
        let m = bip(3, 2, g.tensor(&f));
        let (ok, factors) = is_product_localizable(&m, DEFAULT_TOL);
        assert!(ok);
        let (gr, fr) = factors.unwrap();
        assert!(fr.is_unital(1e-9));
        assert!(gr.tensor(&fr).choi_distance(m.map()) < 1e-10);
    }

    #[test]
    fn selective_bob_factor_is_rejected_even_at_rank_one() {
        let e = CpMap::from_kraus_ops(vec![kron(&identity(2), &projector(0))], 1e-12).unwrap();
        let (ok, factors) = is_product_localizable(&bip(2, 2, e), DEFAULT_TOL);
        assert!(!ok);
        assert!(factors.is_none());
    }

    #[test]
    fn selective_alice_factor_is_accepted() {
        let (ok, factors) = is_product_localizable(&selective_projective(), DEFAULT_TOL);
        assert!(ok);
        let (g, f) = factors.unwrap();
        assert!(f.is_unital(1e-10));
        let projector_map = CpMap::from_kraus_ops(vec![projector(0)], 1e-12).unwrap();
        assert!(g.choi_distance(&projector_map) < 1e-10);
    }

    #[test]
    fn verdicts_respect_the_hierarchy() {
        for m in [
            identity_map(),
            swap_map(),
            measure_and_correct(),
            cz_map(),
            selective_projective(),
        ] {
            let v = is_causal(&m, DEFAULT_TOL);
            assert_eq!(v.causal, v.semicausal_b_to_a_blocked && v.semicausal_a_to_b_blocked);
            if v.product_localizable {
                assert!(v.causal);
            }
            assert!(v.residual_b_to_a >= 0.0 && v.residual_a_to_b >= 0.0);
        }
    }
}
