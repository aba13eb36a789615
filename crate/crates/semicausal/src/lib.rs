//! Completely positive maps on finite-dimensional quantum systems, with a
//! focus on bipartite causality structure: which operations let one party
//! signal the other, and how non-signalling operations factor into local
//! parts joined by one-way communication.
//!
//! The central result implemented here: a bipartite operation `E` on
//! `B(H_A ⊗ H_B)` that cannot carry signals from Bob to Alice (that is,
//! `E(a ⊗ 1_B) = T(a) ⊗ 1_B` for some map `T` on Alice's algebra) can always
//! be written as
//!
//! ```text
//! E = (G ⊗ id_B) ∘ (id_A ⊗ F)
//! ```
//!
//! where, reading in the order the physical systems are acted on: Alice
//! applies `G`, producing an auxiliary system `C` that is sent to Bob, and
//! Bob applies the channel `F` consuming `C`. [`factorize::semilocalize`]
//! constructs `G`, `F`, and the auxiliary dimension `d_C` explicitly via
//! Stinespring dilation theory, and [`factorize::reconstruct`] puts them back
//! together so the round trip can be checked numerically.
//!
//! # Conventions
//!
//! All modules share the conventions below; they are load-bearing, since most
//! of the work is tensor-index bookkeeping.
//!
//! * **Pictures.** A map is stored once and used in both pictures. The
//!   Heisenberg-picture map `E` sends observables on the output space to
//!   observables on the input space, `E: B(H_out) → B(H_in)`; its Schrödinger
//!   dual `E_*` sends states on `H_in` to states on `H_out`. The two are
//!   linked by `tr(E_*(ρ)·a) = tr(ρ·E(a))`.
//! * **Choi matrix.** `choi(E) = Σ_ij |i⟩⟨j|_in ⊗ E_*(|i⟩⟨j|)`, unnormalized,
//!   a `(din·dout) × (din·dout)` matrix. `E` is completely positive iff
//!   `choi(E)` is positive semidefinite. The identity qubit map has
//!   `choi = |Ω⟩⟨Ω|` with `Ω = |00⟩ + |11⟩`.
//! * **Kraus operators.** `K_α` has shape `dout × din`;
//!   `E(a) = Σ_α K_α† a K_α` and `E_*(ρ) = Σ_α K_α ρ K_α†`. An operation is
//!   subunital (`E(1) ⪯ 1`); a channel is unital (`E(1) = 1`, equivalently
//!   `E_*` preserves trace).
//! * **Tensor indexing.** Row-major throughout: in any tensor product the
//!   left factor is the slow index. A composite index over dimensions
//!   `d_0, d_1, …` is `((i_0·d_1 + i_1)·d_2 + i_2)…`. Bipartite operators
//!   order legs `A ⊗ B`; Choi matrices of bipartite maps order legs
//!   `(A_in, B_in, A_out, B_out)`.
//! * **Composition.** `e2.compose(&e1)` is the map whose Schrödinger action
//!   applies `e1` first, then `e2`; in the Heisenberg picture this is
//!   `a ↦ e1(e2(a))`.
//! * **Tolerances.** Rank cutoffs are relative to the largest
//!   eigenvalue/singular value (default [`qmap::RANK_TOL`]); residual checks
//!   default to [`DEFAULT_TOL`]. Hermitian inputs are symmetrized on
//!   ingestion when the asymmetry is below tolerance and rejected otherwise.
//! * **Randomness.** All random objects are derived deterministically from a
//!   `u64` seed via ChaCha12 (see [`corpus`] for the exact draw order), so
//!   generated test data is reproducible bit for bit.

pub mod causality;
pub mod corpus;
pub mod dilation;
pub mod error;
pub mod factorize;
pub mod mat;
pub mod qmap;
pub mod schema;

pub use error::{Error, Result};
pub use mat::{CMatrix, C64};
pub use qmap::{BipartiteDims, CpMap, KrausSet};

/// Default tolerance for residual and predicate checks.
pub const DEFAULT_TOL: f64 = 1e-8;
