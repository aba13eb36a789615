//! Reference examples and seeded random instance generators.
//!
//! The named examples are small two-qubit maps pinned down by exact Kraus
//! operators, each with its known classification. They double as golden
//! content for the JSON corpus shipped with the CLI.
//!
//! Randomness is deterministic by construction: every generator consumes a
//! single ChaCha12 stream seeded from a `u64`, uniform doubles come from
//! the top 53 bits of `next_u64`, and complex Gaussians take one
//! Box-Muller pair per entry, filled row by row. The same seed therefore
//! reproduces the same instance bit for bit on any platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::causality::BipartiteMap;
use crate::error::{Error, Result};
use crate::factorize::reconstruct;
use crate::mat::{identity, kron, matrix_unit, orthonormalize_columns, svd_sorted, CMatrix, C64, ONE, ZERO};
use crate::qmap::{BipartiteDims, CpMap};

/// Expected classification of a named example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedVerdict {
    pub semicausal_b_to_a_blocked: bool,
    pub semicausal_a_to_b_blocked: bool,
    pub causal: bool,
    pub product_localizable: bool,
}

/// A pinned reference map with its exact Kraus operators and known verdict.
#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: &'static str,
    pub description: &'static str,
    pub kraus: Vec<CMatrix>,
    pub map: BipartiteMap,
    pub expected: ExpectedVerdict,
}

/// Names accepted by [`named`], in corpus order.
pub const NAMED_EXAMPLE_NAMES: [&str; 6] = [
    "identity",
    "swap",
    "measure_and_correct",
    "product_depolarizing",
    "cz_unitary",
    "selective_projective",
];

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
}

fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::new(-1.0, 0.0)])
}

fn build(
    name: &'static str,
    description: &'static str,
    kraus: Vec<CMatrix>,
    expected: (bool, bool, bool, bool),
) -> NamedExample {
    let e = CpMap::from_kraus_ops(kraus.clone(), 1e-12).expect("pinned Kraus sets are valid");
    let map = BipartiteMap::new(BipartiteDims::new(2, 2), e).expect("all named examples are 2x2");
    let (b_to_a, a_to_b, causal, product_localizable) = expected;
    NamedExample {
        name,
        description,
        kraus,
        map,
        expected: ExpectedVerdict {
            semicausal_b_to_a_blocked: b_to_a,
            semicausal_a_to_b_blocked: a_to_b,
            causal,
            product_localizable,
        },
    }
}

/// Looks up a named example; see [`NAMED_EXAMPLE_NAMES`].
pub fn named(name: &str) -> Result<NamedExample> {
    let p0 = matrix_unit(2, 0, 0);
    let p1 = matrix_unit(2, 1, 1);
    match name {
        "identity" => Ok(build(
            "identity",
            "do nothing on either side",
            vec![identity(4)],
            (true, true, true, true),
        )),
        "swap" => Ok(build(
            "swap",
            "exchange the two qubits; signals maximally in both directions",
            vec![{
                let mut s = crate::mat::zeros(4, 4);
                for a in 0..2 {
                    for b in 0..2 {
                        s[(b * 2 + a, a * 2 + b)] = ONE;
                    }
                }
                s
            }],
            (false, false, false, false),
        )),
        "measure_and_correct" => Ok(build(
            "measure_and_correct",
            "measure A in the computational basis, flip B when the outcome is 1",
            vec![kron(&p0, &identity(2)), kron(&p1, &pauli_x())],
            (true, false, false, false),
        )),
        "product_depolarizing" => Ok(build(
            "product_depolarizing",
            "dephase A and fully depolarize B, independently",
            {
                let deph = [p0.clone(), p1.clone()];
                let depo = [
                    identity(2).scale(0.5),
                    pauli_x().scale(0.5),
                    pauli_y().scale(0.5),
                    pauli_z().scale(0.5),
                ];
                let mut ops = Vec::with_capacity(8);
                for a in &deph {
                    for b in &depo {
                        ops.push(kron(a, b));
                    }
                }
                ops
            },
            (true, true, true, true),
        )),
        "cz_unitary" => Ok(build(
            "cz_unitary",
            "controlled-Z gate; entangling, signals in both directions",
            vec![{
                let mut cz = identity(4);
                cz[(3, 3)] = C64::new(-1.0, 0.0);
                cz
            }],
            (false, false, false, false),
        )),
        "selective_projective" => Ok(build(
            "selective_projective",
            "post-select A onto |0>, leave B alone; subunital but signal free",
            vec![kron(&p0, &identity(2))],
            (true, true, true, true),
        )),
        other => Err(Error::UnknownExample { name: other.to_string() }),
    }
}

/// All named examples in corpus order.
pub fn named_examples() -> Vec<NamedExample> {
    NAMED_EXAMPLE_NAMES
        .iter()
        .map(|n| named(n).expect("names in the list resolve"))
        .collect()
}

fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gaussian(rng: &mut ChaCha12Rng) -> C64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let phi = std::f64::consts::TAU * u2;
    C64::new(r * phi.cos(), r * phi.sin())
}

fn gaussian_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = crate::mat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = gaussian(rng);
        }
    }
    m
}

fn unital_channel_from(
    rng: &mut ChaCha12Rng,
    din: usize,
    dout: usize,
    kraus_rank: usize,
) -> Result<CpMap> {
    if kraus_rank == 0 || kraus_rank > din * dout {
        return Err(Error::KrausRankOutOfRange {
            requested: kraus_rank,
            max: din * dout,
            din,
            dout,
        });
    }
    if kraus_rank * dout < din {
        return Err(Error::UnitalInfeasible { kraus_rank, din, dout });
    }
    let v = orthonormalize_columns(&gaussian_matrix(rng, kraus_rank * dout, din))?;
    let ops: Vec<CMatrix> = (0..kraus_rank)
        .map(|alpha| CMatrix::from_fn(dout, din, |m, i| v[(m * kraus_rank + alpha, i)]))
        .collect();
    CpMap::from_kraus_ops(ops, 1e-10)
}

/// Draws a Haar-flavoured unital channel with exactly `kraus_rank` Kraus
/// operators: a Gaussian `(kraus_rank·dout) × din` matrix is orthonormalized
/// column by column, so `Σ K†K = 1` holds to machine precision.
pub fn random_channel(din: usize, dout: usize, kraus_rank: usize, seed: u64) -> Result<CpMap> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    unital_channel_from(&mut rng, din, dout, kraus_rank)
}

/// Draws a semicausal map on `d_A ⊗ d_B` by sampling the factored form
/// directly: Bob's side is a random unital channel `F: B(H_B) → B(H_CB)`
/// with full Kraus rank `d_c·d_B`, Alice's side is `G(x) = W† x W` for a
/// Gaussian `W`. With `selective` the operator `W` is rescaled to norm 0.8,
/// making the composite strictly subunital; otherwise `W` is orthonormalized
/// into an isometry and the composite is a channel.
///
/// Draw order is fixed: the entries of `F`'s Gaussian first, then `W`'s,
/// all from one ChaCha12 stream.
pub fn random_semicausal(
    da: usize,
    db: usize,
    d_c: usize,
    seed: u64,
    selective: bool,
) -> Result<BipartiteMap> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let f = unital_channel_from(&mut rng, d_c * db, db, d_c * db)?;
    let w_raw = gaussian_matrix(&mut rng, da * d_c, da);
    let w = if selective {
        let (_, s, _) = svd_sorted(&w_raw);
        w_raw.scale(1.0 / (s[0] * 1.25))
    } else {
        orthonormalize_columns(&w_raw)?
    };
    let g = CpMap::from_kraus_ops(vec![w], 1e-10)?;
    reconstruct(&g, &f, BipartiteDims::new(da, db), d_c)
}
