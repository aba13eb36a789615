//! Acceptance gate for the crate: each test pins one externally visible
//! guarantee, prints a single [PASS]/[FAIL] line, and fails loudly if the
//! guarantee is not met. Tolerances are fixed here, not configurable.

use std::time::Instant;

use semicausal::causality::{is_causal, is_semicausal, marginal_map_a};
use semicausal::corpus::{named, named_examples, random_channel, random_semicausal};
use semicausal::dilation::{connecting_isometry, Dilation};
use semicausal::error::Error;
use semicausal::factorize::semilocalize;
use semicausal::mat::{polar_isometry, zeros, C64, CMatrix};
use semicausal::qmap::CpMap;

const FACTOR_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-8;
const UNITALITY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;
const SQRT2_TOL: f64 = 1e-10;
const CONNECTOR_TOL: f64 = 1e-10;
const PAIRING_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;
const TIME_BUDGET_SECS: f64 = 60.0;

fn report(ok: bool, what: &str, detail: &str) {
    if ok {
        println!("[PASS] {what}");
    } else {
        println!("[FAIL] {what}: {detail}");
    }
    assert!(ok, "{what}: {detail}");
}

fn probe(rows: usize, cols: usize, salt: u64) -> CMatrix {
    let mut state = salt.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(41);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    CMatrix::from_fn(rows, cols, |_, _| C64::new(next(), next()))
}

fn probe_subunital(din: usize, dout: usize, count: usize, salt: u64) -> CpMap {
    let ops: Vec<CMatrix> = (0..count).map(|a| probe(dout, din, salt * 43 + a as u64)).collect();
    let mut sum = zeros(din, din);
    for k in &ops {
        sum += k.adjoint() * k;
    }
    let norm = sum.norm();
    CpMap::from_kraus_ops(
        ops.into_iter().map(|k| k.scale(1.0 / (norm.sqrt() * 1.1))).collect(),
        1e-9,
    )
    .unwrap()
}

fn hermitian_probe(d: usize, salt: u64) -> CMatrix {
    let raw = probe(d, d, salt);
    (&raw + raw.adjoint()).scale(0.5)
}

#[test]
fn two_hundred_random_semicausal_maps_factor_and_reassemble() {
    let start = Instant::now();
    let mut worst_residual = 0.0_f64;
    let mut worst_unitality = 0.0_f64;
    let mut count = 0usize;
    for da in [2usize, 3] {
        for db in [2usize, 3] {
            for d_c in [1usize, 2] {
                for seed in 0u64..25 {
                    let selective = seed % 2 == 1;
                    let m = random_semicausal(da, db, d_c, 1000 + count as u64, selective).unwrap();
                    let d = semilocalize(&m, FACTOR_TOL).unwrap();
                    worst_residual = worst_residual.max(d.reconstruction_residual);
                    worst_unitality = worst_unitality.max(d.f_unitality);
                    count += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        count == 200
            && worst_residual < ROUND_TRIP_TOL
            && worst_unitality < UNITALITY_TOL
            && elapsed < TIME_BUDGET_SECS,
        "200 random semicausal maps factor with residual < 1e-8, F defect < 1e-10, under 60 s",
        &format!(
            "count {count}, worst residual {worst_residual:.3e}, worst F defect {worst_unitality:.3e}, {elapsed:.1} s"
        ),
    );
}

#[test]
fn two_hundred_reassembled_factor_pairs_are_semicausal() {
    let mut worst = 0.0_f64;
    let mut count = 0usize;
    for da in [2usize, 3] {
        for db in [2usize, 3] {
            for d_c in [1usize, 2] {
                for seed in 0u64..25 {
                    let selective = seed % 3 == 1;
                    let m = random_semicausal(da, db, d_c, 7000 + count as u64, selective).unwrap();
                    let check = is_semicausal(&m, RESIDUAL_TOL);
                    worst = worst.max(check.residual);
                    count += 1;
                }
            }
        }
    }
    report(
        count == 200 && worst < RESIDUAL_TOL,
        "200 maps assembled from (G, F) factor pairs block B -> A with residual < 1e-10",
        &format!("count {count}, worst residual {worst:.3e}"),
    );
}

#[test]
fn swap_is_rejected_with_sqrt_two_residuals_in_both_directions() {
    let swap = named("swap").unwrap().map;
    let verdict = is_causal(&swap, FACTOR_TOL);
    let root2 = 2.0_f64.sqrt();
    let residuals_pin = (verdict.residual_b_to_a - root2).abs() < SQRT2_TOL
        && (verdict.residual_a_to_b - root2).abs() < SQRT2_TOL;
    let rejected = matches!(
        semilocalize(&swap, FACTOR_TOL),
        Err(Error::NotSemicausal { .. })
    );
    let exit_code = std::process::Command::new(env!("CARGO_BIN_EXE_semicausal"))
        .args([
            "decompose",
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/swap.json"),
            "--out",
        ])
        .arg(std::env::temp_dir().join("acceptance_swap_factors"))
        .output()
        .expect("binary runs")
        .status
        .code();
    report(
        !verdict.semicausal_b_to_a_blocked
            && !verdict.semicausal_a_to_b_blocked
            && residuals_pin
            && rejected
            && exit_code == Some(1),
        "swap is rejected both ways with residual sqrt(2) and decompose exits 1",
        &format!(
            "blocked ({}, {}), residuals ({:.12}, {:.12}), rejected {rejected}, exit {exit_code:?}",
            verdict.semicausal_b_to_a_blocked,
            verdict.semicausal_a_to_b_blocked,
            verdict.residual_b_to_a,
            verdict.residual_a_to_b
        ),
    );
}

#[test]
fn message_dimension_is_the_marginal_choi_rank_and_bounded() {
    let identity = named("identity").unwrap().map;
    let d_id = semilocalize(&identity, FACTOR_TOL).unwrap();

    let mc = named("measure_and_correct").unwrap().map;
    let d_mc = semilocalize(&mc, FACTOR_TOL).unwrap();

    let mut economy = d_id.d_c == 1 && d_id.d_d == 1 && d_mc.d_c == 2;
    let mut detail = format!(
        "identity (d_C, d_D) = ({}, {}), measure_and_correct d_C = {}",
        d_id.d_c, d_id.d_d, d_mc.d_c
    );
    for (m, label) in [(&identity, "identity"), (&mc, "measure_and_correct")] {
        let (t, _) = marginal_map_a(m);
        let d = semilocalize(m, FACTOR_TOL).unwrap();
        let da = m.dims().da;
        if d.d_c != t.choi_rank(RANK_TOL) || d.d_c > da * da {
            economy = false;
            detail = format!("{label}: d_C {} vs rank {}", d.d_c, t.choi_rank(RANK_TOL));
        }
    }
    for seed in 0u64..20 {
        let m = random_semicausal(2, 2, 2, 3000 + seed, seed % 2 == 0).unwrap();
        let (t, _) = marginal_map_a(&m);
        let d = semilocalize(&m, FACTOR_TOL).unwrap();
        if d.d_c != t.choi_rank(RANK_TOL) || d.d_c > 4 {
            economy = false;
            detail = format!("seed {seed}: d_C {} vs rank {}", d.d_c, t.choi_rank(RANK_TOL));
        }
    }
    report(
        economy,
        "message dimension equals the marginal Choi rank, trivial for identity, 2 for measure_and_correct, never above dA^2",
        &detail,
    );
}

#[test]
fn one_hundred_minimal_dilation_pairs_connect_by_a_unitary() {
    let mut worst_defect = 0.0_f64;
    let mut count = 0usize;
    'outer: for din in 1usize..=4 {
        for dout in 1usize..=4 {
            for variant in 0u64..7 {
                if count == 100 {
                    break 'outer;
                }
                let max_rank = din * dout;
                let feasible = din.div_ceil(dout);
                let rank = feasible + (variant as usize) % (max_rank - feasible + 1);
                let e = random_channel(din, dout, rank, 5000 + count as u64).unwrap();
                let ops = e.kraus(RANK_TOL).unwrap().operators().to_vec();
                let d1 = Dilation::from_kraus_ops(din, dout, &ops);
                let k = d1.k();
                let r = polar_isometry(&probe(k, k, 6000 + count as u64));
                let remixed: Vec<CMatrix> = (0..k)
                    .map(|beta| {
                        let mut acc = zeros(dout, din);
                        for (alpha, op) in ops.iter().enumerate() {
                            acc += op * r[(beta, alpha)];
                        }
                        acc
                    })
                    .collect();
                let d2 = Dilation::from_kraus_ops(din, dout, &remixed);
                let u = connecting_isometry(&d1, &d2, FACTOR_TOL).unwrap();
                let gram_defect = u.defect();
                let co_defect = {
                    let uu = u.u() * u.u().adjoint();
                    semicausal::mat::frob_dist(&uu, &semicausal::mat::identity(u.ddst()))
                };
                worst_defect = worst_defect.max(gram_defect).max(co_defect);
                count += 1;
            }
        }
    }
    report(
        count == 100 && worst_defect < CONNECTOR_TOL,
        "100 remixed minimal dilation pairs connect by an isometry that is unitary to 1e-10",
        &format!("count {count}, worst defect {worst_defect:.3e}"),
    );
}

#[test]
fn one_hundred_duality_triples_pair_identically_in_both_pictures() {
    let mut worst = 0.0_f64;
    for case in 0u64..100 {
        let din = 1 + (case as usize) % 4;
        let dout = 1 + (case as usize / 4) % 4;
        let e = probe_subunital(din, dout, 1 + (case as usize) % 3, 9000 + case);
        let rho = hermitian_probe(din, 9500 + case);
        let a = hermitian_probe(dout, 9700 + case);
        let lhs = (e.apply_schrodinger(&rho).unwrap() * &a).trace();
        let rhs = (&rho * e.apply_heisenberg(&a).unwrap()).trace();
        let scale = rho.norm() * a.norm();
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    report(
        worst < PAIRING_TOL,
        "100 (map, state, observable) triples give equal traces in both pictures to 1e-10",
        &format!("worst normalized mismatch {worst:.3e}"),
    );
}

#[test]
fn named_corpus_verdicts_match_the_pinned_table_and_the_hierarchy() {
    let mut ok = true;
    let mut detail = String::new();
    for ex in named_examples() {
        let v = is_causal(&ex.map, FACTOR_TOL);
        let matches = v.semicausal_b_to_a_blocked == ex.expected.semicausal_b_to_a_blocked
            && v.semicausal_a_to_b_blocked == ex.expected.semicausal_a_to_b_blocked
            && v.causal == ex.expected.causal
            && v.product_localizable == ex.expected.product_localizable;
        let lattice = v.causal == (v.semicausal_b_to_a_blocked && v.semicausal_a_to_b_blocked)
            && (!v.product_localizable || v.causal);
        if !matches || !lattice {
            ok = false;
            detail = format!(
                "{}: got ({}, {}, {}, {})",
                ex.name,
                v.semicausal_b_to_a_blocked,
                v.semicausal_a_to_b_blocked,
                v.causal,
                v.product_localizable
            );
        }
    }
    report(
        ok,
        "all six named examples classify exactly as pinned and the verdict hierarchy holds",
        &detail,
    );
}

#[test]
fn fifty_selective_semicausal_maps_put_all_selectivity_into_alice() {
    let mut ok = true;
    let mut detail = String::new();
    let mut count = 0usize;
    for da in [2usize, 3] {
        for db in [2usize, 3] {
            for seed in 0u64..13 {
                if count == 50 {
                    break;
                }
                let m = random_semicausal(da, db, 2, 11_000 + count as u64, true).unwrap();
                let one = m.map().on_identity();
                let (evals, _) = semicausal::mat::eigh(&one);
                let strictly_subunital_input = evals.max() < 1.0 - 1e-6;

                let d = semilocalize(&m, FACTOR_TOL).unwrap();
                let (gvals, _) = semicausal::mat::eigh(&d.g.on_identity());
                let f_unital = d.f_unitality < UNITALITY_TOL && d.f.is_unital(1e-9);
                let g_strict = gvals.max() < 1.0 - 1e-6;
                if !(strictly_subunital_input && f_unital && g_strict) {
                    ok = false;
                    detail = format!(
                        "da {da} db {db} seed {seed}: input max eig {:.6}, F defect {:.3e}, G max eig {:.6}",
                        evals.max(),
                        d.f_unitality,
                        gvals.max()
                    );
                }
                count += 1;
            }
        }
    }
    report(
        ok && count == 50,
        "50 strictly subunital semicausal maps factor with a unital F and strictly subunital G",
        &format!("count {count}; {detail}"),
    );
}
