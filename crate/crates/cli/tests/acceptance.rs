//! Acceptance gate: one test per release criterion, each printing a
//! single PASS line (failures abort with the offending data). Tolerances
//! are pinned here and nowhere else.

use std::time::Instant;

use switchmax::analysis::{
    binary_pair, check_growth_bounds, check_similarity_invariance, classify_vertices,
    count_offdiagonal_reachable, trace_nk, PairId,
};
use switchmax::hull::{extreme_indices_2d, extreme_indices_lp, HullOptions};
use switchmax::instance::{AnyInstance, Arithmetic, Instance, Objective};
use switchmax::linalg::{Matrix, Vector};
use switchmax::num::{parse_rational, Num, Rational};
use switchmax::reductions::{
    dpll_satisfiable, export_minlp, sat_to_instance, CnfFormula, ReductionArtifact,
};
use switchmax::solver::{brute_force, layers, solve, SolverOptions};
use switchmax_cli::gen::{gen_random, GenSpec};
use switchmax_cli::rng::SplitMix64;

const FLOAT_REL_TOL: f64 = 1e-9;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn pass(criterion: usize, what: &str) {
    println!("acceptance {criterion}: PASS — {what}");
}

// -------------------------------------------------------------------
// 1. solver vs enumeration on seeded integer instances

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    for i in 0..200u64 {
        let spec = GenSpec {
            n: 2 + (i % 3) as usize,
            m: 2 + (i % 2) as usize,
            horizon: 4 + (i % 7) as usize,
            seed: 0xACCE0001 + i,
            arithmetic: Arithmetic::Exact,
        };
        let AnyInstance::Exact(inst) = gen_random(&spec).unwrap() else { unreachable!() };
        let r = solve(&inst, &opts()).unwrap();
        let (bv, _, _) = brute_force(&inst, &opts()).unwrap();
        assert_eq!(r.value, bv, "instance {i}: solver {} vs enumeration {}", r.value, bv);
        let x = inst.apply_sequence(&r.sequence).unwrap();
        let mut v = Rational::zero();
        for e in x.entries() {
            v = v.add(&e.mul(e));
        }
        assert_eq!(v, r.value, "instance {i}: sequence does not attain the value");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 60 s");
    pass(1, &format!("200 exact instances match enumeration ({elapsed:?})"));
}

// -------------------------------------------------------------------
// 2. the worked 2-D example

#[test]
fn criterion_02_reference_example() {
    let inst: Instance<Rational> = Instance::new(
        vec![
            Matrix::from_rows_i64(&[&[1, 1], &[1, 0]]),
            Matrix::from_rows_i64(&[&[1, 1], &[0, 1]]),
        ],
        Vector::from_i64(&[2, 1]),
        8,
        Objective::L2Sq,
    )
    .unwrap();
    let (bv, _, x8) = brute_force(&inst, &opts()).unwrap();
    for expect in [[53i64, 23], [58, 41], [71, 41]] {
        assert!(
            x8.points.contains(&Vector::from_i64(&expect)),
            "reachable set misses {expect:?}"
        );
    }
    let r = solve(&inst, &opts()).unwrap();
    assert_eq!(r.value, bv);
    assert_eq!(r.final_state, Vector::from_i64(&[89, 55]));
    pass(2, "K=8 reachable points and optimum reproduced exactly");
}

// -------------------------------------------------------------------
// 3. proven vertex-count bounds for the binary pairs

fn sample_a(rng: &mut SplitMix64, pair: PairId) -> Vector<Rational> {
    loop {
        let (x, y) = match pair {
            PairId::S1 => (rng.uniform_i64(1, 20), rng.uniform_i64(1, 20)),
            PairId::S2 => (rng.uniform_i64(-20, 20), rng.uniform_i64(-20, 20)),
            PairId::S3 | PairId::S4 => (rng.uniform_i64(0, 20), rng.uniform_i64(0, 20)),
            PairId::S5 => {
                let y = rng.uniform_i64(0, 20);
                (rng.uniform_i64(y, 20), y)
            }
        };
        if x != 0 || y != 0 {
            return Vector::from_i64(&[x, y]);
        }
    }
}

#[test]
fn criterion_03_growth_bounds() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE0003);
    for pair in [PairId::S1, PairId::S2, PairId::S3, PairId::S5] {
        for s in 0..20 {
            let a = sample_a(&mut rng, pair);
            let report = check_growth_bounds(pair, &a, 40, &opts()).unwrap();
            assert!(
                report.violations.is_empty(),
                "{pair:?} sample {s} a={:?}: violations {:?}",
                a.entries(),
                report.violations
            );
        }
    }
    // vertex-class sizes for pair 1 from the open first quadrant
    let hull_opts = HullOptions::default();
    for s in 0..20 {
        let a = sample_a(&mut rng, PairId::S1);
        let mats = binary_pair::<Rational>(PairId::S1);
        let inst = Instance::new(mats.to_vec(), a.clone(), 25, Objective::L1).unwrap();
        let (all, _) = layers(&inst, 25, &opts()).unwrap();
        for layer in all.iter().skip(2) {
            let pts: Vec<Vector<Rational>> = layer.points.iter().map(|p| p.x.clone()).collect();
            let c = classify_vertices(&pts, &hull_opts).unwrap();
            assert!(
                c.sets[1].len() <= layer.k + 1,
                "sample {s} k={}: |E1|={} > k+1",
                layer.k,
                c.sets[1].len()
            );
            assert!(
                c.sets[3].len() <= 2,
                "sample {s} k={}: |E3|={} > 2",
                layer.k,
                c.sets[3].len()
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10 min");
    pass(3, &format!("binary-pair bounds and class sizes hold, 20 samples/region ({elapsed:?})"));
}

// -------------------------------------------------------------------
// 4. off-diagonal reachable points stay linear in k

#[test]
fn criterion_04_quadrant_count() {
    let mut rng = SplitMix64::new(0xACCE0004);
    let mats = binary_pair::<Rational>(PairId::S1);
    for s in 0..20 {
        let a = Vector::from_i64(&[rng.uniform_i64(1, 20), rng.uniform_i64(-20, -1)]);
        let inst = Instance::new(mats.to_vec(), a.clone(), 0, Objective::L1).unwrap();
        for k in 0..=14 {
            let c = count_offdiagonal_reachable(&inst, k, &opts()).unwrap();
            assert!(
                c <= 4 * k + 4,
                "sample {s} a={:?} k={k}: count {c} > 4k+4",
                a.entries()
            );
        }
    }
    pass(4, "|X_k ∩ (int Q2 ∪ int Q4)| ≤ 4k+4 over 20 samples, k ≤ 14");
}

// -------------------------------------------------------------------
// 5. conjugation leaves the vertex counts unchanged

#[test]
fn criterion_05_similarity_invariance() {
    let mut rng = SplitMix64::new(0xACCE0005);
    let unimodular = |rng: &mut SplitMix64| -> Matrix<Rational> {
        let mut s: Matrix<Rational> = Matrix::identity(2);
        for _ in 0..4 {
            let e: Matrix<Rational> = match rng.uniform_i64(0, 2) {
                0 => Matrix::from_rows_i64(&[&[1, rng.uniform_i64(-2, 2)], &[0, 1]]),
                1 => Matrix::from_rows_i64(&[&[1, 0], &[rng.uniform_i64(-2, 2), 1]]),
                _ => Matrix::from_rows_i64(&[&[0, 1], &[1, 0]]),
            };
            s = s.mat_mul(&e).unwrap();
        }
        s
    };
    for t in 0..50 {
        let mats: Vec<Matrix<Rational>> = (0..2)
            .map(|_| {
                let entries =
                    (0..4).map(|_| Rational::from_i64(rng.uniform_i64(-3, 3))).collect();
                Matrix::new(2, entries).unwrap()
            })
            .collect();
        let a = Vector::from_i64(&[rng.uniform_i64(-5, 5), rng.uniform_i64(-5, 5)]);
        let s = unimodular(&mut rng);
        assert!(
            check_similarity_invariance(&mats, &s, &a, 12, &opts()).unwrap(),
            "triple {t}: counts differ after conjugation"
        );
    }
    pass(5, "N_k invariant under 50 unimodular conjugations, k ≤ 12");
}

// -------------------------------------------------------------------
// 6. structured families

#[test]
fn criterion_06_structured_families() {
    let mut rng = SplitMix64::new(0xACCE0006);
    let rand_mat = |rng: &mut SplitMix64, lo: i64, hi: i64| -> Matrix<Rational> {
        let entries = (0..4).map(|_| Rational::from_i64(rng.uniform_i64(lo, hi))).collect();
        Matrix::new(2, entries).unwrap()
    };
    let det2 = |m: &Matrix<Rational>| m.get(0, 0).mul(m.get(1, 1)).sub(&m.get(0, 1).mul(m.get(1, 0)));
    let rank_one = |rng: &mut SplitMix64| -> Matrix<Rational> {
        loop {
            let (u0, u1) = (rng.uniform_i64(-3, 3), rng.uniform_i64(-3, 3));
            let (v0, v1) = (rng.uniform_i64(-3, 3), rng.uniform_i64(-3, 3));
            if (u0, u1) == (0, 0) || (v0, v1) == (0, 0) {
                continue;
            }
            return Matrix::from_rows_i64(&[&[u0 * v0, u0 * v1], &[u1 * v0, u1 * v1]]);
        }
    };
    let check = |mats: &[Matrix<Rational>], a: &Vector<Rational>, bound: &dyn Fn(usize) -> usize, label: &str| {
        let t = trace_nk(label, mats, a, 30, &opts()).unwrap();
        for (k, &n) in t.counts.iter().enumerate() {
            assert!(n <= bound(k), "{label}: N_{k} = {n} > {}", bound(k));
        }
    };

    for s in 0..10 {
        let a = Vector::from_i64(&[rng.uniform_i64(-5, 5), rng.uniform_i64(1, 5)]);
        // one full-rank matrix plus m-1 rank-one matrices
        let full = loop {
            let m = rand_mat(&mut rng, -3, 3);
            if !det2(&m).is_zero() {
                break m;
            }
        };
        let m_count = 2 + (s % 2);
        let mut mats = vec![full];
        for _ in 1..m_count {
            mats.push(rank_one(&mut rng));
        }
        check(&mats, &a, &|k| 1 + 2 * k * (m_count - 1), "rank-one");

        // common eigenvector e1: upper-triangular pair
        let tri = |rng: &mut SplitMix64| {
            Matrix::from_rows_i64(&[
                &[rng.uniform_i64(1, 4), rng.uniform_i64(-3, 3)],
                &[0, rng.uniform_i64(1, 4)],
            ])
        };
        let mats = vec![tri(&mut rng), tri(&mut rng)];
        check(&mats, &a, &|k| if k == 0 { 1 } else { 2 * k }, "shared-eigenvector");

        // commuting pair (A, A^2)
        let base = rand_mat(&mut rng, -2, 2);
        let mats = vec![base.clone(), base.mat_mul(&base).unwrap()];
        check(&mats, &a, &|k| k + 1, "commuting");
    }
    pass(6, "rank-one, shared-eigenvector, and commuting bounds hold, k ≤ 30");
}

// -------------------------------------------------------------------
// 7. satisfiability reduction soundness

fn random_formula(rng: &mut SplitMix64) -> CnfFormula {
    let nv = rng.uniform_i64(2, 4) as usize;
    let nc = rng.uniform_i64(1, 6) as usize;
    let clauses = (0..nc)
        .map(|_| {
            let mut lits = [0i32; 3];
            for l in &mut lits {
                let v = rng.uniform_i64(1, nv as i64) as i32;
                *l = if rng.uniform_i64(0, 1) == 0 { v } else { -v };
            }
            lits
        })
        .collect();
    CnfFormula::new(nv, clauses).unwrap()
}

fn canonical_unsat() -> CnfFormula {
    let mut clauses = Vec::new();
    for s1 in [1i32, -1] {
        for s2 in [1i32, -1] {
            for s3 in [1i32, -1] {
                clauses.push([s1, 2 * s2, 3 * s3]);
            }
        }
    }
    CnfFormula::new(3, clauses).unwrap()
}

#[test]
fn criterion_07_reduction_soundness() {
    let mut rng = SplitMix64::new(0xACCE0007);
    for i in 0..100 {
        let f = random_formula(&mut rng);
        let art: ReductionArtifact<Rational> = sat_to_instance(&f, false).unwrap();
        // the exact optimum over all 2^n sequences
        let (optimum, _, _) = brute_force(&art.instance, &opts()).unwrap();
        let sat = dpll_satisfiable(&f);
        assert_eq!(
            optimum == art.threshold,
            sat,
            "formula {i} ({} vars, {} clauses): optimum {} threshold {} dpll {}",
            f.num_vars,
            f.num_clauses(),
            optimum,
            art.threshold,
            sat
        );
        // the layered solver agrees with enumeration on a subsample
        if i % 10 == 0 {
            let r = solve(&art.instance, &opts()).unwrap();
            assert_eq!(r.value, optimum, "formula {i}: solver disagrees with enumeration");
        }
    }
    let f = canonical_unsat();
    assert!(!dpll_satisfiable(&f));
    let art: ReductionArtifact<Rational> = sat_to_instance(&f, false).unwrap();
    let r = solve(&art.instance, &opts()).unwrap();
    assert!(r.value < art.threshold);
    assert_eq!(r.value, Rational::from_i64(7));
    pass(7, "satisfiability ⇔ optimum reaches clause count, 100 formulas + canonical unsat");
}

// -------------------------------------------------------------------
// 8. wall-clock budgets on the large seeded instances

fn timed_solve(n: usize, m: usize, horizon: usize, seed: u64) -> f64 {
    let spec = GenSpec { n, m, horizon, seed, arithmetic: Arithmetic::Float };
    let AnyInstance::Float(inst) = gen_random(&spec).unwrap() else { unreachable!() };
    let options = SolverOptions { rescale: true, ..SolverOptions::default() };
    let start = Instant::now();
    let r = solve(&inst, &options).unwrap();
    assert!(r.value.is_finite(), "rescaled value overflowed");
    start.elapsed().as_secs_f64()
}

#[test]
fn criterion_08_performance() {
    let t1 = timed_solve(2, 2, 500, 0xACCE0008);
    assert!(t1 < 10.0, "(2,2,500) took {t1:.3} s, budget 10 s");
    let t2 = timed_solve(2, 10, 500, 0xACCE0009);
    assert!(t2 < 10.0, "(2,10,500) took {t2:.3} s, budget 10 s");
    let t3 = timed_solve(5, 5, 100, 0xACCE000A);
    assert!(t3 < 60.0, "(5,5,100) took {t3:.3} s, budget 60 s");
    pass(8, &format!("(2,2,500) {t1:.3} s, (2,10,500) {t2:.3} s, (5,5,100) {t3:.3} s"));
}

// -------------------------------------------------------------------
// 9. hull engines against an orientation-only oracle

/// A point is a hull vertex exactly when all difference vectors to the
/// other (deduplicated) points fit in an open half-plane whose boundary
/// ray passes through one of them.
fn oracle_extreme(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let l = points.len();
    let mut out = Vec::new();
    for i in 0..l {
        if l == 1 {
            out.push(points[i]);
            continue;
        }
        let vs: Vec<(i128, i128)> = (0..l)
            .filter(|&j| j != i)
            .map(|j| {
                ((points[j].0 - points[i].0) as i128, (points[j].1 - points[i].1) as i128)
            })
            .collect();
        let extreme = vs.iter().any(|&v| {
            vs.iter().all(|&w| {
                let cross = v.0 * w.1 - v.1 * w.0;
                cross > 0 || (cross == 0 && v.0 * w.0 + v.1 * w.1 > 0)
            })
        });
        if extreme {
            out.push(points[i]);
        }
    }
    out
}

#[test]
fn criterion_09_hull_engine_equivalence() {
    let mut rng = SplitMix64::new(0xACCE000B);
    let hull_opts = HullOptions::default();
    for set_id in 0..1000 {
        let size = rng.uniform_i64(1, 200) as usize;
        let mut raw: Vec<(i64, i64)> =
            vec![(rng.uniform_i64(-30, 30), rng.uniform_i64(-30, 30))];
        while raw.len() < size {
            match rng.uniform_i64(0, 3) {
                0 => {
                    // duplicate an existing point
                    let i = rng.uniform_i64(0, raw.len() as i64 - 1) as usize;
                    raw.push(raw[i]);
                }
                1 => {
                    // extend a collinear run: 2b - a
                    let i = rng.uniform_i64(0, raw.len() as i64 - 1) as usize;
                    let j = rng.uniform_i64(0, raw.len() as i64 - 1) as usize;
                    let (a, b) = (raw[i], raw[j]);
                    raw.push((2 * b.0 - a.0, 2 * b.1 - a.1));
                }
                _ => raw.push((rng.uniform_i64(-30, 30), rng.uniform_i64(-30, 30))),
            }
        }
        let mut dedup = raw.clone();
        dedup.sort_unstable();
        dedup.dedup();
        let mut expect = oracle_extreme(&dedup);
        expect.sort_unstable();

        let pts: Vec<Vector<Rational>> =
            dedup.iter().map(|&(x, y)| Vector::from_i64(&[x, y])).collect();
        let to_pairs = |idx: Vec<usize>| -> Vec<(i64, i64)> {
            let mut v: Vec<(i64, i64)> = idx.into_iter().map(|i| dedup[i]).collect();
            v.sort_unstable();
            v
        };
        let graham = to_pairs(extreme_indices_2d(&pts, &hull_opts));
        let lp = to_pairs(extreme_indices_lp(&pts, &hull_opts).unwrap());
        assert_eq!(graham, expect, "set {set_id}: scan engine disagrees with oracle");
        assert_eq!(lp, expect, "set {set_id}: separation engine disagrees with oracle");
    }
    pass(9, "scan = separation = orientation oracle on 1000 seeded point sets");
}

// -------------------------------------------------------------------
// 10. the exported bilinear model reproduces the solver's answer

struct DatFile {
    n: usize,
    m: usize,
    k: usize,
    a: Vec<Rational>,
    mats: Vec<Matrix<Rational>>,
}

fn parse_dat(text: &str) -> DatFile {
    let mut n = 0;
    let mut m = 0;
    let mut k = 0;
    let mut a: Vec<Rational> = Vec::new();
    let mut entries: Vec<(usize, usize, usize, Rational)> = Vec::new();
    let mut section = "";
    for line in text.lines() {
        let line = line.trim().trim_end_matches(';').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("param ") {
            let mut it = rest.split(":=");
            let name = it.next().unwrap().trim();
            let value = it.next().map(str::trim).unwrap_or("");
            match name {
                "n" => n = value.parse().unwrap(),
                "m" => m = value.parse().unwrap(),
                "K" => k = value.parse().unwrap(),
                "a" | "A" => section = if name == "a" { "a" } else { "A" },
                _ => panic!("unexpected param {name}"),
            }
            continue;
        }
        match section {
            "a" => {
                let mut it = line.split_whitespace();
                let _idx: usize = it.next().unwrap().parse().unwrap();
                a.push(parse_rational(it.next().unwrap()).unwrap());
            }
            "A" => {
                let (idx, val) = line.split_once(' ').unwrap();
                let idx = idx.trim_start_matches('[').trim_end_matches(']');
                let parts: Vec<usize> =
                    idx.split(',').map(|t| t.parse().unwrap()).collect();
                entries.push((
                    parts[0],
                    parts[1],
                    parts[2],
                    parse_rational(val.trim()).unwrap(),
                ));
            }
            _ => panic!("data outside a section: {line}"),
        }
    }
    let mut mats = vec![Matrix::zeros(n); m];
    for (l, i, j, v) in entries {
        mats[l - 1].set(i - 1, j - 1, v);
    }
    DatFile { n, m, k, a, mats }
}

fn check_export_exact(inst: &Instance<Rational>) {
    let export = export_minlp(inst).unwrap();
    let dat = parse_dat(&export.data);
    assert_eq!((dat.n, dat.m, dat.k), (inst.dim, inst.num_matrices(), inst.horizon));
    let r = solve(inst, &opts()).unwrap();
    // z from the optimal sequence; simulate the exported dynamics
    let mut x = Vector::new(dat.a.clone());
    for &l in &r.sequence {
        x = dat.mats[l].mat_vec(&x).unwrap();
    }
    assert_eq!(x, r.final_state, "exported dynamics disagree with the solver trajectory");
    let mut obj = Rational::zero();
    for e in x.entries() {
        obj = obj.add(&e.mul(e));
    }
    assert_eq!(obj, r.value, "exported objective disagrees");
}

fn check_export_float(inst: &Instance<f64>) {
    let export = export_minlp(inst).unwrap();
    let dat = parse_dat(&export.data);
    let r = solve(inst, &opts()).unwrap();
    let mut x: Vec<f64> = dat.a.iter().map(|v| v.to_f64()).collect();
    for &l in &r.sequence {
        let mut next = vec![0.0; dat.n];
        for (i, slot) in next.iter_mut().enumerate() {
            for j in 0..dat.n {
                *slot += dat.mats[l].get(i, j).to_f64() * x[j];
            }
        }
        x = next;
    }
    let obj: f64 = x.iter().map(|v| v * v).sum();
    let rel = (obj - r.value).abs() / r.value.abs().max(1.0);
    assert!(rel < FLOAT_REL_TOL, "objective relative error {rel}");
    for (i, e) in r.final_state.entries().iter().enumerate() {
        let rel = (x[i] - e).abs() / e.abs().max(1.0);
        assert!(rel < FLOAT_REL_TOL, "state {i} relative error {rel}");
    }
}

#[test]
fn criterion_10_minlp_export_round_trip() {
    for i in 0..10u64 {
        let spec = GenSpec {
            n: 2 + (i % 2) as usize,
            m: 2,
            horizon: 2 + (i % 3) as usize,
            seed: 0xACCE000C + i,
            arithmetic: Arithmetic::Exact,
        };
        let AnyInstance::Exact(inst) = gen_random(&spec).unwrap() else { unreachable!() };
        check_export_exact(&inst);
    }
    for i in 0..10u64 {
        let spec = GenSpec {
            n: 2 + (i % 2) as usize,
            m: 2,
            horizon: 3 + (i % 4) as usize,
            seed: 0xACCE0016 + i,
            arithmetic: Arithmetic::Float,
        };
        let AnyInstance::Float(inst) = gen_random(&spec).unwrap() else { unreachable!() };
        check_export_float(&inst);
    }
    pass(10, "20 exported models reproduce the solver's trajectory and value");
}
