//! Acceptance criteria A1-A9. Each test prints one PASS/FAIL line.
//!
//! A8 is the extended run at the smallest size the certified parameters
//! allow (n = 2^20); it is `#[ignore]`d and runs with
//! `cargo test --release -p pathpower --test acceptance -- --ignored`.

use std::collections::HashSet;
use std::time::Instant;

use pathpower::builder::{audit_certificate, build_path_power, certificate_length_bound, BuildResult, Strategy};
use pathpower::extraction::{certify_params, find_transitive};
use pathpower::oracle::{
    ell_exact, longest_path_power, longest_path_power_brute, verify_path_power, EllScope,
    DEFAULT_BUDGET,
};
use pathpower::ordering::{check_window_degree, local_search, Ordering, SearchPolicy};
use pathpower::params::{LemmaParams, Mode};
use pathpower::tournament::{gen_implicit, gen_random, pair_count, Tournament, Vertex};

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn pairwise_transitive(t: &Tournament, xs: &[Vertex]) -> bool {
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            if xs[a] == xs[b] || !t.beats(xs[a], xs[b]) {
                return false;
            }
        }
    }
    true
}

#[test]
fn a1_definition_oracle_consistency() {
    let clock = Instant::now();
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for n in 1..=5usize {
        for code in 0..1u64 << pair_count(n) {
            let t = Tournament::from_code(n, code);
            for k in 1..=3 {
                let memo = longest_path_power(&t, k, DEFAULT_BUDGET).unwrap();
                let brute = longest_path_power_brute(&t, k);
                let ok = memo.exhaustive
                    && memo.length == brute.length
                    && memo.witness.len() == memo.length + 1
                    && verify_path_power(&t, &memo.witness, k).unwrap().is_empty();
                if !ok {
                    failures.push((n, code, k));
                }
                checked += 1;
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    report(
        "A1",
        failures.is_empty() && secs < 60.0,
        format!("{checked} (tournament, k) cases, {} mismatches, {secs:.2}s", failures.len()),
    );
}

#[test]
fn a2_hamiltonian_path_folklore() {
    let clock = Instant::now();
    let mut values = Vec::new();
    let mut ok = true;
    for n in 2..=6 {
        let r = ell_exact(n, 1, EllScope::All).unwrap();
        ok &= r.exhaustive && r.value == n - 1;
        values.push((n, r.value));
    }
    let secs = clock.elapsed().as_secs_f64();
    report("A2", ok && secs < 300.0, format!("ell(n,1) for n=2..6: {values:?}, {secs:.2}s"));
}

#[test]
#[allow(clippy::needless_range_loop)]
fn a3_small_squares() {
    let clock = Instant::now();
    let three = ell_exact(3, 2, EllScope::All).unwrap();
    let w = &three.witness;
    let cyclic = (w.beats(0, 1) && w.beats(1, 2) && w.beats(2, 0))
        || (w.beats(1, 0) && w.beats(2, 1) && w.beats(0, 2));
    let mut ok = three.value == 1 && three.exhaustive && cyclic;

    // table[n][k] for n = 2..6, k = 1..3
    let mut table = vec![vec![0usize; 4]; 7];
    for n in 2..=6 {
        for k in 1..=3 {
            let r = ell_exact(n, k, EllScope::All).unwrap();
            ok &= r.exhaustive;
            table[n][k] = r.value;
        }
    }
    let mut monotone = true;
    for n in 2..=6 {
        for k in 1..=3 {
            if n < 6 {
                monotone &= table[n + 1][k] >= table[n][k];
            }
            if k < 3 {
                monotone &= table[n][k + 1] <= table[n][k];
            }
        }
    }
    let squares: Vec<_> = (3..=6).map(|n| (n, table[n][2])).collect();
    let secs = clock.elapsed().as_secs_f64();
    report(
        "A3",
        ok && monotone && secs < 600.0,
        format!(
            "ell(3,2)={} (3-cycle witness: {cyclic}); ell(n,2) {squares:?}; monotone: {monotone}; {secs:.2}s",
            three.value
        ),
    );
}

#[test]
fn a4_transitive_extraction_guarantee() {
    let clock = Instant::now();
    let mut failures = 0;
    let mut runs = 0;
    for m in 2..=6usize {
        let size = 1usize << (m - 1);
        for i in 0..500u64 {
            let t = gen_random(size, 1_000 * m as u64 + i);
            let u: Vec<Vertex> = (0..size).collect();
            match find_transitive(&t, &u, m) {
                Some(x) if x.len() == m && pairwise_transitive(&t, &x) => {}
                _ => failures += 1,
            }
            runs += 1;
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    report(
        "A4",
        failures == 0 && secs < 60.0,
        format!("{runs} extractions on 2^(m-1) vertices, m=2..6, {failures} failures, {secs:.2}s"),
    );
}

/// Largest relocation gain over all (vertex, target) pairs, by running sums.
fn max_relocation_gain(t: &Tournament, perm: &[Vertex]) -> i64 {
    let n = perm.len();
    let mut best = i64::MIN;
    for p in 0..n {
        let v = perm[p];
        let mut acc = 0i64;
        for &w in &perm[p + 1..] {
            acc += if t.beats(w, v) { 1 } else { -1 };
            best = best.max(acc);
        }
        acc = 0;
        for &w in perm[..p].iter().rev() {
            acc += if t.beats(v, w) { 1 } else { -1 };
            best = best.max(acc);
        }
    }
    best
}

#[test]
fn a5_local_optimum_invariants() {
    let mut worst_secs: f64 = 0.0;
    let mut improving = 0;
    let mut backward_adjacent = 0;
    for seed in 0..50u64 {
        let clock = Instant::now();
        let t = gen_random(200, 50_000 + seed);
        let mut ord = Ordering::identity(200);
        let stats = local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        assert!(stats.converged);
        if max_relocation_gain(&t, ord.as_slice()) > 0 {
            improving += 1;
        }
        backward_adjacent += (0..199)
            .filter(|&p| !t.beats(ord.vertex_at(p), ord.vertex_at(p + 1)))
            .count();
        worst_secs = worst_secs.max(clock.elapsed().as_secs_f64());
    }
    report(
        "A5",
        improving == 0 && backward_adjacent == 0 && worst_secs < 120.0,
        format!(
            "50 tournaments n=200: {improving} with an improving move, {backward_adjacent} backward adjacent pairs, slowest {worst_secs:.2}s"
        ),
    );
}

#[test]
fn a6_window_degree_bound() {
    let params = LemmaParams::new(1, 1, 4, 100).unwrap();
    let theta = params.degree_threshold();
    let mut violations = 0;
    let mut recount_mismatch = 0;
    for seed in 0..20u64 {
        let t = gen_random(500, 60_000 + seed);
        let mut ord = Ordering::identity(500);
        local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        for i in [0, 25, 50, 75, 100] {
            let found = check_window_degree(&t, &ord, i, &params).unwrap();
            violations += found.len();
            // direct recount of out-degrees into V[i+4, i+400)
            let direct = (i..i + 4)
                .filter(|&p| {
                    let v = ord.vertex_at(p);
                    (i + 4..i + 400).filter(|&q| t.beats(v, ord.vertex_at(q))).count() < theta
                })
                .count();
            if direct != found.len() {
                recount_mismatch += 1;
            }
        }
    }
    report(
        "A6",
        violations == 0 && recount_mismatch == 0,
        format!(
            "20 tournaments n=500, t=4, W=100, threshold {theta}: {violations} violations, {recount_mismatch} recount mismatches"
        ),
    );
}

#[test]
fn a7_parameter_certification() {
    let mut outcomes = Vec::new();
    let mut ok = true;
    for k in 2..=4 {
        let c = certify_params(&LemmaParams::default_for(k).unwrap());
        ok &= c.guaranteed;
        outcomes.push(format!("k={k}: {} (margin {:.1})", c.guaranteed, c.margin));
    }
    let small = certify_params(&LemmaParams::new(2, 64, 64, 100).unwrap());
    ok &= !small.guaranteed;
    outcomes.push(format!("(2,64,64,100): {} (margin {:.3})", small.guaranteed, small.margin));
    report("A7", ok, outcomes.join("; "));
}

#[test]
#[ignore = "extended: n = 2^20 guaranteed-mode build"]
fn a8_full_build_at_minimum_scale() {
    let clock = Instant::now();
    let n = 1 << 20;
    let params = LemmaParams::default_for(2).unwrap();
    let t = gen_implicit(n, 1);
    let out = build_path_power(&t, &params, Mode::Guaranteed, Strategy::Lazy).unwrap();
    let cert = out.certificate().expect("guaranteed build returns a certificate");
    let lines = audit_certificate(&t, cert, Some(&out.ordering)).unwrap();
    for l in &lines {
        println!("  {l}");
    }
    let bound = certificate_length_bound(cert).unwrap();
    let audit_ok = lines.iter().all(|l| l.pass);
    report(
        "A8",
        audit_ok && bound.satisfied && bound.paper_bound == 2,
        format!(
            "n=2^20 k=2: {} blocks, length {}, bound {}, repairs {}, audit {}, {:.0}s",
            cert.blocks.len(),
            bound.length,
            bound.paper_bound,
            out.stats.repairs,
            if audit_ok { "clean" } else { "FAILED" },
            clock.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn a9_heuristic_no_false_certificates() {
    let clock = Instant::now();
    let n = 50_000;
    let params = LemmaParams::new(2, 8, 64, 100).unwrap();
    let floor_steps = (n - params.span()) / params.target_span();
    let mut successes = 0;
    let mut bad = Vec::new();
    let mut stages = Vec::new();
    for seed in 0..20u64 {
        let t = gen_implicit(n, seed);
        let out = build_path_power(&t, &params, Mode::Heuristic, Strategy::Lazy).unwrap();
        match &out.result {
            BuildResult::Success(cert) => {
                successes += 1;
                let pp = verify_path_power(&t, &cert.sequence, 2).unwrap().is_empty();
                let audit = audit_certificate(&t, cert, Some(&out.ordering)).unwrap();
                let disjoint = cert.sequence.iter().collect::<HashSet<_>>().len() == cert.sequence.len();
                let enough_blocks = cert.blocks.len() >= floor_steps;
                if !(pp && disjoint && enough_blocks && audit.iter().all(|l| l.pass)) {
                    bad.push(seed);
                }
            }
            BuildResult::Failed { step, report } => stages.push((seed, *step, report.stage)),
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    report(
        "A9",
        bad.is_empty() && secs < 600.0,
        format!(
            "20 seeds n=50000: {successes} certified, {} verification failures, failures {stages:?}, {secs:.1}s",
            bad.len()
        ),
    );
}
