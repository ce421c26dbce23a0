//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use solfree_core::cayley::{
    alpha_certified, alpha_exact, alpha_upper_ratio, build_cayley, greedy_independent, AlphaBudget,
};
use solfree_core::constructs::{
    construct_nondegenerate, construct_poly_lower, construct_schur_lower, CheckMethod, Parameters,
    SchurOptions, SparseGraph,
};
use solfree_core::denssearch::{exact_d, heuristic_d, ExactOptions, HeuristicOptions};
use solfree_core::eqspec::{classify, Equation, EquationKind};
use solfree_core::field::{is_prime, next_prime, PrimeField, Rational};
use solfree_core::graph::{caro_wei_bound, BitGraph, Digraph};
use solfree_core::rainbow::{
    find_rainbow_exhaustive, find_rainbow_greedy, verify_rainbow, Color, ColoredDigraph,
    RestrictedSystem, EXHAUSTIVE_NODE_BUDGET,
};
use solfree_core::residues::ResidueSet;
use solfree_core::soloracle::{
    count_solutions_all, count_solutions_distinct, find_distinct_solution, SolutionMode,
};
use solfree_core::witness::{find_solution_via_rainbow, Outcome, PipelineConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("prime")
}

fn eq(c: &[i64]) -> Equation {
    Equation::new(c.to_vec()).expect("valid equation")
}

/// Exhaustive α on at most 32 vertices: branch on the lowest candidate.
fn alpha_by_branching(adj: &[u32], cand: u32) -> u32 {
    if cand == 0 {
        return 0;
    }
    let v = cand.trailing_zeros() as usize;
    let bit = 1u32 << v;
    if adj[v] & cand == 0 {
        return 1 + alpha_by_branching(adj, cand & !bit);
    }
    let skip = alpha_by_branching(adj, cand & !bit);
    let take = 1 + alpha_by_branching(adj, cand & !bit & !adj[v]);
    skip.max(take)
}

fn masks_of(g: &BitGraph) -> Vec<u32> {
    (0..g.len())
        .map(|v| g.row(v).iter().fold(0u32, |m, u| m | 1 << u))
        .collect()
}

/// α by testing every vertex subset for independence.
fn alpha_by_enumeration(adj: &[u32]) -> u32 {
    let n = adj.len();
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    let mut best = 0;
    for mask in 1usize..1 << n {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        independent[mask] = independent[rest] && adj[v] as usize & rest == 0;
        if independent[mask] {
            best = best.max(mask.count_ones());
        }
    }
    best
}

fn circulant_masks(p: u64, gens: &[u64]) -> Vec<u32> {
    (0..p)
        .map(|u| {
            gens.iter().fold(0u32, |m, &a| {
                m | 1 << ((u + a) % p) | 1 << ((u + p - a) % p)
            })
        })
        .collect()
}

fn criterion_1() -> Check {
    let values: Vec<i64> = (-3..=3).filter(|&c| c != 0).collect();
    let mut cases = 0;
    for k in 3..=5u32 {
        for code in 0..6usize.pow(k) {
            let mut c = Vec::with_capacity(k as usize);
            let mut x = code;
            for _ in 0..k {
                c.push(values[x % 6]);
                x /= 6;
            }
            let zero_sum = (1u32..1 << k).any(|s| {
                (0..k as usize)
                    .filter(|&i| s >> i & 1 == 1)
                    .map(|i| c[i])
                    .sum::<i64>()
                    == 0
            });
            let got = classify(&eq(&c));
            ensure((got.kind == EquationKind::Degenerate) == zero_sum, || {
                format!("{c:?}: classify says {}, oracle says {zero_sum}", got.kind)
            })?;
            if let Some(w) = &got.witness {
                ensure(
                    !w.is_empty() && w.iter().map(|&i| c[i]).sum::<i64>() == 0,
                    || format!("{c:?}: witness {w:?} does not sum to zero"),
                )?;
            }
            ensure(
                got.translation_invariant == (c.iter().sum::<i64>() == 0),
                || format!("{c:?}: translation flag wrong"),
            )?;
            cases += 1;
        }
    }
    Ok(format!("{cases} coefficient vectors agree"))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let primes = [11u64, 13, 17, 19];
    for i in 0..200 {
        let p = primes[i % 4];
        let size = rng.gen_range(1..p as usize);
        let mut pool: Vec<u64> = (1..p).collect();
        pool.shuffle(&mut rng);
        let gens = &pool[..size];
        let g = build_cayley(field(p), gens).map_err(|e| e.to_string())?;
        let exact = alpha_exact(&g, AlphaBudget::UNLIMITED).map_err(|e| e.to_string())?;
        let brute = alpha_by_enumeration(&circulant_masks(p, gens)) as u64;
        ensure(exact.lower == brute && exact.is_exact(), || {
            format!(
                "p={p} A={gens:?}: alpha_exact {} vs enumeration {brute}",
                exact.lower
            )
        })?;
        let ratio = alpha_upper_ratio(&g);
        ensure(ratio.certified >= brute, || {
            format!(
                "p={p} A={gens:?}: ratio bound {} below alpha {brute}",
                ratio.certified
            )
        })?;
        let greedy = greedy_independent(&g).len() as u64;
        ensure(greedy <= brute, || {
            format!("p={p}: greedy {greedy} above alpha {brute}")
        })?;
    }
    Ok(String::from(
        "200 instances, exact = enumeration, greedy <= alpha <= ratio",
    ))
}

fn random_digraph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Digraph {
    let mut d = Digraph::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                d.add_arc(u, v);
            }
        }
    }
    d
}

/// Arcs with every out-degree (or in-degree) at most `r`.
fn bounded_digraph(rng: &mut ChaCha8Rng, n: usize, r: usize, by_in: bool) -> Digraph {
    let mut d = Digraph::new(n);
    for u in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
        others.shuffle(rng);
        for &v in others.iter().take(rng.gen_range(0..=r)) {
            if by_in {
                d.add_arc(v, u);
            } else {
                d.add_arc(u, v);
            }
        }
    }
    d
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checks = 0u64;
    for _ in 0..500 {
        let n = rng.gen_range(2..=19);
        let density = rng.gen_range(0.02..0.6);
        let d = random_digraph(&mut rng, n, density);
        let under = d.underlying();
        let full = (1u32 << n) - 1;
        let alpha = alpha_by_branching(&masks_of(&under), full) as u64;

        let cw = caro_wei_bound(&under);
        let avg = 2.0 * under.edge_count() as f64 / n as f64;
        ensure(
            alpha as f64 + 1e-9 >= cw && cw + 1e-9 >= n as f64 / (avg + 1.0),
            || format!("Caro-Wei fails: n={n} alpha={alpha} bound={cw}"),
        )?;
        checks += 1;

        for r in 0..n as u64 {
            if alpha * (2 * r + 1) < n as u64 {
                ensure(d.max_out_degree() as u64 > r, || {
                    format!("out-degree bound fails: n={n} alpha={alpha} r={r}")
                })?;
                checks += 1;
            }
        }

        let r = rng.gen_range(0..=3);
        let by_in = rng.gen_bool(0.5);
        let removed = bounded_digraph(&mut rng, n, r, by_in);
        ensure(
            if by_in {
                removed.max_in_degree() <= r
            } else {
                removed.max_out_degree() <= r
            },
            || String::from("generator broke its degree bound"),
        )?;
        let rest = d.minus(&removed).underlying();
        let alpha_rest = alpha_by_branching(&masks_of(&rest), full) as u64;
        ensure(alpha_rest <= (2 * r as u64 + 1) * alpha, || {
            format!("edge-removal bound fails: n={n} r={r} alpha={alpha} after={alpha_rest}")
        })?;
        checks += 1;
    }
    Ok(format!(
        "500 digraphs, {checks} inequalities, no violations"
    ))
}

fn criterion_4() -> Check {
    let f = field(7);
    let mut compared = 0;
    for c in [[1i64, 1, -1], [1, 1, 1], [2, -1, -1]] {
        let e = eq(&c);
        for mask in 0u32..128 {
            let set = ResidueSet::from_residues(7, (0..7).filter(|&i| mask >> i & 1 == 1)).unwrap();
            let members = set.as_slice();
            let (mut all, mut distinct) = (0u128, 0i128);
            for &a in members {
                for &b in members {
                    for &z in members {
                        let s = c[0] * a as i64 + c[1] * b as i64 + c[2] * z as i64;
                        if s.rem_euclid(7) == 0 {
                            all += 1;
                            if a != b && b != z && a != z {
                                distinct += 1;
                            }
                        }
                    }
                }
            }
            let got_all = count_solutions_all(&set, &e, f).map_err(|e| e.to_string())?;
            let got_distinct = count_solutions_distinct(&set, &e, f).map_err(|e| e.to_string())?;
            ensure(got_all == all && got_distinct == distinct, || {
                format!("{c:?} on {members:?}: ({got_all}, {got_distinct}) vs ({all}, {distinct})")
            })?;
            compared += 1;
        }
    }
    let full = count_solutions_all(&ResidueSet::full(7), &Equation::schur(), f)
        .map_err(|e| e.to_string())?;
    ensure(full == 49, || {
        format!("Schur on F_7 counts {full}, expected 49")
    })?;
    Ok(format!(
        "{compared} (equation, subset) pairs match; Schur on F_7 gives 49"
    ))
}

/// Cayley-type colored digraph `u → u + a` colored `a` for `a ∈ gens`.
fn cayley_colored(n: usize, gens: &[u64]) -> ColoredDigraph {
    let arcs = (0..n).flat_map(|u| gens.iter().map(move |&a| (u, (u + a as usize) % n, a)));
    ColoredDigraph::new(n, arcs).expect("translation colorings are proper")
}

/// Disjoint singleton forbidden sets on a random half of the vertices.
fn singleton_forbidden(rng: &mut ChaCha8Rng, n: usize, palette: u64) -> Vec<Vec<Color>> {
    let mut colors: Vec<Color> = (1..=palette).collect();
    colors.shuffle(rng);
    (0..n)
        .map(|v| match colors.get(v) {
            Some(&c) if rng.gen_bool(0.5) => vec![c],
            _ => Vec::new(),
        })
        .collect()
}

/// Random proper coloring: each color is a partial permutation.
fn random_colored(
    rng: &mut ChaCha8Rng,
    n: usize,
    colors: &[Color],
    density: f64,
) -> ColoredDigraph {
    let mut arcs = Vec::new();
    for &c in colors {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (u, &v) in perm.iter().enumerate() {
            if v != u && rng.gen_bool(density) {
                arcs.push((u, v, c));
            }
        }
    }
    ColoredDigraph::new(n, arcs).expect("partial permutations are proper")
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let primes: Vec<u64> = (200..=400).filter(|&n| is_prime(n)).collect();
    let mut found = 0;
    let mut generated = 0;
    let mut rejected = 0;
    while generated < 100 {
        let n = *primes.choose(&mut rng).unwrap();
        let holes = rng.gen_range(1..=6);
        let mut pool: Vec<u64> = (1..=n / 2).collect();
        pool.shuffle(&mut rng);
        let missing: Vec<u64> = pool[..holes].iter().flat_map(|&a| [a, n - a]).collect();
        let gens: Vec<u64> = (1..n).filter(|a| !missing.contains(a)).collect();
        let alpha = alpha_certified(
            &build_cayley(field(n), &gens).unwrap(),
            AlphaBudget::default(),
        );
        // α(D_1) ≤ |V| / (100 ℓ²) with ℓ = 1.
        if alpha.upper * 100 > n {
            rejected += 1;
            continue;
        }
        generated += 1;
        let d1 = cayley_colored(n as usize, &gens);
        let forbidden = singleton_forbidden(&mut rng, n as usize, n - 1);
        let sys =
            RestrictedSystem::new(n as usize, vec![d1], forbidden, 1).map_err(|e| e.to_string())?;
        let path = find_rainbow_greedy(&sys, 1).map_err(|e| e.to_string())?;
        let Some(path) = path else {
            return Err(format!(
                "greedy returned None on n={n} with alpha={}",
                alpha.upper
            ));
        };
        verify_rainbow(&sys, &path).map_err(|v| format!("n={n}: {v:?}"))?;
        found += 1;
    }

    let mut dense_found = 0;
    for _ in 0..20 {
        let n = *primes.choose(&mut rng).unwrap() as usize;
        let d1 = cayley_colored(n, &(1..n as u64).collect::<Vec<_>>());
        let d2 = cayley_colored(n, &(1..n as u64).collect::<Vec<_>>());
        let forbidden = singleton_forbidden(&mut rng, n, n as u64 - 1);
        let sys =
            RestrictedSystem::new(n, vec![d1, d2], forbidden, 1).map_err(|e| e.to_string())?;
        if let Some(path) = find_rainbow_greedy(&sys, 2).map_err(|e| e.to_string())? {
            verify_rainbow(&sys, &path).map_err(|v| format!("k'=2 n={n}: {v:?}"))?;
            dense_found += 1;
        }
    }

    let mut agree = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=30);
        let k = rng.gen_range(1..=3usize);
        let palette: Vec<Color> = (1..=rng.gen_range(1..=2 * n as u64)).collect();
        let density = rng.gen_range(0.05..0.5);
        let digraphs: Vec<ColoredDigraph> = (0..k)
            .map(|_| {
                let mut cs = palette.clone();
                cs.shuffle(&mut rng);
                let take = rng.gen_range(1..=cs.len());
                random_colored(&mut rng, n, &cs[..take], density)
            })
            .collect();
        let bound = rng.gen_range(0..=2usize);
        let mut colors = palette.clone();
        colors.shuffle(&mut rng);
        let mut chunks = colors.chunks(bound.max(1));
        let forbidden: Vec<Vec<Color>> = (0..n)
            .map(|_| {
                if bound == 0 {
                    Vec::new()
                } else {
                    chunks.next().map(<[Color]>::to_vec).unwrap_or_default()
                }
            })
            .collect();
        let sys =
            RestrictedSystem::new(n, digraphs, forbidden, bound).map_err(|e| e.to_string())?;
        let greedy = find_rainbow_greedy(&sys, k).map_err(|e| e.to_string())?;
        let exhaustive =
            find_rainbow_exhaustive(&sys, k, EXHAUSTIVE_NODE_BUDGET).map_err(|e| e.to_string())?;
        for p in greedy.iter().chain(&exhaustive) {
            verify_rainbow(&sys, p).map_err(|v| format!("small system n={n}: {v:?} on {p}"))?;
        }
        ensure(greedy.is_none() || exhaustive.is_some(), || {
            format!("greedy found a path the exhaustive search missed (n={n}, k={k})")
        })?;
        agree += 1;
    }
    Ok(format!(
        "hypothesis systems: {found}/100 paths (k'=1, {rejected} draws rejected); \
         k'=2 needs alpha < 1 at |V| <= 400, so it is unsatisfiable \
         (dense k'=2 systems: {dense_found}/20 paths, all verified); small systems: {agree}/100 consistent"
    ))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let equations = [
        eq(&[1, 1, -1]),
        eq(&[1, -1, 3]),
        eq(&[2, 1, -3]),
        eq(&[1, 1, -1, 1]),
        eq(&[1, -1, 2, 3]),
        eq(&[1, 2, -1, -2]),
    ];
    let mut stages: BTreeMap<String, u32> = BTreeMap::new();
    for run in 0..500 {
        let p = if run % 2 == 0 { 101 } else { 199 };
        let f = field(p);
        let e = &equations[run % equations.len()];
        let density = rng.gen_range(0.3..0.9);
        let set = ResidueSet::from_residues(p, (1..p).filter(|_| rng.gen_bool(density))).unwrap();
        let report = find_solution_via_rainbow(&set, e, f, &PipelineConfig::default())
            .map_err(|e| e.to_string())?;
        match &report.outcome {
            Outcome::Found(t) => {
                ensure(
                    t.verify(f, &set, SolutionMode::Distinct) && t.coeffs == e.coeffs(),
                    || format!("false positive: {e} p={p} tuple {:?}", t.entries),
                )?;
                *stages.entry(String::from("found")).or_default() += 1;
            }
            Outcome::HypothesisFailed { stage, .. } => {
                *stages.entry(format!("failed at {stage}")).or_default() += 1;
            }
        }
    }
    Ok(format!("500 runs, no false positives; {stages:?}"))
}

fn criterion_7() -> Check {
    let e = eq(&[1, 1, 1]);
    for p in [101u64, 499, 1009] {
        let f = field(p);
        let r = construct_nondegenerate(&e, f, Some(4), 7).map_err(|e| e.to_string())?;
        ensure(
            find_distinct_solution(&r.set, &e, f)
                .map_err(|e| e.to_string())?
                .is_none(),
            || format!("p={p}: constructed set has a solution"),
        )?;
        ensure(
            r.solution_free.passed && r.solution_free.method == CheckMethod::Exhaustive,
            || format!("p={p}: report check not exhaustive"),
        )?;
        ensure(24 * r.set.len() as u64 >= p, || {
            format!("p={p}: |A| = {} < p/24", r.set.len())
        })?;
        let Parameters::NonDegenerate(params) = &r.params else {
            return Err(String::from("wrong parameter kind"));
        };
        ensure(params.beta == Rational::new(1, 24).unwrap(), || {
            format!("beta = {}", params.beta)
        })?;
        // ⌊log_4 √p⌋ is the largest z with 4^{2z} ≤ p.
        let expected = (1..).take_while(|&z| 16u64.pow(z) <= p).count();
        let b = &params.clique_seed;
        ensure(b.len() == expected, || {
            format!("p={p}: |B| = {} expected {expected}", b.len())
        })?;
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[..i] {
                let d = f.sub(x, y);
                ensure(r.set.contains(d) || r.set.contains(f.neg(d)), || {
                    format!("p={p}: {x} - {y} not in A or -A")
                })?;
            }
        }
        let bound = p / b.len() as u64;
        ensure(r.alpha.upper <= bound, || {
            format!("p={p}: alpha upper {} > p/|B| = {bound}", r.alpha.upper)
        })?;
    }
    Ok(String::from(
        "p = 101, 499, 1009: solution-free, |A| >= p/24, clique-certified alpha",
    ))
}

fn criterion_8() -> Check {
    let p = 2063;
    ensure(p > 2 * 4u64.pow(5), || String::from("precondition"))?;
    let f = field(p);
    let r = construct_schur_lower(
        f,
        Rational::integer(1),
        &SparseGraph::cycle(5),
        SchurOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let schur = Equation::schur();
    ensure(
        find_distinct_solution(&r.set, &schur, f)
            .map_err(|e| e.to_string())?
            .is_none(),
        || String::from("output contains a Schur triple"),
    )?;
    let members = r.set.as_slice();
    for &x in members {
        for &y in members {
            let z = f.add(x, y);
            ensure(x == y || z == x || z == y || !r.set.contains(z), || {
                format!("Schur triple {x} + {y} = {z}")
            })?;
        }
    }
    let Parameters::SchurLower(params) = &r.params else {
        return Err(String::from("wrong parameter kind"));
    };
    for (i, w) in params.alpha_sequence.windows(2).enumerate() {
        ensure(2 * w[1].0 >= w[0].1, || {
            format!("halving fails at step {i}: {:?} -> {:?}", w[0], w[1])
        })?;
    }
    Ok(format!(
        "prefix {} of {}, |A| = {}, alpha(H_i) sequence {:?}",
        params.prefix,
        params.differences.len(),
        r.set.len(),
        params.alpha_sequence
    ))
}

fn criterion_9() -> Check {
    let e = eq(&[1, 1, 1]);
    let mut cases: Vec<(u64, SparseGraph)> = vec![
        (100_003, SparseGraph::path(4)),
        (next_prime(4 * 5 * 3 * (3125 - 5)), SparseGraph::cycle(5)),
    ];
    for p in [1201u64, 1511, 2003, 2503, 3001] {
        cases.push((p, SparseGraph::path(2)));
    }
    let mut summary = Vec::new();
    for (p, g) in cases {
        ensure(g.girth().is_none_or(|c| c >= 5), || {
            String::from("input girth")
        })?;
        let f = field(p);
        let rep = construct_poly_lower(&e, f, &g, 9).map_err(|err| format!("p={p}: {err}"))?;
        let Parameters::PolyLower(params) = &rep.params else {
            return Err(String::from("wrong parameter kind"));
        };
        ensure(params.r == 5, || format!("r = {}", params.r))?;
        ensure(
            find_distinct_solution(&rep.set, &e, f)
                .map_err(|e| e.to_string())?
                .is_none(),
            || format!("p={p}: output has a solution"),
        )?;
        if p <= 3001 {
            let m = rep.set.as_slice();
            for &a in m {
                for &b in m {
                    let c = f.neg(f.add(a, b));
                    ensure(a == b || c == a || c == b || !rep.set.contains(c), || {
                        format!("p={p}: {a} + {b} + {c} = 0")
                    })?;
                }
            }
        }
        ensure(
            params.multiples.iter().all(|y| y % params.r_prime == 0),
            || format!("p={p}: Y element not divisible by {}", params.r_prime),
        )?;
        let y = params.multiples.len() as u64;
        ensure(y * 4 * 25 * params.r_prime >= p, || {
            format!("p={p}: |Y| = {y} too small")
        })?;
        summary.push(format!("p={p} |Y|={y} r'={}", params.r_prime));
    }
    Ok(summary.join(", "))
}

/// `D(ε)` for Schur over every subset of `𝔽_p`, for each `ε` in the grid.
fn brute_density(p: u64, grid: &[Rational]) -> Vec<u64> {
    let n = p as usize;
    let mut triples_by_top: Vec<Vec<u32>> = vec![Vec::new(); n];
    for x in 0..p {
        for y in 0..p {
            let z = (x + y) % p;
            if x != y && z != x && z != y {
                let m = 1u32 << x | 1 << y | 1 << z;
                triples_by_top[31 - m.leading_zeros() as usize].push(m);
            }
        }
    }
    let half = (p / 2) as usize;
    let mut alpha_by_pairs = vec![0u32; 1 << half];
    for (pairs, slot) in alpha_by_pairs.iter_mut().enumerate() {
        let gens: Vec<u64> = (1..=half as u64)
            .filter(|&a| pairs >> (a - 1) & 1 == 1)
            .collect();
        *slot = alpha_by_branching(&circulant_masks(p, &gens), (1u32 << n) - 1);
    }
    let mut best_by_alpha = vec![0u32; n + 1];
    let mut free = vec![false; 1 << n];
    free[0] = true;
    for mask in 1u32..1 << n {
        let top = 31 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let ok = free[rest as usize] && triples_by_top[top].iter().all(|&t| t & mask != t);
        free[mask as usize] = ok;
        if ok {
            let pairs = (1..n)
                .filter(|&a| mask >> a & 1 == 1)
                .fold(0usize, |m, a| m | 1 << (a.min(n - a) - 1));
            let a = alpha_by_pairs[pairs] as usize;
            best_by_alpha[a] = best_by_alpha[a].max(mask.count_ones());
        }
    }
    grid.iter()
        .map(|eps| {
            (0..=n)
                .filter(|&a| eps.admits(a as u64, p))
                .map(|a| best_by_alpha[a] as u64)
                .max()
                .unwrap_or(0)
        })
        .collect()
}

fn criterion_10() -> Check {
    let grid: Vec<Rational> = (1..=10).map(|i| Rational::new(i, 10).unwrap()).collect();
    let schur = Equation::schur();
    let mut rows = Vec::new();
    for p in [11u64, 13, 17, 19, 23] {
        let f = field(p);
        let brute = brute_density(p, &grid);
        let mut values = Vec::new();
        for (i, &eps) in grid.iter().enumerate() {
            let ex = exact_d(&schur, f, eps, ExactOptions::default()).map_err(|e| e.to_string())?;
            ensure(ex.value == brute[i], || {
                format!(
                    "p={p} eps={eps}: exact_D {} vs enumeration {}",
                    ex.value, brute[i]
                )
            })?;
            let opts = HeuristicOptions {
                iterations: 5_000,
                seed: p * 100 + i as u64,
                ..HeuristicOptions::default()
            };
            let h = heuristic_d(&schur, f, eps, &opts).map_err(|e| e.to_string())?;
            ensure(h.value <= ex.value, || {
                format!(
                    "p={p} eps={eps}: heuristic {} above exact {}",
                    h.value, ex.value
                )
            })?;
            values.push(ex.value);
        }
        ensure(values.windows(2).all(|w| w[0] <= w[1]), || {
            format!("p={p}: not monotone in eps: {values:?}")
        })?;
        rows.push(format!("p={p}: {values:?}"));
    }
    Ok(rows.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "classifier agrees with exhaustive zero-sum check",
            criterion_1,
            Some(Duration::from_secs(10)),
        ),
        (
            "alpha oracles agree with subset enumeration",
            criterion_2,
            Some(Duration::from_secs(300)),
        ),
        (
            "Caro-Wei, out-degree and edge-removal inequalities",
            criterion_3,
            None,
        ),
        (
            "solution counts agree with naive enumeration",
            criterion_4,
            None,
        ),
        ("rainbow path search", criterion_5, None),
        ("witness pipeline soundness", criterion_6, None),
        (
            "non-degenerate construction",
            criterion_7,
            Some(Duration::from_secs(120)),
        ),
        ("Schur lower-bound construction", criterion_8, None),
        (
            "coefficient-sum lower-bound construction",
            criterion_9,
            None,
        ),
        ("density search monotone and exact", criterion_10, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > *l => Err(format!("took {elapsed:.1?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}]: {why}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
