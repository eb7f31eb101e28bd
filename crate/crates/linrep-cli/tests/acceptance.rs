//! End-to-end acceptance checks. Runs as a plain binary so that every
//! criterion prints its own PASS or FAIL line; exits non-zero if any fails.

use std::collections::{BTreeSet, HashSet};
use std::process::Command;
use std::sync::Arc;

use linrep::catalog;
use linrep::constraints::{symmetry_group, ConstraintSet};
use linrep::engine::{clrp_enumerate, prove_rate, prove_rep, prove_ss, Config, Witness};
use linrep::ff::Field;
use linrep::generation::{enumerate_class, GridOptions, Leiterspiel, Limits};
use linrep::group::{group_generators, PointAction};
use linrep::perm::{Bsgs, Perm};
use linrep::pmap::{exhaustive_min_pmap, extend_pmap, PMap, Prepared, RankCache, Symmetries};
use linrep::polymatroid::{ClassTuple, RankVector};
use linrep::region::{cone_equal, conic_hull_hrep, parse_polyhedral, Cone, Row};
use linrep::subspace::GrassmannianIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { ok: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.ok &= ok;
        self.lines.push(format!("    [{}] {}", if ok { "ok" } else { "failed" }, what.into()));
    }
}

fn linrep(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_linrep")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn ones(n: usize) -> String {
    vec!["1"; n].join(",")
}

fn cfg() -> Config {
    Config::default()
}

fn verdict_via_cli(o: &mut Outcome, instance: &str, rates: &str, q: &str, want: i32) {
    let (code, _) = linrep(&["prove-rate", instance, "--rates", rates, "-q", q]);
    o.check(code == want, format!("prove-rate {instance} [{rates}] q={q}: exit {code}, expected {want}"));
}

fn fano_matroid() -> RankVector {
    let lines = [[1, 2, 4], [2, 3, 5], [4, 5, 6], [3, 4, 7], [1, 3, 6], [2, 6, 7], [1, 5, 7]];
    let masks: Vec<u32> = lines.iter().map(|l| l.iter().map(|&x| 1u32 << (x - 1)).sum()).collect();
    RankVector::new(
        (1u32..128)
            .map(|m| match m.count_ones() {
                c @ (1 | 2) => c,
                3 if masks.contains(&m) => 2,
                _ => 3,
            })
            .collect(),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    verdict_via_cli(&mut o, "builtin:fano", &ones(7), "2", 0);
    verdict_via_cli(&mut o, "builtin:fano", &ones(7), "3", 1);
    let res = prove_rate(&catalog::fano(), &[1; 7], 2, &cfg()).unwrap();
    let w = res.witness.expect("witness");
    o.check(w.rank_vector() == fano_matroid(), "witness rank vector is the Fano matroid");
    o.check(w.validate(&catalog::fano().constraints().with_rates(&[1; 7])), "witness meets every constraint");
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    verdict_via_cli(&mut o, "builtin:nonfano", &ones(7), "3", 0);
    verdict_via_cli(&mut o, "builtin:nonfano", &ones(7), "2", 1);
    let w = prove_rate(&catalog::non_fano(), &[1; 7], 3, &cfg()).unwrap().witness.expect("witness");
    o.check(w.validate(&catalog::non_fano().constraints().with_rates(&[1; 7])), "ternary witness meets every constraint");
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    verdict_via_cli(&mut o, "builtin:vamos", &ones(8), "2", 1);
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    verdict_via_cli(&mut o, "builtin:u24", "1,1,1,1", "2", 1);
    verdict_via_cli(&mut o, "builtin:u24", "2,2,2,2", "2", 0);
    let w = prove_rate(&catalog::u24(), &[2; 4], 2, &cfg()).unwrap().witness.expect("witness");
    o.check(w.validate(&catalog::u24().constraints().with_rates(&[2; 4])), "rate-2 witness meets every constraint");
    o
}

fn hrep_block(text: &str) -> Cone {
    let start = text.find("H-representation").expect("H-representation block");
    let end = text[start..].find("end").expect("block end") + start + 3;
    parse_polyhedral(&text[start..end]).expect("block parses")
}

fn count_line(text: &str) -> usize {
    text.lines().find_map(|l| l.strip_suffix(" achievable rate vectors")).expect("count line").parse().unwrap()
}

/// Ten-inequality reference region, in (ω1, ω2, ω3, R4, R5, R6) order. The
/// printed columns are R4, R5, R6, ω1, ω2, ω3.
fn reference_region() -> Cone {
    let printed: [[i64; 6]; 10] = [
        [0, 0, 0, 1, 0, 0],
        [1, 0, 0, 0, -1, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0],
        [1, 1, 0, -1, -1, -1],
        [0, 1, 1, 0, -1, -1],
        [0, 1, 0, 0, 0, 0],
        [1, 1, 2, -1, -2, -2],
        [1, 0, 1, 0, -1, -1],
    ];
    let rows: Vec<Row> = printed.iter().map(|r| vec![r[3], r[4], r[5], r[0], r[1], r[2]]).collect();
    Cone::from_inequalities(6, &rows).unwrap()
}

/// ω_k >= 0, R_i >= ω_k, R_i + R_j >= 3ω_k, R4 + R5 + R6 >= 5ω_k.
fn smaller_region() -> Cone {
    let mut rows: Vec<Row> = Vec::new();
    for k in 0..3 {
        let unit = |i: usize, c: i64| {
            let mut v = vec![0; 6];
            v[i] = c;
            v
        };
        rows.push(unit(k, 1));
        for i in 3..6 {
            let mut v = unit(i, 1);
            v[k] = -1;
            rows.push(v);
            for j in i + 1..6 {
                let mut v = unit(i, 1);
                v[j] = 1;
                v[k] = -3;
                rows.push(v);
            }
        }
        let mut v = vec![0, 0, 0, 1, 1, 1];
        v[k] = -5;
        rows.push(v);
    }
    Cone::from_inequalities(6, &rows).unwrap()
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let (code, text) = linrep(&["prove-region", "builtin:hn1", "-q", "2", "--dmax", "2", "--rmax", "4"]);
    o.check(code == 0, format!("prove-region rmax=4 completes (exit {code})"));
    let count = count_line(&text);
    o.check(count == 122, format!("rmax=4 finds {count} distinct rate vectors, expected 122"));
    let full = hrep_block(&text);
    o.check(full.facets() == 10, format!("rmax=4 region has {} facets", full.facets()));
    o.check(cone_equal(&full, &reference_region()), "rmax=4 region equals the ten-inequality reference region");

    let (code, text) = linrep(&["prove-region", "builtin:hn1", "-q", "2", "--dmax", "2", "--rmax", "3", "--list"]);
    o.check(code == 0, format!("prove-region rmax=3 completes (exit {code})"));
    let listed: BTreeSet<&str> = text.lines().filter_map(|l| l.strip_prefix("  ")).collect();
    let four = ["[1,1,1,1,2,2]", "[1,1,1,2,1,2]", "[1,1,1,2,2,1]", "[1,1,1,2,2,2]"];
    o.check(four.iter().all(|v| listed.contains(v)), "rmax=3 vectors include the four equal-source-rate vectors");
    let small = hrep_block(&text);
    let eq = cone_equal(&small, &smaller_region());
    o.check(eq, format!("rmax=3 region equals the 24-inequality smaller region (got {} facets)", small.facets()));
    if !eq {
        let outside = small.rays.iter().find(|r| !smaller_region().contains(r));
        if let Some(r) = outside {
            o.lines.push(format!("    note: achievable ray {r:?} violates the smaller region"));
        }
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let rows: [([u32; 7], i32); 5] = [
        ([1, 1, 1, 1, 1, 1, 1], 1),
        ([1, 1, 1, 2, 1, 1, 1], 1),
        ([1, 1, 1, 2, 2, 1, 1], 0),
        ([1, 1, 1, 2, 2, 2, 2], 0),
        ([1, 1, 1, 2, 1, 1, 2], 0),
    ];
    for (rates, want) in rows {
        let r: Vec<String> = rates.iter().map(u32::to_string).collect();
        verdict_via_cli(&mut o, "builtin:mdcs", &r.join(","), "2", want);
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let (code, _) = linrep(&["prove-ss", "builtin:benaloh", "--sizes", "2,2,3,3,2", "-q", "2"]);
    o.check(code == 0, format!("prove-ss Benaloh sizes 2,2,3,3,2: exit {code}"));
    let res = prove_ss(&catalog::benaloh(), &catalog::BENALOH_SIZES, 2, &cfg()).unwrap();
    let set = catalog::benaloh().constraints().with_rates(&catalog::BENALOH_SIZES);
    o.check(catalog::benaloh().constraints().len() == 15, "access structure yields 15 constraints");
    match res.witness {
        Some(w) => {
            o.check(w.r == 6, format!("witness lives in dimension {}", w.r));
            o.check(w.validate(&set), "witness re-validates against all constraints and sizes");
        }
        None => o.check(false, "no witness returned"),
    }
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let (code, _) = linrep(&["prove-rep", "builtin:linrank6", "-q", "2"]);
    o.check(code == 0, format!("prove-rep linrank6 q=2: exit {code}"));
    let w = prove_rep(&catalog::linrank6(), 2, &cfg()).unwrap().witness.expect("witness");
    o.check(w.rank_vector() == catalog::linrank6(), "witness has exactly the requested rank vector");
    o
}

fn arrangements(q: u64, r: usize, dims: &[usize], n: usize) -> (Arc<Field>, Vec<Vec<linrep::subspace::Subspace>>) {
    let f = Arc::new(Field::gf(q).unwrap());
    let c = ClassTuple::new(n, (r, r), dims, (1, n)).unwrap();
    let res = enumerate_class(&c, f.clone(), r, (), &mut |_, _| Some(()), &GridOptions::default()).unwrap();
    (f, res.finals.into_iter().map(|a| a.spaces).collect())
}

fn check_pmaps(o: &mut Outcome) {
    let relay = linrep::constraints::NetworkInstance::new(1, 2, vec![(vec![1], vec![1, 2]), (vec![2], vec![1, 2])]).unwrap();
    let corpus: Vec<(&str, ConstraintSet)> = vec![
        ("u24", catalog::u24().constraints()),
        ("butterfly5", catalog::butterfly5().constraints()),
        ("benaloh", catalog::benaloh().constraints()),
        ("relay", relay.constraints()),
    ];
    let (mut compared, mut feasible, mut mismatches) = (0, 0, 0);
    for (_, base) in &corpus {
        let n = base.n();
        for (r, dims) in [(2usize, vec![0usize, 1, 2]), (3, vec![1, 2])] {
            let (f, arrs) = arrangements(2, r, &dims, n);
            for spaces in &arrs {
                let mut rc = RankCache::new(&f, r, spaces.iter().collect());
                let own: Vec<u32> = spaces.iter().map(|s| s.dim() as u32).collect();
                for set in [base.clone(), base.with_rates(&own), base.with_rates(&vec![1; n])] {
                    let b = symmetry_group(&set, None).unwrap().elements(10_000).unwrap();
                    let prep = Prepared::new(&set);
                    let reference = exhaustive_min_pmap(&mut rc, &set);
                    let plain = extend_pmap(&mut rc, &PMap::null(), &Symmetries::none(n), &prep).cert;
                    let sym = Symmetries::for_object(&mut rc, &b, 10);
                    let pruned = extend_pmap(&mut rc, &PMap::null(), &sym, &prep).cert;
                    compared += 1;
                    feasible += reference.is_some() as usize;
                    mismatches += (plain != reference) as usize + (pruned != reference) as usize;
                }
            }
        }
    }
    o.check(mismatches == 0 && feasible > 0, format!("(a) p-map search equals exhaustive minimum on {compared} cases, {feasible} feasible, {mismatches} mismatches"));
}

fn subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn check_orbits(o: &mut Outcome) {
    let cases: [(u64, usize, &[usize]); 7] = [(2, 3, &[1]), (2, 3, &[2]), (2, 3, &[1, 2]), (3, 2, &[1]), (4, 2, &[1]), (2, 2, &[1, 2]), (2, 4, &[1])];
    let mut checked = 0;
    let mut bad = Vec::new();
    for (q, r, dims) in cases {
        let f = Arc::new(Field::gf(q).unwrap());
        let idx = Arc::new(GrassmannianIndex::new(f.clone(), r, dims).unwrap());
        let points = idx.len() as u32;
        let action = PointAction::new(idx.clone());
        let gens: Vec<Perm> = group_generators(r, &f).iter().map(|g| action.perm_of(g)).collect();
        let group = Bsgs::deterministic(action.n(), Perm::identity(action.n()), &gens).elements(1 << 22).unwrap();
        let mut ls = Leiterspiel::new(idx.clone(), (), 3).unwrap();
        let mut buf = Vec::new();
        for level in 1..=4.min(points as usize) {
            ls.simple_extensions(&mut |_, _| Some(()), &Limits::default(), None).unwrap();
            let canon = |s: &[u32]| -> Vec<u32> {
                group
                    .iter()
                    .map(|g| {
                        let mut img: Vec<u32> = s.iter().map(|&x| g.0[x as usize]).collect();
                        img.sort_unstable();
                        img
                    })
                    .min()
                    .unwrap()
            };
            let all = subsets(points, level);
            let orbits: HashSet<Vec<u32>> = all.iter().map(|s| canon(s)).collect();
            let reps = &ls.level(level).reps;
            let rep_canons: HashSet<Vec<u32>> = reps.iter().map(|rep| canon(&rep.handles)).collect();
            let mut ok = reps.len() == orbits.len() && rep_canons == orbits;
            for s in &all {
                match ls.lookup(s) {
                    Some((k, g)) => {
                        let mut img: Vec<u32> = s.iter().map(|&h| action.act_handle(&g, h, &mut buf)).collect();
                        img.sort_unstable();
                        let mut rep = reps[k].handles.clone();
                        rep.sort_unstable();
                        ok &= img == rep;
                    }
                    None => ok = false,
                }
            }
            checked += 1;
            if !ok {
                bad.push(format!("q={q} r={r} dims={dims:?} level {level}"));
            }
        }
    }
    o.check(bad.is_empty(), format!("(b) orbit partitions and transporters agree with brute force on {checked} levels {bad:?}"));
}

fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn brute_facets(d: usize, rays: &[Row]) -> BTreeSet<Row> {
    let mut out = BTreeSet::new();
    for s in subsets(rays.len() as u32, d - 1) {
        let m: Vec<Vec<i128>> = s.iter().map(|&i| rays[i as usize].iter().map(|&x| x as i128).collect()).collect();
        let mut a: Vec<i128> = (0..d)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                if j % 2 == 0 { det(&minor) } else { -det(&minor) }
            })
            .collect();
        let g = a.iter().fold(0, |g, &x| gcd(g, x));
        if g == 0 {
            continue;
        }
        a.iter_mut().for_each(|x| *x /= g);
        let vals: Vec<i128> = rays.iter().map(|r| r.iter().zip(&a).map(|(&x, y)| x as i128 * y).sum()).collect();
        if vals.iter().all(|&v| v >= 0) {
            out.insert(a.iter().map(|&x| x as i64).collect());
        } else if vals.iter().all(|&v| v <= 0) {
            out.insert(a.iter().map(|&x| -x as i64).collect());
        }
    }
    out
}

fn full_rank(rays: &[Row], d: usize) -> bool {
    subsets(rays.len() as u32, d).iter().any(|s| det(&s.iter().map(|&i| rays[i as usize].iter().map(|&x| x as i128).collect()).collect::<Vec<_>>()) != 0)
}

fn check_dd(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut bad) = (0, 0);
    while checked < 200 {
        let d = rng.gen_range(2..=5);
        let n = rng.gen_range(d..d + 5);
        let rays: Vec<Row> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        if !full_rank(&rays, d) {
            continue;
        }
        let dd: BTreeSet<Row> = conic_hull_hrep(d, &rays).unwrap().hrep.into_iter().collect();
        let brute = brute_facets(d, &rays);
        if dd != brute {
            bad += 1;
        }
        checked += 1;
    }
    o.check(bad == 0, format!("(c) double description equals brute-force facets on {checked} random full-dimensional cones, {bad} differ"));
}

fn generated_codes() -> Vec<Witness> {
    let mut out = Vec::new();
    let cases: Vec<(ConstraintSet, ClassTuple)> = vec![
        (catalog::hn1().constraints(), ClassTuple::new(6, (1, 3), &[0, 1, 2], (1, 6)).unwrap()),
        (catalog::fano().constraints().with_rates(&[1; 7]), ClassTuple::new(7, (3, 3), &[1], (7, 7)).unwrap()),
        (catalog::u24().constraints(), ClassTuple::new(4, (2, 4), &[1, 2], (1, 4)).unwrap()),
        (catalog::butterfly5().constraints(), ClassTuple::new(5, (1, 3), &[0, 1, 2], (1, 5)).unwrap()),
        (ConstraintSet::new(5, Vec::new(), Vec::new()).unwrap(), ClassTuple::new(5, (3, 3), &[0, 1, 2], (1, 5)).unwrap()),
    ];
    for (set, class) in cases {
        let (codes, _, note) = clrp_enumerate(&set, 2, &class, &cfg()).unwrap();
        assert!(note.is_none());
        out.extend(codes);
    }
    out
}

fn check_polymatroids(o: &mut Outcome, codes: &[Witness]) {
    let bad = codes.iter().filter(|w| w.rank_vector().check_polymatroid().is_err()).count();
    o.check(bad == 0 && !codes.is_empty(), format!("(d) {} generated rank vectors satisfy normalization, monotonicity and submodularity, {bad} fail", codes.len()));
}

fn check_entropy(o: &mut Outcome, codes: &[Witness]) {
    let mut sample: Vec<Witness> = codes.iter().filter(|w| w.r <= 6).step_by(7).cloned().collect();
    sample.push(prove_ss(&catalog::benaloh(), &catalog::BENALOH_SIZES, 2, &cfg()).unwrap().witness.unwrap());
    sample.push(prove_rep(&catalog::linrank6(), 2, &cfg()).unwrap().witness.unwrap());
    let mut bad = 0;
    for w in &sample {
        let h = w.rank_vector();
        let e = w.entropy_vector();
        if e.iter().enumerate().any(|(m, &x)| (x - h.get(m as u32 + 1) as f64).abs() > 1e-9) {
            bad += 1;
        }
    }
    o.check(bad == 0, format!("(e) entropies of uniform-seed codes equal rank times log2 q on {} codes, {bad} differ", sample.len()));
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    check_pmaps(&mut o);
    check_orbits(&mut o);
    check_dd(&mut o);
    let codes = generated_codes();
    check_polymatroids(&mut o, &codes);
    check_entropy(&mut o, &codes);
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let runs: [&[&str]; 5] = [
        &["prove-rate", "builtin:fano", "--rates", "1,1,1,1,1,1,1", "-q", "2"],
        &["prove-rate", "builtin:fano", "--rates", "1,1,1,1,1,1,1", "-q", "3"],
        &["prove-rate", "builtin:u24", "--rates", "1,1,1,1", "-q", "2"],
        &["prove-rate", "builtin:u24", "--rates", "2,2,2,2", "-q", "2", "--json"],
        &["prove-region", "builtin:hn1", "--dmax", "2", "--rmax", "3", "--list"],
    ];
    for args in runs {
        let first = linrep(args);
        let second = linrep(args);
        o.check(first == second, format!("{} twice gives identical output", args[..2].join(" ")));
    }
    let single = linrep(&["prove-region", "builtin:hn1", "--rmax", "3", "--list"]);
    let threaded = linrep(&["prove-region", "builtin:hn1", "--rmax", "3", "--list", "--jobs", "4"]);
    o.check(single == threaded, "region report is unchanged with four worker threads");
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Fano network is solvable over GF(2) only", criterion_1),
        ("non-Fano network is solvable over GF(3) only", criterion_2),
        ("Vamos network has no binary scalar solution", criterion_3),
        ("U(2,4) network needs rate 2 over GF(2)", criterion_4),
        ("HN1 rate region", criterion_5),
        ("MDCS rate vectors over GF(2)", criterion_6),
        ("Benaloh-Leichter shares of sizes 2,2,3,3,2", criterion_7),
        ("linrank6 is binary representable", criterion_8),
        ("search components agree with brute-force oracles", criterion_9),
        ("reports are deterministic", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        println!("criterion {}: {} - {}", i + 1, if out.ok { "PASS" } else { "FAIL" }, name);
        for l in &out.lines {
            println!("{l}");
        }
        failed += !out.ok as usize;
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
