//! The class enumeration driver and the decision procedures built on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::constraints::{constraints_from_rank_vector, symmetry_group, AccessStructure, ConstraintError, ConstraintSet, NetworkInstance};
use crate::ff::{Field, FieldError};
use crate::generation::{enumerate_class, Arrangement, GenerationError, GridOptions, Limits};
use crate::pmap::{all_feasible_pmaps, extend_pmap, permute_rates, rates_of, validate_pmap, PMap, Prepared, RankCache, Symmetries};
use crate::polymatroid::{parallel_classes_by_rank, rank_of, unique, ClassTuple, PolymatroidError, RankVector};
use crate::subspace::Subspace;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Polymatroid(#[from] PolymatroidError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Generation(GenerationError),
}

/// Tuning knobs shared by all procedures.
#[derive(Clone, Debug)]
pub struct Config {
    /// cap on representatives per grid cell
    pub max_reps: Option<usize>,
    pub timeout: Option<Duration>,
    /// ambient dimension for rate proofs: sum of all rates instead of source rates
    pub literal_rate_bound: bool,
    /// re-run failed resumed searches from the root
    pub check_resumption: bool,
    /// largest object for which ground-set automorphisms are computed
    pub automorphism_size: usize,
    /// worker threads for independent ambient dimensions
    pub jobs: usize,
    pub seed: u64,
    pub record_time: bool,
    /// user-supplied generators for the constraint symmetry group, 0-based
    pub symmetry: Option<Vec<Vec<usize>>>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            max_reps: None,
            timeout: None,
            literal_rate_bound: false,
            check_resumption: false,
            automorphism_size: 10,
            jobs: 1,
            seed: 0x5eed,
            record_time: false,
            symmetry: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// enumeration was cut short by a cap before finding a witness
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A code: subspaces of F_q^r for the ground elements and the map placing
/// them on constraint labels.
#[derive(Clone, Debug)]
pub struct Witness {
    pub field: Arc<Field>,
    pub r: usize,
    pub spaces: Vec<Subspace>,
    pub cert: PMap,
}

impl Witness {
    /// Rank of the union of the elements mapped onto the labels in `mask`.
    pub fn label_rank(&self, mask: u32) -> u32 {
        let sel: Vec<&Subspace> = self.cert.images.iter().enumerate().filter(|&(_, &l)| mask >> l & 1 == 1).map(|(i, _)| &self.spaces[i]).collect();
        rank_of(&sel, self.r, &self.field) as u32
    }

    /// Rank vector indexed by labels.
    pub fn rank_vector(&self) -> RankVector {
        let n = self.spaces.len();
        RankVector::new((1..1u32 << n).map(|m| self.label_rank(m)).collect()).expect("rank function of a subspace arrangement")
    }

    /// Entropies in bits of X_A = (u·B_i)_{i∈A} for a uniform seed u over
    /// F_q^r, where B_i spans the element mapped onto label i. Computed by
    /// listing all q^r seeds.
    pub fn entropy_vector(&self) -> Vec<f64> {
        let n = self.spaces.len();
        let q = self.field.q();
        let seeds = q.pow(self.r as u32);
        let mut by_label = vec![0; n];
        for (i, &l) in self.cert.images.iter().enumerate() {
            by_label[l] = i;
        }
        let mut out = Vec::with_capacity((1 << n) - 1);
        for mask in 1..1u32 << n {
            let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
            let mut u = vec![0u8; self.r];
            for code in 0..seeds {
                let mut c = code;
                for x in u.iter_mut() {
                    *x = (c % q) as u8;
                    c /= q;
                }
                let mut sample = Vec::new();
                for l in (0..n).filter(|l| mask >> l & 1 == 1) {
                    let s = &self.spaces[by_label[l]];
                    for row in s.basis().data().chunks(self.r.max(1)).take(s.dim()) {
                        sample.push(row.iter().zip(&u).fold(0, |acc, (&b, &x)| self.field.add(acc, self.field.mul(b, x))));
                    }
                }
                *counts.entry(sample).or_insert(0) += 1;
            }
            let total = seeds as f64;
            out.push(counts.values().map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            }).sum());
        }
        out
    }

    /// Every constraint and target holds, and the map is a bijection.
    pub fn validate(&self, set: &ConstraintSet) -> bool {
        let n = set.n();
        let mut seen = vec![false; n];
        if self.cert.len() != self.spaces.len() || self.cert.images.iter().any(|&l| l >= n || std::mem::replace(&mut seen[l], true)) {
            return false;
        }
        let table: Vec<u32> = (0..1u32 << n).map(|m| self.label_rank(m)).collect();
        set.satisfied_by(|m| table[m as usize] as i64)
    }

    /// Generator matrices per element, entries printed as `.` for zero.
    pub fn display(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.spaces.iter().enumerate() {
            out.push_str(&format!("{}->{}\n", i + 1, self.cert.images[i] + 1));
            for row in s.basis().data().chunks(self.r.max(1)).take(s.dim()) {
                for &x in row {
                    if x == 0 {
                        out.push_str(" .");
                    } else {
                        out.push_str(&format!(" {x}"));
                    }
                }
                out.push('\n');
            }
            out.push_str("=============================\n");
        }
        out
    }
}

/// Counters collected during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// (ambient r, size, simple size) → surviving representatives
    pub cells: BTreeMap<(usize, usize, usize), usize>,
    pub rank_evaluations: u64,
    pub pmap_nodes: u64,
    /// resumed searches that failed but succeeded from the root
    pub resumption_fallbacks: u64,
    pub elapsed: Option<Duration>,
}

impl Stats {
    fn absorb(&mut self, r: usize, run: &Run) {
        for (&(i, j), &c) in &run.counts {
            self.cells.insert((r, i, j), c);
        }
        self.rank_evaluations += run.evaluations;
        self.pmap_nodes += run.nodes;
        self.resumption_fallbacks += run.fallbacks;
    }

    /// Representatives per size summed over ambient dimensions.
    pub fn per_size(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for (&(_, i, _), &c) in &self.cells {
            *out.entry(i).or_insert(0) += c;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ProverResult {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// why the run was inconclusive
    pub note: Option<String>,
}

struct Run {
    finals: Vec<Arrangement<PMap>>,
    counts: BTreeMap<(usize, usize), usize>,
    evaluations: u64,
    nodes: u64,
    fallbacks: u64,
    truncated: Option<String>,
}

/// Problem data shared by the runs of one procedure.
pub struct Problem {
    pub set: ConstraintSet,
    prep: Prepared,
    b: Vec<Vec<usize>>,
    pub field: Arc<Field>,
}

const B_LIMIT: u128 = 200_000;

impl Problem {
    pub fn new(set: ConstraintSet, q: u64, cfg: &Config) -> Result<Problem, EngineError> {
        let field = Arc::new(Field::gf(q)?);
        let group = symmetry_group(&set, cfg.symmetry.as_deref())?;
        let b = group.elements(B_LIMIT).unwrap_or_else(|| vec![(0..set.n()).collect()]);
        let prep = Prepared::new(&set);
        Ok(Problem { set, prep, b, field })
    }

    /// Order-listed elements of the constraint symmetry group in use.
    pub fn symmetries(&self) -> &[Vec<usize>] {
        &self.b
    }

    fn filter(&self, r: usize, cfg: &Config, spaces: &[Subspace], parent: &PMap, counters: &mut (u64, u64, u64)) -> Option<PMap> {
        let mut rc = RankCache::new(&self.field, r, spaces.iter().collect());
        let sym = Symmetries::for_object(&mut rc, &self.b, cfg.automorphism_size);
        let ext = extend_pmap(&mut rc, parent, &sym, &self.prep);
        counters.1 += ext.nodes;
        let mut cert = ext.cert;
        if cert.is_none() && cfg.check_resumption && !parent.is_empty() {
            let root = extend_pmap(&mut rc, &PMap::null(), &sym, &self.prep);
            counters.1 += root.nodes;
            if root.cert.is_some() {
                counters.2 += 1;
                cert = root.cert;
            }
        }
        counters.0 += rc.evaluations();
        debug_assert!(cert.as_ref().is_none_or(|c| validate_pmap(&mut rc, &c.images, &self.prep)));
        cert
    }

    fn run(&self, class: &ClassTuple, r: usize, cfg: &Config, first_only: bool, deadline: Option<Instant>) -> Result<Run, EngineError> {
        let mut counters = (0u64, 0u64, 0u64);
        let opts = GridOptions { limits: Limits { max_reps: cfg.max_reps, deadline }, first_only, seed: cfg.seed ^ r as u64 };
        let mut filter = |spaces: &[Subspace], parent: &PMap| self.filter(r, cfg, spaces, parent, &mut counters);
        let res = enumerate_class(class, self.field.clone(), r, PMap::null(), &mut filter, &opts);
        let (finals, counts, truncated) = match res {
            Ok(g) => (g.finals, g.counts, None),
            Err(GenerationError::Truncated(why)) => (Vec::new(), BTreeMap::new(), Some(why)),
            Err(e) => return Err(EngineError::Generation(e)),
        };
        Ok(Run { finals, counts, evaluations: counters.0, nodes: counters.1, fallbacks: counters.2, truncated })
    }

    fn witness(&self, r: usize, a: &Arrangement<PMap>) -> Witness {
        Witness { field: self.field.clone(), r, spaces: a.spaces.clone(), cert: a.payload.clone() }
    }

    /// All arrangements of the class passing the constraints, with their
    /// certificates, over every ambient dimension of the class.
    pub fn enumerate(&self, class: &ClassTuple, cfg: &Config) -> Result<(Vec<Witness>, Stats, Option<String>), EngineError> {
        class.validate()?;
        let start = Instant::now();
        let deadline = cfg.timeout.map(|t| start + t);
        let dims: Vec<usize> = (class.r.0.max(1)..=class.r.1).collect();
        let runs: Vec<Result<Run, EngineError>> = if cfg.jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| EngineError::Malformed(e.to_string()))?;
            pool.install(|| dims.par_iter().map(|&r| self.run(class, r, cfg, false, deadline)).collect())
        } else {
            dims.iter().map(|&r| self.run(class, r, cfg, false, deadline)).collect()
        };
        let mut stats = Stats::default();
        let mut out = Vec::new();
        let mut note = None;
        for (&r, run) in dims.iter().zip(runs) {
            let run = run?;
            stats.absorb(r, &run);
            if let Some(why) = run.truncated {
                note.get_or_insert(format!("r={r}: {why}"));
            }
            out.extend(run.finals.iter().map(|a| self.witness(r, a)));
        }
        if cfg.record_time {
            stats.elapsed = Some(start.elapsed());
        }
        Ok((out, stats, note))
    }

    /// Stops at the first arrangement of full size, sweeping r upwards.
    pub fn exists(&self, class: &ClassTuple, cfg: &Config) -> Result<ProverResult, EngineError> {
        class.validate()?;
        let start = Instant::now();
        let deadline = cfg.timeout.map(|t| start + t);
        let mut stats = Stats::default();
        let mut note = None;
        let mut witness = None;
        for r in class.r.0.max(1)..=class.r.1 {
            let run = self.run(class, r, cfg, true, deadline)?;
            stats.absorb(r, &run);
            if let Some(why) = &run.truncated {
                note.get_or_insert(format!("r={r}: {why}"));
            }
            if let Some(a) = run.finals.first() {
                witness = Some(self.witness(r, a));
                break;
            }
        }
        if cfg.record_time {
            stats.elapsed = Some(start.elapsed());
        }
        let verdict = match (&witness, &note) {
            (Some(w), _) => {
                assert!(w.validate(&self.set), "witness fails re-validation");
                Verdict::Yes
            }
            (None, Some(_)) => Verdict::Inconclusive,
            (None, None) => Verdict::No,
        };
        Ok(ProverResult { verdict, witness, stats, note: if verdict == Verdict::Yes { None } else { note } })
    }

    /// Every rate vector achieved by some feasible bijection of `w`.
    pub fn rate_vectors(&self, w: &Witness) -> Vec<Vec<u32>> {
        let mut rc = RankCache::new(&self.field, w.r, w.spaces.iter().collect());
        let sym = Symmetries::for_object(&mut rc, &self.b, self.set.n());
        let mut out = BTreeSet::new();
        for c in all_feasible_pmaps(&mut rc, &sym, &self.prep) {
            let base = rates_of(&mut rc, &c);
            for b in &self.b {
                out.insert(permute_rates(&base, b));
            }
        }
        out.into_iter().collect()
    }
}

/// CLRP enumeration: every constrained polymatroid of the class over F_q.
pub fn clrp_enumerate(set: &ConstraintSet, q: u64, class: &ClassTuple, cfg: &Config) -> Result<(Vec<Witness>, Stats, Option<String>), EngineError> {
    Problem::new(set.clone(), q, cfg)?.enumerate(class, cfg)
}

/// CLRP existence: halts at the first constrained polymatroid found.
pub fn clrp_exists(set: &ConstraintSet, q: u64, class: &ClassTuple, cfg: &Config) -> Result<ProverResult, EngineError> {
    Problem::new(set.clone(), q, cfg)?.exists(class, cfg)
}

/// Whether a network achieves the integer rate vector with a linear code over F_q.
pub fn prove_rate(net: &NetworkInstance, rates: &[u32], q: u64, cfg: &Config) -> Result<ProverResult, EngineError> {
    if rates.len() != net.n {
        return Err(EngineError::Malformed(format!("rate vector has {} entries, network has {}", rates.len(), net.n)));
    }
    let sources: u32 = rates[..net.k].iter().sum();
    let total: u32 = rates.iter().sum();
    let r = if cfg.literal_rate_bound { total } else { sources } as usize;
    if r == 0 {
        return Err(EngineError::Malformed("source rates sum to zero".into()));
    }
    let ks = unique(&rates.iter().map(|&x| x as usize).collect::<Vec<_>>());
    let class = ClassTuple::new(net.n, (r, r), &ks, (net.k.min(net.n), net.n))?;
    clrp_exists(&net.constraints().with_rates(rates), q, &class, cfg)
}

/// Whether an ideal-or-not linear scheme with the given secret and share
/// sizes realizes the access structure over F_q.
pub fn prove_ss(acc: &AccessStructure, sizes: &[u32], q: u64, cfg: &Config) -> Result<ProverResult, EngineError> {
    if sizes.len() != acc.n || sizes.contains(&0) {
        return Err(EngineError::Malformed("sizes must be positive, one per element".into()));
    }
    let set = acc.constraints().with_rates(sizes);
    let problem = Problem::new(set, q, cfg)?;
    let ks = unique(&sizes.iter().map(|&x| x as usize).collect::<Vec<_>>());
    let lo = *sizes.iter().max().expect("nonempty") as usize;
    let hi = (sizes.iter().sum::<u32>() as usize - 1).max(lo);
    let start = Instant::now();
    let mut total = Stats::default();
    let mut note = None;
    let s = (2.min(acc.n), acc.n);
    for r in lo..=hi {
        let class = ClassTuple::new(acc.n, (r, r), &ks, s)?;
        let mut c = cfg.clone();
        c.timeout = cfg.timeout.map(|t| t.saturating_sub(start.elapsed()));
        let res = problem.exists(&class, &c)?;
        for (k, v) in res.stats.cells {
            total.cells.insert(k, v);
        }
        total.rank_evaluations += res.stats.rank_evaluations;
        total.pmap_nodes += res.stats.pmap_nodes;
        total.resumption_fallbacks += res.stats.resumption_fallbacks;
        if res.verdict == Verdict::Yes {
            if cfg.record_time {
                total.elapsed = Some(start.elapsed());
            }
            return Ok(ProverResult { verdict: Verdict::Yes, witness: res.witness, stats: total, note: None });
        }
        if let Some(n) = res.note {
            note.get_or_insert(n);
        }
    }
    if cfg.record_time {
        total.elapsed = Some(start.elapsed());
    }
    let verdict = if note.is_some() { Verdict::Inconclusive } else { Verdict::No };
    Ok(ProverResult { verdict, witness: None, stats: total, note })
}

/// Class parameters implied by a rank vector: ambient rank, singleton
/// ranks, and the number of parallel classes.
pub fn rep_class(h: &RankVector) -> Result<ClassTuple, EngineError> {
    h.check_polymatroid()?;
    let n = h.n();
    let full = h.get((1u32 << n) - 1) as usize;
    let ks = unique(&h.singletons().iter().map(|&x| x as usize).collect::<Vec<_>>());
    let s = parallel_classes_by_rank(h).len();
    Ok(ClassTuple::new(n, (full, full), &ks, (s, s))?)
}

/// Whether the polymatroid with rank vector `h` is representable over F_q.
pub fn prove_rep(h: &RankVector, q: u64, cfg: &Config) -> Result<ProverResult, EngineError> {
    let class = rep_class(h)?;
    if class.r.0 == 0 {
        let witness = Witness { field: Arc::new(Field::gf(q)?), r: 0, spaces: vec![Subspace::zero(0); h.n()], cert: PMap { images: (0..h.n()).collect() } };
        return Ok(ProverResult { verdict: Verdict::Yes, witness: Some(witness), stats: Stats::default(), note: None });
    }
    clrp_exists(&constraints_from_rank_vector(h)?, q, &class, cfg)
}

/// Achievable rate vectors harvested from every code with singleton ranks
/// at most `d` and ambient dimension at most `r_max`.
#[derive(Clone, Debug)]
pub struct RegionResult {
    /// sorted and deduplicated
    pub rates: Vec<Vec<u32>>,
    /// a code achieving each rate vector, parallel to `rates`
    pub witnesses: Vec<Witness>,
    pub complete: bool,
    pub stats: Stats,
    pub note: Option<String>,
}

pub fn prove_region(net: &NetworkInstance, q: u64, d: usize, r_max: usize, cfg: &Config) -> Result<RegionResult, EngineError> {
    if d == 0 || r_max == 0 {
        return Err(EngineError::Malformed("need d >= 1 and r_max >= 1".into()));
    }
    let problem = Problem::new(net.constraints(), q, cfg)?;
    let ks: Vec<usize> = (0..=d).collect();
    let class = ClassTuple::new(net.n, (1, r_max), &ks, (1, net.n))?;
    let (codes, stats, note) = problem.enumerate(&class, cfg)?;
    let mut found: BTreeMap<Vec<u32>, Witness> = BTreeMap::new();
    for w in codes {
        for rate in problem.rate_vectors(&w) {
            if let std::collections::btree_map::Entry::Vacant(slot) = found.entry(rate) {
                let mut rc = RankCache::new(&problem.field, w.r, w.spaces.iter().collect());
                let cert = find_bijection(&mut rc, &problem, slot.key());
                slot.insert(Witness { cert, ..w.clone() });
            }
        }
    }
    let (rates, witnesses) = found.into_iter().unzip();
    Ok(RegionResult { rates, witnesses, complete: note.is_none(), stats, note })
}

/// A feasible bijection of the cached object achieving `rate`.
fn find_bijection(rc: &mut RankCache, problem: &Problem, rate: &[u32]) -> PMap {
    let with = problem.set.with_rates(rate);
    let prep = Prepared::new(&with);
    extend_pmap(rc, &PMap::null(), &Symmetries::none(rc.size()), &prep).cert.expect("rate vector was harvested from this code")
}
