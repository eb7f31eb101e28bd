//! Partial maps from a polymatroid's ground set into the constraint labels,
//! searched depth-first in lexicographic order with symmetry pruning.

use std::fmt;

use crate::constraints::ConstraintSet;
use crate::ff::{rank_in_place, Field};
use crate::polymatroid::{automorphisms, permute_mask};
use crate::subspace::Subspace;

/// Injective map from object elements 1..=j to labels, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PMap {
    pub images: Vec<usize>,
}

impl PMap {
    pub fn null() -> PMap {
        PMap { images: Vec::new() }
    }
    pub fn len(&self) -> usize {
        self.images.len()
    }
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
    /// 1-based images.
    pub fn labels(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }
}

impl fmt::Display for PMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.images.iter().enumerate() {
            writeln!(f, "{}->{}", i + 1, x + 1)?;
        }
        Ok(())
    }
}

/// Number of nonempty injective tuples over [N] of length at most N.
pub fn pmap_count(n: u32) -> u128 {
    let mut total = 0u128;
    for k in 0..n {
        // C(n,k)·(n−k)! = n!/k!
        total += ((k + 1)..=n).map(u128::from).product::<u128>();
    }
    total
}

/// Lazily memoized rank function of an ordered subspace list.
pub struct RankCache<'a> {
    field: &'a Field,
    r: usize,
    spaces: Vec<&'a Subspace>,
    cache: Vec<u8>,
    evaluations: u64,
    buf: Vec<u8>,
}

const UNKNOWN: u8 = u8::MAX;

impl<'a> RankCache<'a> {
    pub fn new(field: &'a Field, r: usize, spaces: Vec<&'a Subspace>) -> RankCache<'a> {
        assert!(spaces.len() <= 24, "rank cache limited to 24 elements");
        let mut cache = vec![UNKNOWN; 1 << spaces.len()];
        cache[0] = 0;
        RankCache { field, r, spaces, cache, evaluations: 0, buf: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.spaces.len()
    }

    /// Rank-oracle evaluations performed (cache misses).
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn rank(&mut self, mask: u32) -> u32 {
        let c = self.cache[mask as usize];
        if c != UNKNOWN {
            return c as u32;
        }
        self.evaluations += 1;
        self.buf.clear();
        let mut rows = 0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            let s = self.spaces[i];
            self.buf.extend_from_slice(s.basis().data());
            rows += s.dim();
            m &= m - 1;
        }
        let rk = if rows == 0 { 0 } else { rank_in_place(&mut self.buf, rows, self.r, self.field) };
        self.cache[mask as usize] = rk as u8;
        rk as u32
    }

    pub fn table(&mut self) -> Vec<u32> {
        (0..1u32 << self.size()).map(|m| self.rank(m)).collect()
    }
}

/// Constraint data indexed by label for incremental checking.
pub struct Prepared {
    n: usize,
    /// (terms, support) per constraint
    constraints: Vec<(Vec<(i64, u32)>, u32)>,
    targets: Vec<(u32, u32)>,
    by_label: Vec<Vec<usize>>,
    targets_by_label: Vec<Vec<usize>>,
}

impl Prepared {
    pub fn new(set: &ConstraintSet) -> Prepared {
        let n = set.n();
        let constraints: Vec<(Vec<(i64, u32)>, u32)> = set.constraints().iter().map(|c| (c.terms.clone(), c.support())).collect();
        let targets = set.targets().to_vec();
        let by_label = (0..n).map(|l| (0..constraints.len()).filter(|&i| constraints[i].1 >> l & 1 == 1).collect()).collect();
        let targets_by_label = (0..n).map(|l| (0..targets.len()).filter(|&i| targets[i].0 >> l & 1 == 1).collect()).collect();
        Prepared { n, constraints, targets, by_label, targets_by_label }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Maps a label mask back to element indices through `inv`.
#[inline]
fn pull_back(mask: u32, inv: &[usize]) -> u32 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let l = m.trailing_zeros() as usize;
        out |= 1 << inv[l];
        m &= m - 1;
    }
    out
}

/// Evaluates the constraints and targets that become fully covered when the
/// last entry of `images` is added.
pub fn check_new_constraints(ranks: &mut RankCache, images: &[usize], prep: &Prepared) -> bool {
    let Some(&l) = images.last() else { return true };
    let mut inv = vec![usize::MAX; prep.n];
    let mut covered = 0u32;
    for (i, &x) in images.iter().enumerate() {
        inv[x] = i;
        covered |= 1 << x;
    }
    check_label(ranks, l, covered, &inv, prep)
}

fn check_label(ranks: &mut RankCache, l: usize, covered: u32, inv: &[usize], prep: &Prepared) -> bool {
    for &ti in &prep.targets_by_label[l] {
        let (m, v) = prep.targets[ti];
        if m & !covered == 0 && ranks.rank(pull_back(m, inv)) != v {
            return false;
        }
    }
    for &ci in &prep.by_label[l] {
        let (terms, support) = &prep.constraints[ci];
        if support & !covered != 0 {
            continue;
        }
        let total: i64 = terms.iter().map(|&(c, s)| c * ranks.rank(pull_back(s, inv)) as i64).sum();
        if total != 0 {
            return false;
        }
    }
    true
}

/// Re-validates a full or partial map against every constraint it covers.
pub fn validate_pmap(ranks: &mut RankCache, images: &[usize], prep: &Prepared) -> bool {
    (1..=images.len()).all(|j| check_new_constraints(ranks, &images[..j], prep))
}

/// Ground-set symmetries A of the object and label symmetries B of the
/// constraints, used to skip p-maps that are not orbit-minimal.
pub struct Symmetries {
    /// per depth j, the elements of A stabilizing {0..j−1} setwise
    a_by_depth: Vec<Vec<Vec<usize>>>,
    b: Vec<Vec<usize>>,
}

/// Product bound above which orbit-minimality tests are skipped.
pub const PRUNE_LIMIT: usize = 1_000_000;

impl Symmetries {
    pub fn none(m: usize) -> Symmetries {
        Symmetries { a_by_depth: vec![Vec::new(); m + 1], b: Vec::new() }
    }

    /// `a`: automorphisms of the object (0-based images on 0..m);
    /// `b`: all elements of the constraint symmetry group.
    pub fn new(m: usize, a: &[Vec<usize>], b: &[Vec<usize>]) -> Symmetries {
        let a_by_depth = (0..=m)
            .map(|j| {
                a.iter()
                    .filter(|p| p[..j].iter().all(|&x| x < j))
                    .cloned()
                    .collect::<Vec<_>>()
            })
            .collect();
        Symmetries { a_by_depth, b: b.to_vec() }
    }

    /// Computes A from the object's full rank table when it has at most
    /// `max_m` elements.
    pub fn for_object(ranks: &mut RankCache, b: &[Vec<usize>], max_m: usize) -> Symmetries {
        let m = ranks.size();
        if m > max_m || b.is_empty() && m == 0 {
            return Symmetries::new(m, &[(0..m).collect()], b);
        }
        let t = ranks.table();
        match automorphisms(&t, m, PRUNE_LIMIT) {
            Some(a) => Symmetries::new(m, &a, b),
            None => Symmetries::new(m, &[(0..m).collect()], b),
        }
    }

    /// False if some (a,b) maps the prefix to a lexicographically smaller one.
    fn orbit_minimal(&self, prefix: &[usize]) -> bool {
        let j = prefix.len();
        let a_set = &self.a_by_depth[j];
        if a_set.is_empty() || self.b.is_empty() || a_set.len().saturating_mul(self.b.len()) > PRUNE_LIMIT {
            return true;
        }
        for a in a_set {
            for b in &self.b {
                for x in 0..j {
                    let y = b[prefix[a[x]]];
                    if y != prefix[x] {
                        if y < prefix[x] {
                            return false;
                        }
                        break;
                    }
                }
            }
        }
        true
    }
}

/// Search state shared by the depth-first traversals.
struct Dfs<'p, 'r, 'a> {
    ranks: &'r mut RankCache<'a>,
    prep: &'p Prepared,
    sym: &'p Symmetries,
    m: usize,
    images: Vec<usize>,
    inv: Vec<usize>,
    covered: u32,
    nodes: u64,
}

impl Dfs<'_, '_, '_> {
    fn push(&mut self, l: usize) -> bool {
        let i = self.images.len();
        self.images.push(l);
        self.inv[l] = i;
        self.covered |= 1 << l;
        self.nodes += 1;
        check_label(self.ranks, l, self.covered, &self.inv, self.prep) && self.sym.orbit_minimal(&self.images)
    }

    fn pop(&mut self) {
        let l = self.images.pop().expect("nonempty");
        self.inv[l] = usize::MAX;
        self.covered &= !(1 << l);
    }

    /// First feasible full-depth map whose prefix is ≥ `frontier` while `tight`.
    fn first(&mut self, frontier: &[usize], tight: bool) -> bool {
        let d = self.images.len();
        if d == self.m {
            return true;
        }
        let start = if tight && d < frontier.len() { frontier[d] } else { 0 };
        for l in start..self.prep.n {
            if self.covered >> l & 1 == 1 {
                continue;
            }
            let still_tight = tight && d < frontier.len() && l == frontier[d];
            if self.push(l) && self.first(frontier, still_tight) {
                return true;
            }
            self.pop();
        }
        false
    }

    fn all(&mut self, out: &mut Vec<Vec<usize>>) {
        if self.images.len() == self.m {
            out.push(self.images.clone());
            return;
        }
        for l in 0..self.prep.n {
            if self.covered >> l & 1 == 1 {
                continue;
            }
            if self.push(l) {
                self.all(out);
            }
            self.pop();
        }
    }
}

/// Result of a certificate search.
pub struct Extension {
    pub cert: Option<PMap>,
    /// p-map tree nodes visited
    pub nodes: u64,
}

/// Finds the lexicographically smallest feasible p-map of the whole object
/// among maps whose restriction to the first m−1 elements is ≥ `parent`.
/// With an empty `parent` the search starts at the root.
pub fn extend_pmap(ranks: &mut RankCache, parent: &PMap, sym: &Symmetries, prep: &Prepared) -> Extension {
    let m = ranks.size();
    if m > prep.n {
        return Extension { cert: None, nodes: 0 };
    }
    let mut dfs = Dfs { ranks, prep, sym, m, images: Vec::with_capacity(m), inv: vec![usize::MAX; prep.n], covered: 0, nodes: 0 };
    let found = dfs.first(&parent.images, !parent.is_empty());
    Extension { cert: found.then(|| PMap { images: dfs.images.clone() }), nodes: dfs.nodes }
}

/// Every orbit-minimal feasible map of the object's full size.
pub fn all_feasible_pmaps(ranks: &mut RankCache, sym: &Symmetries, prep: &Prepared) -> Vec<PMap> {
    let m = ranks.size();
    let mut out = Vec::new();
    if m <= prep.n {
        let mut dfs = Dfs { ranks, prep, sym, m, images: Vec::new(), inv: vec![usize::MAX; prep.n], covered: 0, nodes: 0 };
        dfs.all(&mut out);
    }
    out.into_iter().map(|images| PMap { images }).collect()
}

/// Exhaustive reference search over all injective tuples without pruning:
/// the smallest feasible map of full object size, if any.
pub fn exhaustive_min_pmap(ranks: &mut RankCache, set: &ConstraintSet) -> Option<PMap> {
    let m = ranks.size();
    let n = set.n();
    let table = ranks.table();
    let mut tuple = Vec::new();
    fn rec(tuple: &mut Vec<usize>, m: usize, n: usize, table: &[u32], set: &ConstraintSet) -> bool {
        if tuple.len() == m {
            let image = tuple.iter().fold(0u32, |acc, &x| acc | 1 << x);
            let mut inv = vec![usize::MAX; n];
            for (i, &x) in tuple.iter().enumerate() {
                inv[x] = i;
            }
            let sub = set.restrict(image);
            return sub.satisfied_by(|s| table[pull_back(s, &inv) as usize] as i64);
        }
        for l in 0..n {
            if !tuple.contains(&l) {
                tuple.push(l);
                if rec(tuple, m, n, table, set) {
                    return true;
                }
                tuple.pop();
            }
        }
        false
    }
    rec(&mut tuple, m, n, &table, set).then_some(PMap { images: tuple })
}

/// Rate vector achieved by a full bijection: label φ(i) carries rank({i}).
pub fn rates_of(ranks: &mut RankCache, cert: &PMap) -> Vec<u32> {
    let mut r = vec![0u32; cert.len()];
    for (i, &l) in cert.images.iter().enumerate() {
        r[l] = ranks.rank(1 << i);
    }
    r
}

/// Applies a label permutation to a rate vector: out[b(l)] = r[l].
pub fn permute_rates(r: &[u32], b: &[usize]) -> Vec<u32> {
    let mut out = vec![0u32; r.len()];
    for (l, &v) in r.iter().enumerate() {
        out[b[l]] = v;
    }
    out
}

/// Image of an element mask under a map, as a label mask.
pub fn push_forward(mask: u32, cert: &PMap) -> u32 {
    permute_mask(mask, &cert.images)
}
