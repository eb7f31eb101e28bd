//! Subspace-arrangement representations of polymatroids, the rank oracle,
//! simplification and isomorphism tests.
//!
//! Subsets of the ground set {1,…,N} are bitmasks with bit i−1 standing for
//! label i. Rank vectors list h(S) for S = 1, 2, …, 2^N − 1 in that
//! binary-counter order.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::ff::{rank_in_place, Field};
use crate::group::{GroupElement, PointAction};
use crate::perm::Element;
use crate::subspace::{GrassmannianIndex, Handle, Subspace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolymatroidError {
    #[error("label {0} out of range")]
    OutOfRange(usize),
    #[error("ground set of size {0} is too large for a rank vector")]
    TooLarge(usize),
    #[error("subspaces live in different ambient spaces")]
    Ambient,
    #[error("invalid class tuple: {0}")]
    Class(String),
    #[error("rank vector has length {got}, expected 2^N-1 for some N")]
    VectorLength { got: usize },
    #[error("not a polymatroid: {0}")]
    NotPolymatroid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter mismatch between representations")]
    Mismatch,
    #[error("orbit search exceeded {0} sets")]
    SearchLimit(usize),
}

/// Largest ground set for which full rank vectors are materialized.
pub const MAX_RANK_VECTOR_N: usize = 16;

/// Mask of the labels in `labels` (1-based).
pub fn mask_of(labels: &[usize]) -> u32 {
    labels.iter().fold(0, |m, &l| m | 1 << (l - 1))
}

/// 1-based labels in a mask, ascending.
pub fn labels_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// (N, (r_l, r_u), K, (s_l, s_u)).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassTuple {
    pub n: usize,
    pub r: (usize, usize),
    pub k: Vec<usize>,
    pub s: (usize, usize),
}

impl ClassTuple {
    pub fn new(n: usize, r: (usize, usize), k: &[usize], s: (usize, usize)) -> Result<ClassTuple, PolymatroidError> {
        let mut k = k.to_vec();
        k.sort_unstable();
        k.dedup();
        let c = ClassTuple { n, r, k, s };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), PolymatroidError> {
        let max_k = self.k.iter().copied().max().ok_or_else(|| PolymatroidError::Class("K is empty".into()))?;
        if self.r.0 > self.r.1 || self.r.1 > self.n * max_k {
            return Err(PolymatroidError::Class(format!("need r_l <= r_u <= N*max K, got {:?}", self.r)));
        }
        if self.s.0 > self.s.1 || self.s.1 > self.n {
            return Err(PolymatroidError::Class(format!("need s_l <= s_u <= N, got {:?}", self.s)));
        }
        Ok(())
    }
}

/// h(S) for every nonempty S in binary-counter order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankVector {
    n: usize,
    entries: Vec<u32>,
}

impl RankVector {
    pub fn new(entries: Vec<u32>) -> Result<RankVector, PolymatroidError> {
        let len = entries.len() + 1;
        if !len.is_power_of_two() || len < 2 {
            return Err(PolymatroidError::VectorLength { got: entries.len() });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_RANK_VECTOR_N {
            return Err(PolymatroidError::TooLarge(n));
        }
        Ok(RankVector { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
    /// h(S); h(∅) = 0.
    pub fn get(&self, mask: u32) -> u32 {
        if mask == 0 {
            0
        } else {
            self.entries[mask as usize - 1]
        }
    }
    pub fn singletons(&self) -> Vec<u32> {
        (0..self.n).map(|i| self.get(1 << i)).collect()
    }

    /// Checks normalization, monotonicity and submodularity exhaustively.
    pub fn check_polymatroid(&self) -> Result<(), PolymatroidError> {
        let full = (1u32 << self.n) - 1;
        for s in 0..=full {
            for i in 0..self.n {
                let t = s | 1 << i;
                if self.get(t) < self.get(s) {
                    return Err(PolymatroidError::NotPolymatroid(format!("h({t:b}) < h({s:b})")));
                }
                for j in i + 1..self.n {
                    if s >> i & 1 == 1 || s >> j & 1 == 1 {
                        continue;
                    }
                    let (a, b, ab) = (s | 1 << i, s | 1 << j, s | 1 << i | 1 << j);
                    if self.get(a) + self.get(b) < self.get(ab) + self.get(s) {
                        return Err(PolymatroidError::NotPolymatroid(format!("submodularity fails at {a:b},{b:b}")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for RankVector {
    type Err = PolymatroidError;
    fn from_str(s: &str) -> Result<RankVector, PolymatroidError> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let entries = s
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|e| PolymatroidError::Parse(format!("{x:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        RankVector::new(entries)
    }
}

/// Rank of the sum of the given subspaces of F_q^r.
pub fn rank_of(spaces: &[&Subspace], r: usize, f: &Field) -> usize {
    let rows: usize = spaces.iter().map(|s| s.dim()).sum();
    if rows == 0 {
        return 0;
    }
    let mut data = Vec::with_capacity(rows * r);
    for s in spaces {
        data.extend_from_slice(s.basis().data());
    }
    rank_in_place(&mut data, rows, r, f)
}

/// An ordered multiset of N subspaces of F_q^r; label i is `spaces[i-1]`.
#[derive(Debug)]
pub struct PolymatroidRep {
    field: Arc<Field>,
    r: usize,
    spaces: Vec<Subspace>,
    evaluations: AtomicU64,
}

impl Clone for PolymatroidRep {
    fn clone(&self) -> Self {
        PolymatroidRep {
            field: self.field.clone(),
            r: self.r,
            spaces: self.spaces.clone(),
            evaluations: AtomicU64::new(self.evaluations()),
        }
    }
}

impl PartialEq for PolymatroidRep {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && *self.field == *other.field && self.spaces == other.spaces
    }
}

impl PolymatroidRep {
    pub fn new(field: Arc<Field>, r: usize, spaces: Vec<Subspace>) -> Result<PolymatroidRep, PolymatroidError> {
        if spaces.iter().any(|s| s.ambient() != r) {
            return Err(PolymatroidError::Ambient);
        }
        Ok(PolymatroidRep { field, r, spaces, evaluations: AtomicU64::new(0) })
    }

    pub fn from_handles(index: &GrassmannianIndex, handles: &[Option<Handle>]) -> PolymatroidRep {
        let r = index.ambient();
        let spaces = handles.iter().map(|h| h.map_or_else(|| Subspace::zero(r), |h| index.get(h).clone())).collect();
        PolymatroidRep { field: index.field().clone(), r, spaces, evaluations: AtomicU64::new(0) }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn ground_size(&self) -> usize {
        self.spaces.len()
    }
    pub fn ambient(&self) -> usize {
        self.r
    }
    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }
    /// Set of singleton ranks K_P.
    pub fn singleton_ranks(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.spaces.iter().map(|s| s.dim()).collect();
        k.sort_unstable();
        k.dedup();
        k
    }
    /// Number of rank-oracle evaluations so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// dim Σ_{i∈S} V_i for a label mask S.
    pub fn rank(&self, mask: u32) -> Result<usize, PolymatroidError> {
        if let Some(bad) = labels_of(mask).into_iter().find(|&l| l > self.spaces.len()) {
            return Err(PolymatroidError::OutOfRange(bad));
        }
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let chosen: Vec<&Subspace> = labels_of(mask).into_iter().map(|l| &self.spaces[l - 1]).collect();
        Ok(rank_of(&chosen, self.r, &self.field))
    }

    pub fn rank_vector(&self) -> Result<RankVector, PolymatroidError> {
        let n = self.spaces.len();
        if n > MAX_RANK_VECTOR_N || n == 0 {
            return Err(PolymatroidError::TooLarge(n));
        }
        let entries = (1..1u32 << n).map(|m| self.rank(m).map(|x| x as u32)).collect::<Result<Vec<_>, _>>()?;
        RankVector::new(entries)
    }

    /// Removes loops and all but the smallest label of each parallel class.
    pub fn underlying_simple(&self) -> Simplification {
        let mut kept: Vec<usize> = Vec::new();
        let mut degrees: Vec<usize> = Vec::new();
        let mut loops = 0;
        for (i, s) in self.spaces.iter().enumerate() {
            if s.dim() == 0 {
                loops += 1;
                continue;
            }
            match kept.iter().position(|&k| self.spaces[k - 1] == *s) {
                Some(p) => degrees[p] += 1,
                None => {
                    kept.push(i + 1);
                    degrees.push(1);
                }
            }
        }
        let spaces = kept.iter().map(|&k| self.spaces[k - 1].clone()).collect();
        let simple = PolymatroidRep { field: self.field.clone(), r: self.r, spaces, evaluations: AtomicU64::new(0) };
        let mut degree_vector = degrees;
        degree_vector.push(loops);
        Simplification { simple, kept, degree_vector, loops }
    }

    pub fn delete(&self, mask: u32) -> PolymatroidRep {
        let spaces = self.spaces.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, s)| s.clone()).collect();
        PolymatroidRep { field: self.field.clone(), r: self.r, spaces, evaluations: AtomicU64::new(0) }
    }

    /// The representation whose label i carries this one's label perm[i−1].
    pub fn relabel(&self, perm: &[usize]) -> PolymatroidRep {
        let spaces = perm.iter().map(|&p| self.spaces[p - 1].clone()).collect();
        PolymatroidRep { field: self.field.clone(), r: self.r, spaces, evaluations: AtomicU64::new(0) }
    }
}

/// Output of [`PolymatroidRep::underlying_simple`].
#[derive(Clone, Debug)]
pub struct Simplification {
    pub simple: PolymatroidRep,
    /// 1-based labels of the kept elements
    pub kept: Vec<usize>,
    /// parallel-class sizes of kept elements, then the loop count
    pub degree_vector: Vec<usize>,
    pub loops: usize,
}

/// Full rank table of a mask-indexed rank function (index = mask).
pub fn rank_table(p: &PolymatroidRep) -> Vec<u32> {
    let n = p.ground_size();
    let mut t = vec![0u32; 1 << n];
    for m in 1..1u32 << n {
        t[m as usize] = p.rank(m).expect("in range") as u32;
    }
    t
}

/// Maps a mask through a permutation given as 0-based images.
#[inline]
pub fn permute_mask(mask: u32, perm: &[usize]) -> u32 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << perm[i];
        m &= m - 1;
    }
    out
}

/// Per-element invariant: counts of (|S|, h(S)) over the sets S containing it.
fn element_signatures(t: &[u32], n: usize) -> Vec<Vec<u32>> {
    let width = n + 1;
    let maxr = t.iter().copied().max().unwrap_or(0) as usize + 1;
    (0..n)
        .map(|e| {
            let mut sig = vec![0u32; width * maxr];
            for m in 0..t.len() as u32 {
                if m >> e & 1 == 1 {
                    sig[m.count_ones() as usize * maxr + t[m as usize] as usize] += 1;
                }
            }
            sig
        })
        .collect()
}

/// Searches rank-preserving bijections π (0-based images) with
/// t2[π(S)] = t1[S]; calls `visit` for each, stopping when it returns false.
pub fn rank_isomorphisms(t1: &[u32], t2: &[u32], n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if t1.len() != t2.len() {
        return;
    }
    let s1 = element_signatures(t1, n);
    let s2 = element_signatures(t2, n);
    let candidates: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| s1[i] == s2[j]).collect()).collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        i: usize,
        n: usize,
        t1: &[u32],
        t2: &[u32],
        cand: &[Vec<usize>],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == n {
            return visit(perm);
        }
        for &j in &cand[i] {
            if used[j] {
                continue;
            }
            perm[i] = j;
            // all subsets of {0..i} containing i
            let ok = (0..1u32 << i).all(|sub| {
                let m = sub | 1 << i;
                t2[permute_mask(m, perm) as usize] == t1[m as usize]
            });
            if ok {
                used[j] = true;
                let go_on = rec(i + 1, n, t1, t2, cand, perm, used, visit);
                used[j] = false;
                if !go_on {
                    return false;
                }
            }
        }
        perm[i] = usize::MAX;
        true
    }
    rec(0, n, t1, t2, &candidates, &mut perm, &mut used, &mut visit);
}

/// All rank-preserving permutations of a rank table, up to `limit`
/// (None when more exist).
pub fn automorphisms(t: &[u32], n: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut overflow = false;
    rank_isomorphisms(t, t, n, |p| {
        if out.len() == limit {
            overflow = true;
            return false;
        }
        out.push(p.to_vec());
        true
    });
    (!overflow).then_some(out)
}

/// A bijection φ (as 1-based images, φ(i) = w[i−1]) with h₂(φ(S)) = h₁(S),
/// if one exists.
pub fn strong_isomorphic(p1: &PolymatroidRep, p2: &PolymatroidRep) -> Option<Vec<usize>> {
    let n = p1.ground_size();
    if n != p2.ground_size() {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let s1 = p1.underlying_simple();
    let s2 = p2.underlying_simple();
    if s1.simple.spaces == s2.simple.spaces && s1.loops == s2.loops {
        // identical simple parts: compare degree vectors up to automorphisms
        let ts = rank_table(&s1.simple);
        let m = s1.kept.len();
        let mut found = None;
        rank_isomorphisms(&ts, &ts, m, |a| {
            if (0..m).all(|i| s1.degree_vector[i] == s2.degree_vector[a[i]]) {
                found = Some(a.to_vec());
                false
            } else {
                true
            }
        });
        let a = found?;
        // class of simple element i in p1 goes to class of a[i] in p2
        let class_of = |p: &PolymatroidRep, s: &Simplification| -> Vec<Option<usize>> {
            p.spaces.iter().map(|v| s.simple.spaces.iter().position(|w| w == v).filter(|_| v.dim() > 0)).collect()
        };
        let c1 = class_of(p1, &s1);
        let c2 = class_of(p2, &s2);
        let mut used = vec![false; n];
        let mut w = vec![0usize; n];
        for i in 0..n {
            let target = c1[i].map(|c| a[c]);
            let j = (0..n).find(|&j| !used[j] && c2[j] == target).expect("degree vectors match");
            used[j] = true;
            w[i] = j + 1;
        }
        return Some(w);
    }
    let t1 = rank_table(p1);
    let t2 = rank_table(p2);
    let mut found = None;
    rank_isomorphisms(&t1, &t2, n, |p| {
        found = Some(p.iter().map(|x| x + 1).collect());
        false
    });
    found
}

/// A group element mapping the subspace multiset of `p1` onto that of
/// `p2`, searched over the orbit of the set under ⟨gens⟩.
pub fn weak_isomorphic(
    p1: &PolymatroidRep,
    p2: &PolymatroidRep,
    gens: &[GroupElement],
    action: &PointAction,
    limit: usize,
) -> Result<Option<GroupElement>, PolymatroidError> {
    if p1.ground_size() != p2.ground_size() || p1.r != p2.r || p1.singleton_ranks() != p2.singleton_ranks() {
        return Err(PolymatroidError::Mismatch);
    }
    let index = action.index();
    let handles = |p: &PolymatroidRep| -> Result<Vec<Handle>, PolymatroidError> {
        let mut v = p.spaces.iter().map(|s| index.handle_of(s).ok_or(PolymatroidError::Mismatch)).collect::<Result<Vec<_>, _>>()?;
        v.sort_unstable();
        Ok(v)
    };
    let start = handles(p1)?;
    let goal = handles(p2)?;
    let f = action.field();
    let elts: Vec<_> = gens.iter().map(|g| action.elt(g.clone())).collect();
    let mut seen: HashMap<Vec<Handle>, usize> = HashMap::new();
    let mut queue: Vec<(Vec<Handle>, GroupElement)> = vec![(start.clone(), GroupElement::identity(p1.r))];
    seen.insert(start, 0);
    let mut i = 0;
    while i < queue.len() {
        if queue[i].0 == goal {
            return Ok(Some(queue[i].1.clone()));
        }
        for e in &elts {
            let mut img: Vec<Handle> = queue[i].0.iter().map(|&h| e.image(h)).collect();
            img.sort_unstable();
            if !seen.contains_key(&img) {
                if seen.len() >= limit {
                    return Err(PolymatroidError::SearchLimit(limit));
                }
                seen.insert(img.clone(), queue.len());
                let g = e.g.compose(&queue[i].1, f);
                queue.push((img, g));
            }
        }
        i += 1;
    }
    Ok(None)
}

/// Elements i,j (1-based) with f(i)=f(j)=f({i,j}) > 0, grouped.
pub fn parallel_classes_by_rank(h: &RankVector) -> Vec<Vec<usize>> {
    let n = h.n();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 1..=n {
        let hi = h.get(1 << (i - 1));
        if hi == 0 {
            continue;
        }
        let hit = classes.iter_mut().find(|c| {
            let j = c[0];
            h.get(1 << (j - 1)) == hi && h.get((1 << (i - 1)) | (1 << (j - 1))) == hi
        });
        match hit {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

/// Distinct values in a list, ascending.
pub fn unique(values: &[usize]) -> Vec<usize> {
    let set: HashSet<usize> = values.iter().copied().collect();
    let mut v: Vec<usize> = set.into_iter().collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::group_generators;

    fn f2() -> Arc<Field> {
        Arc::new(Field::gf(2).unwrap())
    }

    fn span(vs: &[&[u8]], f: &Field) -> Subspace {
        let r = vs.first().map_or(0, |v| v.len());
        Subspace::canonicalize(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), r, f).unwrap()
    }

    pub(crate) fn fano_rep() -> PolymatroidRep {
        let f = f2();
        let pts: [&[u8]; 7] = [&[0, 0, 1], &[0, 1, 0], &[0, 1, 1], &[1, 0, 0], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]];
        let spaces = pts.iter().map(|v| span(&[v], &f)).collect();
        PolymatroidRep::new(f, 3, spaces).unwrap()
    }

    #[test]
    fn rank_examples() {
        let p = fano_rep();
        assert_eq!(p.rank(0).unwrap(), 0);
        assert_eq!(p.rank(mask_of(&[1, 2, 4])).unwrap(), 3);
        for i in 1..=7 {
            assert_eq!(p.rank(mask_of(&[i])).unwrap(), 1);
        }
        assert!(p.rank(mask_of(&[8])).is_err());
        // three planes of F_2^3 given by their normal vectors e3, e2, e1
        let f = f2();
        let planes = vec![
            span(&[&[1, 0, 0], &[0, 1, 0]], &f),
            span(&[&[1, 0, 0], &[0, 0, 1]], &f),
            span(&[&[0, 1, 0], &[0, 0, 1]], &f),
        ];
        let q = PolymatroidRep::new(f, 3, planes).unwrap();
        assert_eq!(q.rank(mask_of(&[1, 2])).unwrap(), 3);
    }

    #[test]
    fn rank_vector_examples() {
        let f = f2();
        let v = span(&[&[1, 0]], &f);
        let one = PolymatroidRep::new(f.clone(), 2, vec![v.clone()]).unwrap();
        assert_eq!(one.rank_vector().unwrap().entries(), &[1]);
        let two = PolymatroidRep::new(f, 2, vec![v.clone(), v]).unwrap();
        assert_eq!(two.rank_vector().unwrap().entries(), &[1, 1, 1]);
        let before = two.evaluations();
        two.rank(1).unwrap();
        assert_eq!(two.evaluations(), before + 1);
    }

    #[test]
    fn fano_rank_function_from_incidences() {
        // lines of the Fano plane: triples of nonzero vectors summing to zero
        let p = fano_rep();
        let h = p.rank_vector().unwrap();
        h.check_polymatroid().unwrap();
        let vecs: Vec<u8> = vec![1, 2, 3, 4, 5, 6, 7];
        let lines: Vec<u32> = (0..7)
            .flat_map(|a| (a + 1..7).flat_map(move |b| (b + 1..7).map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| vecs[a] ^ vecs[b] ^ vecs[c] == 0)
            .map(|(a, b, c)| 1 << a | 1 << b | 1 << c)
            .collect();
        assert_eq!(lines.len(), 7);
        for m in 1u32..128 {
            let expected = match m.count_ones() {
                1 => 1,
                2 => 2,
                3 if lines.contains(&m) => 2,
                _ => 3,
            };
            assert_eq!(h.get(m), expected, "mask {m:b}");
        }
    }

    #[test]
    fn rank_vector_text_roundtrip() {
        let h: RankVector = "1,1,2".parse().unwrap();
        assert_eq!(h.to_string(), "1,1,2");
        assert_eq!(h.n(), 2);
        assert!("1,1".parse::<RankVector>().is_err());
        assert!("1,x,2".parse::<RankVector>().is_err());
        let bad = RankVector::new(vec![2, 1, 1]).unwrap();
        assert!(bad.check_polymatroid().is_err());
    }

    #[test]
    fn simplification_examples() {
        let p = fano_rep();
        let s = p.underlying_simple();
        assert_eq!(s.kept, (1..=7).collect::<Vec<_>>());
        assert_eq!(s.degree_vector, vec![1, 1, 1, 1, 1, 1, 1, 0]);
        let f = f2();
        let v = span(&[&[1, 0]], &f);
        let q = PolymatroidRep::new(f, 2, vec![v.clone(), v, Subspace::zero(2)]).unwrap();
        let s = q.underlying_simple();
        assert_eq!(s.simple.ground_size(), 1);
        assert_eq!(s.degree_vector, vec![2, 1]);
        assert_eq!(s.degree_vector.iter().sum::<usize>(), 3);
    }

    #[test]
    fn parallel_classes_agree_with_rank_condition() {
        let f = f2();
        let idx = GrassmannianIndex::new(f.clone(), 3, &[0, 1, 2]).unwrap();
        let n = idx.len();
        for seed in 0..60usize {
            let hs: Vec<Option<Handle>> = (0..5).map(|i| Some(((seed * 7 + i * i * 3 + seed / 5 * i) % n) as Handle)).collect();
            let p = PolymatroidRep::from_handles(&idx, &hs);
            let s = p.underlying_simple();
            let h = p.rank_vector().unwrap();
            let by_rank = parallel_classes_by_rank(&h);
            let reps: Vec<usize> = by_rank.iter().map(|c| c[0]).collect();
            assert_eq!(reps, s.kept);
            let sizes: Vec<usize> = by_rank.iter().map(|c| c.len()).collect();
            assert_eq!(&sizes[..], &s.degree_vector[..s.kept.len()]);
        }
    }

    fn example_one() -> (PolymatroidRep, PolymatroidRep) {
        let f = f2();
        let e = |i: usize| -> Vec<u8> { (0..5).map(|j| u8::from(j + 1 == i)).collect() };
        let add = |a: Vec<u8>, b: Vec<u8>| -> Vec<u8> { a.iter().zip(&b).map(|(x, y)| x ^ y).collect() };
        let sp = |vs: Vec<Vec<u8>>| Subspace::canonicalize(&vs, 5, &f).unwrap();
        let v = vec![
            sp(vec![e(4), e(5)]),
            sp(vec![e(5), e(3)]),
            sp(vec![e(4), e(3)]),
            sp(vec![add(e(4), e(5)), e(3)]),
            sp(vec![e(2), e(1)]),
        ];
        let mut w = v.clone();
        w[3] = sp(vec![add(e(4), e(5)), add(e(3), e(5))]);
        (PolymatroidRep::new(f.clone(), 5, v).unwrap(), PolymatroidRep::new(f, 5, w).unwrap())
    }

    #[test]
    fn example_one_strong_but_not_weak() {
        let (p1, p2) = example_one();
        let w = strong_isomorphic(&p1, &p2).expect("strongly isomorphic");
        let h1 = p1.rank_vector().unwrap();
        let h2 = p2.rank_vector().unwrap();
        for m in 1u32..32 {
            let img = permute_mask(m, &w.iter().map(|x| x - 1).collect::<Vec<_>>());
            assert_eq!(h2.get(img), h1.get(m));
        }
        let idx = Arc::new(GrassmannianIndex::new(p1.field().clone(), 5, &[2]).unwrap());
        let action = PointAction::new(idx);
        let gens = group_generators(5, p1.field());
        assert_eq!(weak_isomorphic(&p1, &p2, &gens, &action, 5_000_000).unwrap(), None);
    }

    #[test]
    fn strong_isomorphism_basics() {
        let p = fano_rep();
        let id = strong_isomorphic(&p, &p).unwrap();
        assert_eq!(rank_table(&p.relabel(&id)), rank_table(&p));
        let f = f2();
        let a = span(&[&[1, 0]], &f);
        let b = span(&[&[0, 1]], &f);
        let indep = PolymatroidRep::new(f.clone(), 2, vec![a.clone(), b]).unwrap();
        let par = PolymatroidRep::new(f, 2, vec![a.clone(), a]).unwrap();
        assert_eq!(indep.rank_vector().unwrap().entries(), &[1, 1, 2]);
        assert!(strong_isomorphic(&indep, &par).is_none());
        // relabelings are isomorphic; check symmetry and transitivity on a sample
        let q = p.relabel(&[3, 1, 2, 7, 5, 6, 4]);
        let r = q.relabel(&[2, 3, 1, 4, 7, 6, 5]);
        assert!(strong_isomorphic(&p, &q).is_some());
        assert!(strong_isomorphic(&q, &p).is_some());
        assert!(strong_isomorphic(&p, &r).is_some());
    }

    #[test]
    fn weak_isomorphism_by_construction() {
        let p = fano_rep().delete(mask_of(&[7]));
        let idx = Arc::new(GrassmannianIndex::new(p.field().clone(), 3, &[1]).unwrap());
        let action = PointAction::new(idx);
        let f = p.field().clone();
        let gens = group_generators(3, &f);
        let g = gens[0].compose(&gens[1], &f).compose(&gens[0], &f);
        let moved = PolymatroidRep::new(f.clone(), 3, p.spaces().iter().map(|s| g.act(s, &f)).collect()).unwrap();
        let w = weak_isomorphic(&p, &moved, &gens, &action, 1000).unwrap().expect("weakly isomorphic");
        let mut img: Vec<Subspace> = p.spaces().iter().map(|s| w.act(s, &f)).collect();
        let mut goal = moved.spaces().to_vec();
        img.sort();
        goal.sort();
        assert_eq!(img, goal);
        assert!(strong_isomorphic(&p, &moved).is_some());
    }

    #[test]
    fn delete_keeps_ranks() {
        let p = fano_rep();
        assert_eq!(p.delete(0), p);
        let d = p.delete(mask_of(&[2, 5]));
        let kept = [1, 3, 4, 6, 7];
        for m in 1u32..32 {
            let orig: Vec<usize> = labels_of(m).iter().map(|&l| kept[l - 1]).collect();
            assert_eq!(d.rank(m).unwrap(), p.rank(mask_of(&orig)).unwrap());
        }
    }

    #[test]
    fn automorphisms_of_fano() {
        let t = rank_table(&fano_rep());
        assert_eq!(automorphisms(&t, 7, 1000).unwrap().len(), 168);
        assert!(automorphisms(&t, 7, 10).is_none());
    }

    #[test]
    fn class_tuple_bounds() {
        assert!(ClassTuple::new(7, (3, 3), &[1], (3, 7)).is_ok());
        assert!(ClassTuple::new(2, (3, 3), &[1], (1, 2)).is_err());
        assert!(ClassTuple::new(3, (1, 2), &[1], (3, 2)).is_err());
        assert!(ClassTuple::new(3, (1, 2), &[], (1, 2)).is_err());
    }
}
