//! Linear constraints on rank functions, their builders from network coding
//! instances, access structures and rank vectors, and their symmetry group.
//!
//! A constraint asserts Σ c·h(S) = 0 over (coefficient, subset) terms. Fixed
//! values h(S) = v are kept in a separate target table.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::perm::{Bsgs, Perm};
use crate::polymatroid::{labels_of, mask_of, permute_mask, PolymatroidError, RankVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("label {0} out of range 1..={1}")]
    OutOfRange(usize, usize),
    #[error("relation {0}: the input set must be a proper subset of the output set")]
    Relation(usize),
    #[error("minimal authorized sets must not contain the dealer label 1")]
    Dealer,
    #[error("authorized sets are not an antichain")]
    NotAntichain,
    #[error("generator {0} does not preserve the constraint set")]
    BadGenerator(usize),
    #[error("automatic symmetry search supports at most 12 elements, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Polymatroid(#[from] PolymatroidError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Which family a constraint belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    /// source independence
    Independence,
    /// an encoding function at an intermediate node
    Encoding,
    /// a decoding requirement at a sink
    Decoding,
    /// secret recovery by an authorized set
    Recovery,
    /// no leakage to an unauthorized set
    Secrecy,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub terms: Vec<(i64, u32)>,
    pub layer: Layer,
}

impl Constraint {
    pub fn new(terms: Vec<(i64, u32)>, layer: Layer) -> Constraint {
        Constraint { terms: canonical_terms(terms), layer }
    }

    /// Union of all subsets mentioned.
    pub fn support(&self) -> u32 {
        self.terms.iter().fold(0, |m, &(_, s)| m | s)
    }

    pub fn evaluate(&self, h: impl Fn(u32) -> i64) -> i64 {
        self.terms.iter().map(|&(c, s)| c * h(s)).sum()
    }

    fn relabel(&self, perm: &[usize]) -> Vec<(i64, u32)> {
        canonical_terms(self.terms.iter().map(|&(c, s)| (c, permute_mask(s, perm))).collect())
    }
}

/// Merges equal subsets, drops zero coefficients, sorts by subset and makes
/// the first coefficient positive.
fn canonical_terms(mut terms: Vec<(i64, u32)>) -> Vec<(i64, u32)> {
    terms.sort_by_key(|t| t.1);
    let mut out: Vec<(i64, u32)> = Vec::with_capacity(terms.len());
    for (c, s) in terms {
        match out.last_mut() {
            Some(last) if last.1 == s => last.0 += c,
            _ => out.push((c, s)),
        }
    }
    out.retain(|t| t.0 != 0 && t.1 != 0);
    if out.first().is_some_and(|t| t.0 < 0) {
        for t in &mut out {
            t.0 = -t.0;
        }
    }
    out
}

fn fmt_set(f: &mut fmt::Formatter<'_>, mask: u32) -> fmt::Result {
    let labels: Vec<String> = labels_of(mask).iter().map(|l| l.to_string()).collect();
    write!(f, "{{{}}}", labels.join(","))
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                f.write_str("-")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            f.write_str("h")?;
            fmt_set(f, s)?;
        }
        f.write_str(" = 0")
    }
}

/// Constraints plus fixed-value targets on a ground set of size `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    n: usize,
    constraints: Vec<Constraint>,
    targets: Vec<(u32, u32)>,
}

impl ConstraintSet {
    pub fn new(n: usize, constraints: Vec<Constraint>, targets: Vec<(u32, u32)>) -> Result<ConstraintSet, ConstraintError> {
        let full = full_mask(n);
        for c in &constraints {
            if c.support() & !full != 0 {
                return Err(ConstraintError::OutOfRange(32 - (c.support() & !full).leading_zeros() as usize, n));
            }
        }
        for &(m, _) in &targets {
            if m & !full != 0 || m == 0 {
                return Err(ConstraintError::OutOfRange(32 - (m & !full).leading_zeros() as usize, n));
            }
        }
        let mut seen = HashSet::new();
        let constraints = constraints.into_iter().filter(|c| !c.terms.is_empty() && seen.insert(c.terms.clone())).collect();
        let mut targets = targets;
        targets.sort_unstable();
        targets.dedup();
        Ok(ConstraintSet { n, constraints, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
    pub fn targets(&self) -> &[(u32, u32)] {
        &self.targets
    }
    pub fn len(&self) -> usize {
        self.constraints.len()
    }
    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Adds singleton targets h(i) = r_i.
    pub fn with_rates(&self, rates: &[u32]) -> ConstraintSet {
        let mut c = self.clone();
        c.targets.extend(rates.iter().enumerate().map(|(i, &r)| (1u32 << i, r)));
        c.targets.sort_unstable();
        c.targets.dedup();
        c
    }

    /// Checks every constraint and target against a full rank function.
    pub fn satisfied_by(&self, h: impl Fn(u32) -> i64) -> bool {
        self.constraints.iter().all(|c| c.evaluate(&h) == 0) && self.targets.iter().all(|&(m, v)| h(m) == v as i64)
    }

    /// Indices of violated constraints (targets are reported after them,
    /// offset by the constraint count).
    pub fn violations(&self, h: impl Fn(u32) -> i64) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.constraints.len()).filter(|&i| self.constraints[i].evaluate(&h) != 0).collect();
        let off = self.constraints.len();
        v.extend((0..self.targets.len()).filter(|&i| h(self.targets[i].0) != self.targets[i].1 as i64).map(|i| i + off));
        v
    }

    /// Keeps the constraints and targets whose subsets all lie in `x`.
    pub fn restrict(&self, x: u32) -> ConstraintSet {
        ConstraintSet {
            n: self.n,
            constraints: self.constraints.iter().filter(|c| c.support() & !x == 0).cloned().collect(),
            targets: self.targets.iter().filter(|t| t.0 & !x == 0).copied().collect(),
        }
    }

    fn canonical_set(&self) -> (BTreeSet<Vec<(i64, u32)>>, BTreeSet<(u32, u32)>) {
        (self.constraints.iter().map(|c| c.terms.clone()).collect(), self.targets.iter().copied().collect())
    }

    /// True if relabeling by `perm` (0-based images) maps the set onto itself.
    pub fn preserved_by(&self, perm: &[usize]) -> bool {
        let (cs, ts) = self.canonical_set();
        self.constraints.iter().all(|c| cs.contains(&c.relabel(perm)))
            && self.targets.iter().all(|&(m, v)| ts.contains(&(permute_mask(m, perm), v)))
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        for &(m, v) in &self.targets {
            f.write_str("h")?;
            fmt_set(f, m)?;
            writeln!(f, " == {v}")?;
        }
        Ok(())
    }
}

/// A multi-source network coding instance given by (In, In∪Out) relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkInstance {
    pub k: usize,
    pub n: usize,
    pub relations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl NetworkInstance {
    pub fn new(k: usize, n: usize, relations: Vec<(Vec<usize>, Vec<usize>)>) -> Result<NetworkInstance, ConstraintError> {
        if k > n || n > 31 {
            return Err(ConstraintError::OutOfRange(k.max(n), n));
        }
        let mut rels = Vec::new();
        for (i, (a, b)) in relations.into_iter().enumerate() {
            for &l in a.iter().chain(&b) {
                if l == 0 || l > n {
                    return Err(ConstraintError::OutOfRange(l, n));
                }
            }
            let (ma, mb) = (mask_of(&a), mask_of(&b));
            if ma & !mb != 0 || ma == mb {
                return Err(ConstraintError::Relation(i + 1));
            }
            rels.push((labels_of(ma), labels_of(mb)));
        }
        Ok(NetworkInstance { k, n, relations: rels })
    }

    /// Output labels of relation `i` (In∪Out minus In).
    pub fn outputs(&self, i: usize) -> Vec<usize> {
        let (a, b) = &self.relations[i];
        labels_of(mask_of(b) & !mask_of(a))
    }

    /// A relation is a decoding requirement when all outputs are sources.
    pub fn is_decoder(&self, i: usize) -> bool {
        self.outputs(i).iter().all(|&o| o <= self.k)
    }

    pub fn constraints(&self) -> ConstraintSet {
        let mut cs = Vec::new();
        if self.k > 0 {
            let mut terms = vec![(1, full_mask(self.k))];
            terms.extend((0..self.k).map(|i| (-1, 1u32 << i)));
            cs.push(Constraint::new(terms, Layer::Independence));
        }
        for (i, (a, b)) in self.relations.iter().enumerate() {
            let layer = if self.is_decoder(i) { Layer::Decoding } else { Layer::Encoding };
            cs.push(Constraint::new(vec![(1, mask_of(b)), (-1, mask_of(a))], layer));
        }
        ConstraintSet::new(self.n, cs, Vec::new()).expect("labels validated")
    }

    pub fn parse(text: &str) -> Result<NetworkInstance, ConstraintError> {
        let mut header: Option<(usize, usize)> = None;
        let mut rels = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConstraintError::Parse { line: ln + 1, msg };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("network") if header.is_none() => {
                    let kv = parse_kv(words, &["k", "n"]).map_err(err)?;
                    header = Some((kv[0], kv[1]));
                }
                Some("con") if header.is_some() => {
                    let rest = line["con".len()..].trim();
                    let (a, b) = rest.split_once("->").ok_or_else(|| err("expected '->'".into()))?;
                    rels.push((parse_set(a).map_err(err)?, parse_set(b).map_err(err)?));
                }
                _ => return Err(err(format!("unexpected line {line:?}"))),
            }
        }
        let (k, n) = header.ok_or(ConstraintError::Parse { line: 0, msg: "missing 'network' header".into() })?;
        NetworkInstance::new(k, n, rels)
    }
}

impl fmt::Display for NetworkInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "network k={} n={}", self.k, self.n)?;
        for (a, b) in &self.relations {
            writeln!(f, "con {} -> {}", show_set(a), show_set(b))?;
        }
        Ok(())
    }
}

pub(crate) fn show_set(s: &[usize]) -> String {
    let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn parse_kv<'a>(words: impl Iterator<Item = &'a str>, keys: &[&str]) -> Result<Vec<usize>, String> {
    let mut vals = vec![None; keys.len()];
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value, got {w:?}"))?;
        let i = keys.iter().position(|&x| x == k).ok_or_else(|| format!("unknown key {k:?}"))?;
        vals[i] = Some(v.parse::<usize>().map_err(|e| format!("{k}: {e}"))?);
    }
    vals.into_iter().zip(keys).map(|(v, k)| v.ok_or_else(|| format!("missing {k}"))).collect()
}

/// Parses `{1,2,3}`; the whole input must be one set.
pub(crate) fn parse_set(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    let inner = s.strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(|| format!("expected {{...}}, got {s:?}"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"))).collect()
}

/// Secret sharing access structure; label 1 is the dealer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessStructure {
    pub n: usize,
    pub minimal: Vec<Vec<usize>>,
}

impl AccessStructure {
    pub fn new(n: usize, minimal: Vec<Vec<usize>>) -> Result<AccessStructure, ConstraintError> {
        if n > 31 {
            return Err(ConstraintError::OutOfRange(n, 31));
        }
        let mut masks = Vec::new();
        for s in &minimal {
            for &l in s {
                if l == 1 {
                    return Err(ConstraintError::Dealer);
                }
                if l == 0 || l > n {
                    return Err(ConstraintError::OutOfRange(l, n));
                }
            }
            masks.push(mask_of(s));
        }
        for (i, &a) in masks.iter().enumerate() {
            for (j, &b) in masks.iter().enumerate() {
                if i != j && a & b == a {
                    return Err(ConstraintError::NotAntichain);
                }
            }
        }
        Ok(AccessStructure { n, minimal: masks.iter().map(|&m| labels_of(m)).collect() })
    }

    pub fn is_authorized(&self, mask: u32) -> bool {
        self.minimal.iter().any(|s| {
            let m = mask_of(s);
            m & mask == m
        })
    }

    pub fn constraints(&self) -> ConstraintSet {
        let parties = full_mask(self.n) & !1;
        let mut cs = Vec::new();
        let mut s = parties;
        let mut subsets = Vec::new();
        while s != 0 {
            subsets.push(s);
            s = (s - 1) & parties;
        }
        subsets.sort_unstable();
        for &s in subsets.iter().filter(|&&s| self.is_authorized(s)) {
            cs.push(Constraint::new(vec![(1, s | 1), (-1, s)], Layer::Recovery));
        }
        for &s in subsets.iter().filter(|&&s| !self.is_authorized(s)) {
            cs.push(Constraint::new(vec![(1, 1), (1, s), (-1, s | 1)], Layer::Secrecy));
        }
        ConstraintSet::new(self.n, cs, Vec::new()).expect("labels validated")
    }

    pub fn parse(text: &str) -> Result<AccessStructure, ConstraintError> {
        let mut n = None;
        let mut sets = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConstraintError::Parse { line: ln + 1, msg };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("ss") if n.is_none() => n = Some(parse_kv(words, &["n"]).map_err(err)?[0]),
                Some("auth") if n.is_some() => sets.push(parse_set(&line["auth".len()..]).map_err(err)?),
                _ => return Err(err(format!("unexpected line {line:?}"))),
            }
        }
        let n = n.ok_or(ConstraintError::Parse { line: 0, msg: "missing 'ss' header".into() })?;
        AccessStructure::new(n, sets)
    }
}

impl fmt::Display for AccessStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ss n={}", self.n)?;
        for s in &self.minimal {
            writeln!(f, "auth {}", show_set(s))?;
        }
        Ok(())
    }
}

/// Target table fixing every subset rank to the vector's value.
pub fn constraints_from_rank_vector(h: &RankVector) -> Result<ConstraintSet, ConstraintError> {
    h.check_polymatroid()?;
    let targets = (1..1u32 << h.n()).map(|m| (m, h.get(m))).collect();
    ConstraintSet::new(h.n(), Vec::new(), targets)
}

/// Permutations of the ground set preserving a constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    pub n: usize,
    /// generators as 0-based image lists
    pub generators: Vec<Vec<usize>>,
    pub order: u128,
}

impl SymmetryGroup {
    pub fn trivial(n: usize) -> SymmetryGroup {
        SymmetryGroup { n, generators: Vec::new(), order: 1 }
    }

    fn from_gens(n: usize, generators: Vec<Vec<usize>>) -> SymmetryGroup {
        let perms: Vec<Perm> = generators.iter().map(|g| to_perm(g)).collect();
        let order = Bsgs::deterministic(n, Perm::identity(n), &perms).order();
        SymmetryGroup { n, generators, order }
    }

    /// All elements, when there are at most `limit`.
    pub fn elements(&self, limit: u128) -> Option<Vec<Vec<usize>>> {
        let perms: Vec<Perm> = self.generators.iter().map(|g| to_perm(g)).collect();
        let b = Bsgs::deterministic(self.n, Perm::identity(self.n), &perms);
        let mut els: Vec<Vec<usize>> = b.elements(limit)?.into_iter().map(|p| p.0.iter().map(|&x| x as usize).collect()).collect();
        els.sort();
        Some(els)
    }
}

fn to_perm(g: &[usize]) -> Perm {
    Perm(g.iter().map(|&x| x as u32).collect())
}

/// The full group of label permutations preserving `set`, or the group
/// generated by `user` after checking each generator.
pub fn symmetry_group(set: &ConstraintSet, user: Option<&[Vec<usize>]>) -> Result<SymmetryGroup, ConstraintError> {
    let n = set.n();
    if let Some(gens) = user {
        for (i, g) in gens.iter().enumerate() {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if g.len() != n || sorted != (0..n).collect::<Vec<_>>() || !set.preserved_by(g) {
                return Err(ConstraintError::BadGenerator(i + 1));
            }
        }
        return Ok(SymmetryGroup::from_gens(n, gens.to_vec()));
    }
    if n > 12 {
        return Err(ConstraintError::TooLarge(n));
    }
    // refine by a per-label incidence signature
    let sig: Vec<Vec<(Layer, usize, i64, u32, u32)>> = (0..n)
        .map(|e| {
            let mut v: Vec<_> = set
                .constraints()
                .iter()
                .flat_map(|c| {
                    c.terms
                        .iter()
                        .filter(|t| t.1 >> e & 1 == 1)
                        .map(move |&(coef, s)| (c.layer, c.terms.len(), coef, s.count_ones(), 0))
                })
                .collect();
            v.extend(set.targets().iter().filter(|t| t.0 >> e & 1 == 1).map(|&(m, val)| (Layer::Other, 0, 0, m.count_ones(), val)));
            v.sort();
            v
        })
        .collect();
    let (cs, ts) = set.canonical_set();
    let search = Search { n, set, sig: &sig, cs: &cs, ts: &ts };
    // stabilizer chain along the base 0,1,…,n−1: for each level, find one
    // element per orbit point fixing the earlier base points
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut order: u128 = 1;
    for i in 0..n {
        let fixing: Vec<Perm> = gens.iter().filter(|g| (0..i).all(|x| g[x] == x)).map(|g| to_perm(g)).collect();
        let mut orbit = vec![i];
        let mut in_orbit = vec![false; n];
        in_orbit[i] = true;
        let close = |orbit: &mut Vec<usize>, in_orbit: &mut Vec<bool>, gs: &[Perm]| {
            let mut k = 0;
            while k < orbit.len() {
                for g in gs {
                    let y = g.0[orbit[k]] as usize;
                    if !in_orbit[y] {
                        in_orbit[y] = true;
                        orbit.push(y);
                    }
                }
                k += 1;
            }
        };
        let mut level_gens = fixing;
        close(&mut orbit, &mut in_orbit, &level_gens);
        for j in i + 1..n {
            if in_orbit[j] {
                continue;
            }
            let mut perm: Vec<usize> = (0..i).collect();
            perm.push(j);
            let mut used = vec![false; n];
            for &x in &perm {
                used[x] = true;
            }
            if !search.prefix_ok(&perm) {
                continue;
            }
            if let Some(p) = search.complete(&mut perm, &mut used) {
                level_gens.push(to_perm(&p));
                gens.push(p);
                close(&mut orbit, &mut in_orbit, &level_gens);
            }
        }
        order *= orbit.len() as u128;
    }
    Ok(SymmetryGroup { n, generators: gens, order })
}

struct Search<'a> {
    n: usize,
    set: &'a ConstraintSet,
    sig: &'a [Vec<(Layer, usize, i64, u32, u32)>],
    cs: &'a BTreeSet<Vec<(i64, u32)>>,
    ts: &'a BTreeSet<(u32, u32)>,
}

impl Search<'_> {
    /// Checks the constraints and targets that lie inside the assigned prefix
    /// and involve its last position.
    fn prefix_ok(&self, perm: &[usize]) -> bool {
        let i = perm.len() - 1;
        if self.sig[i] != self.sig[perm[i]] {
            return false;
        }
        let domain = (1u32 << perm.len()) - 1;
        let mut full = perm.to_vec();
        full.resize(self.n, 0);
        self.set
            .constraints()
            .iter()
            .filter(|c| c.support() >> i & 1 == 1 && c.support() & !domain == 0)
            .all(|c| self.cs.contains(&c.relabel(&full)))
            && self
                .set
                .targets()
                .iter()
                .filter(|t| t.0 >> i & 1 == 1 && t.0 & !domain == 0)
                .all(|&(m, v)| self.ts.contains(&(permute_mask(m, &full), v)))
    }

    fn complete(&self, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> Option<Vec<usize>> {
        if perm.len() == self.n {
            return Some(perm.clone());
        }
        for j in 0..self.n {
            if used[j] {
                continue;
            }
            perm.push(j);
            if self.prefix_ok(perm) {
                used[j] = true;
                let r = self.complete(perm, used);
                used[j] = false;
                if r.is_some() {
                    perm.pop();
                    return r;
                }
            }
            perm.pop();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> NetworkInstance {
        NetworkInstance::parse(
            "network k=3 n=7\n\
             con {1,2} -> {1,2,4}\ncon {2,3} -> {2,3,5}\ncon {4,5} -> {4,5,6}\ncon {3,4} -> {3,4,7}\n\
             con {1,6} -> {1,3,6}\ncon {6,7} -> {2,6,7}\ncon {5,7} -> {1,5,7}\n",
        )
        .unwrap()
    }

    fn hn1() -> NetworkInstance {
        NetworkInstance::new(
            3,
            6,
            vec![
                (vec![1, 2, 3], vec![1, 2, 3, 4]),
                (vec![1, 3, 4], vec![1, 3, 4, 5]),
                (vec![3, 4, 5], vec![3, 4, 5, 6]),
                (vec![4, 5], vec![1, 3, 4, 5]),
                (vec![4, 6], vec![2, 3, 4, 6]),
                (vec![5, 6], vec![2, 3, 5, 6]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn network_constraint_counts() {
        let f = fano().constraints();
        assert_eq!(f.len(), 8);
        assert_eq!(f.constraints().iter().filter(|c| c.layer == Layer::Encoding).count(), 4);
        assert_eq!(f.constraints().iter().filter(|c| c.layer == Layer::Decoding).count(), 3);
        assert_eq!(hn1().constraints().len(), 7);
        let bare = NetworkInstance::new(3, 3, vec![]).unwrap().constraints();
        assert_eq!(bare.len(), 1);
        assert_eq!(bare.constraints()[0].to_string(), "h{1} + h{2} + h{3} - h{1,2,3} = 0");
    }

    #[test]
    fn network_parse_errors_and_roundtrip() {
        let f = fano();
        assert_eq!(NetworkInstance::parse(&f.to_string()).unwrap(), f);
        assert!(matches!(NetworkInstance::parse("network k=1 n=2\ncon {1} -> {1,3}\n"), Err(ConstraintError::OutOfRange(3, 2))));
        assert!(matches!(NetworkInstance::parse("network k=1 n=2\ncon {1} -> {1,2} x\n"), Err(ConstraintError::Parse { line: 2, .. })));
        assert!(matches!(NetworkInstance::parse("con {1} -> {1,2}\n"), Err(ConstraintError::Parse { line: 1, .. })));
        assert!(matches!(NetworkInstance::parse("network k=1 n=2\ncon {1,2} -> {1}\n"), Err(ConstraintError::Relation(1))));
    }

    #[test]
    fn access_structure_constraints() {
        let b = AccessStructure::new(5, vec![vec![2, 3], vec![3, 4], vec![4, 5]]).unwrap();
        let c = b.constraints();
        assert_eq!(c.constraints().iter().filter(|c| c.layer == Layer::Recovery).count(), 8);
        assert_eq!(c.constraints().iter().filter(|c| c.layer == Layer::Secrecy).count(), 7);
        let full = AccessStructure::new(4, vec![vec![2], vec![3], vec![4]]).unwrap();
        assert!(full.constraints().constraints().iter().all(|c| c.layer == Layer::Recovery));
        let empty = AccessStructure::new(4, vec![]).unwrap();
        assert_eq!(empty.constraints().len(), 7);
        assert!(empty.constraints().constraints().iter().all(|c| c.layer == Layer::Secrecy));
        assert_eq!(AccessStructure::new(4, vec![vec![1, 2]]), Err(ConstraintError::Dealer));
        assert_eq!(AccessStructure::new(4, vec![vec![2], vec![2, 3]]), Err(ConstraintError::NotAntichain));
        assert_eq!(AccessStructure::parse(&b.to_string()).unwrap(), b);
    }

    #[test]
    fn rank_vector_targets() {
        let zero = RankVector::new(vec![0; 7]).unwrap();
        let c = constraints_from_rank_vector(&zero).unwrap();
        assert_eq!(c.targets().len(), 7);
        assert!(c.targets().iter().all(|t| t.1 == 0));
        let u24: Vec<u32> = (1u32..16).map(|m| m.count_ones().min(2)).collect();
        assert_eq!(constraints_from_rank_vector(&RankVector::new(u24).unwrap()).unwrap().targets().len(), 15);
        let bad = RankVector::new(vec![1, 1, 3]).unwrap();
        assert!(constraints_from_rank_vector(&bad).is_err());
    }

    #[test]
    fn restriction() {
        let f = fano().constraints();
        let r = f.restrict(mask_of(&[1, 2, 4]));
        assert_eq!(r.len(), 1);
        assert_eq!(r.constraints()[0].terms, vec![(1, mask_of(&[1, 2])), (-1, mask_of(&[1, 2, 4]))]);
        assert_eq!(f.restrict(0x7f), f);
        assert!(f.restrict(0).is_empty());
        let small = f.restrict(mask_of(&[1, 2, 3, 4]));
        let big = f.restrict(mask_of(&[1, 2, 3, 4, 5]));
        assert!(small.constraints().iter().all(|c| big.constraints().contains(c)));
    }

    #[test]
    fn symmetry_groups() {
        let net = NetworkInstance::new(
            2,
            5,
            vec![
                (vec![1, 2], vec![1, 2, 3]),
                (vec![1, 2], vec![1, 2, 4]),
                (vec![3, 4], vec![3, 4, 5]),
                (vec![3, 5], vec![1, 3, 5]),
                (vec![4, 5], vec![1, 4, 5]),
                (vec![3, 4], vec![2, 3, 4]),
            ],
        )
        .unwrap();
        let g = symmetry_group(&net.constraints(), None).unwrap();
        assert_eq!(g.order, 2);
        assert_eq!(g.generators, vec![vec![0, 1, 3, 2, 4]]);
        let empty = ConstraintSet::new(4, vec![], vec![]).unwrap();
        assert_eq!(symmetry_group(&empty, None).unwrap().order, 24);
        // generic asymmetric rank vector on 4 elements
        let h = RankVector::new((1u32..16).map(|m| (0..4).filter(|i| m >> i & 1 == 1).map(|i| i + 1).sum()).collect()).unwrap();
        h.check_polymatroid().unwrap();
        let c = constraints_from_rank_vector(&h).unwrap();
        let sg = symmetry_group(&c, None).unwrap();
        let brute = permutations(4).into_iter().filter(|p| c.preserved_by(p)).count();
        assert_eq!(sg.order as usize, brute);
        assert_eq!(sg.order, 1);
        assert!(symmetry_group(&net.constraints(), Some(&[vec![1, 0, 2, 3, 4]])).is_err());
        assert_eq!(symmetry_group(&net.constraints(), Some(&[vec![0, 1, 3, 2, 4]])).unwrap().order, 2);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn returned_symmetries_preserve_the_set() {
        for c in [fano().constraints(), hn1().constraints()] {
            let g = symmetry_group(&c, None).unwrap();
            for e in g.elements(10_000).unwrap() {
                assert!(c.preserved_by(&e));
            }
        }
    }
}
