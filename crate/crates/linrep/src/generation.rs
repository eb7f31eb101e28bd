//! Enumeration of subspace arrangements up to isomorphism.
//!
//! Simple arrangements (distinct nonzero subspaces) are classified under
//! PΓL(r,q) level by level with the snakes-and-ladders scheme: every
//! representative R of size i carries its stabilizer and the orbits of that
//! stabilizer on the remaining points, each orbit giving a candidate
//! (i+1)-set R ∪ {x}. A candidate is canonical when, among all ways of
//! writing it as "i-set plus one point", its own decomposition has the least
//! class; otherwise it is fused with the earlier candidate and remembered by
//! a transporter. Non-simple arrangements are then obtained by appending
//! parallel copies and loops, with strong isomorphs removed through degree
//! vectors of the underlying simple part.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ff::Field;
use crate::group::{group_generators, group_order, Elt, GroupElement, PointAction};
use crate::perm::{Bsgs, Element};
use crate::polymatroid::{automorphisms, rank_of, ClassTuple};
use crate::subspace::{GrassmannianIndex, Handle, Subspace, SubspaceError};

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("enumeration stopped early: {0}")]
    Truncated(String),
    #[error("group order of PΓL({0},{1}) is out of range")]
    GroupTooLarge(usize, u64),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

/// Stabilizer orbits of one representative on the points outside it.
struct OrbitTable {
    /// orbit root (least point) per point; u32::MAX for points of R
    root: Vec<u32>,
    /// BFS predecessor and the generator index leading from it
    prev: Vec<u32>,
    via: Vec<u16>,
    size: HashMap<u32, u32>,
}

impl OrbitTable {
    fn build(n: usize, members: &[Handle], perms: &[Vec<u32>]) -> OrbitTable {
        let mut root = vec![u32::MAX - 1; n];
        for &h in members {
            root[h as usize] = u32::MAX;
        }
        let mut prev = vec![u32::MAX; n];
        let mut via = vec![0u16; n];
        let mut size = HashMap::new();
        let mut queue = Vec::new();
        for start in 0..n as u32 {
            if root[start as usize] != u32::MAX - 1 {
                continue;
            }
            root[start as usize] = start;
            queue.clear();
            queue.push(start);
            let mut i = 0;
            while i < queue.len() {
                let p = queue[i];
                for (gi, perm) in perms.iter().enumerate() {
                    let y = perm[p as usize];
                    if root[y as usize] == u32::MAX - 1 {
                        root[y as usize] = start;
                        prev[y as usize] = p;
                        via[y as usize] = gi as u16;
                        queue.push(y);
                    }
                }
                i += 1;
            }
            size.insert(start, queue.len() as u32);
        }
        OrbitTable { root, prev, via, size }
    }

    fn roots(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.size.keys().copied().collect();
        r.sort_unstable();
        r
    }
}

/// One orbit representative of a simple level.
pub struct Rep<T> {
    /// ordered handles: the parent's order followed by the new point
    pub handles: Vec<Handle>,
    /// index of the parent representative in the previous level
    pub parent: usize,
    /// generators of the setwise stabilizer in PΓL(r,q)
    pub stabilizer: Vec<GroupElement>,
    /// order of the stabilizer's action on the points
    pub order: u128,
    pub payload: T,
    orbits: Option<OrbitTable>,
    inverse_gens: Vec<GroupElement>,
}

enum Flag {
    Canonical(usize),
    Mapped(GroupElement, usize),
}

/// Representatives of one size together with the fusion data of the
/// candidates built from them.
pub struct OrbitLevel<T> {
    pub level: usize,
    pub reps: Vec<Rep<T>>,
    /// status of the candidates (rep, orbit root); absent means rejected
    flags: HashMap<(u32, u32), Flag>,
}

/// Resource caps for an enumeration.
#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub max_reps: Option<usize>,
    pub deadline: Option<Instant>,
}

impl Limits {
    fn check(&self, count: usize) -> Result<(), GenerationError> {
        if self.max_reps.is_some_and(|m| count > m) {
            return Err(GenerationError::Truncated(format!("more than {} representatives in one cell", count - 1)));
        }
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(GenerationError::Truncated("time limit reached".into()));
        }
        Ok(())
    }
}

/// Snakes-and-ladders classification of point subsets.
pub struct Leiterspiel<T> {
    action: PointAction,
    levels: Vec<OrbitLevel<T>>,
    rng: ChaCha8Rng,
}

fn product_replacement(gens: &[Elt], identity: &Elt, rng: &mut ChaCha8Rng) -> impl FnMut(&mut ChaCha8Rng) -> Elt {
    let k = gens.len().max(8) + 1;
    let mut state: Vec<Elt> = (0..k).map(|i| if i == 0 { identity.clone() } else { gens[(i - 1) % gens.len()].clone() }).collect();
    let mut step = move |rng: &mut ChaCha8Rng| {
        let i = rng.gen_range(1..k);
        let mut j = rng.gen_range(1..k - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen_bool(0.5) { state[j].clone() } else { state[j].inverse() };
        state[i] = state[i].compose(&other);
        state[0] = state[0].compose(&state[i]);
        state[0].clone()
    };
    for _ in 0..40 {
        step(rng);
    }
    step
}

impl<T> Leiterspiel<T> {
    /// Level 0: the empty set stabilized by the whole group acting on the
    /// subspaces of `index`.
    pub fn new(index: Arc<GrassmannianIndex>, payload: T, seed: u64) -> Result<Leiterspiel<T>, GenerationError> {
        let action = PointAction::new(index);
        let r = action.index().ambient();
        let q = action.field().q() as u64;
        let (gens, order) = if action.is_faithful() && action.n() > 1 {
            let order = group_order(r as u32, q).ok_or(GenerationError::GroupTooLarge(r, q))?;
            (group_generators(r, action.field()).into_iter().filter(|g| !g.is_identity()).collect(), order)
        } else {
            (Vec::new(), 1)
        };
        let root = Rep { handles: Vec::new(), parent: 0, inverse_gens: Vec::new(), stabilizer: gens, order, payload, orbits: None };
        let mut ls = Leiterspiel { action, levels: vec![OrbitLevel { level: 0, reps: vec![root], flags: HashMap::new() }], rng: ChaCha8Rng::seed_from_u64(seed) };
        ls.prepare_orbits(0);
        Ok(ls)
    }

    pub fn action(&self) -> &PointAction {
        &self.action
    }

    pub fn index(&self) -> &Arc<GrassmannianIndex> {
        self.action.index()
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &OrbitLevel<T> {
        &self.levels[i]
    }

    fn field(&self) -> &Field {
        self.action.field()
    }

    fn perms_of(&self, gens: &[GroupElement]) -> Vec<Vec<u32>> {
        gens.iter().map(|g| self.action.perm_of(g).0).collect()
    }

    fn prepare_orbits(&mut self, level: usize) {
        let n = self.action.n();
        for ri in 0..self.levels[level].reps.len() {
            let rep = &self.levels[level].reps[ri];
            let perms = self.perms_of(&rep.stabilizer);
            let table = OrbitTable::build(n, &rep.handles, &perms);
            let inverse: Vec<GroupElement> = rep.stabilizer.iter().map(|g| g.inverse(self.field())).collect();
            let rep = &mut self.levels[level].reps[ri];
            rep.orbits = Some(table);
            rep.inverse_gens = inverse;
        }
    }

    /// Root of the orbit of `z` and an element of the stabilizer taking z to it.
    fn to_root(&self, rep: &Rep<T>, z: Handle) -> (u32, GroupElement) {
        let t = rep.orbits.as_ref().expect("orbits prepared");
        let root = t.root[z as usize];
        let mut s = GroupElement::identity(self.index().ambient());
        let mut p = z;
        while p != root {
            s = rep.inverse_gens[t.via[p as usize] as usize].compose(&s, self.field());
            p = t.prev[p as usize];
        }
        (root, s)
    }

    /// Representative index at level |set| and g with g(set) = rep set, or
    /// None when the set was rejected along the way.
    pub fn lookup(&self, set: &[Handle]) -> Option<(usize, GroupElement)> {
        assert!(set.len() < self.levels.len(), "level {} not built", set.len());
        let mut g = GroupElement::identity(self.index().ambient());
        let mut rho = 0usize;
        let mut buf = Vec::new();
        for (j, &u) in set.iter().enumerate() {
            let rep = &self.levels[j].reps[rho];
            let z = self.action.act_handle(&g, u, &mut buf);
            let (root, s) = self.to_root(rep, z);
            g = s.compose(&g, self.field());
            match self.levels[j].flags.get(&(rho as u32, root))? {
                Flag::Canonical(k) => rho = *k,
                Flag::Mapped(h, k) => {
                    g = h.compose(&g, self.field());
                    rho = *k;
                }
            }
        }
        Some((rho, g))
    }

    /// Builds the next level. `filter(ordered handles, parent payload)`
    /// decides each new representative and must be inherited by subsets.
    /// Stops after `max_new` representatives when given.
    pub fn simple_extensions(
        &mut self,
        filter: &mut dyn FnMut(&[Handle], &T) -> Option<T>,
        limits: &Limits,
        max_new: Option<usize>,
    ) -> Result<usize, GenerationError> {
        let i = self.depth();
        let f = self.action.field().clone();
        let mut next: Vec<Rep<T>> = Vec::new();
        let mut flags: HashMap<(u32, u32), Flag> = HashMap::new();
        let mut buf = Vec::new();
        'reps: for rho in 0..self.levels[i].reps.len() {
            let roots = self.levels[i].reps[rho].orbits.as_ref().expect("orbits prepared").roots();
            let mut elts: Option<(Vec<Elt>, Vec<Elt>)> = None;
            for x0 in roots {
                if max_new.is_some_and(|m| next.len() >= m) {
                    break 'reps;
                }
                let seed: u64 = self.rng.gen();
                let rep = &self.levels[i].reps[rho];
                let own = (rho as u32, x0);
                let mut best = own;
                let mut best_h: Option<GroupElement> = None;
                let mut ys: Vec<GroupElement> = Vec::new();
                let mut dead = false;
                let mut set = rep.handles.clone();
                set.push(x0);
                for yi in 0..rep.handles.len() {
                    let y = rep.handles[yi];
                    let sub: Vec<Handle> = set.iter().copied().filter(|&u| u != y).collect();
                    let Some((rho_y, g)) = self.lookup(&sub) else {
                        dead = true;
                        break;
                    };
                    let target = &self.levels[i].reps[rho_y];
                    let z = self.action.act_handle(&g, y, &mut buf);
                    let (root, s) = self.to_root(target, z);
                    let h = s.compose(&g, &f);
                    let c = (rho_y as u32, root);
                    if c < best {
                        best = c;
                        best_h = Some(h);
                    } else if c == own {
                        ys.push(h);
                    }
                }
                if dead {
                    continue;
                }
                if best < own {
                    let h = best_h.expect("set with best");
                    match flags.get(&best) {
                        None => {}
                        Some(Flag::Canonical(k)) => {
                            flags.insert(own, Flag::Mapped(h, *k));
                        }
                        Some(Flag::Mapped(h2, k)) => {
                            let k = *k;
                            flags.insert(own, Flag::Mapped(h2.compose(&h, &f), k));
                        }
                    }
                    continue;
                }
                let Some(payload) = filter(&set, &rep.payload) else { continue };
                if elts.is_none() {
                    let gens: Vec<Elt> = rep.stabilizer.iter().map(|g| self.action.elt(g.clone())).collect();
                    let inv: Vec<Elt> = rep.inverse_gens.iter().map(|g| self.action.elt(g.clone())).collect();
                    elts = Some((gens, inv));
                }
                let (gens, inv) = elts.as_ref().expect("built above");
                let mut stabilizer = self.point_stabilizer(rho, x0, gens, inv, seed);
                let point_stab_order = rep.order / *rep.orbits.as_ref().expect("orbits").size.get(&x0).expect("root") as u128;
                let order = point_stab_order * (ys.len() as u128 + 1);
                for h in ys {
                    if !h.is_identity() && !stabilizer.contains(&h) {
                        stabilizer.push(h);
                    }
                }
                flags.insert(own, Flag::Canonical(next.len()));
                next.push(Rep { handles: set, parent: rho, stabilizer, order, payload, orbits: None, inverse_gens: Vec::new() });
                limits.check(next.len())?;
            }
        }
        self.levels[i].flags = flags;
        self.levels.push(OrbitLevel { level: i + 1, reps: next, flags: HashMap::new() });
        self.prepare_orbits(i + 1);
        Ok(self.levels[i + 1].reps.len())
    }

    /// Generators of the stabilizer of x0 in the stabilizer of rep `rho`.
    fn point_stabilizer(&self, rho: usize, x0: u32, gens: &[Elt], inv: &[Elt], seed: u64) -> Vec<GroupElement> {
        let rep = &self.levels[self.depth()].reps[rho];
        let t = rep.orbits.as_ref().expect("orbits");
        let orbit_len = t.size[&x0] as u128;
        let target = rep.order / orbit_len;
        if target == 1 {
            return Vec::new();
        }
        if orbit_len == 1 {
            return rep.stabilizer.clone();
        }
        let identity = self.action.identity();
        let to_root = |z: u32| -> Elt {
            let mut s = identity.clone();
            let mut p = z;
            while p != x0 {
                s = inv[t.via[p as usize] as usize].compose(&s);
                p = t.prev[p as usize];
            }
            s
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampler = product_replacement(gens, &identity, &mut rng);
        let sample = |rng: &mut ChaCha8Rng| {
            let g = sampler(rng);
            to_root(g.image(x0)).compose(&g)
        };
        let fallback = || {
            let mut out = Vec::new();
            let orbit: Vec<u32> = (0..t.root.len() as u32).filter(|&p| t.root[p as usize] == x0).collect();
            for &p in &orbit {
                let back = to_root(p).inverse();
                for g in gens {
                    let s = to_root(g.image(p)).compose(&g.compose(&back));
                    if !s.is_identity() {
                        out.push(s);
                    }
                }
            }
            out
        };
        let bsgs = Bsgs::with_order(self.action.n(), identity.clone(), target, sample, &mut rng, fallback);
        bsgs.strong_generators().into_iter().map(|e| e.g).collect()
    }
}

/// A possibly non-simple arrangement built on a simple representative.
#[derive(Clone, Debug)]
pub struct Arrangement<T> {
    pub spaces: Vec<Subspace>,
    /// index of the underlying simple representative in its level
    pub simple: usize,
    /// multiplicity of each simple element, then the number of loops
    pub degrees: Vec<u32>,
    pub payload: T,
}

impl<T> Arrangement<T> {
    pub fn simple_size(&self) -> usize {
        self.degrees.len() - 1
    }
}

/// The one-element extensions of `a` before isomorph rejection: a parallel
/// copy of each simple element in order, then a loop when allowed.
pub fn nonsimple_candidates<T>(a: &Arrangement<T>, allow_loop: bool) -> Vec<(Vec<Subspace>, Vec<u32>)> {
    let s = a.simple_size();
    let mut out = Vec::with_capacity(s + 1);
    for e in 0..s {
        let mut spaces = a.spaces.clone();
        spaces.push(a.spaces[e].clone());
        let mut d = a.degrees.clone();
        d[e] += 1;
        out.push((spaces, d));
    }
    if allow_loop {
        let mut spaces = a.spaces.clone();
        let r = a.spaces.first().map_or(0, Subspace::ambient);
        spaces.push(Subspace::zero(r));
        let mut d = a.degrees.clone();
        d[s] += 1;
        out.push((spaces, d));
    }
    out
}

/// Least image of a degree vector under the automorphisms of the simple part.
fn canonical_degrees(d: &[u32], auts: &[Vec<usize>]) -> Vec<u32> {
    let s = d.len() - 1;
    let mut best = d.to_vec();
    let mut img = d.to_vec();
    for a in auts {
        for i in 0..s {
            img[a[i]] = d[i];
        }
        if img < best {
            best.clone_from(&img);
        }
    }
    best
}

/// Non-simple one-element extensions of `input` with strong isomorphs among
/// candidates sharing a simple representative removed, then filtered.
/// `auts(simple)` lists the rank automorphisms of that representative.
pub fn nonsimple_extensions<T>(
    input: &[Arrangement<T>],
    allow_loop: bool,
    auts: &mut dyn FnMut(usize) -> Vec<Vec<usize>>,
    filter: &mut dyn FnMut(&[Subspace], &T) -> Option<T>,
    limits: &Limits,
    max_new: Option<usize>,
) -> Result<Vec<Arrangement<T>>, GenerationError> {
    let mut seen: HashSet<(usize, Vec<u32>)> = HashSet::new();
    let mut out = Vec::new();
    let mut aut_cache: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    for a in input {
        let group = aut_cache.entry(a.simple).or_insert_with(|| auts(a.simple));
        for (spaces, degrees) in nonsimple_candidates(a, allow_loop) {
            if max_new.is_some_and(|m| out.len() >= m) {
                return Ok(out);
            }
            if !seen.insert((a.simple, canonical_degrees(&degrees, group))) {
                continue;
            }
            if let Some(payload) = filter(&spaces, &a.payload) {
                out.push(Arrangement { spaces, simple: a.simple, degrees, payload });
                limits.check(out.len())?;
            }
        }
    }
    Ok(out)
}

/// Options for a class enumeration.
#[derive(Clone, Debug, Default)]
pub struct GridOptions {
    pub limits: Limits,
    /// stop as soon as one arrangement of the final size survives
    pub first_only: bool,
    pub seed: u64,
}

/// Output of a class enumeration for one ambient dimension.
pub struct GridResult<T> {
    /// survivors of the final size, by simple size, in generation order
    pub finals: Vec<Arrangement<T>>,
    /// (size, simple size) → number of surviving representatives
    pub counts: BTreeMap<(usize, usize), usize>,
}

/// Rank automorphisms of an arrangement of distinct spaces.
pub fn arrangement_automorphisms(spaces: &[&Subspace], f: &Field, limit: usize) -> Vec<Vec<usize>> {
    let m = spaces.len();
    if m == 0 {
        return vec![Vec::new()];
    }
    let r = spaces[0].ambient();
    let table: Vec<u32> = (0..1u32 << m)
        .map(|mask| {
            let sel: Vec<&Subspace> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| spaces[i]).collect();
            rank_of(&sel, r, f) as u32
        })
        .collect();
    automorphisms(&table, m, limit).unwrap_or_else(|| vec![(0..m).collect()])
}

/// Walks the (size, simple size) grid for ambient dimension `r`: simple
/// extensions along the diagonal up to s_u, non-simple extensions to the
/// right, every step passed through `filter`. `root` is the payload of the
/// empty arrangement.
pub fn enumerate_class<T: Clone>(
    c: &ClassTuple,
    field: Arc<Field>,
    r: usize,
    root: T,
    filter: &mut dyn FnMut(&[Subspace], &T) -> Option<T>,
    opts: &GridOptions,
) -> Result<GridResult<T>, GenerationError> {
    let n = c.n;
    let (s_l, s_u) = (c.s.0, c.s.1.min(n));
    let allow_loop = c.k.contains(&0);
    let dims: Vec<usize> = c.k.iter().copied().filter(|&d| d > 0 && d <= r).collect();
    let mut counts = BTreeMap::new();
    let index = Arc::new(GrassmannianIndex::new(field.clone(), r, &dims)?);
    let mut ls = Leiterspiel::new(index.clone(), root.clone(), opts.seed)?;
    // cells[j] holds the arrangements of the current size with simple size j
    let mut cells: BTreeMap<usize, Vec<Arrangement<T>>> = BTreeMap::new();
    if s_l == 0 {
        cells.insert(0, vec![Arrangement { spaces: Vec::new(), simple: 0, degrees: vec![0], payload: root }]);
    }
    let mut simple_alive = !dims.is_empty();
    for i in 1..=n {
        let last = i == n;
        let cap = (last && opts.first_only).then_some(1);
        let mut next: BTreeMap<usize, Vec<Arrangement<T>>> = BTreeMap::new();
        if i <= s_u && simple_alive {
            let mut wrapped = |hs: &[Handle], parent: &T| -> Option<T> {
                let spaces: Vec<Subspace> = hs.iter().map(|&h| index.get(h).clone()).collect();
                filter(&spaces, parent)
            };
            let made = ls.simple_extensions(&mut wrapped, &opts.limits, cap)?;
            simple_alive = made > 0;
            if i >= s_l {
                let lvl = ls.level(i);
                let arr: Vec<Arrangement<T>> = lvl
                    .reps
                    .iter()
                    .enumerate()
                    .map(|(k, rep)| {
                        let mut degrees = vec![1; i];
                        degrees.push(0);
                        Arrangement { spaces: rep.handles.iter().map(|&h| index.get(h).clone()).collect(), simple: k, degrees, payload: rep.payload.clone() }
                    })
                    .collect();
                counts.insert((i, i), arr.len());
                next.insert(i, arr);
            }
            if last && opts.first_only && made > 0 {
                return Ok(GridResult { finals: next.remove(&i).unwrap_or_default(), counts });
            }
        }
        for (&j, prev) in &cells {
            if j > s_u || j >= i {
                continue;
            }
            let remaining = cap.map(|c| c.saturating_sub(next.values().map(Vec::len).sum::<usize>()));
            let mut auts = |k: usize| -> Vec<Vec<usize>> {
                if j == 0 {
                    return vec![Vec::new()];
                }
                let rep = &ls.level(j).reps[k];
                let sp: Vec<&Subspace> = rep.handles.iter().map(|&h| index.get(h)).collect();
                arrangement_automorphisms(&sp, &field, 100_000)
            };
            let made = nonsimple_extensions(prev, allow_loop, &mut auts, filter, &opts.limits, remaining)?;
            counts.insert((i, j), made.len());
            if !made.is_empty() {
                next.insert(j, made);
            }
            if last && opts.first_only && next.values().any(|v| !v.is_empty()) {
                break;
            }
        }
        cells = next;
        if cells.is_empty() && !(simple_alive && i < s_u) {
            break;
        }
    }
    let finals = if counts.keys().any(|&(i, _)| i == n) { cells.into_values().flatten().collect() } else { Vec::new() };
    Ok(GridResult { finals, counts })
}
