//! Permutation groups on a finite point set: base and strong generating sets
//! built either deterministically or randomly against a known order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Operations needed from a group element acting on points `0..n`.
pub trait Element: Clone {
    fn image(&self, point: u32) -> u32;
    /// `self ∘ other`: apply `other` first.
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn is_identity(&self) -> bool;
}

/// A permutation of `0..n` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Element for Perm {
    #[inline]
    fn image(&self, point: u32) -> u32 {
        self.0[point as usize]
    }
    fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }
    fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }
    fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

struct Level<E> {
    base: u32,
    gens: Vec<E>,
    orbit: Vec<u32>,
    /// position in `orbit` for each point, or u32::MAX
    pos: Vec<u32>,
    /// transversal element mapping `base` to `orbit[i]`
    trans: Vec<E>,
}

impl<E: Element> Level<E> {
    fn new(base: u32, n: usize, identity: E) -> Level<E> {
        let mut pos = vec![u32::MAX; n];
        pos[base as usize] = 0;
        Level { base, gens: Vec::new(), orbit: vec![base], pos, trans: vec![identity] }
    }

    /// Extends the orbit with the current generator list.
    fn close(&mut self) {
        let mut i = 0;
        while i < self.orbit.len() {
            for gi in 0..self.gens.len() {
                let y = self.gens[gi].image(self.orbit[i]);
                if self.pos[y as usize] == u32::MAX {
                    self.pos[y as usize] = self.orbit.len() as u32;
                    let t = self.gens[gi].compose(&self.trans[i]);
                    self.orbit.push(y);
                    self.trans.push(t);
                }
            }
            i += 1;
        }
    }

    /// Recomputes the orbit from scratch after new generators were added
    /// (new generators may reach old points from new ones and vice versa).
    fn reclose(&mut self) {
        // previously found points keep their transversal; BFS from all of them
        self.close();
    }
}

/// Base and strong generating set.
pub struct Bsgs<E> {
    n: usize,
    identity: E,
    levels: Vec<Level<E>>,
}

impl<E: Element> Bsgs<E> {
    pub fn trivial(n: usize, identity: E) -> Bsgs<E> {
        Bsgs { n, identity, levels: Vec::new() }
    }

    /// Deterministic Schreier–Sims.
    pub fn deterministic(n: usize, identity: E, gens: &[E]) -> Bsgs<E> {
        let mut b = Bsgs::trivial(n, identity);
        for g in gens {
            if !g.is_identity() {
                b.add_strong(g.clone());
            }
        }
        b.complete();
        b
    }

    /// Randomized Schreier–Sims driven by `sample`, which must return
    /// elements of a group H of order `order`; stops once the structure
    /// certifies |H|. Falls back to `fallback_gens` (a generating set of H)
    /// with the deterministic algorithm if progress stalls.
    pub fn with_order<F>(n: usize, identity: E, order: u128, mut sample: F, rng: &mut ChaCha8Rng, fallback_gens: impl FnOnce() -> Vec<E>) -> Bsgs<E>
    where
        F: FnMut(&mut ChaCha8Rng) -> E,
    {
        let mut b = Bsgs::trivial(n, identity);
        let mut stalls = 0usize;
        let mut pool: Vec<E> = Vec::new();
        while b.order() < order {
            let mut g = sample(rng);
            if !pool.is_empty() {
                for _ in 0..6 {
                    let h = &pool[rng.gen_range(0..pool.len())];
                    g = g.compose(h);
                }
            }
            match b.sift(&g) {
                Some((res, _)) => {
                    pool.push(res.clone());
                    b.add_strong(res);
                    stalls = 0;
                }
                None => {
                    stalls += 1;
                    if stalls > 400 {
                        return Bsgs::deterministic(n, b.identity.clone(), &fallback_gens());
                    }
                }
            }
        }
        b
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// All strong generators, deduplicated, level order.
    pub fn strong_generators(&self) -> Vec<E>
    where
        E: PartialEq,
    {
        let mut out: Vec<E> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// Sifts g; returns the non-identity residue and the level where it
    /// stopped, or None if g is a member.
    pub fn sift(&self, g: &E) -> Option<(E, usize)> {
        let mut h = g.clone();
        for (i, l) in self.levels.iter().enumerate() {
            let x = h.image(l.base);
            let p = l.pos[x as usize];
            if p == u32::MAX {
                return Some((h, i));
            }
            if p != 0 {
                h = l.trans[p as usize].inverse().compose(&h);
            }
        }
        if h.is_identity() {
            None
        } else {
            Some((h, self.levels.len()))
        }
    }

    pub fn contains(&self, g: &E) -> bool {
        self.sift(g).is_none()
    }

    /// Adds g (which fixes the base points of all levels before the level
    /// where it sifts out) to the generator lists and updates orbits.
    fn add_strong(&mut self, g: E) {
        let depth = self.levels.iter().take_while(|l| g.image(l.base) == l.base).count();
        if depth == self.levels.len() {
            let moved = (0..self.n as u32).find(|&x| g.image(x) != x).expect("identity added");
            self.levels.push(Level::new(moved, self.n, self.identity.clone()));
        }
        for l in self.levels.iter_mut().take(depth + 1) {
            l.gens.push(g.clone());
            l.reclose();
        }
    }

    /// Sims' completion: checks every Schreier generator bottom-up.
    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            let mut restart = None;
            'scan: for oi in 0..self.levels[lvl].orbit.len() {
                for gi in 0..self.levels[lvl].gens.len() {
                    let l = &self.levels[lvl];
                    let g = &l.gens[gi];
                    let y = g.image(l.orbit[oi]);
                    let ty = &l.trans[l.pos[y as usize] as usize];
                    let s = ty.inverse().compose(&g.compose(&l.trans[oi]));
                    if s.is_identity() {
                        continue;
                    }
                    // sift through the levels below lvl
                    let mut h = s;
                    let mut stop = self.levels.len();
                    for (j, lj) in self.levels.iter().enumerate().skip(lvl + 1) {
                        let x = h.image(lj.base);
                        let p = lj.pos[x as usize];
                        if p == u32::MAX {
                            stop = j;
                            break;
                        }
                        if p != 0 {
                            h = lj.trans[p as usize].inverse().compose(&h);
                        }
                    }
                    if stop < self.levels.len() || !h.is_identity() {
                        self.add_strong(h);
                        restart = Some(stop.min(self.levels.len() - 1) + 1);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(r) => i = r.min(self.levels.len()),
                None => i -= 1,
            }
        }
    }

    /// Uniform random element from the transversals.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> E {
        let mut g = self.identity.clone();
        for l in &self.levels {
            let t = &l.trans[rng.gen_range(0..l.trans.len())];
            g = g.compose(t);
        }
        g
    }

    /// Enumerates all elements when the order is at most `limit`.
    pub fn elements(&self, limit: u128) -> Option<Vec<E>> {
        if self.order() > limit {
            return None;
        }
        let mut out = vec![self.identity.clone()];
        for l in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * l.trans.len());
            for t in &l.trans {
                for g in &out {
                    next.push(t.compose(g));
                }
            }
            out = next;
        }
        Some(out)
    }
}

/// Orbits of ⟨gens⟩ on `0..n`, each as a sorted list, ordered by least point.
pub fn orbits<E: Element>(n: usize, gens: &[E]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orb = vec![start as u32];
        let mut i = 0;
        while i < orb.len() {
            for g in gens {
                let y = g.image(orb[i]);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orb.push(y);
                }
            }
            i += 1;
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}
