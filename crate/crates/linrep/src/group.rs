//! The projective semilinear group PΓL(r,q) acting on subspaces of F_q^r.

use std::collections::HashSet;
use std::sync::Arc;

use crate::ff::{Field, Matrix};
use crate::perm::{Bsgs, Element, Perm};
use crate::subspace::{GrassmannianIndex, Handle, Subspace};

/// An element (A, α) of PΓL(r,q): A is stored with its first nonzero entry
/// equal to 1 and α is the Frobenius power x ↦ x^(p^α).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    matrix: Matrix,
    frob: u32,
}

fn normalize(m: &mut Matrix, f: &Field) {
    let lead = m.data().iter().copied().find(|&x| x != 0).expect("zero matrix");
    if lead != 1 {
        let inv = f.inv_nz(lead);
        let (rows, cols) = (m.rows(), m.cols());
        let data: Vec<u8> = m.data().iter().map(|&x| f.mul(x, inv)).collect();
        *m = Matrix::from_data(rows, cols, data);
    }
}

impl GroupElement {
    pub fn identity(r: usize) -> GroupElement {
        GroupElement { matrix: Matrix::identity(r), frob: 0 }
    }

    /// Builds (A, α); A must be invertible.
    pub fn new(mut matrix: Matrix, frob: u32, f: &Field) -> GroupElement {
        debug_assert_eq!(matrix.rank(f), matrix.rows());
        normalize(&mut matrix, f);
        GroupElement { matrix, frob: frob % f.t() }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
    pub fn frobenius_power(&self) -> u32 {
        self.frob
    }
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
    pub fn is_identity(&self) -> bool {
        self.frob == 0 && self.matrix == Matrix::identity(self.matrix.rows())
    }

    /// (A2, α2)(A1, α1) = (A2·α2(A1), α2α1); `self` is (A2, α2).
    pub fn compose(&self, other: &GroupElement, f: &Field) -> GroupElement {
        let twisted = other.matrix.frobenius(f, self.frob);
        let mut m = self.matrix.mul(&twisted, f).expect("conformable");
        normalize(&mut m, f);
        GroupElement { matrix: m, frob: (self.frob + other.frob) % f.t() }
    }

    /// (A, α)⁻¹ = ((α⁻¹(A))⁻¹, α⁻¹).
    pub fn inverse(&self, f: &Field) -> GroupElement {
        let back = (f.t() - self.frob) % f.t();
        let mut m = self.matrix.frobenius(f, back).inverse(f).expect("invertible");
        normalize(&mut m, f);
        GroupElement { matrix: m, frob: back }
    }

    /// Writes the images α(v)Aᵗ of `rows` vectors of length r into `out`.
    pub(crate) fn apply_rows(&self, rows: &[u8], r: usize, f: &Field, out: &mut Vec<u8>) {
        out.clear();
        let a = self.matrix.data();
        for v in rows.chunks_exact(r) {
            for j in 0..r {
                let mut acc = 0u8;
                for (l, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc = f.add(acc, f.mul(f.frobenius(x, self.frob), a[j * r + l]));
                    }
                }
                out.push(acc);
            }
        }
    }

    /// ⟨v_1,…,v_k⟩ ↦ ⟨α(v_1)Aᵗ,…,α(v_k)Aᵗ⟩.
    pub fn act(&self, v: &Subspace, f: &Field) -> Subspace {
        let r = v.ambient();
        let mut out = Vec::new();
        self.apply_rows(v.basis().data(), r, f, &mut out);
        Subspace::from_raw(&mut out, v.dim(), r, f)
    }
}

/// |GL(r,q)|/(q−1)·t, or None on overflow.
pub fn group_order(r: u32, q: u64) -> Option<u128> {
    let (_, t) = crate::ff::prime_power(q)?;
    let q = q as u128;
    let qr = q.checked_pow(r)?;
    let mut gl: u128 = 1;
    for i in 0..r {
        gl = gl.checked_mul(qr - q.pow(i))?;
    }
    Some(gl / (q - 1) * t as u128)
}

/// Generators of PΓL(r,q): diag(ω,1,…,1) when q > 2, the coordinate cycle,
/// the transvection I + E₁₂ and the Frobenius map when t > 1.
pub fn group_generators(r: usize, f: &Field) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    if r == 0 {
        return gens;
    }
    if f.q() > 2 && r > 1 {
        let mut d = Matrix::identity(r);
        d.set(0, 0, f.primitive());
        gens.push(GroupElement::new(d, 0, f));
    }
    if r > 1 {
        let mut c = Matrix::zeros(r, r);
        for i in 0..r {
            c.set((i + 1) % r, i, 1);
        }
        gens.push(GroupElement::new(c, 0, f));
        let mut t = Matrix::identity(r);
        t.set(0, 1, 1);
        gens.push(GroupElement::new(t, 0, f));
    }
    if f.t() > 1 {
        gens.push(GroupElement::new(Matrix::identity(r), 1, f));
    }
    gens
}

/// The group acting on the interned subspaces of a Grassmannian index.
#[derive(Debug)]
pub struct PointAction {
    index: Arc<GrassmannianIndex>,
}

impl PointAction {
    pub fn new(index: Arc<GrassmannianIndex>) -> PointAction {
        PointAction { index }
    }
    pub fn index(&self) -> &Arc<GrassmannianIndex> {
        &self.index
    }
    pub fn field(&self) -> &Field {
        self.index.field()
    }
    pub fn n(&self) -> usize {
        self.index.len()
    }

    /// Image of an interned subspace.
    pub fn act_handle(&self, g: &GroupElement, h: Handle, buf: &mut Vec<u8>) -> Handle {
        let s = self.index.get(h);
        let f = self.field();
        let r = self.index.ambient();
        g.apply_rows(s.basis().data(), r, f, buf);
        let k = s.dim();
        crate::ff::rref_in_place(buf, k, r, f);
        self.index.handle_of_data(&buf[..k * r]).expect("action preserves the index")
    }

    pub fn perm_of(&self, g: &GroupElement) -> Perm {
        let mut buf = Vec::new();
        Perm((0..self.n() as Handle).map(|h| self.act_handle(g, h, &mut buf)).collect())
    }

    pub fn elt(&self, g: GroupElement) -> Elt {
        let p = Arc::new(self.perm_of(&g));
        Elt { g, p, f: self.index.field().clone() }
    }

    pub fn identity(&self) -> Elt {
        Elt { g: GroupElement::identity(self.index.ambient()), p: Arc::new(Perm::identity(self.n())), f: self.index.field().clone() }
    }

    /// Whether PΓL(r,q) acts faithfully on the indexed subspaces.
    pub fn is_faithful(&self) -> bool {
        let r = self.index.ambient();
        self.index.dims().iter().any(|&k| k > 0 && k < r)
    }
}

/// A group element together with its permutation of the interned points.
#[derive(Clone, Debug)]
pub struct Elt {
    pub g: GroupElement,
    pub p: Arc<Perm>,
    f: Arc<Field>,
}

impl PartialEq for Elt {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl Element for Elt {
    #[inline]
    fn image(&self, point: u32) -> u32 {
        self.p.0[point as usize]
    }
    fn compose(&self, other: &Elt) -> Elt {
        Elt { g: self.g.compose(&other.g, &self.f), p: Arc::new(self.p.compose(&other.p)), f: self.f.clone() }
    }
    fn inverse(&self) -> Elt {
        Elt { g: self.g.inverse(&self.f), p: Arc::new(self.p.inverse()), f: self.f.clone() }
    }
    fn is_identity(&self) -> bool {
        self.p.is_identity()
    }
}

/// Orbit of a base subspace with transporters and point-stabilizer
/// generators.
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub base: Subspace,
    pub orbit: Vec<Subspace>,
    pub transporter: Vec<GroupElement>,
    pub stabilizer_gens: Vec<GroupElement>,
}

/// Breadth-first orbit with Schreier generators of the stabilizer
/// (duplicates and the identity removed).
pub fn orbit_with_transporter(gens: &[GroupElement], base: &Subspace, f: &Field) -> OrbitData {
    let r = base.ambient();
    let mut orbit = vec![base.clone()];
    let mut transporter = vec![GroupElement::identity(r)];
    let mut position = std::collections::HashMap::new();
    position.insert(base.clone(), 0usize);
    let mut i = 0;
    while i < orbit.len() {
        for g in gens {
            let y = g.act(&orbit[i], f);
            if !position.contains_key(&y) {
                position.insert(y.clone(), orbit.len());
                transporter.push(g.compose(&transporter[i], f));
                orbit.push(y);
            }
        }
        i += 1;
    }
    let mut seen = HashSet::new();
    let mut stabilizer_gens = Vec::new();
    for (i, x) in orbit.iter().enumerate() {
        for g in gens {
            let y = g.act(x, f);
            let ty = &transporter[position[&y]];
            let s = ty.inverse(f).compose(&g.compose(&transporter[i], f), f);
            if !s.is_identity() && seen.insert(s.clone()) {
                stabilizer_gens.push(s);
            }
        }
    }
    OrbitData { base: base.clone(), orbit, transporter, stabilizer_gens }
}

/// Order of ⟨gens⟩ via Schreier–Sims on its faithful action on the points
/// of `action`.
pub fn subgroup_order(gens: &[GroupElement], action: &PointAction) -> u128 {
    let perms: Vec<Perm> = gens.iter().map(|g| action.perm_of(g)).collect();
    Bsgs::deterministic(action.n(), Perm::identity(action.n()), &perms).order()
}
