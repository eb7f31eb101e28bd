//! Subspaces of F_q^r in canonical (RREF) form and Grassmannian enumeration.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ff::{rank_in_place, rref_in_place, Field, Matrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("vector of length {got} in ambient dimension {expected}")]
    Length { expected: usize, got: usize },
    #[error("mixed ambient dimensions {0} and {1}")]
    Ambient(usize, usize),
    #[error("dimension {k} exceeds ambient dimension {r}")]
    DimTooLarge { k: usize, r: usize },
    #[error("Grassmannian too large: {0} elements")]
    TooLarge(u128),
}

/// A subspace given by its canonical basis: the nonzero rows of the RREF.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    r: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(r: usize) -> Subspace {
        Subspace { r, basis: Matrix::zeros(0, r) }
    }

    /// Canonical form of the span of `vectors` (each of length r).
    pub fn canonicalize(vectors: &[Vec<u8>], r: usize, f: &Field) -> Result<Subspace, SubspaceError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != r) {
            return Err(SubspaceError::Length { expected: r, got: v.len() });
        }
        let mut data: Vec<u8> = vectors.concat();
        Ok(Subspace::from_raw(&mut data, vectors.len(), r, f))
    }

    /// Canonicalizes a row-major buffer of `rows` vectors in place.
    pub(crate) fn from_raw(data: &mut [u8], rows: usize, r: usize, f: &Field) -> Subspace {
        let (k, _) = rref_in_place(data, rows, r, f);
        Subspace { r, basis: Matrix::from_data(k, r, data[..k * r].to_vec()) }
    }

    pub fn ambient(&self) -> usize {
        self.r
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains(&self, v: &[u8], f: &Field) -> bool {
        let mut data = self.basis.data().to_vec();
        data.extend_from_slice(v);
        rank_in_place(&mut data, self.dim() + 1, self.r, f) == self.dim()
    }
}

/// Canonical span of the union of the bases.
pub fn subspace_sum(spaces: &[&Subspace], f: &Field) -> Result<Subspace, SubspaceError> {
    let Some(first) = spaces.first() else {
        return Err(SubspaceError::Ambient(0, 0));
    };
    let r = first.ambient();
    if let Some(s) = spaces.iter().find(|s| s.ambient() != r) {
        return Err(SubspaceError::Ambient(r, s.ambient()));
    }
    let rows: usize = spaces.iter().map(|s| s.dim()).sum();
    let mut data: Vec<u8> = spaces.iter().flat_map(|s| s.basis.data().iter().copied()).collect();
    Ok(Subspace::from_raw(&mut data, rows, r, f))
}

pub fn sum_dim(spaces: &[&Subspace], f: &Field) -> Result<usize, SubspaceError> {
    subspace_sum(spaces, f).map(|s| s.dim())
}

/// The q-ary Gaussian binomial coefficient; 0 when k > r.
pub fn gaussian_binomial(r: u32, k: u32, q: u64) -> u128 {
    if k > r {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow(r - i) - 1;
        den *= q.pow(i + 1) - 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Interned handle of a subspace inside a [`GrassmannianIndex`].
pub type Handle = u32;

/// All subspaces of F_q^r whose dimension lies in K, with integer handles.
#[derive(Debug)]
pub struct GrassmannianIndex {
    field: Arc<Field>,
    r: usize,
    dims: Vec<usize>,
    spaces: Vec<Subspace>,
    lookup: HashMap<Vec<u8>, Handle>,
}

/// Upper bound on the number of interned subspaces.
pub const MAX_GRASSMANNIAN: u128 = 2_000_000;

impl GrassmannianIndex {
    /// Enumerates Gr_q(r, K) by pivot pattern; order is dimension ascending,
    /// then lexicographic on the canonical basis entries.
    pub fn new(field: Arc<Field>, r: usize, dims: &[usize]) -> Result<GrassmannianIndex, SubspaceError> {
        let mut dims: Vec<usize> = dims.to_vec();
        dims.sort_unstable();
        dims.dedup();
        if let Some(&k) = dims.iter().find(|&&k| k > r) {
            return Err(SubspaceError::DimTooLarge { k, r });
        }
        let q = field.q() as u64;
        let total: u128 = dims.iter().map(|&k| gaussian_binomial(r as u32, k as u32, q)).sum();
        if total > MAX_GRASSMANNIAN {
            return Err(SubspaceError::TooLarge(total));
        }
        let mut spaces = Vec::with_capacity(total as usize);
        for &k in &dims {
            let mut layer = enumerate_dim(&field, r, k);
            layer.sort_by(|a, b| a.basis.data().cmp(b.basis.data()));
            spaces.extend(layer);
        }
        let lookup = spaces.iter().enumerate().map(|(i, s)| (s.basis.data().to_vec(), i as Handle)).collect();
        Ok(GrassmannianIndex { field, r, dims, spaces, lookup })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.r
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn len(&self) -> usize {
        self.spaces.len()
    }
    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }
    pub fn get(&self, h: Handle) -> &Subspace {
        &self.spaces[h as usize]
    }
    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }
    pub fn handle_of(&self, s: &Subspace) -> Option<Handle> {
        if s.ambient() != self.r {
            return None;
        }
        self.lookup.get(s.basis.data()).copied()
    }
    /// Handle of an already canonical basis given as raw row-major data.
    pub(crate) fn handle_of_data(&self, data: &[u8]) -> Option<Handle> {
        self.lookup.get(data).copied()
    }
}

fn enumerate_dim(f: &Field, r: usize, k: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    choose_pivots(f, r, k, 0, &mut pivots, &mut out);
    out
}

fn choose_pivots(f: &Field, r: usize, k: usize, start: usize, pivots: &mut Vec<usize>, out: &mut Vec<Subspace>) {
    if pivots.len() == k {
        // free positions: row i, column j > pivot_i, j not a pivot column
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| ((pivots[i] + 1)..r).filter(|j| !pivots.contains(j)).map(move |j| (i, j)))
            .collect();
        let q = f.q();
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut m = Matrix::zeros(k, r);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            for (&(i, j), &d) in free.iter().zip(&digits) {
                m.set(i, j, d as u8);
            }
            out.push(Subspace { r, basis: m });
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return;
                }
                digits[pos] += 1;
                if digits[pos] < q {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
    for c in start..r {
        if r - c < k - pivots.len() {
            break;
        }
        pivots.push(c);
        choose_pivots(f, r, k, c + 1, pivots, out);
        pivots.pop();
    }
}
