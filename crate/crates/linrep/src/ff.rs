//! Finite fields GF(p^t) with q <= 256 and dense matrices over them.
//!
//! Elements are encoded as integers `0..q`; the base-p digits of an element
//! are the coefficients of its polynomial representative (digit i is the
//! coefficient of x^i). Extension fields use the fixed reduction polynomials
//! listed in [`reduction_polynomial`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported field order {0} (must be a prime power at most 256)")]
    Unsupported(u64),
    #[error("reduction polynomial for GF({0}) is reducible")]
    Reducible(u32),
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Coefficients (constant term first, monic leading term included) of the
/// reduction polynomial used for GF(p^t), t > 1.
pub fn reduction_polynomial(p: u32, t: u32) -> Option<&'static [u8]> {
    let poly: &'static [u8] = match (p, t) {
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 1, 1, 0, 1],
        (2, 7) => &[1, 1, 0, 0, 0, 0, 0, 1],
        (2, 8) => &[1, 0, 1, 1, 1, 0, 0, 0, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (3, 4) => &[2, 0, 0, 2, 1],
        (3, 5) => &[1, 2, 0, 0, 0, 1],
        (5, 2) => &[2, 4, 1],
        (5, 3) => &[3, 3, 0, 1],
        (7, 2) => &[3, 6, 1],
        (11, 2) => &[2, 7, 1],
        (13, 2) => &[2, 12, 1],
        _ => return None,
    };
    Some(poly)
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Splits q into (p, t) with q = p^t, if q is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if !(2..=256).contains(&q) {
        return None;
    }
    let q = q as u32;
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut t = 0;
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
        t += 1;
    }
    (m == 1).then_some((p, t))
}

/// A finite field with precomputed operation tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    t: u32,
    q: usize,
    poly: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    frob: Vec<Vec<u8>>,
    primitive: u8,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.poly == other.poly
    }
}

impl Eq for Field {}

fn poly_mod(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = (1..p).find(|x| x * m[dm] % p == 1).unwrap();
    while r.len() > dm {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
        }
        r.pop();
        while r.len() > dm && r.last() == Some(&0) {
            r.pop();
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u8], p: u32) -> bool {
    let f: Vec<u32> = poly.iter().map(|&c| c as u32).collect();
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push((c % p as u64) as u32);
                c /= p as u64;
            }
            g.push(1);
            if poly_mod(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds GF(p^t).
    pub fn new(p: u32, t: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let q64 = (p as u64).checked_pow(t).unwrap_or(u64::MAX);
        if t == 0 || q64 > 256 {
            return Err(FieldError::Unsupported(q64));
        }
        let q = q64 as usize;
        let poly: Vec<u8> = if t == 1 {
            vec![0, 1]
        } else {
            let poly = reduction_polynomial(p, t).ok_or(FieldError::Unsupported(q64))?;
            if !is_irreducible(poly, p) {
                return Err(FieldError::Reducible(q as u32));
            }
            poly.to_vec()
        };
        let t_us = t as usize;
        let digits = |mut a: usize| -> Vec<u32> {
            let mut d = vec![0u32; t_us];
            for x in d.iter_mut() {
                *x = (a % p as usize) as u32;
                a /= p as usize;
            }
            d
        };
        let encode = |d: &[u32]| -> usize { d.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize) };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let modulus: Vec<u32> = poly.iter().map(|&c| c as u32).collect();
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&s) as u8;
                let mut prod = vec![0u32; 2 * t_us];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut red = if t == 1 { vec![prod[0]] } else { poly_mod(&prod, &modulus, p) };
                red.resize(t_us, 0);
                mul[a * q + b] = encode(&red) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        let pow = |a: usize, e: u64| -> u8 {
            let mut r = 1u8;
            for _ in 0..e {
                r = mul[r as usize * q + a];
            }
            r
        };
        let mut frob = Vec::with_capacity(t_us);
        for k in 0..t {
            let e = (p as u64).pow(k);
            frob.push((0..q).map(|a| if a == 0 { 0 } else { pow(a, e) }).collect());
        }
        let primitive = (1..q)
            .find(|&g| {
                let mut x = 1u8;
                for i in 1..q {
                    x = mul[x as usize * q + g];
                    if x == 1 {
                        return i == q - 1;
                    }
                }
                false
            })
            .unwrap() as u8;
        Ok(Field { p, t, q, poly, add, mul, neg, inv, frob, primitive })
    }

    /// Builds the field of order q.
    pub fn gf(q: u64) -> Result<Field, FieldError> {
        let (p, t) = prime_power(q).ok_or(FieldError::Unsupported(q))?;
        Field::new(p, t)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn t(&self) -> u32 {
        self.t
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn reduction_poly(&self) -> &[u8] {
        &self.poly
    }
    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> u8 {
        self.primitive
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }
    pub fn inv(&self, a: u8) -> Result<u8, FieldError> {
        if a == 0 {
            Err(FieldError::InverseOfZero)
        } else {
            Ok(self.inv[a as usize])
        }
    }
    #[inline]
    pub(crate) fn inv_nz(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }
    /// a^(p^k); k is taken modulo t.
    #[inline]
    pub fn frobenius(&self, a: u8, k: u32) -> u8 {
        self.frob[(k % self.t) as usize][a as usize]
    }
    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.q).map(|a| a as u8)
    }
}

/// Dense row-major matrix over a finite field. Operations take the field
/// explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Result of row reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }
    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Matrix, FieldError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FieldError::Shape("rows of unequal length".into()));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }
    pub fn from_data(rows: usize, cols: usize, data: Vec<u8>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }
    pub fn is_valid(&self, f: &Field) -> bool {
        self.data.iter().all(|&x| (x as usize) < f.q())
    }
    /// Applies the Frobenius power k entrywise.
    pub fn frobenius(&self, f: &Field, k: u32) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f.frobenius(x, k)).collect() }
    }

    pub fn mul(&self, other: &Matrix, f: &Field) -> Result<Matrix, FieldError> {
        if self.cols != other.rows {
            return Err(FieldError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(l, j)));
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form with leftmost pivots scaled to 1.
    pub fn rref(&self, f: &Field) -> Rref {
        let mut m = self.clone();
        let (rank, pivots) = rref_in_place(&mut m.data, m.rows, m.cols, f);
        Rref { matrix: m, rank, pivots }
    }

    pub fn rank(&self, f: &Field) -> usize {
        let mut data = self.data.clone();
        rank_in_place(&mut data, self.rows, self.cols, f)
    }

    pub fn inverse(&self, f: &Field) -> Result<Matrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let r = aug.rref(f);
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return Err(FieldError::Singular);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.matrix.get(i, n + j));
            }
        }
        Ok(inv)
    }
}

/// Row-reduces `data` (rows x cols, row-major) in place; returns rank and
/// pivot columns. Zero rows end up at the bottom.
pub fn rref_in_place(data: &mut [u8], rows: usize, cols: usize, f: &Field) -> (usize, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv_nz(data[r * cols + c]);
        if inv != 1 {
            for j in c..cols {
                data[r * cols + j] = f.mul(data[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg(factor);
            for j in c..cols {
                let v = f.mul(nf, data[r * cols + j]);
                data[i * cols + j] = f.add(data[i * cols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

/// Rank by forward elimination only; destroys `data`.
pub fn rank_in_place(data: &mut [u8], rows: usize, cols: usize, f: &Field) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv_nz(data[r * cols + c]);
        for i in r + 1..rows {
            let factor = data[i * cols + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg(f.mul(factor, inv));
            for j in c..cols {
                let v = f.mul(nf, data[r * cols + j]);
                data[i * cols + j] = f.add(data[i * cols + j], v);
            }
        }
        r += 1;
    }
    r
}
