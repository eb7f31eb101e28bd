//! Polyhedral cones in exact integer arithmetic and the rate-region pipeline.
//!
//! A cone is stored both ways: generators (rays plus a lineality basis) and
//! inequalities `a·x >= 0`. Conversion uses the double description method;
//! inequalities of a generated cone are the extreme rays of its polar.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::polymatroid::RankVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("dimension {0} exceeds the limit of {1}")]
    Dimension(usize, usize),
    #[error("vector of length {0} in a cone of dimension {1}")]
    Length(usize, usize),
    #[error("polyhedral format, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub const MAX_DIM: usize = 16;

pub type Row = Vec<i64>;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(cp: i128, p: &[i128], cn: i128, n: &[i128]) -> Vec<i128> {
    let mut v: Vec<i128> = p.iter().zip(n).map(|(x, y)| cp * x + cn * y).collect();
    normalize(&mut v);
    v
}

/// Extreme rays and a lineality basis of {x : A x >= 0}.
pub fn extreme_rays(a: &[Vec<i128>], d: usize) -> (Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let words = a.len().div_ceil(64).max(1);
    let mut lineality: Vec<Vec<i128>> = (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            e
        })
        .collect();
    // (ray, zero set over processed constraints)
    let mut rays: Vec<(Vec<i128>, Vec<u64>)> = Vec::new();
    let set_bit = |z: &mut Vec<u64>, i: usize| z[i / 64] |= 1 << (i % 64);
    for (ci, row) in a.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| dot(row, l) != 0) {
            let mut lp = lineality.remove(p);
            if dot(row, &lp) < 0 {
                lp.iter_mut().for_each(|x| *x = -*x);
            }
            let ap = dot(row, &lp);
            for l in lineality.iter_mut() {
                let al = dot(row, l);
                if al != 0 {
                    *l = combine(ap, l, -al, &lp);
                }
            }
            for (r, z) in rays.iter_mut() {
                let ar = dot(row, r);
                if ar != 0 {
                    *r = combine(ap, r, -ar, &lp);
                }
                set_bit(z, ci);
            }
            let mut z = vec![0u64; words];
            for j in 0..ci {
                set_bit(&mut z, j);
            }
            rays.push((lp, z));
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|(r, _)| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (i, (_, z)) in rays.iter_mut().enumerate() {
                if vals[i] == 0 {
                    set_bit(z, ci);
                }
            }
            continue;
        }
        let mut next: Vec<(Vec<i128>, Vec<u64>)> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<u64> = rays[p].1.iter().zip(&rays[n].1).map(|(x, y)| x & y).collect();
                let adjacent = (0..rays.len()).all(|o| o == p || o == n || rays[o].1.iter().zip(&common).any(|(zo, c)| c & !zo != 0));
                if adjacent {
                    let mut z = common;
                    set_bit(&mut z, ci);
                    next.push((combine(vals[p], &rays[n].0, -vals[n], &rays[p].0), z));
                }
            }
        }
        let mut kept: Vec<(Vec<i128>, Vec<u64>)> = Vec::new();
        for (i, (r, z)) in rays.into_iter().enumerate() {
            if vals[i] > 0 {
                kept.push((r, z));
            } else if vals[i] == 0 {
                let mut z = z;
                set_bit(&mut z, ci);
                kept.push((r, z));
            }
        }
        kept.extend(next);
        rays = kept;
    }
    (rays.into_iter().map(|(r, _)| r).collect(), lineality)
}

/// A polyhedral cone with both descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub dim: usize,
    /// generators; lineality directions appear with both signs
    pub rays: Vec<Row>,
    /// rows a with a·x >= 0; equalities appear with both signs
    pub hrep: Vec<Row>,
}

fn to_wide(v: &[Row]) -> Vec<Vec<i128>> {
    v.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

fn to_rows(v: Vec<Vec<i128>>) -> Vec<Row> {
    v.into_iter().map(|r| r.into_iter().map(|x| i64::try_from(x).expect("coefficient fits in i64")).collect()).collect()
}

fn with_negatives(rays: Vec<Vec<i128>>, lin: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let mut out: BTreeSet<Vec<i128>> = rays.into_iter().collect();
    for l in lin {
        out.insert(l.iter().map(|x| -x).collect());
        out.insert(l);
    }
    out.into_iter().collect()
}

fn check_dims(rows: &[Row], d: usize) -> Result<(), RegionError> {
    if d > MAX_DIM {
        return Err(RegionError::Dimension(d, MAX_DIM));
    }
    match rows.iter().find(|r| r.len() != d) {
        Some(r) => Err(RegionError::Length(r.len(), d)),
        None => Ok(()),
    }
}

impl Cone {
    /// The cone generated by `rays`, with an irredundant inequality list.
    pub fn from_rays(d: usize, rays: &[Row]) -> Result<Cone, RegionError> {
        check_dims(rays, d)?;
        let (facets, eqs) = extreme_rays(&to_wide(rays), d);
        let hrep = to_rows(with_negatives(facets, eqs));
        let (r, l) = extreme_rays(&to_wide(&hrep), d);
        Ok(Cone { dim: d, rays: to_rows(with_negatives(r, l)), hrep })
    }

    /// The cone {x : a·x >= 0 for all rows}, with irredundant rows.
    pub fn from_inequalities(d: usize, rows: &[Row]) -> Result<Cone, RegionError> {
        check_dims(rows, d)?;
        let (r, l) = extreme_rays(&to_wide(rows), d);
        Cone::from_rays(d, &to_rows(with_negatives(r, l)))
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.hrep.iter().all(|a| a.iter().zip(x).map(|(p, q)| *p as i128 * *q as i128).sum::<i128>() >= 0)
    }

    /// Number of facet inequalities (equalities count twice).
    pub fn facets(&self) -> usize {
        self.hrep.len()
    }
}

/// Mutual inclusion with matching facet counts.
pub fn cone_equal(a: &Cone, b: &Cone) -> bool {
    a.dim == b.dim && a.rays.iter().all(|r| b.contains(r)) && b.rays.iter().all(|r| a.contains(r)) && a.facets() == b.facets()
}

/// Inequality list of the conic hull of integer rays.
pub fn conic_hull_hrep(d: usize, rays: &[Row]) -> Result<Cone, RegionError> {
    Cone::from_rays(d, rays)
}

/// Singleton projections of rank vectors plus the free directions: source
/// rates may decrease and edge rates may increase.
pub fn project_and_augment(hvectors: &[RankVector], k: usize, n: usize) -> Vec<Row> {
    let mut out: BTreeSet<Row> = hvectors.iter().map(|h| h.singletons().iter().map(|&x| x as i64).collect()).collect();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = if i < k { -1 } else { 1 };
        out.insert(e);
    }
    out.into_iter().collect()
}

/// Same as `project_and_augment` for rate vectors already projected.
pub fn augment_rates(rates: &[Vec<u32>], k: usize, n: usize) -> Vec<Row> {
    let mut out: BTreeSet<Row> = rates.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = if i < k { -1 } else { 1 };
        out.insert(e);
    }
    out.into_iter().collect()
}

/// Achievable region from rate vectors: the conic hull of the augmented
/// rays restricted to non-negative source rates.
pub fn rate_region(rates: &[Vec<u32>], k: usize, n: usize) -> Result<Cone, RegionError> {
    let hull = conic_hull_hrep(n, &augment_rates(rates, k, n))?;
    let mut rows = hull.hrep.clone();
    for i in 0..k {
        let mut e = vec![0; n];
        e[i] = 1;
        rows.push(e);
    }
    Cone::from_inequalities(n, &rows)
}

/// Text block in the usual polyhedral exchange layout.
pub struct Polyhedral<'a>(pub &'a Cone, pub bool);

impl fmt::Display for Polyhedral<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cone, h) = (self.0, self.1);
        let rows = if h { &cone.hrep } else { &cone.rays };
        writeln!(f, "{}", if h { "H-representation" } else { "V-representation" })?;
        writeln!(f, "begin")?;
        writeln!(f, "{} {} rational", rows.len(), cone.dim + 1)?;
        for r in rows {
            let mut line = format!("{:>2}", 0);
            for x in r {
                line.push_str(&format!(" {x:>2}"));
            }
            writeln!(f, "{line}")?;
        }
        write!(f, "end")
    }
}

/// Parses an H- or V-representation block of a cone; rows must have a
/// leading zero.
pub fn parse_polyhedral(text: &str) -> Result<Cone, RegionError> {
    let err = |line: usize, msg: &str| RegionError::Parse { line, msg: msg.into() };
    let mut kind = None;
    let mut rows: Vec<Row> = Vec::new();
    let mut cols = None;
    let mut state = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = ln + 1;
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        match state {
            0 => match line {
                "H-representation" => kind = Some(true),
                "V-representation" => kind = Some(false),
                "begin" if kind.is_some() => state = 1,
                _ => return Err(err(ln, "expected a representation header and begin")),
            },
            1 => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 || parts[2] != "rational" {
                    return Err(err(ln, "expected `<rows> <cols> rational`"));
                }
                cols = Some(parts[1].parse::<usize>().map_err(|_| err(ln, "bad column count"))?);
                state = 2;
            }
            2 if line == "end" => state = 3,
            2 => {
                let vals: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
                let vals = vals.map_err(|_| err(ln, "non-integer entry"))?;
                if Some(vals.len()) != cols {
                    return Err(err(ln, "wrong number of entries"));
                }
                if vals[0] != 0 {
                    return Err(err(ln, "only cones are supported"));
                }
                rows.push(vals[1..].to_vec());
            }
            _ => return Err(err(ln, "trailing content after end")),
        }
    }
    if state != 3 {
        return Err(err(text.lines().count(), "missing end"));
    }
    let d = cols.expect("header read") - 1;
    if kind == Some(true) {
        Cone::from_inequalities(d, &rows)
    } else {
        Cone::from_rays(d, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Row>) -> Vec<Row> {
        v.sort();
        v
    }

    fn e(d: usize, i: usize, s: i64) -> Row {
        let mut v = vec![0; d];
        v[i] = s;
        v
    }

    #[test]
    fn simplex_and_degenerate_cones() {
        let rays: Vec<Row> = (0..4).map(|i| e(4, i, 1)).collect();
        let c = conic_hull_hrep(4, &rays).unwrap();
        assert_eq!(sorted(c.hrep.clone()), sorted(rays.clone()));
        let single = conic_hull_hrep(2, &[e(2, 0, 1)]).unwrap();
        assert_eq!(sorted(single.hrep), sorted(vec![e(2, 0, 1), e(2, 1, 1), e(2, 1, -1)]));
        assert_eq!(project_and_augment(&[], 1, 2), sorted(vec![e(2, 0, -1), e(2, 1, 1)]));
    }

    #[test]
    fn equality_and_inclusion() {
        let simplex = Cone::from_rays(3, &(0..3).map(|i| e(3, i, 1)).collect::<Vec<_>>()).unwrap();
        assert!(cone_equal(&simplex, &simplex));
        let cut = Cone::from_inequalities(3, &[e(3, 0, 1), e(3, 1, 1), e(3, 2, 1), vec![1, -1, 0]]).unwrap();
        assert!(!cone_equal(&simplex, &cut));
        let again = Cone::from_inequalities(3, &simplex.hrep).unwrap();
        assert!(cone_equal(&simplex, &again));
    }

    fn det(m: &[Vec<i128>]) -> i128 {
        // Bareiss elimination
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut a = m.to_vec();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    fn brute_facets(d: usize, rays: &[Row]) -> Vec<Row> {
        let w = to_wide(rays);
        let mut out = BTreeSet::new();
        let idx: Vec<usize> = (0..w.len()).collect();
        fn subsets(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if idx.len() < k {
                return vec![];
            }
            let mut out: Vec<Vec<usize>> = subsets(&idx[1..], k - 1).into_iter().map(|mut s| {
                s.insert(0, idx[0]);
                s
            }).collect();
            out.extend(subsets(&idx[1..], k));
            out
        }
        for s in subsets(&idx, d - 1) {
            let m: Vec<Vec<i128>> = s.iter().map(|&i| w[i].clone()).collect();
            let mut a: Vec<i128> = (0..d)
                .map(|j| {
                    let minor: Vec<Vec<i128>> = m.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                    if j % 2 == 0 { det(&minor) } else { -det(&minor) }
                })
                .collect();
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            normalize(&mut a);
            let vals: Vec<i128> = w.iter().map(|r| dot(&a, r)).collect();
            if vals.iter().all(|&v| v >= 0) {
                out.insert(a.iter().map(|&x| x as i64).collect::<Row>());
            } else if vals.iter().all(|&v| v <= 0) {
                out.insert(a.iter().map(|&x| -x as i64).collect::<Row>());
            }
        }
        out.into_iter().collect()
    }

    fn rank(rows: &[Row], d: usize) -> usize {
        let mut m: Vec<Vec<i128>> = to_wide(rows);
        let mut r = 0;
        for c in 0..d {
            let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, p);
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let (a, b) = (m[r][c], m[i][c]);
                    let pr = m[r].clone();
                    m[i] = combine(a, &m[i], -b, &pr);
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn matches_brute_force_facets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 300 {
            let d = rng.gen_range(2..=5);
            let n = rng.gen_range(d..d + 6);
            let rays: Vec<Row> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            if rank(&rays, d) < d {
                continue;
            }
            let dd = conic_hull_hrep(d, &rays).unwrap();
            let brute = brute_facets(d, &rays);
            if brute.is_empty() {
                // the whole space: no inequalities at all
                assert!(dd.hrep.is_empty(), "{rays:?}");
            } else {
                assert_eq!(sorted(dd.hrep.clone()), brute, "{rays:?}");
            }
            // round trip: the extreme rays regenerate the same cone
            let back = Cone::from_rays(d, &dd.rays).unwrap();
            assert!(cone_equal(&dd, &back));
            for r in &rays {
                assert!(dd.contains(r));
            }
            checked += 1;
        }
    }

    #[test]
    fn round_trip_recovers_extreme_rays() {
        let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1], vec![1, 1, 0]];
        let c = Cone::from_rays(3, &rays).unwrap();
        assert_eq!(sorted(c.rays.clone()), sorted(vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]]));
    }

    #[test]
    fn text_format_round_trip() {
        let c = Cone::from_inequalities(3, &[e(3, 0, 1), vec![0, 1, -1], e(3, 2, 1)]).unwrap();
        let text = Polyhedral(&c, true).to_string();
        assert!(text.starts_with("H-representation\nbegin\n3 4 rational\n"));
        let back = parse_polyhedral(&text).unwrap();
        assert!(cone_equal(&c, &back));
        assert!(parse_polyhedral("H-representation\nbegin\n1 3 rational\n 1 0 1\nend").is_err());
        assert!(parse_polyhedral(&(text + "\nextra")).is_err());
    }

    #[test]
    fn region_pipeline_on_relay() {
        // source rate never exceeds edge rate
        let c = rate_region(&[vec![1, 1]], 1, 2).unwrap();
        assert_eq!(sorted(c.hrep.clone()), sorted(vec![vec![1, 0], vec![-1, 1]]));
    }
}
