//! Double description method for the extreme rays of a pointed cone
//! `{ y : A y >= 0 }`, in exact integer arithmetic.
//!
//! Rows are inserted in the order given. Adjacency of a positive/negative ray
//! pair uses the combinatorial test: the rows tight at both must number at
//! least `n - 2` and must not be contained in the tight set of a third ray.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::primitive_integers;

#[derive(Debug, Clone, PartialEq, Eq)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn new(rows: usize) -> Self {
        RowSet(vec![0; rows.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &RowSet) -> RowSet {
        RowSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &RowSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Debug, Clone)]
struct Ray {
    coords: Vec<BigInt>,
    tight: RowSet,
}

/// Rank of a rational matrix together with the indices of a maximal set of
/// linearly independent rows, chosen greedily in row order.
pub(crate) fn independent_rows(rows: &[Vec<BigRational>]) -> Vec<usize> {
    let n = rows.first().map_or(0, Vec::len);
    // reduced echelon basis of the rows accepted so far
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pivot, b) in &basis {
            if !r[*pivot].is_zero() {
                let f = r[*pivot].clone() / &b[*pivot];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pivot) = (0..n).find(|&j| !r[j].is_zero()) {
            basis.push((pivot, r));
            chosen.push(i);
            if chosen.len() == n {
                break;
            }
        }
    }
    chosen
}

fn invert(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("basis rows are independent");
        a.swap(col, p);
        let inv = BigRational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn dot(row: &[BigInt], ray: &[BigInt]) -> BigInt {
    row.iter().zip(ray).map(|(a, b)| a * b).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Outcome of the cone computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ConeRays {
    /// Extreme rays as primitive integer vectors, sorted.
    Pointed(Vec<Vec<BigInt>>),
    /// The constraint matrix has rank below the ambient dimension, so the
    /// cone contains a line.
    Lineality { rank: usize },
}

pub(crate) fn extreme_rays(rows: &[Vec<BigRational>]) -> ConeRays {
    let n = rows.first().map_or(0, Vec::len);
    let basis = independent_rows(rows);
    if basis.len() < n {
        return ConeRays::Lineality { rank: basis.len() };
    }
    let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive_integers(r)).collect();

    let b: Vec<Vec<BigRational>> = basis.iter().map(|&i| rows[i].clone()).collect();
    let inv = invert(&b);
    let mut rays: Vec<Ray> = (0..n)
        .map(|j| {
            let col: Vec<BigRational> = (0..n).map(|i| inv[i][j].clone()).collect();
            let mut tight = RowSet::new(rows.len());
            for (k, &row) in basis.iter().enumerate() {
                if k != j {
                    tight.insert(row);
                }
            }
            Ray { coords: primitive_integers(&col), tight }
        })
        .collect();

    for (i, row) in int_rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();

        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].tight.intersection(&rays[q].tight);
                if common.len() + 2 < n {
                    continue;
                }
                let blocked = (0..rays.len())
                    .any(|r| r != p && r != q && common.is_subset(&rays[r].tight));
                if blocked {
                    continue;
                }
                // vp > 0 > vq: vp * rq - vq * rp lies on the new hyperplane
                let coords: Vec<BigInt> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(rq, rp)| &values[p] * rq - &values[q] * rp)
                    .collect();
                let mut tight = common;
                tight.insert(i);
                created.push(Ray { coords: primitive(coords), tight });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (k, mut ray) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                ray.tight.insert(i);
            }
            next.push(ray);
        }
        next.extend(created);
        rays = next;
    }

    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.coords).collect();
    out.sort();
    out.dedup();
    ConeRays::Pointed(out)
}
