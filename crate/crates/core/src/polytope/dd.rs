//! Double description method for polyhedral cones `{ x : A x >= 0 }`.
//!
//! Rows are inserted in the order given. The cone is kept as a lineality
//! basis plus a list of extreme rays; each extreme ray carries the set of
//! processed rows it is tight on. New rays are formed only from adjacent
//! pairs, where adjacency is the combinatorial test: no third ray is tight
//! on every row both candidates are tight on.
//!
//! Arithmetic is fraction free. Every ray is kept primitive (gcd 1), which
//! keeps entries small enough that checked `i128` almost always suffices;
//! on overflow the whole run is repeated over `BigInt`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Extreme rays and lineality of a cone.
#[derive(Debug, Clone)]
pub(crate) struct Cone {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

pub(crate) trait DdInt: Clone + Debug + Send + Sync + PartialEq + Zero {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn sign(&self) -> i8;
    fn is_one_abs(&self) -> bool;
}

impl DdInt for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn c_sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        self.signum() as i8
    }
    fn is_one_abs(&self) -> bool {
        self.abs() == 1
    }
}

impl DdInt for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn c_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        if self.is_negative() {
            -1
        } else if self.is_zero() {
            0
        } else {
            1
        }
    }
    fn is_one_abs(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray<T> {
    v: Vec<T>,
    zeros: Bits,
}

fn dot<T: DdInt>(a: &[T], b: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.c_add(&x.c_mul(y)?)?;
    }
    Some(acc)
}

fn make_primitive<T: DdInt>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one_abs() {
                return;
            }
        }
    }
    if g.is_zero() {
        return;
    }
    if g.sign() < 0 {
        g = g.neg();
    }
    for x in v.iter_mut() {
        *x = x.div_exact(&g);
    }
}

/// `s·u − t·w`, made primitive.
fn combine<T: DdInt>(s: &T, u: &[T], t: &T, w: &[T]) -> Option<Vec<T>> {
    let mut out = Vec::with_capacity(u.len());
    for (a, b) in u.iter().zip(w) {
        out.push(s.c_mul(a)?.c_sub(&t.c_mul(b)?)?);
    }
    make_primitive(&mut out);
    Some(out)
}

/// Runs the double description method on `rows`, each of length `n`.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>], n: usize) -> Cone {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(i128::from_big).collect())
        .collect();
    if let Some(small) = small {
        if let Some(cone) = run::<i128>(&small, n) {
            return cone;
        }
    }
    run::<BigInt>(rows, n).expect("bigint arithmetic cannot overflow")
}

fn run<T: DdInt>(rows: &[Vec<T>], n: usize) -> Option<Cone> {
    let m = rows.len();
    let mut lineality: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::from_big(&BigInt::from(1))?;
            Some(e)
        })
        .collect::<Option<_>>()?;
    let mut rays: Vec<Ray<T>> = Vec::new();
    let mut processed = Bits::new(m);

    for (ri, a) in rows.iter().enumerate() {
        // A lineality direction not tight on this row becomes a ray.
        let mut hit = None;
        for (li, l) in lineality.iter().enumerate() {
            let v = dot(a, l)?;
            if !v.is_zero() {
                hit = Some((li, v));
                break;
            }
        }
        if let Some((li, mut s)) = hit {
            let mut l = lineality.swap_remove(li);
            if s.sign() < 0 {
                l.iter_mut().for_each(|x| *x = x.neg());
                s = s.neg();
            }
            for other in lineality.iter_mut() {
                let t = dot(a, other)?;
                if !t.is_zero() {
                    *other = combine(&s, other, &t, &l)?;
                }
            }
            for r in rays.iter_mut() {
                let t = dot(a, &r.v)?;
                if !t.is_zero() {
                    r.v = combine(&s, &r.v, &t, &l)?;
                }
                r.zeros.set(ri);
            }
            rays.push(Ray {
                v: l,
                zeros: processed.clone(),
            });
            processed.set(ri);
            continue;
        }

        let values: Vec<T> = rays
            .iter()
            .map(|r| dot(a, &r.v))
            .collect::<Option<_>>()?;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, v) in values.iter().enumerate() {
            match v.sign() {
                1 => pos.push(i),
                -1 => neg.push(i),
                _ => {}
            }
        }
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.set(ri);
                }
            }
            processed.set(ri);
            continue;
        }

        let need = (n - lineality.len()).saturating_sub(2);
        let rays_ref = &rays;
        let pairs: Vec<(usize, usize, Bits)> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                neg.iter().filter_map(move |&q| {
                    let common = rays_ref[p].zeros.and(&rays_ref[q].zeros);
                    if common.count() < need {
                        return None;
                    }
                    let blocked = rays_ref.iter().enumerate().any(|(k, r)| {
                        k != p && k != q && common.subset_of(&r.zeros)
                    });
                    (!blocked).then_some((p, q, common))
                })
            })
            .collect();

        let mut created = Vec::with_capacity(pairs.len());
        for (p, q, mut zeros) in pairs {
            // values[p] > 0 > values[q]; the combination is tight on `a`.
            let v = combine(&values[p], &rays[q].v, &values[q], &rays[p].v)?;
            zeros.set(ri);
            created.push(Ray { v, zeros });
        }

        let mut next: Vec<Ray<T>> = Vec::with_capacity(rays.len() + created.len());
        for (r, v) in rays.into_iter().zip(&values) {
            match v.sign() {
                1 => next.push(r),
                0 => {
                    let mut r = r;
                    r.zeros.set(ri);
                    next.push(r);
                }
                _ => {}
            }
        }
        next.extend(created);
        rays = next;
        processed.set(ri);
    }

    Some(Cone {
        lineality: lineality
            .iter()
            .map(|l| l.iter().map(T::to_big).collect())
            .collect(),
        rays: rays
            .iter()
            .map(|r| r.v.iter().map(T::to_big).collect())
            .collect(),
    })
}
