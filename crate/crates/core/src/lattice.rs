//! Sublattices K of Z^2, the quotients G = Z^2/K with designated generators
//! g1 = [1,0], g2 = [0,1], and characters valued in Q/Z.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Point, Result};

/// A root of unity exp(2 pi i p/q), stored as the reduced fraction p/q in [0,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Angle {
    num: i64,
    den: i64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    pub fn new(p: i64, q: i64) -> Angle {
        assert!(q != 0, "zero denominator");
        let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
        let r = p.rem_euclid(q);
        let g = r.gcd(&q);
        Angle { num: r / g, den: q / g }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn times(self, k: i64) -> Angle {
        Angle::new((self.num as i128 * k as i128 % self.den as i128) as i64, self.den)
    }

    /// Smallest non-negative angle x with k*x = self (k > 0).
    pub fn div(self, k: i64) -> Angle {
        assert!(k > 0, "division by non-positive integer");
        Angle::new(self.num, self.den * k)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Angle {
    fn default() -> Angle {
        Angle::ZERO
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, o: Angle) -> Angle {
        let l = self.den.lcm(&o.den);
        Angle::new(self.num * (l / self.den) + o.num * (l / o.den), l)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, o: Angle) -> Angle {
        self + (-o)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.num, self.den)
    }
}

impl std::iter::Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(it: I) -> Angle {
        it.fold(Angle::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Angle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Angle> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad angle {s:?}, expected p/q"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Angle::new(p, q))
            }
            None => s.parse::<i64>().map(|p| Angle::new(p, 1)).map_err(|_| bad()),
        }
    }
}

impl TryFrom<String> for Angle {
    type Error = Error;
    fn try_from(s: String) -> Result<Angle> {
        s.parse()
    }
}

impl From<Angle> for String {
    fn from(a: Angle) -> String {
        a.to_string()
    }
}

pub type Mat2 = [[i64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// Smith data for a rank-2 lattice: U * B * V = diag(d1, d2) where the rows
/// of B are the HNF basis, U and V unimodular, d1 | d2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub d1: i64,
    pub d2: i64,
    pub u: Mat2,
    pub v: Mat2,
}

fn smith(b: Mat2) -> Smith {
    let mut m = b;
    let mut u: Mat2 = [[1, 0], [0, 1]];
    let mut v: Mat2 = [[1, 0], [0, 1]];
    loop {
        // move the smallest nonzero entry to (0,0)
        let mut best = None;
        for i in 0..2 {
            for j in 0..2 {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj): (usize, usize)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let (bi, bj) = best.expect("rank 2 matrix");
        if bi == 1 {
            m.swap(0, 1);
            u.swap(0, 1);
        }
        if bj == 1 {
            for r in m.iter_mut().chain(v.iter_mut()) {
                r.swap(0, 1);
            }
        }
        let p = m[0][0];
        let q = m[1][0] / p;
        for c in 0..2 {
            m[1][c] -= q * m[0][c];
            u[1][c] -= q * u[0][c];
        }
        let q = m[0][1] / p;
        for r in 0..2 {
            m[r][1] -= q * m[r][0];
            v[r][1] -= q * v[r][0];
        }
        if m[1][0] != 0 || m[0][1] != 0 {
            continue;
        }
        if m[1][1] % p != 0 {
            for c in 0..2 {
                m[0][c] += m[1][c];
                u[0][c] += u[1][c];
            }
            continue;
        }
        break;
    }
    for i in 0..2 {
        if m[i][i] < 0 {
            m[i][i] = -m[i][i];
            u[i][0] = -u[i][0];
            u[i][1] = -u[i][1];
        }
    }
    debug_assert_eq!(mat_mul(&mat_mul(&u, &b), &v), [[m[0][0], 0], [0, m[1][1]]]);
    Smith { d1: m[0][0], d2: m[1][1], u, v }
}

/// A subgroup of Z^2 stored by its Hermite normal form basis:
/// rank 2: rows (a,b), (0,c) with a,c > 0 and 0 <= b < c;
/// rank 1: (a,b) with a > 0, or a = 0 and b > 0;
/// rank 0: no rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<[i64; 2]>", into = "Vec<[i64; 2]>")]
pub struct Sublattice {
    basis: Vec<Point>,
}

impl From<Vec<[i64; 2]>> for Sublattice {
    fn from(g: Vec<[i64; 2]>) -> Sublattice {
        Sublattice::from_gens(&g.iter().map(|x| (x[0], x[1])).collect::<Vec<_>>())
    }
}

impl From<Sublattice> for Vec<[i64; 2]> {
    fn from(s: Sublattice) -> Vec<[i64; 2]> {
        s.basis.iter().map(|&(a, b)| [a, b]).collect()
    }
}

impl Sublattice {
    pub fn zero() -> Sublattice {
        Sublattice { basis: Vec::new() }
    }

    pub fn full() -> Sublattice {
        Sublattice { basis: vec![(1, 0), (0, 1)] }
    }

    pub fn from_gens(gens: &[Point]) -> Sublattice {
        let mut rows: Vec<Point> = gens.iter().copied().filter(|&v| v != (0, 0)).collect();
        // Euclid on the first coordinate
        let mut pivot: Option<Point> = None;
        let mut rest: Vec<i64> = Vec::new();
        loop {
            rows.retain(|&(a, b)| {
                if a == 0 {
                    if b != 0 {
                        rest.push(b);
                    }
                    false
                } else {
                    true
                }
            });
            if rows.is_empty() {
                break;
            }
            let idx = (0..rows.len()).min_by_key(|&i| rows[i].0.abs()).unwrap();
            let p = rows.swap_remove(idx);
            for r in rows.iter_mut() {
                let q = r.0.div_euclid(p.0);
                *r = (r.0 - q * p.0, r.1 - q * p.1);
            }
            if rows.iter().all(|r| r.0 == 0) {
                pivot = Some(p);
                rows.retain(|&(_, b)| {
                    if b != 0 {
                        rest.push(b);
                    }
                    false
                });
                break;
            }
            rows.push(p);
        }
        let c = rest.iter().fold(0i64, |g, &x| g.gcd(&x));
        let basis = match (pivot, c) {
            (None, 0) => Vec::new(),
            (None, c) => vec![(0, c)],
            (Some((a, b)), 0) => {
                if a < 0 {
                    vec![(-a, -b)]
                } else {
                    vec![(a, b)]
                }
            }
            (Some((a, b)), c) => {
                let (a, b) = if a < 0 { (-a, -b) } else { (a, b) };
                vec![(a, b.rem_euclid(c)), (0, c)]
            }
        };
        Sublattice { basis }
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Index in Z^2, when finite.
    pub fn index(&self) -> Option<u64> {
        match self.basis.as_slice() {
            [(a, _), (_, c)] => Some((a * c) as u64),
            _ => None,
        }
    }

    pub fn smith(&self) -> Option<Smith> {
        match self.basis.as_slice() {
            [(a, b), (_, c)] => Some(smith([[*a, *b], [0, *c]])),
            _ => None,
        }
    }

    pub fn invariant_factors(&self) -> Option<(i64, i64)> {
        self.smith().map(|s| (s.d1, s.d2))
    }

    pub fn reduce(&self, (s, t): Point) -> Point {
        match self.basis.as_slice() {
            [] => (s, t),
            [(0, b)] => (s, t.rem_euclid(*b)),
            [(a, b)] => {
                let q = s.div_euclid(*a);
                (s - q * a, t - q * b)
            }
            [(a, b), (_, c)] => {
                let q = s.div_euclid(*a);
                (s - q * a, (t - q * b).rem_euclid(*c))
            }
            _ => unreachable!(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.reduce(p) == (0, 0)
    }

    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        other.basis.iter().all(|&p| self.contains(p))
    }

    pub fn join(&self, other: &Sublattice) -> Sublattice {
        let mut g = self.basis.clone();
        g.extend_from_slice(&other.basis);
        Sublattice::from_gens(&g)
    }

    /// Coordinates of p in the stored basis; None if p is not in the lattice.
    pub fn coords(&self, (s, t): Point) -> Option<Vec<i64>> {
        match self.basis.as_slice() {
            [] => ((s, t) == (0, 0)).then(Vec::new),
            [(0, b)] => (s == 0 && t % b == 0).then(|| vec![t / b]),
            [(a, b)] => (s % a == 0 && t * a == s * b).then(|| vec![s / a]),
            [(a, b), (_, c)] => {
                if s % a != 0 {
                    return None;
                }
                let l1 = s / a;
                let r = t - l1 * b;
                (r % c == 0).then(|| vec![l1, r / c])
            }
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.basis.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

/// G = Z^2 / K with g1 = [1,0], g2 = [0,1].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientGroup {
    pub kernel: Sublattice,
}

impl QuotientGroup {
    pub fn new(kernel: Sublattice) -> QuotientGroup {
        QuotientGroup { kernel }
    }

    pub fn from_gens(gens: &[Point]) -> QuotientGroup {
        QuotientGroup::new(Sublattice::from_gens(gens))
    }

    pub fn is_finite(&self) -> bool {
        self.kernel.rank() == 2
    }

    pub fn order(&self) -> Option<u64> {
        self.kernel.index()
    }

    pub fn reduce(&self, p: Point) -> Point {
        self.kernel.reduce(p)
    }

    pub fn same(&self, p: Point, q: Point) -> bool {
        self.kernel.contains((p.0 - q.0, p.1 - q.1))
    }

    pub fn elements(&self) -> Result<Vec<Point>> {
        match self.kernel.basis() {
            [(a, _), (_, c)] => Ok((0..*a).flat_map(|s| (0..*c).map(move |t| (s, t))).collect()),
            _ => Err(Error::InfiniteGroup),
        }
    }

    /// Position of the coset of p in `elements()`; finite groups only.
    pub fn index_of(&self, p: Point) -> usize {
        let (s, t) = self.reduce(p);
        let c = self.kernel.basis()[1].1;
        (s * c + t) as usize
    }

    pub fn characters(&self) -> Result<Vec<CharZ2>> {
        let &[(a, b), (_, c)] = self.kernel.basis() else {
            return Err(Error::InfiniteGroup);
        };
        let mut out = Vec::with_capacity((a * c) as usize);
        for n in 0..a {
            for j in 0..c {
                let y = Angle::new(j, c);
                let x = Angle::new(n * c - b * j, a * c);
                out.push(CharZ2 { x, y });
            }
        }
        Ok(out)
    }
}

/// A character of Z^2, given by its values phi(1,0) = x and phi(0,1) = y.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharZ2 {
    pub x: Angle,
    pub y: Angle,
}

impl CharZ2 {
    pub fn zero() -> CharZ2 {
        CharZ2::default()
    }

    pub fn eval(&self, (s, t): Point) -> Angle {
        self.x.times(s) + self.y.times(t)
    }

    pub fn restrict(&self, l: &Sublattice) -> CharOnSublattice {
        CharOnSublattice { domain: l.clone(), values: l.basis().iter().map(|&p| self.eval(p)).collect() }
    }

    pub fn vanishes_on(&self, l: &Sublattice) -> bool {
        l.basis().iter().all(|&p| self.eval(p).is_zero())
    }
}

impl Add for CharZ2 {
    type Output = CharZ2;
    fn add(self, o: CharZ2) -> CharZ2 {
        CharZ2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl fmt::Display for CharZ2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi(1,0)={} phi(0,1)={}", self.x, self.y)
    }
}

/// A character of a sublattice, given by its values on the HNF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharOnSublattice {
    pub domain: Sublattice,
    pub values: Vec<Angle>,
}

impl CharOnSublattice {
    pub fn new(domain: Sublattice, values: Vec<Angle>) -> CharOnSublattice {
        assert_eq!(domain.rank(), values.len(), "one value per basis vector");
        CharOnSublattice { domain, values }
    }

    pub fn zero(domain: Sublattice) -> CharOnSublattice {
        let n = domain.rank();
        CharOnSublattice { domain, values: vec![Angle::ZERO; n] }
    }

    pub fn eval(&self, p: Point) -> Option<Angle> {
        let c = self.domain.coords(p)?;
        Some(c.iter().zip(&self.values).map(|(&k, &v)| v.times(k)).sum())
    }

    /// Canonical extension to Z^2: triangular solve on the HNF basis, taking
    /// the smallest non-negative solution at each step and zero on free
    /// coordinates.
    pub fn extend(&self) -> CharZ2 {
        match (self.domain.basis(), self.values.as_slice()) {
            ([], _) => CharZ2::zero(),
            ([(0, b)], [v]) => CharZ2 { x: Angle::ZERO, y: v.div(*b) },
            ([(k, 0)], [v]) => CharZ2 { x: v.div(*k), y: Angle::ZERO },
            ([(_, l)], [v]) => {
                let y = if *l > 0 { v.div(*l) } else { (-*v).div(-*l) };
                CharZ2 { x: Angle::ZERO, y }
            }
            ([(a, b), (_, c)], [v1, v2]) => {
                let y = v2.div(*c);
                let x = (*v1 - y.times(*b)).div(*a);
                CharZ2 { x, y }
            }
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for CharOnSublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .domain
            .basis()
            .iter()
            .zip(&self.values)
            .map(|((a, b), v)| format!("psi({a},{b})={v}"))
            .collect();
        if parts.is_empty() {
            write!(f, "psi=0 on {{0}}")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

pub fn extend_character(psi: &CharOnSublattice) -> CharZ2 {
    psi.extend()
}
