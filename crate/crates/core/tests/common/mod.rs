//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_complex::Complex64;
use rand::Rng;
use twograph::semigroup::{Color, Letter, Theta, Word};

/// Every word reachable from `w` by single adjacent swaps e_i f_j <-> f_j' e_i'.
pub fn rewrite_class(theta: &Theta, w: &Word) -> HashSet<Word> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    while let Some(cur) = queue.pop_front() {
        let ls = cur.letters();
        for p in 0..ls.len().saturating_sub(1) {
            let (a, b) = (ls[p], ls[p + 1]);
            let swapped = match (a.color, b.color) {
                (Color::Blue, Color::Red) => {
                    let (i2, j2) = theta.apply(a.index, b.index);
                    Some((Letter::f(j2), Letter::e(i2)))
                }
                (Color::Red, Color::Blue) => {
                    let (i, j) = theta.apply_inv(b.index, a.index);
                    Some((Letter::e(i), Letter::f(j)))
                }
                _ => None,
            };
            if let Some((x, y)) = swapped {
                let mut next = ls.to_vec();
                next[p] = x;
                next[p + 1] = y;
                let next = Word(next);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

/// The unique word in the rewriting class of `w` with the given color
/// pattern; panics if uniqueness fails.
pub fn oracle_refactor(theta: &Theta, w: &Word, pattern: &[Color]) -> Word {
    let hits: Vec<Word> = rewrite_class(theta, w).into_iter().filter(|x| x.pattern() == pattern).collect();
    assert_eq!(hits.len(), 1, "pattern {pattern:?} of {w} has {} representatives", hits.len());
    hits.into_iter().next().unwrap()
}

pub fn pattern(runs: &[(Color, usize)]) -> Vec<Color> {
    runs.iter().flat_map(|&(c, n)| std::iter::repeat_n(c, n)).collect()
}

pub fn random_word<R: Rng>(rng: &mut R, theta: &Theta, len: usize) -> Word {
    Word(
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Letter::e(rng.gen_range(1..=theta.m()))
                } else {
                    Letter::f(rng.gen_range(1..=theta.n()))
                }
            })
            .collect(),
    )
}

pub fn random_pattern<R: Rng>(rng: &mut R, k: usize, l: usize) -> Vec<Color> {
    let mut p: Vec<Color> = std::iter::repeat_n(Color::Blue, k).chain(std::iter::repeat_n(Color::Red, l)).collect();
    for x in (1..p.len()).rev() {
        p.swap(x, rng.gen_range(0..=x));
    }
    p
}

/// theta' via the rewriting class of e_u f_v.
pub fn oracle_theta_prime(theta: &Theta, u: &[usize], v: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let w = Word::blue(u).concat(&Word::red(v));
    let r = oracle_refactor(theta, &w, &pattern(&[(Color::Red, v.len()), (Color::Blue, u.len())]));
    let idx = r.indices();
    (idx[v.len()..].to_vec(), idx[..v.len()].to_vec())
}

/// i_{s,t} and j_{s,t} of an alternating tail, read from the rewriting
/// class of a diagonal prefix along a path through the requested edge.
pub fn oracle_sigma(theta: &Theta, tau: &[(usize, usize)], s: i64, t: i64) -> (usize, usize) {
    let n = (-s).max(-t) as usize + 1;
    assert!(tau.len() >= n, "tail prefix too short");
    let w = Word(tau[..n].iter().flat_map(|&(i, j)| [Letter::e(i), Letter::f(j)]).collect());
    let (a, b, nn) = ((-s) as usize, (-t) as usize, n as i64);
    let pi = pattern(&[
        (Color::Blue, a),
        (Color::Red, b),
        (Color::Blue, 1),
        (Color::Red, (t + nn) as usize),
        (Color::Blue, (s - 1 + nn) as usize),
    ]);
    let pj = pattern(&[
        (Color::Blue, a),
        (Color::Red, b),
        (Color::Red, 1),
        (Color::Red, (t - 1 + nn) as usize),
        (Color::Blue, (s + nn) as usize),
    ]);
    let wi = oracle_refactor(theta, &w, &pi);
    let wj = oracle_refactor(theta, &w, &pj);
    (wi.letters()[a + b].index, wj.letters()[a + b].index)
}

/// All bijections of [m]x[n] as tables t[(i-1)*n + (j-1)] = (i', j').
fn all_thetas(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (1..=m).flat_map(|i| (1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; pairs.len()];
    fn rec(pairs: &[(usize, usize)], used: &mut [bool], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cur.len() == pairs.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..pairs.len() {
            if !used[x] {
                used[x] = true;
                cur.push(pairs[x]);
                rec(pairs, used, cur, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    rec(&pairs, &mut used, &mut cur, &mut out);
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Orbit sizes of the relabeling action (plus the e/f swap when asked),
/// computed by union-find over adjacent transpositions.
pub fn oracle_orbits(m: usize, n: usize, swap: bool) -> Vec<usize> {
    let all = all_thetas(m, n);
    let index = |t: &Vec<(usize, usize)>| all.iter().position(|x| x == t).unwrap();
    let at = |t: &Vec<(usize, usize)>, i: usize, j: usize| t[(i - 1) * n + (j - 1)];
    let mut parent: Vec<usize> = (0..all.len()).collect();
    for (x, t) in all.iter().enumerate() {
        let mut images = Vec::new();
        for a in 1..m {
            let s = |i: usize| if i == a { a + 1 } else if i == a + 1 { a } else { i };
            let mut img = vec![(0, 0); m * n];
            for i in 1..=m {
                for j in 1..=n {
                    let (i2, j2) = at(t, i, j);
                    img[(s(i) - 1) * n + (j - 1)] = (s(i2), j2);
                }
            }
            images.push(img);
        }
        for b in 1..n {
            let s = |j: usize| if j == b { b + 1 } else if j == b + 1 { b } else { j };
            let mut img = vec![(0, 0); m * n];
            for i in 1..=m {
                for j in 1..=n {
                    let (i2, j2) = at(t, i, j);
                    img[(i - 1) * n + (s(j) - 1)] = (i2, s(j2));
                }
            }
            images.push(img);
        }
        if swap && m == n {
            // e_i f_j = f_j' e_i' read with colors exchanged: f_i e_j = e_j' f_i'
            let mut img = vec![(0, 0); m * n];
            for i in 1..=m {
                for j in 1..=n {
                    let (i2, j2) = at(t, i, j);
                    img[(j2 - 1) * n + (i2 - 1)] = (j, i);
                }
            }
            images.push(img);
        }
        for img in images {
            let y = index(&img);
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }
    let mut sizes = std::collections::BTreeMap::new();
    for x in 0..all.len() {
        *sizes.entry(find(&mut parent, x)).or_insert(0usize) += 1;
    }
    let mut v: Vec<usize> = sizes.into_values().collect();
    v.sort();
    v
}

pub fn root_of_unity(num: i64, den: i64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * num as f64 / den as f64)
}

/// Extensions of psi from K to H, found numerically: candidate values
/// (x/d, y/d) on the basis of H are kept when their products along the
/// real-solved coordinates of each K generator hit the target phase.
pub fn oracle_extensions(h_basis: &[(i64, i64)], k_basis: &[(i64, i64)], psi: &[(i64, i64)], d: i64) -> BTreeSet<(i64, i64)> {
    assert_eq!(h_basis.len(), 2);
    let [(a, b), (c, e)] = [h_basis[0], h_basis[1]];
    let det = (a * e - b * c) as f64;
    let coords = |(x, y): (i64, i64)| {
        let c1 = (x as f64 * e as f64 - y as f64 * c as f64) / det;
        let c2 = (y as f64 * a as f64 - x as f64 * b as f64) / det;
        (c1.round() as i64, c2.round() as i64)
    };
    let mut out = BTreeSet::new();
    for x in 0..d {
        for y in 0..d {
            let z1 = root_of_unity(x, d);
            let z2 = root_of_unity(y, d);
            let ok = k_basis.iter().zip(psi).all(|(&kv, &(pn, pd))| {
                let (c1, c2) = coords(kv);
                let z = z1.powi(c1 as i32) * z2.powi(c2 as i32);
                (z - root_of_unity(pn, pd)).norm() < 1e-9
            });
            if ok {
                out.insert((x, y));
            }
        }
    }
    out
}
