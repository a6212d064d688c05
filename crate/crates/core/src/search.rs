//! Enumerations done by hand in the theory: isomorphism classes of theta,
//! long commuting pairs, and bounded searches for aperiodic tails.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Angle;
use crate::reps::{from_commuting_pair, symmetry_group};
use crate::semigroup::{
    commutes_raw, decode_pair, tabulate_theta_prime, theta_prime_inv_raw, validate_theta, Theta, Word, DEFAULT_TABULATION_CAP,
};
use crate::tails::{build_inductive_window, window_symmetry, SigmaWindow, TailSpec};

/// Largest m*n accepted by `iso_classes` unless a cap is given.
pub const DEFAULT_ISO_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoClassReport {
    pub m: usize,
    pub n: usize,
    pub allow_swap: bool,
    pub count: usize,
    /// Orbit sizes, aligned with `representatives`.
    pub orbit_sizes: Vec<usize>,
    /// Lexicographically least relation table of each orbit, in increasing order.
    pub representatives: Vec<Theta>,
}

/// theta as a table: entry (i-1)*n + (j-1) holds the cell of theta(i,j).
fn table_of(theta: &Theta) -> Vec<usize> {
    let n = theta.n();
    let mut t = vec![0; theta.m() * n];
    for [i, j, i2, j2] in theta.relations() {
        t[(i - 1) * n + (j - 1)] = (i2 - 1) * n + (j2 - 1);
    }
    t
}

fn theta_of(table: &[usize], m: usize, n: usize) -> Theta {
    let raw: Vec<[usize; 4]> = table
        .iter()
        .enumerate()
        .map(|(x, &y)| [x / n + 1, x % n + 1, y / n + 1, y % n + 1])
        .collect();
    validate_theta(&raw, m, n).expect("table is a permutation")
}

/// Cell maps realizing the action on relation tables: relabelings from
/// S_m x S_n, composed with the transpose when swapping is allowed.
fn cell_maps(m: usize, n: usize, allow_swap: bool) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    for sigma in (0..m).permutations(m) {
        for tau in (0..n).permutations(n) {
            let p: Vec<usize> = (0..m * n).map(|x| sigma[x / n] * n + tau[x % n]).collect();
            out.push((p.clone(), false));
            if allow_swap && m == n {
                // transpose after relabeling
                let q: Vec<usize> = p.iter().map(|&y| (y % n) * n + y / n).collect();
                out.push((q, true));
            }
        }
    }
    out
}

/// Image of a table under a cell map. Relabeling conjugates theta; the swap
/// also inverts it, since e_i f_j = f_j' e_i' reads f_j' e_i' = e_i f_j.
fn act(table: &[usize], p: &[usize], swap: bool) -> Vec<usize> {
    let mut out = vec![0; table.len()];
    for (x, &y) in table.iter().enumerate() {
        if swap {
            out[p[y]] = p[x];
        } else {
            out[p[x]] = p[y];
        }
    }
    out
}

/// Orbits of the (mn)! possible theta under generator relabeling and, for
/// m = n with `allow_swap`, the exchange of the e's and f's.
pub fn iso_classes(m: usize, n: usize, allow_swap: bool, cap: Option<usize>) -> Result<IsoClassReport> {
    let cap = cap.unwrap_or(DEFAULT_ISO_CAP);
    if m == 0 || n == 0 {
        return Err(Error::Invalid("m and n must be positive".into()));
    }
    if m * n > cap {
        return Err(Error::CapExceeded(format!("m*n = {} exceeds {cap}", m * n)));
    }
    let maps = cell_maps(m, n, allow_swap);
    let perms: Vec<Vec<usize>> = (0..m * n).permutations(m * n).collect();
    let canon: Vec<Vec<usize>> = perms
        .par_iter()
        .map(|t| maps.iter().map(|(p, s)| act(t, p, *s)).min().expect("identity map present"))
        .collect();
    let mut orbits: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in canon {
        *orbits.entry(c).or_default() += 1;
    }
    Ok(IsoClassReport {
        m,
        n,
        allow_swap,
        count: orbits.len(),
        orbit_sizes: orbits.values().copied().collect(),
        representatives: orbits.keys().map(|t| theta_of(t, m, n)).collect(),
    })
}

/// Canonical representative of the orbit of one theta.
pub fn canonical_theta(theta: &Theta, allow_swap: bool) -> Theta {
    let (m, n) = (theta.m(), theta.n());
    let t = table_of(theta);
    let best = cell_maps(m, n, allow_swap)
        .iter()
        .map(|(p, s)| act(&t, p, *s))
        .min()
        .expect("identity map present");
    theta_of(&best, m, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutingPairResult {
    /// The block pair (u_0, v_0) the construction started from.
    pub u: Word,
    pub v: Word,
    /// Length of the theta'-cycle through (u, v).
    pub p: usize,
    /// The commuting long words built from the cycle.
    pub long_u: Word,
    pub long_v: Word,
    /// |Z^2 / H| for the rep of (long_u, long_v): the dimension of each
    /// irreducible summand.
    pub dimension: u64,
}

/// Dimension of the irreducible summands of the rep of a commuting pair.
pub fn certified_dimension(theta: &Theta, u: &Word, v: &Word) -> Result<u64> {
    let rep = from_commuting_pair(theta, u, v, Angle::ZERO, Angle::ZERO)?;
    symmetry_group(&rep).lattice.index().ok_or(Error::InfiniteGroup)
}

/// Largest torus side tried when certifying candidates.
const CERTIFY_SIDE: usize = 64;

/// Searches block lengths L = 1..=max_block_len. Every theta'-cycle on blue
/// and red words of length L yields a commuting pair of long words (a fixed
/// point yields the pair itself); the first whose rep has irreducible
/// summands of dimension >= target_dim is returned.
pub fn find_commuting_pair(theta: &Theta, target_dim: u64, max_block_len: usize) -> Result<CommutingPairResult> {
    let (m, n) = (theta.m(), theta.n());
    for l in 1..=max_block_len {
        let table = tabulate_theta_prime(theta, l, l, DEFAULT_TABULATION_CAP)?;
        for cyc in table.cycles() {
            let p = cyc.len();
            if p * l > CERTIFY_SIDE || ((p * l) as u64).pow(2) < target_dim {
                continue;
            }
            let pairs: Vec<(Vec<usize>, Vec<usize>)> = cyc.iter().map(|&x| decode_pair(m, n, l, l, x)).collect();
            let long_u: Vec<usize> = pairs.iter().rev().flat_map(|(u, _)| u.clone()).collect();
            let long_v: Vec<usize> = pairs.iter().flat_map(|(_, v)| v.clone()).collect();
            debug_assert!(commutes_raw(theta, &long_u, &long_v));
            let (long_u, long_v) = (Word::blue(&long_u), Word::red(&long_v));
            let dimension = certified_dimension(theta, &long_u, &long_v)?;
            if dimension >= target_dim {
                return Ok(CommutingPairResult {
                    u: Word::blue(&pairs[0].0),
                    v: Word::red(&pairs[0].1),
                    p,
                    long_u,
                    long_v,
                    dimension,
                });
            }
        }
    }
    Err(Error::TargetNotReached(target_dim as usize))
}

/// The red word v with f_v e_u = e_u f_v obtained by passing red letters
/// through e_u one at a time, each chosen (least index first) to come out
/// unchanged. None if some step has no such letter or e_u does not return.
pub fn forced_partner(theta: &Theta, u: &Word, len: usize) -> Result<Option<Word>> {
    let u0 = u.expect_color(crate::semigroup::Color::Blue)?;
    u.check_range(theta)?;
    let mut w = u0.clone();
    // letters of v from the right
    let mut rev = Vec::with_capacity(len);
    for _ in 0..len {
        let step = (1..=theta.n()).find_map(|c| {
            let (w2, c2) = theta_prime_inv_raw(theta, &w, &[c]);
            (c2 == [c]).then_some((w2, c))
        });
        let Some((w2, c)) = step else {
            return Ok(None);
        };
        w = w2;
        rev.push(c);
    }
    if w != u0 {
        return Ok(None);
    }
    rev.reverse();
    Ok(Some(Word::red(&rev)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AperiodicWitness {
    /// Alternating word e_{i0} f_{j0} e_{i1} f_{j1} ... of the search.
    pub tail: Word,
    pub window: SigmaWindow,
    /// Largest |p|, |q| scanned for symmetries.
    pub radius: i64,
}

/// Shortest word scanned: four pairs give a 4 x 4 window.
pub const MIN_APERIODIC_LEN: usize = 8;

/// Enumeration cap per length in `aperiodic_search`.
const APERIODIC_CAP: usize = 1 << 22;

fn alternating_word(m: usize, n: usize, pairs: usize, x: usize) -> Word {
    let (u, v) = decode_pair(m, n, pairs, pairs, x);
    let letters = u
        .iter()
        .zip(&v)
        .flat_map(|(&i, &j)| [crate::semigroup::Letter::e(i), crate::semigroup::Letter::f(j)])
        .collect();
    Word(letters)
}

fn window_of(theta: &Theta, tail: &Word) -> Result<(SigmaWindow, i64)> {
    let pairs = tail.len() / 2;
    let side = pairs - 1;
    let spec = TailSpec::new(Word::empty(), tail.clone())?;
    let w = build_inductive_window(theta, &spec, side, side)?;
    Ok((w, side.div_ceil(2) as i64))
}

/// True when the window of an alternating word admits no nonzero shift
/// symmetry within the scanned radius.
pub fn has_trivial_window_symmetry(theta: &Theta, tail: &Word) -> Result<bool> {
    let (w, radius) = window_of(theta, tail)?;
    Ok(window_symmetry(&w, radius, None).is_empty())
}

/// Scans alternating words of even length 8 <= L <= max_len (by length,
/// then lexicographically) for one whose Sigma window has no nonzero shift
/// symmetry. The window uses the first L/2 pairs; words are split across
/// worker threads and the least witness is kept.
pub fn aperiodic_search(theta: &Theta, max_len: usize) -> Result<Option<AperiodicWitness>> {
    let (m, n) = (theta.m(), theta.n());
    for len in (MIN_APERIODIC_LEN..=max_len).step_by(2) {
        let pairs = len / 2;
        let count = crate::semigroup::pair_count(m, n, pairs, pairs)
            .filter(|&c| c <= APERIODIC_CAP)
            .ok_or_else(|| Error::CapExceeded(format!("alternating words of length {len}")))?;
        let hit = (0..count).into_par_iter().find_first(|&x| {
            let w = alternating_word(m, n, pairs, x);
            has_trivial_window_symmetry(theta, &w).unwrap_or(false)
        });
        if let Some(x) = hit {
            let tail = alternating_word(m, n, pairs, x);
            let (window, radius) = window_of(theta, &tail)?;
            // re-verified from scratch
            if window_symmetry(&window, radius, None).is_empty() {
                return Ok(Some(AperiodicWitness { tail, window, radius }));
            }
        }
    }
    Ok(None)
}
