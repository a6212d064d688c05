//! Group-construction representations on G = Z^2/K.
//!
//! A rep assigns to each coset g a blue label i(g) and a red label j(g): the
//! blue edge g -> g+(1,0) carries e_{i(g)} and the red edge g -> g+(0,1)
//! carries f_{j(g)}. It is a representation exactly when
//! theta(i(g+(0,1)), j(g)) = (i(g), j(g+(1,0))) for every g.
//!
//! Finite groups store one label pair per coset. Infinite groups are handled
//! when K = Z(a,b) with a > 0: canonical cosets are (s,t) with 0 <= s < a, and
//! the labels are stored for rows lo..=hi, extended periodically below and
//! above.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Point, Result};
use crate::lattice::{Angle, CharOnSublattice, CharZ2, QuotientGroup, Sublattice};
use crate::semigroup::{
    commutes_raw, decode_word, pair_count, refactor, theta_prime_cycle, theta_prime_raw, Color, Theta, Word, DEFAULT_TABULATION_CAP,
};
use crate::tails::{SymmetryGroup, SymmetryMode, TailSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Finite G; entries indexed by `QuotientGroup::index_of`.
    Full { imap: Vec<usize>, jmap: Vec<usize> },
    /// K = Z(a,b), a > 0. `rows[t - lo][s] = (i, j)` for 0 <= s < a. Rows
    /// below lo repeat with period `back`, rows above hi with period `fwd`.
    Strip { lo: i64, hi: i64, back: i64, fwd: i64, rows: Vec<Vec<(usize, usize)>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scalars {
    Constant { alpha0: Angle, beta0: Angle },
    /// Phases on the blue and red edge leaving each coset (finite G only).
    PerEdge { alpha: Vec<Angle>, beta: Vec<Angle> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConstructionRep {
    pub theta: Theta,
    pub group: QuotientGroup,
    pub domain: Domain,
    pub scalars: Scalars,
}

const G1: Point = (1, 0);
const G2: Point = (0, 1);

fn add(p: Point, q: Point) -> Point {
    (p.0 + q.0, p.1 + q.1)
}

fn sub(p: Point, q: Point) -> Point {
    (p.0 - q.0, p.1 - q.1)
}

impl GroupConstructionRep {
    /// Assembles a rep after checking the shape of the data (not consistency).
    pub fn new(theta: Theta, group: QuotientGroup, domain: Domain, scalars: Scalars) -> Result<Self> {
        let rep = GroupConstructionRep { theta, group, domain, scalars };
        rep.check_shape()?;
        Ok(rep)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rep: GroupConstructionRep = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        rep.check_shape()?;
        Ok(rep)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rep serializes")
    }

    pub fn kernel(&self) -> &Sublattice {
        &self.group.kernel
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.domain, Domain::Full { .. })
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |s: String| Err(Error::MalformedDomain(s));
        let (m, n) = (self.theta.m(), self.theta.n());
        let in_range = |&(i, j): &(usize, usize)| (1..=m).contains(&i) && (1..=n).contains(&j);
        match &self.domain {
            Domain::Full { imap, jmap } => {
                let Some(order) = self.group.order() else {
                    return bad("full domain needs a finite group".into());
                };
                let order = order as usize;
                if imap.len() != order || jmap.len() != order {
                    return bad(format!("expected {order} labels per color"));
                }
                if !imap.iter().zip(jmap).map(|(&i, &j)| (i, j)).all(|p| in_range(&p)) {
                    return bad("label out of range".into());
                }
                if let Scalars::PerEdge { alpha, beta } = &self.scalars {
                    if alpha.len() != order || beta.len() != order {
                        return bad(format!("expected {order} phases per color"));
                    }
                }
            }
            Domain::Strip { lo, hi, back, fwd, rows } => {
                let &[(a, _)] = self.group.kernel.basis() else {
                    return bad("strip domain needs a kernel Z(a,b)".into());
                };
                if a <= 0 {
                    return bad("strip kernel must have a > 0".into());
                }
                let len = hi - lo + 1;
                if hi < lo || *back <= 0 || *fwd <= 0 || rows.len() as i64 != len || *back > len || *fwd > len {
                    return bad("strip rows and periods inconsistent".into());
                }
                if rows.iter().any(|r| r.len() as i64 != a || !r.iter().all(in_range)) {
                    return bad(format!("each row needs {a} labels in range"));
                }
                if !matches!(self.scalars, Scalars::Constant { .. }) {
                    return bad("strip domains take constant scalars".into());
                }
            }
        }
        Ok(())
    }

    /// Canonical coset representatives (finite G).
    pub fn elements(&self) -> Result<Vec<Point>> {
        self.group.elements()
    }

    /// Maps a strip row index into the stored range.
    fn strip_row(&self, t: i64) -> i64 {
        let Domain::Strip { lo, hi, back, fwd, .. } = &self.domain else { unreachable!() };
        if t < *lo {
            t + (lo - t + back - 1) / back * back
        } else if t > *hi {
            t - (t - hi + fwd - 1) / fwd * fwd
        } else {
            t
        }
    }

    /// (i(g), j(g)) for any point of Z^2.
    pub fn labels(&self, p: Point) -> (usize, usize) {
        match &self.domain {
            Domain::Full { imap, jmap } => {
                let x = self.group.index_of(p);
                (imap[x], jmap[x])
            }
            Domain::Strip { lo, rows, .. } => {
                let (s, t) = self.group.reduce(p);
                rows[(self.strip_row(t) - lo) as usize][s as usize]
            }
        }
    }

    pub fn alpha_at(&self, p: Point) -> Angle {
        match &self.scalars {
            Scalars::Constant { alpha0, .. } => *alpha0,
            Scalars::PerEdge { alpha, .. } => alpha[self.group.index_of(p)],
        }
    }

    pub fn beta_at(&self, p: Point) -> Angle {
        match &self.scalars {
            Scalars::Constant { beta0, .. } => *beta0,
            Scalars::PerEdge { beta, .. } => beta[self.group.index_of(p)],
        }
    }

    pub fn constants(&self) -> Option<(Angle, Angle)> {
        match self.scalars {
            Scalars::Constant { alpha0, beta0 } => Some((alpha0, beta0)),
            Scalars::PerEdge { .. } => None,
        }
    }

    /// Points on which validation runs: every coset when finite, otherwise
    /// the stored rows plus one period and a margin on each side.
    pub fn check_points(&self) -> Vec<Point> {
        match &self.domain {
            Domain::Full { .. } => self.group.elements().expect("finite"),
            Domain::Strip { lo, hi, back, fwd, .. } => {
                let (a, b) = self.group.kernel.basis()[0];
                let m = b.abs() + 2;
                (lo - back - m..=hi + fwd + m).flat_map(|t| (0..a).map(move |s| (s, t))).collect()
            }
        }
    }

    /// Checks the commutation identity and, for per-edge scalars, the cocycle.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        let pts = self.check_points();
        for &g in &pts {
            let (ig, jg) = self.labels(g);
            let (i_up, _) = self.labels(add(g, G2));
            let (_, j_right) = self.labels(add(g, G1));
            if self.theta.apply(i_up, jg) != (ig, j_right) {
                return Err(Error::InconsistentCommutation(g));
            }
        }
        if let Scalars::PerEdge { .. } = self.scalars {
            for &g in &pts {
                let lhs = self.alpha_at(add(g, G2)) + self.beta_at(g);
                let rhs = self.beta_at(add(g, G1)) + self.alpha_at(g);
                if lhs != rhs {
                    return Err(Error::CocycleViolation(g));
                }
            }
        }
        Ok(())
    }

    /// Phase of the path from `start` taking d.0 blue steps then d.1 red
    /// steps; negative counts walk edges backwards.
    pub fn path_phase(&self, start: Point, d: Point) -> Angle {
        let mut p = start;
        let mut acc = Angle::ZERO;
        for _ in 0..d.0.abs() {
            if d.0 > 0 {
                acc = acc + self.alpha_at(p);
                p = add(p, G1);
            } else {
                p = sub(p, G1);
                acc = acc - self.alpha_at(p);
            }
        }
        for _ in 0..d.1.abs() {
            if d.1 > 0 {
                acc = acc + self.beta_at(p);
                p = add(p, G2);
            } else {
                p = sub(p, G2);
                acc = acc - self.beta_at(p);
            }
        }
        acc
    }

    /// The blue word read along the closed path of `len` blue steps from g.
    pub fn blue_word_from(&self, g: Point, len: i64) -> Word {
        let idx: Vec<usize> = (0..len).rev().map(|s| self.labels(add(g, (s, 0))).0).collect();
        Word::blue(&idx)
    }

    pub fn red_word_from(&self, g: Point, len: i64) -> Word {
        let idx: Vec<usize> = (0..len).rev().map(|t| self.labels(add(g, (0, t))).1).collect();
        Word::red(&idx)
    }

    /// A point in the eventually periodic region below the stored rows that
    /// represents the same class modulo the backward period.
    fn deep(&self, p: Point) -> Point {
        match &self.domain {
            Domain::Full { .. } => p,
            Domain::Strip { lo, back, .. } => {
                let (a, b) = self.group.kernel.basis()[0];
                let (s, t) = self.group.reduce(p);
                let target = lo - back - b.abs() - a - 4;
                let k = if t > target { (t - target + back - 1) / back } else { 0 };
                (s, t - k * back)
            }
        }
    }
}

/// C_k = Z^2/<(1,1),(0,k)> with i(g) = i_g and j(g) = j_{g-1}, where the
/// cycle satisfies theta(i_g, j_g) = (i_{g+1}, j_{g+1}).
pub fn from_theta_cycle(theta: &Theta, cycle: &[(usize, usize)], alpha0: Angle, beta0: Angle) -> Result<GroupConstructionRep> {
    let k = cycle.len();
    let show = || format!("{cycle:?}");
    if k == 0 {
        return Err(Error::NotACycle(show()));
    }
    for (g, &(i, j)) in cycle.iter().enumerate() {
        if !(1..=theta.m()).contains(&i) || !(1..=theta.n()).contains(&j) {
            return Err(Error::NotACycle(show()));
        }
        if cycle[..g].contains(&(i, j)) || theta.apply(i, j) != cycle[(g + 1) % k] {
            return Err(Error::NotACycle(show()));
        }
    }
    let group = QuotientGroup::from_gens(&[(1, 1), (0, k as i64)]);
    let mut imap = vec![0; k];
    let mut jmap = vec![0; k];
    for g in 0..k {
        let x = group.index_of((g as i64, 0));
        imap[x] = cycle[g].0;
        jmap[x] = cycle[(g + k - 1) % k].1;
    }
    let rep = GroupConstructionRep::new(
        theta.clone(),
        group,
        Domain::Full { imap, jmap },
        Scalars::Constant { alpha0, beta0 },
    )?;
    rep.validate()?;
    Ok(rep)
}

fn blue_indices(w: &Word) -> Result<Vec<usize>> {
    w.expect_color(Color::Blue)
}

fn red_indices(w: &Word) -> Result<Vec<usize>> {
    w.expect_color(Color::Red)
}

fn nonempty(w: &Word, what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Invalid(format!("{what} must be nonempty")));
    }
    Ok(())
}

/// Ring-by-ring rep on C_k x C_l from a commuting pair: row t of the grid
/// is the blue block of f_{v0} e_{u0} refactored as f^{l-t} e^k f^t, and
/// column s is the red block of the e^{k-s} f^l e^s factorization.
pub fn from_commuting_pair(theta: &Theta, u0: &Word, v0: &Word, alpha: Angle, beta: Angle) -> Result<GroupConstructionRep> {
    let u = blue_indices(u0)?;
    let v = red_indices(v0)?;
    nonempty(u0, "u0")?;
    nonempty(v0, "v0")?;
    u0.check_range(theta)?;
    v0.check_range(theta)?;
    if !commutes_raw(theta, &u, &v) {
        return Err(Error::NotCommuting { u: u0.digits(), v: v0.digits() });
    }
    let (k, l) = (u.len(), v.len());
    let group = QuotientGroup::from_gens(&[(k as i64, 0), (0, l as i64)]);
    let w = v0.concat(u0);
    let mismatch = |g: Point| Error::InconsistentCommutation(g);
    let mut imap = vec![0; k * l];
    let mut jmap = vec![0; k * l];
    for t in 0..l {
        let mut pat = vec![Color::Red; l - t];
        pat.extend(std::iter::repeat_n(Color::Blue, k));
        pat.extend(std::iter::repeat_n(Color::Red, t));
        let r = refactor(theta, &w, &pat)?;
        let x = r.letters();
        let left: Vec<usize> = x[..l - t].iter().map(|c| c.index).collect();
        let right: Vec<usize> = x[l - t + k..].iter().map(|c| c.index).collect();
        if left != v[..l - t] || right != v[l - t..] {
            return Err(mismatch((0, t as i64)));
        }
        let mid = Word(x[l - t..l - t + k].to_vec());
        for s in 0..k {
            imap[group.index_of((s as i64, t as i64))] = mid.letter_from_right(s).index;
        }
    }
    for s in 0..k {
        let mut pat = vec![Color::Blue; k - s];
        pat.extend(std::iter::repeat_n(Color::Red, l));
        pat.extend(std::iter::repeat_n(Color::Blue, s));
        let r = refactor(theta, &w, &pat)?;
        let x = r.letters();
        let left: Vec<usize> = x[..k - s].iter().map(|c| c.index).collect();
        let right: Vec<usize> = x[k - s + l..].iter().map(|c| c.index).collect();
        if left != u[..k - s] || right != u[k - s..] {
            return Err(mismatch((s as i64, 0)));
        }
        let mid = Word(x[k - s..k - s + l].to_vec());
        for t in 0..l {
            jmap[group.index_of((s as i64, t as i64))] = mid.letter_from_right(t).index;
        }
    }
    let rep = GroupConstructionRep::new(
        theta.clone(),
        group,
        Domain::Full { imap, jmap },
        Scalars::Constant { alpha0: alpha, beta0: beta },
    )?;
    rep.validate()?;
    Ok(rep)
}

/// The commuting pair read off a theta-cycle: u = i_{k-1}...i_0, v = j_0...j_{k-1}.
pub fn cycle_pair(cycle: &[(usize, usize)]) -> (Word, Word) {
    let u: Vec<usize> = cycle.iter().rev().map(|c| c.0).collect();
    let v: Vec<usize> = cycle.iter().map(|c| c.1).collect();
    (Word::blue(&u), Word::red(&v))
}

/// The rep on C_k x C_k built from a theta-cycle of length k; its symmetry
/// group is the diagonal.
pub fn cycle_squared(theta: &Theta, cycle: &[(usize, usize)], alpha: Angle, beta: Angle) -> Result<GroupConstructionRep> {
    from_theta_cycle(theta, cycle, Angle::ZERO, Angle::ZERO)?;
    let (u, v) = cycle_pair(cycle);
    from_commuting_pair(theta, &u, &v, alpha, beta)
}

const ROW_CAP: i64 = 1 << 20;

/// Ring-by-tail rep on C_k x Z. Row 0 carries the blue ring u0; the red tail
/// v0 labels the red edges (0,-1) -> (0,0), (0,-2) -> (0,-1), and so on.
/// Each lower row is forced by theta; the construction requires the red
/// letter to pass through the ring unchanged at every level and u0 to recur
/// in the periodic part. Rows above 0 repeat the segment from the first
/// recurrence of u0.
pub fn build_ring_by_tail(theta: &Theta, u0: &Word, v0: &TailSpec, alpha0: Angle) -> Result<GroupConstructionRep> {
    let u = blue_indices(u0)?;
    nonempty(u0, "u0")?;
    u0.check_range(theta)?;
    v0.check_color(Color::Red)?;
    v0.check_range(theta)?;
    let k = u.len();
    let ring: Vec<usize> = (0..k).map(|s| u0.letter_from_right(s).index).collect();
    let mut upper = ring.clone();
    let mut below: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut seen: HashMap<(Vec<usize>, usize), i64> = HashMap::new();
    let mut t = -1i64;
    let (lo, back) = loop {
        if -t > ROW_CAP {
            return Err(Error::CapExceeded(format!("no periodic state within {ROW_CAP} rows")));
        }
        let pos = (-t - 1) as usize;
        let state = (upper.clone(), v0.phase(pos));
        if let Some(&ta) = seen.get(&state) {
            break (t + 1, ta - t);
        }
        seen.insert(state, t);
        let j0 = v0.index(pos);
        let mut j = j0;
        let mut row = Vec::with_capacity(k);
        for &top in &upper {
            let (i, jr) = theta.apply(top, j);
            row.push((i, j));
            j = jr;
        }
        if j != j0 {
            return Err(Error::TailCondition(t));
        }
        upper = row.iter().map(|x| x.0).collect();
        below.push(row);
        t -= 1;
    };
    let row_i = |r: &Vec<(usize, usize)>| r.iter().map(|x| x.0).collect::<Vec<_>>();
    // below[n] is row -(n+1)
    let periodic = (-(lo + back - 1))..=(-lo);
    if !periodic.clone().any(|n| row_i(&below[(n - 1) as usize]) == ring) {
        return Err(Error::TailCondition(lo));
    }
    let first = (1..=(-lo)).find(|&n| row_i(&below[(n - 1) as usize]) == ring).expect("recurrence");
    let rows: Vec<Vec<(usize, usize)>> = below.into_iter().rev().collect();
    let rep = GroupConstructionRep::new(
        theta.clone(),
        QuotientGroup::from_gens(&[(k as i64, 0)]),
        Domain::Strip { lo, hi: -1, back, fwd: first, rows },
        Scalars::Constant { alpha0, beta0: Angle::ZERO },
    )?;
    rep.validate()?;
    Ok(rep)
}

/// Type 3bi rep on Z^2/Z(k,l): the theta'-cycle (u_0,v_0),...,(u_{p-1},v_{p-1})
/// through (u0,v0) gives the commuting pair u_{p-1}...u_0, v_0...v_{p-1}, whose
/// ring-by-ring rep on C_{pk} x C_{pl} is invariant under (k,l).
pub fn build_3bi(theta: &Theta, u0: &Word, v0: &Word, beta: Angle) -> Result<GroupConstructionRep> {
    nonempty(u0, "u0")?;
    nonempty(v0, "v0")?;
    let cyc = theta_prime_cycle(theta, u0, v0, DEFAULT_TABULATION_CAP)?;
    let (k, l) = (u0.len() as i64, v0.len() as i64);
    let p = cyc.len() as i64;
    let mut big_u = Word::empty();
    let mut big_v = Word::empty();
    for (u, v) in &cyc {
        big_u = u.concat(&big_u);
        big_v = big_v.concat(v);
    }
    let torus = from_commuting_pair(theta, &big_u, &big_v, Angle::ZERO, Angle::ZERO)?;
    for g in torus.elements()? {
        if torus.labels(add(g, (k, l))) != torus.labels(g) {
            return Err(Error::InconsistentCommutation(g));
        }
    }
    let rows: Vec<Vec<(usize, usize)>> =
        (0..p * l).map(|t| (0..k).map(|s| torus.labels((s, t))).collect()).collect();
    let rep = GroupConstructionRep::new(
        theta.clone(),
        QuotientGroup::from_gens(&[(k, l)]),
        Domain::Strip { lo: 0, hi: p * l - 1, back: p * l, fwd: p * l, rows },
        Scalars::Constant { alpha0: Angle::ZERO, beta0: beta.div(l) },
    )?;
    rep.validate()?;
    Ok(rep)
}

/// Length of the theta'-cycle through (u0, v0).
pub fn theta_prime_period(theta: &Theta, u0: &Word, v0: &Word) -> Result<usize> {
    Ok(theta_prime_cycle(theta, u0, v0, DEFAULT_TABULATION_CAP)?.len())
}

/// Labels (i_{s,t}, j_{s,t}) of incoming edges for s in (-k, 0], t <= 0, as
/// determined by the tails of a type 3bii rep.
#[derive(Clone, Debug)]
pub struct SigmaStrip {
    pub k: i64,
    pub l: i64,
    /// `rows[r][c]` is (i_{-c,-r}, j_{-c,-r}) for r < rows.len().
    pub rows: Vec<Vec<(usize, usize)>>,
    /// Rows r >= `periodic_from` repeat with period `period`.
    pub periodic_from: i64,
    pub period: i64,
}

impl SigmaStrip {
    /// Incoming labels at any point (s,t) whose class has a representative
    /// in the strip with t <= 0.
    pub fn at(&self, (s, t): Point) -> Option<(usize, usize)> {
        let n = (-s).rem_euclid(self.k);
        let s2 = -n;
        let t2 = t - (s2 - s) / self.k * self.l;
        if t2 > 0 {
            return None;
        }
        let mut r = -t2;
        let last = self.rows.len() as i64;
        if r >= last {
            r -= (r - last + self.period) / self.period * self.period;
        }
        debug_assert!(r >= self.periodic_from || r < last);
        Some(self.rows[r as usize][n as usize])
    }
}

/// First pair of block indices q_a < q_b with (u_{q_a}, v_{q_a}) = (u_{q_b}, v_{q_b}),
/// where u_q = tau_e[qk..(q+1)k] and v_q = tau_f[ql..(q+1)l].
pub fn first_block_repeat(tau_e: &TailSpec, tau_f: &TailSpec, k: usize, l: usize) -> (usize, usize) {
    let mut seen: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    for q in 0.. {
        let key = (tau_e.indices(q * k, k), tau_f.indices(q * l, l));
        if let Some(&qa) = seen.get(&key) {
            return (qa, q);
        }
        seen.insert(key, q);
    }
    unreachable!()
}

/// The long words tau_e[q_a k .. q_b k] and tau_f[q_a l .. q_b l] at the first
/// block repeat; they commute for compatible tails.
pub fn repeat_words(tau_e: &TailSpec, tau_f: &TailSpec, k: usize, l: usize) -> (Word, Word) {
    let (qa, qb) = first_block_repeat(tau_e, tau_f, k, l);
    (
        Word::blue(&tau_e.indices(qa * k, (qb - qa) * k)),
        Word::red(&tau_f.indices(qa * l, (qb - qa) * l)),
    )
}

/// Sweeps the strip s in (-k,0] downward from row 0, checking the
/// compatibility of the tails at every row.
pub fn sigma_strip_3bii(theta: &Theta, tau_e: &TailSpec, tau_f: &TailSpec, k: usize, l: usize) -> Result<SigmaStrip> {
    if k == 0 || l == 0 {
        return Err(Error::Invalid("block lengths must be positive".into()));
    }
    tau_e.check_color(Color::Blue)?;
    tau_f.check_color(Color::Red)?;
    tau_e.check_range(theta)?;
    tau_f.check_range(theta)?;
    let mut tops: Vec<usize> = tau_e.indices(0, k);
    let mut rows: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut r = 0usize;
    let (qa, qb) = loop {
        if r as i64 > ROW_CAP {
            return Err(Error::CapExceeded(format!("no periodic state within {ROW_CAP} rows")));
        }
        if r % l == 0 {
            let q = r / l;
            if q > 0 && (0..k).any(|c| tops[c] != tau_e.index(q * k + c)) {
                return Err(Error::Compatibility(-(q as i64)));
            }
            let state = (tau_e.phase(q * k), tau_f.phase(q * l));
            if let Some(&qa) = seen.get(&state) {
                break (qa, q);
            }
            seen.insert(state, q);
        }
        let mut left = tau_f.index(r + l);
        let mut row = vec![(0, 0); k];
        let mut next = vec![0; k];
        for c in (0..k).rev() {
            let (bottom, right) = theta.apply(tops[c], left);
            row[c] = (tops[c], right);
            next[c] = bottom;
            left = right;
        }
        if left != tau_f.index(r) {
            return Err(Error::Compatibility(-((r / l) as i64)));
        }
        rows.push(row);
        tops = next;
        r += 1;
    };
    let (u, v) = repeat_words(tau_e, tau_f, k, l);
    if !commutes_raw(theta, &u.indices(), &v.indices()) {
        return Err(Error::NotCommuting { u: u.digits(), v: v.digits() });
    }
    Ok(SigmaStrip {
        k: k as i64,
        l: l as i64,
        rows,
        periodic_from: (qa * l) as i64,
        period: ((qb - qa) * l) as i64,
    })
}

/// Block tails for a type 3bii rep starting from (u0, v0): each next red block
/// is the first v (in lexicographic order) with theta'(u_q, v) = (u', v_q),
/// and the next blue block is that u'. Stops at the first repeated pair.
pub fn compatible_tails(theta: &Theta, u0: &Word, v0: &Word) -> Result<(TailSpec, TailSpec)> {
    nonempty(u0, "u0")?;
    nonempty(v0, "v0")?;
    let mut u = blue_indices(u0)?;
    let mut v = v0.expect_color(Color::Red)?;
    u0.check_range(theta)?;
    v0.check_range(theta)?;
    let l = v.len();
    let count = pair_count(1, theta.n(), 0, l).filter(|&c| c <= DEFAULT_TABULATION_CAP).ok_or_else(|| Error::CapExceeded(format!("{} red blocks of length {l}", theta.n())))?;
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut seen: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    let start = loop {
        if let Some(&q) = seen.get(&(u.clone(), v.clone())) {
            break q;
        }
        seen.insert((u.clone(), v.clone()), blocks.len());
        blocks.push((u.clone(), v.clone()));
        let next = (0..count).map(|x| decode_word(theta.n(), l, x)).find_map(|cand| {
            let (u2, v2) = theta_prime_raw(theta, &u, &cand);
            (v2 == v).then_some((u2, cand))
        });
        match next {
            Some((u2, v2)) => {
                u = u2;
                v = v2;
            }
            None => return Err(Error::Compatibility(-(blocks.len() as i64))),
        }
    };
    let cat = |r: &[(Vec<usize>, Vec<usize>)], blue: bool| -> Vec<usize> {
        r.iter().flat_map(|(a, b)| if blue { a.clone() } else { b.clone() }).collect()
    };
    let (pre, per) = blocks.split_at(start);
    Ok((
        TailSpec::new(Word::blue(&cat(pre, true)), Word::blue(&cat(per, true)))?,
        TailSpec::new(Word::red(&cat(pre, false)), Word::red(&cat(per, false)))?,
    ))
}

/// Type 3bii rep on Z^2/Z(k,-l) from block tails tau_e (blue) and tau_f
/// (red) satisfying f_{v_{d+1}} e_{u_d} = e_{u_{d+1}} f_{v_d}. Above the data
/// determined by the tails, the rows repeat from the topmost pair of equal
/// rows whose periodic continuation is consistent.
pub fn build_3bii(theta: &Theta, tau_e: &TailSpec, tau_f: &TailSpec, k: usize, l: usize, beta: Angle) -> Result<GroupConstructionRep> {
    let sig = sigma_strip_3bii(theta, tau_e, tau_f, k, l)?;
    let (ki, li) = (k as i64, l as i64);
    let lo = -sig.periodic_from - sig.period - li - 2;
    let hi = -li - 1;
    let row = |t: i64| -> Vec<(usize, usize)> {
        (0..ki)
            .map(|s| {
                let i = sig.at((s + 1, t)).expect("inside strip").0;
                let j = sig.at((s, t + 1)).expect("inside strip").1;
                (i, j)
            })
            .collect()
    };
    let all: Vec<Vec<(usize, usize)>> = (lo..=hi).map(row).collect();
    let group = QuotientGroup::from_gens(&[(ki, -li)]);
    let scalars = Scalars::Constant { alpha0: Angle::ZERO, beta0: beta.div(li) };
    for h in (lo + sig.period - 1..=hi).rev() {
        for h2 in (lo..h).rev() {
            if all[(h - lo) as usize] != all[(h2 - lo) as usize] {
                continue;
            }
            let rows = all[..=(h - lo) as usize].to_vec();
            let rep = GroupConstructionRep::new(
                theta.clone(),
                group.clone(),
                Domain::Strip { lo, hi: h, back: sig.period, fwd: h - h2, rows },
                scalars.clone(),
            )?;
            if rep.validate().is_ok() {
                return Ok(rep);
            }
        }
    }
    Err(Error::Invalid("no consistent forward extension".into()))
}

/// Symmetry group H of the labels, as a sublattice of Z^2 containing K. For
/// strips H is the eventual symmetry of the rows below the stored range,
/// and always contains the backward period (0, back).
pub fn symmetry_group(rep: &GroupConstructionRep) -> SymmetryGroup {
    let k = rep.kernel().clone();
    match &rep.domain {
        Domain::Full { .. } => {
            let els = rep.elements().expect("finite");
            let mut gens = k.basis().to_vec();
            for &h in &els {
                if els.iter().all(|&g| rep.labels(add(g, h)) == rep.labels(g)) {
                    gens.push(h);
                }
            }
            SymmetryGroup { lattice: Sublattice::from_gens(&gens), mode: SymmetryMode::Exact }
        }
        Domain::Strip { lo, hi, back, fwd, .. } => {
            let (a, b) = k.basis()[0];
            let mut gens = k.basis().to_vec();
            gens.push((0, *back));
            for hs in 0..a {
                for ht in 0..*back {
                    let h = (hs, ht);
                    let base = lo - 2 * back - ht - b.abs() - 2;
                    let ok = (base..base + back)
                        .all(|t| (0..a).all(|s| rep.labels(add((s, t), h)) == rep.labels((s, t))));
                    if ok {
                        gens.push(h);
                    }
                }
            }
            let periodic = (lo - back..=hi + fwd)
                .all(|t| (0..a).all(|s| rep.labels((s, t)) == rep.labels((s, t + back))));
            let mode = if periodic { SymmetryMode::Exact } else { SymmetryMode::Eventual { threshold: *lo } };
            SymmetryGroup { lattice: Sublattice::from_gens(&gens), mode }
        }
    }
}

pub fn is_irreducible(rep: &GroupConstructionRep) -> bool {
    symmetry_group(rep).lattice == *rep.kernel()
}

/// The character psi on K: psi(v) is the phase of the closed path of degree v.
pub fn scalar_character(rep: &GroupConstructionRep) -> Result<CharOnSublattice> {
    let k = rep.kernel().clone();
    let values: Vec<Angle> = match rep.scalars {
        Scalars::Constant { alpha0, beta0 } => {
            k.basis().iter().map(|&(a, b)| alpha0.times(a) + beta0.times(b)).collect()
        }
        Scalars::PerEdge { .. } => {
            let vals: Vec<Angle> = k.basis().iter().map(|&v| rep.path_phase((0, 0), v)).collect();
            if let [v1, v2] = k.basis() {
                if rep.path_phase((0, 0), add(*v1, *v2)) != vals[0] + vals[1] {
                    return Err(Error::CocycleViolation((0, 0)));
                }
            }
            vals
        }
    };
    Ok(CharOnSublattice::new(k, values))
}

/// Result of conjugating a per-edge rep to constant scalars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub rep: GroupConstructionRep,
    /// gamma[index_of(g)]: the diagonal phase applied to the basis vector at g.
    pub gamma: Vec<Angle>,
}

/// Conjugates by the diagonal unitary gamma_g = phi(g) - (phase of the path
/// from 0 to g), where phi is the canonical extension of psi; the resulting
/// scalars are the constants phi(1,0), phi(0,1). Constant input is returned
/// unchanged.
pub fn normalize_scalars(rep: &GroupConstructionRep) -> Result<Normalized> {
    rep.validate()?;
    if rep.constants().is_some() {
        let n = rep.group.order().unwrap_or(0) as usize;
        return Ok(Normalized { rep: rep.clone(), gamma: vec![Angle::ZERO; n] });
    }
    let psi = scalar_character(rep)?;
    let phi = psi.extend();
    let els = rep.elements()?;
    let mut gamma = vec![Angle::ZERO; els.len()];
    for &g in &els {
        gamma[rep.group.index_of(g)] = phi.eval(g) - rep.path_phase((0, 0), g);
    }
    let gam = |p: Point| gamma[rep.group.index_of(p)];
    for &g in &els {
        if rep.alpha_at(g) - gam(g) + gam(add(g, G1)) != phi.x || rep.beta_at(g) - gam(g) + gam(add(g, G2)) != phi.y {
            return Err(Error::CocycleViolation(g));
        }
    }
    let mut out = rep.clone();
    out.scalars = Scalars::Constant { alpha0: phi.x, beta0: phi.y };
    Ok(Normalized { rep: out, gamma })
}

/// Applies the diagonal phase gamma to a finite rep, producing per-edge scalars.
pub fn apply_gauge(rep: &GroupConstructionRep, gamma: &[Angle]) -> Result<GroupConstructionRep> {
    let els = rep.elements()?;
    if gamma.len() != els.len() {
        return Err(Error::MalformedDomain("one phase per coset".into()));
    }
    let gam = |p: Point| gamma[rep.group.index_of(p)];
    let mut alpha = vec![Angle::ZERO; els.len()];
    let mut beta = vec![Angle::ZERO; els.len()];
    for &g in &els {
        let x = rep.group.index_of(g);
        alpha[x] = rep.alpha_at(g) + gam(g) - gam(add(g, G1));
        beta[x] = rep.beta_at(g) + gam(g) - gam(add(g, G2));
    }
    let mut out = rep.clone();
    out.scalars = Scalars::PerEdge { alpha, beta };
    Ok(out)
}

/// Coset g_k of Z^2/H with the elements h1, h2 of H such that
/// g_k + (1,0) = g' + h1 and g_k + (0,1) = g'' + h2 for representatives g', g''.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub coset: Point,
    pub h1: Point,
    pub h2: Point,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummand {
    /// A character of Z^2 vanishing on K; only its restriction to H matters.
    pub chi: CharZ2,
    /// The character psi_chi on H; it restricts to psi on K.
    pub psi: CharOnSublattice,
    pub summand: GroupConstructionRep,
    pub corrections: Vec<Correction>,
}

/// The summands of a rep whose symmetry group H has infinite index over K,
/// indexed by characters of Z^2 vanishing on K = Z(a,b):
/// chi(t, r) = t * (-b', a') + r * (p/g, q/g) with g = gcd(a,b), a = g a',
/// b = g b', p a' + q b' = 1, t in Q/Z and r in 0..g. Characters that agree
/// on H give equivalent summands; each class is hit `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kernel: Sublattice,
    pub symmetry: Sublattice,
    pub mode: SymmetryMode,
    pub g: i64,
    pub direction: Point,
    pub bezout: Point,
    pub multiplicity: u64,
    /// The summand for chi = 0, on the finite group Z^2/H.
    pub base: GroupConstructionRep,
    alpha0: Angle,
    beta0: Angle,
}

impl FamilyDescriptor {
    pub fn character(&self, t: Angle, r: i64) -> CharZ2 {
        let (dx, dy) = self.direction;
        let (p, q) = self.bezout;
        CharZ2 {
            x: t.times(dx) + Angle::new(p * r, self.g),
            y: t.times(dy) + Angle::new(q * r, self.g),
        }
    }

    pub fn sample(&self, t: Angle, r: i64) -> DecompositionSummand {
        let chi = self.character(t, r);
        twisted_summand(&self.base, &self.symmetry, chi, self.alpha0, self.beta0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    Summands { symmetry: Sublattice, summands: Vec<DecompositionSummand> },
    Family(FamilyDescriptor),
}

/// Summand on Z^2/H with the labels of `base` and phases alpha0 + chi(h1),
/// beta0 + chi(h2).
fn twisted_summand(base: &GroupConstructionRep, h: &Sublattice, chi: CharZ2, alpha0: Angle, beta0: Angle) -> DecompositionSummand {
    let quotient = QuotientGroup::new(h.clone());
    let els = quotient.elements().expect("finite quotient");
    let mut alpha = vec![Angle::ZERO; els.len()];
    let mut beta = vec![Angle::ZERO; els.len()];
    let mut corrections = Vec::with_capacity(els.len());
    for &g in &els {
        let x = quotient.index_of(g);
        let g1 = add(g, G1);
        let g2 = add(g, G2);
        let h1 = sub(g1, quotient.reduce(g1));
        let h2 = sub(g2, quotient.reduce(g2));
        alpha[x] = alpha0 + chi.eval(h1);
        beta[x] = beta0 + chi.eval(h2);
        corrections.push(Correction { coset: g, h1, h2 });
    }
    let mut summand = base.clone();
    summand.scalars = Scalars::PerEdge { alpha, beta };
    let phi = CharZ2 { x: alpha0, y: beta0 };
    let psi = CharOnSublattice::new(h.clone(), h.basis().iter().map(|&v| phi.eval(v) + chi.eval(v)).collect());
    DecompositionSummand { chi, psi, summand, corrections }
}

/// The rep on Z^2/H carrying the (eventual) labels of `rep`.
fn quotient_rep(rep: &GroupConstructionRep, h: &Sublattice, alpha0: Angle, beta0: Angle) -> Result<GroupConstructionRep> {
    let quotient = QuotientGroup::new(h.clone());
    let els = quotient.elements()?;
    let mut imap = vec![0; els.len()];
    let mut jmap = vec![0; els.len()];
    for &g in &els {
        let x = quotient.index_of(g);
        let (i, j) = rep.labels(rep.deep(g));
        imap[x] = i;
        jmap[x] = j;
    }
    GroupConstructionRep::new(rep.theta.clone(), quotient, Domain::Full { imap, jmap }, Scalars::Constant { alpha0, beta0 })
}

/// Splits a constant-scalar rep along its symmetry group H: one irreducible
/// summand on Z^2/H for each character of H/K when that group is finite,
/// otherwise a parameterized family.
pub fn decompose(rep: &GroupConstructionRep) -> Result<Decomposition> {
    let (alpha0, beta0) = rep.constants().ok_or(Error::NonConstantScalars)?;
    let sym = symmetry_group(rep);
    let h = sym.lattice.clone();
    let base = quotient_rep(rep, &h, alpha0, beta0)?;
    let k = rep.kernel();
    if k.rank() == 2 {
        let mut seen = std::collections::BTreeSet::new();
        let mut summands = Vec::new();
        for chi in rep.group.characters()? {
            let key: Vec<Angle> = h.basis().iter().map(|&v| chi.eval(v)).collect();
            if seen.insert(key) {
                summands.push(twisted_summand(&base, &h, chi, alpha0, beta0));
            }
        }
        return Ok(Decomposition::Summands { symmetry: h, summands });
    }
    let (a, b) = k.basis()[0];
    let g = num_integer::gcd(a, b);
    let (a1, b1) = (a / g, b / g);
    let e = num_integer::Integer::extended_gcd(&a1, &b1);
    let (p, q) = (e.x * e.gcd, e.y * e.gcd);
    Ok(Decomposition::Family(FamilyDescriptor {
        kernel: k.clone(),
        symmetry: h.clone(),
        mode: sym.mode,
        g,
        direction: (-b1, a1),
        bezout: (p, q),
        multiplicity: h.index().expect("rank 2"),
        base,
        alpha0,
        beta0,
    }))
}

/// Unitary equivalence of finite reps: a color- and label-preserving
/// isomorphism of the graphs together with equal characters psi.
pub fn equivalent_reps(r1: &GroupConstructionRep, r2: &GroupConstructionRep) -> Result<bool> {
    if !r1.is_finite() || !r2.is_finite() {
        return Err(Error::InfiniteGroup);
    }
    if r1.theta != r2.theta || r1.kernel() != r2.kernel() {
        return Ok(false);
    }
    if scalar_character(r1)? != scalar_character(r2)? {
        return Ok(false);
    }
    let els1 = r1.elements()?;
    let els2 = r2.elements()?;
    'start: for &g0 in &els2 {
        let mut map: HashMap<usize, Point> = HashMap::new();
        let mut used: HashMap<usize, usize> = HashMap::new();
        let mut stack = vec![((0, 0), g0)];
        while let Some((x, y)) = stack.pop() {
            let (ix, iy) = (r1.group.index_of(x), r2.group.index_of(y));
            if let Some(&prev) = map.get(&ix) {
                if r2.group.index_of(prev) != iy {
                    continue 'start;
                }
                continue;
            }
            if used.insert(iy, ix).is_some() {
                continue 'start;
            }
            map.insert(ix, y);
            if r1.labels(x) != r2.labels(y) {
                continue 'start;
            }
            stack.push((r1.group.reduce(add(x, G1)), r2.group.reduce(add(y, G1))));
            stack.push((r1.group.reduce(add(x, G2)), r2.group.reduce(add(y, G2))));
        }
        if map.len() == els1.len() {
            return Ok(true);
        }
    }
    Ok(false)
}
