//! Eventually periodic infinite words and the Sigma data of an inductive
//! tail: the labels (i_{s,t}, j_{s,t}) for s,t <= 0, where i_{s,t} labels
//! the blue edge (s-1,t) -> (s,t) and j_{s,t} the red edge (s,t-1) -> (s,t).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Point, Result};
use crate::lattice::Sublattice;
use crate::semigroup::{Color, Letter, Theta, Word};

/// An infinite word given as preperiod followed by a repeated period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TailFile", into = "TailFile")]
pub struct TailSpec {
    pub preperiod: Word,
    pub period: Word,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailFile {
    pub preperiod: String,
    pub period: String,
    /// Set for pure-color tails written as digit strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
}

impl TryFrom<TailFile> for TailSpec {
    type Error = Error;
    fn try_from(f: TailFile) -> Result<TailSpec> {
        match f.color {
            Some(Color::Blue) => TailSpec::blue(&f.preperiod, &f.period),
            Some(Color::Red) => TailSpec::red(&f.preperiod, &f.period),
            None => TailSpec::new(Word::parse_mixed(&f.preperiod)?, Word::parse_mixed(&f.period)?),
        }
    }
}

impl From<TailSpec> for TailFile {
    fn from(t: TailSpec) -> TailFile {
        TailFile { preperiod: t.preperiod.to_string(), period: t.period.to_string(), color: None }
    }
}

impl TailSpec {
    pub fn new(preperiod: Word, period: Word) -> Result<TailSpec> {
        if period.is_empty() {
            return Err(Error::Invalid("tail period must be nonempty".into()));
        }
        Ok(TailSpec { preperiod, period })
    }

    pub fn blue(pre: &str, per: &str) -> Result<TailSpec> {
        TailSpec::new(Word::parse_blue(pre)?, Word::parse_blue(per)?)
    }

    pub fn red(pre: &str, per: &str) -> Result<TailSpec> {
        TailSpec::new(Word::parse_red(pre)?, Word::parse_red(per)?)
    }

    /// Alternating tail e_{i0} f_{j0} e_{i1} f_{j1} ... from pair lists.
    pub fn alternating(pre: &[(usize, usize)], per: &[(usize, usize)]) -> Result<TailSpec> {
        let w = |ps: &[(usize, usize)]| Word(ps.iter().flat_map(|&(i, j)| [Letter::e(i), Letter::f(j)]).collect());
        TailSpec::new(w(pre), w(per))
    }

    pub fn letter(&self, n: usize) -> Letter {
        let p = self.preperiod.len();
        if n < p {
            self.preperiod.letters()[n]
        } else {
            self.period.letters()[(n - p) % self.period.len()]
        }
    }

    pub fn index(&self, n: usize) -> usize {
        self.letter(n).index
    }

    /// Position modulo the eventual period: equal phases have equal futures.
    pub fn phase(&self, n: usize) -> usize {
        let p = self.preperiod.len();
        if n < p {
            n
        } else {
            p + (n - p) % self.period.len()
        }
    }

    pub fn indices(&self, start: usize, len: usize) -> Vec<usize> {
        (start..start + len).map(|n| self.index(n)).collect()
    }

    pub fn check_color(&self, c: Color) -> Result<()> {
        self.preperiod.expect_color(c)?;
        self.period.expect_color(c)?;
        Ok(())
    }

    pub fn check_range(&self, theta: &Theta) -> Result<()> {
        self.preperiod.check_range(theta)?;
        self.period.check_range(theta)
    }

    /// Checks the e,f,e,f,... shape; returns (preperiod pairs, period pairs).
    pub fn check_alternating(&self) -> Result<(usize, usize)> {
        let ok = |w: &Word| {
            w.len() % 2 == 0
                && w.letters().iter().enumerate().all(|(n, x)| {
                    x.color == if n % 2 == 0 { Color::Blue } else { Color::Red }
                })
        };
        if !ok(&self.preperiod) || !ok(&self.period) {
            return Err(Error::ColorViolation {
                expected: "alternating e,f",
                found: format!("{} ({})", self.preperiod, self.period),
            });
        }
        Ok((self.preperiod.len() / 2, self.period.len() / 2))
    }

    /// The pair (i_n, j_n) of an alternating tail.
    pub fn pair(&self, n: usize) -> (usize, usize) {
        (self.index(2 * n), self.index(2 * n + 1))
    }
}

/// Square grid indexed by (s,t) in [lo,hi]^2.
#[derive(Clone, Debug)]
struct Grid {
    lo: i64,
    side: usize,
    cells: Vec<Option<usize>>,
}

impl Grid {
    fn new(lo: i64, hi: i64) -> Grid {
        let side = (hi - lo + 1) as usize;
        Grid { lo, side, cells: vec![None; side * side] }
    }

    fn idx(&self, (s, t): Point) -> usize {
        (s - self.lo) as usize * self.side + (t - self.lo) as usize
    }

    fn get(&self, p: Point) -> usize {
        self.cells[self.idx(p)].unwrap_or_else(|| panic!("sigma entry {p:?} not computed"))
    }

    fn set(&mut self, p: Point, v: usize) {
        let k = self.idx(p);
        self.cells[k] = Some(v);
    }
}

/// The labels (i_{s,t}, j_{s,t}) on the rectangle -width <= s <= 0, -height <= t <= 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaWindow {
    pub width: usize,
    pub height: usize,
    /// `i[a][b]` is i_{-a,-b}.
    pub i: Vec<Vec<usize>>,
    pub j: Vec<Vec<usize>>,
}

impl SigmaWindow {
    pub fn i_at(&self, (s, t): Point) -> usize {
        self.i[(-s) as usize][(-t) as usize]
    }

    pub fn j_at(&self, (s, t): Point) -> usize {
        self.j[(-s) as usize][(-t) as usize]
    }

    pub fn contains(&self, (s, t): Point) -> bool {
        s <= 0 && t <= 0 && -s <= self.width as i64 && -t <= self.height as i64
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..=self.width as i64).flat_map(move |a| (0..=self.height as i64).map(move |b| (-a, -b)))
    }

    /// Every cell inside the window satisfies theta(top, left) = (bottom, right).
    pub fn check_cells(&self, theta: &Theta) -> Result<()> {
        for (s, t) in self.points() {
            if -s >= self.width as i64 || -t >= self.height as i64 {
                continue;
            }
            // cell with corners (s-1,t-1) and (s,t)
            let top = self.i_at((s, t));
            let left = self.j_at((s - 1, t));
            let bottom = self.i_at((s, t - 1));
            let right = self.j_at((s, t));
            if theta.apply(top, left) != (bottom, right) {
                return Err(Error::InconsistentCommutation((s, t)));
            }
        }
        Ok(())
    }
}

/// Sigma data of an alternating tail on a width x height window, computed by
/// propagating the commutation relations away from the diagonal path
/// i_{s,s} = i_{|s|}, j_{s-1,s} = j_{|s|}.
pub fn build_inductive_window(theta: &Theta, tau: &TailSpec, width: usize, height: usize) -> Result<SigmaWindow> {
    tau.check_alternating()?;
    tau.check_range(theta)?;
    let n = width.max(height) as i64;
    let mut gi = Grid::new(-n - 1, 0);
    let mut gj = Grid::new(-n - 1, 0);
    for s in -n..=0 {
        let (i, j) = tau.pair((-s) as usize);
        gi.set((s, s), i);
        gj.set((s - 1, s), j);
    }
    // cells C(s,t) with corners (s-1,t-1), (s,t): theta(i[s,t], j[s-1,t]) = (i[s,t-1], j[s,t])
    for d in 0..=n {
        for s in (-n + d)..=0 {
            let t = s - d;
            let (b, r) = theta.apply(gi.get((s, t)), gj.get((s - 1, t)));
            gi.set((s, t - 1), b);
            gj.set((s, t), r);
        }
    }
    for d in 1..=n {
        for s in -n..=(-d) {
            let t = s + d;
            let (top, left) = theta.apply_inv(gi.get((s, t - 1)), gj.get((s, t)));
            gi.set((s, t), top);
            gj.set((s - 1, t), left);
        }
    }
    let grab = |g: &Grid| -> Vec<Vec<usize>> {
        (0..=width as i64)
            .map(|a| (0..=height as i64).map(|b| g.get((-a, -b))).collect())
            .collect()
    };
    Ok(SigmaWindow { width, height, i: grab(&gi), j: grab(&gj) })
}

/// Nonzero shifts (p,q) with |p|,|q| <= radius such that the window data at
/// (s,t) and (s+p,t+q) agree wherever both points lie in the window and
/// (when a threshold is given) both have coordinates <= threshold.
pub fn window_symmetry(w: &SigmaWindow, radius: i64, threshold: Option<i64>) -> Vec<Point> {
    let inside = |p: Point| w.contains(p) && threshold.is_none_or(|th| p.0 <= th && p.1 <= th);
    let mut out = Vec::new();
    for p in -radius..=radius {
        for q in -radius..=radius {
            if (p, q) == (0, 0) {
                continue;
            }
            let mut overlap = 0usize;
            let agrees = w.points().all(|a| {
                let b = (a.0 + p, a.1 + q);
                if !inside(a) || !inside(b) {
                    return true;
                }
                overlap += 1;
                w.i_at(a) == w.i_at(b) && w.j_at(a) == w.j_at(b)
            });
            if agrees && overlap > 0 {
                out.push((p, q));
            }
        }
    }
    out
}

/// How a symmetry lattice was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryMode {
    /// Holds at every point of the group.
    Exact,
    /// Holds for all points with coordinates at most `threshold`.
    Eventual { threshold: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub lattice: Sublattice,
    pub mode: SymmetryMode,
}

/// Eventual symmetry lattice of Sigma(tau) for an eventually periodic
/// alternating tail with P preperiod pairs and Q period pairs. The window has
/// side `horizon`; it must be at least P + 2Q.
pub fn tail_symmetry(theta: &Theta, tau: &TailSpec, horizon: usize) -> Result<SymmetryGroup> {
    let (p, q) = tau.check_alternating()?;
    let bound = p + 2 * q;
    if horizon < bound {
        return Err(Error::Horizon { horizon, bound });
    }
    let w = build_inductive_window(theta, tau, horizon, horizon)?;
    let threshold = -(p as i64);
    let radius = ((horizon - p) / 2).max(1) as i64;
    let mut gens = window_symmetry(&w, radius, Some(threshold));
    // beyond the preperiod the diagonal repeats every q pairs
    gens.push((q as i64, q as i64));
    Ok(SymmetryGroup { lattice: Sublattice::from_gens(&gens), mode: SymmetryMode::Eventual { threshold } })
}
