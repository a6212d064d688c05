//! Words in the semigroup generated by e_1..e_m and f_1..f_n subject to
//! e_i f_j = f_j' e_i' whenever theta(i,j) = (i',j').
//!
//! Words are written left to right and act right to left: the last letter
//! of a word is applied first. Indices are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ThetaFile", into = "ThetaFile")]
pub struct Theta {
    m: usize,
    n: usize,
    fwd: Vec<(usize, usize)>,
    inv: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaFile {
    pub m: usize,
    pub n: usize,
    pub relations: Vec<[usize; 4]>,
}

impl TryFrom<ThetaFile> for Theta {
    type Error = Error;
    fn try_from(f: ThetaFile) -> Result<Theta> {
        Theta::from_file(&f)
    }
}

impl From<Theta> for ThetaFile {
    fn from(t: Theta) -> ThetaFile {
        t.to_file()
    }
}

pub fn validate_theta(raw: &[[usize; 4]], m: usize, n: usize) -> Result<Theta> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid("m and n must be positive".into()));
    }
    let mut fwd = vec![None; m * n];
    let mut inv = vec![None; m * n];
    for &[i, j, i2, j2] in raw {
        if !(1..=m).contains(&i) || !(1..=m).contains(&i2) || !(1..=n).contains(&j) || !(1..=n).contains(&j2) {
            return Err(Error::OutOfRange(i, j, i2, j2));
        }
        let src = (i - 1) * n + (j - 1);
        let dst = (i2 - 1) * n + (j2 - 1);
        if fwd[src].is_some() {
            return Err(Error::DuplicateSource(i, j));
        }
        if inv[dst].is_some() {
            return Err(Error::DuplicateTarget(i2, j2));
        }
        fwd[src] = Some((i2, j2));
        inv[dst] = Some((i, j));
    }
    let mut f = Vec::with_capacity(m * n);
    let mut g = Vec::with_capacity(m * n);
    for idx in 0..m * n {
        match (fwd[idx], inv[idx]) {
            (Some(a), Some(b)) => {
                f.push(a);
                g.push(b);
            }
            (None, _) => return Err(Error::MissingPair(idx / n + 1, idx % n + 1)),
            (_, None) => unreachable!("bijection count mismatch"),
        }
    }
    Ok(Theta { m, n, fwd: f, inv: g })
}

impl Theta {
    pub fn identity(m: usize, n: usize) -> Theta {
        let raw: Vec<[usize; 4]> = (1..=m)
            .flat_map(|i| (1..=n).map(move |j| [i, j, i, j]))
            .collect();
        validate_theta(&raw, m, n).expect("identity is a bijection")
    }

    /// Each cycle `[a, b, c]` means theta(a) = b, theta(b) = c, theta(c) = a;
    /// pairs not mentioned are fixed.
    pub fn from_cycles(m: usize, n: usize, cycles: &[&[(usize, usize)]]) -> Result<Theta> {
        let mut map: Vec<(usize, usize)> = (0..m * n).map(|x| (x / n + 1, x % n + 1)).collect();
        for cyc in cycles {
            for (p, &a) in cyc.iter().enumerate() {
                let b = cyc[(p + 1) % cyc.len()];
                if a.0 == 0 || a.0 > m || a.1 == 0 || a.1 > n {
                    return Err(Error::OutOfRange(a.0, a.1, b.0, b.1));
                }
                map[(a.0 - 1) * n + (a.1 - 1)] = b;
            }
        }
        let raw: Vec<[usize; 4]> = map
            .iter()
            .enumerate()
            .map(|(x, &(i2, j2))| [x / n + 1, x % n + 1, i2, j2])
            .collect();
        validate_theta(&raw, m, n)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The permutation obtained by exchanging the roles of the e's and f's:
    /// e_a f_b = f_b' e_a' becomes E_b' F_a' = F_a E_b.
    pub fn swapped(&self) -> Theta {
        let raw: Vec<[usize; 4]> = self.relations().iter().map(|&[i, j, i2, j2]| [j2, i2, j, i]).collect();
        validate_theta(&raw, self.n, self.m).expect("swap of a bijection")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, i: usize, j: usize) -> (usize, usize) {
        self.fwd[(i - 1) * self.n + (j - 1)]
    }

    pub fn apply_inv(&self, i: usize, j: usize) -> (usize, usize) {
        self.inv[(i - 1) * self.n + (j - 1)]
    }

    pub fn relations(&self) -> Vec<[usize; 4]> {
        self.fwd
            .iter()
            .enumerate()
            .map(|(x, &(i2, j2))| [x / self.n + 1, x % self.n + 1, i2, j2])
            .collect()
    }

    /// Cycles of theta as a permutation of pairs, each starting at its
    /// lexicographically smallest pair, listed in order of that pair.
    pub fn cycles(&self) -> Vec<Vec<(usize, usize)>> {
        let mut seen = vec![false; self.m * self.n];
        let mut out = Vec::new();
        for x in 0..self.m * self.n {
            if seen[x] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut cur = (x / self.n + 1, x % self.n + 1);
            loop {
                let idx = (cur.0 - 1) * self.n + (cur.1 - 1);
                if seen[idx] {
                    break;
                }
                seen[idx] = true;
                cyc.push(cur);
                cur = self.apply(cur.0, cur.1);
            }
            out.push(cyc);
        }
        out
    }

    pub fn to_file(&self) -> ThetaFile {
        ThetaFile { m: self.m, n: self.n, relations: self.relations() }
    }

    pub fn from_file(f: &ThetaFile) -> Result<Theta> {
        validate_theta(&f.relations, f.m, f.n)
    }

    pub fn from_toml_str(s: &str) -> Result<Theta> {
        let f: ThetaFile = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Theta::from_file(&f)
    }

    pub fn from_json_str(s: &str) -> Result<Theta> {
        let f: ThetaFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Theta::from_file(&f)
    }

    /// Accepts either TOML or JSON.
    pub fn parse(s: &str) -> Result<Theta> {
        if s.trim_start().starts_with('{') {
            Theta::from_json_str(s)
        } else {
            Theta::from_toml_str(s)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_file()).expect("theta file serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub color: Color,
    pub index: usize,
}

impl Letter {
    pub fn e(i: usize) -> Letter {
        Letter { color: Color::Blue, index: i }
    }

    pub fn f(j: usize) -> Letter {
        Letter { color: Color::Red, index: j }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.color {
            Color::Blue => write!(f, "e{}", self.index),
            Color::Red => write!(f, "f{}", self.index),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Degree {
    pub k: usize,
    pub l: usize,
}

impl std::ops::Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        Degree { k: self.k + o.k, l: self.l + o.l }
    }
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains('.') || s.contains(',') {
        s.split(['.', ','])
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
            .collect()
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
            })
            .collect()
    }
}

fn digits(xs: &[usize]) -> String {
    if xs.iter().all(|&x| x < 10) {
        xs.iter().map(|x| x.to_string()).collect()
    } else {
        xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn blue(idx: &[usize]) -> Word {
        Word(idx.iter().map(|&i| Letter::e(i)).collect())
    }

    pub fn red(idx: &[usize]) -> Word {
        Word(idx.iter().map(|&j| Letter::f(j)).collect())
    }

    /// Digit string such as "1121212" (or dot separated when indices exceed 9).
    pub fn parse_blue(s: &str) -> Result<Word> {
        Ok(Word::blue(&parse_indices(s)?))
    }

    pub fn parse_red(s: &str) -> Result<Word> {
        Ok(Word::red(&parse_indices(s)?))
    }

    /// Dot separated letters such as "e1.f2.e2".
    pub fn parse_mixed(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(Word::empty());
        }
        s.split('.')
            .map(|tok| {
                let tok = tok.trim();
                let (c, rest) = tok.split_at(tok.char_indices().nth(1).map(|x| x.0).unwrap_or(tok.len()));
                let idx: usize = rest.parse().map_err(|_| Error::Parse(format!("bad letter {tok:?}")))?;
                match c {
                    "e" => Ok(Letter::e(idx)),
                    "f" => Ok(Letter::f(idx)),
                    _ => Err(Error::Parse(format!("bad letter {tok:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> Degree {
        let k = self.0.iter().filter(|x| x.color == Color::Blue).count();
        Degree { k, l: self.0.len() - k }
    }

    pub fn pattern(&self) -> Vec<Color> {
        self.0.iter().map(|x| x.color).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn check_range(&self, theta: &Theta) -> Result<()> {
        for x in &self.0 {
            let max = match x.color {
                Color::Blue => theta.m(),
                Color::Red => theta.n(),
            };
            if x.index == 0 || x.index > max {
                return Err(Error::LetterRange { color: x.color.name(), index: x.index, max });
            }
        }
        Ok(())
    }

    pub fn is_color(&self, c: Color) -> bool {
        self.0.iter().all(|x| x.color == c)
    }

    /// Indices of a single-colored word, left to right.
    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|x| x.index).collect()
    }

    pub fn expect_color(&self, c: Color) -> Result<Vec<usize>> {
        if self.is_color(c) {
            Ok(self.indices())
        } else {
            Err(Error::ColorViolation { expected: c.name(), found: self.to_string() })
        }
    }

    /// Digit rendering of a single-colored word.
    pub fn digits(&self) -> String {
        digits(&self.indices())
    }

    /// For u = i_{k-1} ... i_0, the letter i_s.
    pub fn letter_from_right(&self, s: usize) -> Letter {
        self.0[self.0.len() - 1 - s]
    }

    /// u(s,0] = i_{s-1} ... i_0.
    pub fn right_part(&self, s: usize) -> Word {
        Word(self.0[self.0.len() - s..].to_vec())
    }

    /// u^{(s)} = i_{s-1} ... i_0 i_{k-1} ... i_s.
    pub fn rotation(&self, s: usize) -> Word {
        let k = self.0.len();
        let mut v = self.0[k - s..].to_vec();
        v.extend_from_slice(&self.0[..k - s]);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Word::parse_mixed(s)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse_mixed(&s).map_err(serde::de::Error::custom)
    }
}

/// Swap the adjacent letters at p, p+1 (one blue, one red) using the relations.
fn swap_adjacent(theta: &Theta, w: &mut [Letter], p: usize) {
    let (a, b) = (w[p], w[p + 1]);
    match (a.color, b.color) {
        (Color::Blue, Color::Red) => {
            let (i2, j2) = theta.apply(a.index, b.index);
            w[p] = Letter::f(j2);
            w[p + 1] = Letter::e(i2);
        }
        (Color::Red, Color::Blue) => {
            let (i, j) = theta.apply_inv(b.index, a.index);
            w[p] = Letter::e(i);
            w[p + 1] = Letter::f(j);
        }
        _ => unreachable!("swap of equal colors"),
    }
}

/// The unique word equal to `w` whose color sequence is `pattern`.
pub fn refactor(theta: &Theta, w: &Word, pattern: &[Color]) -> Result<Word> {
    let d = w.degree();
    let pb = pattern.iter().filter(|c| **c == Color::Blue).count();
    let pd = (pb, pattern.len() - pb);
    if pd != (d.k, d.l) {
        return Err(Error::PatternMismatch { pattern: pd, degree: (d.k, d.l) });
    }
    let blue_slots: Vec<usize> = (0..pattern.len()).filter(|&p| pattern[p] == Color::Blue).collect();
    let red_slots: Vec<usize> = (0..pattern.len()).filter(|&p| pattern[p] == Color::Red).collect();
    let (mut nb, mut nr) = (0, 0);
    let mut target: Vec<usize> = Vec::with_capacity(w.len());
    for x in &w.0 {
        match x.color {
            Color::Blue => {
                target.push(blue_slots[nb]);
                nb += 1;
            }
            Color::Red => {
                target.push(red_slots[nr]);
                nr += 1;
            }
        }
    }
    let mut letters = w.0.clone();
    let len = letters.len();
    if len < 2 {
        return Ok(Word(letters));
    }
    loop {
        let mut moved = false;
        for p in (0..len - 1).rev() {
            if target[p] > target[p + 1] {
                swap_adjacent(theta, &mut letters, p);
                target.swap(p, p + 1);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(Word(letters))
}

pub fn e_first(d: Degree) -> Vec<Color> {
    let mut p = vec![Color::Blue; d.k];
    p.extend(std::iter::repeat_n(Color::Red, d.l));
    p
}

pub fn f_first(d: Degree) -> Vec<Color> {
    let mut p = vec![Color::Red; d.l];
    p.extend(std::iter::repeat_n(Color::Blue, d.k));
    p
}

pub fn normal_form(theta: &Theta, w: &Word) -> Word {
    refactor(theta, w, &e_first(w.degree())).expect("e-first pattern matches degree")
}

pub fn multiply(theta: &Theta, a: &Word, b: &Word) -> Word {
    normal_form(theta, &a.concat(b))
}

/// Letter-level core of theta': e_u f_v = f_{v'} e_{u'}.
pub fn theta_prime_raw(theta: &Theta, u: &[usize], v: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut blue = u.to_vec();
    let mut red_out = Vec::with_capacity(v.len());
    for &j0 in v {
        let mut j = j0;
        for pos in (0..blue.len()).rev() {
            let (i2, j2) = theta.apply(blue[pos], j);
            blue[pos] = i2;
            j = j2;
        }
        red_out.push(j);
    }
    (blue, red_out)
}

/// Inverse of theta': f_{v'} e_{u'} = e_u f_v.
pub fn theta_prime_inv_raw(theta: &Theta, u2: &[usize], v2: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut blue = u2.to_vec();
    let mut red_out = vec![0; v2.len()];
    for (r, &j0) in v2.iter().enumerate().rev() {
        let mut j = j0;
        for b in blue.iter_mut() {
            let (i, jj) = theta.apply_inv(*b, j);
            *b = i;
            j = jj;
        }
        red_out[r] = j;
    }
    (blue, red_out)
}

pub fn theta_prime_apply(theta: &Theta, u: &Word, v: &Word) -> Result<(Word, Word)> {
    let ui = u.expect_color(Color::Blue)?;
    let vi = v.expect_color(Color::Red)?;
    u.check_range(theta)?;
    v.check_range(theta)?;
    let (a, b) = theta_prime_raw(theta, &ui, &vi);
    Ok((Word::blue(&a), Word::red(&b)))
}

pub fn theta_prime_cycle(theta: &Theta, u: &Word, v: &Word, cap: usize) -> Result<Vec<(Word, Word)>> {
    let ui = u.expect_color(Color::Blue)?;
    let vi = v.expect_color(Color::Red)?;
    u.check_range(theta)?;
    v.check_range(theta)?;
    let start = (ui, vi);
    let mut out = vec![(Word::blue(&start.0), Word::red(&start.1))];
    let mut cur = theta_prime_raw(theta, &start.0, &start.1);
    while cur != start {
        if out.len() >= cap {
            return Err(Error::CapExceeded(format!("theta' cycle longer than {cap}")));
        }
        out.push((Word::blue(&cur.0), Word::red(&cur.1)));
        cur = theta_prime_raw(theta, &cur.0, &cur.1);
    }
    Ok(out)
}

pub fn commutes(theta: &Theta, u: &Word, v: &Word) -> Result<bool> {
    let (a, b) = theta_prime_apply(theta, u, v)?;
    Ok(&a == u && &b == v)
}

pub fn commutes_raw(theta: &Theta, u: &[usize], v: &[usize]) -> bool {
    let (a, b) = theta_prime_raw(theta, u, v);
    a == u && b == v
}

pub const DEFAULT_TABULATION_CAP: usize = 1_000_000;

/// Pair encoding used by tabulations: u and v read as base-m and base-n
/// numbers (leftmost letter most significant, digits shifted to 0-based).
pub fn encode_pair(m: usize, n: usize, u: &[usize], v: &[usize]) -> usize {
    let a = u.iter().fold(0usize, |acc, &i| acc * m + (i - 1));
    let b = v.iter().fold(0usize, |acc, &j| acc * n + (j - 1));
    a * n.pow(v.len() as u32) + b
}

pub fn decode_word(base: usize, len: usize, mut x: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for p in (0..len).rev() {
        out[p] = x % base + 1;
        x /= base;
    }
    out
}

pub fn decode_pair(m: usize, n: usize, k: usize, l: usize, x: usize) -> (Vec<usize>, Vec<usize>) {
    let nl = n.pow(l as u32);
    (decode_word(m, k, x / nl), decode_word(n, l, x % nl))
}

pub fn pair_count(m: usize, n: usize, k: usize, l: usize) -> Option<usize> {
    let a = m.checked_pow(k as u32)?;
    let b = n.checked_pow(l as u32)?;
    a.checked_mul(b)
}

/// Full table of theta' on blue words of length k and red words of length l.
#[derive(Clone, Debug)]
pub struct ThetaPrimeTable {
    pub k: usize,
    pub l: usize,
    pub image: Vec<usize>,
}

pub fn tabulate_theta_prime(theta: &Theta, k: usize, l: usize, cap: usize) -> Result<ThetaPrimeTable> {
    let (m, n) = (theta.m(), theta.n());
    let total = pair_count(m, n, k, l)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::CapExceeded(format!("{m}^{k} * {n}^{l} pairs exceeds cap {cap}")))?;
    let image = (0..total)
        .map(|x| {
            let (u, v) = decode_pair(m, n, k, l, x);
            let (a, b) = theta_prime_raw(theta, &u, &v);
            encode_pair(m, n, &a, &b)
        })
        .collect();
    Ok(ThetaPrimeTable { k, l, image })
}

impl ThetaPrimeTable {
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        for &y in &self.image {
            if y >= seen.len() || seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    /// Cycle lengths, one entry per cycle, in order of smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().iter().map(|c| c.len()).collect()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for x in 0..self.image.len() {
            if seen[x] {
                continue;
            }
            let mut c = Vec::new();
            let mut y = x;
            while !seen[y] {
                seen[y] = true;
                c.push(y);
                y = self.image[y];
            }
            out.push(c);
        }
        out
    }
}
