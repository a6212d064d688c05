//! Two-colored labeled graphs of atomic representations: vertices are basis
//! vectors, a blue edge x -> y with index i means e_i maps x to a multiple
//! of y, and red edges do the same for the f_j.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Point, Result};
use crate::lattice::Angle;
use crate::reps::{Domain, GroupConstructionRep};
use crate::semigroup::{commutes, normal_form, Color, Letter, Theta, Word};
use crate::tails::SigmaWindow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub color: Color,
    pub index: usize,
    pub phase: Angle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    /// Part of the coinvariant subspace the graph was built from.
    pub original: bool,
    /// Degree invariants may fail here because of truncation.
    pub frontier: bool,
}

fn ci(c: Color) -> usize {
    match c {
        Color::Blue => 0,
        Color::Red => 1,
    }
}

fn other(c: Color) -> Color {
    match c {
        Color::Blue => Color::Red,
        Color::Red => Color::Blue,
    }
}

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphFile {
    version: u32,
    m: usize,
    n: usize,
    base: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct RepGraph {
    m: usize,
    n: usize,
    base: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out: Vec<[Vec<Option<usize>>; 2]>,
    inc: Vec<[Vec<usize>; 2]>,
}

impl TryFrom<GraphFile> for RepGraph {
    type Error = Error;
    fn try_from(f: GraphFile) -> Result<RepGraph> {
        if f.version != GRAPH_FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported graph format version {}", f.version)));
        }
        let mut g = RepGraph::new(f.m, f.n);
        for v in f.vertices {
            let id = g.add_vertex(v.name, v.original);
            g.vertices[id].frontier = v.frontier;
        }
        for e in f.edges {
            let max = if e.color == Color::Blue { f.m } else { f.n };
            if e.src >= g.len() || e.dst >= g.len() || e.index == 0 || e.index > max {
                return Err(Error::Parse(format!("edge {e:?} out of range")));
            }
            g.add_edge(e.src, e.dst, e.color, e.index, e.phase);
        }
        if f.base >= g.len().max(1) {
            return Err(Error::Parse("base vertex out of range".into()));
        }
        g.base = f.base;
        Ok(g)
    }
}

impl From<RepGraph> for GraphFile {
    fn from(g: RepGraph) -> GraphFile {
        GraphFile { version: GRAPH_FORMAT_VERSION, m: g.m, n: g.n, base: g.base, vertices: g.vertices, edges: g.edges }
    }
}

impl RepGraph {
    pub fn new(m: usize, n: usize) -> RepGraph {
        RepGraph { m, n, base: 0, vertices: Vec::new(), edges: Vec::new(), out: Vec::new(), inc: Vec::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn set_base(&mut self, v: usize) {
        self.base = v;
    }

    pub fn set_frontier(&mut self, v: usize, on: bool) {
        self.vertices[v].frontier = on;
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    fn width(&self, c: Color) -> usize {
        match c {
            Color::Blue => self.m,
            Color::Red => self.n,
        }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, original: bool) -> usize {
        self.vertices.push(Vertex { name: name.into(), original, frontier: false });
        self.out.push([vec![None; self.m], vec![None; self.n]]);
        self.inc.push([Vec::new(), Vec::new()]);
        self.vertices.len() - 1
    }

    /// Adds an edge; duplicates are kept so that `verify` can report them.
    pub fn add_edge(&mut self, src: usize, dst: usize, color: Color, index: usize, phase: Angle) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { src, dst, color, index, phase });
        let slot = &mut self.out[src][ci(color)][index - 1];
        if slot.is_none() {
            *slot = Some(id);
        }
        self.inc[dst][ci(color)].push(id);
        id
    }

    pub fn out_edge(&self, v: usize, c: Color, index: usize) -> Option<&Edge> {
        self.out[v][ci(c)][index - 1].map(|e| &self.edges[e])
    }

    pub fn in_edges(&self, v: usize, c: Color) -> impl Iterator<Item = &Edge> {
        self.inc[v][ci(c)].iter().map(|&e| &self.edges[e])
    }

    /// The incoming edge of color c, when there is exactly one.
    pub fn in_edge(&self, v: usize, c: Color) -> Option<&Edge> {
        match self.inc[v][ci(c)].as_slice() {
            [e] => Some(&self.edges[*e]),
            _ => None,
        }
    }

    /// Applies a word (rightmost letter first) starting at v.
    pub fn follow(&self, v: usize, w: &Word) -> Option<usize> {
        let mut x = v;
        for l in w.letters().iter().rev() {
            x = self.out_edge(x, l.color, l.index)?.dst;
        }
        Some(x)
    }

    /// Induced subgraph on the kept vertices, renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> RepGraph {
        let mut map = vec![usize::MAX; self.len()];
        let mut g = RepGraph::new(self.m, self.n);
        for (v, info) in self.vertices.iter().enumerate() {
            if keep[v] {
                map[v] = g.add_vertex(info.name.clone(), info.original);
                g.vertices[map[v]].frontier = info.frontier;
            }
        }
        for e in &self.edges {
            if keep[e.src] && keep[e.dst] {
                g.add_edge(map[e.src], map[e.dst], e.color, e.index, e.phase);
            }
        }
        if keep.get(self.base).copied().unwrap_or(false) {
            g.base = map[self.base];
        }
        g
    }

    /// The subgraph on the original vertices.
    pub fn compress(&self) -> RepGraph {
        let keep: Vec<bool> = self.vertices.iter().map(|v| v.original).collect();
        let mut g = self.restrict(&keep);
        for v in g.vertices.iter_mut() {
            v.frontier = false;
        }
        g
    }

    /// The same graph read as a representation of the color-swapped semigroup.
    pub fn swap_colors(&self) -> RepGraph {
        let mut g = RepGraph::new(self.n, self.m);
        for v in &self.vertices {
            let id = g.add_vertex(v.name.clone(), v.original);
            g.vertices[id].frontier = v.frontier;
        }
        for e in &self.edges {
            g.add_edge(e.src, e.dst, other(e.color), e.index, e.phase);
        }
        g.base = self.base;
        g
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<RepGraph> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph rep {\n");
        for (v, info) in self.vertices.iter().enumerate() {
            let shape = if info.original { "doublecircle" } else { "circle" };
            let style = if info.frontier { ", style=dashed" } else { "" };
            let _ = writeln!(s, "  v{v} [label=\"{}\", shape={shape}{style}];", info.name.replace('"', "\\\""));
        }
        for e in &self.edges {
            let (color, tag) = match e.color {
                Color::Blue => ("blue", "e"),
                Color::Red => ("red", "f"),
            };
            let phase = if e.phase.is_zero() { String::new() } else { format!(" @{}", e.phase) };
            let _ = writeln!(s, "  v{} -> v{} [color={color}, label=\"{tag}:{}{phase}\"];", e.src, e.dst, e.index);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Export {
    Dot,
    Json,
}

pub fn export(g: &RepGraph, format: Export) -> String {
    match format {
        Export::Dot => g.to_dot(),
        Export::Json => g.to_json(),
    }
}

fn point_name((s, t): Point) -> String {
    format!("({s},{t})")
}

/// Graph of a group-construction rep. Finite groups give every coset; strip
/// domains give the rows `window.0..=window.1`, with edges leaving the
/// window dropped and the cut vertices marked as frontier. The base vertex
/// is (0,0), or (0, middle row) for strips.
pub fn graph_of(rep: &GroupConstructionRep, window: Option<(i64, i64)>) -> RepGraph {
    let (m, n) = (rep.theta.m(), rep.theta.n());
    let mut g = RepGraph::new(m, n);
    let pts: Vec<Point> = match &rep.domain {
        Domain::Full { .. } => rep.elements().expect("finite"),
        Domain::Strip { lo, hi, .. } => {
            let (t0, t1) = window.unwrap_or((*lo, *hi));
            let a = rep.kernel().basis()[0].0;
            (t0..=t1).flat_map(|t| (0..a).map(move |s| (s, t))).collect()
        }
    };
    let mut ids: HashMap<Point, usize> = HashMap::new();
    for &p in &pts {
        ids.insert(p, g.add_vertex(point_name(p), true));
    }
    for &p in &pts {
        let (i, j) = rep.labels(p);
        let src = ids[&p];
        if let Some(&dst) = ids.get(&rep.group.reduce((p.0 + 1, p.1))) {
            g.add_edge(src, dst, Color::Blue, i, rep.alpha_at(p));
        }
        if let Some(&dst) = ids.get(&rep.group.reduce((p.0, p.1 + 1))) {
            g.add_edge(src, dst, Color::Red, j, rep.beta_at(p));
        }
    }
    mark_incomplete(&mut g);
    if let Domain::Strip { .. } = rep.domain {
        let (t0, t1) = (pts[0].1, pts[pts.len() - 1].1);
        g.base = ids[&(0, t0 + (t1 - t0) / 2)];
    }
    g
}

/// Graph of a Sigma window: vertices (s,t), blue edges (s-1,t) -> (s,t)
/// labeled i_{s,t}, red edges (s,t-1) -> (s,t) labeled j_{s,t}. The base
/// vertex is the center of the window.
pub fn graph_of_window(theta: &Theta, w: &SigmaWindow) -> RepGraph {
    let mut g = RepGraph::new(theta.m(), theta.n());
    let mut ids: HashMap<Point, usize> = HashMap::new();
    for p in w.points() {
        ids.insert(p, g.add_vertex(point_name(p), true));
    }
    for p in w.points() {
        let dst = ids[&p];
        if let Some(&src) = ids.get(&(p.0 - 1, p.1)) {
            g.add_edge(src, dst, Color::Blue, w.i_at(p), Angle::ZERO);
        }
        if let Some(&src) = ids.get(&(p.0, p.1 - 1)) {
            g.add_edge(src, dst, Color::Red, w.j_at(p), Angle::ZERO);
        }
    }
    mark_incomplete(&mut g);
    g.base = ids[&(-(w.width as i64) / 2, -(w.height as i64) / 2)];
    g
}

/// Marks vertices lacking an in-edge or an out-edge of some color.
fn mark_incomplete(g: &mut RepGraph) {
    for v in 0..g.len() {
        let has_out = |c: Color| g.out[v][ci(c)].iter().any(|e| e.is_some());
        let incomplete = g.inc[v][0].is_empty() || g.inc[v][1].is_empty() || !has_out(Color::Blue) || !has_out(Color::Red);
        g.vertices[v].frontier = incomplete;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyMode {
    /// One incoming edge of each color at every vertex (at most one at frontier vertices).
    DefectFree,
    /// Defect free, and every non-frontier vertex has all m blue and n red
    /// out-edges with commuting squares.
    StarInterior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub violation: Option<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn verify(theta: &Theta, g: &RepGraph, mode: VerifyMode) -> VerifyReport {
    let fail = |vertex: usize, message: String| VerifyReport { mode, violation: Some(Violation { vertex, message }) };
    let mut outs: HashMap<(usize, Color, usize), usize> = HashMap::new();
    for e in &g.edges {
        if let Some(prev) = outs.insert((e.src, e.color, e.index), e.dst) {
            return fail(e.src, format!("two {} out-edges with index {} (to {prev} and {})", e.color.name(), e.index, e.dst));
        }
    }
    for v in 0..g.len() {
        for c in [Color::Blue, Color::Red] {
            let k = g.inc[v][ci(c)].len();
            if k > 1 {
                return fail(v, format!("{k} incoming {} edges", c.name()));
            }
            if k == 0 && !g.vertices[v].frontier {
                return fail(v, format!("no incoming {} edge", c.name()));
            }
        }
    }
    if mode == VerifyMode::DefectFree {
        return VerifyReport { mode, violation: None };
    }
    for v in 0..g.len() {
        if g.vertices[v].frontier {
            continue;
        }
        for c in [Color::Blue, Color::Red] {
            for idx in 1..=g.width(c) {
                if g.out_edge(v, c, idx).is_none() {
                    return fail(v, format!("missing {} out-edge {idx}", c.name()));
                }
            }
        }
        // e_a f_b = f_b' e_a': red b then blue a equals blue a' then red b'
        for a in 1..=g.m {
            for b in 1..=g.n {
                let (a2, b2) = theta.apply(a, b);
                let p1 = g.out_edge(v, Color::Red, b).and_then(|e1| g.out_edge(e1.dst, Color::Blue, a).map(|e2| (e2.dst, e1.phase + e2.phase)));
                let p2 = g.out_edge(v, Color::Blue, a2).and_then(|e1| g.out_edge(e1.dst, Color::Red, b2).map(|e2| (e2.dst, e1.phase + e2.phase)));
                if let (Some(x), Some(y)) = (p1, p2) {
                    if x != y {
                        return fail(v, format!("square e{a}f{b} = f{b2}e{a2} does not close"));
                    }
                }
            }
        }
    }
    VerifyReport { mode, violation: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationResult {
    pub graph: RepGraph,
    pub depth: usize,
    /// For each vertex, the original vertex it was reached from and the
    /// normal form of a word carrying it there.
    pub trace: Vec<(usize, Word)>,
}

/// Minimal isometric dilation truncated at depth D (BFS distance from the
/// original vertices). Each missing out-edge e_i x is created together with
/// the chain of red predecessors forced by the relations: if x = f_j x' and
/// theta(i,j) = (i',j'), then e_i x = f_{j'} e_{i'} x'. The chain stops at the
/// first x' that already has its blue edge i', or when it closes up. Red
/// out-edges are handled symmetrically. `order_seed` shuffles the processing
/// order within each level; the result does not depend on it.
pub fn dilate(theta: &Theta, input: &RepGraph, depth: usize, order_seed: Option<u64>) -> Result<DilationResult> {
    if theta.m() != input.m || theta.n() != input.n {
        return Err(Error::Invalid("graph and theta have different generator counts".into()));
    }
    let mut g = input.clone();
    for v in g.vertices.iter_mut() {
        v.original = true;
        v.frontier = false;
    }
    let rep = verify(theta, &g, VerifyMode::DefectFree);
    if let Some(v) = rep.violation {
        return Err(Error::NotDefectFree(format!("vertex {}: {}", v.vertex, v.message)));
    }
    let mut rng = order_seed.map(ChaCha8Rng::seed_from_u64);
    let mut dist: Vec<usize> = vec![0; g.len()];
    let mut levels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    levels.insert(0, (0..g.len()).collect());
    while let Some((&d, _)) = levels.iter().next() {
        if d >= depth {
            break;
        }
        let mut batch = levels.remove(&d).expect("level present");
        if let Some(r) = rng.as_mut() {
            batch.shuffle(r);
        }
        for v in batch {
            let mut slots: Vec<(Color, usize)> = (1..=g.m)
                .map(|i| (Color::Blue, i))
                .chain((1..=g.n).map(|j| (Color::Red, j)))
                .collect();
            if let Some(r) = rng.as_mut() {
                slots.shuffle(r);
            }
            for (c, idx) in slots {
                if g.out_edge(v, c, idx).is_none() {
                    let created = complete_chain(theta, &mut g, &mut dist, v, c, idx)?;
                    for y in created {
                        levels.entry(dist[y]).or_default().push(y);
                    }
                }
            }
        }
    }
    for v in 0..g.len() {
        let complete = [Color::Blue, Color::Red]
            .iter()
            .all(|&c| (1..=g.width(c)).all(|i| g.out_edge(v, c, i).is_some()));
        g.vertices[v].frontier = !complete;
    }
    let (graph, trace) = canonical_order(theta, &g);
    Ok(DilationResult { graph, depth, trace })
}

/// Creates the out-edge (x, c, idx) and the chain of new vertices it forces.
fn complete_chain(theta: &Theta, g: &mut RepGraph, dist: &mut Vec<usize>, x0: usize, c: Color, idx: usize) -> Result<Vec<usize>> {
    let oc = other(c);
    // (x_k, idx_k) and, for each k, the new label on the oc-edge into y_k and the phase of x_{k+1} -> x_k
    let mut xs: Vec<(usize, usize)> = vec![(x0, idx)];
    let mut links: Vec<(usize, Angle)> = Vec::new();
    enum End {
        Terminal(usize, Angle),
        Loop(usize),
    }
    let end = loop {
        let &(xk, ik) = xs.last().expect("nonempty");
        let pred = *g.in_edge(xk, oc).ok_or_else(|| Error::NotDefectFree(format!("vertex {xk} lacks an incoming {} edge", oc.name())))?;
        let (next_idx, label) = match c {
            Color::Blue => theta.apply(ik, pred.index),
            Color::Red => {
                let (a, j) = theta.apply_inv(pred.index, ik);
                (j, a)
            }
        };
        links.push((label, pred.phase));
        if let Some(z) = g.out_edge(pred.src, c, next_idx) {
            break End::Terminal(z.dst, z.phase);
        }
        if let Some(q) = xs.iter().position(|&p| p == (pred.src, next_idx)) {
            break End::Loop(q);
        }
        xs.push((pred.src, next_idx));
    };
    let base_name = g.vertices[x0].name.clone();
    let mut ys = Vec::with_capacity(xs.len());
    for (k, &(xk, ik)) in xs.iter().enumerate() {
        let y = g.add_vertex(format!("{base_name}+{k}"), false);
        dist.push(dist[xk] + 1);
        g.add_edge(xk, y, c, ik, Angle::ZERO);
        ys.push(y);
    }
    let r = xs.len();
    for k in 0..r {
        let (label, phase) = links[k];
        let (src, src_phase) = if k + 1 < r {
            (ys[k + 1], Angle::ZERO)
        } else {
            match end {
                End::Terminal(z, ph) => (z, ph),
                End::Loop(q) => (ys[q], Angle::ZERO),
            }
        };
        if let Some(e) = g.out_edge(src, oc, label) {
            return Err(Error::IdentificationConflict(format!(
                "{} already has {} edge {label} to {}",
                g.vertices[src].name,
                oc.name(),
                g.vertices[e.dst].name
            )));
        }
        g.add_edge(src, ys[k], oc, label, phase - src_phase);
    }
    // distances through the new in-edges; the chain may close into a ring
    for _ in 0..=r {
        for k in 0..r {
            let y = ys[k];
            let src = g.in_edge(y, oc).expect("just added").src;
            dist[y] = dist[y].min(dist[src] + 1);
        }
    }
    Ok(ys)
}

/// Renumbers vertices: originals first in their order, then breadth first
/// along out-edges (blue 1..m, then red 1..n). New vertices are named
/// "origin:word" with the normal form of the discovering word.
fn canonical_order(theta: &Theta, g: &RepGraph) -> (RepGraph, Vec<(usize, Word)>) {
    let nv = g.len();
    let mut order: Vec<usize> = Vec::with_capacity(nv);
    let mut newid = vec![usize::MAX; nv];
    let mut word: Vec<Option<(usize, Word)>> = vec![None; nv];
    let mut queue = VecDeque::new();
    for v in 0..nv {
        if g.vertices[v].original {
            newid[v] = order.len();
            order.push(v);
            word[v] = Some((newid[v], Word::empty()));
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for c in [Color::Blue, Color::Red] {
            for idx in 1..=g.width(c) {
                if let Some(e) = g.out_edge(v, c, idx) {
                    let y = e.dst;
                    if newid[y] == usize::MAX {
                        newid[y] = order.len();
                        order.push(y);
                        let (o, w) = word[v].clone().expect("visited");
                        word[y] = Some((o, Word(vec![Letter { color: c, index: idx }]).concat(&w)));
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    // vertices not reachable from the originals (none for dilations)
    for v in 0..nv {
        if newid[v] == usize::MAX {
            newid[v] = order.len();
            order.push(v);
            word[v] = Some((newid[v], Word::empty()));
        }
    }
    let mut out = RepGraph::new(g.m, g.n);
    let mut trace = Vec::with_capacity(nv);
    for &v in &order {
        let (o, w) = word[v].clone().expect("assigned");
        let nf = normal_form(theta, &w);
        let name = if g.vertices[v].original {
            g.vertices[v].name.clone()
        } else {
            format!("{}:{}", out.vertices[o].name, nf)
        };
        let id = out.add_vertex(name, g.vertices[v].original);
        out.vertices[id].frontier = g.vertices[v].frontier;
        trace.push((o, nf));
    }
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| Edge { src: newid[e.src], dst: newid[e.dst], ..*e })
        .collect();
    edges.sort_by_key(|e| (e.src, ci(e.color), e.index, e.dst));
    for e in edges {
        out.add_edge(e.src, e.dst, e.color, e.index, e.phase);
    }
    out.base = newid[g.base.min(nv.saturating_sub(1))];
    (out, trace)
}

/// Result of pulling back along one color from the base vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pullback {
    /// The chain of incoming edges closes into a cycle of this length.
    Ring { length: usize },
    /// No cycle within the graph; `explored` steps were available.
    Tail { explored: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepType {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2a")]
    TwoA,
    #[serde(rename = "2b")]
    TwoB,
    #[serde(rename = "3a")]
    ThreeA,
    #[serde(rename = "3bi")]
    ThreeBi,
    #[serde(rename = "3bii")]
    ThreeBii,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl std::fmt::Display for RepType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RepType::One => "1",
            RepType::TwoA => "2a",
            RepType::TwoB => "2b",
            RepType::ThreeA => "3a",
            RepType::ThreeBi => "3bi",
            RepType::ThreeBii => "3bii",
            RepType::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeVerdict {
    pub blue: Pullback,
    pub red: Pullback,
    pub kind: RepType,
    /// For type 3bi/3bii: the (k,l) found.
    pub period: Option<(usize, usize)>,
}

/// The chain v, pred(v), pred(pred(v)), ... along incoming edges of color c.
pub fn pullback_chain(g: &RepGraph, v: usize, c: Color) -> (Vec<usize>, Pullback) {
    let mut chain = vec![v];
    let mut pos: HashMap<usize, usize> = HashMap::from([(v, 0)]);
    let mut x = v;
    while let Some(e) = g.in_edge(x, c) {
        x = e.src;
        if let Some(&p) = pos.get(&x) {
            let length = chain.len() - p;
            return (chain, Pullback::Ring { length });
        }
        pos.insert(x, chain.len());
        chain.push(x);
    }
    let explored = chain.len() - 1;
    (chain, Pullback::Tail { explored })
}

/// Case split of the component containing the base vertex.
pub fn classify(g: &RepGraph) -> TypeVerdict {
    if g.is_empty() {
        let t = Pullback::Tail { explored: 0 };
        return TypeVerdict { blue: t, red: t, kind: RepType::Undetermined, period: None };
    }
    let v = g.base;
    let (bchain, blue) = pullback_chain(g, v, Color::Blue);
    let (rchain, red) = pullback_chain(g, v, Color::Red);
    let (kind, period) = match (blue, red) {
        (Pullback::Ring { .. }, Pullback::Ring { .. }) => (RepType::One, None),
        (Pullback::Ring { .. }, Pullback::Tail { explored }) if explored > 0 => (RepType::TwoA, None),
        (Pullback::Tail { explored }, Pullback::Ring { .. }) if explored > 0 => (RepType::TwoB, None),
        (Pullback::Tail { explored: eb }, Pullback::Tail { explored: er }) if eb > 0 && er > 0 => {
            let mut found = None;
            'bii: for k in 1..bchain.len() {
                for l in 1..rchain.len() {
                    if bchain[k] == rchain[l] {
                        found = Some((RepType::ThreeBii, (k, l)));
                        break 'bii;
                    }
                }
            }
            if found.is_none() {
                'bi: for k in 1..bchain.len() {
                    let (rc, _) = pullback_chain(g, bchain[k], Color::Red);
                    if let Some(l) = (1..rc.len()).find(|&l| rc[l] == v) {
                        found = Some((RepType::ThreeBi, (k, l)));
                        break 'bi;
                    }
                }
            }
            match found {
                Some((t, p)) => (t, Some(p)),
                None => (RepType::ThreeA, None),
            }
        }
        _ => (RepType::Undetermined, None),
    };
    TypeVerdict { blue, red, kind, period }
}

/// Finds eta and words with sigma(w1) eta = v1 and sigma(w2) eta = v2 by
/// pushing the peaks of a connecting path down through commuting squares.
pub fn push_pull_path(theta: &Theta, g: &RepGraph, v1: usize, v2: usize) -> Result<(Word, Word, usize)> {
    // undirected BFS; steps are (edge id, forward?)
    let mut prev: Vec<Option<(usize, bool)>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    seen[v1] = true;
    let mut queue = VecDeque::from([v1]);
    while let Some(x) = queue.pop_front() {
        if x == v2 {
            break;
        }
        let outs = (0..2).flat_map(|c| g.out[x][c].iter().flatten().map(|&e| (e, true)).collect::<Vec<_>>());
        let ins = (0..2).flat_map(|c| g.inc[x][c].iter().map(|&e| (e, false)).collect::<Vec<_>>());
        for (e, fwd) in outs.chain(ins) {
            let y = if fwd { g.edges[e].dst } else { g.edges[e].src };
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((e, fwd));
                queue.push_back(y);
            }
        }
    }
    if !seen[v2] {
        return Err(Error::Disconnected(v1, v2));
    }
    // steps from v1 to v2: Step { from, to, color, index, forward }
    #[derive(Clone, Copy)]
    struct Step {
        color: Color,
        index: usize,
        fwd: bool,
        to: usize,
    }
    let mut steps: Vec<Step> = Vec::new();
    let mut x = v2;
    while x != v1 {
        let (e, fwd) = prev[x].expect("on path");
        let ed = g.edges[e];
        steps.push(Step { color: ed.color, index: ed.index, fwd, to: x });
        x = if fwd { ed.src } else { ed.dst };
    }
    steps.reverse();
    let missing = |v: usize, c: Color| Error::NotDefectFree(format!("vertex {v} lacks an incoming {} edge", c.name()));
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::Invalid("push-pull rewriting did not terminate".into()));
        }
        // a peak: forward step into b followed by a backward step out of b
        let Some(p) = (0..steps.len().saturating_sub(1)).find(|&p| steps[p].fwd && !steps[p + 1].fwd) else {
            break;
        };
        let a = if p == 0 { v1 } else { steps[p - 1].to };
        let (s1, s2) = (steps[p], steps[p + 1]);
        if s1.color == s2.color {
            // both are the unique incoming edge of that color
            steps.drain(p..p + 2);
            continue;
        }
        let c = s1.color;
        let oc = other(c);
        let pred = *g.in_edge(a, oc).ok_or_else(|| missing(a, oc))?;
        let u = pred.src;
        let idx2 = match c {
            Color::Blue => theta.apply(s1.index, pred.index).0,
            Color::Red => theta.apply_inv(pred.index, s1.index).1,
        };
        let c_node = s2.to;
        let down = Step { color: oc, index: pred.index, fwd: false, to: u };
        let up = Step { color: c, index: idx2, fwd: true, to: c_node };
        if g.out_edge(u, c, idx2).map(|e| e.dst) != Some(c_node) {
            return Err(Error::Invalid(format!("square at vertex {u} does not close")));
        }
        steps.splice(p..p + 2, [down, up]);
    }
    let split = steps.iter().position(|s| s.fwd).unwrap_or(steps.len());
    let eta = if split == 0 { v1 } else { steps[split - 1].to };
    // backward steps read from eta up to v1
    let w1 = Word(steps[..split].iter().map(|s| Letter { color: s.color, index: s.index }).collect());
    let w2 = Word(steps[split..].iter().rev().map(|s| Letter { color: s.color, index: s.index }).collect());
    Ok((w1, w2, eta))
}

/// Blue components (weakly connected along blue edges), as component ids.
pub fn blue_components(g: &RepGraph) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in g.edges.iter().filter(|e| e.color == Color::Blue) {
        let (a, b) = (root(&mut parent, e.src), root(&mut parent, e.dst));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..g.len()).map(|v| root(&mut parent, v)).collect()
}

/// Length of the blue ring of each blue component that contains one.
pub fn blue_rings(g: &RepGraph) -> BTreeMap<usize, usize> {
    let comp = blue_components(g);
    let mut out = BTreeMap::new();
    for v in 0..g.len() {
        if out.contains_key(&comp[v]) {
            continue;
        }
        if let (_, Pullback::Ring { length }) = pullback_chain(g, v, Color::Blue) {
            out.insert(comp[v], length);
        }
    }
    out
}

/// Sorted blue ring lengths.
pub fn blue_ring_lengths(g: &RepGraph) -> Vec<usize> {
    let mut v: Vec<usize> = blue_rings(g).into_values().collect();
    v.sort_unstable();
    v
}

/// Checks, for blue components carrying rings, that all red edges into a
/// component come from one component and that ring lengths multiply by
/// some t with 1 <= t <= n along red edges. Returns the violations.
pub fn parallel_violations(g: &RepGraph) -> Vec<String> {
    let comp = blue_components(g);
    let rings = blue_rings(g);
    let mut sources: BTreeMap<usize, std::collections::BTreeSet<usize>> = BTreeMap::new();
    for e in g.edges.iter().filter(|e| e.color == Color::Red) {
        let (s, t) = (comp[e.src], comp[e.dst]);
        if rings.contains_key(&s) && rings.contains_key(&t) {
            sources.entry(t).or_default().insert(s);
        }
    }
    let mut out = Vec::new();
    for (t, ss) in &sources {
        if ss.len() > 1 {
            out.push(format!("component {t} receives red edges from components {ss:?}"));
        }
        for s in ss {
            let (lt, ls) = (rings[t], rings[s]);
            if lt % ls != 0 || lt / ls > g.n {
                out.push(format!("ring length {lt} is not t*{ls} with 1 <= t <= {}", g.n));
            }
        }
    }
    out
}

/// Vertices lying on both a blue and a red ring whose ring words fail to commute.
pub fn closed_loop_violations(theta: &Theta, g: &RepGraph) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for v in 0..g.len() {
        let loop_word = |c: Color| -> Option<Word> {
            let (chain, pb) = pullback_chain(g, v, c);
            match pb {
                Pullback::Ring { length } if length == chain.len() => {
                    // chain[k+1] -> chain[k]; the edge into v acts last
                    let mut letters = Vec::with_capacity(length);
                    for k in 0..length {
                        let e = g.in_edge(chain[k], c).expect("ring edge");
                        letters.push(Letter { color: c, index: e.index });
                    }
                    Some(Word(letters))
                }
                _ => None,
            }
        };
        if let (Some(u), Some(w)) = (loop_word(Color::Blue), loop_word(Color::Red)) {
            if !commutes(theta, &u, &w)? {
                bad.push(v);
            }
        }
    }
    Ok(bad)
}

/// Number of vertices both of whose ring words exist (for reporting).
pub fn loop_vertices(g: &RepGraph) -> usize {
    (0..g.len())
        .filter(|&v| {
            [Color::Blue, Color::Red].iter().all(|&c| {
                let (chain, pb) = pullback_chain(g, v, c);
                matches!(pb, Pullback::Ring { length } if length == chain.len())
            })
        })
        .count()
}
