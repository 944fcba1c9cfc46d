//! Birooted word trees for the free inverse semigroup.
//!
//! An element is a finite subtree of the Cayley graph of the free group,
//! together with a start and an end vertex. Vertices are stored in a
//! canonical numbering: preorder DFS from the start vertex with neighbours
//! visited in `Step` order. Two elements are equal iff their canonical
//! adjacency lists and end vertices coincide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Fwd,
    Bwd,
}

impl Dir {
    fn flip(self) -> Dir {
        match self {
            Dir::Fwd => Dir::Bwd,
            Dir::Bwd => Dir::Fwd,
        }
    }
}

/// Moving along an edge: `Fwd` reads the letter `x_label`, `Bwd` reads its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub label: u32,
    pub dir: Dir,
}

impl Step {
    pub fn fwd(label: u32) -> Step {
        Step {
            label,
            dir: Dir::Fwd,
        }
    }

    pub fn bwd(label: u32) -> Step {
        Step {
            label,
            dir: Dir::Bwd,
        }
    }

    pub fn reversed(self) -> Step {
        Step {
            label: self.label,
            dir: self.dir.flip(),
        }
    }
}

type Work = Vec<BTreeMap<Step, usize>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MunnElement {
    adj: Vec<Vec<(Step, u32)>>,
    end: u32,
}

impl MunnElement {
    pub fn generator(label: u32) -> MunnElement {
        MunnElement {
            adj: vec![vec![(Step::fwd(label), 1)], vec![(Step::bwd(label), 0)]],
            end: 1,
        }
    }

    /// Element read off a word of steps; panics on an empty word.
    pub fn from_steps(steps: &[Step]) -> MunnElement {
        assert!(
            !steps.is_empty(),
            "free inverse semigroup has no empty word"
        );
        let mut work: Work = vec![BTreeMap::new()];
        let mut at = 0usize;
        for s in steps {
            at = walk(&mut work, at, *s);
        }
        canonical(&work, 0, at)
    }

    pub fn start(&self) -> u32 {
        0
    }

    pub fn end(&self) -> u32 {
        self.end
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() - 1
    }

    pub fn is_idempotent(&self) -> bool {
        self.end == 0
    }

    pub fn labels(&self) -> BTreeSet<u32> {
        self.adj
            .iter()
            .flat_map(|n| n.iter().map(|(s, _)| s.label))
            .collect()
    }

    /// Edges as (tail, label, head) in canonical vertex ids.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for (v, nbrs) in self.adj.iter().enumerate() {
            for (s, w) in nbrs {
                if s.dir == Dir::Fwd {
                    out.push((v as u32, s.label, *w));
                }
            }
        }
        out
    }

    fn work(&self) -> Work {
        self.adj
            .iter()
            .map(|n| n.iter().map(|(s, w)| (*s, *w as usize)).collect())
            .collect()
    }

    pub fn multiply(&self, other: &MunnElement) -> MunnElement {
        let mut work = self.work();
        let mut map = vec![usize::MAX; other.adj.len()];
        map[0] = self.end as usize;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for (s, w) in &other.adj[v] {
                let w = *w as usize;
                if map[w] != usize::MAX {
                    continue;
                }
                map[w] = walk(&mut work, map[v], *s);
                stack.push(w);
            }
        }
        canonical(&work, 0, map[other.end as usize])
    }

    pub fn inverse(&self) -> MunnElement {
        canonical(&self.work(), self.end as usize, 0)
    }

    /// Image under the automorphism `x_i ↦ x_i⁻¹`.
    pub fn flip_labels(&self) -> MunnElement {
        let work: Work = self
            .adj
            .iter()
            .map(|n| n.iter().map(|(s, w)| (s.reversed(), *w as usize)).collect())
            .collect();
        canonical(&work, 0, self.end as usize)
    }

    /// Image under the anti-automorphism fixing every generator.
    pub fn reverse(&self) -> MunnElement {
        let work: Work = self
            .adj
            .iter()
            .map(|n| n.iter().map(|(s, w)| (s.reversed(), *w as usize)).collect())
            .collect();
        canonical(&work, self.end as usize, 0)
    }

    /// A word representing this element: a walk from start to end crossing
    /// every side branch twice and every edge of the start-end path once.
    pub fn steps(&self) -> Vec<Step> {
        let mut on_path = vec![false; self.adj.len()];
        on_path[0] = true;
        let mut at = 0;
        let mut out = Vec::new();
        for s in self.path_to(self.end as usize) {
            let next = self.adj[at].iter().find(|(t, _)| *t == s).unwrap().1 as usize;
            on_path[next] = true;
            at = next;
        }
        let mut v = 0;
        let mut parent = usize::MAX;
        loop {
            let mut onward = None;
            for (s, w) in &self.adj[v] {
                let w = *w as usize;
                if w == parent {
                    continue;
                }
                if on_path[w] {
                    onward = Some((*s, w));
                    continue;
                }
                out.push(*s);
                self.tour(w, v, &mut out);
                out.push(s.reversed());
            }
            match onward {
                Some((s, w)) => {
                    out.push(s);
                    parent = v;
                    v = w;
                }
                None => return out,
            }
        }
    }

    fn tour(&self, v: usize, parent: usize, out: &mut Vec<Step>) {
        for (s, w) in &self.adj[v] {
            let w = *w as usize;
            if w == parent {
                continue;
            }
            out.push(*s);
            self.tour(w, v, out);
            out.push(s.reversed());
        }
    }

    fn path_to(&self, target: usize) -> Vec<Step> {
        // preorder numbering: every vertex's parent has a smaller id
        let mut parent: Vec<Option<(usize, Step)>> = vec![None; self.adj.len()];
        for (v, nbrs) in self.adj.iter().enumerate() {
            for (s, w) in nbrs {
                let w = *w as usize;
                if w > v && parent[w].is_none() {
                    parent[w] = Some((v, *s));
                }
            }
        }
        let mut out = Vec::new();
        let mut at = target;
        while let Some((p, s)) = parent[at] {
            out.push(s);
            at = p;
        }
        out.reverse();
        out
    }

    pub fn to_term(&self) -> Term {
        let letters: Vec<Term> = self
            .steps()
            .into_iter()
            .map(|s| match s.dir {
                Dir::Fwd => Term::Var(s.label),
                Dir::Bwd => Term::app("inv", vec![Term::Var(s.label)]),
            })
            .collect();
        letters
            .into_iter()
            .rev()
            .reduce(|acc, t| Term::app("mul", vec![t, acc]))
            .expect("element has at least one edge")
    }

    fn write_dfs(&self, v: usize, parent: usize, out: &mut String) {
        out.push('[');
        for (s, w) in &self.adj[v] {
            let w = *w as usize;
            if w == parent {
                continue;
            }
            out.push(if s.dir == Dir::Fwd { '+' } else { '-' });
            out.push_str(&s.label.to_string());
            self.write_dfs(w, v, out);
        }
        out.push(']');
    }

    /// Canonical text: DFS bracket string, then `@start:end`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        self.write_dfs(0, usize::MAX, &mut s);
        s.push_str(&format!("@0:{}", self.end));
        s
    }

    pub fn parse(text: &str) -> Result<MunnElement> {
        let bad = |msg: &str| Error::Invalid(format!("munn element `{text}`: {msg}"));
        let (dfs, roots) = text.split_once('@').ok_or_else(|| bad("missing `@`"))?;
        let (start, end) = roots.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        let start: usize = start.trim().parse().map_err(|_| bad("bad start id"))?;
        let end: usize = end.trim().parse().map_err(|_| bad("bad end id"))?;
        let bytes = dfs.trim().as_bytes();
        let mut work: Work = Vec::new();
        let mut pos = 0usize;
        parse_vertex(bytes, &mut pos, &mut work, None).map_err(|m| bad(&m))?;
        if pos != bytes.len() {
            return Err(bad("trailing input"));
        }
        if work.len() < 2 {
            return Err(bad("tree has no edges"));
        }
        if start >= work.len() || end >= work.len() {
            return Err(bad("root out of range"));
        }
        Ok(canonical(&work, start, end))
    }

    /// All elements on generators `1..=rank` with between 1 and `max_edges` edges.
    pub fn enumerate(rank: u32, max_edges: usize) -> Vec<MunnElement> {
        let mut layer: BTreeSet<MunnElement> = BTreeSet::new();
        for l in 1..=rank {
            for s in [Step::fwd(l), Step::bwd(l)] {
                let mut work: Work = vec![BTreeMap::new()];
                walk(&mut work, 0, s);
                layer.insert(canonical(&work, 0, 0));
            }
        }
        let mut shapes: Vec<MunnElement> = Vec::new();
        for _ in 1..=max_edges {
            shapes.extend(layer.iter().cloned());
            let mut next = BTreeSet::new();
            for t in &layer {
                for v in 0..t.adj.len() {
                    for l in 1..=rank {
                        for s in [Step::fwd(l), Step::bwd(l)] {
                            if t.adj[v].iter().any(|(x, _)| *x == s) {
                                continue;
                            }
                            let mut work = t.work();
                            walk(&mut work, v, s);
                            next.insert(canonical(&work, 0, 0));
                        }
                    }
                }
            }
            layer = next;
        }
        let mut out = Vec::new();
        for shape in shapes {
            for e in 0..shape.adj.len() as u32 {
                out.push(MunnElement {
                    adj: shape.adj.clone(),
                    end: e,
                });
            }
        }
        out
    }
}

impl fmt::Display for MunnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn parse_vertex(
    bytes: &[u8],
    pos: &mut usize,
    work: &mut Work,
    parent: Option<(usize, Step)>,
) -> std::result::Result<usize, String> {
    if bytes.get(*pos) != Some(&b'[') {
        return Err(format!("expected `[` at {}", *pos));
    }
    *pos += 1;
    let me = work.len();
    work.push(BTreeMap::new());
    if let Some((p, s)) = parent {
        // s was read going from p to me
        work[me].insert(s.reversed(), p);
    }
    loop {
        match bytes.get(*pos) {
            Some(b']') => {
                *pos += 1;
                return Ok(me);
            }
            Some(&c) if c == b'+' || c == b'-' => {
                *pos += 1;
                let st = *pos;
                while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let label: u32 = std::str::from_utf8(&bytes[st..*pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| format!("bad label at {st}"))?;
                if label == 0 {
                    return Err("labels start at 1".into());
                }
                let s = if c == b'+' {
                    Step::fwd(label)
                } else {
                    Step::bwd(label)
                };
                if work[me].contains_key(&s) {
                    return Err(format!("duplicate step at {st}"));
                }
                let child = parse_vertex(bytes, pos, work, Some((me, s)))?;
                work[me].insert(s, child);
            }
            _ => return Err(format!("unexpected input at {}", *pos)),
        }
    }
}

/// Follows `s` from `at`, creating the edge if absent.
fn walk(work: &mut Work, at: usize, s: Step) -> usize {
    if let Some(&w) = work[at].get(&s) {
        return w;
    }
    let w = work.len();
    work.push(BTreeMap::new());
    work[at].insert(s, w);
    work[w].insert(s.reversed(), at);
    w
}

fn canonical(work: &Work, start: usize, end: usize) -> MunnElement {
    let mut id = vec![u32::MAX; work.len()];
    let mut order = Vec::with_capacity(work.len());
    // explicit stack; children pushed in reverse so they pop in step order
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if id[v] != u32::MAX {
            continue;
        }
        id[v] = order.len() as u32;
        order.push(v);
        for (_, w) in work[v].iter().rev() {
            if id[*w] == u32::MAX {
                stack.push(*w);
            }
        }
    }
    let adj = order
        .iter()
        .map(|v| work[*v].iter().map(|(s, w)| (*s, id[*w])).collect())
        .collect();
    MunnElement { adj, end: id[end] }
}
