//! Stallings folding with union-find vertex identification.

use std::collections::VecDeque;

use crate::word::Word;

pub(crate) const NONE: u32 = u32::MAX;

/// Raw labeled graph: `out[v * rank + g]` is the target of the `g`-edge
/// leaving `v`, `inn[v * rank + g]` the source of the `g`-edge entering `v`.
#[derive(Debug, Clone)]
pub(crate) struct RawGraph {
    pub rank: usize,
    pub out: Vec<u32>,
    pub inn: Vec<u32>,
}

impl RawGraph {
    pub fn new(rank: usize) -> Self {
        RawGraph {
            rank,
            out: Vec::new(),
            inn: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        if self.rank == 0 {
            0
        } else {
            self.out.len() / self.rank
        }
    }

    pub fn add_vertex(&mut self) -> u32 {
        let v = self.vertex_count() as u32;
        self.out.extend(std::iter::repeat_n(NONE, self.rank));
        self.inn.extend(std::iter::repeat_n(NONE, self.rank));
        v
    }
}

pub(crate) struct Folder {
    g: RawGraph,
    uf: Vec<u32>,
    queue: VecDeque<(u32, u32)>,
    vertices: u32,
}

impl Folder {
    /// A folder holding only the base vertex `0`.
    pub fn new(rank: usize) -> Self {
        let mut g = RawGraph::new(rank);
        let mut uf = Vec::new();
        if rank > 0 {
            g.add_vertex();
        }
        uf.push(0);
        Folder {
            g,
            uf,
            queue: VecDeque::new(),
            vertices: 1,
        }
    }

    fn new_vertex(&mut self) -> u32 {
        let v = self.vertices;
        self.vertices += 1;
        self.g.add_vertex();
        self.uf.push(v);
        v
    }

    fn find(&mut self, mut v: u32) -> u32 {
        let mut root = v;
        while self.uf[root as usize] != root {
            root = self.uf[root as usize];
        }
        while self.uf[v as usize] != root {
            let next = self.uf[v as usize];
            self.uf[v as usize] = root;
            v = next;
        }
        root
    }

    #[inline]
    fn slot(&self, v: u32, g: usize) -> usize {
        v as usize * self.g.rank + g
    }

    fn out_edge(&mut self, v: u32, g: usize) -> Option<u32> {
        let t = self.g.out[self.slot(v, g)];
        if t == NONE {
            None
        } else {
            Some(self.find(t))
        }
    }

    fn in_edge(&mut self, v: u32, g: usize) -> Option<u32> {
        let s = self.g.inn[self.slot(v, g)];
        if s == NONE {
            None
        } else {
            Some(self.find(s))
        }
    }

    /// Adds `u --g--> v`, folding as needed.
    fn add_edge(&mut self, u: u32, g: usize, v: u32) {
        let u = self.find(u);
        let v = self.find(v);
        if let Some(t) = self.out_edge(u, g) {
            self.queue.push_back((t, v));
        } else if let Some(s) = self.in_edge(v, g) {
            self.queue.push_back((s, u));
        } else {
            let (su, sv) = (self.slot(u, g), self.slot(v, g));
            self.g.out[su] = v;
            self.g.inn[sv] = u;
        }
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((x, y)) = self.queue.pop_front() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            let (keep, gone) = if x < y { (x, y) } else { (y, x) };
            self.uf[gone as usize] = keep;
            for g in 0..self.g.rank {
                let sg = self.slot(gone, g);
                let sk = self.slot(keep, g);
                let t = std::mem::replace(&mut self.g.out[sg], NONE);
                if t != NONE {
                    let t = self.find(t);
                    let k = self.g.out[sk];
                    if k == NONE {
                        self.g.out[sk] = t;
                    } else {
                        let k = self.find(k);
                        self.queue.push_back((k, t));
                    }
                }
                let s = std::mem::replace(&mut self.g.inn[sg], NONE);
                if s != NONE {
                    let s = self.find(s);
                    let k = self.g.inn[sk];
                    if k == NONE {
                        self.g.inn[sk] = s;
                    } else {
                        let k = self.find(k);
                        self.queue.push_back((k, s));
                    }
                }
            }
        }
    }

    /// Reads `w` from the base as far as existing edges allow, then attaches
    /// the remainder as a fresh path closing up at the base.
    pub fn add_loop(&mut self, w: &Word) {
        let letters = w.letters();
        if letters.is_empty() {
            return;
        }
        let mut cur = self.find(0);
        for (i, &l) in letters.iter().enumerate() {
            let g = l.generator();
            let last = i + 1 == letters.len();
            if !last {
                let existing = if l.is_inverse() {
                    self.in_edge(cur, g)
                } else {
                    self.out_edge(cur, g)
                };
                if let Some(next) = existing {
                    cur = next;
                    continue;
                }
            }
            let next = if last {
                self.find(0)
            } else {
                self.new_vertex()
            };
            if l.is_inverse() {
                self.add_edge(next, g, cur);
            } else {
                self.add_edge(cur, g, next);
            }
            cur = self.find(next);
        }
    }

    /// Resolves all identifications and returns a graph on the surviving
    /// vertices, base first, with dead-end trees trimmed away.
    pub fn finish(mut self) -> RawGraph {
        let rank = self.g.rank;
        let n = self.vertices as usize;
        let mut new_id = vec![NONE; n];
        let mut count = 0u32;
        for v in 0..n as u32 {
            if self.find(v) == v {
                new_id[v as usize] = count;
                count += 1;
            }
        }
        let mut out = RawGraph::new(rank);
        for _ in 0..count {
            out.add_vertex();
        }
        for v in 0..n as u32 {
            if self.uf[v as usize] != v {
                continue;
            }
            let nv = new_id[v as usize] as usize;
            for g in 0..rank {
                if let Some(t) = self.out_edge(v, g) {
                    out.out[nv * rank + g] = new_id[t as usize];
                }
                if let Some(s) = self.in_edge(v, g) {
                    out.inn[nv * rank + g] = new_id[s as usize];
                }
            }
        }
        trim(&mut out);
        out
    }
}

/// Removes non-base vertices of degree at most one, repeatedly. Removed
/// vertices keep their index but lose all edges; `compact` drops them.
fn trim(g: &mut RawGraph) {
    let rank = g.rank;
    let n = g.vertex_count();
    let degree = |g: &RawGraph, v: usize| {
        (0..rank).filter(|&k| g.out[v * rank + k] != NONE).count()
            + (0..rank).filter(|&k| g.inn[v * rank + k] != NONE).count()
    };
    let mut deg: Vec<usize> = (0..n).map(|v| degree(g, v)).collect();
    let mut stack: Vec<usize> = (1..n).filter(|&v| deg[v] <= 1).collect();
    let mut removed = vec![false; n];
    while let Some(v) = stack.pop() {
        if removed[v] || deg[v] > 1 {
            continue;
        }
        removed[v] = true;
        for k in 0..rank {
            let t = std::mem::replace(&mut g.out[v * rank + k], NONE);
            if t != NONE {
                let t = t as usize;
                g.inn[t * rank + k] = NONE;
                deg[t] -= 1;
                if t != 0 && deg[t] <= 1 {
                    stack.push(t);
                }
            }
            let s = std::mem::replace(&mut g.inn[v * rank + k], NONE);
            if s != NONE {
                let s = s as usize;
                g.out[s * rank + k] = NONE;
                deg[s] -= 1;
                if s != 0 && deg[s] <= 1 {
                    stack.push(s);
                }
            }
        }
        deg[v] = 0;
    }
}

/// Stallings graph of the subgroup generated by `gens`, before canonical
/// renumbering. Vertex 0 is the base.
pub(crate) fn fold_generators(rank: usize, gens: &[Word]) -> RawGraph {
    let mut f = Folder::new(rank);
    for w in gens {
        f.add_loop(w);
    }
    f.finish()
}
