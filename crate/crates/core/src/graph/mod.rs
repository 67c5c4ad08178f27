//! Stallings subgroup graphs.
//!
//! A [`SubgroupGraph`] is the folded core graph of a finitely generated
//! subgroup `H` of the free group, renumbered canonically by a breadth-first
//! search from the base vertex. Edges at each vertex are visited in the order
//! (generator index, outgoing before incoming); the BFS tree is the spanning
//! tree and the remaining edges, listed by source vertex then generator, give
//! the Schreier basis.

mod fold;
mod labeled;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::word::{Endomorphism, Letter, Word, WordError};
use fold::{RawGraph, NONE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("word is not in the subgroup")]
    NotInSubgroup,
    #[error("subgroup has infinite index")]
    InfiniteIndex,
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexResult {
    Finite(usize),
    Infinite,
}

impl IndexResult {
    pub fn finite(self) -> Option<usize> {
        match self {
            IndexResult::Finite(m) => Some(m),
            IndexResult::Infinite => None,
        }
    }
}

impl fmt::Display for IndexResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexResult::Finite(m) => write!(f, "{m}"),
            IndexResult::Infinite => f.write_str("infinite"),
        }
    }
}

/// A word in a subgroup basis `h1, h2, …`. Kept apart from [`Word`] so that
/// words over the ambient alphabet and over a basis alphabet never mix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisWord(Word);

impl BasisWord {
    pub fn new(word: Word) -> Self {
        BasisWord(word)
    }

    /// Builds from `(basis index, ±1)` pairs, reducing.
    pub fn from_pairs(basis_len: usize, pairs: &[(usize, i32)]) -> Result<Self, WordError> {
        Word::reduce(basis_len, pairs.iter().map(|&(i, s)| Letter::new(i, s))).map(BasisWord)
    }

    pub fn basis_len(&self) -> usize {
        self.0.rank()
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn pairs(&self) -> Vec<(usize, i32)> {
        self.0
            .letters()
            .iter()
            .map(|l| (l.generator(), l.sign()))
            .collect()
    }

    /// Replaces each basis letter by its word and reduces.
    pub fn substitute(&self, basis: &[Word], ambient_rank: usize) -> Word {
        let mut out = Word::identity(ambient_rank);
        for l in self.0.letters() {
            let h = &basis[l.generator()];
            if l.is_inverse() {
                out.extend_inverse_from(h);
            } else {
                out.extend_from(h);
            }
        }
        out
    }
}

/// Display name of the `i`-th basis element.
pub fn basis_name(i: usize) -> String {
    format!("h{}", i + 1)
}

impl fmt::Display for BasisWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render_with(basis_name))
    }
}

/// Which free basis `basis()` and `rewrite()` refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Non-tree edges of the BFS spanning tree.
    Schreier,
    /// The generators the graph was built from, in input order.
    Generators,
}

#[derive(Debug, Clone)]
struct GeneratorBasis {
    words: Vec<Word>,
    /// Label of each outgoing edge slot, as a word in the generators.
    labels: Vec<Option<Word>>,
}

#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    rank: usize,
    vertices: usize,
    out: Vec<u32>,
    inn: Vec<u32>,
    /// Tree edge into each non-base vertex: (parent, letter read from parent).
    parent: Vec<Option<(u32, Letter)>>,
    /// Schreier basis index of each outgoing edge slot, `NONE` for tree edges.
    edge_basis: Vec<u32>,
    basis_edges: Vec<(u32, usize)>,
    generator_basis: Option<GeneratorBasis>,
}

impl PartialEq for SubgroupGraph {
    /// Equality of based labeled graphs. Numbering is canonical, so this is
    /// isomorphism.
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.out == other.out
    }
}

impl Eq for SubgroupGraph {}

impl SubgroupGraph {
    /// Folds the wedge of the generator loops and trims it to its core.
    pub fn build(rank: usize, generators: &[Word]) -> Result<Self, GraphError> {
        assert!(rank >= 1, "free group rank must be positive");
        for w in generators {
            if w.rank() != rank {
                return Err(WordError::RankMismatch {
                    expected: rank,
                    found: w.rank(),
                }
                .into());
            }
        }
        Ok(Self::canonical(fold::fold_generators(rank, generators)))
    }

    /// Like [`build`](Self::build), but when the generators form a free basis
    /// of the subgroup, `basis()` and `rewrite()` use them (in input order)
    /// instead of the Schreier basis.
    pub fn with_generator_basis(rank: usize, generators: &[Word]) -> Result<Self, GraphError> {
        let mut g = Self::build(rank, generators)?;
        if generators.len() == g.subgroup_rank() && !generators.is_empty() {
            if let Some(lg) = labeled::labeled_fold(generators) {
                g.generator_basis = g.attach_labels(generators, lg);
            }
        }
        Ok(g)
    }

    /// Complete covering graph on `n` vertices with base `0`, where
    /// `step(v, g)` is the endpoint of the `g`-edge leaving `v`. Each
    /// `step(·, g)` must be a permutation.
    pub(crate) fn from_covering<F: Fn(usize, usize) -> usize>(
        rank: usize,
        n: usize,
        step: F,
    ) -> Self {
        assert!(rank >= 1 && n >= 1);
        let mut raw = RawGraph::new(rank);
        for _ in 0..n {
            raw.add_vertex();
        }
        for v in 0..n {
            for g in 0..rank {
                let t = step(v, g);
                raw.out[v * rank + g] = t as u32;
                debug_assert_eq!(raw.inn[t * rank + g], NONE, "step must be a permutation");
                raw.inn[t * rank + g] = v as u32;
            }
        }
        Self::canonical(raw)
    }

    fn canonical(raw: RawGraph) -> Self {
        let rank = raw.rank;
        let n_raw = raw.vertex_count();
        let mut order: Vec<u32> = vec![NONE; n_raw];
        let mut parent_raw: Vec<Option<(u32, Letter)>> = vec![None; n_raw];
        let mut visit = Vec::with_capacity(n_raw);
        let mut queue = VecDeque::new();
        order[0] = 0;
        visit.push(0u32);
        queue.push_back(0u32);
        while let Some(v) = queue.pop_front() {
            for g in 0..rank {
                for (slot, letter) in [
                    (raw.out[v as usize * rank + g], Letter::pos(g)),
                    (raw.inn[v as usize * rank + g], Letter::neg(g)),
                ] {
                    if slot != NONE && order[slot as usize] == NONE {
                        order[slot as usize] = visit.len() as u32;
                        parent_raw[slot as usize] = Some((v, letter));
                        visit.push(slot);
                        queue.push_back(slot);
                    }
                }
            }
        }
        let n = visit.len();
        let mut out = vec![NONE; n * rank];
        let mut inn = vec![NONE; n * rank];
        let mut parent = vec![None; n];
        for (new, &old) in visit.iter().enumerate() {
            for g in 0..rank {
                let t = raw.out[old as usize * rank + g];
                if t != NONE {
                    out[new * rank + g] = order[t as usize];
                }
                let s = raw.inn[old as usize * rank + g];
                if s != NONE {
                    inn[new * rank + g] = order[s as usize];
                }
            }
            parent[new] = parent_raw[old as usize].map(|(p, l)| (order[p as usize], l));
        }
        let mut edge_basis = vec![NONE; n * rank];
        let mut basis_edges = Vec::new();
        for v in 0..n {
            for g in 0..rank {
                let t = out[v * rank + g];
                if t == NONE {
                    continue;
                }
                let is_tree = parent[t as usize] == Some((v as u32, Letter::pos(g)))
                    || parent[v] == Some((t, Letter::neg(g)));
                if !is_tree {
                    edge_basis[v * rank + g] = basis_edges.len() as u32;
                    basis_edges.push((v as u32, g));
                }
            }
        }
        SubgroupGraph {
            rank,
            vertices: n,
            out,
            inn,
            parent,
            edge_basis,
            basis_edges,
            generator_basis: None,
        }
    }

    fn attach_labels(
        &self,
        generators: &[Word],
        lg: labeled::LabeledGraph,
    ) -> Option<GeneratorBasis> {
        let rank = self.rank;
        if lg.edges.len() != self.edge_count() {
            return None;
        }
        let nl = lg.edges.iter().map(|e| e.from.max(e.to)).max().unwrap_or(0) + 1;
        let mut map = vec![NONE; nl];
        map[0] = 0;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nl];
        for (i, e) in lg.edges.iter().enumerate() {
            adj[e.from].push(i);
            if e.to != e.from {
                adj[e.to].push(i);
            }
        }
        let mut labels = vec![None; self.vertices * rank];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &i in &adj[x] {
                let e = &lg.edges[i];
                let (other, canon_other) = if e.from == x {
                    (e.to, self.out[map[x] as usize * rank + e.generator])
                } else {
                    (e.from, self.inn[map[x] as usize * rank + e.generator])
                };
                if canon_other == NONE {
                    return None;
                }
                if map[other] == NONE {
                    map[other] = canon_other;
                    queue.push_back(other);
                } else if map[other] != canon_other {
                    return None;
                }
                labels[map[e.from] as usize * rank + e.generator] = Some(e.label.clone());
            }
        }
        Some(GeneratorBasis {
            words: generators.to_vec(),
            labels,
        })
    }

    /// Ambient rank of the free group.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().filter(|&&t| t != NONE).count()
    }

    /// Rank of `H` as a free group: `E - V + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.basis_edges.len()
    }

    /// Target of the `g`-edge leaving `v`.
    pub fn out_edge(&self, v: usize, g: usize) -> Option<usize> {
        let t = self.out[v * self.rank + g];
        (t != NONE).then_some(t as usize)
    }

    /// Source of the `g`-edge entering `v`.
    pub fn in_edge(&self, v: usize, g: usize) -> Option<usize> {
        let s = self.inn[v * self.rank + g];
        (s != NONE).then_some(s as usize)
    }

    /// All edges `(source, generator, target)`, by source then generator.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for s in 0..self.vertices {
            for g in 0..self.rank {
                if let Some(t) = self.out_edge(s, g) {
                    v.push((s, g, t));
                }
            }
        }
        v
    }

    #[inline]
    fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.is_inverse() {
            self.in_edge(v, l.generator())
        } else {
            self.out_edge(v, l.generator())
        }
    }

    /// Endpoint of reading `w` from the base, if the path stays in the graph.
    pub fn trace(&self, w: &Word) -> Option<usize> {
        let mut v = 0;
        for &l in w.letters() {
            v = self.step(v, l)?;
        }
        Some(v)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.rank() == self.rank && self.trace(w) == Some(0)
    }

    pub fn is_complete_covering(&self) -> bool {
        self.out.iter().all(|&t| t != NONE) && self.inn.iter().all(|&s| s != NONE)
    }

    pub fn index(&self) -> IndexResult {
        if self.is_complete_covering() {
            IndexResult::Finite(self.vertices)
        } else {
            IndexResult::Infinite
        }
    }

    /// The tree path from the base to `v`.
    pub fn tree_path(&self, v: usize) -> Word {
        let mut letters = Vec::new();
        let mut cur = v;
        while let Some((p, l)) = self.parent[cur] {
            letters.push(l);
            cur = p as usize;
        }
        letters.reverse();
        Word::reduce(self.rank, letters).expect("letters in range")
    }

    pub fn schreier_basis(&self) -> Vec<Word> {
        self.basis_edges
            .iter()
            .map(|&(u, g)| {
                let v = self.out[u as usize * self.rank + g] as usize;
                let mut w = self.tree_path(u as usize);
                w.push(Letter::pos(g));
                w.extend_inverse_from(&self.tree_path(v));
                w
            })
            .collect()
    }

    pub fn basis_kind(&self) -> BasisKind {
        if self.generator_basis.is_some() {
            BasisKind::Generators
        } else {
            BasisKind::Schreier
        }
    }

    /// The basis that [`rewrite`](Self::rewrite) expresses words in.
    pub fn basis(&self) -> Vec<Word> {
        match &self.generator_basis {
            Some(gb) => gb.words.clone(),
            None => self.schreier_basis(),
        }
    }

    /// One coset representative per vertex (tree paths), base first.
    pub fn transversal(&self) -> Result<Vec<Word>, GraphError> {
        if !self.is_complete_covering() {
            return Err(GraphError::InfiniteIndex);
        }
        Ok((0..self.vertices).map(|v| self.tree_path(v)).collect())
    }

    /// Reidemeister–Schreier rewrite: one basis letter per non-tree edge crossed.
    pub fn rewrite_schreier(&self, w: &Word) -> Result<BasisWord, GraphError> {
        let m = self.subgroup_rank();
        let mut out = Word::identity(m);
        let end = self.walk(w, |slot, inverse| {
            let b = self.edge_basis[slot];
            if b != NONE {
                out.push(if inverse {
                    Letter::neg(b as usize)
                } else {
                    Letter::pos(b as usize)
                });
            }
        })?;
        if end != 0 {
            return Err(GraphError::NotInSubgroup);
        }
        Ok(BasisWord(out))
    }

    /// Expresses a member of `H` in [`basis`](Self::basis).
    pub fn rewrite(&self, w: &Word) -> Result<BasisWord, GraphError> {
        let Some(gb) = &self.generator_basis else {
            return self.rewrite_schreier(w);
        };
        let mut out = Word::identity(gb.words.len());
        let end = self.walk(w, |slot, inverse| {
            let label = gb.labels[slot].as_ref().expect("every edge labeled");
            if inverse {
                out.extend_inverse_from(label);
            } else {
                out.extend_from(label);
            }
        })?;
        if end != 0 {
            return Err(GraphError::NotInSubgroup);
        }
        Ok(BasisWord(out))
    }

    /// Abelianized [`rewrite`](Self::rewrite): exponent sums over the basis.
    pub fn rewrite_abelian(&self, w: &Word) -> Result<Vec<i64>, GraphError> {
        if self.generator_basis.is_some() {
            return Ok(self.rewrite(w)?.as_word().exponent_sums());
        }
        let mut counts = vec![0i64; self.subgroup_rank()];
        let end = self.walk(w, |slot, inverse| {
            let b = self.edge_basis[slot];
            if b != NONE {
                counts[b as usize] += if inverse { -1 } else { 1 };
            }
        })?;
        if end != 0 {
            return Err(GraphError::NotInSubgroup);
        }
        Ok(counts)
    }

    /// Reads `w` from the base, calling `visit(out_slot, backwards)` for each
    /// edge crossed. Returns the end vertex.
    fn walk<F: FnMut(usize, bool)>(&self, w: &Word, mut visit: F) -> Result<usize, GraphError> {
        if w.rank() != self.rank {
            return Err(WordError::RankMismatch {
                expected: self.rank,
                found: w.rank(),
            }
            .into());
        }
        let rank = self.rank;
        let mut v = 0usize;
        for &l in w.letters() {
            let g = l.generator();
            if l.is_inverse() {
                let s = self.in_edge(v, g).ok_or(GraphError::NotInSubgroup)?;
                visit(s * rank + g, true);
                v = s;
            } else {
                let t = self.out_edge(v, g).ok_or(GraphError::NotInSubgroup)?;
                visit(v * rank + g, false);
                v = t;
            }
        }
        Ok(v)
    }

    /// Whether `φ(H) ⊆ H`, checked on the Schreier basis.
    pub fn is_invariant(&self, phi: &Endomorphism) -> Result<bool, GraphError> {
        if phi.rank() != self.rank {
            return Err(WordError::RankMismatch {
                expected: self.rank,
                found: phi.rank(),
            }
            .into());
        }
        Ok(self
            .schreier_basis()
            .iter()
            .all(|h| self.contains(&phi.apply_unchecked(h))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn example_h() -> SubgroupGraph {
        SubgroupGraph::with_generator_basis(2, &[w("a^2"), w("b^2"), w("a b")]).unwrap()
    }

    fn example_phi() -> Endomorphism {
        Endomorphism::parse(2, &["b", "a b^2"]).unwrap()
    }

    #[test]
    fn example_subgroup_is_index_two() {
        let h = example_h();
        assert_eq!(h.vertex_count(), 2);
        assert!(h.is_complete_covering());
        assert_eq!(h.index(), IndexResult::Finite(2));
        assert_eq!(h.subgroup_rank(), 3);
        assert_eq!(h.basis_kind(), BasisKind::Generators);
    }

    #[test]
    fn trivial_and_cyclic_subgroups() {
        let t = SubgroupGraph::build(2, &[]).unwrap();
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.edge_count(), 0);
        assert_eq!(t.index(), IndexResult::Infinite);
        assert!(t.schreier_basis().is_empty());
        assert!(t.contains(&Word::identity(2)));
        assert!(!t.contains(&w("a")));

        let c = SubgroupGraph::build(2, &[w("a")]).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.out_edge(0, 0), Some(0));
        assert_eq!(c.in_edge(0, 0), Some(0));
        assert_eq!(c.out_edge(0, 1), None);
        assert_eq!(c.in_edge(0, 1), None);
    }

    #[test]
    fn membership() {
        let h = example_h();
        assert!(h.contains(&w("b a b b")));
        assert!(h.contains(&Word::identity(2)));
        assert!(!h.contains(&w("a")));
    }

    #[test]
    fn image_of_automorphism_is_whole_group() {
        let img = SubgroupGraph::build(2, &[w("b"), w("a b^2")]).unwrap();
        assert_eq!(img.index(), IndexResult::Finite(1));
        let rose = SubgroupGraph::build(2, &[w("a"), w("b")]).unwrap();
        assert_eq!(img, rose);
        assert_eq!(rose.schreier_basis(), vec![w("a"), w("b")]);
        assert_eq!(rose.transversal().unwrap(), vec![Word::identity(2)]);
    }

    #[test]
    fn schreier_basis_regenerates_graph() {
        let h = example_h();
        let basis = h.schreier_basis();
        assert_eq!(basis.len(), 3);
        assert_eq!(SubgroupGraph::build(2, &basis).unwrap(), h);
        // tree edge is a: base -> 1
        assert_eq!(h.tree_path(1), w("a"));
        assert_eq!(basis, vec![w("b a^-1"), w("a^2"), w("a b")]);
    }

    #[test]
    fn transversal_of_example_subgroup() {
        let h = example_h();
        assert_eq!(h.transversal().unwrap(), vec![Word::identity(2), w("a")]);
        let c = SubgroupGraph::build(2, &[w("a")]).unwrap();
        assert_eq!(c.transversal(), Err(GraphError::InfiniteIndex));
    }

    #[test]
    fn rewrite_example_images() {
        let h = example_h();
        let phi = example_phi();
        let img_b2 = phi.apply(&w("b^2")).unwrap();
        assert_eq!(img_b2, w("a b b a b b"));
        let r = h.rewrite(&img_b2).unwrap();
        assert_eq!(r.pairs(), vec![(2, 1), (1, 1), (2, -1), (0, 1), (1, 1)]);
        assert_eq!(r.to_string(), "h3 h2 h3^-1 h1 h2");
        let r = h.rewrite(&w("b a b b")).unwrap();
        assert_eq!(r.to_string(), "h2 h3^-1 h1 h2");
        assert!(h
            .rewrite(&Word::identity(2))
            .unwrap()
            .as_word()
            .is_identity());
        assert_eq!(h.rewrite(&w("a")), Err(GraphError::NotInSubgroup));
        assert_eq!(r.substitute(&h.basis(), 2), w("b a b b"));
    }

    #[test]
    fn schreier_rewrite_round_trip() {
        let h = example_h();
        let basis = h.schreier_basis();
        let x = w("b a b b");
        assert_eq!(h.rewrite_schreier(&x).unwrap().substitute(&basis, 2), x);
    }

    #[test]
    fn invariance() {
        assert!(example_h().is_invariant(&example_phi()).unwrap());
        let rose = SubgroupGraph::build(2, &[w("a"), w("b")]).unwrap();
        assert!(rose.is_invariant(&example_phi()).unwrap());
        let swap = Endomorphism::parse(2, &["b", "a"]).unwrap();
        let c = SubgroupGraph::build(2, &[w("a")]).unwrap();
        assert!(!c.is_invariant(&swap).unwrap());
        assert!(c.is_invariant(&Endomorphism::identity(3)).is_err());
    }

    #[test]
    fn non_basis_generators_fall_back_to_schreier() {
        // a, a^2 generate <a>, rank 1
        let g = SubgroupGraph::with_generator_basis(2, &[w("a"), w("a^2")]).unwrap();
        assert_eq!(g.basis_kind(), BasisKind::Schreier);
        assert_eq!(g.basis(), vec![w("a")]);
        // a b a^-1 and a: a basis whose petal folds at the base
        let g = SubgroupGraph::with_generator_basis(2, &[w("a b a^-1"), w("a")]).unwrap();
        assert_eq!(g.basis_kind(), BasisKind::Generators);
        let x = w("a^2 b^-1 a^-1 a^-1");
        let r = g.rewrite(&x).unwrap();
        assert_eq!(r.to_string(), "h2 h1^-1 h2^-1");
        assert_eq!(r.substitute(&g.basis(), 2), x);
    }

    #[test]
    fn folding_trims_hanging_trees() {
        let g = SubgroupGraph::build(2, &[w("a b a^-1")]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert!(g.contains(&w("a b^3 a^-1")));
        assert!(!g.contains(&w("b")));
        // base keeps a single edge, every other vertex has degree >= 2
        let g = SubgroupGraph::build(2, &[w("a b a^-1"), w("a b^2 a^-1")]).unwrap();
        assert_eq!(g.subgroup_rank(), 1);
    }
}
