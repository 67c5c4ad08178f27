//! Folding that tracks, on every edge, an element of the free group on the
//! input generators. Loops at the base then read off their expression in
//! those generators. Only succeeds when the generators are a free basis of the
//! subgroup they generate (no fold ever identifies parallel edges).

use std::collections::HashMap;

use crate::word::{Letter, Word};

#[derive(Debug, Clone)]
pub(crate) struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub generator: usize,
    /// Word over the alphabet of input generators.
    pub label: Word,
}

pub(crate) struct LabeledGraph {
    pub edges: Vec<LabeledEdge>,
}

pub(crate) fn labeled_fold(gens: &[Word]) -> Option<LabeledGraph> {
    let m = gens.len();
    let mut edges: Vec<Option<LabeledEdge>> = Vec::new();
    let mut vertices = 1usize;
    for (j, w) in gens.iter().enumerate() {
        if w.is_empty() {
            return None;
        }
        let mut cur = 0usize;
        for (i, l) in w.letters().iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                vertices += 1;
                vertices - 1
            };
            let (from, to) = if l.is_inverse() {
                (next, cur)
            } else {
                (cur, next)
            };
            // The first letter carries the generator; reading it backwards
            // (inverse letter) carries its inverse.
            let label = if i == 0 {
                let lw = Word::reduce(m, [Letter::pos(j)]).expect("in range");
                if l.is_inverse() {
                    lw.invert()
                } else {
                    lw
                }
            } else {
                Word::identity(m)
            };
            edges.push(Some(LabeledEdge {
                from,
                to,
                generator: l.generator(),
                label,
            }));
            cur = next;
        }
    }

    loop {
        // (vertex, generator, outgoing?) -> edge index
        let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
        let mut conflict = None;
        'scan: for (idx, e) in edges.iter().enumerate() {
            let Some(e) = e else { continue };
            for key in [(e.from, e.generator, true), (e.to, e.generator, false)] {
                if let Some(&other) = seen.get(&key) {
                    conflict = Some((other, idx, key.2));
                    break 'scan;
                }
                seen.insert(key, idx);
            }
        }
        let Some((e1, e2, same_from)) = conflict else {
            break;
        };
        let a = edges[e1].clone().expect("live");
        let b = edges[e2].clone().expect("live");
        let (w1, w2) = if same_from {
            (a.to, b.to)
        } else {
            (a.from, b.from)
        };
        if w1 == w2 {
            return None;
        }
        let (keep, drop, z, keep_v) = if w2 != 0 {
            (a, e2, w2, w1)
        } else {
            (b, e1, w1, w2)
        };
        let d = edges[drop].clone().expect("live");
        let c = if same_from {
            d.label.invert().multiply(&keep.label).expect("same rank")
        } else {
            d.label.multiply(&keep.label.invert()).expect("same rank")
        };
        edges[drop] = None;
        let c_inv = c.invert();
        for e in edges.iter_mut().flatten() {
            if e.from == z {
                e.label = c_inv.multiply(&e.label).expect("same rank");
            }
            if e.to == z {
                e.label = e.label.multiply(&c).expect("same rank");
            }
            if e.from == z {
                e.from = keep_v;
            }
            if e.to == z {
                e.to = keep_v;
            }
        }
    }
    Some(LabeledGraph {
        edges: edges.into_iter().flatten().collect(),
    })
}
