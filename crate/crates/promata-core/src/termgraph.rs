//! Fan-out term graphs for scalar diagrams with copy and discard.
//!
//! A term graph has occurrences of base generators only; each output port
//! is a wire with an unordered set of consumer ports. Fan-out 2 or more
//! stands for a copy tree (shape and order quotiented away), fan-out 0 for
//! a discard, and symmetries disappear entirely. This is the canonical
//! carrier for the comonoid equations; the naturality of copy is *not*
//! quotiented and is applied explicitly as fold steps.
//!
//! A fold identifies two occurrences of the same generator whose input
//! wires agree pairwise, merging their output wires; this is copy
//! naturality read right to left, with unitality absorbed by the fan-out
//! sets. Searching fold sequences decides the sub-problems of equality in
//! the free cartesian restriction prop that the library needs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{Alphabet, GenId};
use crate::diagram::Diagram;

/// A wire is identified by its producer port.
pub type TgWire = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TgOcc {
    pub gen: GenId,
    /// Ordered input ports, each referencing a producer port.
    pub inputs: Vec<TgWire>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermGraphError {
    #[error("wire has fan-out {fanout}, not 1, at occurrence {occ} port {port}")]
    FanOut {
        occ: usize,
        port: usize,
        fanout: usize,
    },
    #[error("no planar layering exists")]
    NotPlanar,
    #[error("search budget of {0} exhausted")]
    BudgetExceeded(usize),
}

/// Shared search budget for fold searches and planar layering.
#[derive(Debug)]
pub struct Budget {
    remaining: usize,
    limit: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Budget {
        Budget {
            remaining: limit,
            limit,
        }
    }

    pub fn spend(&mut self) -> Result<(), TermGraphError> {
        if self.remaining == 0 {
            return Err(TermGraphError::BudgetExceeded(self.limit));
        }
        self.remaining -= 1;
        Ok(())
    }
}

pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

/// A scalar term graph over a base alphabet. Occurrence slots may be
/// vacated by folds; ids stay stable so fold traces replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermGraph {
    pub alphabet: Arc<Alphabet>,
    pub occs: BTreeMap<usize, TgOcc>,
}

/// One fold step: `merged` was identified with `kept`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldStep {
    pub kept: usize,
    pub merged: usize,
}

impl TermGraph {
    /// Consumers of each wire, derived from the inputs.
    pub fn consumers(&self) -> BTreeMap<TgWire, BTreeSet<(usize, usize)>> {
        let mut map: BTreeMap<TgWire, BTreeSet<(usize, usize)>> = BTreeMap::new();
        for (id, occ) in &self.occs {
            for (port, wire) in occ.inputs.iter().enumerate() {
                map.entry(*wire).or_default().insert((*id, port));
            }
        }
        map
    }

    fn wires(&self) -> Vec<TgWire> {
        let mut out = Vec::new();
        for (id, occ) in &self.occs {
            for port in 0..self.alphabet.coarity(occ.gen) {
                out.push((*id, port));
            }
        }
        out
    }

    /// Pairs of occurrences that a fold may identify: same generator,
    /// pairwise identical inputs.
    pub fn fold_candidates(&self) -> Vec<FoldStep> {
        let mut out = Vec::new();
        let ids: Vec<usize> = self.occs.keys().copied().collect();
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                let (oa, ob) = (&self.occs[a], &self.occs[b]);
                if oa.gen == ob.gen && oa.inputs == ob.inputs {
                    out.push(FoldStep {
                        kept: *a,
                        merged: *b,
                    });
                }
            }
        }
        out
    }

    /// Applies a fold, or reports why it does not apply.
    pub fn fold(&self, step: FoldStep) -> Option<TermGraph> {
        let kept = self.occs.get(&step.kept)?;
        let merged = self.occs.get(&step.merged)?;
        if kept.gen != merged.gen || kept.inputs != merged.inputs {
            return None;
        }
        let mut occs = self.occs.clone();
        occs.remove(&step.merged);
        for occ in occs.values_mut() {
            for wire in occ.inputs.iter_mut() {
                if wire.0 == step.merged {
                    *wire = (step.kept, wire.1);
                }
            }
        }
        Some(TermGraph {
            alphabet: self.alphabet.clone(),
            occs,
        })
    }

    /// A canonical encoding of the graph up to occurrence renaming;
    /// iterative refinement with individualization on ties.
    pub fn canonical_key(&self) -> Vec<u64> {
        canonical_key_inner(self, &BTreeMap::new())
    }

    /// True when every wire has exactly one consumer.
    pub fn is_fanout_one(&self) -> bool {
        let consumers = self.consumers();
        self.wires().iter().all(|w| {
            consumers.get(w).map(|c| c.len()).unwrap_or(0) == 1
        })
    }

    /// Tries to lay the graph out as a planar scalar diagram over the base
    /// alphabet. Fails with `FanOut` if some wire is not used exactly
    /// once, or `NotPlanar` when no ordering of insertions embeds the
    /// graph without crossings.
    pub fn to_diagram(&self, budget: &mut Budget) -> Result<Diagram, TermGraphError> {
        self.search_layering(None, budget)?
            .ok_or(TermGraphError::NotPlanar)
    }

    /// True when some planar layering of this graph equals `target` up to
    /// isotopy. Distinct planar readings of one graph can be non-isotopic
    /// (closed components trapped in different faces), so matching must
    /// search rather than compare one reading.
    pub fn represents(
        &self,
        target: &Diagram,
        budget: &mut Budget,
    ) -> Result<bool, TermGraphError> {
        match self.search_layering(Some(target), budget) {
            Ok(Some(_)) => Ok(true),
            Ok(None) => Ok(false),
            Err(TermGraphError::FanOut { .. }) | Err(TermGraphError::NotPlanar) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn search_layering(
        &self,
        target: Option<&Diagram>,
        budget: &mut Budget,
    ) -> Result<Option<Diagram>, TermGraphError> {
        let consumers = self.consumers();
        for w in self.wires() {
            let fanout = consumers.get(&w).map(|c| c.len()).unwrap_or(0);
            if fanout != 1 {
                return Err(TermGraphError::FanOut {
                    occ: w.0,
                    port: w.1,
                    fanout,
                });
            }
        }
        let target_nf = target.map(|t| t.normalize());
        let mut state = Layering {
            graph: self,
            target: target_nf,
            seen: BTreeSet::new(),
            boundary: Vec::new(),
            steps: Vec::new(),
        };
        state.dfs(budget)
    }
}

struct Layering<'a> {
    graph: &'a TermGraph,
    target: Option<Diagram>,
    seen: BTreeSet<(Vec<usize>, Vec<TgWire>)>,
    boundary: Vec<TgWire>,
    /// Emitted `(occurrence, offset)` pairs, defining the diagram so far.
    steps: Vec<(usize, usize)>,
}

impl Layering<'_> {
    fn emitted_diagram(&self) -> Diagram {
        let alphabet = self.graph.alphabet.clone();
        let steps: Vec<crate::canonical::Step> = self
            .steps
            .iter()
            .map(|(id, offset)| crate::canonical::Step {
                offset: *offset,
                gen: self.graph.occs[id].gen,
            })
            .collect();
        Diagram::from_steps(alphabet, 0, &steps)
    }

    fn dfs(&mut self, budget: &mut Budget) -> Result<Option<Diagram>, TermGraphError> {
        budget.spend()?;
        if self.steps.len() == self.graph.occs.len() {
            debug_assert!(self.boundary.is_empty());
            let d = self.emitted_diagram();
            return match &self.target {
                None => Ok(Some(d)),
                Some(t) => {
                    if d.normalize() == *t {
                        Ok(Some(d))
                    } else {
                        Ok(None)
                    }
                }
            };
        }
        let mut key: Vec<usize> = self.steps.iter().map(|(id, _)| *id).collect();
        key.sort_unstable();
        if !self.seen.insert((key, self.boundary.clone())) {
            return Ok(None);
        }
        let done: BTreeSet<usize> = self.steps.iter().map(|(id, _)| *id).collect();
        let ids: Vec<usize> = self.graph.occs.keys().copied().collect();
        for id in ids {
            if done.contains(&id) {
                continue;
            }
            let occ = self.graph.occs[&id].clone();
            let arity = occ.inputs.len();
            let coarity = self.graph.alphabet.coarity(occ.gen);
            let produced: Vec<TgWire> = (0..coarity).map(|p| (id, p)).collect();
            if arity > 0 {
                // Inputs must appear as a contiguous in-order block.
                let Some(pos) = self
                    .boundary
                    .windows(arity)
                    .position(|win| win == occ.inputs.as_slice())
                else {
                    continue;
                };
                let removed: Vec<TgWire> = self
                    .boundary
                    .splice(pos..pos + arity, produced)
                    .collect();
                self.steps.push((id, pos));
                let found = self.dfs(budget)?;
                self.steps.pop();
                self.boundary.splice(pos..pos + coarity, removed);
                if found.is_some() {
                    return Ok(found);
                }
            } else {
                // Arity-0 occurrences may be inserted at any gap.
                for gap in 0..=self.boundary.len() {
                    self.boundary.splice(gap..gap, produced.iter().copied());
                    self.steps.push((id, gap));
                    let found = self.dfs(budget)?;
                    self.steps.pop();
                    self.boundary.splice(gap..gap + coarity, std::iter::empty());
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
        }
        Ok(None)
    }
}

fn canonical_key_inner(g: &TermGraph, pinned: &BTreeMap<usize, u64>) -> Vec<u64> {
    // Colour refinement over occurrences; wires are producer ports, so an
    // occurrence's colour refines by its input (producer colour, port)
    // list and the multiset of (consumer colour, consumer port, own port).
    let ids: Vec<usize> = g.occs.keys().copied().collect();
    let mut colour: BTreeMap<usize, u64> = ids
        .iter()
        .map(|id| {
            (
                *id,
                pinned
                    .get(id)
                    .copied()
                    .map(|p| p.wrapping_mul(31).wrapping_add(1_000_000_007))
                    .unwrap_or(g.occs[id].gen.0 as u64),
            )
        })
        .collect();
    let consumers = g.consumers();
    loop {
        let mut signatures: BTreeMap<usize, (u64, Vec<(u64, usize)>, Vec<(u64, usize, usize)>)> =
            BTreeMap::new();
        for id in &ids {
            let occ = &g.occs[id];
            let ins: Vec<(u64, usize)> = occ
                .inputs
                .iter()
                .map(|(p, port)| (colour[p], *port))
                .collect();
            let mut outs: Vec<(u64, usize, usize)> = Vec::new();
            for port in 0..g.alphabet.coarity(occ.gen) {
                if let Some(cs) = consumers.get(&(*id, port)) {
                    for (c, cport) in cs {
                        outs.push((colour[c], *cport, port));
                    }
                }
            }
            outs.sort_unstable();
            signatures.insert(*id, (colour[id], ins, outs));
        }
        let mut distinct: Vec<&(u64, Vec<(u64, usize)>, Vec<(u64, usize, usize)>)> =
            signatures.values().collect();
        distinct.sort();
        distinct.dedup();
        let rank = |sig: &(u64, Vec<(u64, usize)>, Vec<(u64, usize, usize)>)| -> u64 {
            distinct.binary_search(&sig).unwrap() as u64
        };
        let next: BTreeMap<usize, u64> = ids
            .iter()
            .map(|id| (*id, rank(&signatures[id])))
            .collect();
        if next == colour {
            break;
        }
        colour = next;
    }
    // If some colour class has more than one member, individualize the
    // smallest class and take the least key over its members.
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for id in &ids {
        classes.entry(colour[id]).or_default().push(*id);
    }
    if let Some((_, members)) = classes.iter().find(|(_, m)| m.len() > 1) {
        let mut best: Option<Vec<u64>> = None;
        for m in members {
            let mut pinned2 = pinned.clone();
            pinned2.insert(*m, (pinned.len() as u64) + 1);
            let key = canonical_key_inner(g, &pinned2);
            if best.as_ref().map(|b| key < *b).unwrap_or(true) {
                best = Some(key);
            }
        }
        return best.unwrap();
    }
    // Discrete colouring: emit occurrences by colour rank.
    let mut order: Vec<usize> = ids.clone();
    order.sort_by_key(|id| colour[id]);
    let rank_of: BTreeMap<usize, u64> = order
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i as u64))
        .collect();
    let mut key = vec![order.len() as u64];
    for id in &order {
        let occ = &g.occs[id];
        key.push(occ.gen.0 as u64);
        key.push(occ.inputs.len() as u64);
        for (p, port) in &occ.inputs {
            key.push(rank_of[p]);
            key.push(*port as u64);
        }
    }
    key
}

/// Breadth-first fold search from a starting graph. Visits graphs in fold
/// order, memoized on canonical keys; `found` returns `Some` to stop.
pub fn fold_search<T>(
    start: &TermGraph,
    budget: &mut Budget,
    mut found: impl FnMut(&TermGraph, &[FoldStep], &mut Budget) -> Result<Option<T>, TermGraphError>,
) -> Result<Option<T>, TermGraphError> {
    let mut queue: VecDeque<(TermGraph, Vec<FoldStep>)> = VecDeque::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    seen.insert(start.canonical_key());
    queue.push_back((start.clone(), Vec::new()));
    while let Some((graph, trace)) = queue.pop_front() {
        budget.spend()?;
        if let Some(t) = found(&graph, &trace, budget)? {
            return Ok(Some(t));
        }
        for step in graph.fold_candidates() {
            let folded = graph.fold(step).expect("candidate folds apply");
            if seen.insert(folded.canonical_key()) {
                let mut trace2 = trace.clone();
                trace2.push(step);
                queue.push_back((folded, trace2));
            }
        }
    }
    Ok(None)
}
