//! Dataflow structure of a diagram: occurrences, wires, connectivity.
//!
//! The DAG forgets slicing but keeps ports in order. It drives connectivity
//! tests, the tensor factorization of scalar diagrams, and the
//! downward-closed cuts used for causal histories.

use std::collections::BTreeSet;

use crate::alphabet::GenId;
use crate::canonical::Step;
use crate::diagram::{Diagram, DiagramError};

/// Identifier of a wire within a [`DataflowDag`].
pub type WireId = usize;

/// Identifier of an occurrence within a [`DataflowDag`]; occurrences are
/// numbered in canonical firing order.
pub type OccId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub gen: GenId,
    pub inputs: Vec<WireId>,
    pub outputs: Vec<WireId>,
}

/// End of a wire: an occurrence port, or the diagram boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Boundary(usize),
    Occ(OccId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireInfo {
    pub producer: Port,
    pub consumer: Port,
}

/// Occurrences and wires of a diagram, extracted from its canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowDag {
    pub occurrences: Vec<Occurrence>,
    pub wires: Vec<WireInfo>,
    /// Wires entering the diagram, in boundary order.
    pub input_wires: Vec<WireId>,
    /// Wires leaving the diagram, in boundary order.
    pub output_wires: Vec<WireId>,
}

impl DataflowDag {
    /// Occurrences that produce some input wire of `occ`.
    pub fn predecessors(&self, occ: OccId) -> BTreeSet<OccId> {
        self.occurrences[occ]
            .inputs
            .iter()
            .filter_map(|w| match self.wires[*w].producer {
                Port::Occ(o, _) => Some(o),
                Port::Boundary(_) => None,
            })
            .collect()
    }

    /// Connected components over occurrences (two occurrences are adjacent
    /// when they share a wire). Boundary wires do not connect occurrences.
    pub fn components(&self) -> Vec<BTreeSet<OccId>> {
        let n = self.occurrences.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut x = x;
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for w in &self.wires {
            if let (Port::Occ(a, _), Port::Occ(b, _)) = (w.producer, w.consumer) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut comps: std::collections::BTreeMap<usize, BTreeSet<OccId>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().insert(i);
        }
        // Sort components by their earliest occurrence.
        let mut out: Vec<BTreeSet<OccId>> = comps.into_values().collect();
        out.sort_by_key(|c| *c.iter().next().unwrap());
        out
    }
}

/// Extracts the dataflow DAG of a diagram. Round-tripping through
/// [`Diagram::normalize`] preserves the DAG up to isomorphism.
pub fn dataflow_dag(d: &Diagram) -> DataflowDag {
    let d = d.normalize();
    dag_of_steps(&d)
}

fn dag_of_steps(d: &Diagram) -> DataflowDag {
    let alpha = d.alphabet();
    let steps = d.steps();
    let mut wires: Vec<WireInfo> = Vec::new();
    let mut occurrences: Vec<Occurrence> = Vec::new();
    let mut boundary: Vec<WireId> = (0..d.arity())
        .map(|i| {
            wires.push(WireInfo {
                producer: Port::Boundary(i),
                consumer: Port::Boundary(usize::MAX), // patched when it survives
            });
            i
        })
        .collect();
    let input_wires = boundary.clone();
    for (occ, s) in steps.iter().enumerate() {
        let ar = alpha.arity(s.gen);
        let co = alpha.coarity(s.gen);
        let consumed: Vec<WireId> = boundary.splice(s.offset..s.offset + ar, (0..co).map(|p| {
            wires.push(WireInfo {
                producer: Port::Occ(occ, p),
                consumer: Port::Boundary(usize::MAX),
            });
            wires.len() - 1
        })).collect();
        for (p, w) in consumed.iter().enumerate() {
            wires[*w].consumer = Port::Occ(occ, p);
        }
        let outputs: Vec<WireId> = boundary[s.offset..s.offset + co].to_vec();
        occurrences.push(Occurrence {
            gen: s.gen,
            inputs: consumed,
            outputs,
        });
    }
    for (i, w) in boundary.iter().enumerate() {
        wires[*w].consumer = Port::Boundary(i);
    }
    DataflowDag {
        occurrences,
        wires,
        input_wires,
        output_wires: boundary,
    }
}

/// True when the diagram's DAG has exactly one connected component. The
/// empty diagram is not connected.
pub fn is_connected(d: &Diagram) -> bool {
    dataflow_dag(d).components().len() == 1
}

/// Decomposes a scalar diagram into tensor-indecomposable factors. The
/// tensor of the returned factors equals the input up to isotopy; the empty
/// diagram yields an empty list.
///
/// A factor is usually a single connected component of the DAG; a closed
/// component sitting inside a face of another (a "bubble") cannot be pulled
/// out by isotopy and stays grouped with its shell.
pub fn connected_components(d: &Diagram) -> Result<Vec<Diagram>, DiagramError> {
    if !d.is_scalar() {
        return Err(DiagramError::NotScalar);
    }
    let nf = d.normalize();
    let steps = nf.steps();
    if steps.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for group in crate::canonical::top_level_factors(nf.alphabet(), &steps) {
        let keep: BTreeSet<OccId> = group.into_iter().collect();
        out.push(extract(&nf, &steps, &keep).normalize());
    }
    Ok(out)
}

/// Restricts a scalar step sequence to a wire-closed set of occurrences,
/// recomputing offsets.
fn extract(d: &Diagram, steps: &[Step], keep: &BTreeSet<OccId>) -> Diagram {
    let alpha = d.alphabet();
    // Boundary flags: true when the wire belongs to a kept occurrence.
    let mut boundary: Vec<bool> = Vec::new();
    let mut out_steps: Vec<Step> = Vec::new();
    for (occ, s) in steps.iter().enumerate() {
        let ar = alpha.arity(s.gen);
        let co = alpha.coarity(s.gen);
        let kept = keep.contains(&occ);
        if kept {
            let offset = boundary[..s.offset].iter().filter(|b| **b).count();
            debug_assert!(boundary[s.offset..s.offset + ar].iter().all(|b| *b));
            out_steps.push(Step {
                offset,
                gen: s.gen,
            });
        } else {
            debug_assert!(boundary[s.offset..s.offset + ar].iter().all(|b| !*b));
        }
        boundary.splice(s.offset..s.offset + ar, std::iter::repeat(kept).take(co));
    }
    Diagram::from_steps(alpha.clone(), 0, &out_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::alphabets;

    #[test]
    fn empty_dag() {
        let a = alphabets::bones();
        let dag = dataflow_dag(&Diagram::empty(a));
        assert!(dag.occurrences.is_empty());
        assert!(dag.wires.is_empty());
    }

    #[test]
    fn bone_dag_shape() {
        let a = alphabets::bones();
        let bone = Diagram::build(&a, 0, &[&["u"], &["v"]]).unwrap();
        let dag = dataflow_dag(&bone);
        assert_eq!(dag.occurrences.len(), 2);
        assert_eq!(dag.wires.len(), 1);
        assert_eq!(dag.predecessors(1), BTreeSet::from([0]));
    }

    #[test]
    fn example13_delta_depends_only_on_gamma() {
        let a = alphabets::example13();
        let member = Diagram::build(
            &a,
            0,
            &[&["gamma"], &["-", "b", "b", "-"], &["delta"]],
        )
        .unwrap();
        let dag = dataflow_dag(&member);
        // Canonical order: gamma first, then the two b's, then delta.
        let delta = dag
            .occurrences
            .iter()
            .position(|o| a.name(o.gen) == "delta")
            .unwrap();
        assert_eq!(dag.predecessors(delta), BTreeSet::from([0]));
    }

    #[test]
    fn empty_diagram_has_no_components() {
        let a = alphabets::bones();
        assert!(connected_components(&Diagram::empty(a)).unwrap().is_empty());
    }

    #[test]
    fn two_bones_split() {
        let a = alphabets::bones();
        let bone = Diagram::build(&a, 0, &[&["u"], &["v"]]).unwrap();
        let two = bone.tensor(&bone).unwrap();
        let comps = connected_components(&two).unwrap();
        assert_eq!(comps.len(), 2);
        for c in &comps {
            assert!(c.equivalent(&bone).unwrap());
            assert!(is_connected(c));
        }
    }

    #[test]
    fn connected_member_is_single_component() {
        let a = alphabets::example13();
        let member = Diagram::build(
            &a,
            0,
            &[&["gamma"], &["-", "b", "b", "-"], &["delta"]],
        )
        .unwrap();
        let comps = connected_components(&member).unwrap();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].equivalent(&member).unwrap());
    }

    #[test]
    fn bubble_stays_with_its_shell() {
        // A bone enclosed between the two wires of open/close over the
        // Dyck alphabet: the DAG has two components but no tensor split.
        let a = alphabets::dyck();
        let bubble = Diagram::build(
            &a,
            0,
            &[
                &["top"],
                &["open"],
                &["-", "top", "-"],
                &["-", "bot", "-"],
                &["close"],
                &["bot"],
            ],
        )
        .unwrap();
        let dag = dataflow_dag(&bubble);
        assert_eq!(dag.components().len(), 2);
        let comps = connected_components(&bubble).unwrap();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].equivalent(&bubble).unwrap());
        assert!(!is_connected(&bubble));
    }

    #[test]
    fn factors_tensor_back() {
        let a = alphabets::dyck();
        let paren = Diagram::build(&a, 0, &[&["top"], &["open"], &["close"], &["bot"]]).unwrap();
        let bone = Diagram::build(&a, 0, &[&["top"], &["bot"]]).unwrap();
        let d = paren.tensor(&bone).unwrap().tensor(&paren).unwrap();
        let comps = connected_components(&d).unwrap();
        assert_eq!(comps.len(), 3);
        let mut acc = Diagram::empty(a);
        for c in &comps {
            acc = acc.tensor(c).unwrap();
        }
        assert!(acc.equivalent(&d).unwrap());
    }
}
