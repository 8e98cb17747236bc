//! Bounded brute-force membership oracle for two-sided ideals, producing
//! machine-checkable witnesses.
//!
//! Membership of x in the two-sided ideal generated by g₁..gₙ is searched
//! inside the span of the products m₁·gᵢ·m₂ over basis-reduced monomials
//! m₁, m₂ of bounded length, by exact linear algebra in basis coordinates.
//! A positive answer comes with the combination that evaluates to x; a
//! negative answer only says "not found within bound" — two-sided
//! membership carries no a-priori degree bound, so the oracle is a
//! semi-decision by design.
//!
//! Bundles have infinitely many members; the enumeration uses the indices
//! mentioned by the generators and the target plus the representatives 0
//! and 1, which keeps the search finite and deterministic.

use crate::algebra::{AlgebraError, Element, Monomial};
use crate::field::{Field, Scalar};
use crate::graph::{EdgeKind, EdgeRef, Graph, Path, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// One summand k · m₁ · gens[generator] · m₂ of a membership combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTerm {
    pub scalar: Scalar,
    pub left: Monomial,
    pub generator: usize,
    pub right: Monomial,
}

/// A verified combination: evaluating it and normalizing reproduces the
/// queried element exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub combination: Vec<WitnessTerm>,
    /// Maximum monomial length that was searched; 0 when the combination
    /// was derived algebraically rather than found by search.
    pub bound: u32,
}

impl MembershipWitness {
    pub fn evaluate(
        &self,
        graph: &Arc<Graph>,
        field: Field,
        gens: &[Element],
    ) -> Result<Element, AlgebraError> {
        let mut acc = Element::zero(Arc::clone(graph), field);
        for t in &self.combination {
            let left = Element::monomial(Arc::clone(graph), field, t.left.clone());
            let right = Element::monomial(Arc::clone(graph), field, t.right.clone());
            let prod = left.multiply(&gens[t.generator])?.multiply(&right)?;
            acc = acc.add(&prod.scalar_mul(&t.scalar));
        }
        Ok(acc.normal_form())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Witness(MembershipWitness),
    /// Inconclusive: nothing found within the bound. Never a negative
    /// certificate.
    NotFoundWithinBound { bound: u32 },
}

/// All paths of length <= max_len, bundle steps drawn from `indices`.
fn enumerate_paths(graph: &Graph, max_len: u32, indices: &BTreeSet<u64>) -> Vec<Path> {
    let mut by_len: Vec<Vec<Path>> = vec![graph.vertex_ids().map(Path::vertex).collect()];
    for _ in 1..=max_len {
        let prev = by_len.last().unwrap();
        let mut next = Vec::new();
        for p in prev {
            for &e in graph.out_edges(p.dst()) {
                match graph.edge_kind(e) {
                    EdgeKind::Ordinary => next.push(p.join(graph, &[EdgeRef::ordinary(e)])),
                    EdgeKind::Bundle => {
                        for &k in indices {
                            next.push(p.join(graph, &[EdgeRef { edge: e, index: k }]));
                        }
                    }
                }
            }
        }
        by_len.push(next);
    }
    by_len.into_iter().flatten().collect()
}

/// Basis-reduced monomials αβ* with |α| + |β| <= max_len, in canonical
/// order.
fn enumerate_monomials(graph: &Arc<Graph>, max_len: u32, indices: &BTreeSet<u64>) -> Vec<Monomial> {
    let paths = enumerate_paths(graph, max_len, indices);
    let mut by_range: BTreeMap<VertexId, Vec<&Path>> = BTreeMap::new();
    for p in &paths {
        by_range.entry(p.dst()).or_default().push(p);
    }
    let probe = Element::zero(Arc::clone(graph), Field::Rationals);
    let mut out = Vec::new();
    for group in by_range.values() {
        for &a in group {
            for &b in group {
                if a.len() + b.len() > max_len as usize {
                    continue;
                }
                let m = Monomial::new(graph, a.clone(), b.clone()).expect("common range");
                // keep only basis monomials
                if Element::monomial(Arc::clone(graph), Field::Rationals, m.clone())
                    .normal_form()
                    .terms()
                    .contains_key(&m)
                {
                    out.push(m);
                }
            }
        }
    }
    drop(probe);
    out.sort();
    out.dedup();
    out
}

struct SpanRow {
    lead: Monomial,
    vec: BTreeMap<Monomial, Scalar>,
    combo: Vec<WitnessTerm>,
}

fn scaled_combo(combo: &[WitnessTerm], k: &Scalar) -> Vec<WitnessTerm> {
    combo
        .iter()
        .map(|t| WitnessTerm {
            scalar: t.scalar.mul(k),
            left: t.left.clone(),
            generator: t.generator,
            right: t.right.clone(),
        })
        .collect()
}

fn sub_scaled(
    vec: &mut BTreeMap<Monomial, Scalar>,
    row: &BTreeMap<Monomial, Scalar>,
    k: &Scalar,
) {
    for (m, c) in row {
        let delta = c.mul(k);
        match vec.entry(m.clone()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                let v = delta.neg();
                if !v.is_zero() {
                    e.insert(v);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().sub(&delta);
                if v.is_zero() {
                    e.remove();
                } else {
                    e.insert(v);
                }
            }
        }
    }
}

/// Reduce `vec` against the echelon rows; whenever a row's lead is hit the
/// row's combination (scaled) is appended to `combo`.
fn reduce(
    vec: &mut BTreeMap<Monomial, Scalar>,
    combo: &mut Vec<WitnessTerm>,
    rows: &[SpanRow],
) {
    for row in rows {
        if let Some(c) = vec.get(&row.lead).cloned() {
            sub_scaled(vec, &row.vec, &c);
            combo.extend(scaled_combo(&row.combo, &c));
        }
    }
}

/// Search for x in the two-sided ideal generated by `gens`, scanning
/// products of basis monomials up to `max_len` on each side. Deterministic
/// in (gens, x, max_len, field).
pub fn membership_oracle(
    gens: &[Element],
    target: &Element,
    max_len: u32,
) -> Result<OracleOutcome, AlgebraError> {
    let graph = Arc::clone(target.graph());
    let field = target.field();
    for g in gens {
        if !(Arc::ptr_eq(g.graph(), &graph) || g.graph() == &graph) {
            return Err(AlgebraError::MixedAmbient);
        }
        if g.field() != field {
            return Err(AlgebraError::MixedField);
        }
    }

    let mut residual: BTreeMap<Monomial, Scalar> = target.normal_form().terms().clone();
    let mut target_combo: Vec<WitnessTerm> = Vec::new();
    if residual.is_empty() {
        return Ok(OracleOutcome::Witness(MembershipWitness {
            combination: Vec::new(),
            bound: max_len,
        }));
    }

    let mut indices: BTreeSet<u64> = [0, 1].into();
    indices.extend(target.bundle_indices());
    for g in gens {
        indices.extend(g.bundle_indices());
    }

    let monomials = enumerate_monomials(&graph, max_len, &indices);
    let mut rows: Vec<SpanRow> = Vec::new();

    // candidates ordered by total factor length, then by the factors
    let mut order: Vec<(usize, usize)> = Vec::new();
    for i in 0..monomials.len() {
        for j in 0..monomials.len() {
            order.push((i, j));
        }
    }
    order.sort_by_key(|&(i, j)| (monomials[i].len() + monomials[j].len(), i, j));

    for (i, j) in order {
        for (gi, gen) in gens.iter().enumerate() {
            let left = Element::monomial(Arc::clone(&graph), field, monomials[i].clone());
            let right = Element::monomial(Arc::clone(&graph), field, monomials[j].clone());
            let prod = left.multiply(gen)?.multiply(&right)?;
            if prod.is_zero() {
                continue;
            }
            let mut vec = prod.terms().clone();
            let mut combo = vec![WitnessTerm {
                scalar: field.one(),
                left: monomials[i].clone(),
                generator: gi,
                right: monomials[j].clone(),
            }];
            reduce(&mut vec, &mut combo, &rows);
            let Some((lead, c)) = vec.iter().next().map(|(m, c)| (m.clone(), c.clone())) else {
                continue;
            };
            // normalize the new pivot to 1: combo tracks vec = Σ combo - ...
            // invariant per row: vec = Σ_t t.scalar · m₁ gᵢ m₂ (the combo
            // evaluates to vec); scale both.
            let inv = c.inverse();
            let vec: BTreeMap<Monomial, Scalar> =
                vec.iter().map(|(m, k)| (m.clone(), k.mul(&inv))).collect();
            let combo = scaled_combo(&combo, &inv);
            // keep existing rows reduced against the new lead
            for row in &mut rows {
                if let Some(k) = row.vec.get(&lead).cloned() {
                    sub_scaled(&mut row.vec, &vec, &k);
                    row.combo.extend(scaled_combo(&combo, &k));
                }
            }
            // reduce the residual with the new row
            if let Some(k) = residual.get(&lead).cloned() {
                sub_scaled(&mut residual, &vec, &k);
                target_combo.extend(scaled_combo(&combo, &k));
                if residual.is_empty() {
                    return Ok(OracleOutcome::Witness(MembershipWitness {
                        combination: target_combo,
                        bound: max_len,
                    }));
                }
            }
            rows.push(SpanRow { lead, vec, combo });
            rows.sort_by(|a, b| a.lead.cmp(&b.lead));
        }
    }
    Ok(OracleOutcome::NotFoundWithinBound { bound: max_len })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn vertex_el(g: &Arc<Graph>, name: &str) -> Element {
        Element::vertex(Arc::clone(g), q(), g.resolve_vertex(name).unwrap())
    }

    fn edge_el(g: &Arc<Graph>, name: &str) -> Element {
        Element::edge(Arc::clone(g), q(), g.edge_ref(name, None).unwrap())
    }

    #[test]
    fn finds_cube_in_vertex_ideal() {
        let g = r1();
        let loop_el = edge_el(&g, "g");
        let cube = loop_el
            .multiply(&loop_el)
            .unwrap()
            .multiply(&loop_el)
            .unwrap();
        let gens = [vertex_el(&g, "v")];
        match membership_oracle(&gens, &cube, 3).unwrap() {
            OracleOutcome::Witness(w) => {
                assert_eq!(w.combination.len(), 1);
                assert_eq!(w.evaluate(&g, q(), &gens).unwrap(), cube);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn sink_ideal_misses_other_vertex() {
        let t = toeplitz();
        let gens = [vertex_el(&t, "w")];
        let target = vertex_el(&t, "v");
        assert_eq!(
            membership_oracle(&gens, &target, 4).unwrap(),
            OracleOutcome::NotFoundWithinBound { bound: 4 }
        );
    }

    #[test]
    fn reflexive_membership() {
        let t = toeplitz();
        let x = vertex_el(&t, "v")
            .add(&edge_el(&t, "e"))
            .add(&vertex_el(&t, "w").scalar_mul(&q().integer(2)));
        let gens = [x.clone()];
        match membership_oracle(&gens, &x, 2).unwrap() {
            OracleOutcome::Witness(w) => {
                assert_eq!(w.evaluate(&t, q(), &gens).unwrap(), x);
                assert!(w.combination.iter().all(|t| t.left.len() == 0));
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn zero_target_has_empty_witness() {
        let g = r1();
        let gens = [vertex_el(&g, "v")];
        match membership_oracle(&gens, &Element::zero(Arc::clone(&g), q()), 0).unwrap() {
            OracleOutcome::Witness(w) => assert!(w.combination.is_empty()),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn breaking_element_lies_in_principal_ideal() {
        // v - gg* belongs to <v + g> on the loop-plus-bundle graph
        let g = bprime();
        let h = set(&g, &["h"]);
        let v = g.resolve_vertex("v").unwrap();
        let vh = crate::algebra::breaking_element(&g, q(), &h, v).unwrap();
        let a = vertex_el(&g, "v").add(&edge_el(&g, "g"));
        let gens = [a];
        match membership_oracle(&gens, &vh, 4).unwrap() {
            OracleOutcome::Witness(w) => {
                assert_eq!(w.evaluate(&g, q(), &gens).unwrap(), vh);
            }
            other => panic!("expected witness at bound 4, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let g = r1();
        let t = toeplitz();
        let gens = [vertex_el(&t, "v")];
        assert!(matches!(
            membership_oracle(&gens, &vertex_el(&g, "v"), 2),
            Err(AlgebraError::MixedAmbient)
        ));
    }
}
