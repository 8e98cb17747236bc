//! Elements of the Leavitt path algebra and their canonical normal form.
//!
//! An element is a finite linear combination of monomials αβ* where α and β
//! are paths with a common range; β is stored unreversed, its semantics is
//! the ghost path β*. The canonical basis consists of the monomials that
//! are not reducible at the middle junction: αβ* is reducible exactly when
//! α and β both end in the designated edge (the lexicographically smallest
//! out-edge) of a common regular vertex. One application of the CK-2
//! relation at that vertex trades such a monomial for the shorter α₀β₀*
//! minus the sibling monomials (α₀e)(β₀e)*, which are already irreducible;
//! recursion on the shrinking middle terminates. Two elements are equal in
//! the algebra iff their normal forms have identical term maps.

use crate::field::{Field, Scalar};
use crate::graph::{
    EdgeKind, EdgeRef, Graph, ImageKind, Path, QuotientPresentation, VertexId,
};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("monomial ranges differ: r(alpha) = `{alpha}`, r(beta) = `{beta}`")]
    RangeMismatch { alpha: String, beta: String },
    #[error("elements live over different graphs")]
    MixedAmbient,
    #[error("elements live over different fields")]
    MixedField,
    #[error("`{0}` is not a breaking vertex for the given set")]
    NotBreakingVertex(String),
    #[error("element is not over the source graph of this quotient")]
    WrongSourceGraph,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// A monomial αβ*. Orders by total length, then by the two paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    alpha: Path,
    beta: Path,
}

impl Monomial {
    pub fn new(graph: &Graph, alpha: Path, beta: Path) -> Result<Monomial, AlgebraError> {
        if alpha.dst() != beta.dst() {
            return Err(AlgebraError::RangeMismatch {
                alpha: graph.vertex_name(alpha.dst()).to_string(),
                beta: graph.vertex_name(beta.dst()).to_string(),
            });
        }
        Ok(Monomial { alpha, beta })
    }

    pub fn vertex(v: VertexId) -> Monomial {
        Monomial {
            alpha: Path::vertex(v),
            beta: Path::vertex(v),
        }
    }

    /// The real path μ as a monomial μ·r(μ)*.
    pub fn real(path: Path) -> Monomial {
        let beta = Path::vertex(path.dst());
        Monomial { alpha: path, beta }
    }

    /// The ghost path μ* as a monomial r(μ)·μ*.
    pub fn ghost(path: Path) -> Monomial {
        let alpha = Path::vertex(path.dst());
        Monomial { alpha, beta: path }
    }

    pub fn alpha(&self) -> &Path {
        &self.alpha
    }

    pub fn beta(&self) -> &Path {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len() + self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Source vertex of the monomial as an operator: s(α).
    pub fn src(&self) -> VertexId {
        self.alpha.src()
    }

    /// Range vertex: s(β) (the monomial maps into the β-corner).
    pub fn range(&self) -> VertexId {
        self.beta.src()
    }

    pub fn flip(&self) -> Monomial {
        Monomial {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// Product of two monomials before any CK-2 rewriting: a single
    /// monomial or zero, by cancelling the ghost middle against the real
    /// middle with the CK-1 relations.
    pub fn product(&self, graph: &Graph, rhs: &Monomial) -> Option<Monomial> {
        if self.beta.src() != rhs.alpha.src() {
            return None;
        }
        let b = self.beta.steps();
        let g = rhs.alpha.steps();
        if g.starts_with(b) {
            // (αβ*)(βγ'δ*) = (αγ')δ*
            let alpha = self.alpha.join(graph, &g[b.len()..]);
            Some(Monomial {
                alpha,
                beta: rhs.beta.clone(),
            })
        } else if b.starts_with(g) {
            // (α(γβ')*)(γδ*) = α(δβ')*
            let beta = rhs.beta.join(graph, &b[g.len()..]);
            Some(Monomial {
                alpha: self.alpha.clone(),
                beta,
            })
        } else {
            None
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| self.beta.cmp(&other.beta))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite linear combination of monomials over a fixed graph and field.
/// No zero coefficients are stored; the zero element has an empty map.
#[derive(Debug, Clone)]
pub struct Element {
    graph: Arc<Graph>,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.terms == other.terms
            && (Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph)
    }
}
impl Eq for Element {}

fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Element {
    pub fn zero(graph: Arc<Graph>, field: Field) -> Element {
        Element {
            graph,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn vertex(graph: Arc<Graph>, field: Field, v: VertexId) -> Element {
        let one = field.one();
        Element::zero(graph, field).with_term(Monomial::vertex(v), one)
    }

    pub fn edge(graph: Arc<Graph>, field: Field, r: EdgeRef) -> Element {
        let m = Monomial::real(Path::single(&graph, r));
        let one = field.one();
        Element::zero(graph, field).with_term(m, one)
    }

    pub fn ghost_edge(graph: Arc<Graph>, field: Field, r: EdgeRef) -> Element {
        let m = Monomial::ghost(Path::single(&graph, r));
        let one = field.one();
        Element::zero(graph, field).with_term(m, one)
    }

    pub fn monomial(graph: Arc<Graph>, field: Field, m: Monomial) -> Element {
        let one = field.one();
        Element::zero(graph, field).with_term(m, one)
    }

    pub fn from_terms(
        graph: Arc<Graph>,
        field: Field,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Element {
        let mut e = Element::zero(graph, field);
        for (m, k) in terms {
            assert_eq!(k.field(), field, "coefficient field mismatch");
            e.accumulate(m, k);
        }
        e
    }

    fn with_term(mut self, m: Monomial, k: Scalar) -> Element {
        self.accumulate(m, k);
        self
    }

    fn accumulate(&mut self, m: Monomial, k: Scalar) {
        if k.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(k);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&k);
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn scalar_mul(&self, k: &Scalar) -> Element {
        assert_eq!(k.field(), self.field, "coefficient field mismatch");
        if k.is_zero() {
            return Element::zero(Arc::clone(&self.graph), self.field);
        }
        Element {
            graph: Arc::clone(&self.graph),
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(k)))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Element) -> Element {
        assert!(same_graph(&self.graph, &rhs.graph), "mixed ambient graphs");
        assert_eq!(self.field, rhs.field, "mixed fields");
        let mut out = self.clone();
        for (m, k) in &rhs.terms {
            out.accumulate(m.clone(), k.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        Element {
            graph: Arc::clone(&self.graph),
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Element) -> Element {
        self.add(&rhs.neg())
    }

    /// Rewrite every monomial to the canonical basis. Idempotent; two
    /// elements are equal in the algebra iff their normal forms agree.
    pub fn normal_form(&self) -> Element {
        let mut out = Element::zero(Arc::clone(&self.graph), self.field);
        let mut work: Vec<(Monomial, Scalar)> = self
            .terms
            .iter()
            .map(|(m, k)| (m.clone(), k.clone()))
            .collect();
        while let Some((m, k)) = work.pop() {
            if k.is_zero() {
                continue;
            }
            match self.reduction_site(&m) {
                None => out.accumulate(m, k),
                Some((alpha0, beta0, junction, f)) => {
                    for &e in self.graph.out_edges(junction) {
                        if e == f {
                            continue;
                        }
                        let step = EdgeRef::ordinary(e);
                        work.push((
                            Monomial {
                                alpha: alpha0.join(&self.graph, &[step]),
                                beta: beta0.join(&self.graph, &[step]),
                            },
                            k.neg(),
                        ));
                    }
                    work.push((
                        Monomial {
                            alpha: alpha0,
                            beta: beta0,
                        },
                        k,
                    ));
                }
            }
        }
        out
    }

    /// A monomial reduces iff α and β end in the same edge and that edge is
    /// the designated edge of its (regular) source.
    fn reduction_site(&self, m: &Monomial) -> Option<(Path, Path, VertexId, crate::graph::EdgeId)> {
        let (alpha0, fa) = m.alpha.split_last(&self.graph)?;
        let (beta0, fb) = m.beta.split_last(&self.graph)?;
        if fa != fb || self.graph.edge_kind(fa.edge) != EdgeKind::Ordinary {
            return None;
        }
        let junction = self.graph.edge_src(fa.edge);
        if self.graph.designated_edge(junction) == Some(fa.edge) {
            Some((alpha0, beta0, junction, fa.edge))
        } else {
            None
        }
    }

    /// Bilinear product, returned in normal form.
    pub fn multiply(&self, rhs: &Element) -> Result<Element, AlgebraError> {
        if !same_graph(&self.graph, &rhs.graph) {
            return Err(AlgebraError::MixedAmbient);
        }
        if self.field != rhs.field {
            return Err(AlgebraError::MixedField);
        }
        let mut raw = Element::zero(Arc::clone(&self.graph), self.field);
        for (m1, k1) in &self.terms {
            for (m2, k2) in &rhs.terms {
                if let Some(m) = m1.product(&self.graph, m2) {
                    raw.accumulate(m, k1.mul(k2));
                }
            }
        }
        Ok(raw.normal_form())
    }

    /// Term-wise adjoint αβ* ↦ βα*; an involutive anti-automorphism.
    pub fn involution(&self) -> Element {
        Element {
            graph: Arc::clone(&self.graph),
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.flip(), k.clone()))
                .collect(),
        }
    }

    /// All bundle indices referenced by the element's paths.
    pub fn bundle_indices(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for r in m.alpha.steps().iter().chain(m.beta.steps()) {
                if self.graph.edge_kind(r.edge) == EdgeKind::Bundle {
                    out.insert(r.index);
                }
            }
        }
        out
    }
}

fn fmt_monomial(graph: &Graph, m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if m.is_empty() {
        return write!(f, "{}", graph.vertex_name(m.alpha().src()));
    }
    let mut first = true;
    for r in m.alpha().steps() {
        if !first {
            write!(f, ".")?;
        }
        first = false;
        write!(f, "{}", graph.display_edge_ref(*r))?;
    }
    for r in m.beta().steps().iter().rev() {
        if !first {
            write!(f, ".")?;
        }
        first = false;
        write!(f, "{}*", graph.display_edge_ref(*r))?;
    }
    Ok(())
}

impl fmt::Display for Element {
    /// Canonical rendering: terms in monomial order, joined by ` + ` or
    /// ` - `; prime-field coefficients print as bare residues. Re-parsing
    /// the output recovers the element.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, k) in &self.terms {
            let (mag, negative) = if k.is_negative() {
                (k.neg(), true)
            } else {
                (k.clone(), false)
            };
            if first {
                if negative {
                    write!(f, "-")?;
                    if mag.is_one() {
                        write!(f, "1*")?;
                    }
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !mag.is_one() {
                match &mag {
                    Scalar::Rat(r) => write!(f, "{r}*")?,
                    Scalar::Mod { value, .. } => write!(f, "{value}*")?,
                }
            }
            fmt_monomial(&self.graph, m, f)?;
            first = false;
        }
        Ok(())
    }
}

/// The element v^H of a breaking vertex: v minus Σ ee* over the finitely
/// many ordinary out-edges of v whose range avoids H. An idempotent,
/// already in normal form.
pub fn breaking_element(
    graph: &Arc<Graph>,
    field: Field,
    h: &std::collections::BTreeSet<VertexId>,
    v: VertexId,
) -> Result<Element, AlgebraError> {
    let breaking = graph.breaking_vertices(h)?;
    if !breaking.contains(&v) {
        return Err(AlgebraError::NotBreakingVertex(
            graph.vertex_name(v).to_string(),
        ));
    }
    let mut out = Element::vertex(Arc::clone(graph), field, v);
    for &e in graph.out_edges(v) {
        if graph.edge_kind(e) == EdgeKind::Ordinary && !h.contains(&graph.edge_dst(e)) {
            let path = Path::single(graph, EdgeRef::ordinary(e));
            let m = Monomial::new(graph, path.clone(), path).expect("ee* is well formed");
            out.accumulate(m, field.one().neg());
        }
    }
    Ok(out)
}

impl QuotientPresentation {
    /// Image of a source vertex under the quotient epimorphism.
    pub fn vertex_image(&self, field: Field, v: VertexId) -> Element {
        let qg = Arc::clone(self.graph());
        match self.vertex_image_kind(v) {
            ImageKind::Zero => Element::zero(qg, field),
            ImageKind::Kept(q) => Element::vertex(qg, field, q),
            ImageKind::WithPrime(q, p) => {
                let main = Element::vertex(Arc::clone(&qg), field, q);
                main.add(&Element::vertex(qg, field, p))
            }
        }
    }

    /// Image of a concrete source edge, member-wise for bundles.
    pub fn edge_ref_image(&self, field: Field, r: EdgeRef) -> Element {
        let qg = Arc::clone(self.graph());
        match self.edge_image_kind(r.edge) {
            ImageKind::Zero => Element::zero(qg, field),
            ImageKind::Kept(q) => Element::edge(
                qg,
                field,
                EdgeRef {
                    edge: q,
                    index: r.index,
                },
            ),
            ImageKind::WithPrime(q, p) => {
                let main = Element::edge(
                    Arc::clone(&qg),
                    field,
                    EdgeRef {
                        edge: q,
                        index: r.index,
                    },
                );
                main.add(&Element::edge(
                    qg,
                    field,
                    EdgeRef {
                        edge: p,
                        index: r.index,
                    },
                ))
            }
        }
    }

    fn path_image(&self, field: Field, p: &Path) -> Result<Element, AlgebraError> {
        if p.is_empty() {
            return Ok(self.vertex_image(field, p.src()));
        }
        let mut acc = self.edge_ref_image(field, p.steps()[0]);
        for r in &p.steps()[1..] {
            if acc.is_zero() {
                break;
            }
            acc = acc.multiply(&self.edge_ref_image(field, *r))?;
        }
        Ok(acc)
    }

    /// Apply the quotient epimorphism: substitute generator images into
    /// each monomial and multiply out in the quotient algebra. A ring
    /// homomorphism with kernel the graded ideal of the pair.
    pub fn apply_phi(&self, x: &Element) -> Result<Element, AlgebraError> {
        if !same_graph(x.graph(), self.source()) {
            return Err(AlgebraError::WrongSourceGraph);
        }
        let field = x.field();
        let mut acc = Element::zero(Arc::clone(self.graph()), field);
        for (m, k) in x.terms() {
            let a = self.path_image(field, m.alpha())?;
            let b = self.path_image(field, m.beta())?;
            let img = a.multiply(&b.involution())?;
            acc = acc.add(&img.scalar_mul(k));
        }
        Ok(acc.normal_form())
    }

    /// Exact decision of membership in the graded ideal of the pair:
    /// x ∈ I_(H,S) iff its image vanishes.
    pub fn graded_membership(&self, x: &Element) -> Result<bool, AlgebraError> {
        Ok(self.apply_phi(x)?.is_zero())
    }
}
