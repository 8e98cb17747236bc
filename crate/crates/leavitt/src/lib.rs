//! Exact computation in Leavitt path algebras of finitely presented graphs.
//!
//! The crate is organized around four layers:
//!
//! * [`graph`] — directed graphs with ordinary edges and ω-bundles
//!   (finitely described countably-infinite families of parallel edges),
//!   structural classification, hereditary saturated closures, cycle
//!   analysis, Conditions (L)/(K), breaking vertices, and quotient graphs.
//! * [`field`] / [`poly`] — exact coefficient arithmetic: arbitrary-precision
//!   rationals and prime fields GF(p), and univariate polynomials with an
//!   extended-Euclidean gcd.
//! * [`algebra`] / [`oracle`] — elements of the Leavitt path algebra as
//!   linear combinations of monomials αβ*, canonical normal form under the
//!   CK relations, multiplication, involution, the quotient epimorphism,
//!   and a bounded ideal-membership oracle producing checkable witnesses.
//! * [`ideal`] — structured two-sided ideal generators, canonicalization
//!   into (H, S, Y) form, gcd merging of cycle polynomials,
//!   orthogonalization, and synthesis of a single principal generator with
//!   a machine-checkable certificate.

pub mod algebra;
pub mod field;
pub mod graph;
pub mod ideal;
pub mod oracle;
pub mod poly;

pub use algebra::{breaking_element, AlgebraError, Element, Monomial};
pub use field::{Field, FieldError, Scalar};
pub use graph::{
    AdmissiblePair, ClosureReason, Cycle, EdgeId, EdgeKind, EdgeRef, Graph, GraphError, Path,
    QuotientPresentation, VertexClass, VertexId,
};
pub use ideal::{
    admissible_pairs, canonicalize, orthogonalize, principal_generator, CanonicalIdealForm,
    CyclePolynomial, IdealError, InputGenerator, PrincipalCertificate, StructuredGeneratorSet,
    TraceStep, VerificationStatus,
};
pub use oracle::{membership_oracle, MembershipWitness, OracleOutcome, WitnessTerm};
pub use poly::FieldPolynomial;
