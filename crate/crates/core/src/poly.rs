//! Polynomial representations and evaluators: sparse term lists, linearized
//! polynomials, and structured CPP records whose evaluators share the relative
//! trace across terms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::{SeedCpp, SeedCppJson};
use crate::error::{Error, Result};
use crate::field::{make_field, Embedding, FieldElement, FieldSpec, FieldSpecJson};

/// Explicit term-list polynomial over GF(2^e): nonzero coefficients only,
/// exponents strictly increasing. Exponents are kept as written (no reduction
/// mod 2^e - 1) so that evaluation at 0 keeps its exact semantics.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: Arc<FieldSpec>,
    terms: Vec<Term>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
struct Term {
    coeff: u64,
    exp: u128,
}

impl SparsePoly {
    pub fn new(field: &Arc<FieldSpec>, terms: &[(FieldElement, u128)]) -> Result<Self> {
        let mut raw = Vec::with_capacity(terms.len());
        for &(c, e) in terms {
            if c.field_id() != field.id() {
                return Err(Error::FieldMismatch {
                    left: c.field_id().degree(),
                    right: field.degree(),
                });
            }
            raw.push(Term { coeff: c.bits(), exp: e });
        }
        Ok(Self::from_raw(field, raw))
    }

    fn from_raw(field: &Arc<FieldSpec>, mut raw: Vec<Term>) -> Self {
        raw.sort_by_key(|t| t.exp);
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.exp == t.exp => last.coeff ^= t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coeff != 0);
        SparsePoly { field: Arc::clone(field), terms }
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        SparsePoly { field: Arc::clone(field), terms: Vec::new() }
    }

    pub fn monomial(field: &Arc<FieldSpec>, coeff: FieldElement, exp: u128) -> Result<Self> {
        Self::new(field, &[(coeff, exp)])
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> Vec<(FieldElement, u128)> {
        self.terms.iter().map(|t| (self.field.el(t.coeff), t.exp)).collect()
    }

    /// The (coefficient, exponent) of a single-term polynomial.
    pub fn single_term(&self) -> Option<(FieldElement, u128)> {
        match self.terms.as_slice() {
            [t] => Some((self.field.el(t.coeff), t.exp)),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn eval_raw(&self, x: u64) -> u64 {
        let f = &*self.field;
        let mut acc = 0u64;
        for t in &self.terms {
            acc ^= f.mul_raw(t.coeff, f.pow_raw(x, t.exp));
        }
        acc
    }

    /// Evaluation under the 0^0 = 1 convention.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        if x.field_id() != self.field.id() {
            return Err(Error::FieldMismatch {
                left: x.field_id().degree(),
                right: self.field.degree(),
            });
        }
        Ok(self.field.el(self.eval_raw(x.bits())))
    }

    pub fn evaluator(&self) -> impl Fn(FieldElement) -> FieldElement + Sync + '_ {
        move |x| self.field.el(self.eval_raw(x.bits()))
    }

    /// a * p(x / a): each term (c, d) becomes (c * a^{1-d mod 2^e-1}, d).
    /// Preserves permutation and CPP status.
    pub fn scale_conjugate(&self, a: FieldElement) -> Result<SparsePoly> {
        if a.field_id() != self.field.id() {
            return Err(Error::FieldMismatch {
                left: a.field_id().degree(),
                right: self.field.degree(),
            });
        }
        if a.is_zero() {
            return Err(Error::ZeroScale);
        }
        let f = &self.field;
        let order = f.order();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let k = (1 + order - t.exp % order) % order;
                Term { coeff: f.mul_raw(t.coeff, f.pow_raw(a.bits(), k)), exp: t.exp }
            })
            .collect();
        Ok(SparsePoly::from_raw(f, terms))
    }

    /// Term-list sum (XOR on like exponents, zero coefficients dropped).
    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        if self.field.id() != other.field.id() {
            return Err(Error::FieldMismatch {
                left: other.field.degree(),
                right: self.field.degree(),
            });
        }
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&other.terms);
        Ok(SparsePoly::from_raw(&self.field, raw))
    }

    /// Composition outer(inner(x)) of two monomials: (c, d) o (c', d') =
    /// (c * c'^d, d*d' mod 2^e - 1), where a nonzero exponent product that
    /// reduces to 0 maps to 2^e - 1 so that 0 still evaluates to 0.
    pub fn compose_monomial(outer: &SparsePoly, inner: &SparsePoly) -> Result<SparsePoly> {
        if outer.field.id() != inner.field.id() {
            return Err(Error::FieldMismatch {
                left: inner.field.degree(),
                right: outer.field.degree(),
            });
        }
        let (c, d) = outer.single_term().ok_or(Error::NonMonomial)?;
        let (c2, d2) = inner.single_term().ok_or(Error::NonMonomial)?;
        let f = &outer.field;
        let order = f.order();
        let exp = if d == 0 || d2 == 0 {
            0
        } else {
            let r = (d % order) * (d2 % order) % order;
            if r == 0 {
                order
            } else {
                r
            }
        };
        let coeff = f.el(f.mul_raw(c.bits(), f.pow_raw(c2.bits(), d)));
        // exp = 0 only when one factor is constant; then the composite is the
        // constant c * c2^d.
        SparsePoly::monomial(f, coeff, exp)
    }

    pub fn to_json(&self) -> SparsePolyJson {
        SparsePolyJson {
            field: FieldSpecJson::of(&self.field),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson { coeff_hex: format!("{:x}", t.coeff), exp: t.exp.to_string() })
                .collect(),
        }
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[{:?}; {} terms]", self.field, self.terms.len())
    }
}

/// Wire form: {"field": {...}, "terms": [{"coeff_hex": "...", "exp": "N"}]}.
/// Exponents travel as decimal strings; they exceed 2^53.
#[derive(Clone, Serialize, Deserialize)]
pub struct SparsePolyJson {
    pub field: FieldSpecJson,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff_hex: String,
    pub exp: String,
}

impl SparsePolyJson {
    pub fn build(&self) -> Result<SparsePoly> {
        let field = self.field.build()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = field.parse_hex(&t.coeff_hex)?;
            let e: u128 = t
                .exp
                .parse()
                .map_err(|e| Error::InvalidSerialized(format!("bad exponent {:?}: {e}", t.exp)))?;
            terms.push((c, e));
        }
        SparsePoly::new(&field, &terms)
    }
}

/// A linearized polynomial sum a_i x^{2^i} with coefficients in a standalone
/// GF(2^m); induces an additive map on every extension of its coefficient
/// field.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    field: Arc<FieldSpec>,
    coeffs: Vec<u64>,
}

impl LinearizedPoly {
    /// Coefficients a_0..a_{m-1}; shorter inputs are zero-padded.
    pub fn new(field: &Arc<FieldSpec>, coeffs: &[FieldElement]) -> Result<Self> {
        let m = field.degree() as usize;
        if coeffs.len() > m {
            return Err(Error::InvalidSerialized(format!(
                "linearized polynomial over GF(2^{m}) takes at most {m} coefficients"
            )));
        }
        let mut raw = vec![0u64; m];
        for (i, c) in coeffs.iter().enumerate() {
            if c.field_id() != field.id() {
                return Err(Error::FieldMismatch {
                    left: c.field_id().degree(),
                    right: field.degree(),
                });
            }
            raw[i] = c.bits();
        }
        Ok(LinearizedPoly { field: Arc::clone(field), coeffs: raw })
    }

    pub(crate) fn from_raw(field: &Arc<FieldSpec>, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), field.degree() as usize);
        LinearizedPoly { field: Arc::clone(field), coeffs }
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        LinearizedPoly { field: Arc::clone(field), coeffs: vec![0; field.degree() as usize] }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn sub_degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn coeffs(&self) -> Vec<FieldElement> {
        self.coeffs.iter().map(|&c| self.field.el(c)).collect()
    }

    pub(crate) fn raw_coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Evaluation at a point of the coefficient field itself.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        if x.field_id() != self.field.id() {
            return Err(Error::FieldMismatch {
                left: x.field_id().degree(),
                right: self.field.degree(),
            });
        }
        Ok(self.field.el(eval_linearized_raw(&self.field, &self.coeffs, x.bits())))
    }

    /// Evaluation at a point of an extension field; the coefficients are
    /// carried across by the canonical field embedding.
    pub fn eval_in(&self, big: &Arc<FieldSpec>, x: FieldElement) -> Result<FieldElement> {
        if x.field_id() != big.id() {
            return Err(Error::FieldMismatch { left: x.field_id().degree(), right: big.degree() });
        }
        if big.id() == self.field.id() {
            return self.eval(x);
        }
        let emb = Embedding::new(&self.field, big)?;
        let coeffs: Vec<u64> = self.coeffs.iter().map(|&c| emb.apply_raw(c)).collect();
        Ok(big.el(eval_linearized_raw(big, &coeffs, x.bits())))
    }
}

#[inline]
pub(crate) fn eval_linearized_raw(field: &FieldSpec, coeffs: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    let mut xp = x;
    for (i, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            acc ^= field.mul_raw(c, xp);
        }
        if i + 1 < coeffs.len() {
            xp = field.square_raw(xp);
        }
    }
    acc
}

impl fmt::Debug for LinearizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearizedPoly[m={}; {:x?}]", self.sub_degree(), self.coeffs)
    }
}

/// Which construction family a structured CPP came from.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CppFamily {
    Monomial1,
    Monomial2,
    Monomial3,
    Trinomial,
    Recursive,
    SingleTrace,
    MultiTrace,
    InverseMonomial1,
    InverseMonomial2,
    InverseMonomial3,
    InverseRecursiveU0,
    InverseRecursive,
}

impl fmt::Display for CppFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CppFamily::Monomial1 => "mono1",
            CppFamily::Monomial2 => "mono2",
            CppFamily::Monomial3 => "mono3",
            CppFamily::Trinomial => "trinomial",
            CppFamily::Recursive => "recursive",
            CppFamily::SingleTrace => "trace",
            CppFamily::MultiTrace => "multitrace",
            CppFamily::InverseMonomial1 => "inv-mono1",
            CppFamily::InverseMonomial2 => "inv-mono2",
            CppFamily::InverseMonomial3 => "inv-mono3",
            CppFamily::InverseRecursiveU0 => "inv-recursive-u0",
            CppFamily::InverseRecursive => "inv-recursive",
        };
        f.write_str(s)
    }
}

/// Which of the two cube-root trace conditions a mono2 parameter satisfied.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceBranch {
    Beta,
    BetaSq,
    Both,
}

/// Construction parameters, in ambient-field bit representation except for
/// seed-relative data which stays in the seed's standalone field.
#[derive(Clone, Debug)]
pub enum CppParams {
    Monomial { family: CppFamily, m: u32, v: u64, exponent: u128, branch: Option<TraceBranch> },
    Trinomial { m: u32, v: u64 },
    SingleTrace { m: u32, n: u32, u: u64, v: u64 },
    MultiTrace { m: u32, n: u32, c0: u64, chain: Vec<(u32, u64)>, c_tilde: u64 },
    Recursive { seed: SeedCpp, n: u32, u: u64 },
    InverseRecursiveU0 { seed: SeedCpp, n: u32 },
    InverseRecursive { seed: SeedCpp, n: u32, u: u64 },
}

/// Evaluation state with everything embedded into the ambient field.
#[derive(Clone)]
pub(crate) enum Prepared {
    Monomial {
        coeff: u64,
        exponent: u128,
    },
    Trinomial {
        m: u32,
        v: u64,
    },
    /// x (L(tr(x)) + u tr(x) + u x) + v x with L given by its coefficients
    /// over the degree-m subfield.
    TraceForm {
        m: u32,
        l: Vec<u64>,
        u: u64,
        v: u64,
    },
    /// x (sum_j c_j tr_{sub_j}(x) + c x) + c~ x, parts ascending by sub-degree.
    MultiTrace {
        parts: Vec<(u32, u64)>,
        c_sum: u64,
        c_tilde: u64,
    },
    /// x/v + (g(tr x)/tr x + 1/v) x tr(x)^{q-1}; g_over_t holds (t, g(t)/t).
    InvU0 {
        m: u32,
        g_over_t: Vec<(u64, u64)>,
        inv_v: u64,
    },
    /// The three-branch closed-form inverse of the trace form for u != 0.
    InvGeneral {
        m: u32,
        n: u32,
        g_map: Vec<(u64, u64)>,
        u: u64,
        v: u64,
        sqrt_u: u64,
        inv_sqrt_u: u64,
        inv_u: u64,
        inv_v: u64,
    },
}

/// A tagged CPP construction: family, parameters, an efficient evaluator, and
/// an explicit term list whenever one exists (monomial and trinomial
/// families).
#[derive(Clone)]
pub struct StructuredCpp {
    field: Arc<FieldSpec>,
    params: CppParams,
    expansion: Option<SparsePoly>,
    prepared: Prepared,
}

impl StructuredCpp {
    pub(crate) fn assemble(
        field: Arc<FieldSpec>,
        params: CppParams,
        expansion: Option<SparsePoly>,
        prepared: Prepared,
    ) -> Self {
        StructuredCpp { field, params, expansion, prepared }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn params(&self) -> &CppParams {
        &self.params
    }

    pub fn expansion(&self) -> Option<&SparsePoly> {
        self.expansion.as_ref()
    }

    pub fn family(&self) -> CppFamily {
        match &self.params {
            CppParams::Monomial { family, .. } => *family,
            CppParams::Trinomial { .. } => CppFamily::Trinomial,
            CppParams::SingleTrace { .. } => CppFamily::SingleTrace,
            CppParams::MultiTrace { .. } => CppFamily::MultiTrace,
            CppParams::Recursive { .. } => CppFamily::Recursive,
            CppParams::InverseRecursiveU0 { .. } => CppFamily::InverseRecursiveU0,
            CppParams::InverseRecursive { .. } => CppFamily::InverseRecursive,
        }
    }

    /// Evaluates the family's defining formula, computing the relative trace
    /// once per point and reusing it.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        if x.field_id() != self.field.id() {
            return Err(Error::FieldMismatch {
                left: x.field_id().degree(),
                right: self.field.degree(),
            });
        }
        Ok(self.field.el(self.eval_raw(x.bits())))
    }

    pub fn evaluator(&self) -> impl Fn(FieldElement) -> FieldElement + Sync + '_ {
        move |x| self.field.el(self.eval_raw(x.bits()))
    }

    pub(crate) fn eval_raw(&self, x: u64) -> u64 {
        let f = &*self.field;
        match &self.prepared {
            Prepared::Monomial { coeff, exponent } => f.mul_raw(*coeff, f.pow_raw(x, *exponent)),
            Prepared::Trinomial { m, v } => {
                let t = f.rel_trace_raw(x, *m);
                f.mul_raw(x, t ^ x) ^ f.mul_raw(*v, x)
            }
            Prepared::TraceForm { m, l, u, v } => {
                let t = f.rel_trace_raw(x, *m);
                let lt = eval_linearized_raw(f, l, t);
                let inner = lt ^ f.mul_raw(*u, t) ^ f.mul_raw(*u, x);
                f.mul_raw(x, inner) ^ f.mul_raw(*v, x)
            }
            Prepared::MultiTrace { parts, c_sum, c_tilde } => {
                let mut inner = f.mul_raw(*c_sum, x);
                let mut w = x;
                let mut from = f.degree();
                for &(sub, c) in parts.iter().rev() {
                    w = f.rel_trace_between_raw(w, from, sub);
                    from = sub;
                    if c != 0 {
                        inner ^= f.mul_raw(c, w);
                    }
                }
                f.mul_raw(x, inner) ^ f.mul_raw(*c_tilde, x)
            }
            Prepared::InvU0 { m, g_over_t, inv_v } => {
                let t = f.rel_trace_raw(x, *m);
                debug_assert_eq!(
                    f.pow_raw(t, (1u128 << *m) - 1),
                    u64::from(t != 0),
                    "trace indicator must be 0 or 1"
                );
                if t == 0 {
                    f.mul_raw(x, *inv_v)
                } else {
                    let i = g_over_t
                        .binary_search_by_key(&t, |e| e.0)
                        .expect("trace value lies in the subfield");
                    f.mul_raw(x, g_over_t[i].1)
                }
            }
            Prepared::InvGeneral {
                m,
                n,
                g_map,
                u: _,
                v,
                sqrt_u,
                inv_sqrt_u,
                inv_u,
                inv_v,
            } => {
                let m = *m;
                let t = f.rel_trace_raw(x, m);
                debug_assert_eq!(
                    f.pow_raw(t, (1u128 << m) - 1),
                    u64::from(t != 0),
                    "trace indicator must be 0 or 1"
                );
                // S(x) = sum_{k=0}^{(n-1)/2} x^{q^{2k}}
                let s = || {
                    let mut s = x;
                    let mut y = x;
                    for _ in 0..n / 2 {
                        y = f.frobenius_raw(y, 2 * m);
                        s ^= y;
                    }
                    s
                };
                if t == 0 {
                    // sum_j (u^{2^j-1} / v^{2^{j+1}-1}) S^{2^j}
                    let step = f.mul_raw(self.prepared_u(), *inv_v);
                    geometric_frobenius_sum(f, m, *inv_v, step, s())
                } else {
                    let i = g_map
                        .binary_search_by_key(&t, |e| e.0)
                        .expect("trace value lies in the subfield");
                    let g = g_map[i].1;
                    let sug = f.mul_raw(*sqrt_u, g);
                    let sqrt_t = f.frobenius_raw(t, m - 1);
                    if sug == sqrt_t {
                        // (x/u)^{1/2}
                        f.sqrt_raw(f.mul_raw(x, *inv_u))
                    } else {
                        // g(t) + u^{-1/2} sum_j w^{-(2^{j+1}-1)} S^{2^j},
                        // w = t/(u^{1/2} g(t)) + u^{1/2} g(t)
                        let w = f.mul_raw(t, f.inv_raw(sug)) ^ sug;
                        let w_inv = f.inv_raw(w);
                        let acc = geometric_frobenius_sum(f, m, w_inv, w_inv, s());
                        g ^ f.mul_raw(*inv_sqrt_u, acc)
                    }
                }
            }
        }
    }

    fn prepared_u(&self) -> u64 {
        match &self.prepared {
            Prepared::InvGeneral { u, .. } => *u,
            _ => unreachable!(),
        }
    }
}

/// sum_{j=0}^{m-1} coef_j s^{2^j} where coef_0 = first and
/// coef_{j+1} = coef_j^2 * step.
#[inline]
fn geometric_frobenius_sum(f: &FieldSpec, m: u32, first: u64, step: u64, s: u64) -> u64 {
    let mut coef = first;
    let mut sp = s;
    let mut acc = 0u64;
    for j in 0..m {
        acc ^= f.mul_raw(coef, sp);
        if j + 1 < m {
            coef = f.mul_raw(f.square_raw(coef), step);
            sp = f.square_raw(sp);
        }
    }
    acc
}

impl fmt::Debug for StructuredCpp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructuredCpp[{} over {:?}]", self.family(), self.field)
    }
}

impl fmt::Display for StructuredCpp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.params {
            CppParams::Monomial { family, m, v, exponent, .. } => {
                write!(f, "{family} m={m} v={v:x} x^{exponent} over GF(2^{})", self.field.degree())
            }
            CppParams::Trinomial { m, v } => {
                write!(f, "trinomial m={m} v={v:x} over GF(2^{})", self.field.degree())
            }
            CppParams::SingleTrace { m, n, u, v } => {
                write!(f, "trace m={m} n={n} u={u:x} v={v:x} over GF(2^{})", self.field.degree())
            }
            CppParams::MultiTrace { m, n, c0, chain, c_tilde } => {
                write!(
                    f,
                    "multitrace m={m} n={n} c0={c0:x} chain={chain:?} c~={c_tilde:x} over GF(2^{})",
                    self.field.degree()
                )
            }
            CppParams::Recursive { seed, n, u } => {
                write!(
                    f,
                    "recursive m={} n={n} u={u:x} over GF(2^{})",
                    seed.m(),
                    self.field.degree()
                )
            }
            CppParams::InverseRecursiveU0 { seed, n } => {
                write!(
                    f,
                    "inv-recursive-u0 m={} n={n} over GF(2^{})",
                    seed.m(),
                    self.field.degree()
                )
            }
            CppParams::InverseRecursive { seed, n, u } => {
                write!(
                    f,
                    "inv-recursive m={} n={n} u={u:x} over GF(2^{})",
                    seed.m(),
                    self.field.degree()
                )
            }
        }
    }
}

// ---- serde ----

/// Wire form of a structured CPP. Rebuilding goes back through the original
/// factory, so deserialization re-validates every construction precondition.
#[derive(Clone, Serialize, Deserialize)]
pub struct StructuredCppJson {
    pub field: FieldSpecJson,
    #[serde(flatten)]
    pub params: CppParamsJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expansion: Option<SparsePolyJson>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum CppParamsJson {
    Monomial1 { m: u32, v_hex: String, exponent: String },
    Monomial2 { m: u32, v_hex: String, exponent: String, branch: TraceBranch },
    Monomial3 { m: u32, v_hex: String, exponent: String },
    Trinomial { m: u32, v_hex: String },
    SingleTrace { m: u32, n: u32, u_hex: String, v_hex: String },
    MultiTrace { m: u32, n: u32, c0_hex: String, chain: Vec<ChainEntryJson>, c_tilde_hex: String },
    Recursive { n: u32, u_hex: String, seed: SeedCppJson },
    InverseMonomial1 { m: u32, v_hex: String, exponent: String },
    InverseMonomial2 { m: u32, v_hex: String, exponent: String },
    InverseMonomial3 { m: u32, v_hex: String, exponent: String },
    InverseRecursiveU0 { n: u32, seed: SeedCppJson },
    InverseRecursive { n: u32, u_hex: String, seed: SeedCppJson },
}

#[derive(Clone, Serialize, Deserialize)]
pub struct ChainEntryJson {
    pub d: u32,
    pub c_hex: String,
}

impl StructuredCpp {
    pub fn to_json(&self) -> StructuredCppJson {
        let hex = |b: u64| format!("{b:x}");
        let params = match &self.params {
            CppParams::Monomial { family, m, v, exponent, branch } => {
                let (m, v_hex, exponent) = (*m, hex(*v), exponent.to_string());
                match family {
                    CppFamily::Monomial1 => CppParamsJson::Monomial1 { m, v_hex, exponent },
                    CppFamily::Monomial2 => CppParamsJson::Monomial2 {
                        m,
                        v_hex,
                        exponent,
                        branch: branch.expect("mono2 records its branch"),
                    },
                    CppFamily::Monomial3 => CppParamsJson::Monomial3 { m, v_hex, exponent },
                    CppFamily::InverseMonomial1 => {
                        CppParamsJson::InverseMonomial1 { m, v_hex, exponent }
                    }
                    CppFamily::InverseMonomial2 => {
                        CppParamsJson::InverseMonomial2 { m, v_hex, exponent }
                    }
                    CppFamily::InverseMonomial3 => {
                        CppParamsJson::InverseMonomial3 { m, v_hex, exponent }
                    }
                    other => unreachable!("{other} is not a monomial family"),
                }
            }
            CppParams::Trinomial { m, v } => {
                CppParamsJson::Trinomial { m: *m, v_hex: hex(*v) }
            }
            CppParams::SingleTrace { m, n, u, v } => CppParamsJson::SingleTrace {
                m: *m,
                n: *n,
                u_hex: hex(*u),
                v_hex: hex(*v),
            },
            CppParams::MultiTrace { m, n, c0, chain, c_tilde } => CppParamsJson::MultiTrace {
                m: *m,
                n: *n,
                c0_hex: hex(*c0),
                chain: chain
                    .iter()
                    .map(|&(d, c)| ChainEntryJson { d, c_hex: hex(c) })
                    .collect(),
                c_tilde_hex: hex(*c_tilde),
            },
            CppParams::Recursive { seed, n, u } => CppParamsJson::Recursive {
                n: *n,
                u_hex: hex(*u),
                seed: seed.to_json(),
            },
            CppParams::InverseRecursiveU0 { seed, n } => {
                CppParamsJson::InverseRecursiveU0 { n: *n, seed: seed.to_json() }
            }
            CppParams::InverseRecursive { seed, n, u } => CppParamsJson::InverseRecursive {
                n: *n,
                u_hex: hex(*u),
                seed: seed.to_json(),
            },
        };
        StructuredCppJson {
            field: FieldSpecJson::of(&self.field),
            params,
            expansion: self.expansion.as_ref().map(|p| p.to_json()),
        }
    }
}

impl StructuredCppJson {
    /// Rebuilds through the construction factories; preconditions and any
    /// serialized exponent are re-validated.
    pub fn build(&self) -> Result<StructuredCpp> {
        use crate::{constructions, inversion};
        let field = self.field.build()?;
        let cpp = match &self.params {
            CppParamsJson::Monomial1 { m, v_hex, exponent } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = constructions::monomial_family1(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::Monomial2 { m, v_hex, exponent, .. } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = constructions::monomial_family2(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::Monomial3 { m, v_hex, exponent } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = constructions::monomial_family3(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::Trinomial { m, v_hex } => {
                let v = field.parse_hex(v_hex)?;
                constructions::trinomial(&field, *m, v)?
            }
            CppParamsJson::SingleTrace { m, n, u_hex, v_hex } => {
                let u = field.parse_hex(u_hex)?;
                let v = field.parse_hex(v_hex)?;
                constructions::trace_cpp(&field, *m, *n, u, v)?
            }
            CppParamsJson::MultiTrace { m, n, c0_hex, chain, c_tilde_hex } => {
                let c0 = field.parse_hex(c0_hex)?;
                let c_tilde = field.parse_hex(c_tilde_hex)?;
                let chain: Vec<(u32, FieldElement)> = chain
                    .iter()
                    .map(|e| Ok((e.d, field.parse_hex(&e.c_hex)?)))
                    .collect::<Result<_>>()?;
                constructions::multi_trace_cpp(&field, *m, *n, c0, &chain, c_tilde)?
            }
            CppParamsJson::Recursive { n, u_hex, seed } => {
                let seed = seed.build()?;
                let u = seed.field().parse_hex(u_hex)?;
                constructions::recursive_extend(&field, &seed, *n, u)?
            }
            CppParamsJson::InverseMonomial1 { m, v_hex, exponent } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = inversion::inverse_family1(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::InverseMonomial2 { m, v_hex, exponent } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = inversion::inverse_family2(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::InverseMonomial3 { m, v_hex, exponent } => {
                let v = field.parse_hex(v_hex)?;
                let cpp = inversion::inverse_family3(&field, *m, v)?;
                check_exponent(&cpp, exponent)?;
                cpp
            }
            CppParamsJson::InverseRecursiveU0 { n, seed } => {
                let seed = seed.build()?;
                inversion::inverse_recursive_u0(&field, &seed, *n)?
            }
            CppParamsJson::InverseRecursive { n, u_hex, seed } => {
                let seed = seed.build()?;
                let u = seed.field().parse_hex(u_hex)?;
                inversion::inverse_recursive(&field, &seed, *n, u)?
            }
        };
        Ok(cpp)
    }
}

fn check_exponent(cpp: &StructuredCpp, serialized: &str) -> Result<()> {
    let expect: u128 = serialized
        .parse()
        .map_err(|e| Error::InvalidSerialized(format!("bad exponent {serialized:?}: {e}")))?;
    match cpp.params() {
        CppParams::Monomial { exponent, .. } if *exponent == expect => Ok(()),
        CppParams::Monomial { exponent, .. } => Err(Error::InvalidSerialized(format!(
            "serialized exponent {expect} disagrees with the family formula {exponent}"
        ))),
        _ => unreachable!(),
    }
}

/// A polynomial or structured CPP read from JSON.
pub enum AnyPoly {
    Sparse(SparsePoly),
    Structured(StructuredCpp),
}

impl AnyPoly {
    /// Accepts StructuredCpp JSON, SparsePoly JSON, or either wrapped in a
    /// {"cpp": ...} construct-output envelope.
    pub fn from_json_str(s: &str) -> Result<AnyPoly> {
        let value: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::InvalidSerialized(format!("bad JSON: {e}")))?;
        let body = value.get("cpp").cloned().unwrap_or(value);
        if body.get("family").is_some() {
            let dto: StructuredCppJson = serde_json::from_value(body)
                .map_err(|e| Error::InvalidSerialized(format!("bad structured CPP: {e}")))?;
            Ok(AnyPoly::Structured(dto.build()?))
        } else {
            let dto: SparsePolyJson = serde_json::from_value(body)
                .map_err(|e| Error::InvalidSerialized(format!("bad polynomial: {e}")))?;
            Ok(AnyPoly::Sparse(dto.build()?))
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        match self {
            AnyPoly::Sparse(p) => p.field(),
            AnyPoly::Structured(c) => c.field(),
        }
    }

    pub(crate) fn eval_raw(&self, x: u64) -> u64 {
        match self {
            AnyPoly::Sparse(p) => p.eval_raw(x),
            AnyPoly::Structured(c) => c.eval_raw(x),
        }
    }

    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        match self {
            AnyPoly::Sparse(p) => p.eval(x),
            AnyPoly::Structured(c) => c.eval(x),
        }
    }
}

// make_field is pulled in for doc-links and the test module below.
#[allow(unused_imports)]
use make_field as _field_ctor;
