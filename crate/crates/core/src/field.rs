//! Arithmetic in GF(2^e), 1 <= e <= 64.
//!
//! Elements are bit-vectors in the polynomial basis (bit i = coefficient of
//! x^i), reduced modulo an irreducible degree-e polynomial over GF(2).
//! Multiplication is a carry-less 64x64 product followed by modulus folding;
//! inversion goes through `pow(a, 2^e - 2)`. A `FieldSpec` is immutable after
//! construction; the generator and factorization caches are write-once, so
//! specs can be shared freely across threads.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize, Serializer};

use crate::clmul::clmul64;
use crate::error::{Error, Result};
use crate::factor;

/// Compact identity of a field, carried by every element so that operations
/// can reject operands from mismatched fields.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldId {
    degree: u32,
    modulus: u128,
}

/// An element of GF(2^e) in the polynomial basis.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    bits: u64,
    field: FieldId,
}

impl FieldElement {
    /// Raw coefficient bits (bit i = coefficient of x^i).
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn field_id(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_one(&self) -> bool {
        self.bits == 1
    }

    /// Lowercase hex of the bit-vector, e.g. x^4 + x in GF(2^6) is "12".
    pub fn hex(&self) -> String {
        format!("{:x}", self.bits)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:x}@GF(2^{})", self.bits, self.field.degree)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.bits)
    }
}

/// A binary extension field GF(2^e) defined by an irreducible modulus.
pub struct FieldSpec {
    degree: u32,
    modulus: u128,
    mask: u64,
    /// x^degree mod modulus; the folding constant for reduction.
    reducer: u64,
    generator: OnceLock<u64>,
    factors: OnceLock<Vec<u64>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod 0x{:x}", self.degree, self.modulus)
    }
}

/// Constructs GF(2^e). With `modulus = None` the lexicographically smallest
/// irreducible polynomial of degree e (by integer value of the bit-vector)
/// is selected; a supplied modulus is validated for degree and irreducibility.
pub fn make_field(degree: u32, modulus: Option<u128>) -> Result<Arc<FieldSpec>> {
    if degree == 0 || degree > 64 {
        return Err(Error::DegreeOutOfRange(degree));
    }
    let modulus = match modulus {
        Some(m) => {
            let deg_ok = m >> degree == 1;
            if !deg_ok || !is_irreducible(m, degree) {
                return Err(Error::ReducibleModulus { modulus: m, degree });
            }
            m
        }
        None => smallest_irreducible(degree),
    };
    let mask = if degree == 64 { u64::MAX } else { (1u64 << degree) - 1 };
    Ok(Arc::new(FieldSpec {
        degree,
        modulus,
        mask,
        reducer: (modulus & mask as u128) as u64,
        generator: OnceLock::new(),
        factors: OnceLock::new(),
    }))
}

impl FieldSpec {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn id(&self) -> FieldId {
        FieldId { degree: self.degree, modulus: self.modulus }
    }

    /// Multiplicative group order 2^e - 1.
    pub fn order(&self) -> u128 {
        (1u128 << self.degree) - 1
    }

    pub fn size(&self) -> u128 {
        1u128 << self.degree
    }

    pub fn zero(&self) -> FieldElement {
        self.el(0)
    }

    pub fn one(&self) -> FieldElement {
        self.el(1)
    }

    /// Wraps raw bits into an element, rejecting bits at positions >= e.
    pub fn element(&self, bits: u64) -> Result<FieldElement> {
        if bits & !self.mask != 0 {
            return Err(Error::InvalidSerialized(format!(
                "0x{bits:x} has bits outside GF(2^{})",
                self.degree
            )));
        }
        Ok(self.el(bits))
    }

    pub fn parse_hex(&self, s: &str) -> Result<FieldElement> {
        let bits = u64::from_str_radix(s.trim(), 16)
            .map_err(|e| Error::InvalidSerialized(format!("bad element hex {s:?}: {e}")))?;
        self.element(bits)
    }

    /// Iterates the whole field in ascending bit order. Only sensible for
    /// desk-scale degrees.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..=self.mask).map(move |b| self.el(b))
    }

    #[inline]
    pub(crate) fn el(&self, bits: u64) -> FieldElement {
        debug_assert_eq!(bits & !self.mask, 0);
        FieldElement { bits, field: self.id() }
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.field != self.id() {
            return Err(Error::FieldMismatch { left: a.field.degree, right: self.degree });
        }
        Ok(())
    }

    // ---- raw arithmetic (hot paths; field membership is the caller's job) ----

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    #[inline]
    fn reduce(&self, mut t: u128) -> u64 {
        let e = self.degree;
        while t >> e != 0 {
            let hi = (t >> e) as u64;
            t = (t & self.mask as u128) ^ clmul64(hi, self.reducer);
        }
        t as u64
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul64(a, b))
    }

    #[inline]
    pub(crate) fn square_raw(&self, a: u64) -> u64 {
        self.reduce(clmul64(a, a))
    }

    /// a^k with the 0^0 = 1 convention. The exponent is reduced mod 2^e - 1
    /// only on the provably nonzero branch, so 0-input semantics are exact.
    pub(crate) fn pow_raw(&self, a: u64, k: u128) -> u64 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let mut k = (k % self.order()) as u64;
        if k == 0 {
            return 1;
        }
        let mut base = a;
        let mut acc = 1u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.square_raw(base);
            k >>= 1;
        }
        acc
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u64) -> u64 {
        debug_assert_ne!(a, 0);
        self.pow_raw(a, self.order() - 1)
    }

    #[inline]
    pub(crate) fn sqrt_raw(&self, a: u64) -> u64 {
        self.frobenius_raw(a, self.degree - 1)
    }

    #[inline]
    pub(crate) fn frobenius_raw(&self, a: u64, j: u32) -> u64 {
        let mut y = a;
        for _ in 0..(j % self.degree) {
            y = self.square_raw(y);
        }
        y
    }

    /// Relative trace onto the degree-`to` subfield of an element known to lie
    /// in the degree-`from` subfield: sum of from/to Frobenius images.
    #[inline]
    pub(crate) fn rel_trace_between_raw(&self, a: u64, from: u32, to: u32) -> u64 {
        debug_assert_eq!(from % to, 0);
        let mut acc = a;
        let mut y = a;
        for _ in 1..(from / to) {
            y = self.frobenius_raw(y, to);
            acc ^= y;
        }
        acc
    }

    #[inline]
    pub(crate) fn rel_trace_raw(&self, a: u64, m: u32) -> u64 {
        self.rel_trace_between_raw(a, self.degree, m)
    }

    // ---- checked public operations ----

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.el(a.bits ^ b.bits))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.el(self.mul_raw(a.bits, b.bits)))
    }

    pub fn square(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.square_raw(a.bits)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.bits == 0 {
            return Err(Error::DivisionByZero(self.degree));
        }
        Ok(self.el(self.inv_raw(a.bits)))
    }

    pub fn pow(&self, a: FieldElement, k: u128) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.pow_raw(a.bits, k)))
    }

    /// a^{2^j} by j repeated squarings.
    pub fn frobenius(&self, a: FieldElement, j: u32) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.frobenius_raw(a.bits, j)))
    }

    /// Square root; every element of GF(2^e) has exactly one.
    pub fn sqrt(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.el(self.sqrt_raw(a.bits)))
    }

    /// Relative trace onto the degree-m subfield: sum_{i=0}^{e/m-1} a^{2^{mi}}.
    pub fn rel_trace(&self, a: FieldElement, m: u32) -> Result<FieldElement> {
        self.check(a)?;
        if m == 0 || self.degree % m != 0 {
            return Err(Error::NonDivisorSubdegree { sub: m, degree: self.degree });
        }
        Ok(self.el(self.rel_trace_raw(a.bits, m)))
    }

    pub fn subfield(self: &Arc<Self>, m: u32) -> Result<SubfieldHandle> {
        if m == 0 || self.degree % m != 0 {
            return Err(Error::NonDivisorSubdegree { sub: m, degree: self.degree });
        }
        Ok(SubfieldHandle { parent: Arc::clone(self), sub_degree: m })
    }

    /// Prime factors of 2^e - 1 (with multiplicity, ascending), cached.
    pub fn factorization(&self) -> Result<&[u64]> {
        if let Some(f) = self.factors.get() {
            return Ok(f);
        }
        let f = factor::factor(self.order() as u64, factor::DEFAULT_RHO_BUDGET)?;
        Ok(self.factors.get_or_init(|| f))
    }

    /// A primitive element: g with g^{(2^e-1)/p} != 1 for every prime p | 2^e - 1.
    /// The first qualifying element in ascending bit order is returned; the
    /// result and the factorization are cached on the spec.
    pub fn find_generator(&self) -> Result<FieldElement> {
        if let Some(&g) = self.generator.get() {
            return Ok(self.el(g));
        }
        if self.degree == 1 {
            return Ok(self.el(*self.generator.get_or_init(|| 1)));
        }
        let order = self.order() as u64;
        let mut primes: Vec<u64> = self.factorization()?.to_vec();
        primes.dedup();
        let mut cand = 2u64;
        loop {
            debug_assert!(cand <= self.mask);
            if primes.iter().all(|&p| self.pow_raw(cand, (order / p) as u128) != 1) {
                return Ok(self.el(*self.generator.get_or_init(|| cand)));
            }
            cand += 1;
        }
    }

    /// beta = g^{(2^e-1)/3}: a primitive 3rd root of unity. Requires e even.
    pub fn primitive_cube_root(&self) -> Result<FieldElement> {
        if self.order() % 3 != 0 {
            return Err(Error::NoCubeRoot(self.degree));
        }
        let g = self.find_generator()?;
        let beta = self.pow_raw(g.bits, self.order() / 3);
        debug_assert_ne!(beta, 1);
        Ok(self.el(beta))
    }

    /// true iff v is a cube, i.e. v^{(2^e-1)/3} = 1. Requires 3 | 2^e - 1.
    pub fn is_cube(&self, v: FieldElement) -> Result<bool> {
        self.check(v)?;
        if self.order() % 3 != 0 {
            return Err(Error::NoCubeClassification(self.degree));
        }
        if v.bits == 0 {
            return Err(Error::ZeroCoefficient);
        }
        Ok(self.pow_raw(v.bits, self.order() / 3) == 1)
    }

    /// Solves z^2 + c z = Z + tr(Z) for c in F_{2^m}^*, where tr is the
    /// relative trace onto F_{2^m} and e/m is odd:
    ///
    ///   z = sum_{j=0}^{m-1} c^{-(2^{j+1}-1)} (sum_{k=0}^{(n-1)/2} Z^{q^{2k}})^{2^j}
    ///
    /// In particular z solves z^2 + c z = Z exactly whenever tr(Z) = 0.
    pub fn solve_quadratic_linearized(
        &self,
        c: FieldElement,
        z_rhs: FieldElement,
        m: u32,
    ) -> Result<FieldElement> {
        self.check(c)?;
        self.check(z_rhs)?;
        if m == 0 || self.degree % m != 0 {
            return Err(Error::NonDivisorSubdegree { sub: m, degree: self.degree });
        }
        let n = self.degree / m;
        if n % 2 == 0 {
            return Err(Error::EvenExtension(n));
        }
        if c.bits == 0 {
            return Err(Error::ZeroCoefficient);
        }
        if self.frobenius_raw(c.bits, m) != c.bits {
            return Err(Error::SubfieldViolation { bits: c.bits, sub: m, degree: self.degree });
        }
        Ok(self.el(self.solve_quadratic_raw(c.bits, z_rhs.bits, m)))
    }

    pub(crate) fn solve_quadratic_raw(&self, c: u64, z_rhs: u64, m: u32) -> u64 {
        let n = self.degree / m;
        // T = sum_{k=0}^{(n-1)/2} Z^{q^{2k}}, which satisfies T^q + T = Z + tr(Z).
        let mut t = z_rhs;
        let mut y = z_rhs;
        for _ in 0..(n / 2) {
            y = self.frobenius_raw(y, 2 * m);
            t ^= y;
        }
        let c_inv = self.inv_raw(c);
        let mut coef = c_inv; // c^{-(2^{j+1}-1)} at j = 0
        let mut tp = t; // T^{2^j}
        let mut acc = 0u64;
        for j in 0..m {
            acc ^= self.mul_raw(coef, tp);
            if j + 1 < m {
                coef = self.mul_raw(self.square_raw(coef), c_inv);
                tp = self.square_raw(tp);
            }
        }
        acc
    }
}

/// A subfield F_{2^m} inside GF(2^e), m | e.
#[derive(Clone)]
pub struct SubfieldHandle {
    parent: Arc<FieldSpec>,
    sub_degree: u32,
}

impl SubfieldHandle {
    pub fn parent(&self) -> &Arc<FieldSpec> {
        &self.parent
    }

    pub fn sub_degree(&self) -> u32 {
        self.sub_degree
    }

    pub fn size(&self) -> u128 {
        1u128 << self.sub_degree
    }

    /// Membership test: x is in F_{2^m} iff x^{2^m} = x.
    pub fn contains(&self, a: FieldElement) -> Result<bool> {
        self.parent.check(a)?;
        Ok(self.contains_raw(a.bits))
    }

    #[inline]
    pub(crate) fn contains_raw(&self, bits: u64) -> bool {
        self.parent.frobenius_raw(bits, self.sub_degree) == bits
    }

    /// All 2^m subfield elements: {0} together with the powers of
    /// g^{(2^e-1)/(2^m-1)}, returned sorted by bit value.
    pub fn enumerate(&self) -> Result<Vec<FieldElement>> {
        let f = &self.parent;
        if self.sub_degree == f.degree {
            return Ok((0..=f.mask).map(|b| f.el(b)).collect());
        }
        let g = f.find_generator()?;
        let step = f.order() / ((1u128 << self.sub_degree) - 1);
        let h = f.pow_raw(g.bits, step);
        let mut out = Vec::with_capacity(1 << self.sub_degree);
        out.push(0u64);
        let mut x = 1u64;
        for _ in 0..(1u64 << self.sub_degree) - 1 {
            out.push(x);
            x = f.mul_raw(x, h);
        }
        debug_assert_eq!(x, 1);
        out.sort_unstable();
        out.dedup();
        debug_assert_eq!(out.len(), 1usize << self.sub_degree);
        Ok(out.into_iter().map(|b| f.el(b)).collect())
    }
}

/// A field embedding of a standalone GF(2^m) into the degree-m subfield of
/// GF(2^e), m | e. Built by locating a root of the small field's modulus in
/// the big field; the smallest root (by bit value) among its Frobenius
/// conjugates is chosen, which makes the embedding deterministic.
pub struct Embedding {
    small: Arc<FieldSpec>,
    big: Arc<FieldSpec>,
    root_powers: Vec<u64>,
    preimages: OnceLock<HashMap<u64, u64>>,
}

/// Root search enumerates norm-map samples; keep the small side desk-scale.
const EMBED_DEGREE_CAP: u32 = 24;
const PREIMAGE_DEGREE_CAP: u32 = 16;

impl Embedding {
    pub fn new(small: &Arc<FieldSpec>, big: &Arc<FieldSpec>) -> Result<Self> {
        let m = small.degree;
        if m == 0 || big.degree % m != 0 {
            return Err(Error::NonDivisorSubdegree { sub: m, degree: big.degree });
        }
        if m > EMBED_DEGREE_CAP {
            return Err(Error::FieldTooLarge { degree: m, cap: 1 << EMBED_DEGREE_CAP });
        }
        // Norm-map samples land in the subfield; a fraction m/(2^m - 1) of them
        // are roots of the small modulus, so the scan below terminates quickly.
        let step = big.order() / ((1u128 << m) - 1);
        let mut root = None;
        let mut cand = 2u64;
        'scan: loop {
            let y = big.pow_raw(cand, step);
            if y != 0 && eval_f2_poly(big, small.modulus, y) == 0 {
                root = Some(y);
                break 'scan;
            }
            cand += 1;
            if u128::from(cand) > big.size() {
                break;
            }
        }
        let root = root.expect("irreducible modulus has roots in the extension");
        // Canonicalize: the roots are exactly the Frobenius conjugates of any
        // one of them; pick the smallest.
        let mut best = root;
        let mut y = root;
        for _ in 1..m {
            y = big.frobenius_raw(y, 1);
            best = best.min(y);
        }
        let mut root_powers = Vec::with_capacity(m as usize);
        let mut p = 1u64;
        for _ in 0..m {
            root_powers.push(p);
            p = big.mul_raw(p, best);
        }
        Ok(Embedding {
            small: Arc::clone(small),
            big: Arc::clone(big),
            root_powers,
            preimages: OnceLock::new(),
        })
    }

    pub fn small(&self) -> &Arc<FieldSpec> {
        &self.small
    }

    pub fn big(&self) -> &Arc<FieldSpec> {
        &self.big
    }

    #[inline]
    pub(crate) fn apply_raw(&self, bits: u64) -> u64 {
        let mut acc = 0u64;
        let mut b = bits;
        while b != 0 {
            let i = b.trailing_zeros();
            acc ^= self.root_powers[i as usize];
            b &= b - 1;
        }
        acc
    }

    pub fn apply(&self, a: FieldElement) -> Result<FieldElement> {
        self.small.check(a)?;
        Ok(self.big.el(self.apply_raw(a.bits)))
    }

    fn preimage_map(&self) -> &HashMap<u64, u64> {
        self.preimages.get_or_init(|| {
            let m = self.small.degree;
            assert!(m <= PREIMAGE_DEGREE_CAP, "preimage map capped at 2^{PREIMAGE_DEGREE_CAP}");
            let mut map = HashMap::with_capacity(1 << m);
            for w in 0..(1u64 << m) {
                map.insert(self.apply_raw(w), w);
            }
            map
        })
    }

    /// Inverse of the embedding on its image.
    pub fn preimage(&self, b: FieldElement) -> Result<FieldElement> {
        self.big.check(b)?;
        match self.preimage_map().get(&b.bits) {
            Some(&w) => Ok(self.small.el(w)),
            None => Err(Error::SubfieldViolation {
                bits: b.bits,
                sub: self.small.degree,
                degree: self.big.degree,
            }),
        }
    }

    pub(crate) fn preimage_raw(&self, bits: u64) -> Option<u64> {
        self.preimage_map().get(&bits).copied()
    }
}

/// Evaluates a polynomial with GF(2) coefficients (given as a bit-vector) at
/// a point of `field`.
fn eval_f2_poly(field: &FieldSpec, poly: u128, x: u64) -> u64 {
    let mut acc = 0u64;
    let mut xp = 1u64;
    for i in 0..=127 - poly.leading_zeros() {
        if poly >> i & 1 == 1 {
            acc ^= xp;
        }
        xp = field.mul_raw(xp, x);
    }
    acc
}

// ---- irreducibility over GF(2) ----

fn poly_degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

/// Remainder of binary-polynomial long division.
pub(crate) fn poly_rem(mut a: u128, b: u128) -> u128 {
    let db = poly_degree(b);
    debug_assert!(db >= 0);
    while poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = poly_rem(a, b);
        a = b;
        b = t;
    }
    a
}

fn poly_mulmod(a: u128, b: u128, modulus: u128) -> u128 {
    debug_assert!(poly_degree(a) < 64 && poly_degree(b) < 64);
    poly_rem(clmul64(a as u64, b as u64), modulus)
}

/// Rabin's irreducibility test for a degree-e polynomial over GF(2).
/// Polynomials with zero constant term are rejected (divisible by x); this
/// also pins X + 1 as the degree-1 modulus.
pub(crate) fn is_irreducible(p: u128, e: u32) -> bool {
    if p & 1 == 0 || p >> e != 1 {
        return false;
    }
    if e == 1 {
        return true;
    }
    let x = poly_rem(0b10, p);
    // x^{2^e} = x mod p
    let mut t = x;
    for _ in 0..e {
        t = poly_mulmod(t, t, p);
    }
    if t != x {
        return false;
    }
    // gcd(x^{2^{e/r}} - x, p) = 1 for every prime r | e
    let mut rem = e;
    let mut r = 2;
    while r * r <= rem {
        if rem % r == 0 {
            while rem % r == 0 {
                rem /= r;
            }
            if !rabin_coprime_step(p, e / r, x) {
                return false;
            }
        }
        r += 1;
    }
    if rem > 1 && rem < e && !rabin_coprime_step(p, e / rem, x) {
        return false;
    }
    // rem == e means e is prime; the single subtest is e/e = 1 squaring.
    if rem == e && !rabin_coprime_step(p, 1, x) {
        return false;
    }
    true
}

fn rabin_coprime_step(p: u128, squarings: u32, x: u128) -> bool {
    let mut s = x;
    for _ in 0..squarings {
        s = poly_mulmod(s, s, p);
    }
    poly_gcd(s ^ x, p) == 1
}

fn smallest_irreducible(e: u32) -> u128 {
    let base = 1u128 << e;
    let mut cand = base | 1;
    loop {
        if is_irreducible(cand, e) {
            return cand;
        }
        cand += 2;
        debug_assert!(cand < base << 1);
    }
}

// ---- serde ----

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecJson { degree: self.degree, modulus_hex: format!("{:x}", self.modulus) }
            .serialize(serializer)
    }
}

/// Wire form: {"degree": e, "modulus_hex": "..."}.
#[derive(Serialize, Deserialize)]
pub struct FieldSpecJson {
    pub degree: u32,
    pub modulus_hex: String,
}

impl FieldSpecJson {
    pub fn build(&self) -> Result<Arc<FieldSpec>> {
        let modulus = u128::from_str_radix(self.modulus_hex.trim(), 16)
            .map_err(|e| Error::InvalidSerialized(format!("bad modulus hex: {e}")))?;
        make_field(self.degree, Some(modulus))
    }

    pub fn of(field: &FieldSpec) -> Self {
        FieldSpecJson { degree: field.degree, modulus_hex: format!("{:x}", field.modulus) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent multiplication oracle: schoolbook shift-xor product
    /// followed by long division by the modulus. No clmul, no folding.
    fn mul_oracle(a: u64, b: u64, modulus: u128) -> u64 {
        let mut prod = 0u128;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                prod ^= (a as u128) << i;
            }
        }
        poly_rem(prod, modulus) as u64
    }

    /// Independent irreducibility oracle: exhaustive trial division by every
    /// polynomial of degree 1..=e/2.
    fn irreducible_oracle(p: u128, e: u32) -> bool {
        for d in 1..=e / 2 {
            for q in (1u128 << d)..(1u128 << (d + 1)) {
                if poly_rem(p, q) == 0 {
                    return false;
                }
            }
        }
        e >= 1 && p & 1 == 1
    }

    #[test]
    fn smallest_moduli_match_trial_division_oracle() {
        for e in 1..=12 {
            let f = make_field(e, None).unwrap();
            // first odd candidate of degree e that the oracle accepts
            let mut expect = (1u128 << e) | 1;
            while !irreducible_oracle(expect, e) {
                expect += 2;
            }
            assert_eq!(f.modulus(), expect, "degree {e}");
        }
    }

    #[test]
    fn known_moduli() {
        assert_eq!(make_field(1, None).unwrap().modulus(), 0b11);
        assert_eq!(make_field(3, None).unwrap().modulus(), 0b1011);
        assert_eq!(make_field(6, None).unwrap().modulus(), 0b1000011);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // 0b1011011 factors over GF(2); the oracle agrees.
        assert!(!irreducible_oracle(0b1011011, 6));
        assert!(matches!(
            make_field(6, Some(0b1011011)),
            Err(Error::ReducibleModulus { .. })
        ));
        // wrong degree
        assert!(matches!(make_field(6, Some(0b1011)), Err(Error::ReducibleModulus { .. })));
    }

    #[test]
    fn degree_bounds() {
        assert!(matches!(make_field(0, None), Err(Error::DegreeOutOfRange(0))));
        assert!(matches!(make_field(65, None), Err(Error::DegreeOutOfRange(65))));
        assert_eq!(make_field(64, None).unwrap().degree(), 64);
    }

    #[test]
    fn gf8_frozen_values() {
        let f = make_field(3, None).unwrap();
        let x = f.element(0b010).unwrap();
        assert_eq!(f.mul(x, x).unwrap().bits(), 0b100);
        assert_eq!(f.pow(x, 3).unwrap().bits(), 0b011);
    }

    #[test]
    fn mul_matches_oracle_exhaustive_gf8() {
        let f = make_field(3, None).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                assert_eq!(f.mul_raw(a, b), mul_oracle(a, b, f.modulus()));
            }
        }
    }

    #[test]
    fn mul_matches_oracle_random_large_fields() {
        let mut rng = StdRng::seed_from_u64(7);
        for e in [12u32, 33, 48, 64] {
            let f = make_field(e, None).unwrap();
            let mask = if e == 64 { u64::MAX } else { (1 << e) - 1 };
            for _ in 0..500 {
                let a = rng.gen::<u64>() & mask;
                let b = rng.gen::<u64>() & mask;
                assert_eq!(f.mul_raw(a, b), mul_oracle(a, b, f.modulus()), "e={e}");
            }
        }
    }

    #[test]
    fn additive_and_multiplicative_basics() {
        let f = make_field(6, None).unwrap();
        for a in f.elements() {
            assert!(f.add(a, a).unwrap().is_zero());
            if !a.is_zero() {
                assert!(f.mul(a, f.inv(a).unwrap()).unwrap().is_one());
            }
        }
        assert!(f.inv(f.one()).unwrap().is_one());
        assert!(matches!(f.inv(f.zero()), Err(Error::DivisionByZero(6))));
        assert_eq!(f.pow(f.zero(), 0).unwrap().bits(), 1, "0^0 = 1");
        assert_eq!(f.pow(f.zero(), 5).unwrap().bits(), 0);
    }

    #[test]
    fn field_mismatch_rejected() {
        let f6 = make_field(6, None).unwrap();
        let f3 = make_field(3, None).unwrap();
        let a = f6.element(5).unwrap();
        let b = f3.element(5).unwrap();
        assert!(matches!(f6.add(a, b), Err(Error::FieldMismatch { .. })));
        assert!(matches!(f6.mul(b, a), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn frobenius_identities() {
        let f3 = make_field(3, None).unwrap();
        let x = f3.element(0b010).unwrap();
        assert_eq!(f3.frobenius(x, 1).unwrap(), f3.square(x).unwrap());
        assert_eq!(f3.frobenius(x, 1).unwrap().bits(), 0b100);

        let f12 = make_field(12, None).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = f12.element(rng.gen::<u64>() & 0xfff).unwrap();
            assert_eq!(f12.frobenius(a, 0).unwrap(), a);
            assert_eq!(f12.frobenius(a, 12).unwrap(), a);
        }
    }

    #[test]
    fn frobenius_additivity_and_distributivity() {
        let f = make_field(12, None).unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..2000 {
            let a = f.el(rng.gen::<u64>() & 0xfff);
            let b = f.el(rng.gen::<u64>() & 0xfff);
            let c = f.el(rng.gen::<u64>() & 0xfff);
            // (a+b)^2 = a^2 + b^2
            assert_eq!(
                f.square_raw(a.bits() ^ b.bits()),
                f.square_raw(a.bits()) ^ f.square_raw(b.bits())
            );
            // a(b+c) = ab + ac
            assert_eq!(
                f.mul_raw(a.bits(), b.bits() ^ c.bits()),
                f.mul_raw(a.bits(), b.bits()) ^ f.mul_raw(a.bits(), c.bits())
            );
            // (ab)c = a(bc), ab = ba
            assert_eq!(
                f.mul_raw(f.mul_raw(a.bits(), b.bits()), c.bits()),
                f.mul_raw(a.bits(), f.mul_raw(b.bits(), c.bits()))
            );
            assert_eq!(f.mul_raw(a.bits(), b.bits()), f.mul_raw(b.bits(), a.bits()));
        }
    }

    #[test]
    fn rel_trace_properties() {
        let f = make_field(6, None).unwrap();
        assert!(f.rel_trace(f.zero(), 2).unwrap().is_zero());
        assert!(matches!(f.rel_trace(f.one(), 4), Err(Error::NonDivisorSubdegree { .. })));

        // image lies in the subfield; fibers onto F_4 have size 16 each
        let sub = f.subfield(2).unwrap();
        let mut counts = HashMap::new();
        for a in f.elements() {
            let t = f.rel_trace(a, 2).unwrap();
            assert!(sub.contains(t).unwrap());
            *counts.entry(t.bits()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 16));

        // e/m odd: the trace fixes subfield elements
        for s in sub.enumerate().unwrap() {
            assert_eq!(f.rel_trace(s, 2).unwrap(), s);
        }
    }

    #[test]
    fn trace_squaring_and_linearity() {
        let f = make_field(12, None).unwrap();
        let sub = f.subfield(4).unwrap();
        let lambdas = sub.enumerate().unwrap();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..500 {
            let a = f.el(rng.gen::<u64>() & 0xfff);
            let b = f.el(rng.gen::<u64>() & 0xfff);
            // tr(x)^2 = tr(x^2)
            assert_eq!(
                f.square_raw(f.rel_trace_raw(a.bits(), 4)),
                f.rel_trace_raw(f.square_raw(a.bits()), 4)
            );
            // F_{2^m}-linearity
            let lam = lambdas[rng.gen_range(0..lambdas.len())];
            let lhs = f.rel_trace_raw(f.mul_raw(lam.bits(), a.bits()) ^ b.bits(), 4);
            let rhs =
                f.mul_raw(lam.bits(), f.rel_trace_raw(a.bits(), 4)) ^ f.rel_trace_raw(b.bits(), 4);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trace_transitivity_odd_coindex() {
        // tr_m = tr^d_m . tr^e_d needs e/d odd; the recursive constructions
        // only ever take odd extension steps.
        for (e, d, m) in [(12u32, 4u32, 2u32), (12, 4, 1), (18, 6, 2), (18, 6, 3), (9, 3, 1)] {
            let f = make_field(e, None).unwrap();
            let mut rng = StdRng::seed_from_u64(u64::from(e * 64 + d));
            let mask = (1u64 << e) - 1;
            for _ in 0..300 {
                let a = rng.gen::<u64>() & mask;
                let inner = f.rel_trace_raw(a, d);
                assert_eq!(
                    f.rel_trace_between_raw(inner, d, m),
                    f.rel_trace_raw(a, m),
                    "e={e} d={d} m={m}"
                );
            }
        }
    }

    #[test]
    fn subfield_enumeration() {
        let f = make_field(6, None).unwrap();
        let sub = f.subfield(2).unwrap();
        let els = sub.enumerate().unwrap();
        assert_eq!(els.len(), 4);
        // matches an exhaustive fixed-point scan of frobenius(., 2)
        let fixed: Vec<u64> =
            (0..64u64).filter(|&b| f.frobenius_raw(b, 2) == b).collect();
        assert_eq!(els.iter().map(|e| e.bits()).collect::<Vec<_>>(), fixed);

        let sub1 = f.subfield(1).unwrap();
        assert_eq!(
            sub1.enumerate().unwrap().iter().map(|e| e.bits()).collect::<Vec<_>>(),
            vec![0, 1]
        );

        let f4 = make_field(4, None).unwrap();
        assert_eq!(f4.subfield(4).unwrap().enumerate().unwrap().len(), 16);
    }

    #[test]
    fn generator_small_fields() {
        let f1 = make_field(1, None).unwrap();
        assert!(f1.find_generator().unwrap().is_one());

        let f3 = make_field(3, None).unwrap();
        let g = f3.find_generator().unwrap();
        assert_eq!(g.bits(), 0b010);
        // order check by enumeration: 7 distinct nonzero powers
        let mut seen = std::collections::HashSet::new();
        let mut x = 1u64;
        for _ in 0..7 {
            x = f3.mul_raw(x, g.bits());
            seen.insert(x);
        }
        assert_eq!(seen.len(), 7);

        let f6 = make_field(6, None).unwrap();
        let g = f6.find_generator().unwrap();
        assert_ne!(f6.pow_raw(g.bits(), 9), 1);
        assert_ne!(f6.pow_raw(g.bits(), 21), 1);
        assert_eq!(f6.pow_raw(g.bits(), 63), 1);
    }

    #[test]
    fn generator_order_verified_up_to_e20() {
        for e in 1..=20u32 {
            let f = make_field(e, None).unwrap();
            let g = f.find_generator().unwrap();
            let order = f.order();
            if e <= 16 {
                // full multiplicative walk
                let mut x = g.bits();
                let mut steps = 1u128;
                while x != 1 {
                    x = f.mul_raw(x, g.bits());
                    steps += 1;
                }
                assert_eq!(steps, order, "e={e}");
            } else {
                let mut primes = f.factorization().unwrap().to_vec();
                primes.dedup();
                assert_eq!(f.pow_raw(g.bits(), order), 1);
                for p in primes {
                    assert_ne!(f.pow_raw(g.bits(), order / p as u128), 1, "e={e} p={p}");
                }
            }
        }
    }

    #[test]
    fn cube_roots_and_cubes() {
        let f2 = make_field(2, None).unwrap();
        let beta = f2.primitive_cube_root().unwrap();
        assert!(!beta.is_one());
        assert_eq!(f2.pow_raw(beta.bits(), 3), 1);
        // beta^2 + beta + 1 = 0
        assert_eq!(f2.square_raw(beta.bits()) ^ beta.bits() ^ 1, 0);

        let f6 = make_field(6, None).unwrap();
        let beta = f6.primitive_cube_root().unwrap();
        assert!(!beta.is_one());
        assert_eq!(f6.pow_raw(beta.bits(), 3), 1);

        let f3 = make_field(3, None).unwrap();
        assert!(matches!(f3.primitive_cube_root(), Err(Error::NoCubeRoot(3))));
        assert!(matches!(
            f3.is_cube(f3.element(2).unwrap()),
            Err(Error::NoCubeClassification(3))
        ));

        assert!(f6.is_cube(f6.one()).unwrap());
        let g = f6.find_generator().unwrap();
        assert!(!f6.is_cube(g).unwrap());
        // exactly 21 of the 63 nonzero elements are cubes, and they are
        // exactly the powers g^{3k}
        let cubes: std::collections::HashSet<u64> =
            (0..63u128).step_by(3).map(|k| f6.pow_raw(g.bits(), k)).collect();
        assert_eq!(cubes.len(), 21);
        let mut count = 0;
        for a in f6.elements().skip(1) {
            let is_c = f6.is_cube(a).unwrap();
            assert_eq!(is_c, cubes.contains(&a.bits()));
            count += u32::from(is_c);
        }
        assert_eq!(count, 21);
    }

    #[test]
    fn solve_quadratic_gf64() {
        let f = make_field(6, None).unwrap();
        let sub = f.subfield(2).unwrap();
        let subs = sub.enumerate().unwrap();
        assert!(f.solve_quadratic_linearized(subs[1], f.zero(), 2).unwrap().is_zero());
        for c in subs.iter().copied().filter(|c| !c.is_zero()) {
            for z in f.elements() {
                let sol = f.solve_quadratic_linearized(c, z, 2).unwrap();
                let lhs = f.square_raw(sol.bits()) ^ f.mul_raw(c.bits(), sol.bits());
                let tr = f.rel_trace_raw(z.bits(), 2);
                assert_eq!(lhs, z.bits() ^ tr);
                if tr == 0 {
                    assert_eq!(lhs, z.bits());
                } else {
                    assert_ne!(lhs, z.bits());
                }
            }
        }
        // c outside the subfield / zero c
        let bad = f.element(0b10).unwrap();
        assert!(!sub.contains(bad).unwrap());
        assert!(matches!(
            f.solve_quadratic_linearized(bad, f.one(), 2),
            Err(Error::SubfieldViolation { .. })
        ));
        assert!(matches!(
            f.solve_quadratic_linearized(f.zero(), f.one(), 2),
            Err(Error::ZeroCoefficient)
        ));
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let small = make_field(2, None).unwrap();
        let big = make_field(6, None).unwrap();
        let emb = Embedding::new(&small, &big).unwrap();
        let sub = big.subfield(2).unwrap();
        for a in 0..4u64 {
            let ia = emb.apply_raw(a);
            assert!(sub.contains_raw(ia));
            assert_eq!(emb.preimage_raw(ia), Some(a));
            for b in 0..4u64 {
                let ib = emb.apply_raw(b);
                assert_eq!(emb.apply_raw(a ^ b), ia ^ ib, "additive");
                assert_eq!(
                    emb.apply_raw(small.mul_raw(a, b)),
                    big.mul_raw(ia, ib),
                    "multiplicative"
                );
            }
        }
        assert_eq!(emb.apply_raw(0), 0);
        assert_eq!(emb.apply_raw(1), 1);

        // deterministic
        let emb2 = Embedding::new(&small, &big).unwrap();
        assert_eq!(emb.root_powers, emb2.root_powers);

        // non-divisor degree
        let f8 = make_field(3, None).unwrap();
        let big4 = make_field(4, None).unwrap();
        assert!(matches!(Embedding::new(&f8, &big4), Err(Error::NonDivisorSubdegree { .. })));
    }

    #[test]
    fn embedding_three_level_tower() {
        let f2 = make_field(2, None).unwrap();
        let f6 = make_field(6, None).unwrap();
        let f18 = make_field(18, None).unwrap();
        let e26 = Embedding::new(&f2, &f6).unwrap();
        let e618 = Embedding::new(&f6, &f18).unwrap();
        let e218 = Embedding::new(&f2, &f18).unwrap();
        // composite of embeddings is an embedding; images agree up to
        // conjugacy, so verify field-hom structure of the composite instead
        let sub = f18.subfield(2).unwrap();
        for a in 0..4u64 {
            let composed = e618.apply_raw(e26.apply_raw(a));
            assert!(sub.contains_raw(composed));
            let direct = e218.apply_raw(a);
            assert!(sub.contains_raw(direct));
            for b in 0..4u64 {
                assert_eq!(
                    e618.apply_raw(e26.apply_raw(f2.mul_raw(a, b))),
                    f18.mul_raw(composed, e618.apply_raw(e26.apply_raw(b)))
                );
            }
        }
    }

    #[test]
    fn hex_serialization() {
        let f = make_field(6, None).unwrap();
        // x^4 + x = 0b10010 = "12"
        let a = f.element(0b10010).unwrap();
        assert_eq!(a.hex(), "12");
        assert_eq!(f.parse_hex("12").unwrap(), a);
        assert!(f.parse_hex("7f").is_err()); // out of range for e = 6

        let json = serde_json::to_string(&*f).unwrap();
        assert_eq!(json, r#"{"degree":6,"modulus_hex":"43"}"#);
        let parsed: FieldSpecJson = serde_json::from_str(&json).unwrap();
        assert_eq!(*parsed.build().unwrap(), *f);

        let bad: FieldSpecJson =
            serde_json::from_str(r#"{"degree":6,"modulus_hex":"5b"}"#).unwrap();
        assert!(bad.build().is_err());
    }
}
