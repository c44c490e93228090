//! Arithmetic in the prime field GF(q) and its extension GF(q^m).
//!
//! Extension-field elements are stored as the integer `sum_i c_i q^i` of their
//! coefficient vector in the polynomial basis `{1, x, ..., x^{m-1}}`, so
//! [`ExtField::digits`] (the element viewed as a row vector over GF(q)) is a
//! plain base-q expansion. Fields up to `q^m <= 2^16` multiply through
//! exp/log tables built from a primitive element; larger fields fall back to
//! polynomial arithmetic reduced by the modulus.

use std::fmt;
use std::hash::Hash;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order that gets exp/log tables.
const TABLE_LIMIT: u64 = 1 << 16;
/// Largest supported field order (element indices are `u32`).
const ORDER_LIMIT: u64 = 1 << 31;

/// Common interface of the two field types, used by the generic matrix code.
pub trait FieldOps: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Domain error for zero.
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem>;
    /// Number of elements.
    fn size(&self) -> u64;
    /// The element with the given enumeration index, `index < size()`.
    fn from_index(&self, index: u64) -> Self::Elem;
    fn index(&self, a: Self::Elem) -> u64;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
}

/// The prime field GF(q). Elements are residues `0..q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::param(format!("base field order {q} is not prime")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    fn pow(&self, a: u32, mut e: u32) -> u32 {
        let q = self.q as u64;
        let mut base = a as u64 % q;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        acc as u32
    }
}

impl FieldOps for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.q == 2 {
            a ^ b
        } else {
            (a + b) % self.q
        }
    }

    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if self.q == 2 {
            a & b
        } else {
            ((a as u64 * b as u64) % self.q as u64) as u32
        }
    }

    fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            Err(Error::domain("zero has no multiplicative inverse"))
        } else {
            Ok(self.pow(a, self.q - 2))
        }
    }

    fn size(&self) -> u64 {
        self.q as u64
    }

    fn from_index(&self, index: u64) -> u32 {
        index as u32
    }

    fn index(&self, a: u32) -> u64 {
        a as u64
    }
}

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Binary moduli shipped for `q = 2`, indexed by `m`, as bit masks (bit i = coefficient of x^i).
const BINARY_MODULI: [u32; 17] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b10011,
    0b100101,
    0b1000011,
    0b10000011,
    0b100011101,
    0b1000010001,
    0b10000001001,
    0b100000000101,
    0b1000001010011,
    0b10000000011011,
    0b100010001000011,
    0b1000000000000011,
    0b10001000000001011,
];

/// `(q, m, modulus)` of an extension field. The modulus is a monic irreducible
/// polynomial of degree `m` over GF(q), lowest-degree coefficient first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldParams {
    q: u32,
    m: usize,
    modulus: Vec<u32>,
}

impl FieldParams {
    pub fn new(q: u32, m: usize, modulus: Vec<u32>) -> Result<Self> {
        let base = PrimeField::new(q)?;
        if m == 0 {
            return Err(Error::param("extension degree must be positive"));
        }
        match (q as u64).checked_pow(m as u32) {
            Some(order) if order < ORDER_LIMIT => {}
            _ => return Err(Error::param(format!("field GF({q}^{m}) is too large"))),
        }
        if modulus.len() != m + 1 {
            return Err(Error::param(format!(
                "modulus must have {} coefficients, got {}",
                m + 1,
                modulus.len()
            )));
        }
        if let Some(bad) = modulus.iter().find(|&&c| c >= q) {
            return Err(Error::param(format!("modulus digit {bad} out of range for q = {q}")));
        }
        if modulus[m] != 1 {
            return Err(Error::param("modulus must be monic"));
        }
        if !is_irreducible(base, &modulus) {
            return Err(Error::param("modulus is reducible"));
        }
        Ok(Self { q, m, modulus })
    }

    /// Uses the shipped modulus for `q = 2, m <= 16`, otherwise the first
    /// irreducible monic polynomial in lexicographic order of its lower digits.
    pub fn with_default_modulus(q: u32, m: usize) -> Result<Self> {
        if q == 2 && (1..BINARY_MODULI.len()).contains(&m) {
            let mask = BINARY_MODULI[m];
            let modulus = (0..=m).map(|i| (mask >> i) & 1).collect();
            return Self::new(q, m, modulus);
        }
        let base = PrimeField::new(q)?;
        if m == 0 {
            return Err(Error::param("extension degree must be positive"));
        }
        let lower = (q as u64)
            .checked_pow(m as u32)
            .filter(|&o| o < ORDER_LIMIT)
            .ok_or_else(|| Error::param(format!("field GF({q}^{m}) is too large")))?;
        for idx in 0..lower {
            let mut poly = base_digits(idx, q, m);
            poly.push(1);
            if is_irreducible(base, &poly) {
                return Self::new(q, m, poly);
            }
        }
        Err(Error::param(format!("no irreducible polynomial of degree {m} over GF({q})")))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        (self.q as u64).pow(self.m as u32)
    }
}

fn base_digits(mut v: u64, q: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % q as u64) as u32);
        v /= q as u64;
    }
    out
}

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

/// Remainder of `num` modulo the monic polynomial `den` over GF(q).
fn poly_rem(base: PrimeField, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (j, &c) in den.iter().enumerate() {
                let t = base.mul(lead, c);
                r[shift + j] = base.sub(r[shift + j], t);
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(base: PrimeField, poly: &[u32]) -> bool {
    let deg = poly.len() - 1;
    let q = base.q();
    for d in 1..=deg / 2 {
        let count = (q as u64).pow(d as u32);
        for idx in 0..count {
            let mut divisor = base_digits(idx, q, d);
            divisor.push(1);
            let mut r = poly_rem(base, poly, &divisor);
            trim(&mut r);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// An element of GF(q^m), encoded as the base-q integer of its coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }
}

struct Tables {
    /// `exp[i] = alpha^i`, doubled in length so products need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// GF(q^m) with precomputed arithmetic state.
pub struct ExtField {
    params: FieldParams,
    base: PrimeField,
    order: u32,
    tables: Option<Tables>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.params.q, self.params.m)
    }
}

impl ExtField {
    pub fn new(params: FieldParams) -> Self {
        let base = PrimeField { q: params.q };
        let order = params.order() as u32;
        let mut field = Self { params, base, order, tables: None };
        if (order as u64) <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        field
    }

    fn build_tables(&self) -> Tables {
        let n = self.order as usize - 1;
        let alpha = (1..self.order)
            .map(Elem)
            .find(|&a| self.multiplicative_order_slow(a) == n as u64)
            .expect("a finite field has a primitive element");
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; self.order as usize];
        let mut cur = Elem::ONE;
        for i in 0..n {
            exp[i] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.poly_mul(cur, alpha);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        Tables { exp, log }
    }

    fn multiplicative_order_slow(&self, a: Elem) -> u64 {
        let mut cur = a;
        let mut k = 1u64;
        while cur != Elem::ONE {
            cur = self.poly_mul(cur, a);
            k += 1;
            if k > self.order as u64 {
                return 0;
            }
        }
        k
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The coefficient vector of `a` (its row in GF(q)^{1 x m}).
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        base_digits(a.0 as u64, self.params.q, self.params.m)
    }

    /// Inverse of [`digits`](Self::digits).
    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() != self.params.m {
            return Err(Error::param(format!(
                "expected {} digits, got {}",
                self.params.m,
                digits.len()
            )));
        }
        let q = self.params.q;
        let mut v = 0u32;
        for &d in digits.iter().rev() {
            if d >= q {
                return Err(Error::param(format!("digit {d} out of range for q = {q}")));
            }
            v = v * q + d;
        }
        Ok(Elem(v))
    }

    pub fn element(&self, index: u32) -> Result<Elem> {
        if index >= self.order {
            return Err(Error::param(format!("element index {index} out of range")));
        }
        Ok(Elem(index))
    }

    /// Embeds a base-field digit as a constant polynomial.
    pub fn embed(&self, d: u32) -> Elem {
        debug_assert!(d < self.params.q);
        Elem(d)
    }

    /// The polynomial-basis generator `x`.
    pub fn generator(&self) -> Elem {
        if self.params.m == 1 {
            // x reduces to a constant in a degree-one extension
            let c = self.base.neg(self.params.modulus[0]);
            Elem(c)
        } else {
            Elem(self.params.q)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let q = self.params.q;
        if q == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.params.m {
            let d = (x % q + y % q) % q;
            out += d * place;
            x /= q;
            y /= q;
            place = place.wrapping_mul(q);
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let q = self.params.q;
        if q == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.params.m {
            out += self.base.neg(x % q) * place;
            x /= q;
            place = place.wrapping_mul(q);
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.poly_mul(a, b),
        }
    }

    fn poly_mul(&self, a: Elem, b: Elem) -> Elem {
        let m = self.params.m;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = self.base.add(prod[i + j], self.base.mul(x, y));
            }
        }
        let r = poly_rem(self.base, &prod, &self.params.modulus);
        let mut digits = r;
        digits.resize(m, 0);
        self.from_digits(&digits).expect("reduced product has m digits")
    }

    /// Multiplicative inverse; domain error for zero.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::domain("zero has no multiplicative inverse"));
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                Elem(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => self.pow(a, self.order as u64 - 2),
        })
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = &self.tables {
            let n = (self.order - 1) as u64;
            let l = (t.log[a.0 as usize] as u64 * (e % n)) % n;
            return Elem(t.exp[l as usize]);
        }
        let mut acc = Elem::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(acc, base);
            }
            base = self.poly_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(q^i)`. The exponent is taken modulo `m` since `a^(q^m) = a`.
    pub fn frobenius(&self, a: Elem, i: usize) -> Elem {
        let i = i % self.params.m;
        let e = (self.params.q as u64).pow(i as u32);
        self.pow(a, e)
    }

    /// Inverse Frobenius, `a^(q^-i)`.
    pub fn frobenius_inv(&self, a: Elem, i: usize) -> Elem {
        let m = self.params.m;
        self.frobenius(a, (m - i % m) % m)
    }

    /// Element text form: `m` base-q digits, lowest degree first (requires `q <= 10`).
    pub fn format_element(&self, a: Elem) -> String {
        self.digits(a)
            .into_iter()
            .map(|d| char::from_digit(d, 10).expect("q <= 10 for text form"))
            .collect()
    }

    pub fn parse_element(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        if self.params.q > 10 {
            return Err(Error::Parse("element text form requires q <= 10".into()));
        }
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d < self.params.q)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in element {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if digits.len() != self.params.m {
            return Err(Error::Parse(format!(
                "element {s:?} has {} digits, expected {}",
                digits.len(),
                self.params.m
            )));
        }
        self.from_digits(&digits)
    }
}

/// Shared handle to an extension field. Matrices and codes hold one of these.
#[derive(Clone)]
pub struct Gf(Arc<ExtField>);

impl Gf {
    pub fn new(params: FieldParams) -> Self {
        Gf(Arc::new(ExtField::new(params)))
    }

    pub fn binary(m: usize) -> Result<Self> {
        Ok(Self::new(FieldParams::with_default_modulus(2, m)?))
    }
}

impl Deref for Gf {
    type Target = ExtField;

    fn deref(&self) -> &ExtField {
        &self.0
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.params == other.0.params
    }
}

impl FieldOps for Gf {
    type Elem = Elem;

    fn zero(&self) -> Elem {
        Elem::ZERO
    }

    fn one(&self) -> Elem {
        Elem::ONE
    }

    fn add(&self, a: Elem, b: Elem) -> Elem {
        ExtField::add(self, a, b)
    }

    fn neg(&self, a: Elem) -> Elem {
        ExtField::neg(self, a)
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        ExtField::mul(self, a, b)
    }

    fn inv(&self, a: Elem) -> Result<Elem> {
        ExtField::inv(self, a)
    }

    fn size(&self) -> u64 {
        self.order() as u64
    }

    fn from_index(&self, index: u64) -> Elem {
        Elem(index as u32)
    }

    fn index(&self, a: Elem) -> u64 {
        a.0 as u64
    }

    fn sub(&self, a: Elem, b: Elem) -> Elem {
        ExtField::sub(self, a, b)
    }
}
