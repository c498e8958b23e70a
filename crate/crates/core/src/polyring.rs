//! Sparse multivariate polynomials over `k[x_1..x_d, T_1..T_m]`.
//!
//! Variables are laid out x-block first, then the T-block, then any
//! auxiliary variables `t1, t2, ...` that the ideal toolbox adds for
//! elimination. Polynomials keep their terms sorted strictly descending in
//! degree reverse lexicographic order with `x1 > ... > xd > T1 > ... > Tm`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::error::{ReesError, Result};
use crate::field::Field;

/// Hard cap on the number of variables, auxiliary ones included.
pub const MAX_VARS: usize = 24;

/// Exponent vector. Entries past the ring's variable count are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(ReesError::Validation(format!(
                "{} variables exceed the supported maximum of {MAX_VARS}",
                exps.len()
            )));
        }
        let mut m = Monomial::one();
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e)
                .map_err(|_| ReesError::ExponentOverflow(format!("exponent {e} too large")))?;
        }
        Ok(m)
    }

    pub fn var(index: usize) -> Self {
        let mut m = Monomial::one();
        m.exps[index] = 1;
        m
    }

    #[inline]
    pub fn exponent(&self, index: usize) -> u16 {
        self.exps[index]
    }

    pub fn exponents(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Degree counted only over the variables set in `mask`.
    #[inline]
    pub fn masked_degree(&self, mask: u32) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e as u32)
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Bitmask of variables with a nonzero exponent.
    #[inline]
    pub fn support(&self) -> u32 {
        let mut mask = 0u32;
        for (i, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Product; panics if an exponent leaves the `u16` range.
    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("monomial exponent overflow")
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_add(*b)?;
        }
        Some(out)
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    #[inline]
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = *other;
        for (o, s) in out.exps.iter_mut().zip(self.exps.iter()) {
            *o = o.checked_sub(*s)?;
        }
        Some(out)
    }

    #[inline]
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a = (*a).max(*b);
        }
        out
    }

    #[inline]
    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

/// Admissible monomial orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    DegRevLex,
    Lex,
    /// Product order: the variables in `first_block` (a bitmask) are compared
    /// first, degrevlex inside each block. Eliminates `first_block`.
    BlockElim { first_block: u32 },
}

impl MonomialOrder {
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::DegRevLex => degrevlex(a, b, u32::MAX),
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::BlockElim { first_block } => degrevlex(a, b, first_block)
                .then_with(|| degrevlex(a, b, !first_block)),
        }
    }
}

/// Key whose lexicographic order agrees with a [`MonomialOrder`].
pub type OrderKey = [u32; MAX_VARS + 2];

impl MonomialOrder {
    /// `order.sort_key(a).cmp(&order.sort_key(b)) == order.cmp(a, b)`.
    pub fn sort_key(&self, m: &Monomial) -> OrderKey {
        let mut key = [0u32; MAX_VARS + 2];
        let mut pos = 0;
        let mut block = |mask: u32, key: &mut OrderKey| {
            key[pos] = m.masked_degree(mask);
            pos += 1;
            for i in (0..MAX_VARS).rev() {
                if mask >> i & 1 == 1 {
                    key[pos] = u32::from(u16::MAX - m.exps[i]);
                    pos += 1;
                }
            }
        };
        match *self {
            MonomialOrder::DegRevLex => block(u32::MAX, &mut key),
            MonomialOrder::Lex => {
                for (k, &e) in key.iter_mut().zip(m.exps.iter()) {
                    *k = u32::from(e);
                }
            }
            MonomialOrder::BlockElim { first_block } => {
                let all = if MAX_VARS >= 32 { u32::MAX } else { (1u32 << MAX_VARS) - 1 };
                block(first_block & all, &mut key);
                block(!first_block & all, &mut key);
            }
        }
        key
    }
}

#[inline]
fn degrevlex(a: &Monomial, b: &Monomial, mask: u32) -> Ordering {
    let (da, db) = if mask == u32::MAX {
        (a.degree(), b.degree())
    } else {
        (a.masked_degree(mask), b.masked_degree(mask))
    };
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..MAX_VARS).rev() {
        if mask >> i & 1 == 0 {
            continue;
        }
        let (x, y) = (a.exps[i], b.exps[i]);
        if x != y {
            return y.cmp(&x);
        }
    }
    Ordering::Equal
}

/// `k[x_1..x_d, T_1..T_m, t_1..t_aux]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<F: Field> {
    d: usize,
    m: usize,
    aux: usize,
    field: F,
}

pub type RingRef<F> = Arc<PolyRing<F>>;

impl<F: Field> PolyRing<F> {
    pub fn new(d: usize, m: usize, field: F) -> Result<RingRef<F>> {
        if d == 0 || m == 0 {
            return Err(ReesError::Validation(
                "a ring needs at least one x- and one T-variable".into(),
            ));
        }
        // one slot stays free for the elimination variable
        if d + m + 1 > MAX_VARS {
            return Err(ReesError::Validation(format!(
                "d + m = {} exceeds the supported maximum of {}",
                d + m,
                MAX_VARS - 1
            )));
        }
        Ok(Arc::new(PolyRing { d, m, aux: 0, field }))
    }

    /// Same ring with `extra` further auxiliary variables appended.
    pub fn with_aux(&self, extra: usize) -> Result<RingRef<F>> {
        if self.nvars() + extra > MAX_VARS {
            return Err(ReesError::Validation("too many auxiliary variables".into()));
        }
        Ok(Arc::new(PolyRing {
            aux: self.aux + extra,
            ..self.clone()
        }))
    }

    /// The ring without auxiliary variables.
    pub fn base(&self) -> RingRef<F> {
        Arc::new(PolyRing {
            aux: 0,
            ..self.clone()
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn aux(&self) -> usize {
        self.aux
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.d + self.m + self.aux
    }

    /// Variable index of `x_i` (1-based `i`).
    pub fn x_index(&self, i: usize) -> usize {
        assert!((1..=self.d).contains(&i), "x{i} out of range");
        i - 1
    }

    /// Variable index of `T_j` (1-based `j`).
    pub fn t_index(&self, j: usize) -> usize {
        assert!((1..=self.m).contains(&j), "T{j} out of range");
        self.d + j - 1
    }

    pub fn aux_index(&self, k: usize) -> usize {
        assert!((1..=self.aux).contains(&k), "t{k} out of range");
        self.d + self.m + k - 1
    }

    pub fn x_mask(&self) -> u32 {
        (1u32 << self.d) - 1
    }

    pub fn t_mask(&self) -> u32 {
        ((1u32 << self.m) - 1) << self.d
    }

    pub fn aux_mask(&self) -> u32 {
        ((1u32 << self.aux) - 1) << (self.d + self.m)
    }

    pub fn var_name(&self, index: usize) -> String {
        if index < self.d {
            format!("x{}", index + 1)
        } else if index < self.d + self.m {
            format!("T{}", index - self.d + 1)
        } else {
            format!("t{}", index - self.d - self.m + 1)
        }
    }

    /// `(x-degree, T-degree)`; auxiliary variables are not graded.
    pub fn bidegree_of(&self, mono: &Monomial) -> (u32, u32) {
        (mono.masked_degree(self.x_mask()), mono.masked_degree(self.t_mask()))
    }
}

/// A polynomial with terms sorted strictly descending in degrevlex.
#[derive(Clone)]
pub struct Polynomial<F: Field> {
    ring: RingRef<F>,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> PartialEq for Polynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.terms == other.terms
    }
}

/// Arithmetic selector for [`Polynomial::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl<F: Field> Polynomial<F> {
    pub fn zero(ring: &RingRef<F>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &RingRef<F>) -> Self {
        Self::constant(ring, ring.field().one())
    }

    pub fn constant(ring: &RingRef<F>, c: F::Elem) -> Self {
        Self::monomial(ring, Monomial::one(), c)
    }

    pub fn monomial(ring: &RingRef<F>, mono: Monomial, c: F::Elem) -> Self {
        let terms = if ring.field().is_zero(&c) {
            Vec::new()
        } else {
            vec![(mono, c)]
        };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &RingRef<F>, index: usize) -> Self {
        assert!(index < ring.nvars());
        Self::monomial(ring, Monomial::var(index), ring.field().one())
    }

    /// `x_i`, 1-based.
    pub fn x(ring: &RingRef<F>, i: usize) -> Self {
        Self::var(ring, ring.x_index(i))
    }

    /// `T_j`, 1-based.
    pub fn t(ring: &RingRef<F>, j: usize) -> Self {
        Self::var(ring, ring.t_index(j))
    }

    /// Canonicalizes an arbitrary term list (duplicates merged, zeros dropped).
    pub fn from_terms(ring: &RingRef<F>, terms: Vec<(Monomial, F::Elem)>) -> Self {
        let field = ring.field();
        let mut acc: FxHashMap<Monomial, F::Elem> = FxHashMap::with_capacity_and_hasher(terms.len(), Default::default());
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(slot) => *slot = field.add(slot, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| MonomialOrder::DegRevLex.cmp(&b.0, &a.0));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &RingRef<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        self.ring.field()
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, F::Elem)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.field().is_one(&self.terms[0].1)
    }

    /// Leading term in the ambient degrevlex order.
    pub fn leading(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Shared `(x-degree, T-degree)` of all terms, if bihomogeneous and nonzero.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.iter().map(|(m, _)| self.ring.bidegree_of(m));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn is_bihomogeneous(&self) -> bool {
        self.is_zero() || self.bidegree().is_some()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.iter().map(|(m, _)| m.degree());
        match it.next() {
            None => true,
            Some(first) => it.all(|d| d == first),
        }
    }

    /// Union of the supports of all terms.
    pub fn support(&self) -> u32 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.support())
    }

    /// The spec-level arithmetic entry point: fails on ring mismatch.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        if *self.ring != *other.ring {
            return Err(ReesError::RingMismatch);
        }
        Ok(match op {
            ArithOp::Add => self.add_scaled(other, &self.field().one()),
            ArithOp::Sub => self.add_scaled(other, &self.field().neg(&self.field().one())),
            ArithOp::Mul => self.mul_unchecked(other),
        })
    }

    /// `self + c * other` by a sorted merge.
    fn add_scaled(&self, other: &Self, c: &F::Elem) -> Self {
        let field = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match MonomialOrder::DegRevLex.cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0, field.mul(c, &b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = field.add(&a[i].1, &field.mul(c, &b[j].1));
                    if !field.is_zero(&s) {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, v)| (*m, field.mul(c, v))));
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let field = self.field();
        let mut acc: FxHashMap<Monomial, F::Elem> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * other.terms.len(), Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = field.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(slot) => *slot = field.add(slot, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| MonomialOrder::DegRevLex.cmp(&b.0, &a.0));
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        let field = self.field();
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, field.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let field = self.field();
        if field.is_zero(c) {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, field.mul(c, v))).collect(),
        }
    }

    /// Multiplication by a monomial keeps the term order.
    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Leading coefficient scaled to one (in the ambient order).
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(&self.field().inv(c)),
        }
    }

    /// Sets every variable in `mask` to zero.
    pub fn substitute_zero(&self, mask: u32) -> Self {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.support() & mask == 0)
                .cloned()
                .collect(),
        }
    }

    /// Reinterprets the polynomial in a ring that shares the variable layout
    /// up to auxiliary variables. Fails if a dropped variable occurs.
    pub fn change_ring(&self, target: &RingRef<F>) -> Result<Self> {
        if target.d != self.ring.d || target.m != self.ring.m || target.field != self.ring.field {
            return Err(ReesError::RingMismatch);
        }
        let keep = (1u32 << target.nvars()) - 1;
        if self.support() & !keep != 0 {
            return Err(ReesError::Validation(
                "polynomial involves a variable absent from the target ring".into(),
            ));
        }
        Ok(Polynomial {
            ring: target.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Renders without spaces, suitable for whitespace-separated files.
    pub fn to_compact_string(&self) -> String {
        self.render(false)
    }

    fn render(&self, spaced: bool) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let field = self.field();
        let mut out = String::new();
        for (k, (mono, c)) in self.terms.iter().enumerate() {
            let (negative, magnitude) = field.split_sign(c);
            match (k, negative, spaced) {
                (0, true, _) => out.push('-'),
                (0, false, _) => {}
                (_, true, true) => out.push_str(" - "),
                (_, false, true) => out.push_str(" + "),
                (_, true, false) => out.push('-'),
                (_, false, false) => out.push('+'),
            }
            let mut factors = Vec::new();
            if magnitude != "1" || mono.is_one() {
                factors.push(magnitude);
            }
            for i in 0..self.ring.nvars() {
                match mono.exponent(i) {
                    0 => {}
                    1 => factors.push(self.ring.var_name(i)),
                    e => factors.push(format!("{}^{}", self.ring.var_name(i), e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses the textual polynomial grammar (see [`parse_polynomial`]).
    pub fn parse(text: &str, ring: &RingRef<F>) -> Result<Self> {
        parse_polynomial(text, ring)
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self.render(true))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl<'a, F: Field> std::ops::$tr<&'a Polynomial<F>> for &'a Polynomial<F> {
            type Output = Polynomial<F>;
            /// Panics when the operands live in different rings.
            fn $method(self, rhs: &'a Polynomial<F>) -> Polynomial<F> {
                self.arith(rhs, $op).expect("polynomial ring mismatch")
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl<'a, F: Field> std::ops::Neg for &'a Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        Polynomial::neg(self)
    }
}

/// Parses `terms joined by + / -`, each term `[coeff][*]var^exp[*var^exp...]`.
///
/// `*` is optional between factors, the coefficient defaults to 1, variables
/// are `x<int>` and `T<int>`, and `a/b` coefficients are accepted only over
/// the rationals. Integer coefficients are reduced into the field.
pub fn parse_polynomial<F: Field>(text: &str, ring: &RingRef<F>) -> Result<Polynomial<F>> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    }
    .polynomial()
}

struct Parser<'a, F: Field> {
    src: &'a [u8],
    pos: usize,
    ring: &'a RingRef<F>,
}

impl<F: Field> Parser<'_, F> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(ReesError::Syntax {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn small_integer(&mut self, what: &str) -> Result<u64> {
        let v = self.integer()?;
        u64::try_from(&v).map_err(|_| ReesError::ExponentOverflow(format!("{what} {v} is too large")))
    }

    fn polynomial(&mut self) -> Result<Polynomial<F>> {
        let field = self.ring.field().clone();
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(_) if first => false,
                Some(c) => return self.err(format!("expected `+` or `-`, found `{}`", c as char)),
            };
            first = false;
            let (mono, mut coeff) = self.term()?;
            if negative {
                coeff = field.neg(&coeff);
            }
            terms.push((mono, coeff));
        }
        Ok(Polynomial::from_terms(self.ring, terms))
    }

    fn term(&mut self) -> Result<(Monomial, F::Elem)> {
        let field = self.ring.field().clone();
        let mut coeff = field.one();
        let mut mono = Monomial::one();
        let mut saw_factor = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.integer()?;
            let den = if self.peek() == Some(b'/') {
                if field.spec() != crate::field::FieldSpec::Rational {
                    return self.err("fractional coefficients require field=QQ");
                }
                self.pos += 1;
                self.integer()?
            } else {
                BigInt::from(1)
            };
            coeff = field.from_ratio(&num, &den).map_err(|message| ReesError::Syntax {
                column: self.pos,
                message,
            })?;
            saw_factor = true;
        }
        loop {
            match self.peek() {
                Some(b'*') => {
                    if !saw_factor {
                        return self.err("`*` without a preceding factor");
                    }
                    self.pos += 1;
                    match self.peek() {
                        Some(b'x') | Some(b'T') => {}
                        _ => return self.err("expected a variable after `*`"),
                    }
                }
                Some(b'x') | Some(b'T') => {
                    let var = self.variable()?;
                    let mut exp = 1u64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        exp = self.small_integer("exponent")?;
                    }
                    let exp = u16::try_from(exp).map_err(|_| {
                        ReesError::ExponentOverflow(format!("exponent {exp} is too large"))
                    })?;
                    let mut factor = Monomial::one();
                    factor.exps[var] = exp;
                    mono = mono.checked_mul(&factor).ok_or_else(|| {
                        ReesError::ExponentOverflow("combined exponent is too large".into())
                    })?;
                    saw_factor = true;
                }
                Some(b'+') | Some(b'-') | None => break,
                Some(c) => return self.err(format!("unexpected character `{}`", c as char)),
            }
        }
        if !saw_factor {
            return self.err("expected a term");
        }
        Ok((mono, coeff))
    }

    fn variable(&mut self) -> Result<usize> {
        let start = self.pos;
        let block = self.src[self.pos];
        self.pos += 1;
        if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
            return self.err("expected a variable index");
        }
        let idx = self.small_integer("variable index")?;
        let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        let idx = usize::try_from(idx).map_err(|_| ReesError::UnknownVariable(name.clone()))?;
        match block {
            b'x' if (1..=self.ring.d()).contains(&idx) => Ok(self.ring.x_index(idx)),
            b'T' if (1..=self.ring.m()).contains(&idx) => Ok(self.ring.t_index(idx)),
            _ => Err(ReesError::UnknownVariable(name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn ring_p(d: usize, m: usize) -> RingRef<PrimeField> {
        PolyRing::new(d, m, PrimeField::new(32003).unwrap()).unwrap()
    }

    #[test]
    fn parses_zero() {
        let r = ring_p(3, 4);
        assert!(Polynomial::parse("0", &r).unwrap().is_zero());
    }

    #[test]
    fn parses_two_term_bidegrees() {
        let r = ring_p(3, 4);
        let f = Polynomial::parse("x1^2*T3 - x3", &r).unwrap();
        assert_eq!(f.len(), 2);
        let bidegrees: Vec<_> = f.terms().iter().map(|(m, _)| r.bidegree_of(m)).collect();
        assert_eq!(bidegrees, vec![(2, 1), (1, 0)]);
        assert_eq!(f.bidegree(), None);
    }

    #[test]
    fn parses_symmetric_generator() {
        let r = ring_p(3, 4);
        let f = Polynomial::parse("x1*T1 + x2*T2 + x3*T3", &r).unwrap();
        let expected = &(&(&Polynomial::x(&r, 1) * &Polynomial::t(&r, 1))
            + &(&Polynomial::x(&r, 2) * &Polynomial::t(&r, 2)))
            + &(&Polynomial::x(&r, 3) * &Polynomial::t(&r, 3));
        assert_eq!(f, expected);
        assert_eq!(f.bidegree(), Some((1, 1)));
    }

    #[test]
    fn bidegree_examples() {
        let r = ring_p(3, 4);
        let p = |s: &str| Polynomial::parse(s, &r).unwrap();
        assert_eq!(p("x1*T1 + x2*T2").bidegree(), Some((1, 1)));
        assert_eq!(p("x1^2*T3 + x3^2*T4").bidegree(), Some((2, 1)));
        assert_eq!(p("x1 + T1").bidegree(), None);
        assert_eq!(p("0").bidegree(), None);
    }

    #[test]
    fn grammar_variants() {
        let r = ring_p(3, 4);
        let a = Polynomial::parse("3x1x2^2T1", &r).unwrap();
        let b = Polynomial::parse("3 * x1 * x2^2 * T1", &r).unwrap();
        let c = Polynomial::parse("x2*x1*x2*T1 + 2*x1*x2^2*T1", &r).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let neg = Polynomial::parse("-x1 - -x1", &r);
        assert!(neg.is_err());
        assert_eq!(Polynomial::parse("32004*x1", &r).unwrap(), Polynomial::x(&r, 1));
    }

    #[test]
    fn parse_errors() {
        let r = ring_p(3, 4);
        assert!(matches!(
            Polynomial::parse("x4", &r),
            Err(ReesError::UnknownVariable(v)) if v == "x4"
        ));
        assert!(matches!(Polynomial::parse("T0", &r), Err(ReesError::UnknownVariable(_))));
        assert!(matches!(Polynomial::parse("y1", &r), Err(ReesError::Syntax { column: 1, .. })));
        assert!(matches!(
            Polynomial::parse("x1 +* x2", &r),
            Err(ReesError::Syntax { .. })
        ));
        assert!(matches!(
            Polynomial::parse("x1^70000", &r),
            Err(ReesError::ExponentOverflow(_))
        ));
        assert!(matches!(
            Polynomial::parse("x1^40000*x1^40000", &r),
            Err(ReesError::ExponentOverflow(_))
        ));
        assert!(Polynomial::parse("1/2*x1", &r).is_err());
        assert!(Polynomial::parse("", &r).is_err());
    }

    #[test]
    fn rational_coefficients() {
        let r = PolyRing::new(2, 1, Rationals).unwrap();
        let f = Polynomial::parse("1/2*x1 - 3/4*T1 + 2/4", &r).unwrap();
        assert_eq!(f.to_string(), "1/2*x1 - 3/4*T1 + 1/2");
        assert_eq!(Polynomial::parse(&f.to_string(), &r).unwrap(), f);
    }

    #[test]
    fn additive_inverse_and_difference_of_squares() {
        let r = PolyRing::new(1, 1, Rationals).unwrap();
        let p = |s: &str| Polynomial::parse(s, &r).unwrap();
        let a = p("3*x1^2*T1 - 2*T1 + 7");
        assert!((&a + &a.neg()).is_zero());
        assert_eq!(&p("x1 + T1") * &p("x1 - T1"), p("x1^2 - T1^2"));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Polynomial::x(&ring_p(2, 2), 1);
        let b = Polynomial::x(&ring_p(3, 2), 1);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(ReesError::RingMismatch));
    }

    #[test]
    fn printing_uses_symmetric_residues() {
        let r = ring_p(2, 2);
        let f = Polynomial::parse("x1 - 2*T2 + 5", &r).unwrap();
        assert_eq!(f.to_string(), "x1 - 2*T2 + 5");
        assert_eq!(f.to_compact_string(), "x1-2*T2+5");
    }

    #[test]
    fn orders_compare_as_documented() {
        let r = ring_p(3, 1);
        let mono = |s: &str| Polynomial::parse(s, &r).unwrap().terms()[0].0;
        let dr = MonomialOrder::DegRevLex;
        assert_eq!(dr.cmp(&mono("x1*x3"), &mono("x2^2")), Ordering::Less);
        assert_eq!(MonomialOrder::Lex.cmp(&mono("x1*x3"), &mono("x2^2")), Ordering::Greater);
        let elim_t = MonomialOrder::BlockElim { first_block: r.t_mask() };
        assert_eq!(elim_t.cmp(&mono("T1"), &mono("x1^5")), Ordering::Greater);
        assert_eq!(dr.cmp(&mono("T1"), &mono("x1^5")), Ordering::Less);
    }
}
