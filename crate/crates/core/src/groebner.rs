//! Buchberger's algorithm and the ideal toolbox built on it.
//!
//! The engine works on term lists sorted in the requested monomial order.
//! Pairs are selected by the normal strategy, using the sugar degree in which
//! auxiliary elimination variables weigh zero, so `t*f` and `(1-t)*g` are
//! treated as homogeneous whenever `f` and `g` are. Buchberger's two criteria
//! enter through the Gebauer-Moeller update.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};

use crate::error::{ReesError, Result};
use crate::field::Field;
use crate::polyring::{Monomial, MonomialOrder, OrderKey, PolyRing, Polynomial, RingRef};

type Terms<E> = Vec<(Monomial, E)>;

/// Polynomials longer than this are reduced through an ordered map.
const MAP_REDUCE_THRESHOLD: usize = 40;

static SELF_CHECK: AtomicBool = AtomicBool::new(false);
static CHECKED: AtomicUsize = AtomicUsize::new(0);
static FAILED: AtomicUsize = AtomicUsize::new(0);

/// Turns on certification of every freshly computed basis: all S-polynomials
/// are reduced against the result and failures are counted.
pub fn set_self_check(enabled: bool) {
    SELF_CHECK.store(enabled, AtomicOrdering::SeqCst);
}

/// `(bases certified, bases that failed certification)` since process start.
pub fn self_check_stats() -> (usize, usize) {
    (CHECKED.load(AtomicOrdering::SeqCst), FAILED.load(AtomicOrdering::SeqCst))
}

/// Cap on the number of S-pairs one basis computation may reduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GbBudget {
    pub max_pairs: usize,
}

impl Default for GbBudget {
    fn default() -> Self {
        GbBudget { max_pairs: 2_000_000 }
    }
}

#[derive(Clone, Debug)]
struct GPoly<E> {
    terms: Terms<E>,
    sugar: u32,
    lead_support: u32,
}

impl<E> GPoly<E> {
    fn lead(&self) -> &Monomial {
        &self.terms[0].0
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Incremental Buchberger state. Elements are kept monic.
struct Engine<'a, F: Field> {
    field: &'a F,
    order: MonomialOrder,
    weight_mask: u32,
    basis: Vec<GPoly<F::Elem>>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    processed: usize,
    budget: GbBudget,
    unit: bool,
}

impl<'a, F: Field> Engine<'a, F> {
    fn new(field: &'a F, order: MonomialOrder, weight_mask: u32, budget: GbBudget) -> Self {
        Engine {
            field,
            order,
            weight_mask,
            basis: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            processed: 0,
            budget,
            unit: false,
        }
    }

    fn sort_terms(&self, terms: &mut Terms<F::Elem>) {
        let order = self.order;
        terms.sort_unstable_by(|a, b| order.cmp(&b.0, &a.0));
    }

    fn weighted(&self, m: &Monomial) -> u32 {
        m.masked_degree(self.weight_mask)
    }

    fn sugar_of(&self, terms: &Terms<F::Elem>) -> u32 {
        terms.iter().map(|(m, _)| self.weighted(m)).max().unwrap_or(0)
    }

    fn make_monic(&self, terms: &mut Terms<F::Elem>) {
        if let Some((_, lc)) = terms.first() {
            if !self.field.is_one(lc) {
                let inv = self.field.inv(lc);
                for (_, c) in terms.iter_mut() {
                    *c = self.field.mul(c, &inv);
                }
            }
        }
    }

    /// `a - c * mono * b`, with `a` and `b` sorted descending.
    fn sub_mul(
        &self,
        a: &[(Monomial, F::Elem)],
        c: &F::Elem,
        mono: &Monomial,
        b: &[(Monomial, F::Elem)],
    ) -> Terms<F::Elem> {
        let field = self.field;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let mut shifted: Option<Monomial> = b.first().map(|t| t.0.mul(mono));
        while i < a.len() {
            let Some(bm) = shifted else { break };
            match self.order.cmp(&a[i].0, &bm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bm, field.neg(&field.mul(c, &b[j].1))));
                    j += 1;
                    shifted = b.get(j).map(|t| t.0.mul(mono));
                }
                Ordering::Equal => {
                    let v = field.sub(&a[i].1, &field.mul(c, &b[j].1));
                    if !field.is_zero(&v) {
                        out.push((bm, v));
                    }
                    i += 1;
                    j += 1;
                    shifted = b.get(j).map(|t| t.0.mul(mono));
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            out.push((t.0.mul(mono), field.neg(&field.mul(c, &t.1))));
        }
        out
    }

    fn find_reducer(&self, mono: &Monomial) -> Option<usize> {
        let support = mono.support();
        (0..self.basis.len()).find(|&k| {
            self.active[k]
                && self.basis[k].lead_support & !support == 0
                && self.basis[k].lead().divides(mono)
        })
    }

    /// Reduces `terms` by the active basis. With `full`, every term is
    /// reduced; otherwise only the leading term is.
    fn reduce(&self, terms: Terms<F::Elem>, sugar: u32, full: bool) -> (Terms<F::Elem>, u32) {
        if terms.len() > MAP_REDUCE_THRESHOLD {
            self.reduce_map(terms, sugar, full)
        } else {
            self.reduce_merge(terms, sugar, full)
        }
    }

    /// Reduction with an ordered map as accumulator; each step costs
    /// `O(|g| log |f|)` instead of a full merge.
    fn reduce_map(&self, terms: Terms<F::Elem>, mut sugar: u32, full: bool) -> (Terms<F::Elem>, u32) {
        let field = self.field;
        let order = self.order;
        let mut acc: BTreeMap<OrderKey, (Monomial, F::Elem)> =
            terms.into_iter().map(|(m, c)| (order.sort_key(&m), (m, c))).collect();
        let mut done: Terms<F::Elem> = Vec::new();
        while let Some((_, (mono, coeff))) = acc.pop_last() {
            match self.find_reducer(&mono) {
                Some(k) => {
                    let g = &self.basis[k];
                    let q = g.lead().quotient_of(&mono).expect("divisor");
                    sugar = sugar.max(g.sugar + self.weighted(&q));
                    for (m, c) in &g.terms[1..] {
                        let shifted = m.mul(&q);
                        let delta = field.neg(&field.mul(&coeff, c));
                        match acc.entry(order.sort_key(&shifted)) {
                            Entry::Vacant(slot) => {
                                slot.insert((shifted, delta));
                            }
                            Entry::Occupied(mut slot) => {
                                let v = field.add(&slot.get().1, &delta);
                                if field.is_zero(&v) {
                                    slot.remove();
                                } else {
                                    slot.get_mut().1 = v;
                                }
                            }
                        }
                    }
                }
                None => {
                    done.push((mono, coeff));
                    if !full {
                        break;
                    }
                }
            }
        }
        done.extend(acc.into_values().rev());
        (done, sugar)
    }

    fn reduce_merge(&self, mut terms: Terms<F::Elem>, mut sugar: u32, full: bool) -> (Terms<F::Elem>, u32) {
        let mut done: Terms<F::Elem> = Vec::new();
        let mut start = 0;
        while start < terms.len() {
            let (mono, coeff) = terms[start].clone();
            match self.find_reducer(&mono) {
                Some(k) => {
                    let g = &self.basis[k];
                    let q = g.lead().quotient_of(&mono).expect("divisor");
                    sugar = sugar.max(g.sugar + self.weighted(&q));
                    terms = self.sub_mul(&terms[start + 1..], &coeff, &q, &g.terms[1..]);
                    start = 0;
                }
                None => {
                    if !full {
                        break;
                    }
                    done.push((mono, coeff));
                    start += 1;
                    if start > 64 {
                        terms.drain(..start);
                        start = 0;
                    }
                }
            }
        }
        if full {
            done.extend(terms.drain(start..));
            (done, sugar)
        } else {
            (terms, sugar)
        }
    }

    fn s_poly(&self, pair: &Pair) -> Terms<F::Elem> {
        let (f, g) = (&self.basis[pair.i], &self.basis[pair.j]);
        let qf = f.lead().quotient_of(&pair.lcm).expect("lcm");
        let qg = g.lead().quotient_of(&pair.lcm).expect("lcm");
        let tail: Terms<F::Elem> = f.terms[1..].iter().map(|(m, c)| (m.mul(&qf), c.clone())).collect();
        self.sub_mul(&tail, &self.field.one(), &qg, &g.terms[1..])
    }

    /// Adds a nonzero, already reduced element and updates the pair set.
    fn insert_reduced(&mut self, mut terms: Terms<F::Elem>, sugar: u32) {
        self.make_monic(&mut terms);
        if terms[0].0.is_one() {
            self.unit = true;
        }
        let lead_support = terms[0].0.support();
        let h = self.basis.len();
        self.basis.push(GPoly {
            terms,
            sugar,
            lead_support,
        });
        self.active.push(true);
        self.update(h);
    }

    /// Reduces and inserts an arbitrary polynomial; zero results are dropped.
    fn insert(&mut self, mut terms: Terms<F::Elem>) {
        if terms.is_empty() || self.unit {
            return;
        }
        self.sort_terms(&mut terms);
        let sugar = self.sugar_of(&terms);
        let (reduced, sugar) = self.reduce(terms, sugar, true);
        if !reduced.is_empty() {
            self.insert_reduced(reduced, sugar);
        }
    }

    fn update(&mut self, h: usize) {
        let hl = *self.basis[h].lead();
        let mut candidates: Vec<(usize, Monomial)> = (0..h)
            .filter(|&g| self.active[g])
            .map(|g| (g, self.basis[g].lead().lcm(&hl)))
            .collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        while let Some((g1, l1)) = (!candidates.is_empty()).then(|| candidates.remove(0)) {
            let coprime = self.basis[g1].lead().is_coprime(&hl);
            let dominated = candidates.iter().chain(kept.iter()).any(|(_, l2)| l2.divides(&l1));
            if coprime || !dominated {
                kept.push((g1, l1));
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !self.basis[*g].lead().is_coprime(&hl))
            .map(|(g, lcm)| {
                let sugar = self.pair_sugar(g, h, &lcm);
                Pair { i: g, j: h, lcm, sugar }
            })
            .collect();
        let basis = &self.basis;
        self.pairs.retain(|p| {
            !hl.divides(&p.lcm)
                || basis[p.i].lead().lcm(&hl) == p.lcm
                || basis[p.j].lead().lcm(&hl) == p.lcm
        });
        self.pairs.extend(new_pairs);
        for g in 0..h {
            if self.active[g] && hl.divides(self.basis[g].lead()) {
                self.active[g] = false;
            }
        }
    }

    fn pair_sugar(&self, i: usize, j: usize, lcm: &Monomial) -> u32 {
        let side = |k: usize| {
            let q = self.basis[k].lead().quotient_of(lcm).expect("lcm");
            self.basis[k].sugar + self.weighted(&q)
        };
        side(i).max(side(j))
    }

    fn select(&mut self, bound: Option<u32>) -> Option<Pair> {
        let order = self.order;
        let best = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| bound.map_or(true, |b| p.sugar <= b))
            .min_by(|(_, a), (_, b)| {
                a.sugar
                    .cmp(&b.sugar)
                    .then_with(|| order.cmp(&a.lcm, &b.lcm))
                    .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
            })
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }

    /// Processes pairs until none with sugar `<= bound` remain.
    fn run(&mut self, bound: Option<u32>) -> Result<()> {
        while !self.unit {
            let Some(pair) = self.select(bound) else { break };
            self.processed += 1;
            if self.processed > self.budget.max_pairs {
                return Err(ReesError::BudgetExceeded {
                    pairs: self.processed - 1,
                });
            }
            let s = self.s_poly(&pair);
            if s.is_empty() {
                continue;
            }
            let (h, sugar) = self.reduce(s, pair.sugar, true);
            if !h.is_empty() {
                self.insert_reduced(h, sugar);
            }
        }
        Ok(())
    }

    /// Reduced Groebner basis, sorted ascending by leading monomial.
    fn finish(mut self) -> Vec<GPoly<F::Elem>> {
        if self.unit {
            return vec![GPoly {
                terms: vec![(Monomial::one(), self.field.one())],
                sugar: 0,
                lead_support: 0,
            }];
        }
        let keep: Vec<usize> = (0..self.basis.len()).filter(|&k| self.active[k]).collect();
        let mut out = Vec::with_capacity(keep.len());
        for &k in &keep {
            self.active[k] = false;
            let g = self.basis[k].clone();
            let lead = g.terms[0].clone();
            let (tail, _) = self.reduce(g.terms[1..].to_vec(), g.sugar, true);
            self.active[k] = true;
            let mut terms = vec![lead];
            terms.extend(tail);
            out.push(GPoly {
                terms,
                sugar: g.sugar,
                lead_support: g.lead_support,
            });
        }
        let order = self.order;
        out.sort_by(|a, b| order.cmp(a.lead(), b.lead()));
        out
    }
}

/// Checks Buchberger's criterion: every S-polynomial reduces to zero.
fn certify<F: Field>(field: &F, order: MonomialOrder, weight_mask: u32, basis: &[GPoly<F::Elem>]) -> bool {
    let mut engine = Engine::new(field, order, weight_mask, GbBudget::default());
    engine.basis = basis.to_vec();
    engine.active = vec![true; basis.len()];
    for j in 0..basis.len() {
        for i in 0..j {
            let lcm = basis[i].lead().lcm(basis[j].lead());
            let pair = Pair { i, j, lcm, sugar: 0 };
            let s = engine.s_poly(&pair);
            if !engine.reduce(s, 0, true).0.is_empty() {
                return false;
            }
        }
    }
    true
}

fn compute_basis<F: Field>(
    field: &F,
    order: MonomialOrder,
    weight_mask: u32,
    budget: GbBudget,
    inputs: Vec<Terms<F::Elem>>,
) -> Result<Vec<GPoly<F::Elem>>> {
    let mut engine = Engine::new(field, order, weight_mask, budget);
    let mut inputs: Vec<Terms<F::Elem>> = inputs
        .into_iter()
        .filter(|t| !t.is_empty())
        .map(|mut t| {
            engine.sort_terms(&mut t);
            t
        })
        .collect();
    inputs.sort_by(|a, b| {
        engine
            .sugar_of(a)
            .cmp(&engine.sugar_of(b))
            .then_with(|| order.cmp(&a[0].0, &b[0].0))
    });
    for t in inputs {
        engine.insert(t);
    }
    engine.run(None)?;
    let basis = engine.finish();
    if SELF_CHECK.load(AtomicOrdering::Relaxed) {
        CHECKED.fetch_add(1, AtomicOrdering::SeqCst);
        if !certify(field, order, weight_mask, &basis) {
            FAILED.fetch_add(1, AtomicOrdering::SeqCst);
        }
    }
    Ok(basis)
}

fn weight_mask_of<F: Field>(ring: &PolyRing<F>) -> u32 {
    ring.x_mask() | ring.t_mask()
}

/// A reduced Groebner basis for a fixed monomial order.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    ring: RingRef<F>,
    order: MonomialOrder,
    elements: Vec<GPoly<F::Elem>>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].lead().is_one()
    }

    /// Leading monomials with respect to the basis order.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elements.iter().map(|g| *g.lead()).collect()
    }

    pub fn polynomials(&self) -> Vec<Polynomial<F>> {
        self.elements
            .iter()
            .map(|g| Polynomial::from_terms(&self.ring, g.terms.clone()))
            .collect()
    }

    fn engine(&self) -> Engine<'_, F> {
        let mut engine = Engine::new(
            self.ring.field(),
            self.order,
            weight_mask_of(&self.ring),
            GbBudget::default(),
        );
        engine.basis = self.elements.clone();
        engine.active = vec![true; self.elements.len()];
        engine
    }

    /// Fully reduced remainder of `f`; zero iff `f` lies in the ideal.
    pub fn normal_form(&self, f: &Polynomial<F>) -> Polynomial<F> {
        let engine = self.engine();
        let mut terms = f.terms().to_vec();
        engine.sort_terms(&mut terms);
        let (rem, _) = engine.reduce(terms, 0, true);
        Polynomial::from_terms(&self.ring, rem)
    }

    pub fn contains(&self, f: &Polynomial<F>) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Re-runs Buchberger's criterion on this basis.
    pub fn is_certified(&self) -> bool {
        certify(self.ring.field(), self.order, weight_mask_of(&self.ring), &self.elements)
    }
}

/// An ideal given by generators, with reduced Groebner bases cached per order.
pub struct Ideal<F: Field> {
    ring: RingRef<F>,
    generators: Vec<Polynomial<F>>,
    budget: GbBudget,
    gb_cache: Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis<F>>>>,
}

impl<F: Field> Clone for Ideal<F> {
    fn clone(&self) -> Self {
        Ideal {
            ring: self.ring.clone(),
            generators: self.generators.clone(),
            budget: self.budget,
            gb_cache: Mutex::new(self.gb_cache.lock().expect("cache lock").clone()),
        }
    }
}

impl<F: Field> std::fmt::Debug for Ideal<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.generators.iter().map(|g| g.to_string())).finish()
    }
}

impl<F: Field> Ideal<F> {
    /// Zero generators are discarded. Every generator must live in `ring`.
    pub fn new(ring: &RingRef<F>, generators: Vec<Polynomial<F>>) -> Result<Self> {
        if generators.iter().any(|g| **g.ring() != **ring) {
            return Err(ReesError::RingMismatch);
        }
        Ok(Ideal {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            budget: GbBudget::default(),
            gb_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn zero(ring: &RingRef<F>) -> Self {
        Ideal::new(ring, Vec::new()).expect("same ring")
    }

    pub fn unit(ring: &RingRef<F>) -> Self {
        Ideal::new(ring, vec![Polynomial::one(ring)]).expect("same ring")
    }

    /// The ideal `(x_1, ..., x_d)`.
    pub fn x_ideal(ring: &RingRef<F>) -> Self {
        let gens = (1..=ring.d()).map(|i| Polynomial::x(ring, i)).collect();
        Ideal::new(ring, gens).expect("same ring")
    }

    pub fn with_budget(mut self, budget: GbBudget) -> Self {
        self.budget = budget;
        self
    }

    fn derived(&self, generators: Vec<Polynomial<F>>) -> Self {
        Ideal {
            ring: self.ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            budget: self.budget,
            gb_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn ring(&self) -> &RingRef<F> {
        &self.ring
    }

    pub fn budget(&self) -> GbBudget {
        self.budget
    }

    pub fn generators(&self) -> &[Polynomial<F>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    fn check_ring(&self, other: &Ideal<F>) -> Result<()> {
        if *self.ring != *other.ring {
            return Err(ReesError::RingMismatch);
        }
        Ok(())
    }

    /// Reduced Groebner basis for `order`, computed once and cached.
    pub fn groebner_basis(&self, order: MonomialOrder) -> Result<Arc<GroebnerBasis<F>>> {
        if let Some(gb) = self.gb_cache.lock().expect("cache lock").get(&order) {
            return Ok(gb.clone());
        }
        let inputs = self.generators.iter().map(|g| g.terms().to_vec()).collect();
        let elements = compute_basis(
            self.ring.field(),
            order,
            weight_mask_of(&self.ring),
            self.budget,
            inputs,
        )?;
        let gb = Arc::new(GroebnerBasis {
            ring: self.ring.clone(),
            order,
            elements,
        });
        self.gb_cache
            .lock()
            .expect("cache lock")
            .entry(order)
            .or_insert_with(|| gb.clone());
        Ok(gb)
    }

    pub fn normal_form(&self, f: &Polynomial<F>, order: MonomialOrder) -> Result<Polynomial<F>> {
        if **f.ring() != *self.ring {
            return Err(ReesError::RingMismatch);
        }
        Ok(self.groebner_basis(order)?.normal_form(f))
    }

    pub fn contains(&self, f: &Polynomial<F>) -> Result<bool> {
        Ok(self.normal_form(f, MonomialOrder::DegRevLex)?.is_zero())
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Ideal<F>) -> Result<bool> {
        self.check_ring(other)?;
        let gb = self.groebner_basis(MonomialOrder::DegRevLex)?;
        Ok(other.generators.iter().all(|g| gb.contains(g)))
    }

    /// Equality by mutual membership of generators.
    pub fn equals(&self, other: &Ideal<F>) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    pub fn is_proper(&self) -> Result<bool> {
        Ok(!self.groebner_basis(MonomialOrder::DegRevLex)?.is_unit())
    }

    pub fn sum(&self, other: &Ideal<F>) -> Result<Self> {
        self.check_ring(other)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ok(self.derived(gens))
    }

    pub fn product(&self, other: &Ideal<F>) -> Result<Self> {
        self.check_ring(other)?;
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a * b);
            }
        }
        Ok(self.derived(gens))
    }

    pub fn power(&self, e: u32) -> Result<Self> {
        let mut acc = Ideal::unit(&self.ring).with_budget(self.budget);
        for _ in 0..e {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// `I ∩ J` by eliminating `t` from `t*I + (1-t)*J`.
    pub fn intersect(&self, other: &Ideal<F>) -> Result<Self> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.derived(Vec::new()));
        }
        let ext = self.ring.with_aux(1)?;
        let t_var = self.ring.nvars();
        let t = Polynomial::var(&ext, t_var);
        let one_minus_t = &Polynomial::one(&ext) - &t;
        let mut inputs = Vec::new();
        for g in &self.generators {
            inputs.push((&g.change_ring(&ext)? * &t).into_terms());
        }
        for g in &other.generators {
            inputs.push((&g.change_ring(&ext)? * &one_minus_t).into_terms());
        }
        let order = MonomialOrder::BlockElim {
            first_block: 1 << t_var,
        };
        let elements = compute_basis(
            ext.field(),
            order,
            weight_mask_of(&ext),
            self.budget,
            inputs,
        )?;
        let kept: Vec<GPoly<F::Elem>> = elements
            .into_iter()
            .filter(|g| g.terms.iter().all(|(m, _)| m.exponent(t_var) == 0))
            .collect();
        let gens = kept
            .iter()
            .map(|g| Polynomial::from_terms(&self.ring, g.terms.clone()))
            .collect();
        let out = self.derived(gens);
        // the t-free part of a reduced elimination basis is the reduced
        // degrevlex basis of the intersection
        let gb = Arc::new(GroebnerBasis {
            ring: self.ring.clone(),
            order: MonomialOrder::DegRevLex,
            elements: kept,
        });
        out.gb_cache
            .lock()
            .expect("cache lock")
            .insert(MonomialOrder::DegRevLex, gb);
        Ok(out)
    }

    /// `I ∩ (x_1..x_d)`. For bihomogeneous generators this is read off
    /// directly: pure-T generators get multiplied by each `x_i`, the rest
    /// already lie in `(x)`. Otherwise falls back to [`Ideal::intersect`].
    pub fn intersect_x_ideal(&self) -> Result<Self> {
        if !self.generators.iter().all(|g| g.is_bihomogeneous()) {
            return self.intersect(&Ideal::x_ideal(&self.ring));
        }
        let xs: Vec<_> = (1..=self.ring.d()).map(|i| Polynomial::x(&self.ring, i)).collect();
        let mut gens = Vec::new();
        for g in &self.generators {
            match g.bidegree() {
                Some((0, _)) => gens.extend(xs.iter().map(|x| x * g)),
                _ => gens.push(g.clone()),
            }
        }
        Ok(self.derived(gens))
    }

    /// `I : (f)` as `(I ∩ (f)) / f`.
    pub fn colon_poly(&self, f: &Polynomial<F>) -> Result<Self> {
        if f.is_zero() {
            return Err(ReesError::Precondition("colon by the zero polynomial".into()));
        }
        if f.is_constant() {
            return Ok(self.derived(self.generators.clone()));
        }
        let principal = self.derived(vec![f.clone()]);
        let meet = self.intersect(&principal)?;
        let quotients = meet
            .generators
            .iter()
            .map(|g| exact_division(g, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.derived(quotients))
    }

    /// `I : J = ∩_j (I : f_j)` over the generators of `J`.
    pub fn colon(&self, other: &Ideal<F>) -> Result<Self> {
        self.check_ring(other)?;
        if other.is_zero() {
            return Err(ReesError::Precondition("colon by the zero ideal".into()));
        }
        let mut acc: Option<Ideal<F>> = None;
        for f in &other.generators {
            let part = self.colon_poly(f)?;
            acc = Some(match acc {
                None => part,
                Some(prev) => prev.intersect(&part)?,
            });
        }
        Ok(acc.expect("nonzero ideal has a generator"))
    }

    /// The ladder `I, I:J, I:J^2, ...` up to `I:J^power`, by successive colons.
    pub fn colon_ladder(&self, other: &Ideal<F>, power: u32) -> Result<Vec<Ideal<F>>> {
        let mut ladder = vec![self.clone()];
        for _ in 0..power {
            let next = ladder.last().expect("nonempty").colon(other)?;
            ladder.push(next);
        }
        Ok(ladder)
    }

    /// Iterates `I <- I : J` to a fixpoint. Returns the saturation and the
    /// first `i` with `I : J^i = I : J^(i+1)`.
    pub fn saturate(&self, other: &Ideal<F>) -> Result<(Self, u32)> {
        let mut current = self.clone();
        let mut steps = 0u32;
        loop {
            let next = current.colon(other)?;
            if next.equals(&current)? {
                return Ok((current, steps));
            }
            current = next;
            steps += 1;
        }
    }

    /// `dim S/I` via the leading-term ideal of the degrevlex basis.
    pub fn krull_dimension(&self) -> Result<usize> {
        let gb = self.groebner_basis(MonomialOrder::DegRevLex)?;
        if gb.is_unit() {
            return Err(ReesError::ImproperIdeal);
        }
        Ok(monomial_ideal_dimension(&gb.leading_monomials(), self.ring.nvars()))
    }

    /// `ht I = nvars - dim S/I`.
    pub fn krull_height(&self) -> Result<usize> {
        Ok(self.ring.nvars() - self.krull_dimension()?)
    }

    /// A minimal generating subset, processed in increasing total degree.
    /// Requires bihomogeneous generators (graded Nakayama).
    pub fn minimal_generators(&self) -> Result<Vec<Polynomial<F>>> {
        self.minimal_generators_ordered(false)
    }

    /// As [`Ideal::minimal_generators`], with ties inside one degree visited
    /// in reverse generator order when `reversed` is set.
    pub fn minimal_generators_ordered(&self, reversed: bool) -> Result<Vec<Polynomial<F>>> {
        self.minimal_generators_over(&Ideal::zero(&self.ring), reversed)
    }

    /// A subset of the generators that, together with `base`, minimally
    /// generates `self + base` modulo `base`. Candidates are visited in
    /// increasing degree, stably in generator order (reversed on request).
    pub fn minimal_generators_over(&self, base: &Ideal<F>, reversed: bool) -> Result<Vec<Polynomial<F>>> {
        self.check_ring(base)?;
        let all = base.generators.iter().chain(self.generators.iter());
        if let Some(bad) = all.clone().find(|g| !g.is_bihomogeneous()) {
            return Err(ReesError::Validation(format!(
                "minimal generators need bihomogeneous input, got {bad}"
            )));
        }
        let mut candidates: Vec<&Polynomial<F>> = self.generators.iter().collect();
        if reversed {
            candidates.reverse();
        }
        // base elements come first within each degree and are never kept
        let mut queue: Vec<(bool, &Polynomial<F>)> = base.generators.iter().map(|g| (true, g)).collect();
        queue.extend(candidates.into_iter().map(|g| (false, g)));
        queue.sort_by_key(|(is_base, g)| (g.total_degree().unwrap_or(0), !*is_base));
        let field = self.ring.field();
        let mut engine = Engine::new(
            field,
            MonomialOrder::DegRevLex,
            weight_mask_of(&self.ring),
            self.budget,
        );
        let mut kept = Vec::new();
        for (is_base, g) in queue {
            let deg = g.total_degree().unwrap_or(0);
            engine.run(Some(deg))?;
            let mut terms = g.terms().to_vec();
            engine.sort_terms(&mut terms);
            let sugar = engine.sugar_of(&terms);
            let (rem, sugar) = engine.reduce(terms, sugar, true);
            if !rem.is_empty() {
                if !is_base {
                    kept.push(g.clone());
                }
                engine.insert_reduced(rem, sugar);
            }
        }
        Ok(kept)
    }

    /// Generators with the variables in `mask` set to zero.
    pub fn substitute_zero(&self, mask: u32) -> Self {
        self.derived(self.generators.iter().map(|g| g.substitute_zero(mask)).collect())
    }
}

/// Exact quotient `g / f`; fails if `f` does not divide `g`.
pub fn exact_division<F: Field>(g: &Polynomial<F>, f: &Polynomial<F>) -> Result<Polynomial<F>> {
    let field = g.field().clone();
    let (lead_m, lead_c) = f
        .leading()
        .cloned()
        .ok_or_else(|| ReesError::ExactDivision("division by zero".into()))?;
    let lead_inv = field.inv(&lead_c);
    let mut rem = g.clone();
    let mut quotient = Vec::new();
    while let Some((m, c)) = rem.leading().cloned() {
        let q = lead_m.quotient_of(&m).ok_or_else(|| {
            ReesError::ExactDivision(format!("{f} does not divide {g}"))
        })?;
        let qc = field.mul(&c, &lead_inv);
        let step = f.mul_monomial(&q).scale(&qc);
        rem = &rem - &step;
        quotient.push((q, qc));
    }
    Ok(Polynomial::from_terms(g.ring(), quotient))
}

/// Krull dimension of `k[x_1..x_n]/M` for the monomial ideal `M` generated by
/// `monomials`: the size of the largest variable set containing the support
/// of no generator, found as `n` minus a minimum hitting set.
pub fn monomial_ideal_dimension(monomials: &[Monomial], nvars: usize) -> usize {
    let mut supports: Vec<u32> = monomials.iter().map(|m| m.support()).collect();
    if supports.iter().any(|&s| s == 0) {
        return 0;
    }
    supports.sort_by_key(|s| s.count_ones());
    let mut minimal: Vec<u32> = Vec::new();
    for s in supports {
        if !minimal.iter().any(|&t| t & s == t) {
            minimal.push(s);
        }
    }
    let mut best = nvars;
    min_hitting_set(&minimal, 0, 0, &mut best);
    nvars - best
}

fn min_hitting_set(sets: &[u32], chosen: u32, size: usize, best: &mut usize) {
    if size >= *best {
        return;
    }
    let unhit = sets
        .iter()
        .filter(|&&s| s & chosen == 0)
        .min_by_key(|s| s.count_ones());
    let Some(&target) = unhit else {
        *best = size;
        return;
    };
    let mut bits = target;
    while bits != 0 {
        let v = bits.trailing_zeros();
        bits &= bits - 1;
        min_hitting_set(sets, chosen | 1 << v, size + 1, best);
    }
}
