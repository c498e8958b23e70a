//! Defining equations of Rees algebras of almost linearly presented
//! grade-2 perfect ideals.
//!
//! Given the `m x (m-1)` Hilbert-Burch matrix `phi` over `k[x_1..x_d]`, the
//! symmetric algebra ideal `L` is generated by `[T_1 .. T_m] * phi`, and the
//! Rees ideal `A` is computed two ways: by saturating `L` with respect to
//! `(x_1..x_d)`, and by the ladder of iterated Jacobian duals `B_i` with dual
//! ideals `L + I_d(B_i)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{ReesError, Result};
use crate::field::Field;
use crate::groebner::{GbBudget, Ideal};
use crate::polymatrix::{combinations, PolyMatrix};
use crate::polyring::{Monomial, MonomialOrder, Polynomial, RingRef};

/// Which x-variable absorbs a monomial when writing `u = [x] * c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PivotRule {
    /// Smallest-index x-variable dividing the monomial.
    #[default]
    Smallest,
    /// Largest-index x-variable dividing the monomial.
    Largest,
}

/// How new columns of an iterated Jacobian dual are found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DualMethod {
    /// Minimal generators of `I_d(B_{i-1}) ∩ (x)`.
    #[default]
    General,
    /// `d x d` minors built from `d-1` columns of `B(phi')` and one column of
    /// `B_{i-1}`, kept when they lie in `(x)`.
    Restricted,
}

impl std::str::FromStr for DualMethod {
    type Err = ReesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(DualMethod::General),
            "restricted" => Ok(DualMethod::Restricted),
            other => Err(ReesError::Validation(format!(
                "unknown method `{other}` (expected general or restricted)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DualOptions {
    pub method: DualMethod,
    pub pivot: PivotRule,
    /// Visit candidate generators in reverse order before minimalizing.
    pub reversed_generators: bool,
}

/// A validated almost linear presentation matrix.
#[derive(Clone, Debug)]
pub struct PresentationInput<F: Field> {
    phi: PolyMatrix<F>,
    n: u32,
    warnings: Vec<String>,
}

impl<F: Field> PresentationInput<F> {
    /// Checks shape and degrees: `m x (m-1)` over the x-variables, columns
    /// `1..m-2` linear, last column of a single degree `n >= 1`.
    pub fn new(phi: PolyMatrix<F>) -> Result<Self> {
        let ring = phi.ring().clone();
        let m = phi.rows();
        if m < 2 || phi.cols() + 1 != m {
            return Err(ReesError::Shape(format!(
                "presentation matrix must be m x (m-1) with m >= 2, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        if ring.m() != m {
            return Err(ReesError::Shape(format!(
                "matrix has {m} rows but the ring declares {} T-variables",
                ring.m()
            )));
        }
        for (k, e) in phi.entries().iter().enumerate() {
            if e.support() & !ring.x_mask() != 0 {
                return Err(ReesError::Validation(format!(
                    "entry ({}, {}) = {e} involves non-x variables",
                    k / phi.cols() + 1,
                    k % phi.cols() + 1
                )));
            }
        }
        let column_degree = |c: usize| -> Result<Option<u32>> {
            let mut degree = None;
            for e in phi.column(c).iter().filter(|e| !e.is_zero()) {
                let (dx, _) = e.bidegree().ok_or_else(|| {
                    ReesError::Validation(format!("entry {e} in column {} is not homogeneous", c + 1))
                })?;
                match degree {
                    None => degree = Some(dx),
                    Some(prev) if prev != dx => {
                        return Err(ReesError::Validation(format!(
                            "column {} mixes degrees {prev} and {dx}",
                            c + 1
                        )))
                    }
                    _ => {}
                }
            }
            Ok(degree)
        };
        for c in 0..m - 2 {
            match column_degree(c)? {
                Some(1) | None => {}
                Some(other) => {
                    return Err(ReesError::Validation(format!(
                        "column {} must be linear, has degree {other}",
                        c + 1
                    )))
                }
            }
        }
        let n = match column_degree(m - 2)? {
            Some(0) => {
                return Err(ReesError::Validation(
                    "last column has constant entries; the presentation is not minimal".into(),
                ))
            }
            Some(n) => n,
            None => return Err(ReesError::Validation("last column is zero".into())),
        };
        let mut warnings = Vec::new();
        if m <= ring.d() {
            warnings.push(format!(
                "m = {m} <= d = {}: the ideal is of linear type and A = L",
                ring.d()
            ));
        }
        Ok(PresentationInput { phi, n, warnings })
    }

    pub fn ring(&self) -> &RingRef<F> {
        self.phi.ring()
    }

    pub fn phi(&self) -> &PolyMatrix<F> {
        &self.phi
    }

    /// Degree of the entries of the last column.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.ring().d()
    }

    pub fn m(&self) -> usize {
        self.phi.rows()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_linear_type(&self) -> bool {
        self.m() <= self.d()
    }

    /// The linear columns `phi'`.
    pub fn phi_prime(&self) -> PolyMatrix<F> {
        self.phi.select_columns(&(0..self.m() - 2).collect::<Vec<_>>())
    }

    pub fn with_budget(&self, budget: GbBudget) -> IdealFactory<'_, F> {
        IdealFactory { input: self, budget }
    }
}

/// Builds ideals over the input ring sharing one Groebner budget.
#[derive(Clone, Copy)]
pub struct IdealFactory<'a, F: Field> {
    input: &'a PresentationInput<F>,
    budget: GbBudget,
}

impl<F: Field> IdealFactory<'_, F> {
    pub fn ideal(&self, gens: Vec<Polynomial<F>>) -> Result<Ideal<F>> {
        Ok(Ideal::new(self.input.ring(), gens)?.with_budget(self.budget))
    }
}

/// Entries of the row vector `[T_1 .. T_m] * phi`.
pub fn symmetric_generators<F: Field>(phi: &PolyMatrix<F>) -> Result<Vec<Polynomial<F>>> {
    let ring = phi.ring();
    if phi.rows() != ring.m() {
        return Err(ReesError::Shape(format!(
            "{} rows against {} T-variables",
            phi.rows(),
            ring.m()
        )));
    }
    let t: Vec<_> = (1..=ring.m()).map(|j| Polynomial::t(ring, j)).collect();
    phi.left_mul_row(&t)
}

/// The symmetric algebra ideal `L = ([T] * phi)`.
pub fn symmetric_ideal<F: Field>(phi: &PolyMatrix<F>) -> Result<Ideal<F>> {
    Ideal::new(phi.ring(), symmetric_generators(phi)?)
}

/// Writes `u` as `[x_1 .. x_d] * c`, assigning each monomial to one
/// x-variable dividing it according to `pivot`.
pub fn decompose_in_x<F: Field>(u: &Polynomial<F>, pivot: PivotRule) -> Result<Vec<Polynomial<F>>> {
    let ring = u.ring();
    let d = ring.d();
    let mut rows: Vec<Vec<(Monomial, F::Elem)>> = vec![Vec::new(); d];
    for (mono, c) in u.terms() {
        let xs = mono.support() & ring.x_mask();
        if xs == 0 {
            return Err(ReesError::Validation(format!(
                "{u} is not in (x1..x{d}): term without an x-variable"
            )));
        }
        let var = match pivot {
            PivotRule::Smallest => xs.trailing_zeros() as usize,
            PivotRule::Largest => 31 - xs.leading_zeros() as usize,
        };
        let q = Monomial::var(var).quotient_of(mono).expect("x-variable divides");
        rows[var].push((q, c.clone()));
    }
    Ok(rows.into_iter().map(|terms| Polynomial::from_terms(ring, terms)).collect())
}

/// A Jacobian dual `B` with `[T] * phi = [x] * B`.
pub fn jacobian_dual<F: Field>(phi: &PolyMatrix<F>, pivot: PivotRule) -> Result<PolyMatrix<F>> {
    let ring = phi.ring();
    let columns = symmetric_generators(phi)?
        .iter()
        .map(|u| decompose_in_x(u, pivot))
        .collect::<Result<Vec<_>>>()?;
    let empty = PolyMatrix::new(ring, ring.d(), 0, Vec::new())?;
    empty.with_columns(&columns)
}

/// Entries of `[x_1 .. x_d] * B`.
pub fn x_times<F: Field>(b: &PolyMatrix<F>) -> Result<Vec<Polynomial<F>>> {
    let ring = b.ring();
    let x: Vec<_> = (1..=ring.d()).map(|i| Polynomial::x(ring, i)).collect();
    b.left_mul_row(&x)
}

/// One level of the iterated Jacobian dual ladder.
#[derive(Clone, Debug)]
pub struct DualState<F: Field> {
    pub level: u32,
    pub b: PolyMatrix<F>,
    /// `L_i = ([x] * B_i)`.
    pub l_i: Ideal<F>,
    /// `L + I_d(B_i)`.
    pub dual_ideal: Ideal<F>,
    /// Whether `dual_ideal` equals the previous level's.
    pub stabilized: bool,
}

/// Data shared by every step of one dual ladder.
#[derive(Clone, Debug)]
pub struct DualContext<F: Field> {
    pub sym: Ideal<F>,
    /// `B(phi')`, the Jacobian dual of the linear columns.
    pub b_prime: PolyMatrix<F>,
    pub options: DualOptions,
}

/// Level one: `B_1 = B(phi)`, `L_1 = L`.
pub fn initial_dual_state<F: Field>(
    input: &PresentationInput<F>,
    options: DualOptions,
    budget: GbBudget,
) -> Result<(DualContext<F>, DualState<F>)> {
    let factory = input.with_budget(budget);
    let d = input.d();
    let sym = factory.ideal(symmetric_generators(input.phi())?)?;
    let b1 = jacobian_dual(input.phi(), options.pivot)?;
    let b_prime = jacobian_dual(&input.phi_prime(), options.pivot)?;
    let l1 = factory.ideal(x_times(&b1)?)?;
    let dual_ideal = sym.sum(&b1.minor_ideal_or_zero(d)?)?;
    let ctx = DualContext {
        sym,
        b_prime,
        options,
    };
    let state = DualState {
        level: 1,
        b: b1,
        l_i: l1,
        dual_ideal,
        stabilized: false,
    };
    Ok((ctx, state))
}

fn in_x_ideal<F: Field>(u: &Polynomial<F>) -> bool {
    let xs = u.ring().x_mask();
    u.terms().iter().all(|(m, _)| m.support() & xs != 0)
}

/// Builds `B_i` from `B_{i-1}`.
pub fn iterated_dual_step<F: Field>(ctx: &DualContext<F>, state: &DualState<F>) -> Result<DualState<F>> {
    let ring = state.b.ring().clone();
    let d = ring.d();
    let budget = ctx.sym.budget();
    let candidates: Vec<Polynomial<F>> = match ctx.options.method {
        DualMethod::General => {
            let minors = state.b.minor_ideal_or_zero(d)?.with_budget(budget);
            let meet = minors.intersect_x_ideal()?;
            meet.minimal_generators_over(&state.l_i, ctx.options.reversed_generators)?
        }
        DualMethod::Restricted => {
            let mut dets = Vec::new();
            for cols in combinations(ctx.b_prime.cols(), d - 1) {
                let base = ctx.b_prime.select_columns(&cols);
                for c in 0..state.b.cols() {
                    let square = base.hconcat(&state.b.select_columns(&[c]))?;
                    let det = square.determinant()?;
                    if !det.is_zero() && in_x_ideal(&det) {
                        dets.push(det);
                    }
                }
            }
            let pool = Ideal::new(&ring, dets)?.with_budget(budget);
            pool.minimal_generators_over(&state.l_i, ctx.options.reversed_generators)?
        }
    };
    // candidates are minimal modulo L_{i-1}, so none of them lies in it
    let columns = candidates
        .iter()
        .map(|u| decompose_in_x(u, ctx.options.pivot))
        .collect::<Result<Vec<_>>>()?;
    let b = state.b.with_columns(&columns)?;
    let l_i = Ideal::new(&ring, x_times(&b)?)?.with_budget(budget);
    let dual_ideal = ctx.sym.sum(&b.minor_ideal_or_zero(d)?)?;
    // B_{i-1} is a submatrix of B_i, so only the reverse containment is open
    let stabilized = state.dual_ideal.contains_ideal(&dual_ideal)?;
    Ok(DualState {
        level: state.level + 1,
        b,
        l_i,
        dual_ideal,
        stabilized,
    })
}

/// The dual ladder from level 1 until a level repeats its predecessor's ideal
/// or `max_level` is reached.
pub fn iterated_dual_chain<F: Field>(
    input: &PresentationInput<F>,
    options: DualOptions,
    max_level: u32,
    budget: GbBudget,
) -> Result<(DualContext<F>, Vec<DualState<F>>)> {
    let (ctx, first) = initial_dual_state(input, options, budget)?;
    let mut chain = vec![first];
    while chain.len() < max_level.max(1) as usize {
        let last = chain.last().expect("nonempty");
        if last.stabilized {
            break;
        }
        let next = iterated_dual_step(&ctx, last)?;
        chain.push(next);
    }
    Ok((ctx, chain))
}

/// The state at exactly `level`, stepping past stabilization if needed.
pub fn dual_at_level<F: Field>(
    input: &PresentationInput<F>,
    options: DualOptions,
    level: u32,
    budget: GbBudget,
) -> Result<DualState<F>> {
    if level == 0 {
        return Err(ReesError::Validation("dual levels start at 1".into()));
    }
    let (ctx, mut state) = initial_dual_state(input, options, budget)?;
    while state.level < level {
        state = iterated_dual_step(&ctx, &state)?;
    }
    Ok(state)
}

/// Level whose dual ideal is final: the predecessor of the first stabilized
/// level.
pub fn stabilization_level<F: Field>(chain: &[DualState<F>]) -> Option<u32> {
    chain.iter().find(|s| s.stabilized).map(|s| s.level - 1)
}

/// `L : (x)^i` for `i = 0..=sat_index`, with the saturation last.
#[derive(Clone, Debug)]
pub struct Saturation<F: Field> {
    pub ladder: Vec<Ideal<F>>,
    pub sat_index: u32,
}

impl<F: Field> Saturation<F> {
    pub fn saturated(&self) -> &Ideal<F> {
        self.ladder.last().expect("nonempty ladder")
    }
}

/// `A = L : (x)^∞` by iterated colons; `sat_index` is the first `i` with
/// `L : (x)^i = L : (x)^(i+1)`.
pub fn rees_via_saturation<F: Field>(input: &PresentationInput<F>, budget: GbBudget) -> Result<Saturation<F>> {
    let sym = input.with_budget(budget).ideal(symmetric_generators(input.phi())?)?;
    saturation_ladder(&sym, &Ideal::x_ideal(input.ring()))
}

pub fn saturation_ladder<F: Field>(ideal: &Ideal<F>, by: &Ideal<F>) -> Result<Saturation<F>> {
    let mut ladder = vec![ideal.clone()];
    loop {
        let current = ladder.last().expect("nonempty");
        let next = current.colon(by)?;
        if next.equals(current)? {
            let sat_index = (ladder.len() - 1) as u32;
            return Ok(Saturation { ladder, sat_index });
        }
        ladder.push(next);
    }
}

/// Fitting-ideal test for `G_d`: `ht I_{m-i}(phi) >= i + 1` for
/// `1 <= i <= d - 1`.
pub fn check_gd<F: Field>(phi: &PolyMatrix<F>, budget: GbBudget) -> Result<bool> {
    let d = phi.ring().d();
    let m = phi.rows();
    for i in 1..d {
        if i >= m {
            // I_0 is the unit ideal
            continue;
        }
        let fitting = phi.minor_ideal_or_zero(m - i)?.with_budget(budget);
        if !fitting.is_proper()? {
            continue;
        }
        if fitting.krull_height()? < i + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The special fiber ideal `(A + (x)) ∩ k[T]`.
#[derive(Clone, Debug)]
pub struct Fiber<F: Field> {
    pub generators: Vec<Polynomial<F>>,
    pub is_principal: bool,
    /// T-degree of the generator when principal.
    pub degree: Option<u32>,
}

pub fn special_fiber<F: Field>(a: &Ideal<F>) -> Result<Fiber<F>> {
    let ring = a.ring().clone();
    let with_x = a.sum(&Ideal::x_ideal(&ring))?;
    let gb = with_x.groebner_basis(MonomialOrder::DegRevLex)?;
    let images: Vec<_> = gb
        .polynomials()
        .into_iter()
        .map(|g| g.substitute_zero(ring.x_mask()))
        .filter(|g| !g.is_zero())
        .collect();
    let fiber = Ideal::new(&ring, images)?.with_budget(a.budget());
    let generators = fiber.minimal_generators()?;
    let is_principal = generators.len() == 1;
    let degree = if is_principal {
        generators[0].bidegree().map(|(_, dt)| dt)
    } else {
        None
    };
    Ok(Fiber {
        generators,
        is_principal,
        degree,
    })
}

/// Maximal T-degree over a minimal bihomogeneous generating set.
pub fn relation_type<F: Field>(a: &Ideal<F>) -> Result<u32> {
    Ok(relation_type_of(&a.minimal_generators()?))
}

pub fn relation_type_of<F: Field>(minimal: &[Polynomial<F>]) -> u32 {
    minimal
        .iter()
        .filter_map(|g| g.bidegree().map(|(_, dt)| dt))
        .max()
        .unwrap_or(0)
}

/// Ambient-ring stand-in for the second description of `A`: with
/// `J = L' + I_d(B(phi'))` and `K = L' + I_{d-1}(B) + (x_d)`, compares
/// `(g*K^n + J) : x_d^n` with `a`. Requires `m = d + 1`.
pub fn second_form_check<F: Field>(input: &PresentationInput<F>, a: &Ideal<F>, budget: GbBudget) -> Result<bool> {
    let (d, m, n) = (input.d(), input.m(), input.n());
    if m != d + 1 || d < 2 {
        return Err(ReesError::Precondition(format!(
            "second form check needs m = d + 1 with d >= 2, got d = {d}, m = {m}"
        )));
    }
    let ring = input.ring().clone();
    let factory = input.with_budget(budget);
    let sym = symmetric_generators(input.phi())?;
    let g = sym[m - 2].clone();
    let l_prime = factory.ideal(sym[..m - 2].to_vec())?;
    let b_prime = jacobian_dual(&input.phi_prime(), PivotRule::Smallest)?;
    let j = l_prime.sum(&b_prime.minor_ideal_or_zero(d)?)?;
    let b = b_prime.delete_row(d - 1);
    let x_d = Polynomial::x(&ring, d);
    let k = l_prime
        .sum(&b.minor_ideal_or_zero(d - 1)?)?
        .sum(&factory.ideal(vec![x_d.clone()])?)?;
    let gk = factory.ideal(vec![g])?.product(&k.power(n)?)?;
    let d_ideal = gk.sum(&j)?.colon_poly(&x_d.pow(n))?;
    d_ideal.equals(a)
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub dual: DualOptions,
    /// Highest dual level computed; defaults to `2n`.
    pub level_cap: Option<u32>,
    pub budget: GbBudget,
    /// Run [`second_form_check`] when `m = d + 1`.
    pub second_form: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            dual: DualOptions::default(),
            level_cap: None,
            budget: GbBudget::default(),
            second_form: false,
        }
    }
}

/// Height map keys.
pub const HEIGHT_L: &str = "L";
pub const HEIGHT_A: &str = "A";
pub const HEIGHT_ID_B1: &str = "Id_B1";
pub const HEIGHT_ID_BPRIME: &str = "Id_Bprime";
pub const HEIGHT_IDM1_BPRIME: &str = "Id-1_Bprime";

/// Everything the pipeline learns about one presentation.
#[derive(Clone, Debug)]
pub struct ReesReport<F: Field> {
    pub n: u32,
    pub d: usize,
    pub m: usize,
    pub gd_ok: bool,
    pub linear_type: bool,
    /// Heights of `L`, `A`, `I_d(B_1)`, `I_d(B(phi'))` and `I_{d-1}(B(phi'))`;
    /// the zero ideal has height 0.
    pub heights: BTreeMap<String, usize>,
    /// Keys of `heights` whose ideal is the zero ideal.
    pub zero_ideals: Vec<String>,
    pub saturation: Saturation<F>,
    pub dual_chain: Vec<DualState<F>>,
    pub stabilization_level: Option<u32>,
    /// `A` equals the dual ideal at stabilization (or at the cap).
    pub forms_equal: bool,
    /// `L : (x) = L + I_d(B_1)`.
    pub first_colon_equal: bool,
    pub second_form: Option<bool>,
    pub fiber: Fiber<F>,
    pub relation_type: u32,
    /// Minimal generators of `A`, sorted by bidegree then monomial order.
    pub generators: Vec<Polynomial<F>>,
    pub warnings: Vec<String>,
}

impl<F: Field> ReesReport<F> {
    pub fn sat_index(&self) -> u32 {
        self.saturation.sat_index
    }

    pub fn a_sat(&self) -> &Ideal<F> {
        self.saturation.saturated()
    }
}

/// Sorts generators by bidegree, then by leading monomial.
pub fn sort_generators<F: Field>(gens: &mut [Polynomial<F>]) {
    gens.sort_by(|a, b| {
        let key = |p: &Polynomial<F>| p.bidegree().unwrap_or((u32::MAX, u32::MAX));
        key(a).cmp(&key(b)).then_with(|| {
            let (la, lb) = (a.leading().map(|t| t.0), b.leading().map(|t| t.0));
            match (la, lb) {
                (Some(x), Some(y)) => MonomialOrder::DegRevLex.cmp(&y, &x),
                _ => std::cmp::Ordering::Equal,
            }
        })
    });
}

fn height_or_zero<F: Field>(ideal: &Ideal<F>) -> Result<usize> {
    if ideal.is_zero() {
        Ok(0)
    } else {
        ideal.krull_height()
    }
}

/// Runs the whole pipeline.
pub fn run_full_report<F: Field>(input: &PresentationInput<F>, options: &ReportOptions) -> Result<ReesReport<F>> {
    let budget = options.budget;
    let d = input.d();
    let ring = input.ring().clone();
    let gd_ok = check_gd(input.phi(), budget).map_err(|e| e.context("G_d check"))?;
    let mut warnings = input.warnings().to_vec();
    if !gd_ok {
        warnings.push("G_d fails: L : (x)^∞ is computed but need not be the Rees ideal".into());
    }
    let saturation = rees_via_saturation(input, budget).map_err(|e| e.context("saturation"))?;
    let cap = options.level_cap.unwrap_or(2 * input.n()).max(1);
    let (ctx, dual_chain) =
        iterated_dual_chain(input, options.dual, cap, budget).map_err(|e| e.context("iterated duals"))?;
    let stab = stabilization_level(&dual_chain);
    let final_dual = match stab {
        Some(level) => &dual_chain[level as usize - 1].dual_ideal,
        None => &dual_chain.last().expect("nonempty").dual_ideal,
    };
    let a = saturation.saturated();
    let forms_equal = a.equals(final_dual).map_err(|e| e.context("forms comparison"))?;

    let first_colon = saturation
        .ladder
        .get(1)
        .cloned()
        .unwrap_or_else(|| saturation.ladder[0].clone());
    let first_colon_equal = first_colon
        .equals(&dual_chain[0].dual_ideal)
        .map_err(|e| e.context("first colon"))?;

    let mut heights = BTreeMap::new();
    let mut zero_ideals = Vec::new();
    let id_b1 = dual_chain[0].b.minor_ideal_or_zero(d)?.with_budget(budget);
    let id_bprime = ctx.b_prime.minor_ideal_or_zero(d)?.with_budget(budget);
    let idm1_bprime = if d >= 2 {
        ctx.b_prime.minor_ideal_or_zero(d - 1)?.with_budget(budget)
    } else {
        Ideal::unit(&ring)
    };
    for (key, ideal) in [
        (HEIGHT_L, &ctx.sym),
        (HEIGHT_A, a),
        (HEIGHT_ID_B1, &id_b1),
        (HEIGHT_ID_BPRIME, &id_bprime),
        (HEIGHT_IDM1_BPRIME, &idm1_bprime),
    ] {
        if ideal.is_zero() {
            zero_ideals.push(key.to_string());
        }
        if ideal.is_proper()? {
            let h = height_or_zero(ideal).map_err(|e| e.context(format!("height of {key}")))?;
            heights.insert(key.to_string(), h);
        } else {
            warnings.push(format!("{key} is the unit ideal; height omitted"));
        }
    }

    let second_form = if options.second_form && input.m() == d + 1 && d >= 2 {
        Some(second_form_check(input, a, budget).map_err(|e| e.context("second form"))?)
    } else {
        None
    };

    let fiber = special_fiber(a).map_err(|e| e.context("special fiber"))?;
    let mut generators = a.minimal_generators().map_err(|e| e.context("minimal generators"))?;
    sort_generators(&mut generators);
    let relation_type = relation_type_of(&generators);

    Ok(ReesReport {
        n: input.n(),
        d,
        m: input.m(),
        gd_ok,
        linear_type: input.is_linear_type(),
        heights,
        zero_ideals,
        saturation,
        dual_chain,
        stabilization_level: stab,
        forms_equal,
        first_colon_equal,
        second_form,
        fiber,
        relation_type,
        generators,
        warnings,
    })
}
