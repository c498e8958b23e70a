//! Random almost linear presentations and batch checks of the structural
//! laws they are expected to satisfy.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::format_matrix_file;
use crate::error::{ReesError, Result};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::groebner::GbBudget;
use crate::polymatrix::PolyMatrix;
use crate::polyring::{Monomial, PolyRing, Polynomial, RingRef};
use crate::reescore::{
    check_gd, run_full_report, DualOptions, PresentationInput, ReesReport, ReportOptions, HEIGHT_A,
    HEIGHT_ID_BPRIME, HEIGHT_IDM1_BPRIME, HEIGHT_L,
};

/// Resampling attempts per instance before giving up on `G_d`.
pub const GD_RETRY_CAP: u32 = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceSpec {
    pub d: usize,
    pub m: usize,
    pub n: u32,
    pub field: FieldSpec,
    pub seed: u64,
    pub trials: usize,
}

impl InstanceSpec {
    pub fn new(d: usize, m: usize, n: u32, field: FieldSpec, seed: u64, trials: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(ReesError::Validation(format!("d must be 2 or 3, got {d}")));
        }
        if m < d + 1 || m > d + 2 {
            return Err(ReesError::Validation(format!(
                "m must lie in {}..={}, got {m}",
                d + 1,
                d + 2
            )));
        }
        if !(1..=3).contains(&n) {
            return Err(ReesError::Validation(format!("n must lie in 1..=3, got {n}")));
        }
        Ok(InstanceSpec {
            d,
            m,
            n,
            field,
            seed,
            trials,
        })
    }
}

/// Independent stream for one `(seed, index, attempt)` triple.
fn stream(seed: u64, index: u64, attempt: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..20].copy_from_slice(&attempt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Exponent vectors of all degree-`n` monomials in the x-block.
fn x_monomials(d: usize, n: u32) -> Vec<Monomial> {
    fn rec(var: usize, d: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == d {
            exps.push(left);
            out.push(Monomial::from_exponents(exps).expect("small exponents"));
            exps.pop();
            return;
        }
        for e in (0..=left).rev() {
            exps.push(e);
            rec(var + 1, d, left - e, exps, out);
            exps.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, n, &mut Vec::new(), &mut out);
    out
}

/// Dense random form of degree `n` in the x-variables.
pub fn random_form<F: Field>(ring: &RingRef<F>, n: u32, rng: &mut impl Rng) -> Polynomial<F> {
    let field = ring.field();
    let terms = x_monomials(ring.d(), n)
        .into_iter()
        .map(|mono| (mono, field.from_sample(rng.gen())))
        .collect();
    Polynomial::from_terms(ring, terms)
}

/// Random matrix of the requested shape, without the `G_d` filter.
pub fn random_presentation<F: Field>(ring: &RingRef<F>, n: u32, rng: &mut impl Rng) -> PolyMatrix<F> {
    let m = ring.m();
    let mut entries = Vec::with_capacity(m * (m - 1));
    for _ in 0..m {
        for c in 0..m - 1 {
            let degree = if c + 2 == m { n } else { 1 };
            entries.push(random_form(ring, degree, rng));
        }
    }
    PolyMatrix::new(ring, m, m - 1, entries).expect("shape is consistent")
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance<F: Field> {
    pub index: u64,
    pub input: PresentationInput<F>,
    /// Draws needed before `G_d` held (1 = first draw).
    pub attempts: u32,
}

/// Deterministic instance number `index` of the stream given by `spec`.
pub fn generate_instance<F: Field>(
    spec: &InstanceSpec,
    ring: &RingRef<F>,
    index: u64,
    budget: GbBudget,
) -> Result<GeneratedInstance<F>> {
    if ring.d() != spec.d || ring.m() != spec.m {
        return Err(ReesError::RingMismatch);
    }
    for attempt in 0..GD_RETRY_CAP {
        let mut rng = stream(spec.seed, index, attempt);
        let phi = random_presentation(ring, spec.n, &mut rng);
        let Ok(input) = PresentationInput::new(phi) else {
            continue;
        };
        if check_gd(input.phi(), budget)? {
            return Ok(GeneratedInstance {
                index,
                input,
                attempts: attempt + 1,
            });
        }
    }
    Err(ReesError::Precondition(format!(
        "no G_{} instance within {GD_RETRY_CAP} draws at index {index}",
        spec.d
    )))
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Where violating instances are written.
    pub dump_dir: Option<PathBuf>,
    pub budget: GbBudget,
    pub dual: DualOptions,
    /// Also check the second-form equality when `m = d + 1`.
    pub second_form: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            threads: None,
            dump_dir: None,
            budget: GbBudget::default(),
            dual: DualOptions::default(),
            second_form: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: u64,
    pub law: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub trials_run: usize,
    pub gd_pass_count: usize,
    pub gd_retry_exhausted: usize,
    pub forms_equal_count: usize,
    pub sat_index_histogram: BTreeMap<u32, usize>,
    pub height_violation_count: usize,
    pub violations: Vec<Violation>,
    pub budget_exceeded_count: usize,
    pub errors: Vec<String>,
    pub counterexample_dumps: Vec<String>,
}

impl BatchSummary {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }
}

/// What one instance contributed to the summary.
#[derive(Debug, Default)]
struct Outcome {
    gd_pass: bool,
    retry_exhausted: bool,
    budget_exceeded: bool,
    forms_equal: bool,
    sat_index: Option<u32>,
    height_violations: usize,
    violations: Vec<Violation>,
    error: Option<String>,
    dump: Option<String>,
}

/// Laws a `G_d` almost linear instance must satisfy; returns
/// `(height violations, all violations)`.
pub fn check_laws<F: Field>(index: u64, input: &PresentationInput<F>, report: &ReesReport<F>) -> (usize, Vec<Violation>) {
    let (d, m, n) = (input.d(), input.m(), input.n());
    let mut heights = 0;
    let mut out = Vec::new();
    let mut fail = |law: &str, detail: String| {
        out.push(Violation {
            index,
            law: law.to_string(),
            detail,
        })
    };
    let expect_height = |key: &str, want: usize| -> Option<String> {
        match report.heights.get(key) {
            Some(&h) if h == want => None,
            other => Some(format!("ht {key} = {other:?}, expected {want}")),
        }
    };
    let mut height_checks = vec![expect_height(HEIGHT_L, d), expect_height(HEIGHT_A, m - 1)];
    let bprime_zero = report.zero_ideals.iter().any(|k| k == HEIGHT_ID_BPRIME);
    if m == d + 1 {
        if !bprime_zero {
            height_checks.push(Some("I_d(B(phi')) is not the zero ideal".into()));
        }
        height_checks.push(expect_height(HEIGHT_IDM1_BPRIME, 2));
    } else {
        height_checks.push(expect_height(HEIGHT_ID_BPRIME, m - d - 1));
    }
    for detail in height_checks.into_iter().flatten() {
        heights += 1;
        fail("height", detail);
    }
    if report.sat_index() != n {
        fail("sat_index", format!("sat_index = {}, expected n = {n}", report.sat_index()));
    }
    if !report.first_colon_equal {
        fail("first_colon", "L : (x) differs from L + I_d(B_1)".into());
    }
    if m == d + 1 {
        let expected = n * (d as u32 - 1) + 1;
        if !report.forms_equal {
            fail("forms_equal", "A differs from the stabilized dual ideal".into());
        }
        if !report.fiber.is_principal || report.fiber.degree != Some(expected) {
            fail(
                "fiber",
                format!(
                    "fiber principal = {}, degree = {:?}, expected {expected}",
                    report.fiber.is_principal, report.fiber.degree
                ),
            );
        }
        if report.relation_type != expected {
            fail(
                "relation_type",
                format!("relation type {}, expected {expected}", report.relation_type),
            );
        }
        if report.second_form == Some(false) {
            fail("second_form", "(gK^n + J) : x_d^n differs from A".into());
        }
    }
    (heights, out)
}

fn run_instance<F: Field>(spec: &InstanceSpec, ring: &RingRef<F>, index: u64, options: &BatchOptions) -> Outcome {
    let mut outcome = Outcome::default();
    let generated = match generate_instance(spec, ring, index, options.budget) {
        Ok(g) => g,
        Err(e) if e.is_budget() => {
            outcome.budget_exceeded = true;
            return outcome;
        }
        Err(ReesError::Precondition(_)) => {
            outcome.retry_exhausted = true;
            return outcome;
        }
        Err(e) => {
            outcome.error = Some(format!("instance {index}: {e}"));
            return outcome;
        }
    };
    outcome.gd_pass = true;
    let report_options = ReportOptions {
        dual: options.dual,
        level_cap: None,
        budget: options.budget,
        second_form: options.second_form,
    };
    let report = match run_full_report(&generated.input, &report_options) {
        Ok(r) => r,
        Err(e) if e.is_budget() => {
            outcome.budget_exceeded = true;
            return outcome;
        }
        Err(e) => {
            outcome.error = Some(format!("instance {index}: {e}"));
            return outcome;
        }
    };
    outcome.forms_equal = report.forms_equal;
    outcome.sat_index = Some(report.sat_index());
    let (heights, violations) = check_laws(index, &generated.input, &report);
    outcome.height_violations = heights;
    outcome.violations = violations;
    if !outcome.violations.is_empty() {
        if let Some(dir) = &options.dump_dir {
            outcome.dump = Some(dump_instance(dir, spec, &generated, &outcome.violations));
        }
    }
    outcome
}

fn dump_instance<F: Field>(
    dir: &std::path::Path,
    spec: &InstanceSpec,
    generated: &GeneratedInstance<F>,
    violations: &[Violation],
) -> String {
    let path = dir.join(format!(
        "counterexample_d{}_m{}_n{}_seed{}_idx{}.mat",
        spec.d, spec.m, spec.n, spec.seed, generated.index
    ));
    let mut header = vec![
        format!(
            "counterexample: d={} m={} n={} field={} seed={} index={} attempts={}",
            spec.d, spec.m, spec.n, spec.field, spec.seed, generated.index, generated.attempts
        ),
    ];
    header.extend(violations.iter().map(|v| format!("{}: {}", v.law, v.detail)));
    let text = format_matrix_file(generated.input.phi(), &header);
    let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, text));
    match written {
        Ok(()) => path.display().to_string(),
        Err(e) => format!("{} (write failed: {e})", path.display()),
    }
}

/// Runs `spec.trials` instances over the field `field`.
pub fn run_batch_in<F: Field>(spec: &InstanceSpec, field: F, options: &BatchOptions) -> Result<BatchSummary> {
    let ring = PolyRing::new(spec.d, spec.m, field)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = options.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| ReesError::Validation(format!("worker pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        (0..spec.trials as u64)
            .into_par_iter()
            .map(|index| run_instance(spec, &ring, index, options))
            .collect()
    });
    let mut summary = BatchSummary {
        trials_run: outcomes.len(),
        ..BatchSummary::default()
    };
    for o in outcomes {
        summary.gd_pass_count += o.gd_pass as usize;
        summary.gd_retry_exhausted += o.retry_exhausted as usize;
        summary.budget_exceeded_count += o.budget_exceeded as usize;
        summary.forms_equal_count += o.forms_equal as usize;
        if let Some(s) = o.sat_index {
            *summary.sat_index_histogram.entry(s).or_default() += 1;
        }
        summary.height_violation_count += o.height_violations;
        summary.violations.extend(o.violations);
        summary.errors.extend(o.error);
        summary.counterexample_dumps.extend(o.dump);
    }
    Ok(summary)
}

/// Runs a batch over the field named in `spec`.
pub fn run_batch(spec: &InstanceSpec, options: &BatchOptions) -> Result<BatchSummary> {
    match spec.field {
        FieldSpec::Prime(p) => run_batch_in(spec, PrimeField::new(p)?, options),
        FieldSpec::Rational => run_batch_in(spec, Rationals, options),
    }
}
