//! C ABI over `moea-core`. Every function returns a [`MoeaStatus`]; on failure
//! a message is available from [`moea_last_error`] on the calling thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use moea_core::harness::{run_cell, Algorithm, CellConfig};
use moea_core::{
    evaluate, pareto_front, pareto_front_size, required_archive_size, Bitstring, DensityK, Error, Family,
    MutationOperator, ObjectiveVector, ProblemSpec,
};

pub const MOEA_FAMILY_ONE_MIN_MAX: u32 = 0;
pub const MOEA_FAMILY_LOTZ: u32 = 1;
pub const MOEA_FAMILY_ONE_JUMP_ZERO_JUMP: u32 = 2;

pub const MOEA_ALGORITHM_SPEA2: u32 = 0;
pub const MOEA_ALGORITHM_GSEMO: u32 = 1;
pub const MOEA_ALGORITHM_SEMO: u32 = 2;

/// Selects the algorithm's own operator: bit-wise for SPEA2 and GSEMO, one-bit for SEMO.
pub const MOEA_MUTATION_DEFAULT: u32 = 0;
pub const MOEA_MUTATION_BITWISE: u32 = 1;
pub const MOEA_MUTATION_ONEBIT: u32 = 2;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoeaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Overflow = 4,
    Panic = 5,
    Internal = 6,
}

/// Opaque problem instance; create with [`moea_problem_new`], release with
/// [`moea_problem_free`].
pub struct MoeaProblem {
    spec: ProblemSpec,
}

/// Run parameters. Zero in `mu`, `archive`, `density_k` or `budget` selects
/// the default: μ̄ = required archive size, μ = μ̄, automatic k, and 100
/// times the runtime bound.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MoeaRunConfig {
    pub algorithm: u32,
    pub mutation: u32,
    pub mu: usize,
    pub archive: usize,
    pub density_k: usize,
    pub budget: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MoeaRunSummary {
    pub evaluations: u64,
    pub generations: u64,
    pub success: bool,
    pub final_coverage: f64,
    pub peak_population: usize,
    pub mu: usize,
    pub archive: usize,
    pub budget: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MoeaStatus {
    match e {
        Error::LengthMismatch { .. } => MoeaStatus::LengthMismatch,
        Error::Overflow(_) => MoeaStatus::Overflow,
        Error::InvalidInstance(_) | Error::InvalidArgument(_) | Error::InvalidCell { .. } | Error::EmptyPool => {
            MoeaStatus::InvalidArgument
        }
        _ => MoeaStatus::Internal,
    }
}

struct Failure(MoeaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MoeaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(MoeaStatus::InvalidArgument, message.into())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> MoeaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MoeaStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MoeaStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn moea_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn moea_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn family(code: u32) -> Result<Family, Failure> {
    match code {
        MOEA_FAMILY_ONE_MIN_MAX => Ok(Family::OneMinMax),
        MOEA_FAMILY_LOTZ => Ok(Family::LeadingOnesTrailingZeroes),
        MOEA_FAMILY_ONE_JUMP_ZERO_JUMP => Ok(Family::OneJumpZeroJump),
        other => Err(invalid(format!("unknown family code {other}"))),
    }
}

/// Creates a problem instance. `k` is the jump size for OneJumpZeroJump and
/// must be 0 for the other families.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_new(
    family_code: u32,
    m: usize,
    n: usize,
    k: usize,
    out: *mut *mut MoeaProblem,
) -> MoeaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fam = family(family_code)?;
        let k = match (fam, k) {
            (Family::OneJumpZeroJump, k) => Some(k),
            (_, 0) => None,
            (_, _) => return Err(invalid("k applies only to OneJumpZeroJump")),
        };
        let spec = ProblemSpec::new(fam, m, n, k)?;
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe { *out = Box::into_raw(Box::new(MoeaProblem { spec })) };
        Ok(())
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must be null or a pointer from [`moea_problem_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_free(problem: *mut MoeaProblem) {
    if !problem.is_null() {
        // SAFETY: ownership returns from the caller exactly once.
        drop(unsafe { Box::from_raw(problem) });
    }
}

unsafe fn problem_ref<'a>(problem: *const MoeaProblem) -> Result<&'a MoeaProblem, Failure> {
    // SAFETY: caller guarantees a live handle when non-null.
    unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))
}

/// Number of objectives m.
///
/// # Safety
/// `problem` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_objectives(problem: *const MoeaProblem, out: *mut usize) -> MoeaStatus {
    guard(|| {
        let p = unsafe { problem_ref(problem) }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = p.spec.m();
        Ok(())
    })
}

/// Evaluates `len` bits, one byte per bit (0 or 1), into `objectives`, which
/// must hold `objectives_len` >= m values.
///
/// # Safety
/// `bits` must be readable for `len` bytes and `objectives` writable for
/// `objectives_len` values.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_evaluate(
    problem: *const MoeaProblem,
    bits: *const u8,
    len: usize,
    objectives: *mut u32,
    objectives_len: usize,
) -> MoeaStatus {
    guard(|| {
        let p = unsafe { problem_ref(problem) }?;
        if bits.is_null() {
            return Err(null("bits"));
        }
        if objectives.is_null() {
            return Err(null("objectives"));
        }
        if objectives_len < p.spec.m() {
            return Err(Failure(
                MoeaStatus::LengthMismatch,
                format!("objective buffer holds {objectives_len}, need {}", p.spec.m()),
            ));
        }
        // SAFETY: caller guarantees the buffer sizes.
        let bytes = unsafe { std::slice::from_raw_parts(bits, len) };
        if bytes.iter().any(|&b| b > 1) {
            return Err(invalid("bits must be 0 or 1"));
        }
        let bools: Vec<bool> = bytes.iter().map(|&b| b == 1).collect();
        let x = Bitstring::from_bits(&bools)?;
        let value: ObjectiveVector = evaluate(&p.spec, &x)?;
        let out = unsafe { std::slice::from_raw_parts_mut(objectives, objectives_len) };
        out[..value.len()].copy_from_slice(value.values());
        Ok(())
    })
}

/// Number of Pareto-optimal objective vectors.
///
/// # Safety
/// `problem` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_front_size(problem: *const MoeaProblem, out: *mut u64) -> MoeaStatus {
    guard(|| {
        let p = unsafe { problem_ref(problem) }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = pareto_front_size(&p.spec)?;
        Ok(())
    })
}

/// Largest possible set of mutually non-dominated objective vectors.
///
/// # Safety
/// `problem` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn moea_problem_required_archive_size(problem: *const MoeaProblem, out: *mut u64) -> MoeaStatus {
    guard(|| {
        let p = unsafe { problem_ref(problem) }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = required_archive_size(&p.spec)?;
        Ok(())
    })
}

/// Fills `config` with the defaults: SPEA2, default mutation, seed 0.
///
/// # Safety
/// `config` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn moea_run_config_default(config: *mut MoeaRunConfig) -> MoeaStatus {
    guard(|| {
        let c = unsafe { config.as_mut() }.ok_or_else(|| null("config"))?;
        *c = MoeaRunConfig::default();
        Ok(())
    })
}

fn cell_config(spec: &ProblemSpec, c: &MoeaRunConfig) -> Result<CellConfig, Failure> {
    let algorithm = match c.algorithm {
        MOEA_ALGORITHM_SPEA2 => Algorithm::Spea2,
        MOEA_ALGORITHM_GSEMO => Algorithm::Gsemo,
        MOEA_ALGORITHM_SEMO => Algorithm::Semo,
        other => return Err(invalid(format!("unknown algorithm code {other}"))),
    };
    let mut cell = CellConfig::new(algorithm, spec);
    cell.mutation = match c.mutation {
        MOEA_MUTATION_DEFAULT => None,
        MOEA_MUTATION_BITWISE => Some(MutationOperator::BitWise),
        MOEA_MUTATION_ONEBIT => Some(MutationOperator::OneBit),
        other => return Err(invalid(format!("unknown mutation code {other}"))),
    };
    cell.mu = (c.mu > 0).then_some(c.mu);
    cell.archive = (c.archive > 0).then_some(c.archive);
    cell.density_k = if c.density_k == 0 {
        DensityK::Auto
    } else {
        DensityK::Fixed(c.density_k)
    };
    cell.budget = (c.budget > 0).then_some(c.budget);
    Ok(cell)
}

/// Runs one seeded trial until the front is covered or the budget is spent.
///
/// # Safety
/// `problem` must be a live handle, `config` readable, `summary` writable.
#[no_mangle]
pub unsafe extern "C" fn moea_run(
    problem: *const MoeaProblem,
    config: *const MoeaRunConfig,
    summary: *mut MoeaRunSummary,
) -> MoeaStatus {
    guard(|| {
        let p = unsafe { problem_ref(problem) }?;
        let c = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        let out = unsafe { summary.as_mut() }.ok_or_else(|| null("summary"))?;
        let plan = moea_core::harness::ExperimentPlan::new(c.seed, 1, vec![cell_config(&p.spec, c)?]);
        let cell = plan.validate()?.remove(0);
        let front = pareto_front(&p.spec)?;
        let r = run_cell(&cell, c.seed, &front)?;
        *out = MoeaRunSummary {
            evaluations: r.evaluations,
            generations: r.generations,
            success: r.success,
            final_coverage: r.final_coverage,
            peak_population: r.peak_population,
            mu: cell.mu,
            archive: cell.archive,
            budget: cell.budget,
        };
        Ok(())
    })
}
