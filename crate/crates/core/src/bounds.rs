//! Expected-runtime bounds for finding the whole front, with constants
//! dropped, instantiated at a concrete population size. Logarithms are
//! natural.

use crate::problems::{Family, ProblemSpec};

/// OneMinMax: μ·n·min(m ln n, n). LOTZ: μ·n². OneJumpZeroJump: μ·nᵏ·min(mn, 3^{m/2}).
pub fn runtime_bound(spec: &ProblemSpec, population: f64) -> f64 {
    let n = spec.n() as f64;
    let m = spec.m() as f64;
    match spec.family() {
        Family::OneMinMax => population * n * (m * n.ln()).min(n),
        Family::LeadingOnesTrailingZeroes => population * n * n,
        Family::OneJumpZeroJump => {
            let k = spec.k().expect("validated OneJumpZeroJump spec") as i32;
            population * n.powi(k) * (m * n).min(3f64.powf(m / 2.0))
        }
    }
}

/// Default evaluation budget: `multiplier` times the bound, rounded up to a
/// whole number of `step`-sized generations and never below 100 generations.
pub fn default_budget(spec: &ProblemSpec, population: f64, step: u64, multiplier: f64) -> u64 {
    let step = step.max(1);
    let raw = (multiplier * runtime_bound(spec, population)).ceil().max(0.0);
    let raw = if raw > (u64::MAX / 2) as f64 {
        u64::MAX / 2
    } else {
        raw as u64
    };
    raw.div_ceil(step).max(100) * step
}
