//! Machine-checked examples and counterexamples at finite truncation.
//!
//! Every claim is an exact assertion with a witness; reports print one
//! `PASS <id> <witness>` or `FAIL <id> <witness>` line per claim and a final
//! `OVERALL PASS|FAIL` line.

mod examples;
mod series;
mod suite;

use std::fmt;

use crate::error::{Error, Result};
use crate::par;

pub use examples::{verify_example5, verify_example6, verify_example7, Example5Options};
pub use series::verify_restricted_series;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    /// `<example>.<claim>`.
    pub id: String,
    pub passed: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryReport {
    pub id: String,
    pub cap: usize,
    pub claims: Vec<Claim>,
}

impl GalleryReport {
    pub fn new(id: &str, cap: usize) -> GalleryReport {
        GalleryReport { id: id.to_string(), cap, claims: Vec::new() }
    }

    /// Records `<report id>.<claim>`; a failing claim without a witness gets
    /// a placeholder so that every failure carries one.
    pub fn claim(&mut self, claim: &str, passed: bool, witness: impl Into<String>) {
        let mut witness = witness.into();
        if witness.is_empty() {
            witness = if passed { "ok".into() } else { "no witness recorded".into() };
        }
        self.claims.push(Claim { id: format!("{}.{claim}", self.id), passed, witness });
    }

    /// Records the outcome of a fallible check; engine errors fail the claim.
    pub fn check(&mut self, claim: &str, outcome: Result<(bool, String)>) {
        match outcome {
            Ok((passed, witness)) => self.claim(claim, passed, witness),
            Err(e) => self.claim(claim, false, format!("error: {e}")),
        }
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    fn absorb(&mut self, other: GalleryReport) {
        self.claims.extend(other.claims);
    }
}

impl fmt::Display for GalleryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.claims {
            writeln!(f, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.witness)?;
        }
        write!(f, "OVERALL {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Item ids accepted by [`run_selected`], in report order.
pub const ITEMS: [&str; 11] = [
    "cor18",
    "example7",
    "example5",
    "example6",
    "restricted",
    "thm6",
    "thm7",
    "thm8",
    "thm2",
    "basis_lift",
    "remark3",
];

fn run_item(name: &str, cap: usize, seed: u64) -> Result<GalleryReport> {
    match name {
        "cor18" => suite::cor18(cap, seed),
        "example7" => verify_example7(6.min(cap - 1), cap),
        "example5" => verify_example5(cap, Example5Options::default()),
        "example6" => verify_example6(cap),
        "restricted" => verify_restricted_series(2, cap),
        "thm6" => suite::thm6(cap, seed),
        "thm7" => suite::thm7(cap, seed),
        "thm8" => suite::thm8(cap, seed),
        "thm2" => suite::thm2(cap, seed),
        "basis_lift" => suite::basis_lifts(cap, seed),
        "remark3" => suite::remark3(cap, seed),
        other => Err(Error::Precondition(format!("unknown gallery item {other:?}"))),
    }
}

/// Runs the given items concurrently and merges their claims in order.
pub fn run_selected(cap: usize, seed: u64, items: &[&str]) -> Result<GalleryReport> {
    if cap < 2 {
        return Err(Error::CapTooSmall { cap, required: 2 });
    }
    if let Some(bad) = items.iter().find(|i| !ITEMS.contains(i)) {
        return Err(Error::Precondition(format!("unknown gallery item {bad:?}; expected one of {}", ITEMS.join(", "))));
    }
    let reports = par::map(items, |name| {
        run_item(name, cap, seed).unwrap_or_else(|e| {
            let mut r = GalleryReport::new(name, cap);
            r.claim("run", false, format!("error: {e}"));
            r
        })
    });
    let mut all = GalleryReport::new("all", cap);
    for r in reports {
        all.absorb(r);
    }
    Ok(all)
}

/// The whole gallery. Verdicts do not depend on `seed`; only the sampled
/// instances and their witnesses do.
pub fn run_all(cap: usize, seed: u64) -> Result<GalleryReport> {
    run_selected(cap, seed, &ITEMS)
}
