//! Exact construction and certification of deformed hypersurfaces over generic hyperplane arrangements.
//!
//! Modules:
//! - [`exactalg`]: canonical rationals and fraction-free linear algebra.
//! - [`arrangement`]: hyperplane families, general position, diagonal hyperplanes, the generic condition.
//! - [`polyring`]: sparse homogeneous polynomials, congruence modulo a linear form.
//! - [`deform`]: the level-by-level deformation pipeline, trace verification, proof obligations.
//! - [`nevan`]: counting functions, order-inequality certificates, forcing systems, auxiliary curves.
//! - [`cli`]: command-line front end and JSON persistence.

pub mod arrangement;
pub mod cli;
pub mod deform;
pub mod exactalg;
pub mod nevan;
pub mod polyring;

use serde::{Deserialize, Serialize};

/// Outcome of a checkable predicate: it holds, or fails with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// Version string recorded in traces and manifests.
pub const TOOL_VERSION: &str = concat!("hypdeform ", env!("CARGO_PKG_VERSION"));
