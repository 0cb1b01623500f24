use serde::Serialize;
use thetaflex::catalecticant::DEFAULT_MONOMIAL_CAP;
use thetaflex::theta::{ThetaOptions, HYPERELLIPTIC_GUARD};
use thetaflex::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

/// Numeric policy for one run. Recorded verbatim in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub max_radius: f64,
    pub seed: u64,
    /// Live-monomial cap for symbolic expansions.
    pub monomial_cap: usize,
    /// Smallest |θ| accepted for an even characteristic before a τ counts as
    /// too close to the hyperelliptic locus.
    pub hyperelliptic_guard: f64,
    pub format: Format,
}

impl RunConfig {
    pub fn new(tol: f64, max_radius: f64, seed: u64, monomial_cap: usize, format: Format) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Parse(format!("--tol must be positive, got {tol}")));
        }
        if !(max_radius > 0.0 && max_radius.is_finite()) {
            return Err(Error::Parse(format!("--max-radius must be positive, got {max_radius}")));
        }
        if monomial_cap == 0 {
            return Err(Error::Parse("--monomial-cap must be positive".into()));
        }
        Ok(Self { tol, max_radius, seed, monomial_cap, hyperelliptic_guard: HYPERELLIPTIC_GUARD, format })
    }

    pub fn theta_options(&self) -> ThetaOptions {
        ThetaOptions { tol: self.tol, max_radius: self.max_radius }
    }
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_RADIUS: f64 = 40.0;
pub const DEFAULT_CAP: usize = DEFAULT_MONOMIAL_CAP;
