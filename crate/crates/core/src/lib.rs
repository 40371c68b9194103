//! Branching random walks with heavy-tailed offspring or displacement laws.
//!
//! The crate is organised around one target quantity: the probability that
//! the empirical distribution of a branching random walk at generation `n`,
//! evaluated on the diffusively scaled set `√n·A`, exceeds a level `p` that
//! the Gaussian limit cannot reach. Everything here either computes that
//! probability (exactly on tiny instances, by Monte Carlo elsewhere),
//! predicts its decay rate from closed-form rate functions, or measures the
//! moment functionals of the population size that drive those rates.
//!
//! Module map:
//!
//! * [`laws`] — offspring and step distribution families with their derived
//!   constants (mean, minimal/maximal family size, Schröder and Böttcher
//!   constants, tail constants).
//! * [`gw`] — exact law of the population size by iterated generating-function
//!   composition; harmonic and stretched-exponential moments.
//! * [`rate`] — target sets, the shift and variance rate functions `I_A(p)`
//!   and `J_A(p)`, Legendre transforms, and the per-regime decay predictions.
//! * [`sim`] — Monte Carlo engines: full-tree replication, exponentially
//!   tilted random-walk estimators, and the constructive lower-bound
//!   estimator built from one-big-family events.
//! * [`oracle`] — exhaustive enumeration of tiny instances.
//! * [`harness`] — experiment orchestration, decay-slope fitting, and the
//!   acceptance-criterion runner.

pub mod conv;
pub mod gw;
pub mod harness;
pub mod laws;
pub mod numeric;
pub mod oracle;
pub mod rate;
pub mod rng;
pub mod sim;
