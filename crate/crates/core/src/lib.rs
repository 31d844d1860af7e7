//! Exact solvers for a propositional model of political campaigns.
//!
//! A candidate's *theory* is a set of propositional statements over issue
//! variables; its models are the worlds the candidate might implement. Voters
//! score a world by a signed, weighted sum of issue stances and score a theory
//! by the best (optimistic), worst (pessimistic) or average (expected-value)
//! modeled world. The crate provides:
//!
//! * [`formula`]: the formula language, parser and theories;
//! * [`worlds`]: exhaustive model enumeration and counting;
//! * [`voters`] and [`evaluation`]: per-world and per-theory utility;
//! * [`strategy`]: optimal theories, optimal completions and turnout problems;
//! * [`reductions`]: the hardness gadgets with their inverse mappings;
//! * [`io`]: theory, voter and DIMACS file formats;
//! * [`cli`]: the `campaign` command-line tool.
//!
//! Solvers are generic over [`Scalar`]; the aliases below fix the scalar to
//! exact big rationals, which is what the file formats and CLI use.
//!
//! ```
//! use campaign_core::evaluation::utility;
//! use campaign_core::{ratio, Formula, Limits, Theory, VarUniverse, Voter, VoterKind};
//!
//! # fn main() -> campaign_core::Result<()> {
//! let u = VarUniverse::new(["taxes", "transit"])?;
//! let t = Theory::with_statements(u.clone(), vec![Formula::parse("taxes -> !transit", &u)?])?;
//! let v = Voter::new("ana", VoterKind::Pessimistic, vec![ratio(-1, 1), ratio(1, 2)])?;
//! let r = utility(&t, &v, &Limits::default())?;
//! assert_eq!(r.value, ratio(-3, 2));
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod formula;
pub mod gen;
pub mod io;
pub mod reductions;
pub mod scalar;
pub mod strategy;
pub mod voters;
pub mod worlds;

pub use error::{Error, Result};
pub use evaluation::{ExpectedMethod, UtilityResult as GenericUtilityResult};
pub use formula::{Formula, Theory, VarUniverse};
pub use scalar::{format_rational, parse_rational, ratio, Scalar};
pub use voters::VoterKind;
pub use worlds::{Limits, ModelCount, World};

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type Voter = voters::Voter<Rational>;
pub type UtilityResult = evaluation::UtilityResult<Rational>;
pub type StrategyResult = strategy::StrategyResult<Rational>;
pub type TurnoutInstance = strategy::TurnoutInstance<Rational>;
pub type TurnoutOutcome = strategy::TurnoutOutcome<Rational>;
pub type ReductionInstance = reductions::ReductionInstance<Rational>;
pub type WsatInstance = reductions::WsatInstance<Rational>;
pub type CountGadget = reductions::CountGadget<Rational>;

/// Voter over 64-bit machine rationals; overflows on large instances.
pub type SmallVoter = voters::Voter<num_rational::Rational64>;
/// Voter over `f64`; exact only for dyadic inputs.
pub type FloatVoter = voters::Voter<f64>;
