//! Exact distributions, moments and risk measures for sums of dependent
//! risks built as exponential mixtures with a shared frailty.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod aggregate;
pub mod asymptotics;
pub mod dependence;
pub mod error;
pub mod gamma_ext;
pub mod mc_oracle;
pub mod mixing;
pub mod mixture;
pub mod numeric;
pub mod riskmeasures;
pub mod ruin_collective;
pub mod specfun;
pub mod verify;

pub use aggregate::{moment_from_mixture, AggregateModel};
pub use asymptotics::ParetoTailSpec;
pub use dependence::DependentVector;
pub use error::{Error, Result};
pub use gamma_ext::{GammaMixtureModel, SibuyaModel};
pub use mc_oracle::{SampleMatrix, SimModel, SimulationPlan};
pub use mixing::{MixingDistribution, MixingKind};
pub use mixture::{ComponentLaw, MixtureComponent, MixtureRepresentation};
pub use riskmeasures::{risk_report, tail_moment, tvar, value_at_risk, RiskReport, TailModel};
pub use ruin_collective::{CompoundDensity, CompoundModel, PrimaryLaw, RuinInput};
pub use verify::{verify_model, VerifyConfig, VerifyReport};
