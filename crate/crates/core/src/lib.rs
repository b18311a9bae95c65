//! Outage analysis of a power-splitting SWIPT three-step two-way
//! decode-and-forward relay network.
//!
//! * [`model`]: parameters, SNR expressions and derived link constants.
//! * [`chebyshev`]: the Gauss-Chebyshev rule used by the analytic integrals.
//! * [`t2t`]: terminal-to-terminal outage probability and capacity.
//! * [`sysout`]: system outage via a four-way event decomposition, plus the
//!   high-SNR slope.
//! * [`oracle`]: Monte Carlo and adaptive-integration ground truth.
//! * [`search`]: power-splitting optimisation and parameter sweeps.
//! * [`cli`]: experiment runner behind the `twr-outage` binary.

pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod search;
pub mod sysout;
pub mod t2t;

pub use chebyshev::QuadratureRule;
pub use error::{ConfigError, Error, Result};
pub use model::{Network, NetworkConfig, Terminal};
