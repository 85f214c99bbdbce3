//! Effective size of two-mode bosonic cat states.

pub mod combinatorics;
pub mod distinguish;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod quadrature;
pub mod rdm;
pub mod sequential;
pub mod state;

pub use distinguish::CatSizeResult;
pub use entropy::{DisconnectivityResult, EntropyCurve};
pub use error::{Error, Result};
pub use fit::{FitGrid, FitResult};
pub use linalg::HermitianMatrix;
pub use rdm::{BranchRdms, FockOccupation, RdmMode};
pub use sequential::{ProductBranchPair, ProtocolTrace};
pub use state::{GaussianSpread, NumberDistribution, SuperpositionSpec};
