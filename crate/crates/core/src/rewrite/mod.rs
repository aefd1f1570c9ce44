//! The rewrite relation, its closures and bounded analyses.

mod analysis;
mod conversion;
mod object;
mod reduce;
mod system;

pub use analysis::*;
pub use conversion::{ConvStep, ConversionError, ConversionSequence, Direction};
pub use object::Object;
pub use reduce::*;
pub use system::{RewriteRule, RewriteSystem, RuleError};


