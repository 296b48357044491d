//! Constants, the base case, the key observation and the main procedure.

pub mod basecase;
pub mod constants;
pub mod keyob;
pub mod procedure;

pub use basecase::{pure_blockade_from_rainbow22, BaseCaseError, PureBlockade};
pub use constants::{base_remark_dimensions, compute_constants, d_s, Constants, ConstantsError};
pub use keyob::{comb_to_rainbow_minor, KeyobError};
pub use procedure::{
    main_lemma_procedure, verify_trace, CombCertificate, ConstructionTrace, LemmaError,
    LemmaParams, Mode, Outcome, ProcedureOptions, RelaxFactors,
};
