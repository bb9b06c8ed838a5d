use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("expression contains a nonconstant periodic multiplication")]
    NotInCommutativeAlgebra,
    #[error("curve passes within {min_modulus:e} of the origin")]
    CurveThroughZero { min_modulus: f64 },
    #[error("curve undersampled: phase step {step} at sample {at}")]
    UndersampledCurve { step: f64, at: usize },
    #[error("winding residual {residual:e} exceeds tolerance")]
    WindingResidual { residual: f64 },
    #[error("index does not stabilise: {first} at the first resolution, {second} at the second")]
    NoPlateau { first: i64, second: i64 },
    #[error("near-null subspace not resolved: localized mass {mass} is not close to an integer")]
    UnresolvedNullSpace { mass: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("expression is not self-adjoint")]
    NotSelfAdjoint,
    #[error("principal symbol is not projection valued (defect {defect:e})")]
    NotProjectionSymbol { defect: f64 },
    #[error("determinant passes within {min_modulus:e} of the origin")]
    DeterminantThroughZero { min_modulus: f64 },
    #[error("exponential is not a finite-rank perturbation of the identity on the window (off-central mass {mass:e})")]
    NotTraceClassOnWindow { mass: f64 },
    #[error("symbol windings differ between the two frequency sheets ({plus} vs {minus})")]
    SheetMismatch { plus: i64, minus: i64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("z is not unimodular (|z| = {0})")]
    NotUnimodular(f64),
    #[error("quadrature with {nodes} nodes is too coarse, need at least {needed}")]
    QuadratureTooCoarse { nodes: usize, needed: usize },
    #[error("operator is not Fredholm: {0}")]
    NotFredholm(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("bad configuration: {0}")]
    Config(String),
}

impl SymbolError {
    /// Stable machine-readable code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            SymbolError::UnknownName(_) => "unknown_name",
            SymbolError::BadParameters(_) => "bad_parameters",
            SymbolError::NotInCommutativeAlgebra => "not_in_commutative_algebra",
            SymbolError::CurveThroughZero { .. } => "curve_through_zero",
            SymbolError::UndersampledCurve { .. } => "undersampled_curve",
            SymbolError::WindingResidual { .. } => "winding_residual",
            SymbolError::NoPlateau { .. } => "no_plateau",
            SymbolError::UnresolvedNullSpace { .. } => "unresolved_null_space",
            SymbolError::HypothesisViolated(_) => "hypothesis_violated",
            SymbolError::PreconditionFailed(_) => "precondition_failed",
            SymbolError::NotSelfAdjoint => "not_self_adjoint",
            SymbolError::NotProjectionSymbol { .. } => "not_projection_symbol",
            SymbolError::DeterminantThroughZero { .. } => "determinant_through_zero",
            SymbolError::NotTraceClassOnWindow { .. } => "not_trace_class_on_window",
            SymbolError::SheetMismatch { .. } => "sheet_mismatch",
            SymbolError::DimensionMismatch(_) => "dimension_mismatch",
            SymbolError::NotUnimodular(_) => "not_unimodular",
            SymbolError::QuadratureTooCoarse { .. } => "quadrature_too_coarse",
            SymbolError::NotFredholm(_) => "not_fredholm",
            SymbolError::Syntax { .. } => "syntax",
            SymbolError::UnknownCommand(_) => "unknown_command",
            SymbolError::Config(_) => "config",
        }
    }
}
