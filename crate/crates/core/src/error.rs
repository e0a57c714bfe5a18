use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invariant factor #{index} is {value}; factors must be >= 2")]
    BadInvariantFactor { index: usize, value: String },
    #[error("invariant factor #{index} ({value}) is not a multiple of {previous}")]
    DivisibilityChain {
        index: usize,
        value: String,
        previous: String,
    },
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("cannot parse fraction {0:?}")]
    BadFraction(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid needs at least one generator")]
    NoGenerators,
    #[error("generator #{index} has length {got}, ambient rank is {expected}")]
    GeneratorLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("vector has length {got}, ambient rank is {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("generator #{index} of the source is not mapped into the target monoid")]
    NotAMorphism { index: usize },
    #[error("could not decide whether generator #{index} maps into the target (search budget exhausted)")]
    UndecidedMorphism { index: usize },
    #[error("{operation} is only implemented up to rank {max}, got rank {rank}")]
    Capability {
        operation: &'static str,
        rank: usize,
        max: usize,
    },
    #[error("search space too large for {operation} ({size} candidates)")]
    SearchTooLarge { operation: &'static str, size: usize },
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("morphism is not Kummer: {0}")]
    NotKummer(String),
    #[error("integrality certificate needs {0}")]
    CertificatePrecondition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("unknown place {0:?}")]
    UnknownPlace(String),
    #[error("duplicate place {0:?}")]
    DuplicatePlace(String),
    #[error("place {place:?}: {source}")]
    PlaceClass {
        place: String,
        #[source]
        source: LatticeError,
    },
    #[error("log support place {0:?} is not a declared place")]
    SupportNotPlace(String),
    #[error("unit torsion must be >= 1, got {0}")]
    UnitTorsion(String),
    #[error("pic: {0}")]
    Pic(#[source] LatticeError),
    #[error("expected {expected} free unit exponents, got {got}")]
    UnitRank { expected: usize, got: usize },
    #[error("divisor {divisor} has nonzero class {class} in Pic, so it is not principal")]
    NotPrincipal { divisor: String, class: String },
    #[error("elements live over different bases")]
    BaseMismatch,
    #[error("place {place:?} carries a fractional coefficient but is not in the log support")]
    FractionOffSupport { place: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MunError {
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error("n must be >= 1, got {0}")]
    BadModulus(String),
    #[error("not a torsor class: v_{place}(z) = {valuation} is not divisible by {n} and {place} is outside the log support")]
    Membership {
        place: String,
        valuation: String,
        n: String,
    },
    #[error("fraction {value} at {place} has denominator not dividing {n}")]
    BadDenominator {
        place: String,
        value: String,
        n: String,
    },
    #[error("branch divisor div(z) + n*I is negative at {negative:?} and supported off the log support at {off_support:?}")]
    BranchDivisor {
        negative: Vec<String>,
        off_support: Vec<String>,
    },
    #[error("torsor classes have different moduli or bases")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("pairing table is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    TableShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("pairing value {value} at ({row}, {col}) is not killed by the generator orders {left} and {right}")]
    NotBilinear {
        row: usize,
        col: usize,
        value: String,
        left: String,
        right: String,
    },
    #[error("element {0} does not belong to the expected component group")]
    WrongGroup(String),
}
