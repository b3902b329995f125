use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("invalid invariant factors: {0}")]
    InvalidInvariantFactors(String),
    #[error("quotient is infinite (free rank {free_rank})")]
    InfiniteQuotient { free_rank: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map does not respect the source relations")]
    NotWellDefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAxiom {
    Associativity,
    Identity,
    Inverses,
}

impl std::fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupAxiom::Associativity => "associativity",
            GroupAxiom::Identity => "identity",
            GroupAxiom::Inverses => "inverses",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a group: {0} fails")]
    NotAGroup(GroupAxiom),
    #[error("order cap exceeded: {what} needs order {order}, cap is {cap}")]
    OrderCapExceeded { what: String, order: usize, cap: usize },
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("product set needs a normal operand")]
    NotNormalOperand,
    #[error("stabilizer {0} is not normal")]
    NotNormal(usize),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("quotient lattice has torsion (invariant factor {0})")]
    QuotientNotFree(String),
    #[error("sublattice is not stable under the action")]
    NotStable,
    #[error("subgroup is not cyclic")]
    NotCyclic,
    #[error("|Ker e| = {ker_e} does not divide |H2(Z)'| = {h2z_prime}")]
    IndivisibleCounts { ker_e: String, h2z_prime: String },
    #[error("invalid input: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
