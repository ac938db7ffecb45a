use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("complex hyperbolic dimension must be at least 1")]
    InvalidDimension,

    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("point lies outside the closed Siegel domain (2Re(z1)+|z2|^2+...={value})")]
    OutsideSiegelDomain { value: f64 },

    #[error("vector is not null: <z,z> = {self_product}")]
    NotNull { self_product: f64 },

    #[error("matrix is not in SU(n,1): form residual {form_residual:e}, det residual {det_residual:e}")]
    NotInGroup { form_residual: f64, det_residual: f64 },

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("no unit-norm scaling exists for the completed column")]
    NoUnitScaling,

    #[error("Gram-Schmidt broke down after {attempts} attempts")]
    GramSchmidtBreakdown { attempts: usize },

    #[error("points {0} and {1} coincide projectively")]
    CoincidentPoints(usize, usize),

    #[error("ill-conditioned input: {0}")]
    Conditioning(String),

    #[error("degenerate configuration: {product} vanishes{}", label_suffix(.label))]
    DegenerateConfiguration {
        product: &'static str,
        label: Option<(usize, usize)>,
    },

    #[error("tuple spans rank {rank}, {required} projectively independent lifts are required")]
    NotFullRank { rank: usize, required: usize },

    #[error("tuple must contain at least {min} points, found {found}")]
    TupleTooShort { min: usize, found: usize },

    #[error("element is not loxodromic")]
    NotLoxodromic,

    #[error("largest eigenvalue modulus {modulus} is marginal; override the eigenvalue tolerance")]
    Marginal { modulus: f64 },

    #[error("eigenvalue clusters separated by {gap:e} are ambiguous")]
    ClusteringAmbiguity { gap: f64 },

    #[error("resultant sign ({resultant_re:e}{resultant_im:+e}i) disagrees with eigenvalue separation (regular = {oracle})")]
    InconsistentRegularity {
        resultant_re: f64,
        resultant_im: f64,
        oracle: bool,
    },

    #[error("not a valid pair: {0}")]
    InvalidPair(String),

    #[error("eigenpoint collisions remain after {attempts} rephasings")]
    CollisionUnresolved { attempts: usize },

    #[error("anchor unavailable: <r_A, a_B> vanishes")]
    AnchorUnavailable,

    #[error("pair is not a good pair of type I")]
    NotGoodPair,

    #[error("polar eigenvector matching failed at index {0}")]
    MatchingFailure(usize),

    #[error("pair is not non-singular")]
    NotNonsingular,

    #[error("inconsistent flags: {0}")]
    InconsistentFlags(String),

    #[error("conjugacy undetermined after {samples} centralizer samples")]
    Undetermined { samples: usize },
}

fn label_suffix(label: &Option<(usize, usize)>) -> String {
    match label {
        Some((k, j)) => format!(" in cross ratio X_{{{k},{j}}}"),
        None => String::new(),
    }
}
