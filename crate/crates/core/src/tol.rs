/// Numerical thresholds shared by every module.
///
/// Scale conventions: `null` is relative to `‖z‖²`, `group` is relative to
/// `max(1, ‖A‖²)`, `point` is a projective sine distance, everything else is
/// documented where it is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub null: f64,
    pub group: f64,
    /// Unit-circle membership and the loxodromic threshold `|λ| > 1 + eig`.
    pub eig: f64,
    /// Width of the band above `1 + eig` reported as marginal.
    pub marginal: f64,
    pub cluster: f64,
    /// Relative imaginary part allowed on the resultant.
    pub resultant: f64,
    /// Zero band of the resultant, relative to its first-order sensitivity
    /// `Σ |∂R/∂s_i|·max(1, |s_i|)` to the coefficients.
    pub resultant_zero: f64,
    pub point: f64,
    /// Relative size below which a Hermitian pairing counts as zero.
    pub pairing: f64,
    /// Consistency residual of the multiplicative ratio system.
    pub ratio: f64,
    /// Residual accepted when verifying a constructed isometry.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            null: 1e-9,
            group: 1e-9,
            eig: 1e-8,
            marginal: 1e-6,
            cluster: 1e-7,
            resultant: 1e-6,
            resultant_zero: 1e-9,
            point: 1e-8,
            pairing: 1e-8,
            ratio: 1e-6,
            verify: 1e-7,
        }
    }
}

impl Tolerances {
    /// Defaults with the verification tolerance replaced.
    pub fn with_verify(verify: f64) -> Self {
        Self {
            verify,
            ..Self::default()
        }
    }
}
