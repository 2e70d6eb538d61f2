use core::fmt;

/// Errors reported by the numerical layer.
///
/// Construction errors carry the measured defect so callers can report it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid lengths must be powers of two for the fast transforms.
    NotPowerOfTwo(usize),
    /// Axis bounds must satisfy `x_max > x_min` and be symmetric about 0.
    InvalidBounds,
    /// ħ must be strictly positive.
    NonPositiveHbar,
    /// Two fields that must share a grid do not.
    GridMismatch,
    /// An operation received a vector or matrix of the wrong dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// The operation is only implemented for this many degrees of freedom.
    UnsupportedDimension { max_dof: usize, got: usize },
    /// A matrix required to be symmetric is not (max asymmetry given).
    NotSymmetric(f64),
    /// A matrix required to be positive definite has this smallest eigenvalue.
    NotPositiveDefinite(f64),
    /// `‖SᵀJS - J‖_max` exceeded the certification tolerance.
    NotSymplectic(f64),
    /// The symplectic matrix has a singular upper-right block (`det B` given),
    /// so it admits no generating function of free type.
    NotFree(f64),
    /// `det(S - I)` is too close to zero for the Cayley / Weyl-superposition
    /// representation.
    SingularFlow(f64),
    /// A propagator was requested at a time where its quadrature degenerates.
    NearSingularTime(f64),
    /// The twisted Fourier transform of a grid symbol has too much mass near
    /// the grid boundary (aliasing guard); the fraction is given.
    SymbolNotIntegrable(f64),
    /// Dense-kernel operators are restricted to small grids.
    DenseGridTooLarge { len: usize, cap: usize },
    /// The explicit time stepper would be unstable: `dt * ρ(H)/ħ` exceeds
    /// the stability bound.
    StabilityViolation { dt_rho: f64, bound: f64 },
    /// An input field has zero (or non-finite) norm where a normalized state
    /// is required.
    ZeroNorm,
    /// A Wigner ellipsoid passed to purification does not have capacity πħ.
    CapacityNotHalfQuantum { capacity: f64, expected: f64 },
    /// Krylov propagation failed to converge within the iteration cap.
    KrylovStall,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPowerOfTwo(n) => write!(f, "grid length {n} is not a power of two"),
            Error::InvalidBounds => write!(f, "axis bounds must be symmetric with x_max > 0"),
            Error::NonPositiveHbar => write!(f, "hbar must be positive"),
            Error::GridMismatch => write!(f, "fields live on different grids"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::UnsupportedDimension { max_dof, got } => {
                write!(f, "operation supports at most {max_dof} degrees of freedom, got {got}")
            }
            Error::NotSymmetric(d) => write!(f, "matrix is not symmetric (defect {d:.3e})"),
            Error::NotPositiveDefinite(l) => {
                write!(f, "matrix is not positive definite (min eigenvalue {l:.3e})")
            }
            Error::NotSymplectic(d) => write!(f, "matrix is not symplectic (defect {d:.3e})"),
            Error::NotFree(d) => write!(f, "symplectic matrix is not free (det B = {d:.3e})"),
            Error::SingularFlow(d) => write!(f, "det(S - I) = {d:.3e} is numerically singular"),
            Error::NearSingularTime(s) => {
                write!(f, "propagator time too close to singular (|sin| = {s:.3e})")
            }
            Error::SymbolNotIntegrable(m) => {
                write!(f, "symbol spectrum has boundary mass fraction {m:.3e}")
            }
            Error::DenseGridTooLarge { len, cap } => {
                write!(f, "dense kernel refused: grid has {len} points, cap is {cap}")
            }
            Error::StabilityViolation { dt_rho, bound } => {
                write!(f, "explicit step unstable: dt*rho = {dt_rho:.3e} > {bound:.3e}")
            }
            Error::ZeroNorm => write!(f, "field has zero norm"),
            Error::CapacityNotHalfQuantum { capacity, expected } => {
                write!(f, "ellipsoid capacity {capacity:.6e} != {expected:.6e}")
            }
            Error::KrylovStall => write!(f, "Krylov exponential did not converge"),
        }
    }
}

impl core::error::Error for Error {}
