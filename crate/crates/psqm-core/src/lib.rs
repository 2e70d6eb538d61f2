//! Quantum mechanics on phase space.
//!
//! The library works with two kinds of sampled wavefunctions: `ConfigField`s
//! living on a configuration-space grid and `PhaseField`s living on an
//! `(x, p)` phase-space grid. The wave-packet transform maps one into the
//! other isometrically; Weyl operators, Heisenberg-Weyl translations,
//! metaplectic operators and spectral propagators exist on both sides and are
//! intertwined by that transform. A separate set of modules covers the exact
//! symplectic linear algebra (Williamson normal form, symplectic Cayley
//! transform, ellipsoid capacities) used by the Gaussian-state diagnostics.
//!
//! Everything is `no_std` + `alloc`; IO and the command-line runner live in
//! the companion `psqm-cli` crate.
//!
//! # Conventions (version [`CONVENTIONS_VERSION`])
//!
//! All sign and scaling choices are fixed here once and used consistently:
//!
//! * Fourier transform: `Fψ(p) = (2πħ)^{-N/2} ∫ e^{-i p·x/ħ} ψ(x) dx`.
//! * Symplectic form: `z ∧ z' = p·x' - p'·x`, i.e. `z ∧ z' = (z')ᵀ J z` with
//!   `J = [[0, I], [-I, 0]]`.
//! * Wigner-Moyal transform `W(f, g)`: the second argument enters the
//!   integrand as written (no implicit conjugation); pass `conj(g)` to get
//!   the usual sesquilinear pairing.
//! * Wave-packet transform: `U_φψ(z) = (2πħ)^{-N/2} e^{i p·x/2ħ}
//!   ∫ e^{-i p·x'/ħ} ψ(x') φ(x - x') dx'`.
//! * Heisenberg-Weyl operators carry the time phase `e^{+i t₀/ħ}` on both
//!   configuration and phase space, so the group law
//!   `T(z₀,t₀)T(z₁,t₁) = T(z₀+z₁, t₀+t₁+½ z₀∧z₁)` holds exactly.
//! * Phase-space quantization rules: `x ↦ x/2 + iħ ∂_p`,
//!   `p ↦ p/2 - iħ ∂_x`, with `[X̂, P̂] = +iħ`.
//! * Metaplectic superpositions over Heisenberg-Weyl operators use the
//!   prefactor `(2πiħ)^{-N} i^ν |det(S - I)|^{-1/2}`; with that normalization
//!   the harmonic-oscillator branch indices are `ν = 0` for `0 < ωt < 2π`
//!   and `ν = -2` for `-2π < ωt < 0`.
//! * The closed-form phase of the linear-Hamiltonian flow is
//!   `Φ½(r, p; t) = -(t/2)(p·r₀ - p₀·r)`, the unique sign for which the
//!   symmetrized Hamilton-Jacobi residual vanishes identically.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod gaussian;
pub mod grid;
pub mod linalg;
pub mod measurement;
pub mod metaplectic;
pub mod propagator;
pub mod rng;
pub mod selftest;
pub mod symplectic;
pub mod transforms;
pub mod weyl;

pub use error::Error;

/// Version tag for the sign/scaling conventions listed in the crate docs.
/// Embedded in every machine-readable report so results stay traceable.
pub const CONVENTIONS_VERSION: &str = "psqm-conventions-1";

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
