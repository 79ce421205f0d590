//! Stimulated parametric down-conversion in orbital-angular-momentum modes.
//!
//! The crate covers four layers:
//!
//! - [`mode`]: Laguerre-Gauss and modified Laguerre-Gauss transverse modes at the
//!   crystal plane, and pointwise field products.
//! - [`overlap`]: thin-crystal expansion coefficients of the pump mode function in a
//!   signal/idler product basis, by radial quadrature and by closed form, and the OAM
//!   spectrum they imply.
//! - [`fock`]: multimode occupation states with exact (`rational · sqrt`) or float
//!   amplitudes, creation/annihilation with Bose enhancement, and the pair-creation
//!   power that produces the stimulated output state.
//! - [`cloning`]: single-copy cloning fidelities from the explicit state, from the
//!   combinatorial counting sum, from brute-force enumeration and from the optimal
//!   `N → M` bound.
//!
//! [`spectrum`] holds the flattening strategies (MLG modes, Procrustean filtering,
//! pump shaping).
//!
//! ```
//! use stimpdc::cloning::{state_vs_formula_report, CloningScenario, Verdict};
//!
//! let report = state_vs_formula_report(&CloningScenario::new(1, 2, 2)?)?;
//! assert_eq!(report.formula.to_string(), "5/6");
//! assert_eq!(report.verdict, Verdict::ExactEqual);
//! # Ok::<(), stimpdc::Error>(())
//! ```

pub mod cloning;
pub mod error;
pub mod exact;
pub mod fock;
pub mod mode;
pub mod overlap;
pub mod quadrature;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
