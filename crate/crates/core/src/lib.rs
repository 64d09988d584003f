//! Decision procedures for the normal modal logics K, T, K4 and GL.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`formula`]: syntax trees, the ASCII parser and printer, substitution.
//! - [`semantics`]: finite Kripke models, forcing, frame classes, bounded
//!   validity by enumeration and bisimulation.
//! - [`axiomatic`]: Hilbert derivations, their checker and the deduction
//!   theorem as a derivation transformer.
//! - [`tableau`]: labelled sequent proof search returning proofs or verified
//!   countermodels.
//! - [`canonical`]: maximal consistent sets and standard models, used as an
//!   independent oracle for the search.
//!
//! ```
//! use kripke_core::{decide, parse, Logic, SearchOutcome, DEFAULT_MAX_STEPS};
//!
//! let four = parse("Box p --> Box Box p").unwrap();
//! assert!(matches!(decide(Logic::K4, &four, DEFAULT_MAX_STEPS), SearchOutcome::Theorem(_)));
//! assert!(matches!(decide(Logic::K, &four, DEFAULT_MAX_STEPS), SearchOutcome::NonTheorem { .. }));
//! ```

#![no_std]

extern crate alloc;

pub mod axiomatic;
pub mod canonical;
pub mod formula;
pub mod semantics;
pub mod tableau;

pub use axiomatic::{check_derivation, deduction_transform, Derivation, Justification, Logic, Step};
pub use canonical::{oracle_verdict, standard_model, OracleVerdict};
pub use formula::{parse, Formula, ParseError};
pub use semantics::{holds, valid_in_class_bounded, FrameClass, FrameProperty, KripkeModel};
pub use tableau::{decide, replay_proof, ProofTree, SearchOutcome, DEFAULT_MAX_STEPS};
